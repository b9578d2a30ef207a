//! `qwlab profile`: sample-averaged distribution at a fixed time, shape
//! classification, and a two-panel (linear / log-linear) plot.

use std::fmt::Write as _;

use qwlab_core::ensemble::{ensemble_average, NoiseModel};
use qwlab_core::profile::{fit_profile, FitOptions};

use super::{prepare_out_dir, spinor_from, write_text};
use crate::config::{base_defaults, RunConfig};
use crate::svg::{self, Panel, Series};
use crate::{CliError, CommonArgs};

pub fn run(args: &CommonArgs) -> Result<u8, CliError> {
    // profiles look at the shape at a fixed time; 200 steps is the default
    let defaults = RunConfig { steps: Some(200), ..base_defaults() };
    let config = args.resolve(defaults)?;
    let dir = prepare_out_dir(&config)?;

    let eps = config.epsilon.ok_or_else(|| {
        CliError::Usage("profile needs --epsilon (it averages over the noise ensemble)".into())
    })?;
    let g0 = config.g0.expect("default");
    let model = NoiseModel::new(g0, eps, config.samples.expect("default"), config.seed.expect("default"))?;
    let spinor = spinor_from(config.coin.expect("default"))?;
    let stats = ensemble_average(spinor, &model, config.steps.expect("default"))?;

    let mut csv = String::from("x,probability,stderr\n");
    for ((&x, &p), &se) in stats
        .mean_distribution
        .positions()
        .iter()
        .zip(stats.mean_distribution.probabilities())
        .zip(&stats.stderr_distribution)
    {
        let _ = writeln!(csv, "{x},{p:.12e},{se:.12e}");
    }
    write_text(&dir.join("profile.csv"), &csv)?;

    let fit = fit_profile(&stats.mean_distribution, &FitOptions::default())?;
    let fit_json = serde_json::to_string_pretty(&fit)
        .map_err(|e| CliError::Runtime(e.into()))?;
    write_text(&dir.join("fit.json"), &(fit_json + "\n"))?;

    let points: Vec<(f64, f64)> = stats
        .mean_distribution
        .positions()
        .iter()
        .zip(stats.mean_distribution.probabilities())
        .filter(|&(_, &p)| p > 0.0)
        .map(|(&x, &p)| (x as f64, p))
        .collect();
    let title = format!(
        "averaged profile, g0 = {g0:.4}, eps = {eps:.4}, t = {} ({:?})",
        config.steps.expect("default"),
        fit.classification
    );
    let panels = [
        Panel {
            title,
            x_label: "x".into(),
            y_label: "P".into(),
            log_y: false,
            series: vec![Series { label: String::new(), color: svg::color(0), points: points.clone() }],
        },
        Panel {
            title: "log-linear".into(),
            x_label: "x".into(),
            y_label: "log10 P".into(),
            log_y: true,
            series: vec![Series { label: String::new(), color: svg::color(1), points }],
        },
    ];
    write_text(&dir.join("profile.svg"), &svg::render(&panels))?;

    Ok(0)
}
