//! `qwlab simulate`: one noiseless run (fixed phase g0) or one ensemble run,
//! writing distribution.csv, moments.csv and companion SVG plots.

use std::fmt::Write as _;

use qwlab_core::ensemble::{ensemble_average, NoiseModel};
use qwlab_core::transfer::diffusion_closed;
use qwlab_core::walk::{CoinOperator, WalkerState};

use super::{closed_case_for, prepare_out_dir, spinor_from, write_text};
use crate::config::base_defaults;
use crate::svg::{self, Panel, Series};
use crate::{CliError, CommonArgs};

struct RunData {
    positions: Vec<i64>,
    probabilities: Vec<f64>,
    prob_stderr: Vec<f64>,
    mean_x: Vec<f64>,
    mean_x2: Vec<f64>,
    stderr_x2: Vec<f64>,
}

pub fn run(args: &CommonArgs) -> Result<u8, CliError> {
    let config = args.resolve(base_defaults())?;
    let dir = prepare_out_dir(&config)?;

    let g0 = config.g0.expect("default");
    let steps = config.steps.expect("default");
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    let spinor = spinor_from(config.coin.expect("default"))?;

    let data = match config.epsilon {
        None => noiseless(g0, steps, spinor)?,
        Some(eps) => {
            let model = NoiseModel::new(g0, eps, config.samples.expect("default"), config.seed.expect("default"))?;
            let stats = ensemble_average(spinor, &model, steps)?;
            RunData {
                positions: stats.mean_distribution.positions().to_vec(),
                probabilities: stats.mean_distribution.probabilities().to_vec(),
                prob_stderr: stats.stderr_distribution.clone(),
                mean_x: stats.mean_x.clone(),
                mean_x2: stats.mean_x2.clone(),
                stderr_x2: stats.stderr_x2.clone(),
            }
        }
    };

    // distribution.csv
    let mut csv = String::from("x,probability,stderr\n");
    for ((&x, &p), &se) in data.positions.iter().zip(&data.probabilities).zip(&data.prob_stderr) {
        let _ = writeln!(csv, "{x},{p:.12e},{se:.12e}");
    }
    write_text(&dir.join("distribution.csv"), &csv)?;

    // moments.csv
    let mut csv = String::from("t,mean_x,mean_x2,stderr_x2\n");
    for (i, ((&m1, &m2), &se)) in data.mean_x.iter().zip(&data.mean_x2).zip(&data.stderr_x2).enumerate() {
        let _ = writeln!(csv, "{},{m1:.12e},{m2:.12e},{se:.12e}", i + 1);
    }
    write_text(&dir.join("moments.csv"), &csv)?;

    // SVG companions (never feed back into the CSVs)
    let dist_points: Vec<(f64, f64)> = data
        .positions
        .iter()
        .zip(&data.probabilities)
        .filter(|&(_, &p)| p > 0.0)
        .map(|(&x, &p)| (x as f64, p))
        .collect();
    let title = match config.epsilon {
        None => format!("P(x, t={steps}) at fixed g = {g0:.4}"),
        Some(eps) => format!("averaged P(x, t={steps}) at g0 = {g0:.4}, eps = {eps:.4}"),
    };
    write_text(
        &dir.join("distribution.svg"),
        &svg::render(&[Panel {
            title,
            x_label: "x".into(),
            y_label: "P".into(),
            log_y: false,
            series: vec![Series { label: String::new(), color: svg::color(0), points: dist_points }],
        }]),
    )?;

    let slope_points: Vec<(f64, f64)> = data
        .mean_x2
        .iter()
        .enumerate()
        .map(|(i, &m2)| ((i + 1) as f64, m2 / (i + 1) as f64))
        .collect();
    let mut series = vec![Series {
        label: "measured".into(),
        color: svg::color(0),
        points: slope_points,
    }];
    if let Some(eps) = config.epsilon {
        if let Some(case) = closed_case_for(g0) {
            let d = diffusion_closed(case, eps)?;
            series.push(Series {
                label: "asymptotic D".into(),
                color: svg::color(1),
                points: vec![(1.0, d), (steps as f64, d)],
            });
        }
    }
    write_text(
        &dir.join("moments.svg"),
        &svg::render(&[Panel {
            title: "second moment per step".into(),
            x_label: "t".into(),
            y_label: "mean x^2 / t".into(),
            log_y: false,
            series,
        }]),
    )?;

    Ok(0)
}

fn noiseless(g: f64, steps: u64, spinor: [num_complex::Complex64; 2]) -> Result<RunData, CliError> {
    let coin = CoinOperator::from_phase(g)?;
    let mut state = WalkerState::localized(0, spinor)?;
    let mut mean_x = Vec::with_capacity(steps as usize);
    let mut mean_x2 = Vec::with_capacity(steps as usize);
    for _ in 0..steps {
        state = state.step(&coin);
        let (m1, m2) = state.position_moments();
        mean_x.push(m1);
        mean_x2.push(m2);
    }
    let dist = state.distribution();
    let n = dist.len();
    Ok(RunData {
        positions: dist.positions().to_vec(),
        probabilities: dist.probabilities().to_vec(),
        prob_stderr: vec![0.0; n],
        mean_x,
        mean_x2,
        stderr_x2: vec![0.0; steps as usize],
    })
}
