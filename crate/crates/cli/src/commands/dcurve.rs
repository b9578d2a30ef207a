//! `qwlab dcurve`: D(ε) over a grid of noise widths, by the closed formula,
//! the quadrature route, or Monte Carlo estimation.

use std::fmt::Write as _;

use qwlab_core::ensemble::{ensemble_average, estimate_diffusion, NoiseModel};
use qwlab_core::transfer::{diffusion_closed, diffusion_quadrature};

use super::{closed_case_for, prepare_out_dir, spinor_from, write_text};
use crate::config::{base_defaults, Method, RunConfig};
use crate::svg::{self, Panel, Series};
use crate::{CliError, DcurveArgs};

pub fn run(args: &DcurveArgs) -> Result<u8, CliError> {
    let mut config = args.common.resolve(base_defaults())?;
    let flags = RunConfig {
        method: args.method,
        eps_min: args.eps_min,
        eps_max: args.eps_max,
        eps_points: args.eps_points,
        ..Default::default()
    };
    config = config.overlaid(&flags);
    let dir = prepare_out_dir(&config)?;

    let g0 = config.g0.expect("default");
    let method = config.method.expect("default");
    let lo = config.eps_min.expect("default");
    let hi = config.eps_max.expect("default");
    let n = config.eps_points.expect("default");
    if n < 1 {
        return Err(CliError::Usage("--eps-points must be at least 1".into()));
    }
    if !(lo > 0.0 && hi <= std::f64::consts::PI && lo <= hi) {
        return Err(CliError::Usage(format!(
            "sweep range must satisfy 0 < eps-min <= eps-max <= pi, got [{lo}, {hi}]"
        )));
    }
    let closed_case = closed_case_for(g0);
    if method == Method::Closed && closed_case.is_none() {
        return Err(CliError::Usage(format!(
            "method 'closed' needs g0 = 0 or pi (closed coefficient forms exist only there), got {g0}"
        )));
    }

    let grid: Vec<f64> = if n == 1 {
        vec![lo]
    } else {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    };

    let mut rows: Vec<(f64, f64, Option<f64>)> = Vec::with_capacity(n);
    for (i, &eps) in grid.iter().enumerate() {
        let (d, stderr) = match method {
            Method::Closed => (diffusion_closed(closed_case.unwrap(), eps)?, None),
            Method::Quadrature => (
                diffusion_quadrature(g0, eps, config.k_grid.expect("default"), config.g_nodes.expect("default"))?,
                None,
            ),
            Method::Montecarlo => {
                let seed = config.seed.expect("default").wrapping_add(i as u64);
                let model = NoiseModel::new(g0, eps, config.samples.expect("default"), seed)?;
                let spinor = spinor_from(config.coin.expect("default"))?;
                let stats = ensemble_average(spinor, &model, config.steps.expect("default"))?;
                let est = estimate_diffusion(&stats, 0.5)?;
                (est.d_hat, Some(est.stderr))
            }
        };
        rows.push((eps, d, stderr));
    }

    let mut csv = String::from("epsilon,D,stderr\n");
    for &(eps, d, stderr) in &rows {
        match stderr {
            Some(se) => {
                let _ = writeln!(csv, "{eps:.12e},{d:.12e},{se:.12e}");
            }
            None => {
                let _ = writeln!(csv, "{eps:.12e},{d:.12e},");
            }
        }
    }
    write_text(&dir.join("dcurve.csv"), &csv)?;

    write_text(
        &dir.join("dcurve.svg"),
        &svg::render(&[Panel {
            title: format!("diffusion constant at g0 = {g0:.4} ({method:?})"),
            x_label: "epsilon".into(),
            y_label: "D".into(),
            log_y: false,
            series: vec![Series {
                label: String::new(),
                color: svg::color(0),
                points: rows.iter().map(|&(e, d, _)| (e, d)).collect(),
            }],
        }]),
    )?;

    Ok(0)
}
