//! `qwlab validate`: run the cross-check suite, print one line per check,
//! write report.json, and exit 0 only if everything passed.

use qwlab_core::validate::{run_validation, ValidationConfig, ValidationMode};

use super::{prepare_out_dir, write_text};
use crate::config::base_defaults;
use crate::{CliError, ValidateArgs, ValidateMode};

pub fn run(args: &ValidateArgs) -> Result<u8, CliError> {
    let config = args.common.resolve(base_defaults())?;
    let dir = prepare_out_dir(&config)?;

    let validation = ValidationConfig {
        mode: match args.mode {
            ValidateMode::Quick => ValidationMode::Quick,
            ValidateMode::Full => ValidationMode::Full,
        },
        seed: config.seed.expect("default"),
        samples: config.samples.expect("default"),
        steps: config.steps.expect("default"),
        k_points: config.k_grid.expect("default"),
        g_nodes: config.g_nodes.expect("default"),
        c22_perturbation: 0.0,
    };
    let report = run_validation(&validation)?;

    for check in &report.checks {
        println!(
            "[{}] {}: measured {:.3e} vs threshold {:.3e} — {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.measured,
            check.threshold,
            check.detail
        );
    }
    println!(
        "validation ({}): {}",
        report.mode,
        if report.passed { "all checks passed" } else { "FAILED" }
    );

    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Runtime(e.into()))?;
    write_text(&dir.join("report.json"), &(json + "\n"))?;

    Ok(if report.passed { 0 } else { 1 })
}
