pub mod dcurve;
pub mod profile;
pub mod simulate;
pub mod validate;

use anyhow::Context;
use num_complex::Complex64 as C64;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::CliError;

pub(crate) fn spinor_from(coin: [f64; 4]) -> Result<[C64; 2], CliError> {
    let s = [C64::new(coin[0], coin[1]), C64::new(coin[2], coin[3])];
    if s[0].norm_sqr() + s[1].norm_sqr() <= 0.0 {
        return Err(CliError::Usage("coin state must be nonzero".into()));
    }
    Ok(s)
}

/// Create the output directory and persist the effective config there.
pub(crate) fn prepare_out_dir(config: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("creating output directory {}", dir.display()))
        .map_err(CliError::Runtime)?;
    config.write_pretty(&dir.join("config.json"))?;
    Ok(dir)
}

pub(crate) fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::Runtime)?;
    Ok(())
}

/// Match g0 against the two closed-form interval centers, within float dust.
pub(crate) fn closed_case_for(g0: f64) -> Option<qwlab_core::transfer::G0Case> {
    use qwlab_core::transfer::G0Case;
    let tau = std::f64::consts::TAU;
    let reduced = g0.rem_euclid(tau);
    if reduced.abs() < 1e-9 || (reduced - tau).abs() < 1e-9 {
        Some(G0Case::Zero)
    } else if (reduced - std::f64::consts::PI).abs() < 1e-9 {
        Some(G0Case::Pi)
    } else {
        None
    }
}
