//! Cross-validation suite: every analytic structure is checked against an
//! independent route, and the Monte Carlo engine against the analytics.
//!
//! Quick mode runs the structural and dual-route checks in seconds; full mode
//! adds the Monte Carlo triangle and the profile-shape classification.

use serde::Serialize;
use std::f64::consts::PI;

use crate::ensemble::{ensemble_average, estimate_diffusion, NoiseModel};
use crate::error::Result;
use crate::profile::{fit_profile, FitOptions, ProfileClass};
use crate::transfer::{
    closed_coefficients, diffusion_asymptotic, last_term_check, pauli_transfer_numeric,
    spectral_radius_check, BlochVector, ClosedCoefficients, G0Case, GammaForm, TransferModel,
};
use crate::walk::Spinor;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct ValidationConfig {
    pub mode: ValidationMode,
    pub seed: u64,
    pub samples: u64,
    pub steps: u64,
    pub k_points: usize,
    pub g_nodes: usize,
    /// Test hook: added to c22 of every closed coefficient set consumed by
    /// the suite. Any nonzero value must make validation fail.
    pub c22_perturbation: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            mode: ValidationMode::Quick,
            seed: 7,
            samples: 2000,
            steps: 500,
            k_points: 1024,
            g_nodes: 129,
            c22_perturbation: 0.0,
        }
    }
}

/// One named check with its measured value and pass threshold.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub mode: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    fn record(&mut self, name: &str, passed: bool, measured: f64, threshold: f64, detail: String) {
        self.passed &= passed;
        self.checks.push(CheckOutcome {
            name: name.to_string(),
            passed,
            measured,
            threshold,
            detail,
        });
    }
}

fn default_spinor() -> Spinor {
    let a = 1.0 / 2f64.sqrt();
    [C64::new(a, 0.0), C64::new(0.0, a)]
}

pub fn run_validation(config: &ValidationConfig) -> Result<ValidationReport> {
    let mut report = ValidationReport {
        mode: match config.mode {
            ValidationMode::Quick => "quick".into(),
            ValidationMode::Full => "full".into(),
        },
        passed: true,
        checks: Vec::new(),
    };
    let closed = |case: G0Case, eps: f64| -> Result<ClosedCoefficients> {
        let mut c = closed_coefficients(case, eps)?;
        c.c22 += config.c22_perturbation;
        Ok(c)
    };
    let closed_diffusion = |case: G0Case, eps: f64| -> Result<f64> {
        Ok(1.0 - GammaForm::from_coefficients(&closed(case, eps)?)?.integral_over_pi())
    };

    // D(π) anchor: both interval centers give 1 − √3/4
    {
        let expected = 1.0 - 3f64.sqrt() / 4.0;
        let dev = (closed_diffusion(G0Case::Zero, PI)? - expected)
            .abs()
            .max((closed_diffusion(G0Case::Pi, PI)? - expected).abs());
        report.record(
            "anchor-full-width",
            dev < 1e-12,
            dev,
            1e-12,
            format!("max |D(case, pi) - (1 - sqrt(3)/4)| over both cases, expected {expected}"),
        );
    }

    // location of the minimum of the g0 = π curve
    {
        let (eps_min, d_min) = minimize_perturbed(&closed, G0Case::Pi)?;
        let ok = (2.21..=2.25).contains(&eps_min);
        report.record(
            "minimum-location",
            ok,
            eps_min,
            2.25,
            format!("argmin of D(pi, eps) on (0, pi], value {d_min:.6}"),
        );
    }

    // closed vs quadrature diffusion constant on a small ε set
    {
        let mut worst = 0.0f64;
        for &eps in &[0.5, 1.0, 1.8, 2.6, PI] {
            for case in [G0Case::Zero, G0Case::Pi] {
                let dc = closed_diffusion(case, eps)?;
                let model = TransferModel::general(case.g0(), eps, config.g_nodes)?;
                let dq = diffusion_asymptotic(&model, config.k_points)?;
                worst = worst.max((dc - dq).abs());
            }
        }
        report.record(
            "dual-path-agreement",
            worst < 1e-8,
            worst,
            1e-8,
            "max |closed - quadrature| over 5 widths x both centers".into(),
        );
    }

    // assembled closed transfer matrix vs direct quadrature
    {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed);
        let mut worst = 0.0f64;
        for case in [G0Case::Zero, G0Case::Pi] {
            for _ in 0..10 {
                let eps: f64 = rng.gen_range(0.05..PI);
                let k: f64 = rng.gen_range(-PI..PI);
                let kp: f64 = rng.gen_range(-PI..PI);
                let c = closed(case, eps)?;
                let assembled = c.transfer(k, kp);
                let numeric = pauli_transfer_numeric(k, kp, case.g0(), eps, config.g_nodes)?;
                worst = worst.max(assembled.max_deviation(&numeric));
            }
        }
        report.record(
            "coefficient-oracle",
            worst < 1e-10,
            worst,
            1e-10,
            "max elementwise |assembled - quadrature| over 10 random triples per case".into(),
        );
    }

    // structural identities of L_k, G_k, J_k
    {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed ^ 0xb10c);
        let mut worst = 0.0f64;
        for trial in 0..20 {
            let eps: f64 = rng.gen_range(0.05..PI);
            let k: f64 = rng.gen_range(-PI..PI);
            let model = match trial % 3 {
                0 => TransferModel::Closed(closed(G0Case::Zero, eps)?),
                1 => TransferModel::Closed(closed(G0Case::Pi, eps)?),
                _ => TransferModel::general(rng.gen_range(-PI..PI), eps, config.g_nodes)?,
            };
            let l = model.transfer_diagonal(k);
            let g = model.first_derivative(k);
            let j = model.mixed_derivative(k);
            for b in 0..4 {
                let expected = if b == 0 { 1.0 } else { 0.0 };
                worst = worst.max((l.entries[(0, b)] - expected).norm());
                worst = worst.max((l.entries[(b, 0)] - expected).norm());
                worst = worst.max((j.entries[(0, b)] - expected).norm());
                // dagger-as-conjugation antisymmetry of row zero of G
                worst = worst.max((g.entries[(0, b)].conj() + g.entries[(0, b)]).norm());
            }
        }
        report.record(
            "block-structure",
            worst < 1e-10,
            worst,
            1e-10,
            "row/column identities of L_k and J_k, conjugation antisymmetry of G_k".into(),
        );
    }

    // mixed-derivative sum identity
    {
        let model = TransferModel::Closed(closed(G0Case::Pi, 2.23)?);
        let t = 50u64;
        let value = last_term_check(&model, t, &BlochVector::new(0.0, 1.0, 0.0)?, 256)?;
        let dev = (value - t as f64).abs();
        report.record(
            "last-term-identity",
            dev < 1e-8 * t as f64,
            dev,
            1e-8 * t as f64,
            format!("|sum - {t}| at (pi, 2.23)"),
        );
    }

    // spectral condition on the Bloch block
    {
        let mut worst = 0.0f64;
        let mut least = f64::MAX;
        for case in [G0Case::Zero, G0Case::Pi] {
            for &eps in &[0.5, 1.5, 2.23, PI] {
                let scan = spectral_radius_check(&TransferModel::Closed(closed(case, eps)?), 256);
                worst = worst.max(scan.max_modulus);
                least = least.min(scan.min_modulus);
            }
        }
        report.record(
            "spectral-condition",
            worst < 1.0 && least > 0.0,
            worst,
            1.0,
            format!("eigenvalue moduli of M_k in ({least:.3e}, {worst:.6}) over the scan"),
        );
    }

    if config.mode == ValidationMode::Full {
        // Monte Carlo triangle at ε = 2.23 for both centers
        for case in [G0Case::Zero, G0Case::Pi] {
            let eps = 2.23;
            let d_closed = closed_diffusion(case, eps)?;
            let model = NoiseModel::new(case.g0(), eps, config.samples, config.seed)?;
            let stats = ensemble_average(default_spinor(), &model, config.steps)?;
            let est = estimate_diffusion(&stats, 0.5)?;
            let dev = (est.d_hat - d_closed).abs();
            let tol = (2.0 * est.stderr).max(0.05 * d_closed);
            report.record(
                &format!("mc-triangle-g0-{}", case.label()),
                dev < tol,
                dev,
                tol,
                format!(
                    "|D_hat - D_closed| with D_hat = {:.5} +- {:.5}, D_closed = {:.5}",
                    est.d_hat, est.stderr, d_closed
                ),
            );
        }

        // averaged profile shapes at t = 200
        for (case, expected) in
            [(G0Case::Zero, ProfileClass::Gaussian), (G0Case::Pi, ProfileClass::Exponential)]
        {
            let model = NoiseModel::new(case.g0(), 2.23, config.samples, config.seed ^ 0xf1)?;
            let stats = ensemble_average(default_spinor(), &model, 200)?;
            let fit = fit_profile(&stats.mean_distribution, &FitOptions::default())?;
            let passed = fit.classification == expected;
            report.record(
                &format!("profile-shape-g0-{}", case.label()),
                passed,
                fit.exponential_r2 - fit.gaussian_r2,
                0.0,
                format!(
                    "classified {:?} (gaussian r2 {:.4}, exponential r2 {:.4}), expected {expected:?}",
                    fit.classification, fit.gaussian_r2, fit.exponential_r2
                ),
            );
        }
    }

    Ok(report)
}

fn minimize_perturbed(
    closed: &impl Fn(G0Case, f64) -> Result<ClosedCoefficients>,
    case: G0Case,
) -> Result<(f64, f64)> {
    // same scheme as minimize_diffusion_closed, against the (possibly
    // perturbed) coefficient source used by this validation run
    let d = |eps: f64| -> Result<f64> {
        Ok(1.0 - GammaForm::from_coefficients(&closed(case, eps)?)?.integral_over_pi())
    };
    let step = 1e-3;
    let n = (PI / step).floor() as usize;
    let mut best = (step, f64::INFINITY);
    for i in 1..=n {
        let eps = (i as f64 * step).min(PI);
        let v = d(eps)?;
        if v < best.1 {
            best = (eps, v);
        }
    }
    let lo = (best.0 - step).max(step / 2.0);
    let hi = (best.0 + step).min(PI);
    let mut span = (lo, hi);
    for _ in 0..80 {
        let third = (span.1 - span.0) / 3.0;
        let m1 = span.0 + third;
        let m2 = span.1 - third;
        if d(m1)? < d(m2)? {
            span.1 = m2;
        } else {
            span.0 = m1;
        }
    }
    let eps = 0.5 * (span.0 + span.1);
    Ok((eps, d(eps)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_validation_passes() {
        let report = run_validation(&ValidationConfig::default()).unwrap();
        assert!(report.passed, "failed checks: {:?}", report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| (&c.name, c.measured))
            .collect::<Vec<_>>());
        assert!(report.checks.len() >= 7);
    }

    #[test]
    fn perturbed_coefficient_fails_validation() {
        let config = ValidationConfig {
            c22_perturbation: 1e-3,
            ..ValidationConfig::default()
        };
        let report = run_validation(&config).unwrap();
        assert!(!report.passed, "perturbing c22 must break at least one check");
        assert!(report
            .checks
            .iter()
            .any(|c| !c.passed && (c.name == "coefficient-oracle" || c.name == "dual-path-agreement")));
    }
}
