//! Closed coefficient forms of the averaged transfer matrix for interval
//! centers g0 = 0 and g0 = π, and the closed-form diffusion constant built
//! from them.
//!
//! The quadrature route in [`super::numeric`] recomputes everything here by
//! direct integration and serves as the independent oracle for all of it.

use nalgebra::{Matrix3, Matrix4};
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use super::{PauliTransferMatrix, PtmKind};
use crate::error::{ensure_epsilon, Error, Result};

/// Interval centers with closed coefficient forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum G0Case {
    Zero,
    Pi,
}

impl G0Case {
    pub fn g0(&self) -> f64 {
        match self {
            G0Case::Zero => 0.0,
            G0Case::Pi => PI,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            G0Case::Zero => "0",
            G0Case::Pi => "pi",
        }
    }
}

/// The five real coefficients filling the transfer matrix, plus the arctan
/// angle they are built from (a = arctan(3 tan(ε/2)) for g0 = 0,
/// b = arctan(3 cot(ε/2)) for g0 = π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedCoefficients {
    pub case: G0Case,
    pub epsilon: f64,
    pub c12: f64,
    pub c22: f64,
    pub c23: f64,
    pub c24: f64,
    pub c44: f64,
    pub aux_angle: f64,
}

/// Evaluate the coefficient table at half-width ε ∈ (0, π].
///
/// At ε = π the angle a is set to its continuous limit π/2 (the formula
/// arctan(3 tan(ε/2)) crosses the tangent pole there) and b to 0.
pub fn closed_coefficients(case: G0Case, epsilon: f64) -> Result<ClosedCoefficients> {
    let eps = ensure_epsilon(epsilon)?;
    match case {
        G0Case::Zero => {
            let a = if eps == PI { FRAC_PI_2 } else { (3.0 * (eps / 2.0).tan()).atan() };
            Ok(ClosedCoefficients {
                case,
                epsilon: eps,
                c12: SQRT_2 * (a - 1.5 * eps) / (3.0 * eps),
                c22: 0.25 + eps.sin() / eps - a / (6.0 * eps),
                c23: (eps + 4.0 * eps.sin() - 6.0 * a) / (4.0 * eps),
                c24: (2.0 * a - 3.0 * eps) / (3.0 * SQRT_2 * eps),
                c44: 4.0 * a / (3.0 * eps) - 1.0,
                aux_angle: a,
            })
        }
        G0Case::Pi => {
            let b = if eps == PI { 0.0 } else { (3.0 / (eps / 2.0).tan()).atan() };
            Ok(ClosedCoefficients {
                case,
                epsilon: eps,
                c12: (-3.0 * eps - 2.0 * b + PI) / (3.0 * SQRT_2 * eps),
                c22: -(-3.0 * eps + 12.0 * eps.sin() - 2.0 * b + PI) / (12.0 * eps),
                c23: (eps - 4.0 * eps.sin() + 6.0 * b - 3.0 * PI) / (4.0 * eps),
                c24: (-3.0 * eps - 2.0 * b + PI) / (3.0 * SQRT_2 * eps),
                c44: (-3.0 * eps - 4.0 * b + 2.0 * PI) / (3.0 * eps),
                aux_angle: b,
            })
        }
    }
}

/// Fill the transfer matrix from the coefficients, with u = k − k' and
/// v = k + k':
///
/// ```text
/// ⎛  cos u      i·c12·sin u     0       −i·c44·sin u ⎞
/// ⎜    0        c22·cos v    c23·sin v   c24·cos v   ⎟
/// ⎜    0        c22·sin v   −c23·cos v   c24·sin v   ⎟
/// ⎝ −i·sin u   −c24·cos u       0        c44·cos u   ⎠
/// ```
pub fn assemble_transfer(u: f64, v: f64, coeffs: &ClosedCoefficients) -> PauliTransferMatrix {
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let (cu, su) = (u.cos(), u.sin());
    let (cv, sv) = (v.cos(), v.sin());
    let c = coeffs;
    let entries = Matrix4::new(
        re(cu),
        im(c.c12 * su),
        z,
        im(-c.c44 * su),
        z,
        re(c.c22 * cv),
        re(c.c23 * sv),
        re(c.c24 * cv),
        z,
        re(c.c22 * sv),
        re(-c.c23 * cv),
        re(c.c24 * sv),
        im(-su),
        re(-c.c24 * cu),
        z,
        re(c.c44 * cu),
    );
    PauliTransferMatrix {
        entries,
        k: 0.5 * (v + u),
        k_prime: 0.5 * (v - u),
        kind: PtmKind::Full,
    }
}

impl ClosedCoefficients {
    pub fn transfer(&self, k: f64, k_prime: f64) -> PauliTransferMatrix {
        assemble_transfer(k - k_prime, k + k_prime, self)
    }

    /// L_k: the diagonal restriction (u = 0, v = 2k).
    pub fn transfer_diagonal(&self, k: f64) -> PauliTransferMatrix {
        let mut m = assemble_transfer(0.0, 2.0 * k, self);
        m.kind = PtmKind::Diagonal;
        m.k_prime = k;
        m
    }

    /// G_k: ∂L/∂k at k' = k, differentiating the entries with
    /// ∂u/∂k = ∂v/∂k = 1 and evaluating at u = 0, v = 2k.
    pub fn first_derivative(&self, k: f64) -> PauliTransferMatrix {
        let z = C64::new(0.0, 0.0);
        let re = |x: f64| C64::new(x, 0.0);
        let im = |x: f64| C64::new(0.0, x);
        let (cv, sv) = ((2.0 * k).cos(), (2.0 * k).sin());
        let entries = Matrix4::new(
            z,
            im(self.c12),
            z,
            im(-self.c44),
            z,
            re(-self.c22 * sv),
            re(self.c23 * cv),
            re(-self.c24 * sv),
            z,
            re(self.c22 * cv),
            re(self.c23 * sv),
            re(self.c24 * cv),
            im(-1.0),
            z,
            z,
            z,
        );
        PauliTransferMatrix { entries, k, k_prime: k, kind: PtmKind::FirstDerivative }
    }

    /// J_k: ∂²L/∂k∂k' at k' = k (u-dependent entries pick up −f″(0),
    /// v-dependent entries +f″(2k)).
    pub fn mixed_derivative(&self, k: f64) -> PauliTransferMatrix {
        let z = C64::new(0.0, 0.0);
        let re = |x: f64| C64::new(x, 0.0);
        let (cv, sv) = ((2.0 * k).cos(), (2.0 * k).sin());
        let entries = Matrix4::new(
            re(1.0),
            z,
            z,
            z,
            z,
            re(-self.c22 * cv),
            re(-self.c23 * sv),
            re(-self.c24 * cv),
            z,
            re(-self.c22 * sv),
            re(self.c23 * cv),
            re(-self.c24 * sv),
            z,
            re(-self.c24),
            z,
            re(self.c44),
        );
        PauliTransferMatrix { entries, k, k_prime: k, kind: PtmKind::MixedDerivative }
    }

    /// M_k: the 3×3 Bloch block of L_k.
    pub fn bloch_map(&self, k: f64) -> Matrix3<f64> {
        let (cv, sv) = ((2.0 * k).cos(), (2.0 * k).sin());
        Matrix3::new(
            self.c22 * cv,
            self.c23 * sv,
            self.c24 * cv,
            self.c22 * sv,
            -self.c23 * cv,
            self.c24 * sv,
            -self.c24,
            0.0,
            self.c44,
        )
    }
}

/// Coefficients of the rational diffusion integrand
/// Γ(k, ε) = (α cos 2k + β)/(γ cos 2k + δ), and r = √(1 − γ²/δ²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaForm {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub r: f64,
}

impl GammaForm {
    pub fn from_coefficients(c: &ClosedCoefficients) -> Result<GammaForm> {
        let alpha = c.c12 * c.c24 + c.c44 * (c.c22 - c.c23);
        let beta = c.c12 * c.c23 * c.c24 + c.c44 * (c.c22 * c.c23 - 1.0);
        let gamma = c.c22 * (c.c44 - 1.0) - c.c23 * c.c44 + c.c23 + c.c24 * c.c24;
        let delta = c.c22 * c.c23 * (c.c44 - 1.0) + c.c23 * c.c24 * c.c24 - c.c44 + 1.0;
        // NaN must land in the error branch too
        match gamma.abs().partial_cmp(&delta.abs()) {
            Some(std::cmp::Ordering::Less) => {}
            _ => return Err(Error::DegenerateGammaForm { gamma, delta }),
        }
        let r = (1.0 - (gamma / delta).powi(2)).sqrt();
        Ok(GammaForm { alpha, beta, gamma, delta, r })
    }

    /// ∫_{−π}^{π} Γ(k, ε) dk/π by the standard-integral reduction.
    ///
    /// The α term is evaluated through the identity
    /// (r − 1)/γ = −γ/(δ²(1 + r)), which stays finite as γ → 0.
    pub fn integral_over_pi(&self) -> f64 {
        -2.0 * self.alpha * self.gamma / (self.delta * self.delta * (1.0 + self.r) * self.r)
            + 2.0 * self.beta / (self.delta * self.r)
    }
}

/// Γ(k, ε) evaluated pointwise from the coefficients.
pub fn gamma_integrand(k: f64, coeffs: &ClosedCoefficients) -> Result<f64> {
    let form = GammaForm::from_coefficients(coeffs)?;
    let c2k = (2.0 * k).cos();
    Ok((form.alpha * c2k + form.beta) / (form.gamma * c2k + form.delta))
}

/// Closed-form asymptotic diffusion constant
/// D(ε) = 1 − 2α(r−1)/(γr) − 2β/(δr).
pub fn diffusion_closed(case: G0Case, epsilon: f64) -> Result<f64> {
    let coeffs = closed_coefficients(case, epsilon)?;
    let form = GammaForm::from_coefficients(&coeffs)?;
    Ok(1.0 - form.integral_over_pi())
}

/// Minimize D(ε) over ε ∈ (0, π]: a 10⁻³ grid scan bracketing the minimum,
/// refined by golden-section search. Returns (argmin, minimum value).
pub fn minimize_diffusion_closed(case: G0Case) -> Result<(f64, f64)> {
    let step = 1e-3;
    let n = (PI / step).floor() as usize;
    let mut best = (step, f64::INFINITY);
    let mut best_idx = 0usize;
    let grid: Vec<f64> = (1..=n).map(|i| (i as f64 * step).min(PI)).collect();
    for (i, &eps) in grid.iter().enumerate() {
        let d = diffusion_closed(case, eps)?;
        if d < best.1 {
            best = (eps, d);
            best_idx = i;
        }
    }
    let lo = if best_idx == 0 { grid[0] * 0.5 } else { grid[best_idx - 1] };
    let hi = if best_idx + 1 < grid.len() { grid[best_idx + 1] } else { PI };
    golden_section_min(|e| diffusion_closed(case, e).unwrap_or(f64::INFINITY), lo, hi)
        .map(|(x, d)| (x, d.min(best.1)))
}

fn golden_section_min(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo < 1e-12 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    Ok((x, f(x)))
}
