//! Coin operators and the single-step unitary in quasi-momentum space.

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

use crate::error::{ensure_finite, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// A 2×2 unitary acting on the spin doublet, optionally tagged with the phase
/// it was built from.
///
/// The one-parameter family reads, with γ = e^{ig},
///
/// ```text
///              1     ⎛    γ        √2(γ−1) ⎞
/// C(g) = ──────────  ⎜                     ⎟
///          2γ − 1    ⎝ √2(γ−1)γ       γ    ⎠
/// ```
///
/// and is exactly unitary for every real g because |2γ−1|² = 5 − 4cos g
/// equals 1 + 2|γ−1|².
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOperator {
    entries: Matrix2<C64>,
    phase: Option<f64>,
}

impl CoinOperator {
    /// Build the phase-family coin at phase `g` (radians).
    ///
    /// `g` enters only through e^{ig} and is reduced modulo 2π first.
    pub fn from_phase(g: f64) -> Result<Self> {
        ensure_finite("coin phase g", g)?;
        let g = g.rem_euclid(TAU);
        let gamma = C64::from_polar(1.0, g);
        let one = C64::new(1.0, 0.0);
        let pref = one / (2.0 * gamma - one);
        let off = SQRT2 * (gamma - one);
        let entries = Matrix2::new(gamma * pref, off * pref, off * gamma * pref, gamma * pref);
        Ok(Self { entries, phase: Some(g) })
    }

    /// The Hadamard coin (1 1; 1 -1)/√2.
    pub fn hadamard() -> Self {
        let h = C64::new(1.0 / SQRT2, 0.0);
        Self {
            entries: Matrix2::new(h, h, h, -h),
            phase: None,
        }
    }

    pub fn from_matrix(entries: Matrix2<C64>) -> Self {
        Self { entries, phase: None }
    }

    pub fn entries(&self) -> &Matrix2<C64> {
        &self.entries
    }

    /// Phase the coin was built from, if any.
    pub fn phase(&self) -> Option<f64> {
        self.phase
    }

    /// Max elementwise deviation of C†C from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let m = self.entries.adjoint() * self.entries;
        let id = Matrix2::identity();
        (m - id).iter().map(|z: &C64| z.norm()).fold(0.0, f64::max)
    }

    #[inline]
    pub fn apply(&self, spinor: [C64; 2]) -> [C64; 2] {
        let e = &self.entries;
        [
            e[(0, 0)] * spinor[0] + e[(0, 1)] * spinor[1],
            e[(1, 0)] * spinor[0] + e[(1, 1)] * spinor[1],
        ]
    }
}

/// Single-step unitary in quasi-momentum space: diag(e^{−ik}, e^{ik}) · C(g).
pub fn momentum_step(k: f64, g: f64) -> Result<Matrix2<C64>> {
    ensure_finite("quasi-momentum k", k)?;
    let coin = CoinOperator::from_phase(g)?;
    let up = C64::from_polar(1.0, -k);
    let dn = C64::from_polar(1.0, k);
    let c = coin.entries;
    Ok(Matrix2::new(
        up * c[(0, 0)],
        up * c[(0, 1)],
        dn * c[(1, 0)],
        dn * c[(1, 1)],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn max_dev(a: &Matrix2<C64>, b: &Matrix2<C64>) -> f64 {
        (a - b).iter().map(|z: &C64| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_phase_gives_identity() {
        let c = CoinOperator::from_phase(0.0).unwrap();
        assert!(max_dev(c.entries(), &Matrix2::identity()) < 1e-15);
    }

    #[test]
    fn pi_phase_matches_hand_substitution() {
        // γ = −1: prefactor −1/3, off-diagonal √2·(−2)
        let c = CoinOperator::from_phase(PI).unwrap();
        let third = 1.0 / 3.0;
        let off = 2.0 * std::f64::consts::SQRT_2 / 3.0;
        let expected = Matrix2::new(
            C64::new(third, 0.0),
            C64::new(off, 0.0),
            C64::new(-off, 0.0),
            C64::new(third, 0.0),
        );
        assert!(max_dev(c.entries(), &expected) < 1e-15);
    }

    #[test]
    fn unitary_across_random_phases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let g: f64 = rng.gen_range(-20.0..20.0);
            let c = CoinOperator::from_phase(g).unwrap();
            assert!(c.unitarity_deviation() < 1e-12, "g = {g}");
        }
        assert!(CoinOperator::from_phase(PI / 2.0).unwrap().unitarity_deviation() < 1e-12);
    }

    #[test]
    fn phase_reduced_modulo_two_pi() {
        let a = CoinOperator::from_phase(1.3).unwrap();
        let b = CoinOperator::from_phase(1.3 + TAU).unwrap();
        assert!(max_dev(a.entries(), b.entries()) < 1e-14);
    }

    #[test]
    fn rejects_non_finite_phase() {
        assert!(CoinOperator::from_phase(f64::NAN).is_err());
        assert!(momentum_step(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn momentum_step_at_k_zero_is_the_coin() {
        let g = 2.2;
        let u = momentum_step(0.0, g).unwrap();
        let c = CoinOperator::from_phase(g).unwrap();
        assert!(max_dev(&u, c.entries()) < 1e-15);
    }

    #[test]
    fn momentum_step_with_identity_coin_is_diagonal() {
        let k = PI / 3.0;
        let u = momentum_step(k, 0.0).unwrap();
        let expected = Matrix2::new(
            C64::from_polar(1.0, -k),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, k),
        );
        assert!(max_dev(&u, &expected) < 1e-15);
    }

    #[test]
    fn momentum_step_matches_two_factor_product() {
        let (k, g) = (1.1, 2.2);
        let u = momentum_step(k, g).unwrap();
        let diag = Matrix2::new(
            C64::from_polar(1.0, -k),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, k),
        );
        let product = diag * CoinOperator::from_phase(g).unwrap().entries;
        assert!(max_dev(&u, &product) < 1e-14);
    }

    #[test]
    fn momentum_step_unitary_for_random_pairs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let k: f64 = rng.gen_range(-PI..PI);
            let g: f64 = rng.gen_range(-10.0..10.0);
            let u = momentum_step(k, g).unwrap();
            let dev = max_dev(&(u.adjoint() * u), &Matrix2::identity());
            assert!(dev < 1e-12, "k = {k}, g = {g}, dev = {dev}");
        }
    }

    #[test]
    fn hadamard_is_unitary() {
        assert!(CoinOperator::hadamard().unitarity_deviation() < 1e-15);
        assert_abs_diff_eq!(
            CoinOperator::hadamard().entries()[(1, 1)].re,
            -1.0 / std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
    }
}
