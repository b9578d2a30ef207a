//! The phase-averaged step channel of the noisy walk, written as a 4×4
//! transfer matrix in the Pauli basis, together with everything derived from
//! it: closed coefficient forms at the two special interval centers, the
//! k-derivative matrices entering the variance expansion, exact finite-time
//! ⟨x²⟩_t series, and the asymptotic diffusion constant D(ε) along two
//! independent computational routes.

mod asymptotic;
mod closed;
mod numeric;

pub use asymptotic::{
    derivative_matrices, diffusion_asymptotic, diffusion_quadrature, last_term_check,
    spectral_radius_check, variance_series_exact, SpectralScan, TransferModel,
};
pub use closed::{
    assemble_transfer, closed_coefficients, diffusion_closed, gamma_integrand,
    minimize_diffusion_closed, ClosedCoefficients, G0Case, GammaForm,
};
pub use numeric::{derivative_matrices_numeric, pauli_transfer_numeric, AveragedChannel};

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector4};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::walk::Spinor;

/// σ0 (identity) and the three Pauli matrices in the {↑, ↓} basis.
pub fn pauli(index: usize) -> Matrix2<C64> {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match index {
        0 => Matrix2::new(one, zero, zero, one),
        1 => Matrix2::new(zero, one, one, zero),
        2 => Matrix2::new(zero, -i, i, zero),
        3 => Matrix2::new(one, zero, zero, -one),
        _ => panic!("Pauli index must be 0..=3, got {index}"),
    }
}

/// What a [`PauliTransferMatrix`] value represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtmKind {
    /// The two-momentum transfer matrix L_{k,k'}.
    Full,
    /// The diagonal restriction L_k = L_{k,k}.
    Diagonal,
    /// G_k = ∂L_{k,k'}/∂k at k' = k.
    FirstDerivative,
    /// J_k = ∂²L_{k,k'}/∂k∂k' at k' = k.
    MixedDerivative,
}

/// A 4×4 matrix acting on Pauli components (R_0..R_3) of the coin state at a
/// momentum pair (k, k').
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTransferMatrix {
    pub entries: Matrix4<C64>,
    pub k: f64,
    pub k_prime: f64,
    pub kind: PtmKind,
}

impl PauliTransferMatrix {
    /// Largest elementwise modulus of the difference to `other`.
    pub fn max_deviation(&self, other: &PauliTransferMatrix) -> f64 {
        (self.entries - other.entries)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// The 3×3 lower block acting on the Bloch part (real for the diagonal
    /// restriction and its derivatives).
    pub fn bloch_block(&self) -> Matrix3<f64> {
        let e = &self.entries;
        debug_assert!(
            (1..4)
                .flat_map(|r| (1..4).map(move |c| e[(r, c)].im.abs()))
                .fold(0.0, f64::max)
                < 1e-9
        );
        Matrix3::from_fn(|r, c| e[(r + 1, c + 1)].re)
    }

    /// Entries (0,1), (0,2), (0,3) of row zero.
    pub fn row0_bloch(&self) -> [C64; 3] {
        let e = &self.entries;
        [e[(0, 1)], e[(0, 2)], e[(0, 3)]]
    }
}

/// Bloch components r_α = Tr{σ_α ρ_c} of the initial coin state; r_0 = 1 is
/// implicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    components: [f64; 3],
}

impl BlochVector {
    pub fn new(r1: f64, r2: f64, r3: f64) -> Result<Self> {
        let len_sq = r1 * r1 + r2 * r2 + r3 * r3;
        if !(len_sq.is_finite() && len_sq <= 1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "Bloch vector must satisfy r1²+r2²+r3² <= 1, got {len_sq}"
            )));
        }
        Ok(Self { components: [r1, r2, r3] })
    }

    /// Fully mixed coin state, r = 0.
    pub fn mixed() -> Self {
        Self { components: [0.0; 3] }
    }

    /// Bloch vector of the pure state |χ⟩⟨χ| (χ is normalized first).
    pub fn from_spinor(spinor: &Spinor) -> Result<Self> {
        let norm_sq = spinor[0].norm_sqr() + spinor[1].norm_sqr();
        if !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(Error::InvalidArgument(
                "coin state must be finite and nonzero".into(),
            ));
        }
        let cross = spinor[0].conj() * spinor[1];
        Ok(Self {
            components: [
                2.0 * cross.re / norm_sq,
                2.0 * cross.im / norm_sq,
                (spinor[0].norm_sqr() - spinor[1].norm_sqr()) / norm_sq,
            ],
        })
    }

    pub fn components(&self) -> [f64; 3] {
        self.components
    }

    /// (1, r1, r2, r3) as a complex column for transfer-matrix application.
    pub fn four_vector(&self) -> Vector4<C64> {
        Vector4::new(
            C64::new(1.0, 0.0),
            C64::new(self.components[0], 0.0),
            C64::new(self.components[1], 0.0),
            C64::new(self.components[2], 0.0),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pauli_algebra_traces() {
        for a in 0..4 {
            for b in 0..4 {
                let t = (pauli(a) * pauli(b)).trace();
                let expected = if a == b { 2.0 } else { 0.0 };
                assert_abs_diff_eq!(t.re, expected, epsilon = 1e-15);
                assert_abs_diff_eq!(t.im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn bloch_vector_of_the_default_coin_state() {
        // (1, i)/√2 has r = (0, 1, 0)
        let a = 1.0 / 2f64.sqrt();
        let b = BlochVector::from_spinor(&[C64::new(a, 0.0), C64::new(0.0, a)]).unwrap();
        let r = b.components();
        assert_abs_diff_eq!(r[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn bloch_vector_rejects_superunit_length() {
        assert!(BlochVector::new(1.0, 0.5, 0.0).is_err());
        assert!(BlochVector::new(0.6, 0.0, 0.8).is_ok());
    }
}
