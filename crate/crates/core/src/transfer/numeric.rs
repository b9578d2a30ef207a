//! Quadrature route to the averaged transfer matrix, valid for any interval
//! center g0.
//!
//! [`pauli_transfer_numeric`] integrates the Pauli sandwich trace directly
//! per momentum pair and is the module's reference oracle. For repeated
//! evaluation, [`AveragedChannel`] integrates only the coin part once: since
//! U(k, g) = D(k) C(g) with D diagonal, L_{k,k'} factors into a shift
//! conjugation matrix (exact trig in u = k − k', v = k + k') applied to the
//! g-averaged coin transfer matrix.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;

use super::{PauliTransferMatrix, PtmKind};
use crate::error::{ensure_epsilon, ensure_finite, Error, Result};
use crate::quadrature::GaussLegendre;
use crate::walk::{momentum_step, CoinOperator};

/// [X]_{αβ} = ½ Tr{σ_α U1 σ_β U2†}; the ½ is the Pauli-basis normalization
/// (Tr{σ_α σ_β} = 2δ_{αβ}) that makes the identity channel map to the
/// identity matrix.
fn ptm_sandwich(u1: &Matrix2<C64>, u2: &Matrix2<C64>) -> Matrix4<C64> {
    let u2d = u2.adjoint();
    let mut out = Matrix4::zeros();
    for beta in 0..4 {
        let m = u1 * super::pauli(beta) * u2d;
        let i = C64::new(0.0, 1.0);
        out[(0, beta)] = 0.5 * (m[(0, 0)] + m[(1, 1)]);
        out[(1, beta)] = 0.5 * (m[(0, 1)] + m[(1, 0)]);
        out[(2, beta)] = 0.5 * i * (m[(0, 1)] - m[(1, 0)]);
        out[(3, beta)] = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    }
    out
}

/// Gauss–Legendre average of the sandwich trace over g ∈ [g0 − ε, g0 + ε]:
/// [L_{k,k'}]_{αβ} = (1/2ε) ∫ dg ½ Tr{σ_α U(k,g) σ_β U†(k',g)}.
pub fn pauli_transfer_numeric(
    k: f64,
    k_prime: f64,
    g0: f64,
    epsilon: f64,
    quadrature_nodes: usize,
) -> Result<PauliTransferMatrix> {
    ensure_finite("quasi-momentum k", k)?;
    ensure_finite("quasi-momentum k'", k_prime)?;
    ensure_finite("interval center g0", g0)?;
    let eps = ensure_epsilon(epsilon)?;
    if quadrature_nodes < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 quadrature nodes, got {quadrature_nodes}"
        )));
    }
    let rule = GaussLegendre::new(quadrature_nodes);
    let mut acc: Matrix4<C64> = Matrix4::zeros();
    for (g, w) in rule.mapped(g0 - eps, g0 + eps) {
        let u1 = momentum_step(k, g)?;
        let u2 = momentum_step(k_prime, g)?;
        acc += ptm_sandwich(&u1, &u2).map(|z| z * w);
    }
    Ok(PauliTransferMatrix {
        entries: acc.map(|z| z / (2.0 * eps)),
        k,
        k_prime,
        kind: if k == k_prime { PtmKind::Diagonal } else { PtmKind::Full },
    })
}

/// The g-averaged channel with the coin quadrature hoisted out of the
/// momentum dependence. Valid for any g0; never touches the closed
/// coefficient tables.
#[derive(Debug, Clone)]
pub struct AveragedChannel {
    g0: f64,
    epsilon: f64,
    g_nodes: usize,
    /// (1/2ε) ∫ dg ½ Tr{σ_α C(g) σ_β C†(g)}; real because the sandwich of a
    /// Hermitian basis under conjugation has real coefficients.
    coin_average: Matrix4<C64>,
}

impl AveragedChannel {
    pub fn new(g0: f64, epsilon: f64, g_nodes: usize) -> Result<Self> {
        ensure_finite("interval center g0", g0)?;
        let eps = ensure_epsilon(epsilon)?;
        if g_nodes < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 quadrature nodes, got {g_nodes}"
            )));
        }
        let rule = GaussLegendre::new(g_nodes);
        let mut acc: Matrix4<C64> = Matrix4::zeros();
        for (g, w) in rule.mapped(g0 - eps, g0 + eps) {
            let c = CoinOperator::from_phase(g)?;
            acc += ptm_sandwich(c.entries(), c.entries()).map(|z| z * w);
        }
        let coin_average = acc.map(|z| C64::new(z.re / (2.0 * eps), 0.0));
        Ok(Self { g0, epsilon: eps, g_nodes, coin_average })
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn g_nodes(&self) -> usize {
        self.g_nodes
    }

    pub fn transfer(&self, k: f64, k_prime: f64) -> PauliTransferMatrix {
        let u = k - k_prime;
        let v = k + k_prime;
        PauliTransferMatrix {
            entries: shift_conjugation(u, v) * self.coin_average,
            k,
            k_prime,
            kind: if k == k_prime { PtmKind::Diagonal } else { PtmKind::Full },
        }
    }

    pub fn transfer_diagonal(&self, k: f64) -> PauliTransferMatrix {
        self.transfer(k, k)
    }

    /// G_k, exactly: only the shift factor depends on the momenta, so
    /// ∂L/∂k = (∂_u D̃ + ∂_v D̃) T̄ at u = 0, v = 2k.
    pub fn first_derivative(&self, k: f64) -> PauliTransferMatrix {
        let d = shift_partial_u() + shift_partial_v(2.0 * k);
        PauliTransferMatrix {
            entries: d * self.coin_average,
            k,
            k_prime: k,
            kind: PtmKind::FirstDerivative,
        }
    }

    /// J_k, exactly: ∂²/∂k∂k' = ∂_v² − ∂_u² on the shift factor.
    pub fn mixed_derivative(&self, k: f64) -> PauliTransferMatrix {
        let d = shift_second_v(2.0 * k) - shift_second_u();
        PauliTransferMatrix {
            entries: d * self.coin_average,
            k,
            k_prime: k,
            kind: PtmKind::MixedDerivative,
        }
    }
}

/// Transfer matrix of the bare shift conjugation,
/// [D̃]_{αβ} = ½ Tr{σ_α D(k) σ_β D†(k')}: a rotation by v in the (1,2) Bloch
/// plane and a u-mixing of the (0,3) components.
fn shift_conjugation(u: f64, v: f64) -> Matrix4<C64> {
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    let (cu, su) = (u.cos(), u.sin());
    let (cv, sv) = (v.cos(), v.sin());
    Matrix4::new(
        re(cu), z, z, im(-su),
        z, re(cv), re(-sv), z,
        z, re(sv), re(cv), z,
        im(-su), z, z, re(cu),
    )
}

fn shift_partial_u() -> Matrix4<C64> {
    // ∂_u of the u-entries at u = 0
    let z = C64::new(0.0, 0.0);
    let im = |x: f64| C64::new(0.0, x);
    Matrix4::new(
        z, z, z, im(-1.0),
        z, z, z, z,
        z, z, z, z,
        im(-1.0), z, z, z,
    )
}

fn shift_partial_v(v: f64) -> Matrix4<C64> {
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    let (cv, sv) = (v.cos(), v.sin());
    Matrix4::new(
        z, z, z, z,
        z, re(-sv), re(-cv), z,
        z, re(cv), re(-sv), z,
        z, z, z, z,
    )
}

fn shift_second_u() -> Matrix4<C64> {
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    Matrix4::new(
        re(-1.0), z, z, z,
        z, z, z, z,
        z, z, z, z,
        z, z, z, re(-1.0),
    )
}

fn shift_second_v(v: f64) -> Matrix4<C64> {
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    let (cv, sv) = (v.cos(), v.sin());
    Matrix4::new(
        z, z, z, z,
        z, re(-cv), re(sv), z,
        z, re(-sv), re(-cv), z,
        z, z, z, z,
    )
}

/// (L_k, G_k, J_k) for arbitrary g0 by central finite differences on
/// [`pauli_transfer_numeric`], Richardson-extrapolated against the half step
/// (which doubles as the convergence check). The first derivative uses
/// h = 1e−5; the mixed second difference divides by h², so it needs the
/// larger h = 1e−3 to keep quadrature roundoff below ~1e−8 per entry.
pub fn derivative_matrices_numeric(
    k: f64,
    g0: f64,
    epsilon: f64,
    g_nodes: usize,
) -> Result<(PauliTransferMatrix, PauliTransferMatrix, PauliTransferMatrix)> {
    const H_FIRST: f64 = 1e-5;
    const H_MIXED: f64 = 1e-3;
    let l = pauli_transfer_numeric(k, k, g0, epsilon, g_nodes)?;

    let first = |h: f64| -> Result<Matrix4<C64>> {
        let plus = pauli_transfer_numeric(k + h, k, g0, epsilon, g_nodes)?;
        let minus = pauli_transfer_numeric(k - h, k, g0, epsilon, g_nodes)?;
        Ok((plus.entries - minus.entries).map(|z| z / (2.0 * h)))
    };
    let g_h = first(H_FIRST)?;
    let g_h2 = first(H_FIRST / 2.0)?;
    let g = g_h2.map(|z| z * (4.0 / 3.0)) - g_h.map(|z| z / 3.0);

    let mixed = |h: f64| -> Result<Matrix4<C64>> {
        let pp = pauli_transfer_numeric(k + h, k + h, g0, epsilon, g_nodes)?;
        let pm = pauli_transfer_numeric(k + h, k - h, g0, epsilon, g_nodes)?;
        let mp = pauli_transfer_numeric(k - h, k + h, g0, epsilon, g_nodes)?;
        let mm = pauli_transfer_numeric(k - h, k - h, g0, epsilon, g_nodes)?;
        Ok((pp.entries - pm.entries - mp.entries + mm.entries).map(|z| z / (4.0 * h * h)))
    };
    let j_h = mixed(H_MIXED)?;
    let j_h2 = mixed(H_MIXED / 2.0)?;
    let j = j_h2.map(|z| z * (4.0 / 3.0)) - j_h.map(|z| z / 3.0);

    Ok((
        l,
        PauliTransferMatrix { entries: g, k, k_prime: k, kind: PtmKind::FirstDerivative },
        PauliTransferMatrix { entries: j, k, k_prime: k, kind: PtmKind::MixedDerivative },
    ))
}
