//! The walker's amplitude field over lattice sites.

use num_complex::Complex64 as C64;

use super::coin::CoinOperator;
use super::distribution::PositionDistribution;
use crate::error::{Error, Result};

/// Two complex spin components (↑, ↓) at one site.
pub type Spinor = [C64; 2];

/// Amplitudes over a contiguous block of lattice sites at a fixed time.
///
/// Site `i` of `amps` sits at lattice position `origin + i`. The block always
/// covers the full light cone of the initial site, so every amplitude outside
/// it is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerState {
    origin: i64,
    amps: Vec<Spinor>,
    time: u64,
}

impl WalkerState {
    /// State localized at `site` with the given (normalized) coin state.
    pub fn localized(site: i64, spinor: Spinor) -> Result<Self> {
        let norm_sq = spinor[0].norm_sqr() + spinor[1].norm_sqr();
        if !norm_sq.is_finite() || norm_sq <= 0.0 {
            return Err(Error::InvalidArgument(
                "initial coin state must be finite and nonzero".into(),
            ));
        }
        let scale = norm_sq.sqrt().recip();
        Ok(Self {
            origin: site,
            amps: vec![[spinor[0] * scale, spinor[1] * scale]],
            time: 0,
        })
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// Lattice position of the first stored site.
    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn amplitudes(&self) -> &[Spinor] {
        &self.amps
    }

    pub fn amplitude_at(&self, x: i64) -> Spinor {
        let idx = x - self.origin;
        if idx < 0 || idx as usize >= self.amps.len() {
            [C64::default(), C64::default()]
        } else {
            self.amps[idx as usize]
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .sum()
    }

    /// One coin-then-shift step. Norm is preserved to machine precision and
    /// `time` advances by one.
    pub fn step(&self, coin: &CoinOperator) -> WalkerState {
        let mut out = vec![[C64::default(); 2]; self.amps.len() + 2];
        step_kernel(&self.amps, coin, &mut out);
        WalkerState {
            origin: self.origin - 1,
            amps: out,
            time: self.time + 1,
        }
    }

    /// Apply one phase-family coin per entry of `phases`, in order.
    pub fn evolve(&self, phases: &[f64]) -> Result<WalkerState> {
        let mut cur = self.amps.clone();
        let mut next: Vec<Spinor> = Vec::new();
        for &g in phases {
            let coin = CoinOperator::from_phase(g)?;
            next.clear();
            next.resize(cur.len() + 2, [C64::default(); 2]);
            step_kernel(&cur, &coin, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(WalkerState {
            origin: self.origin - phases.len() as i64,
            amps: cur,
            time: self.time + phases.len() as u64,
        })
    }

    /// P(x) = |↑|² + |↓|² at every stored site.
    pub fn distribution(&self) -> PositionDistribution {
        let positions = (0..self.amps.len()).map(|i| self.origin + i as i64).collect();
        let probabilities = self
            .amps
            .iter()
            .map(|a| a[0].norm_sqr() + a[1].norm_sqr())
            .collect();
        PositionDistribution::new_unchecked(positions, probabilities)
    }

    /// Mean and second moment of the position distribution, without
    /// materializing it.
    pub fn position_moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a[0].norm_sqr() + a[1].norm_sqr();
            let x = (self.origin + i as i64) as f64;
            m1 += x * p;
            m2 += x * x * p;
        }
        (m1, m2)
    }
}

/// Coin every site of `input`, then shift ↑ right and ↓ left into `out`,
/// which must be zeroed and two sites wider (one on each side).
#[inline]
pub(crate) fn step_kernel(input: &[Spinor], coin: &CoinOperator, out: &mut [Spinor]) {
    debug_assert_eq!(out.len(), input.len() + 2);
    let e = coin.entries();
    let (c00, c01, c10, c11) = (e[(0, 0)], e[(0, 1)], e[(1, 0)], e[(1, 1)]);
    for (i, a) in input.iter().enumerate() {
        let up = c00 * a[0] + c01 * a[1];
        let dn = c10 * a[0] + c11 * a[1];
        // input site i is out site i+1; ↑ lands one further right, ↓ one left
        out[i + 2][0] = up;
        out[i][1] = dn;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    fn imag() -> C64 {
        C64::new(0.0, 1.0)
    }

    #[test]
    fn identity_coin_moves_up_right() {
        let s = WalkerState::localized(0, [one(), C64::default()]).unwrap();
        let s = s.step(&CoinOperator::from_phase(0.0).unwrap());
        assert_eq!(s.time(), 1);
        let a = s.amplitude_at(1);
        assert_abs_diff_eq!(a[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.distribution().probability_at(1), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_coin_moves_down_left() {
        let s = WalkerState::localized(0, [C64::default(), one()]).unwrap();
        let s = s.step(&CoinOperator::from_phase(0.0).unwrap());
        let a = s.amplitude_at(-1);
        assert_abs_diff_eq!(a[1].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn localized_state_normalizes_input() {
        let s = WalkerState::localized(3, [C64::new(2.0, 0.0), C64::new(0.0, 2.0)]).unwrap();
        assert_abs_diff_eq!(s.norm_sq(), 1.0, epsilon = 1e-15);
        assert!(WalkerState::localized(0, [C64::default(), C64::default()]).is_err());
    }

    #[test]
    fn empty_sequence_leaves_state_unchanged() {
        let s = WalkerState::localized(0, [one(), imag()]).unwrap();
        let e = s.evolve(&[]).unwrap();
        assert_eq!(s, e);
    }

    #[test]
    fn constant_sequence_matches_repeated_fixed_coin() {
        let s = WalkerState::localized(0, [one(), imag()]).unwrap();
        let g = PI / 2.0;
        let coin = CoinOperator::from_phase(g).unwrap();
        let mut by_step = s.clone();
        for _ in 0..40 {
            by_step = by_step.step(&coin);
        }
        let by_seq = s.evolve(&vec![g; 40]).unwrap();
        assert_eq!(by_step.origin(), by_seq.origin());
        for (a, b) in by_step.amplitudes().iter().zip(by_seq.amplitudes()) {
            assert!((a[0] - b[0]).norm() < 1e-12 && (a[1] - b[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn step_order_matters_for_asymmetric_start() {
        // the per-step unitaries do not commute
        let s = WalkerState::localized(0, [one(), C64::default()]).unwrap();
        let ab = s.evolve(&[PI, 0.0]).unwrap();
        let ba = s.evolve(&[0.0, PI]).unwrap();
        let diff: f64 = ab
            .amplitudes()
            .iter()
            .zip(ba.amplitudes())
            .map(|(a, b)| (a[0] - b[0]).norm() + (a[1] - b[1]).norm())
            .sum();
        assert!(diff > 1e-3, "orders should differ, total deviation {diff}");
    }

    #[test]
    fn norm_preserved_per_step() {
        let s = WalkerState::localized(0, [one(), imag()]).unwrap();
        let mut cur = s;
        for t in 0..100 {
            cur = cur.step(&CoinOperator::from_phase(1.1 + 0.01 * t as f64).unwrap());
            assert!((cur.norm_sq() - 1.0).abs() < 1e-12 * (t + 1) as f64);
        }
    }

    #[test]
    fn parity_sites_are_exactly_zero() {
        let s = WalkerState::localized(0, [one(), imag()]).unwrap();
        let evolved = s.evolve(&[2.0, 0.5, 1.0, 2.5, 0.1]).unwrap();
        let dist = evolved.distribution();
        for (&x, &p) in dist.positions().iter().zip(dist.probabilities()) {
            if (x + 5).rem_euclid(2) == 1 {
                assert_eq!(p, 0.0, "site {x} should be exactly empty at t=5");
            }
        }
    }

    #[test]
    fn ballistic_two_peak_shape_at_pi_half() {
        // 200 steps at g = π/2 from (1, i)/√2: even sites only, and a
        // (generally asymmetric) peak on each side, ballistically far from
        // the origin and well above the central probability
        let amp = 1.0 / 2f64.sqrt();
        let s = WalkerState::localized(0, [C64::new(amp, 0.0), C64::new(0.0, amp)]).unwrap();
        let evolved = s.evolve(&vec![PI / 2.0; 200]).unwrap();
        let dist = evolved.distribution();
        assert_abs_diff_eq!(dist.total(), 1.0, epsilon = 1e-10);
        let (mut right_x, mut right_p) = (0i64, 0.0f64);
        let (mut left_x, mut left_p) = (0i64, 0.0f64);
        for (&x, &p) in dist.positions().iter().zip(dist.probabilities()) {
            if x.rem_euclid(2) == 1 {
                assert_eq!(p, 0.0);
            }
            if x > 0 && p > right_p {
                right_p = p;
                right_x = x;
            }
            if x < 0 && p > left_p {
                left_p = p;
                left_x = x;
            }
        }
        let central = dist.probability_at(0);
        assert!(right_x > 50, "right peak at {right_x}");
        assert!(left_x < -50, "left peak at {left_x}");
        assert!(right_p > 2.0 * central && left_p > 2.0 * central);
    }
}
