//! Monte Carlo engine: independent trajectories with a fresh coin phase per
//! step, averaged with deterministic, schedule-independent seeding.
//!
//! Every trajectory owns a ChaCha stream selected by its index, so the full
//! ensemble is a pure function of (initial state, noise model, steps) no
//! matter how many worker threads execute it. Reduction walks the results in
//! index order, which keeps the floating-point sums bit-identical as well.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ensure_finite, Error, Result};
use crate::stats::linear_fit;
use crate::walk::{step_kernel, CoinOperator, PositionDistribution, Spinor};

/// Uniform phase noise: g ~ U[g0 − ε, g0 + ε], redrawn every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    g0: f64,
    epsilon: f64,
    n_samples: u64,
    master_seed: u64,
}

impl NoiseModel {
    /// ε must lie in (0, π]: at ε = 0 the walk is noiseless and ballistic, so
    /// no diffusion constant exists and the closed coefficient forms are 0/0.
    pub fn new(g0: f64, epsilon: f64, n_samples: u64, master_seed: u64) -> Result<Self> {
        ensure_finite("noise center g0", g0)?;
        crate::error::ensure_epsilon(epsilon)?;
        if n_samples == 0 {
            return Err(Error::InvalidArgument("n_samples must be positive".into()));
        }
        Ok(Self { g0, epsilon, n_samples, master_seed })
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }
}

/// Draw one coin phase: g0 + ε(2u − 1) with u uniform on [0, 1).
pub fn sample_phase<R: Rng + ?Sized>(rng: &mut R, model: &NoiseModel) -> f64 {
    let u: f64 = rng.gen();
    model.g0 + model.epsilon * (2.0 * u - 1.0)
}

/// The RNG stream for one trajectory. Streams are independent by
/// construction, so results do not depend on execution order or worker count.
pub fn trajectory_rng(master_seed: u64, trajectory_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trajectory_index);
    rng
}

/// Per-time-step observables of a single noisy trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryOutcome {
    /// ⟨x⟩ at t = 1..steps.
    pub mean_x: Vec<f64>,
    /// ⟨x²⟩ at t = 1..steps.
    pub second_moment: Vec<f64>,
    /// Probability profile at the final time.
    pub final_distribution: PositionDistribution,
}

/// Evolve one walker for `steps` steps with a fresh phase each step.
pub fn run_trajectory(
    initial_spinor: Spinor,
    model: &NoiseModel,
    steps: u64,
    trajectory_index: u64,
) -> Result<TrajectoryOutcome> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let norm_sq = initial_spinor[0].norm_sqr() + initial_spinor[1].norm_sqr();
    if !norm_sq.is_finite() || norm_sq <= 0.0 {
        return Err(Error::InvalidArgument("initial coin state must be finite and nonzero".into()));
    }
    let scale = norm_sq.sqrt().recip();

    let mut rng = trajectory_rng(model.master_seed, trajectory_index);
    let steps_us = steps as usize;
    let mut cur: Vec<Spinor> = Vec::with_capacity(2 * steps_us + 1);
    let mut next: Vec<Spinor> = Vec::with_capacity(2 * steps_us + 1);
    cur.push([initial_spinor[0] * scale, initial_spinor[1] * scale]);

    let mut mean_x = Vec::with_capacity(steps_us);
    let mut second_moment = Vec::with_capacity(steps_us);
    for t in 1..=steps {
        let g = sample_phase(&mut rng, model);
        let coin = CoinOperator::from_phase(g)?;
        next.clear();
        next.resize(cur.len() + 2, [C64::default(); 2]);
        step_kernel(&cur, &coin, &mut next);
        std::mem::swap(&mut cur, &mut next);

        let origin = -(t as i64);
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, a) in cur.iter().enumerate() {
            let p = a[0].norm_sqr() + a[1].norm_sqr();
            let x = (origin + i as i64) as f64;
            m1 += x * p;
            m2 += x * x * p;
        }
        mean_x.push(m1);
        second_moment.push(m2);
    }

    let positions: Vec<i64> = (-(steps as i64)..=steps as i64).collect();
    let probabilities: Vec<f64> = cur.iter().map(|a| a[0].norm_sqr() + a[1].norm_sqr()).collect();
    Ok(TrajectoryOutcome {
        mean_x,
        second_moment,
        final_distribution: PositionDistribution::new(positions, probabilities)?,
    })
}

/// Sample averages over the full ensemble.
#[derive(Debug, Clone)]
pub struct EnsembleStatistics {
    /// Time grid 1..=steps.
    pub time_grid: Vec<u64>,
    /// Sample-averaged ⟨x⟩ per time step.
    pub mean_x: Vec<f64>,
    /// Sample-averaged ⟨x²⟩ per time step.
    pub mean_x2: Vec<f64>,
    /// Standard error of the ⟨x²⟩ average per time step.
    pub stderr_x2: Vec<f64>,
    /// Per-trajectory ⟨x²⟩_t series, trajectory-major. Kept because the
    /// ⟨x²⟩_t residuals are strongly correlated across t within a
    /// trajectory; honest slope errors need the cross-trajectory scatter.
    pub sample_x2: Vec<Vec<f64>>,
    /// Sample-averaged probability profile at the final time.
    pub mean_distribution: PositionDistribution,
    /// Standard error of the averaged profile, per site.
    pub stderr_distribution: Vec<f64>,
    pub n_samples_used: u64,
}

/// Average `model.n_samples()` trajectories. Worker count is taken from the
/// `QWLAB_THREADS` environment variable when set; the result is identical for
/// any value.
pub fn ensemble_average(
    initial_spinor: Spinor,
    model: &NoiseModel,
    steps: u64,
) -> Result<EnsembleStatistics> {
    ensemble_average_with_threads(initial_spinor, model, steps, thread_cap_from_env())
}

/// As [`ensemble_average`], with an explicit worker-count cap (None = rayon
/// default). Exposed so tests can pin the schedule.
pub fn ensemble_average_with_threads(
    initial_spinor: Spinor,
    model: &NoiseModel,
    steps: u64,
    threads: Option<usize>,
) -> Result<EnsembleStatistics> {
    let n = model.n_samples();
    let run = || -> Result<Vec<TrajectoryOutcome>> {
        (0..n)
            .into_par_iter()
            .map(|i| run_trajectory(initial_spinor, model, steps, i))
            .collect()
    };
    let outcomes = match threads {
        Some(cap) if cap >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(cap)
            .build()
            .expect("worker pool")
            .install(run),
        _ => run(),
    }?;
    reduce_in_index_order(outcomes, steps, n)
}

fn reduce_in_index_order(
    outcomes: Vec<TrajectoryOutcome>,
    steps: u64,
    n: u64,
) -> Result<EnsembleStatistics> {
    let steps_us = steps as usize;
    let nf = n as f64;
    let mut mean_x = vec![0.0; steps_us];
    let mut mean_x2 = vec![0.0; steps_us];
    for o in &outcomes {
        for t in 0..steps_us {
            mean_x[t] += o.mean_x[t];
            mean_x2[t] += o.second_moment[t];
        }
    }
    for t in 0..steps_us {
        mean_x[t] /= nf;
        mean_x2[t] /= nf;
    }

    let mut stderr_x2 = vec![0.0; steps_us];
    if n > 1 {
        for o in &outcomes {
            for t in 0..steps_us {
                stderr_x2[t] += (o.second_moment[t] - mean_x2[t]).powi(2);
            }
        }
        for se in stderr_x2.iter_mut() {
            *se = (*se / (nf - 1.0) / nf).sqrt();
        }
    }

    let positions: Vec<i64> = (-(steps as i64)..=steps as i64).collect();
    let mut probabilities = vec![0.0; positions.len()];
    for o in &outcomes {
        for (acc, &p) in probabilities.iter_mut().zip(o.final_distribution.probabilities()) {
            *acc += p;
        }
    }
    for p in probabilities.iter_mut() {
        *p /= nf;
    }
    let mut stderr_distribution = vec![0.0; positions.len()];
    if n > 1 {
        for o in &outcomes {
            for (acc, (&p, &m)) in stderr_distribution
                .iter_mut()
                .zip(o.final_distribution.probabilities().iter().zip(&probabilities))
            {
                *acc += (p - m).powi(2);
            }
        }
        for se in stderr_distribution.iter_mut() {
            *se = (*se / (nf - 1.0) / nf).sqrt();
        }
    }

    Ok(EnsembleStatistics {
        time_grid: (1..=steps).collect(),
        mean_x,
        mean_x2,
        stderr_x2,
        sample_x2: outcomes.into_iter().map(|o| o.second_moment).collect(),
        mean_distribution: PositionDistribution::new(positions, probabilities)?,
        stderr_distribution,
        n_samples_used: n,
    })
}

fn thread_cap_from_env() -> Option<usize> {
    std::env::var("QWLAB_THREADS").ok()?.trim().parse().ok()
}

/// Empirical diffusion constant and its standard error.
#[derive(Debug, Clone, Copy)]
pub struct DiffusionEstimate {
    pub d_hat: f64,
    pub stderr: f64,
    /// First time step included in the fit window.
    pub window_start: u64,
}

/// Least-squares slope of ⟨x²⟩_t against t over the trailing `fit_window`
/// fraction of the time grid (0.5 fits the final half).
///
/// The slope equals the least-squares slope of the averaged series (the fit
/// is linear in the data, so the mean of per-trajectory slopes is the slope
/// of the mean). The standard error comes from the scatter of per-trajectory
/// slopes — the per-step residuals of one trajectory are strongly correlated
/// in t, so the usual residual formula would understate it badly. With a
/// single trajectory the residual formula is all there is, and is used.
pub fn estimate_diffusion(
    stats: &EnsembleStatistics,
    fit_window: f64,
) -> Result<DiffusionEstimate> {
    if !(fit_window > 0.0 && fit_window <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fit window must be a fraction in (0, 1], got {fit_window}"
        )));
    }
    let total = stats.time_grid.len();
    let take = ((total as f64) * fit_window).ceil() as usize;
    let start = total - take.min(total);
    if total - start < 10 {
        return Err(Error::InvalidArgument(format!(
            "fit window holds {} points, need at least 10",
            total - start
        )));
    }
    let x: Vec<f64> = stats.time_grid[start..].iter().map(|&t| t as f64).collect();
    let y: Vec<f64> = stats.mean_x2[start..].to_vec();
    let pooled = linear_fit(&x, &y)?;

    let stderr = if stats.sample_x2.len() >= 2 {
        let slopes: Vec<f64> = stats
            .sample_x2
            .iter()
            .map(|series| linear_fit(&x, &series[start..]).map(|f| f.slope))
            .collect::<Result<_>>()?;
        crate::stats::mean_and_stderr(&slopes).1
    } else {
        pooled.slope_stderr
    };
    Ok(DiffusionEstimate {
        d_hat: pooled.slope,
        stderr,
        window_start: stats.time_grid[start],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn default_spinor() -> Spinor {
        let a = 1.0 / 2f64.sqrt();
        [C64::new(a, 0.0), C64::new(0.0, a)]
    }

    #[test]
    fn model_rejects_bad_epsilon() {
        assert!(NoiseModel::new(0.0, 0.0, 10, 1).is_err());
        assert!(NoiseModel::new(0.0, PI + 1e-9, 10, 1).is_err());
        assert!(NoiseModel::new(0.0, -0.5, 10, 1).is_err());
        assert!(NoiseModel::new(0.0, 1.0, 0, 1).is_err());
        assert!(NoiseModel::new(f64::NAN, 1.0, 10, 1).is_err());
    }

    #[test]
    fn phases_land_in_the_interval() {
        let model = NoiseModel::new(0.7, 0.4, 1, 9).unwrap();
        let mut rng = trajectory_rng(9, 0);
        for _ in 0..10_000 {
            let g = sample_phase(&mut rng, &model);
            assert!((0.3..0.7 + 0.4).contains(&g));
        }
    }

    #[test]
    fn phase_sample_mean_matches_uniform_moments() {
        // mean 0, sd ε/√3; allow 3 sigma of the mean estimator
        let model = NoiseModel::new(0.0, PI, 1, 123).unwrap();
        let mut rng = trajectory_rng(123, 0);
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| sample_phase(&mut rng, &model)).sum::<f64>() / n as f64;
        let bound = 3.0 * PI / (3.0 * n as f64).sqrt();
        assert!(mean.abs() < bound, "mean {mean} vs bound {bound}");
    }

    #[test]
    fn fixed_seed_reproduces_the_sequence() {
        let model = NoiseModel::new(1.0, 0.5, 1, 77).unwrap();
        let a: Vec<f64> = {
            let mut rng = trajectory_rng(77, 3);
            (0..50).map(|_| sample_phase(&mut rng, &model)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = trajectory_rng(77, 3);
            (0..50).map(|_| sample_phase(&mut rng, &model)).collect()
        };
        assert_eq!(a, b);
        let c: Vec<f64> = {
            let mut rng = trajectory_rng(77, 4);
            (0..50).map(|_| sample_phase(&mut rng, &model)).collect()
        };
        assert_ne!(a, c);
    }

    #[test]
    fn trajectory_is_bit_reproducible() {
        let model = NoiseModel::new(PI, 2.23, 1, 5).unwrap();
        let a = run_trajectory(default_spinor(), &model, 60, 11).unwrap();
        let b = run_trajectory(default_spinor(), &model, 60, 11).unwrap();
        assert_eq!(a.second_moment, b.second_moment);
        assert_eq!(
            a.final_distribution.probabilities(),
            b.final_distribution.probabilities()
        );
    }

    #[test]
    fn first_step_lands_on_the_light_cone() {
        // ⟨x²⟩ at t = 1 is exactly 1 whatever the phases
        for seed in 0..5 {
            let model = NoiseModel::new(1.3, 2.0, 1, seed).unwrap();
            let o = run_trajectory(default_spinor(), &model, 1, 0).unwrap();
            assert_abs_diff_eq!(o.second_moment[0], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn tiny_noise_matches_noiseless_run() {
        use crate::walk::{CoinOperator, WalkerState};
        let steps = 200u64;
        let model = NoiseModel::new(PI / 2.0, 1e-6, 1, 21).unwrap();
        let noisy = run_trajectory(default_spinor(), &model, steps, 0).unwrap();
        let mut s = WalkerState::localized(0, default_spinor()).unwrap();
        let coin = CoinOperator::from_phase(PI / 2.0).unwrap();
        for _ in 0..steps {
            s = s.step(&coin);
        }
        let (_, m2) = s.position_moments();
        let rel = (noisy.second_moment[steps as usize - 1] - m2).abs() / m2;
        assert!(rel < 1e-3, "relative deviation {rel}");
    }

    #[test]
    fn single_sample_average_equals_the_trajectory() {
        let model = NoiseModel::new(PI, 2.23, 1, 31).unwrap();
        let stats = ensemble_average(default_spinor(), &model, 40).unwrap();
        let traj = run_trajectory(default_spinor(), &model, 40, 0).unwrap();
        assert_eq!(stats.mean_x2, traj.second_moment);
        assert_eq!(stats.stderr_x2, vec![0.0; 40]);
    }

    #[test]
    fn schedule_independent_bit_exact_reduction() {
        let model = NoiseModel::new(PI, 2.23, 64, 3).unwrap();
        let one = ensemble_average_with_threads(default_spinor(), &model, 30, Some(1)).unwrap();
        let many = ensemble_average_with_threads(default_spinor(), &model, 30, Some(4)).unwrap();
        assert_eq!(one.mean_x2, many.mean_x2);
        assert_eq!(one.stderr_x2, many.stderr_x2);
        assert_eq!(
            one.mean_distribution.probabilities(),
            many.mean_distribution.probabilities()
        );
    }

    #[test]
    fn averaged_distribution_is_normalized() {
        let model = NoiseModel::new(0.0, 2.23, 32, 13).unwrap();
        let stats = ensemble_average(default_spinor(), &model, 50).unwrap();
        assert_abs_diff_eq!(stats.mean_distribution.total(), 1.0, epsilon = 1e-9);
        assert!(stats.mean_distribution.probabilities().iter().all(|&p| p >= 0.0));
        // light cone: ⟨x²⟩_t ≤ t²
        for (&t, &m2) in stats.time_grid.iter().zip(&stats.mean_x2) {
            assert!(m2 <= (t * t) as f64 + 1e-9);
        }
        assert_abs_diff_eq!(stats.mean_x2[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn stderr_shrinks_like_inverse_sqrt_samples() {
        let spinor = default_spinor();
        let small = NoiseModel::new(PI, 2.23, 200, 17).unwrap();
        let big = NoiseModel::new(PI, 2.23, 800, 17).unwrap();
        let a = ensemble_average(spinor, &small, 40).unwrap();
        let b = ensemble_average(spinor, &big, 40).unwrap();
        let t = 39;
        let ratio = b.stderr_x2[t] / a.stderr_x2[t];
        // quadrupling the samples halves the error; allow sampling slack
        assert!((ratio - 0.5).abs() < 0.15, "ratio {ratio}");
    }

    #[test]
    fn diffusion_fit_recovers_exact_line() {
        let steps = 100u64;
        let series: Vec<f64> = (1..=steps).map(|t| 0.7 * t as f64).collect();
        let stats = EnsembleStatistics {
            time_grid: (1..=steps).collect(),
            mean_x: vec![0.0; steps as usize],
            mean_x2: series.clone(),
            stderr_x2: vec![0.0; steps as usize],
            sample_x2: vec![series],
            mean_distribution: PositionDistribution::new(vec![0], vec![1.0]).unwrap(),
            stderr_distribution: vec![0.0],
            n_samples_used: 1,
        };
        let est = estimate_diffusion(&stats, 0.5).unwrap();
        assert_abs_diff_eq!(est.d_hat, 0.7, epsilon = 1e-12);
        assert!(est.stderr < 1e-10);
        assert_eq!(est.window_start, 51);
    }

    #[test]
    fn diffusion_fit_rejects_short_windows() {
        let series: Vec<f64> = (1..=12).map(|t| t as f64).collect();
        let stats = EnsembleStatistics {
            time_grid: (1..=12).collect(),
            mean_x: vec![0.0; 12],
            mean_x2: series.clone(),
            stderr_x2: vec![0.0; 12],
            sample_x2: vec![series],
            mean_distribution: PositionDistribution::new(vec![0], vec![1.0]).unwrap(),
            stderr_distribution: vec![0.0],
            n_samples_used: 1,
        };
        assert!(estimate_diffusion(&stats, 0.5).is_err());
        assert!(estimate_diffusion(&stats, 1.5).is_err());
        assert!(estimate_diffusion(&stats, 1.0).is_ok());
    }

    #[test]
    fn slope_error_reflects_cross_trajectory_scatter() {
        // trajectories with different slopes: the residual formula on the
        // (perfectly linear) mean series would report ~0
        let steps = 40u64;
        let grid: Vec<u64> = (1..=steps).collect();
        let mk = |d: f64| -> Vec<f64> { grid.iter().map(|&t| d * t as f64).collect() };
        let samples = vec![mk(0.5), mk(0.7), mk(0.9), mk(0.3), mk(1.1)];
        let mean: Vec<f64> = (0..steps as usize)
            .map(|t| samples.iter().map(|s| s[t]).sum::<f64>() / samples.len() as f64)
            .collect();
        let stats = EnsembleStatistics {
            time_grid: grid,
            mean_x: vec![0.0; steps as usize],
            mean_x2: mean,
            stderr_x2: vec![0.0; steps as usize],
            sample_x2: samples,
            mean_distribution: PositionDistribution::new(vec![0], vec![1.0]).unwrap(),
            stderr_distribution: vec![0.0],
            n_samples_used: 5,
        };
        let est = estimate_diffusion(&stats, 0.5).unwrap();
        assert_abs_diff_eq!(est.d_hat, 0.7, epsilon = 1e-12);
        let (_, expected) = crate::stats::mean_and_stderr(&[0.5, 0.7, 0.9, 0.3, 1.1]);
        assert_abs_diff_eq!(est.stderr, expected, epsilon = 1e-12);
    }
}
