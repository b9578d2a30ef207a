//! Shape classification of averaged probability profiles: Gaussian versus
//! exponential decay around the origin, the signature separating ordinary
//! diffusion from quasi-localization.

use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleStatistics;
use crate::error::{Error, Result};
use crate::stats::{linear_fit, mean_and_stderr};
use crate::walk::PositionDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileClass {
    Gaussian,
    Exponential,
    Indeterminate,
}

/// Outcome of fitting log P against x² (Gaussian) and against |x|
/// (exponential) over the populated same-parity sites.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileFit {
    pub gaussian_r2: f64,
    pub exponential_r2: f64,
    pub classification: ProfileClass,
    /// Positions that entered the fits.
    pub fit_range: Vec<i64>,
}

/// Fit-window controls. The classification margin, the window width and the
/// minimum fit size are analysis thresholds, chosen to be robust to Monte
/// Carlo noise at a couple thousand samples; all are adjustable.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Drop sites with |x| below this cut so the origin spike cannot
    /// dominate the fit.
    pub exclusion: i64,
    /// Required r² lead for a definite classification.
    pub margin: f64,
    /// The fit window covers |x| up to this multiple of the profile's rms
    /// width — the decay law "around zero" is what distinguishes the two
    /// shapes; far tails Gaussianize under the central limit theorem
    /// regardless of the core.
    pub window_rms_factor: f64,
    /// Widen the window beyond the rms cut until it holds at least this many
    /// sites (narrow synthetic profiles would otherwise leave too few).
    pub min_fit_sites: usize,
    /// Populated-site count (after parity and exclusion cuts) below which the
    /// profile cannot be classified at all.
    pub min_support: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            exclusion: 2,
            margin: 0.02,
            window_rms_factor: 2.0,
            min_fit_sites: 12,
            min_support: 20,
        }
    }
}

/// Classify a profile. Zero-probability sites (the wrong parity class) are
/// dropped rather than entering the logs as −∞.
pub fn fit_profile(dist: &PositionDistribution, options: &FitOptions) -> Result<ProfileFit> {
    let peak = dist.probabilities().iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::InvalidArgument("profile carries no probability".into()));
    }
    let mut usable: Vec<(i64, f64)> = dist
        .positions()
        .iter()
        .zip(dist.probabilities())
        .filter(|&(&x, &p)| p > 0.0 && x.abs() >= options.exclusion)
        .map(|(&x, &p)| (x, p))
        .collect();
    if usable.len() < options.min_support {
        return Err(Error::InsufficientSupport { got: usable.len(), need: options.min_support });
    }
    // window: |x| within a couple rms widths of the origin, padded out to a
    // workable fit size for very narrow profiles; rms of the normalized
    // profile so the window (and hence the fit) is scale invariant
    let rms = (dist.moments().second_moment / dist.total()).sqrt();
    let cut = options.window_rms_factor * rms;
    usable.sort_by_key(|&(x, _)| x.abs());
    let mut take = usable.iter().take_while(|&&(x, _)| (x.abs() as f64) <= cut).count();
    take = take.max(options.min_fit_sites.min(usable.len()));
    let mut window: Vec<(i64, f64)> = usable[..take].to_vec();
    window.sort_by_key(|&(x, _)| x);

    let xs: Vec<i64> = window.iter().map(|&(x, _)| x).collect();
    let logs: Vec<f64> = window.iter().map(|&(_, p)| p.ln()).collect();
    let sq: Vec<f64> = xs.iter().map(|&x| (x as f64) * (x as f64)).collect();
    let ab: Vec<f64> = xs.iter().map(|&x| x.abs() as f64).collect();
    let gaussian_r2 = linear_fit(&sq, &logs)?.r_squared;
    let exponential_r2 = linear_fit(&ab, &logs)?.r_squared;
    let classification = if gaussian_r2 >= exponential_r2 + options.margin {
        ProfileClass::Gaussian
    } else if exponential_r2 >= gaussian_r2 + options.margin {
        ProfileClass::Exponential
    } else {
        ProfileClass::Indeterminate
    };
    Ok(ProfileFit { gaussian_r2, exponential_r2, classification, fit_range: xs })
}

/// Per-step ratio of the measured ⟨x²⟩_t to the asymptotic prediction D·t,
/// summarized over the trailing half of the series.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesComparison {
    pub ratio: Vec<f64>,
    pub late_mean: f64,
    pub late_stderr: f64,
    /// |late_mean − 1| < max(2·stderr, 0.05).
    pub within_tolerance: bool,
}

pub fn compare_series(stats: &EnsembleStatistics, analytic_d: f64) -> Result<SeriesComparison> {
    if stats.time_grid.len() < 20 {
        return Err(Error::InvalidArgument(format!(
            "need at least 20 time steps to compare, got {}",
            stats.time_grid.len()
        )));
    }
    if !(analytic_d.is_finite() && analytic_d > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "analytic diffusion constant must be positive, got {analytic_d}"
        )));
    }
    let ratio: Vec<f64> = stats
        .time_grid
        .iter()
        .zip(&stats.mean_x2)
        .map(|(&t, &m2)| m2 / (analytic_d * t as f64))
        .collect();
    let late = &ratio[ratio.len() / 2..];
    let (late_mean, late_stderr) = mean_and_stderr(late);
    let within_tolerance = (late_mean - 1.0).abs() < (2.0 * late_stderr).max(0.05);
    Ok(SeriesComparison { ratio, late_mean, late_stderr, within_tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::PositionDistribution;
    use approx::assert_abs_diff_eq;

    fn even_sites(t: i64) -> Vec<i64> {
        (-t..=t).filter(|x| (x - t) % 2 == 0).collect()
    }

    fn synthetic(shape: impl Fn(f64) -> f64) -> PositionDistribution {
        let xs = even_sites(120);
        let mut ps: Vec<f64> = xs.iter().map(|&x| shape(x as f64)).collect();
        let total: f64 = ps.iter().sum();
        ps.iter_mut().for_each(|p| *p /= total);
        PositionDistribution::new(xs, ps).unwrap()
    }

    #[test]
    fn exponential_profile_is_recognized() {
        let dist = synthetic(|x| (-x.abs() / 2.0).exp());
        let fit = fit_profile(&dist, &FitOptions::default()).unwrap();
        assert_eq!(fit.classification, ProfileClass::Exponential);
        assert!(fit.exponential_r2 > 0.999, "r2 = {}", fit.exponential_r2);
    }

    #[test]
    fn gaussian_profile_is_recognized() {
        let dist = synthetic(|x| (-x * x / 50.0).exp());
        let fit = fit_profile(&dist, &FitOptions::default()).unwrap();
        assert_eq!(fit.classification, ProfileClass::Gaussian);
        assert!(fit.gaussian_r2 > 0.999);
    }

    #[test]
    fn rescaling_leaves_the_fit_unchanged() {
        let dist = synthetic(|x| (-x.abs() / 3.0).exp());
        let scaled = PositionDistribution::new(
            dist.positions().to_vec(),
            dist.probabilities().iter().map(|p| p * 7.5).collect(),
        )
        .unwrap();
        let a = fit_profile(&dist, &FitOptions::default()).unwrap();
        let b = fit_profile(&scaled, &FitOptions::default()).unwrap();
        assert_eq!(a.classification, b.classification);
        assert_abs_diff_eq!(a.gaussian_r2, b.gaussian_r2, epsilon = 1e-12);
        assert_abs_diff_eq!(a.exponential_r2, b.exponential_r2, epsilon = 1e-12);
    }

    #[test]
    fn reflection_leaves_a_symmetric_fit_unchanged() {
        let dist = synthetic(|x| (-x * x / 80.0).exp());
        let mut xs: Vec<i64> = dist.positions().iter().map(|&x| -x).collect();
        let mut ps = dist.probabilities().to_vec();
        xs.reverse();
        ps.reverse();
        let mirrored = PositionDistribution::new(xs, ps).unwrap();
        let a = fit_profile(&dist, &FitOptions::default()).unwrap();
        let b = fit_profile(&mirrored, &FitOptions::default()).unwrap();
        assert_abs_diff_eq!(a.gaussian_r2, b.gaussian_r2, epsilon = 1e-12);
        assert_abs_diff_eq!(a.exponential_r2, b.exponential_r2, epsilon = 1e-12);
    }

    #[test]
    fn refuses_thin_support() {
        let dist = PositionDistribution::new(vec![-2, 0, 2], vec![0.25, 0.5, 0.25]).unwrap();
        match fit_profile(&dist, &FitOptions::default()) {
            Err(Error::InsufficientSupport { got, need }) => {
                assert!(got < need);
            }
            other => panic!("expected insufficient support, got {other:?}"),
        }
    }

    #[test]
    fn exact_linear_series_compares_to_one() {
        let steps = 60u64;
        let d = 0.37;
        let series: Vec<f64> = (1..=steps).map(|t| d * t as f64).collect();
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
        let cmp = compare_series(&stats, d).unwrap();
        assert!(cmp.within_tolerance);
        assert_abs_diff_eq!(cmp.late_mean, 1.0, epsilon = 1e-12);
        assert!(cmp.ratio.iter().all(|&r| (r - 1.0).abs() < 1e-12));
    }

    #[test]
    fn short_series_is_rejected() {
        let series: Vec<f64> = (1..=10).map(|t| t as f64).collect();
        let stats = EnsembleStatistics {
            time_grid: (1..=10).collect(),
            mean_x: vec![0.0; 10],
            mean_x2: series.clone(),
            stderr_x2: vec![0.0; 10],
            sample_x2: vec![series],
            mean_distribution: PositionDistribution::new(vec![0], vec![1.0]).unwrap(),
            stderr_distribution: vec![0.0],
            n_samples_used: 1,
        };
        assert!(compare_series(&stats, 1.0).is_err());
    }
}
