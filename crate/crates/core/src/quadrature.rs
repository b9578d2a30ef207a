//! Gauss–Legendre nodes and the uniform periodic grid used for k-integrals.

use std::f64::consts::PI;

/// Gauss–Legendre rule on the reference interval [-1, 1].
///
/// Nodes are found by Newton iteration on the Legendre polynomial, seeded by
/// the Chebyshev estimate; converges to machine precision in a handful of
/// iterations for any practical order.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 2, "Gauss-Legendre rule needs at least 2 nodes");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Symmetric rule: solve only the lower half and mirror.
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x.abs();
            nodes[n - 1 - i] = x.abs();
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Iterate over (abscissa, weight) pairs mapped onto [a, b].
    /// The mapped weights sum to b - a.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

/// Legendre polynomial P_n(x) and its derivative via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Uniform grid of `n` points on [-π, π), suitable for trapezoidal
/// integration of 2π-periodic integrands (spectrally accurate there;
/// the mean of the samples is the integral divided by 2π).
pub fn periodic_grid(n: usize) -> impl Iterator<Item = f64> {
    let step = 2.0 * PI / n as f64;
    (0..n).map(move |j| -PI + j as f64 * step)
}
