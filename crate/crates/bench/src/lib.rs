//! Shared helpers for the benchmark targets.

use num_complex::Complex64 as C64;

/// The (1, i)/√2 coin state used across benchmarks.
pub fn default_spinor() -> [C64; 2] {
    let a = 1.0 / 2f64.sqrt();
    [C64::new(a, 0.0), C64::new(0.0, a)]
}
