//! Exact position-space evolution of the walker.
//!
//! One step is coin-then-shift: U = S(I ⊗ C), where the coin acts on the spin
//! doublet at every site and the shift moves the ↑ component one site right
//! and the ↓ component one site left. Storage grows by one site on each side
//! per step, so the light cone never touches a boundary and no periodic
//! wrap-around is introduced.

mod coin;
mod distribution;
mod state;

pub use coin::{momentum_step, CoinOperator};
pub use distribution::{Moments, PositionDistribution};
pub use state::{Spinor, WalkerState};

pub(crate) use state::step_kernel;
