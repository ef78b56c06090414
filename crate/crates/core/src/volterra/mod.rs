//! Volterra equations with Bessel kernels for XX chains with localized impurities.
//!
//! On an XX background the free propagator between sites a distance `n` apart is
//! `G_n(tau) = exp(-i h tau) (-i)^n J_n(g tau)`. Impurities confined to a few sites
//! turn the flow into a small system of Volterra equations of the second kind on
//! those sites, one per momentum. Other sites follow by quadrature.

mod asymptotic;
mod bessel;
mod grid;
mod kernel;
mod single;
mod system;

pub use asymptotic::{
    asymptotic_local_magnetization, asymptotic_quench_observable, bound_state_shift, initial_magnetization,
    scattering_weight,
};
pub use bessel::{bessel_j, bessel_table, MAX_BESSEL_ORDER};
pub use grid::{VolterraGrid, VolterraSolution, XTable};
pub use kernel::{bessel_halfline_transform, momentum_kernel};
pub use single::{extend_to_sites, solve_xx_single_impurity};
pub use system::solve_inhomogeneous_system;

#[cfg(test)]
mod tests;
