//! Signed stochastic exponentials: Mellin transforms, conditional
//! characteristic functions of the log-modulus and their densities.

pub mod mellin;
pub mod mv;

pub use mellin::{default_log_grid, default_wealth_grid, wealth_from_subdensities, Branch, SignedMellinModel};
pub use mv::{
    mv_g_closed_form, mv_i1, mv_i2, mv_i2_at_zero, mv_optimal_fraction, mv_optimal_fraction_via_drift, MvParams,
};
