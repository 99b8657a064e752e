//! Physical constants (CODATA 2018), collected in one place so every module
//! agrees on the same values.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Planck constant, J·s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Boltzmann constant, J/K (exact).
pub const K_BOLTZMANN: f64 = 1.380_649e-23;
