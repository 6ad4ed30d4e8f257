//! Physical constants (SI, CODATA 2018).

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const KB: f64 = 1.380_649e-23;
/// Atomic mass unit (kg).
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Elementary charge (C).
pub const QE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Coulomb constant 1/(4 pi eps0) (N m^2 / C^2).
pub const K_COULOMB: f64 = 1.0 / (4.0 * std::f64::consts::PI * EPS0);
