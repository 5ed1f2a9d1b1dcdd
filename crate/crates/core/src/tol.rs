//! Numerical tolerances shared by all modules.

/// Elementwise sign gates on user data (Metzler checks, nonnegativity).
pub const METZLER: f64 = 1e-12;

/// Eigenpair residuals and eigenvalue sign decisions.
pub const EIG: f64 = 1e-9;

/// Elementwise post-hoc gates on computed quantities.
pub const SOL: f64 = 1e-7;

/// Fixed-point stopping tolerance for value iteration.
pub const FIXED_POINT: f64 = 1e-10;

/// Simplex feasibility and optimality tolerance.
pub const LP: f64 = 1e-9;

/// Relative scale for sign ties: `tie = TIE_SCALE * (1 + |r| + |p| |B|)`.
pub const TIE_SCALE: f64 = 1e-9;

/// Power-iteration cap for Perron roots.
pub const POWER_ITER_CAP: usize = 100_000;

/// Value-iteration cap and divergence threshold.
pub const VI_ITER_CAP: usize = 1_000_000;
pub const VI_DIVERGENCE_CAP: f64 = 1e12;

/// Tie-sign enumeration cap (2^6 combinations).
pub const MAX_TIE_COMBINATIONS: usize = 64;
