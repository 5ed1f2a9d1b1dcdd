//! Minimax linear-regulator synthesis for positive linear systems.
//!
//! The crate solves continuous-time minimax problems with nonnegative linear
//! cost on systems whose closed loop stays Metzler:
//!
//! ```text
//! inf_u max_{w,v}  ∫ s'x + r'u - γ'w - δ'v  dt
//!   ẋ = Ax + Bu + Fw + Hv,   |u| <= Ex,  w >= 0,  |v| <= Gx
//! ```
//!
//! The value function is linear, `J(x) = p'x`, so the Bellman equation
//! collapses to an ODE in `p(t)` (finite horizon, [`finite`]) or an algebraic
//! equation in `p` (infinite horizon, [`infinite`]). Optimal controllers are
//! bang-bang, `K = diag(σ) E` with `σ` a sign pattern.
//!
//! Module map:
//!
//! - [`problem`]: problem data, hypothesis checks, JSON problem files.
//! - [`kernel`]: Perron roots, Hurwitz tests, nonnegative eigenpairs.
//! - [`finite`] / [`infinite`]: HJB ODE and value iteration.
//! - [`lp`] / [`lr_lp`]: revised simplex and the linear-regulator LP pair.
//! - [`stability`]: detectability and closed-loop certificates.
//! - [`gain`]: minimal l1-induced gain w.r.t. the unconstrained disturbance.
//! - [`sim`]: worst-case disturbance synthesis and closed-loop simulation.
//! - [`water`]: line-shaped water-network instances and sweeps.
//! - [`suite`]: seeded random instances for cross-method checks.

pub mod error;
pub mod exec;
pub mod export;
pub mod finite;
pub mod gain;
pub mod infinite;
pub mod kernel;
pub(crate) mod linalg;
pub mod lp;
pub mod lr_lp;
pub mod problem;
pub mod sim;
pub mod stability;
pub mod suite;
pub mod tol;
pub mod water;

pub use error::{Error, Result};
pub use exec::Execution;
pub use problem::{Horizon, ProblemSpec, ValidationReport};

pub use nalgebra::{DMatrix, DVector};
