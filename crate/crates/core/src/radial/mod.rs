//! Radial Neumann eigenproblems on geodesic balls and annuli.
//!
//! The ball problem is `g'' + H g' + (μ + H') g = 0` on `(0, R)` with
//! `g(0) = 0`, `g'(R) = 0`; its smallest eigenvalue is `μ₁(B)`, of
//! multiplicity `m`, with eigenfunctions `g(r) ω_i(ξ)`.

mod annulus;
mod ball;
mod profile;
mod rayleigh;

pub use annulus::{solve_annulus, AnnulusMode, AnnulusModes};
pub use ball::{
    extend_g, sign_function, solve_ball, solve_ball_with, BallEig, BallOptions, SignKind,
    SignReport, SolverTag,
};
pub use profile::{ProfileKind, RadialProfile};
pub use rayleigh::{smallest_tridiagonal_eigenvalue, solve_ball_rayleigh};
