//! Neumann eigenvalues on geodesic balls, annuli and planar domains of the
//! rank-1 symmetric spaces, together with a numerical reconstruction of the
//! trial-function argument behind the isoperimetric inequalities
//!
//! ```text
//! 1/μ₁(Ω) + … + 1/μ_l(Ω) ≥ l/μ₁(B)      (compact, Ω inside a π/4 ball)
//! 1/μ₁(Ω) + … + 1/μ_p(Ω) ≥ p/μ₁(B)      (noncompact)
//! ```
//!
//! where `B` is the geodesic ball with the volume of `Ω`.
//!
//! * [`geometry`]: closed-form densities, curvature traces and mode constants.
//! * [`radial`]: shooting and finite-difference solvers for the radial ball
//!   problem, the extended profile `G`, sign functions and annulus spectra.
//! * [`fem2d`]: P1 Neumann eigensolver on the four 2-dimensional model spaces.
//! * [`verifier`]: center selection, QR rotation of trial functions, theorem
//!   and proof-chain checks collected into a JSON report.
//! * [`run`]: reproducible configurations driving the above (used by the `r1n` binary).

pub mod fem2d;
pub mod geometry;
mod ode;
pub mod quadrature;
pub mod radial;
pub mod run;
pub mod verifier;

pub use geometry::{ModeConstants, Space};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("radius constraint violated: {0}")]
    RadiusConstraint(String),
    #[error("eigenvalue bracketing failed: {0}")]
    Bracketing(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("unsupported space: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
