use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{content_hash, Check, CheckInputs, Provenance, Relation};
use crate::geometry::Space;
use crate::radial::{sign_function, solve_ball_with, BallOptions, SolverTag};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaGrids {
    /// Points of the radial grid for the pointwise identities.
    pub radial_points: usize,
    /// Number of ball radii per space for the eigenvalue lemmas.
    pub radii: usize,
    /// Largest radius for noncompact spaces.
    pub noncompact_max_radius: f64,
    /// Negative control: replaces the mode count `c` by `c + 1`.
    #[doc(hidden)]
    #[serde(default)]
    pub corrupt_count: bool,
}

impl Default for LemmaGrids {
    fn default() -> Self {
        Self {
            radial_points: 1000,
            radii: 20,
            noncompact_max_radius: 3.0,
            corrupt_count: false,
        }
    }
}

fn inputs(space: &Space, what: &str, tags: &[&str]) -> CheckInputs {
    CheckInputs {
        space: space.to_string(),
        domain_hash: content_hash(what.as_bytes()),
        h: None,
        solver_tags: tags.iter().map(|s| s.to_string()).collect(),
    }
}

fn space_checks(space: &Space, grids: &LemmaGrids) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let end = if space.is_compact() { FRAC_PI_4 } else { 20.0 };
    let n = grids.radial_points;
    let radii: Vec<f64> = (1..=n).map(|i| end * i as f64 / n as f64).collect();
    let grid_inputs = inputs(space, &format!("grid:(0,{end}]:{n}"), &["closed_form"]);

    let mut worst_identity: f64 = 0.0;
    let mut worst_bound = f64::NEG_INFINITY;
    let mut c = space.theorem_count();
    if grids.corrupt_count {
        c += 1;
    }
    for &r in &radii {
        let dh = space.curvature_trace_deriv(r)?;
        let sum = space.gradient_sum(r)?;
        worst_identity = worst_identity.max((sum + dh).abs() / dh.abs());
        let gb = space.gradient_bound(r)?;
        worst_bound = worst_bound.max((c as f64 * gb + dh) / dh.abs());
    }
    out.push(Check::new(
        "identity.gradient_sum",
        "Σ_i |∇^{S_r} ω_i|² = −H'(r)",
        Relation::Le,
        worst_identity,
        0.0,
        1.0,
        1e-12,
        Provenance::Closed,
        &grid_inputs,
    ));
    out.push(
        Check::new(
            "bound.gradient",
            if space.is_compact() {
                "l·max_i |∇^{S_r} ω_i|² ≤ −H'(r) on (0, π/4]"
            } else {
                "p·max_i |∇^{S_r} ω_i|² ≤ −H'(r) on (0, 20]"
            },
            Relation::Le,
            worst_bound,
            0.0,
            1.0,
            1e-12,
            Provenance::Closed,
            &grid_inputs,
        )
        .with_note(format!("count c = {c}; lhs = max (c·bound + H')/|H'|")),
    );

    let rmax = if space.is_compact() { FRAC_PI_4 } else { grids.noncompact_max_radius };
    for j in 1..=grids.radii {
        let r = rmax * j as f64 / grids.radii as f64;
        let ball = solve_ball_with(space, r, BallOptions { tol: 1e-10, grid_size: 2000 })?;
        let bi = inputs(space, &format!("ball:{r:.17e}"), &[tag(ball.solver)]);
        if space.is_compact() && space.k() > 1 {
            let bound = 2.0 * (space.m() + space.k()) as f64;
            out.push(Check::new(
                format!("lemma.ball_lower_bound[R={r:.6}]"),
                "μ₁(B_R) ≥ 2(m+k) for R ≤ π/4",
                Relation::Ge,
                ball.mu1,
                bound,
                1.0,
                1e-6,
                Provenance::Ball,
                &bi,
            ));
        }
        let s = sign_function(&ball);
        out.push(
            Check::new(
                format!("lemma.sign_function[R={r:.6}]"),
                "s(r) ≤ 0 on the solver grid",
                Relation::Le,
                s.max_value / s.scale,
                0.0,
                1.0,
                1e-8,
                Provenance::Ball,
                &bi,
            )
            .with_note(format!("{:?}; lhs = max s / max|g'|", s.kind)),
        );
    }
    Ok(out)
}

fn tag(t: SolverTag) -> &'static str {
    match t {
        SolverTag::Shooting => "shooting",
        SolverTag::RayleighFd => "rayleigh_fd",
    }
}

/// Pointwise identities and bounds for the angular gradients, the ball
/// eigenvalue lower bound (compact, `k ≥ 2`) and the sign-function lemmas,
/// for each space. Spaces are processed in parallel; the output order
/// follows `spaces`.
pub fn check_lemmas(spaces: &[Space], grids: &LemmaGrids) -> Result<Vec<Check>> {
    if grids.radial_points < 100 || grids.radii == 0 {
        return Err(Error::InvalidArgument(format!(
            "radial grids need at least 100 points and one radius, got {grids:?}"
        )));
    }
    let per: Vec<Result<Vec<Check>>> = spaces.par_iter().map(|s| space_checks(s, grids)).collect();
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}
