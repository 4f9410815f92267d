use serde::{Deserialize, Serialize};

use super::{Check, CheckInputs, Provenance, Relation};
use crate::geometry::Space;
use crate::radial::{solve_ball_with, BallEig, BallOptions};
use crate::{Error, Result};

/// The quantities behind one instance of `Σ_{i≤c} 1/μ_i(Ω) ≥ c/μ₁(B)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MainInequality {
    pub count: usize,
    pub volume: f64,
    pub radius: f64,
    pub mu1_ball: f64,
    pub sum: f64,
    pub bound: f64,
    #[serde(skip)]
    pub ball: Option<BallEig>,
}

/// Checks `Σ_{i=1}^{c} 1/μ_i ≥ c/μ₁(B)` with `c = l` (compact) or `p`
/// (noncompact) and `B` the ball of volume `volume`. With `equality` set the
/// check asks for `|margin| ≤ 1e-3·c/μ₁(B)` instead, as for a ball itself.
pub fn check_main_inequality(
    space: &Space,
    volume: f64,
    mu_list: &[f64],
    provenance: Provenance,
    equality: bool,
    inputs: &CheckInputs,
) -> Result<(Check, MainInequality)> {
    let c = space.theorem_count();
    if mu_list.len() < c || mu_list[..c].iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "need {c} positive eigenvalues for {space}, got {mu_list:?}"
        )));
    }
    let radius = space.radius_from_volume(volume)?;
    let ball = solve_ball_with(space, radius, BallOptions { tol: 1e-11, grid_size: 4000 })?;
    let sum: f64 = mu_list[..c].iter().map(|m| 1.0 / m).sum();
    let bound = c as f64 / ball.mu1;
    let check = if equality {
        Check::new(
            "main_inequality.equality",
            "Σ_{i≤c} 1/μ_i(Ω) = c/μ₁(B) for a geodesic ball",
            Relation::Eq,
            sum,
            bound,
            1.0,
            1e-3 * bound,
            provenance,
            inputs,
        )
    } else {
        Check::new(
            "main_inequality",
            "Σ_{i≤c} 1/μ_i(Ω) ≥ c/μ₁(B) with |B| = |Ω|",
            Relation::Ge,
            sum,
            bound,
            1.0,
            1e-8 * bound,
            provenance,
            inputs,
        )
    };
    let check = if provenance == Provenance::AnnulusCandidate {
        check.with_note("candidate-based (angular modes 0,1 only); a pass implies the theorem instance, a miss is inconclusive")
    } else {
        check
    };
    Ok((
        check,
        MainInequality {
            count: c,
            volume,
            radius,
            mu1_ball: ball.mu1,
            sum,
            bound,
            ball: Some(ball),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(space: &Space) -> CheckInputs {
        CheckInputs { space: space.to_string(), domain_hash: String::new(), h: None, solver_tags: vec![] }
    }

    #[test]
    fn ball_is_the_equality_case() {
        let space = Space::new(1, 3, false).unwrap();
        let vol = space.ball_volume(0.9).unwrap();
        let b = crate::radial::solve_ball(&space, 0.9, 1e-11).unwrap();
        let mus = vec![b.mu1; 3];
        let (c, info) = check_main_inequality(&space, vol, &mus, Provenance::Ball, true, &inputs(&space)).unwrap();
        assert!(c.pass);
        assert!(c.margin.abs() < 1e-9 * info.bound, "{}", c.margin);
        assert_eq!(info.count, 2);
    }

    #[test]
    fn compact_volume_limit() {
        let space = Space::cp1();
        let vol = 2.0 * space.ball_volume(std::f64::consts::FRAC_PI_4).unwrap();
        assert!(matches!(
            check_main_inequality(&space, vol, &[10.0], Provenance::Fem, false, &inputs(&space)),
            Err(Error::RadiusConstraint(_))
        ));
    }

    #[test]
    fn too_few_eigenvalues() {
        let space = Space::new(2, 2, false).unwrap();
        assert!(check_main_inequality(&space, 1.0, &[1.0], Provenance::Fem, false, &inputs(&space)).is_err());
    }
}
