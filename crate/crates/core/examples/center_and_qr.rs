//! The trial-function construction on a peanut-shaped domain in CH¹: center
//! selection, the moment matrix `q`, its QR rotation and the resulting
//! orthogonality and Rayleigh-quotient premises.

use rank1_neumann::fem2d::{domain_spectrum, mesh_domain, BoundaryCurve, ConformalModel};
use rank1_neumann::radial::solve_ball;
use rank1_neumann::verifier::{polygon_area, trial_bound_check, CheckInputs, TrialSetup};
use rank1_neumann::Space;

fn main() -> rank1_neumann::Result<()> {
    let space = Space::ch1();
    let model = ConformalModel::new(space)?;
    let curve = BoundaryCurve::Peanut { scale: 0.4, waist: 0.4, rotation: 0.3 };
    let dm = mesh_domain(&model, &curve, 0.04)?;
    let (system, spectrum) = domain_spectrum(&dm, 4)?;
    let volume = polygon_area(&model, &dm.mesh);
    let radius = space.radius_from_volume(volume)?;
    let ball = solve_ball(&space, radius, 1e-11)?;
    let setup = TrialSetup::build(&model, &dm.mesh, &system, &spectrum, &ball, volume)?;

    let c = &setup.center;
    println!("center {:?} via {} after {} steps, residual {:.2e}", c.center, c.strategy, c.iterations, c.residual);
    println!("q = {:?}", setup.q);
    let o = &setup.orthogonalization;
    println!("a = {:?}, rank deficient: {}, lower residual {:.1e}", o.a, o.rank_deficient, o.lower_residual);
    let inputs = CheckInputs { space: space.to_string(), domain_hash: String::new(), h: spectrum.h_max, solver_tags: vec![] };
    for check in trial_bound_check(&setup, &system, &spectrum, &inputs) {
        println!("{:<20} lhs={:.3e} pass={}", check.id, check.lhs, check.pass);
    }
    Ok(())
}
