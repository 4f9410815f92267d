//! P1 eigenvalues of geodesic disks under uniform refinement against the
//! radial shooting value: second-order convergence and the twofold
//! degeneracy of the first nonzero eigenvalue.

use std::time::Instant;

use rank1_neumann::fem2d::{domain_spectrum, mesh_domain, BoundaryCurve, ConformalModel};
use rank1_neumann::radial::solve_ball;
use rank1_neumann::Space;

fn main() -> rank1_neumann::Result<()> {
    for (space, r) in [(Space::hyperbolic_plane(), 0.8), (Space::cp1(), 0.5), (Space::sphere2(), 0.7), (Space::ch1(), 0.6)] {
        let model = ConformalModel::new(space)?;
        let exact = solve_ball(&space, r, 1e-11)?.mu1;
        println!("{space}, R = {r}, radial mu1 = {exact:.10}");
        let mut dm = mesh_domain(&model, &BoundaryCurve::GeodesicDisk { center: [0.0, 0.0], radius: r }, 0.08)?;
        let mut prev: Option<f64> = None;
        for level in 0..3 {
            let t = Instant::now();
            let (_, s) = domain_spectrum(&dm, 4)?;
            let err = (s.eigenvalues[1] - exact).abs() / exact;
            let gap = (s.eigenvalues[2] - s.eigenvalues[1]) / s.eigenvalues[1];
            println!(
                "  nv={:>6} h={:.4} mu1={:.10} err={:.3e} order={} gap={:.1e} ({:.2?})",
                s.nv,
                s.h_max.unwrap_or(f64::NAN),
                s.eigenvalues[1],
                err,
                prev.map_or("-".into(), |p| format!("{:.3}", (p / err).log2())),
                gap,
                t.elapsed()
            );
            prev = Some(err);
            if level < 2 {
                dm = dm.refine();
            }
        }
    }
    Ok(())
}
