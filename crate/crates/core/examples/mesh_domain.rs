//! Meshing the supported boundary curves in each two-dimensional model and
//! printing mesh statistics in chart and metric units.

use rank1_neumann::fem2d::{mesh_domain, BoundaryCurve, ConformalModel};
use rank1_neumann::Space;

fn main() -> rank1_neumann::Result<()> {
    let curves = [
        BoundaryCurve::GeodesicDisk { center: [0.1, 0.0], radius: 0.4 },
        BoundaryCurve::Ellipse { center: [0.0, 0.0], semi_axes: [0.35, 0.2], rotation: 0.5 },
        BoundaryCurve::Peanut { scale: 0.25, waist: 0.4, rotation: 0.0 },
        BoundaryCurve::Polyline { points: vec![[-0.2, -0.2], [0.25, -0.2], [0.25, 0.15], [0.0, 0.3], [-0.2, 0.15]] },
    ];
    for space in [Space::hyperbolic_plane(), Space::sphere2(), Space::cp1(), Space::ch1()] {
        let model = ConformalModel::new(space)?;
        for curve in &curves {
            let dm = mesh_domain(&model, curve, 0.05)?;
            let s = dm.mesh.stats(&model);
            let kind = serde_json::to_value(curve)?["type"].as_str().unwrap_or("?").to_string();
            println!(
                "{space:<9} {kind:<14} nv={:>5} nt={:>5} h={:.4} (chart {:.4}) min angle {:.1}°",
                s.vertices, s.triangles, s.h_max, s.h_chart, s.min_angle_deg
            );
        }
    }
    Ok(())
}
