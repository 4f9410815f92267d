use proptest::prelude::*;
use rank1_neumann::fem2d::{assemble, domain_spectrum, mesh_domain, BoundaryCurve, ConformalModel};
use rank1_neumann::quadrature::GaussLegendre;
use rank1_neumann::Space;

const SPACES: [fn() -> Space; 4] = [Space::hyperbolic_plane, Space::sphere2, Space::cp1, Space::ch1];

fn model(i: usize) -> ConformalModel {
    ConformalModel::new(SPACES[i]()).unwrap()
}

fn curve_strategy() -> impl Strategy<Value = (usize, BoundaryCurve)> {
    (0..4usize, any::<bool>(), 0.35f64..0.7, 0.5f64..0.9, 0.0f64..3.2, -0.1f64..0.1).prop_map(
        |(i, peanut, size, shape, rotation, shift)| {
            let reach = 0.7 * model(i).region_radius();
            let c = if peanut {
                BoundaryCurve::Peanut { scale: size * reach, waist: 0.4 * shape, rotation }
            } else {
                BoundaryCurve::Ellipse {
                    center: [shift * reach, -0.5 * shift * reach],
                    semi_axes: [size * reach, shape * size * reach],
                    rotation,
                }
            };
            (i, c)
        },
    )
}

fn spectrum(m: &ConformalModel, c: &BoundaryCurve, h: f64) -> Vec<f64> {
    let dm = mesh_domain(m, c, h).unwrap();
    domain_spectrum(&dm, 4).unwrap().1.eigenvalues
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rotating_the_domain_keeps_the_spectrum((i, curve) in curve_strategy(), angle in 0.0f64..6.3) {
        let m = model(i);
        let a = spectrum(&m, &curve, 0.1);
        let b = spectrum(&m, &curve.rotated_by(angle), 0.1);
        for k in 1..a.len() {
            prop_assert!((a[k] - b[k]).abs() < 1e-6 * a[k], "{}: μ{k} {} vs {}", m.space, a[k], b[k]);
        }
    }

    #[test]
    fn mesh_and_spectrum_contracts((i, curve) in curve_strategy()) {
        let m = model(i);
        let dm = mesh_domain(&m, &curve, 0.08).unwrap();
        prop_assert!(dm.mesh.min_angle_deg() >= 15.0);
        let sys = assemble(&m, &dm.mesh).unwrap();
        prop_assert!(sys.stiffness.is_symmetric() && sys.mass.is_symmetric());
        for a in [&sys.stiffness, &sys.mass] {
            for r in 0..a.n {
                for (c, v) in a.row(r) {
                    prop_assert_eq!(v.to_bits(), a.get(c, r).to_bits());
                }
            }
        }
        let (_, s) = domain_spectrum(&dm, 4).unwrap();
        prop_assert!(s.eigenvalues[0].abs() <= 1e-8 * s.eigenvalues[1]);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        for (p, u) in s.eigenvectors.iter().enumerate() {
            for (q, v) in s.eigenvectors.iter().enumerate() {
                let want = if p == q { 1.0 } else { 0.0 };
                prop_assert!((sys.mass.form(u, v) - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn shrinking_a_disk_raises_the_first_eigenvalue(i in 0..4usize, t in 0.3f64..0.9) {
        let m = model(i);
        let top = if m.is_compact() { std::f64::consts::FRAC_PI_4 } else { 1.2 };
        let big = t * top;
        let disk = |r: f64| BoundaryCurve::GeodesicDisk { center: [0.0, 0.0], radius: r };
        let mu_big = spectrum(&m, &disk(big), 0.06)[1];
        let mu_small = spectrum(&m, &disk(0.85 * big), 0.06)[1];
        prop_assert!(mu_small > mu_big, "{}: {mu_small} ≤ {mu_big}", m.space);
    }

    #[test]
    fn rays_reproduce_radius_and_density(i in 0..4usize, t in 0.01f64..1.0) {
        let m = model(i);
        let r = t * if m.is_compact() { std::f64::consts::FRAC_PI_4 } else { 3.0 };
        let rho = m.chart_radius(r);
        // arc length of the ray in the conformal metric
        let len = GaussLegendre::new(40).integrate(0.0, rho, |s| m.lambda([s, 0.0]));
        prop_assert!((len - r).abs() <= 1e-8 * r.max(1.0), "{}: {len} vs {r}", m.space);
        // circumference 2π λ ρ against the density of the geodesic sphere
        let j = m.space.density(r).unwrap();
        let circ = m.lambda([rho * 0.6, rho * 0.8]) * rho;
        prop_assert!((circ - j).abs() <= 1e-8 * j.max(1e-300), "{}: {circ} vs {j}", m.space);
    }
}
