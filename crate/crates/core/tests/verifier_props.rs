use std::f64::consts::FRAC_PI_4;

use proptest::prelude::*;
use rank1_neumann::geometry::all_spaces;
use rank1_neumann::radial::solve_ball;
use rank1_neumann::run::{run_verify, Command, RunConfig, VerificationReport};
use rank1_neumann::verifier::{orthogonalize, Status};

const PLANES: [&str; 4] = ["K1_n2_nc", "K1_n2_c", "K2_n1_c", "K2_n1_nc"];

fn verify(space: &str, domain: String, h: f64) -> VerificationReport {
    let config = RunConfig {
        spaces: vec![space.into()],
        domain: Some(domain),
        target_h: h,
        ..RunConfig::new(Command::Verify)
    };
    run_verify(&config).unwrap().0
}

/// Chart scale that keeps the test domains inside the admissible region.
fn reach(space: &str) -> f64 {
    if space == "K1_n2_c" {
        0.3
    } else {
        0.7
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn rotating_the_domain_keeps_every_margin(
        s in 0..4usize,
        a in 0.6f64..0.9,
        b in 0.4f64..0.6,
        rot in 0.0f64..3.2,
        turn in 0.1f64..6.2,
        c in (-0.1f64..0.1, -0.1f64..0.1),
    ) {
        let space = PLANES[s];
        let k = reach(space);
        // the offset is applied before the rotation about the chart origin
        let (cx, cy) = (c.0 * k, c.1 * k);
        let d0 = format!("ellipse:{},{},{rot},{cx},{cy}", a * k, b * k);
        let d1 = format!("ellipse:{},{},{},{cx},{cy}", a * k, b * k, rot + turn);
        let r0 = verify(space, d0, 0.08);
        let r1 = verify(space, d1, 0.08);
        prop_assert_eq!(r0.checks.len(), r1.checks.len());
        for (x, y) in r0.checks.iter().zip(&r1.checks) {
            prop_assert_eq!(&x.id, &y.id);
            let d = (x.margin - y.margin).abs();
            // margins are already normalized; the floor absorbs roundoff-level margins
            prop_assert!(d <= 1e-6 * x.margin.abs() + 1e-9, "{space} {}: {} vs {}", x.id, x.margin, y.margin);
        }
        // the orthogonality premises hold on every run
        for r in [&r0, &r1] {
            for id in ["center_condition", "orthogonality[1,0]", "orthogonality[2,0]", "orthogonality[2,1]"] {
                let ch = r.check(id).unwrap();
                prop_assert!(ch.pass, "{space} {id}: {}", ch.lhs);
            }
        }
    }

    #[test]
    fn annulus_reports_never_fail(s in 0..2usize, a in 0.1f64..1.0, w in 0.3f64..1.2) {
        let space = ["K1_n3_nc", "K2_n2_nc"][s];
        let r = verify(space, format!("annulus:{a},{}", a + w), 0.03);
        for ch in &r.checks {
            prop_assert!(ch.status != Status::Fail, "{space} {}: {:?}", ch.id, ch.status);
        }
        let main = r.check("main_inequality").unwrap();
        prop_assert!(main.note.as_deref().unwrap_or("").contains("candidate-based"));
    }

    #[test]
    fn qr_rotation_is_orthogonal_and_triangularizing(q in prop::array::uniform4(-10.0f64..10.0)) {
        let q = vec![vec![q[0], q[1]], vec![q[2], q[3]]];
        let o = orthogonalize(&q);
        let a = &o.a;
        for i in 0..2 {
            for j in 0..2 {
                let dot = a[i][0] * a[j][0] + a[i][1] * a[j][1];
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-12);
            }
        }
        let aq10 = a[1][0] * q[0][0] + a[1][1] * q[1][0];
        let norm = q.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(aq10.abs() <= 1e-10 * norm);
        prop_assert!(o.lower_residual <= 1e-10);
    }
}

/// `G²(−H')` is nonincreasing on the range the argument needs, sampled on a
/// fine grid for every space with `m ≤ 16`.
#[test]
fn potential_profile_nonincreasing() {
    for space in all_spaces(16) {
        let radii: &[f64] = if space.is_compact() { &[0.3, 0.6, FRAC_PI_4] } else { &[0.3, 1.0, 2.5] };
        for &r in radii {
            let g = solve_ball(&space, r, 1e-10).unwrap().extended();
            let end = if space.is_compact() { FRAC_PI_4 } else { 3.0 * r };
            let n = 3000;
            let f = |x: f64| {
                let gv = g.eval(x);
                gv * gv * -space.curvature_trace_deriv(x).unwrap()
            };
            let mut prev = f(end / n as f64);
            let scale = prev.abs();
            for i in 2..=n {
                let x = end * i as f64 / n as f64;
                let v = f(x);
                assert!(v <= prev + 1e-10 * scale, "{space} R={r} at {x}: {v} > {prev}");
                prev = v;
            }
        }
    }
}

