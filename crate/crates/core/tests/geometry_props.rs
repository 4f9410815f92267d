use std::f64::consts::FRAC_PI_4;

use proptest::prelude::*;
use rank1_neumann::geometry::all_spaces;
use rank1_neumann::Space;

fn space_strategy() -> impl Strategy<Value = Space> {
    let spaces = all_spaces(16);
    (0..spaces.len()).prop_map(move |i| spaces[i])
}

fn radius_for(space: &Space, u: f64) -> f64 {
    if space.is_compact() {
        1e-3 + u * (FRAC_PI_4 - 1e-3)
    } else {
        1e-3 + u * 20.0
    }
}

proptest! {
    #[test]
    fn gradient_sum_matches_curvature_trace(space in space_strategy(), u in 0.0f64..1.0) {
        let r = radius_for(&space, u);
        let dh = space.curvature_trace_deriv(r).unwrap();
        let sum = space.gradient_sum(r).unwrap();
        prop_assert!((sum + dh).abs() <= 1e-12 * dh.abs(), "{space} r={r}: {sum} vs {}", -dh);
    }

    #[test]
    fn curvature_trace_is_log_derivative(space in space_strategy(), u in 0.05f64..0.95) {
        // interior of (0, π/2) or (0, 5], away from the endpoint singularities
        let r = if space.is_compact() { u * std::f64::consts::FRAC_PI_2 } else { 5.0 * u };
        let gap = if space.is_compact() { r.min(std::f64::consts::FRAC_PI_2 - r) } else { r };
        let d = 1e-4 * gap;
        let lj = |x: f64| space.density(x).unwrap().ln();
        let fd = (8.0 * (lj(r + d) - lj(r - d)) - (lj(r + 2.0 * d) - lj(r - 2.0 * d))) / (12.0 * d);
        let h = space.curvature_trace(r).unwrap();
        prop_assert!((fd - h).abs() <= 1e-8 * h.abs().max(1.0), "{space} r={r}: {fd} vs {h}");
    }

    #[test]
    fn gradient_bound_closes(space in space_strategy(), u in 0.0f64..1.0) {
        let r = radius_for(&space, u);
        let c = space.theorem_count() as f64;
        let lhs = c * space.gradient_bound(r).unwrap();
        let rhs = space.gradient_sum(r).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{space} r={r}: {lhs} > {rhs}");
    }

    #[test]
    fn volume_radius_round_trip(space in space_strategy(), u in 0.01f64..1.0) {
        let r = if space.is_compact() { u * FRAC_PI_4 } else { 3.0 * u };
        let v = space.ball_volume(r).unwrap();
        let back = space.radius_from_volume(v).unwrap();
        prop_assert!((back - r).abs() <= 1e-10 * r.max(1.0));
    }
}

/// The case table for `l` and `p`, enumerated from the definitions with
/// `m = k·n` and written without the shortcuts used in the library.
#[test]
fn mode_constants_match_case_table() {
    let mut seen = 0;
    for (k, max_n) in [(1u32, 16u32), (2, 8), (4, 4), (8, 2)] {
        for n in 1..=max_n {
            let m = (k * n) as usize;
            if m < 2 {
                continue;
            }
            let l = if k == 1 || k as usize == m {
                m - 1
            } else {
                ((m as f64 - k as f64 + 1.0) / 2.0).floor() as usize
            };
            let p = if (k as usize) < m { k as usize * (n as usize - 1) } else { m - 1 };
            for compact in [true, false] {
                let Ok(space) = Space::new(k, n, compact) else { continue };
                let c = space.mode_constants();
                assert_eq!((c.l, c.p), (l, p), "{space}");
                assert_eq!(space.theorem_count(), if compact { l } else { p });
                seen += 1;
            }
        }
    }
    assert!(seen >= 50, "only {seen} spaces enumerated");
}

#[test]
fn space_strings_round_trip() {
    for s in all_spaces(16) {
        let parsed: Space = s.to_string().parse().unwrap();
        assert_eq!(parsed, s);
    }
    for bad in ["K3_n2_c", "K1_n0_nc", "K8_n3_c", "nonsense", "K2_n2"] {
        assert!(bad.parse::<Space>().is_err(), "{bad}");
    }
}
