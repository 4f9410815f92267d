use std::f64::consts::FRAC_PI_4;

use proptest::prelude::*;
use rank1_neumann::geometry::all_spaces;
use rank1_neumann::radial::{sign_function, solve_annulus, solve_ball};
use rank1_neumann::Space;

fn space_strategy(compact: Option<bool>) -> impl Strategy<Value = Space> {
    let spaces: Vec<Space> = all_spaces(16)
        .into_iter()
        .filter(|s| compact.is_none_or(|c| s.is_compact() == c))
        .collect();
    (0..spaces.len()).prop_map(move |i| spaces[i])
}

fn radius_for(space: &Space, u: f64) -> f64 {
    if space.is_compact() {
        0.02 + u * (FRAC_PI_4 - 0.02)
    } else {
        0.02 + u * 3.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profile_is_positive_and_increasing(space in space_strategy(None), u in 0.0f64..1.0) {
        let r = radius_for(&space, u);
        let b = solve_ball(&space, r, 1e-10).unwrap();
        prop_assert_eq!(b.g.values[0], 0.0);
        prop_assert_eq!(b.g.slopes[0], 1.0);
        prop_assert!(b.mu1 > 0.0);
        let n = b.g.grid.len();
        prop_assert!(b.g.values[1..].iter().all(|&v| v > 0.0));
        prop_assert!(b.g.slopes[..n - 1].iter().all(|&s| s > 0.0));
        prop_assert!(b.g.slopes[n - 1].abs() <= 1e-10 * b.g.max_abs_slope());
    }

    #[test]
    fn sign_function_never_positive(space in space_strategy(None), u in 0.0f64..1.0) {
        let r = radius_for(&space, u);
        let b = solve_ball(&space, r, 1e-10).unwrap();
        let s = sign_function(&b);
        prop_assert!(s.max_value <= 1e-8 * s.scale, "{space} R={r}: {} at {}", s.max_value, s.argmax);
    }

    #[test]
    fn compact_balls_meet_lower_bound(space in space_strategy(Some(true)), u in 0.0f64..1.0) {
        let r = 0.01 + u * (FRAC_PI_4 - 0.01);
        let b = solve_ball(&space, r, 1e-10).unwrap();
        let bound = 2.0 * (space.m() + space.k()) as f64;
        prop_assert!(b.mu1 >= bound - 1e-6, "{space} R={r}: {} < {bound}", b.mu1);
    }

    #[test]
    fn first_eigenvalue_decreases_with_radius(space in space_strategy(None)) {
        let top = if space.is_compact() { FRAC_PI_4 } else { 3.0 };
        let mut prev = f64::INFINITY;
        for i in 1..=12 {
            let r = top * i as f64 / 12.0;
            let mu = solve_ball(&space, r, 1e-10).unwrap().mu1;
            prop_assert!(mu < prev, "{space} R={r}: {mu} ≥ {prev}");
            prev = mu;
        }
    }

    #[test]
    fn annulus_spectrum_ascending(space in space_strategy(Some(false)), a in 0.1f64..1.0, w in 0.2f64..1.5) {
        let modes = solve_annulus(&space, a, a + w, &[0, 1], 4).unwrap();
        let spec = modes.candidate_spectrum();
        prop_assert!(!spec.is_empty());
        prop_assert!(spec[0] > 0.0);
        prop_assert!(spec.windows(2).all(|p| p[0] <= p[1]), "{spec:?}");
        for m in &modes.modes {
            if let Some(p) = &m.profile {
                // the residual bound the solver itself enforces before returning a mode
                let scale = p.max_abs_slope();
                let end = p.slopes.last().unwrap().abs() / scale;
                prop_assert!(p.slopes[0] == 0.0 && end <= 1e-6, "{space} ({a},{}) mode {}: {end:e}", a + w, m.mode);
            }
        }
    }
}

/// `j`-th eigenvalue (0-based) of the symmetric tridiagonal matrix by Sturm counts.
fn sturm_eigenvalue(d: &[f64], e: &[f64], j: usize) -> f64 {
    let count_below = |x: f64| {
        let mut q = d[0] - x;
        let mut n = (q < 0.0) as usize;
        for i in 1..d.len() {
            let q_prev = if q == 0.0 { 1e-300 } else { q };
            q = d[i] - x - e[i - 1] * e[i - 1] / q_prev;
            n += (q < 0.0) as usize;
        }
        n
    };
    let bound = d.iter().zip(e.iter().chain([&0.0])).map(|(a, b)| a.abs() + 2.0 * b.abs()).fold(0.0, f64::max);
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mode-0 annulus problem `−(J f')' = μ J f` with Neumann ends, P1 stiffness
/// and lumped mass, symmetrised.
fn annulus_fd(space: &Space, a: f64, b: f64, n: usize, j: usize) -> f64 {
    let h = (b - a) / n as f64;
    let jm: Vec<f64> = (0..n).map(|i| space.density(a + (i as f64 + 0.5) * h).unwrap()).collect();
    let mass: Vec<f64> = (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            w * h * space.density(a + i as f64 * h).unwrap()
        })
        .collect();
    let mut d = vec![0.0; n + 1];
    let mut e = vec![0.0; n];
    for i in 0..n {
        let k = jm[i] / h;
        d[i] += k;
        d[i + 1] += k;
        e[i] = -k / (mass[i] * mass[i + 1]).sqrt();
    }
    for i in 0..=n {
        d[i] /= mass[i];
    }
    sturm_eigenvalue(&d, &e, j)
}

#[test]
fn wide_density_range_annulus_matches_difference_oracle() {
    // J spans several decades across this annulus in a 16-dimensional space
    let space = Space::new(8, 2, false).unwrap();
    let (a, b) = (0.7558691174265851, 0.7558691174265851 + 0.7240948449655303);
    let modes = solve_annulus(&space, a, b, &[0], 2).unwrap();
    let coarse = annulus_fd(&space, a, b, 2000, 1);
    let fine = annulus_fd(&space, a, b, 4000, 1);
    let oracle = fine + (fine - coarse) / 3.0;
    let mu = modes.modes[0].eigenvalue;
    assert!((mu - oracle).abs() < 1e-6 * oracle, "{mu} vs {oracle}");
}
