//! Shooting against the finite-difference Rayleigh discretization: the
//! relative gap shrinks at second order and Richardson extrapolation removes
//! most of it.

use rank1_neumann::radial::{solve_ball, solve_ball_rayleigh};
use rank1_neumann::Space;

fn main() -> rank1_neumann::Result<()> {
    for (name, r) in [("K1_n2_nc", 1.0), ("K2_n1_c", 0.7), ("K2_n2_nc", 1.5)] {
        let space: Space = name.parse()?;
        let exact = solve_ball(&space, r, 1e-12)?.mu1;
        println!("{name} R={r}: shooting mu1 = {exact:.12}");
        let mut prev: Option<f64> = None;
        let mut last = [0.0; 2];
        for n in [500, 1000, 2000] {
            let fd = solve_ball_rayleigh(&space, r, n)?.mu1;
            let gap = (fd - exact).abs() / exact;
            let order = prev.map(|p| (p / gap).log2());
            println!("  N={n:>5}  fd={fd:.12}  gap={gap:.3e}  order={}", order.map_or("-".into(), |o| format!("{o:.3}")));
            prev = Some(gap);
            last = [last[1], fd];
        }
        let extrap = (4.0 * last[1] - last[0]) / 3.0;
        println!("  extrapolated gap {:.3e}", (extrap - exact).abs() / exact);
    }
    Ok(())
}
