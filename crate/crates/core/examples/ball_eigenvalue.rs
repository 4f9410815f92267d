//! First nonzero Neumann eigenvalue of geodesic balls by shooting, across
//! the model spaces, with the profile written as CSV.
//!
//! cargo run --release --example ball_eigenvalue -- [out.csv]

use rank1_neumann::radial::solve_ball;
use rank1_neumann::Space;

fn main() -> rank1_neumann::Result<()> {
    let cases = [
        ("K1_n2_nc", 1.0),
        ("K1_n3_nc", 1.0),
        ("K1_n2_c", 0.7),
        ("K2_n1_c", std::f64::consts::FRAC_PI_4),
        ("K2_n2_c", 0.5),
        ("K4_n2_nc", 2.0),
    ];
    println!("{:<10} {:>8} {:>16} {:>10}", "space", "R", "mu1", "mu1*R^2");
    for (name, r) in cases {
        let space: Space = name.parse()?;
        let ball = solve_ball(&space, r, 1e-11)?;
        println!("{:<10} {:>8.4} {:>16.10} {:>10.5}", name, r, ball.mu1, ball.mu1 * r * r);
    }

    let ball = solve_ball(&Space::hyperbolic_plane(), 1.0, 1e-11)?;
    if let Some(path) = std::env::args().nth(1) {
        ball.g.write_csv(path.as_ref())?;
        println!("profile of the H² unit ball written to {path}");
    }
    Ok(())
}
