use super::ball::{check_ball_radius, BallEig, SolverTag};
use super::profile::{ProfileKind, RadialProfile};
use crate::geometry::Space;
use crate::{Error, Result};

/// Finite-difference discretization of the radial Rayleigh quotient
///
/// ```text
/// Q(φ) = ∫₀^R (φ'² − H' φ²) J dr / ∫₀^R φ² J dr,   φ(0) = 0,
/// ```
///
/// on a uniform grid of `intervals` cells: first differences for `φ'` with
/// `J` at cell midpoints, lumped (trapezoid-type) node weights built from the
/// midpoint values of `J`, and `φ₀ = 0` removed from the unknowns. The
/// smallest eigenvalue of the resulting symmetric tridiagonal pencil is found
/// by Sturm-sequence bisection, independently of the shooting solver.
pub fn solve_ball_rayleigh(space: &Space, radius: f64, intervals: usize) -> Result<BallEig> {
    check_ball_radius(space, radius)?;
    if intervals < 100 {
        return Err(Error::InvalidArgument(format!(
            "Rayleigh discretization needs at least 100 intervals, got {intervals}"
        )));
    }
    let n = intervals;
    let h = radius / n as f64;
    let node = |i: usize| if i == n { radius } else { i as f64 * h };
    let mid_density: Vec<f64> = (0..n)
        .map(|i| space.density_unchecked((i as f64 + 0.5) * h))
        .collect();

    // unknowns φ_1..φ_n (index j = i-1)
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut weight = vec![0.0; n];
    for j in 0..n {
        let i = j + 1;
        let left = mid_density[i - 1];
        let right = if i < n { mid_density[i] } else { 0.0 };
        weight[j] = 0.5 * h * (left + right);
        diag[j] = (left + right) / h - space.dh_unchecked(node(i)) * weight[j];
        if i < n {
            off[j] = -right / h;
        }
    }
    // symmetric scaling W^{-1/2} A W^{-1/2}
    let inv_sqrt: Vec<f64> = weight.iter().map(|w| 1.0 / w.sqrt()).collect();
    let d: Vec<f64> = diag.iter().zip(&inv_sqrt).map(|(a, s)| a * s * s).collect();
    let e: Vec<f64> = off
        .iter()
        .enumerate()
        .map(|(j, a)| a * inv_sqrt[j] * inv_sqrt[j + 1])
        .collect();

    let mu1 = smallest_tridiagonal_eigenvalue(&d, &e);
    let y = inverse_iteration(&d, &e, mu1);
    let mut phi: Vec<f64> = y.iter().zip(&inv_sqrt).map(|(v, s)| v * s).collect();
    // normalize φ'(0) = 1
    let scale = h / phi[0];
    phi.iter_mut().for_each(|v| *v *= scale);

    let mut grid = Vec::with_capacity(n + 1);
    let mut values = Vec::with_capacity(n + 1);
    grid.push(0.0);
    values.push(0.0);
    for (j, v) in phi.into_iter().enumerate() {
        grid.push(node(j + 1));
        values.push(v);
    }
    let g = RadialProfile::new(ProfileKind::BallEigenfunction, grid, values, None)?;
    Ok(BallEig {
        space: *space,
        radius,
        mu1,
        solver: SolverTag::RayleighFd,
        tol: 0.0,
        grid_size: n,
        g,
    })
}

/// Number of eigenvalues of the symmetric tridiagonal matrix `(d, e)` below `x`.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let e2 = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
pub fn smallest_tridiagonal_eigenvalue(d: &[f64], e: &[f64]) -> f64 {
    let n = d.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let radius = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - radius);
        hi = hi.max(d[i] + radius);
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn inverse_iteration(d: &[f64], e: &[f64], shift: f64) -> Vec<f64> {
    let n = d.len();
    let delta = 1e-10 * shift.abs().max(1.0);
    let mut x = vec![1.0; n];
    for _ in 0..4 {
        // Thomas solve of (T - (shift - delta) I) y = x
        let s = shift - delta;
        let mut c = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut denom = d[0] - s;
        c[0] = if n > 1 { e[0] / denom } else { 0.0 };
        z[0] = x[0] / denom;
        for i in 1..n {
            denom = d[i] - s - e[i - 1] * c[i - 1];
            if i + 1 < n {
                c[i] = e[i] / denom;
            }
            z[i] = (x[i] - e[i - 1] * z[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            z[i] -= c[i] * z[i + 1];
        }
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = z.into_iter().map(|v| v / norm).collect();
    }
    if x[0] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x
}
