use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::profile::{ProfileKind, RadialProfile};
use crate::geometry::Space;
use crate::ode::{self, Tolerance};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverTag {
    Shooting,
    RayleighFd,
}

/// First nonzero Neumann eigenvalue of a geodesic ball and its radial
/// eigenfunction, normalized by `g'(0) = 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BallEig {
    pub space: Space,
    #[serde(rename = "R")]
    pub radius: f64,
    pub mu1: f64,
    pub solver: SolverTag,
    pub tol: f64,
    pub grid_size: usize,
    #[serde(skip_serializing, default = "empty_profile")]
    pub g: RadialProfile,
}

fn empty_profile() -> RadialProfile {
    RadialProfile {
        kind: ProfileKind::BallEigenfunction,
        grid: vec![],
        values: vec![],
        slopes: vec![],
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BallOptions {
    /// Terminal condition tolerance `|g'(R)| < tol·max|g'|`.
    pub tol: f64,
    /// Number of uniform intervals on which `g` is recorded.
    pub grid_size: usize,
}

impl Default for BallOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            grid_size: 2000,
        }
    }
}

/// Shooting solution of the ball problem with default grid.
pub fn solve_ball(space: &Space, radius: f64, tol: f64) -> Result<BallEig> {
    solve_ball_with(
        space,
        radius,
        BallOptions {
            tol,
            ..BallOptions::default()
        },
    )
}

pub(crate) fn check_ball_radius(space: &Space, radius: f64) -> Result<()> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::Range(format!("ball radius R={radius} must be positive")));
    }
    if space.is_compact() && radius > FRAC_PI_4 * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::RadiusConstraint(format!(
            "R={radius} exceeds π/4 in compact space {space}"
        )));
    }
    Ok(())
}

/// Approximate `μ R²` for the flat `m`-ball, used only to start the bracket scan.
fn euclidean_estimate(m: u32) -> f64 {
    // j'_{ν,1} ≈ ν + 0.8086 ν^{1/3} + 0.0725 ν^{-1/3}, ν = m/2
    let nu = m as f64 / 2.0;
    let j = nu + 0.8086165 * nu.cbrt() + 0.072490 / nu.cbrt();
    j * j
}

struct Shooter<'a> {
    space: &'a Space,
    radius: f64,
    r0: f64,
    tol: Tolerance,
}

impl<'a> Shooter<'a> {
    fn new(space: &'a Space, radius: f64, tol: f64) -> Self {
        Self {
            space,
            radius,
            r0: 1e-6 * radius.min(1.0),
            tol: Tolerance {
                rtol: (0.1 * tol).clamp(1e-13, 1e-10),
                atol: 1e-13 * radius,
            },
        }
    }

    /// Two-term Frobenius start `g = r + c₃ r³`, `c₃ = -(μ + 2h₁)/(2(m+2))`
    /// where `H = (m-1)/r + h₁ r + O(r³)`.
    fn start(&self, mu: f64) -> [f64; 2] {
        let m = self.space.m() as f64;
        let c3 = -(mu + 2.0 * self.space.h_series_linear()) / (2.0 * (m + 2.0));
        let r = self.r0;
        [r + c3 * r * r * r, 1.0 + 3.0 * c3 * r * r]
    }

    fn rhs(&self, mu: f64) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        move |r, y| {
            let h = self.space.h_unchecked(r);
            let dh = self.space.dh_unchecked(r);
            [y[1], -h * y[1] - (mu + dh) * y[0]]
        }
    }

    /// `true` iff `μ < μ₁`: `g` stays positive on `(0, R]` and `g'(R) > 0`.
    fn below(&self, mu: f64) -> Result<(bool, f64)> {
        let mut positive = true;
        let (_, y) = ode::integrate(
            self.rhs(mu),
            self.r0,
            self.start(mu),
            self.radius,
            self.tol,
            &[],
            |_, y, _| {
                positive = y[0] > 0.0;
                positive
            },
        )?;
        Ok((positive && y[1] > 0.0, y[1]))
    }

    fn profile(&self, mu: f64, grid_size: usize) -> Result<RadialProfile> {
        let stations: Vec<f64> = (1..=grid_size)
            .map(|i| {
                if i == grid_size {
                    self.radius
                } else {
                    self.radius * i as f64 / grid_size as f64
                }
            })
            .collect();
        let mut grid = vec![0.0];
        let mut values = vec![0.0];
        let mut slopes = vec![1.0];
        let mut next = 0usize;
        ode::integrate(
            self.rhs(mu),
            self.r0,
            self.start(mu),
            self.radius,
            self.tol,
            &stations,
            |r, y, _| {
                if next < stations.len() && r == stations[next] {
                    grid.push(r);
                    values.push(y[0]);
                    slopes.push(y[1]);
                    next += 1;
                }
                true
            },
        )?;
        RadialProfile::new(ProfileKind::BallEigenfunction, grid, values, Some(slopes))
    }
}

/// Shooting solution of the ball problem.
///
/// `μ` is located by bisection on the monotone predicate "`g > 0` on `(0,R]`
/// and `g'(R) > 0`", which holds exactly for `μ < μ₁`. The bracket scan starts
/// from the flat-ball estimate and doubles.
pub fn solve_ball_with(space: &Space, radius: f64, opts: BallOptions) -> Result<BallEig> {
    check_ball_radius(space, radius)?;
    if !(1e-12..=1e-4).contains(&opts.tol) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {} outside [1e-12, 1e-4]",
            opts.tol
        )));
    }
    if opts.grid_size < 10 {
        return Err(Error::InvalidArgument("grid_size must be at least 10".into()));
    }
    let shooter = Shooter::new(space, radius, opts.tol);

    let mut trace = Vec::new();
    let (ok0, d0) = shooter.below(0.0)?;
    trace.push((0.0, d0));
    if !ok0 {
        return Err(Error::Bracketing(format!(
            "g'(R) not positive at μ=0 for {space}, R={radius}: trace {trace:?}"
        )));
    }
    let mut lo = 0.0;
    let mut hi = 0.5 * euclidean_estimate(space.m()) / (radius * radius);
    loop {
        let (ok, d) = shooter.below(hi)?;
        trace.push((hi, d));
        if !ok {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if trace.len() > 80 {
            return Err(Error::Bracketing(format!(
                "no sign change of g'(R) for {space}, R={radius}: scan trace {trace:?}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2e-16 * hi {
            break;
        }
        if shooter.below(mid)?.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu1 = 0.5 * (lo + hi);
    let g = shooter.profile(mu1, opts.grid_size)?;

    let scale = g.max_abs_slope();
    let end_slope = *g.slopes.last().unwrap();
    if end_slope.abs() >= opts.tol * scale {
        return Err(Error::Convergence(format!(
            "|g'(R)| = {:e} not below {:e}·max|g'| for {space}, R={radius}",
            end_slope.abs(),
            opts.tol
        )));
    }
    let n = g.grid.len();
    if g.values[1..].iter().any(|&v| v <= 0.0) || g.slopes[..n - 1].iter().any(|&d| d <= 0.0) {
        return Err(Error::Convergence(format!(
            "eigenfunction for {space}, R={radius} is not positive and increasing on the grid"
        )));
    }
    Ok(BallEig {
        space: *space,
        radius,
        mu1,
        solver: SolverTag::Shooting,
        tol: opts.tol,
        grid_size: opts.grid_size,
        g,
    })
}

impl BallEig {
    /// `g` continued by the constant `g(R)` beyond `R`.
    pub fn extended(&self) -> RadialProfile {
        extend_g(self)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The profile `G(r) = g(min(r, R))`.
pub fn extend_g(ball: &BallEig) -> RadialProfile {
    let mut g = ball.g.clone();
    g.kind = ProfileKind::Extended;
    *g.slopes.last_mut().unwrap() = 0.0;
    g
}

/// Which monotone quotient the sign function certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignKind {
    /// `s = g' - 2cot(2r) g`: `G/(sin r cos r)` nonincreasing (compact, k ≥ 2).
    CompactSinCos,
    /// `s = g' - cot(r) g`: `G/sin r` nonincreasing (round sphere).
    CompactSin,
    /// `s = g' - coth(r) g`: `G/sinh r` nonincreasing (noncompact).
    NoncompactSinh,
}

impl SignKind {
    pub fn for_space(space: &Space) -> Self {
        match (space.is_compact(), space.k()) {
            (true, 1) => SignKind::CompactSin,
            (true, _) => SignKind::CompactSinCos,
            (false, _) => SignKind::NoncompactSinh,
        }
    }

    fn coefficient(&self, r: f64) -> f64 {
        match self {
            SignKind::CompactSinCos => 2.0 / (2.0 * r).tan(),
            SignKind::CompactSin => 1.0 / r.tan(),
            SignKind::NoncompactSinh => 1.0 / r.tanh(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignReport {
    pub kind: SignKind,
    pub profile: RadialProfile,
    /// Largest sampled value of `s` on the grid (excluding `r = 0`).
    pub max_value: f64,
    pub argmax: f64,
    /// `max |g'|`, the natural scale of `s`.
    pub scale: f64,
}

/// Samples the sign function on the solver grid (excluding `r = 0`).
pub fn sign_function(ball: &BallEig) -> SignReport {
    let kind = SignKind::for_space(&ball.space);
    let g = &ball.g;
    let mut grid = Vec::with_capacity(g.grid.len());
    let mut values = Vec::with_capacity(g.grid.len());
    for i in 1..g.grid.len() {
        let r = g.grid[i];
        grid.push(r);
        values.push(g.slopes[i] - kind.coefficient(r) * g.values[i]);
    }
    let (mut max_value, mut argmax) = (f64::NEG_INFINITY, 0.0);
    for (&r, &v) in grid.iter().zip(&values) {
        if v > max_value {
            max_value = v;
            argmax = r;
        }
    }
    let profile = RadialProfile::new(ProfileKind::Sign, grid, values, None)
        .expect("sign samples inherit a valid grid");
    SignReport {
        kind,
        profile,
        max_value,
        argmax,
        scale: g.max_abs_slope(),
    }
}
