use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use super::profile::{ProfileKind, RadialProfile};
use crate::geometry::Space;
use crate::ode::{self, Tolerance};
use crate::{Error, Result};

/// One separated Neumann eigenvalue of a geodesic annulus.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnnulusMode {
    /// Angular mode: 0 (radial functions) or 1 (linear coordinates `ω_i`).
    pub mode: u8,
    pub eigenvalue: f64,
    /// Multiplicity contributed to the spectrum: 1 for mode 0, `m` for mode 1.
    pub multiplicity: usize,
    /// Index of this eigenvalue within its angular mode (0-based, zero mode excluded).
    pub radial_index: usize,
    #[serde(skip_serializing)]
    pub profile: Option<RadialProfile>,
}

/// Candidate Neumann spectrum of a geodesic annulus built from angular modes 0
/// and 1 only. Every candidate is a true eigenvalue, so the `i`-th candidate
/// dominates the true `μ_i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AnnulusModes {
    pub space: Space,
    pub r_in: f64,
    pub r_out: f64,
    pub label: String,
    pub modes: Vec<AnnulusMode>,
}

pub const CANDIDATE_LABEL: &str = "candidate (modes 0,1 only)";

impl AnnulusModes {
    /// Candidate eigenvalues `μ₁ ≤ μ₂ ≤ …` repeated by multiplicity.
    pub fn candidate_spectrum(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for m in &self.modes {
            out.extend(std::iter::repeat_n(m.eigenvalue, m.multiplicity));
        }
        out
    }

    /// Riemannian volume of the annulus.
    pub fn volume(&self) -> Result<f64> {
        let outer = self.space.ball_volume(self.r_out)?;
        let inner = self.space.ball_volume(self.r_in)?;
        Ok(outer - inner)
    }
}

struct Pruefer<'a> {
    space: &'a Space,
    r_in: f64,
    r_out: f64,
    mode: u8,
    tol: Tolerance,
}

impl Pruefer<'_> {
    fn potential(&self, r: f64) -> f64 {
        if self.mode == 0 {
            0.0
        } else {
            -self.space.dh_unchecked(r)
        }
    }

    /// Modified Prüfer angle at `r_out` for `f'' + H f' + (μ − q) f = 0`,
    /// with `f = ρ sin θ`, `f'/c = ρ cos θ`, `c = √max(μ, 1)` and
    /// `θ(r_in) = π/2`. The positive rescaling leaves the crossings of
    /// multiples of `π/2` where they are for the self-adjoint angle, so
    /// `θ(r_out) = π/2 + jπ` still picks the `j`-th eigenvalue, without the
    /// huge range of `J` squeezing the angle against multiples of `π`.
    fn angle(&self, mu: f64) -> Result<f64> {
        let c = mu.max(1.0).sqrt();
        let (_, y) = ode::integrate(
            |r, th: &[f64; 1]| {
                let h = self.space.h_unchecked(r);
                let (s, co) = th[0].sin_cos();
                [c * co * co + h * s * co + (mu - self.potential(r)) / c * s * s]
            },
            self.r_in,
            [FRAC_PI_2],
            self.r_out,
            self.tol,
            &[],
            |_, _, _| true,
        )?;
        Ok(y[0])
    }

    /// Smallest `μ ≥ 0` with `θ(r_out) = target`.
    fn invert(&self, target: f64, index: usize) -> Result<f64> {
        let mut lo = 0.0;
        if self.angle(lo)? >= target {
            return Ok(lo);
        }
        let width = self.r_out - self.r_in;
        let mut hi = ((index as f64 + 1.0) * PI / width).powi(2) + 1.0;
        let mut trace = Vec::new();
        loop {
            let a = self.angle(hi)?;
            trace.push((hi, a));
            if a > target {
                break;
            }
            lo = hi;
            hi *= 2.0;
            if trace.len() > 80 {
                return Err(Error::Bracketing(format!(
                    "annulus mode {} index {index}: scan trace {trace:?}",
                    self.mode
                )));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 4e-16 * hi {
                break;
            }
            if self.angle(mid)? > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The Prüfer angle counts eigenvalues and isolates the `index`-th one
    /// between `θ = π/2 + jπ ∓ π/4`; the root itself comes from the end slope
    /// of the direct integration, which is far better conditioned when `J`
    /// varies over many orders of magnitude.
    fn eigenvalue(&self, index: usize) -> Result<f64> {
        let target = FRAC_PI_2 + index as f64 * PI;
        let mut lo = self.invert(target - FRAC_PI_4, index)?;
        let mut hi = self.invert(target + FRAC_PI_4, index)?;
        let mut f_lo = self.end_slope(lo)?;
        let f_hi = self.end_slope(hi)?;
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::Bracketing(format!(
                "annulus mode {} index {index}: end slope keeps its sign on [{lo}, {hi}]",
                self.mode
            )));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 4e-16 * hi {
                break;
            }
            let f = self.end_slope(mid)?;
            if f.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `f'(r_out)` for the profile started at `f(r_in) = 1, f'(r_in) = 0`.
    fn end_slope(&self, mu: f64) -> Result<f64> {
        let (_, y) = ode::integrate(
            |r, y: &[f64; 2]| {
                let h = self.space.h_unchecked(r);
                [y[1], -h * y[1] - (mu - self.potential(r)) * y[0]]
            },
            self.r_in,
            [1.0, 0.0],
            self.r_out,
            self.tol,
            &[],
            |_, _, _| true,
        )?;
        Ok(y[1])
    }

    fn profile(&self, mu: f64, points: usize) -> Result<(RadialProfile, f64)> {
        let stations: Vec<f64> = (1..=points)
            .map(|i| {
                if i == points {
                    self.r_out
                } else {
                    self.r_in + (self.r_out - self.r_in) * i as f64 / points as f64
                }
            })
            .collect();
        let mut grid = vec![self.r_in];
        let mut values = vec![1.0];
        let mut slopes = vec![0.0];
        let mut next = 0;
        ode::integrate(
            |r, y: &[f64; 2]| {
                let h = self.space.h_unchecked(r);
                [y[1], -h * y[1] - (mu - self.potential(r)) * y[0]]
            },
            self.r_in,
            [1.0, 0.0],
            self.r_out,
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
        let scale = values.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        values.iter_mut().for_each(|v| *v /= scale);
        slopes.iter_mut().for_each(|v| *v /= scale);
        let slope_scale = slopes.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
        let end_residual = slopes.last().unwrap().abs() / slope_scale;
        Ok((
            RadialProfile::new(ProfileKind::AnnulusMode, grid, values, Some(slopes))?,
            end_residual,
        ))
    }
}

/// Separated Neumann eigenvalues of the annulus `r_in < r < r_out` for the
/// requested angular modes (subset of `{0, 1}`), returning the `count`
/// smallest nonzero ones across modes.
///
/// Eigenvalues closer than `1e-9` relative are ordered by mode index.
pub fn solve_annulus(
    space: &Space,
    r_in: f64,
    r_out: f64,
    modes: &[u8],
    count: usize,
) -> Result<AnnulusModes> {
    if !(r_in > 0.0 && r_out > r_in && r_out.is_finite()) {
        return Err(Error::Range(format!(
            "annulus radii must satisfy 0 < r_in < r_out, got ({r_in}, {r_out})"
        )));
    }
    if space.is_compact() && r_out > FRAC_PI_4 * (1.0 + 4.0 * f64::EPSILON) {
        return Err(Error::RadiusConstraint(format!(
            "annulus outer radius {r_out} exceeds π/4 in {space}"
        )));
    }
    if modes.is_empty() || modes.iter().any(|&m| m > 1) {
        return Err(Error::InvalidArgument(
            "annulus modes must be a nonempty subset of {0, 1}".into(),
        ));
    }
    let mut found = Vec::new();
    for &mode in modes {
        let solver = Pruefer {
            space,
            r_in,
            r_out,
            mode,
            tol: Tolerance {
                rtol: 1e-12,
                atol: 1e-14,
            },
        };
        let first = if mode == 0 { 1 } else { 0 };
        for index in first..first + count {
            let mu = solver.eigenvalue(index)?;
            let (profile, residual) = solver.profile(mu, 400)?;
            if residual > 1e-6 {
                return Err(Error::Convergence(format!(
                    "annulus mode {mode} eigenvalue {mu}: |f'(r_out)|/max|f'| = {residual:e}"
                )));
            }
            found.push(AnnulusMode {
                mode,
                eigenvalue: mu,
                multiplicity: if mode == 0 { 1 } else { space.m() as usize },
                radial_index: index - first,
                profile: Some(profile),
            });
        }
    }
    found.sort_by(|a, b| {
        let tie = (a.eigenvalue - b.eigenvalue).abs() <= 1e-9 * a.eigenvalue.max(b.eigenvalue);
        if tie {
            a.mode.cmp(&b.mode)
        } else {
            a.eigenvalue.partial_cmp(&b.eigenvalue).unwrap()
        }
    });
    found.truncate(count);
    Ok(AnnulusModes {
        space: *space,
        r_in,
        r_out,
        label: CANDIDATE_LABEL.into(),
        modes: found,
    })
}
