//! Closed-form geometry of the rank-1 symmetric spaces in geodesic polar
//! coordinates about a point.
//!
//! Normalization: the compact spaces have sectional curvature in `[1, 4]`
//! (so `J(r) = sin^{m-1} r cos^{k-1} r` on `(0, π/2)`), the noncompact duals
//! have curvature in `[-4, -1]`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// A rank-1 symmetric space: the projective space over `R`, `C`, `H` or `Ca`
/// (`field_dim` 1, 2, 4, 8) of dimension `quat_dim` over that field, or its
/// hyperbolic dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Space {
    field_dim: u32,
    quat_dim: u32,
    compact: bool,
}

/// Number of eigenvalues entering the compact (`l`) and noncompact (`p`)
/// inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeConstants {
    pub l: usize,
    pub p: usize,
}

impl Space {
    pub fn new(field_dim: u32, quat_dim: u32, compact: bool) -> Result<Self> {
        if !matches!(field_dim, 1 | 2 | 4 | 8) {
            return Err(Error::InvalidSpace(format!(
                "field dimension k={field_dim} is not one of 1, 2, 4, 8"
            )));
        }
        if quat_dim == 0 {
            return Err(Error::InvalidSpace("n must be positive".into()));
        }
        if field_dim == 8 && quat_dim != 2 {
            return Err(Error::InvalidSpace(format!(
                "k=8 only exists as the Cayley plane (n=2), got n={quat_dim}"
            )));
        }
        if field_dim * quat_dim < 2 {
            return Err(Error::InvalidSpace(format!(
                "real dimension m={} must be at least 2",
                field_dim * quat_dim
            )));
        }
        Ok(Self {
            field_dim,
            quat_dim,
            compact,
        })
    }

    /// Real hyperbolic plane.
    pub fn hyperbolic_plane() -> Self {
        Self::new(1, 2, false).unwrap()
    }

    /// Round unit 2-sphere.
    pub fn sphere2() -> Self {
        Self::new(1, 2, true).unwrap()
    }

    /// `CP¹`, a round sphere of curvature 4.
    pub fn cp1() -> Self {
        Self::new(2, 1, true).unwrap()
    }

    /// `CH¹`, a hyperbolic plane of curvature -4.
    pub fn ch1() -> Self {
        Self::new(2, 1, false).unwrap()
    }

    pub fn k(&self) -> u32 {
        self.field_dim
    }

    pub fn n(&self) -> u32 {
        self.quat_dim
    }

    pub fn m(&self) -> u32 {
        self.field_dim * self.quat_dim
    }

    pub fn is_compact(&self) -> bool {
        self.compact
    }

    /// Largest admissible ball radius: `π/4` for compact spaces.
    pub fn max_ball_radius(&self) -> f64 {
        if self.compact {
            FRAC_PI_4
        } else {
            f64::INFINITY
        }
    }

    /// The `l` and `p` constants.
    pub fn mode_constants(&self) -> ModeConstants {
        let (k, m) = (self.k() as usize, self.m() as usize);
        let l = if k == 1 || k == m { m - 1 } else { (m - k + 1) / 2 };
        let p = if k < m { k * (m / k - 1) } else { m - 1 };
        ModeConstants { l, p }
    }

    /// The constant entering the theorem for this space: `l` if compact, `p` otherwise.
    pub fn theorem_count(&self) -> usize {
        let c = self.mode_constants();
        if self.compact {
            c.l
        } else {
            c.p
        }
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        let ok = if self.compact {
            r > 0.0 && r < FRAC_PI_2
        } else {
            r > 0.0 && r.is_finite()
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Range(format!(
                "radius r={r} outside the admissible domain of {self}"
            )))
        }
    }

    // (sin r, cos r) or (sinh r, cosh r)
    #[inline]
    fn sc(&self, r: f64) -> (f64, f64) {
        if self.compact {
            r.sin_cos()
        } else {
            (r.sinh(), r.cosh())
        }
    }

    /// Riemannian density `J(r)` of geodesic polar coordinates.
    pub fn density(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.density_unchecked(r))
    }

    /// `J'(r)/J(r)`, the mean curvature trace of the geodesic sphere of radius `r`.
    pub fn curvature_trace(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.h_unchecked(r))
    }

    /// `H'(r)`; its negative is the first nonzero eigenvalue of the geodesic sphere.
    pub fn curvature_trace_deriv(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        Ok(self.dh_unchecked(r))
    }

    /// Closed-form `Σ_i |∇^{S_r} ω_i|²` from the sphere's eigenfunction decomposition.
    pub fn gradient_sum(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        let (s, c) = self.sc(r);
        let (m, k) = (self.m() as f64, self.k() as f64);
        Ok((m - k) / (s * s) + (k - 1.0) / (s * s * c * c))
    }

    /// Worst-case single-coordinate `|∇^{S_r} ω_i|²`.
    pub fn gradient_bound(&self, r: f64) -> Result<f64> {
        if self.compact && !(r > 0.0 && r <= FRAC_PI_4) {
            return Err(Error::Range(format!(
                "radius r={r} outside (0, π/4] for the gradient bound on {self}"
            )));
        }
        self.check_radius(r)?;
        let (s, c) = self.sc(r);
        let (k, m) = (self.k(), self.m());
        let edge = if self.compact { k != 1 } else { k == m };
        Ok(if edge {
            1.0 / (s * s * c * c)
        } else {
            1.0 / (s * s)
        })
    }

    #[inline]
    pub(crate) fn density_unchecked(&self, r: f64) -> f64 {
        let (s, c) = self.sc(r);
        s.powi(self.m() as i32 - 1) * c.powi(self.k() as i32 - 1)
    }

    #[inline]
    pub(crate) fn h_unchecked(&self, r: f64) -> f64 {
        let (m, k) = (self.m() as f64, self.k() as f64);
        let (s, c) = self.sc(r);
        if self.compact {
            (m - 1.0) * c / s - (k - 1.0) * s / c
        } else {
            (m - 1.0) * c / s + (k - 1.0) * s / c
        }
    }

    #[inline]
    pub(crate) fn dh_unchecked(&self, r: f64) -> f64 {
        let (m, k) = (self.m() as f64, self.k() as f64);
        let (s, c) = self.sc(r);
        if self.compact {
            -(m - 1.0) / (s * s) - (k - 1.0) / (c * c)
        } else {
            // -(m-1)/s² + (k-1)/c² without the cancellation at large r
            -(m - k) / (s * s) - (k - 1.0) / (s * s * c * c)
        }
    }

    /// Coefficient `h₁` in `H(r) = (m-1)/r + h₁ r + O(r³)`.
    pub(crate) fn h_series_linear(&self) -> f64 {
        let (m, k) = (self.m() as f64, self.k() as f64);
        let h1 = (m - 1.0) / 3.0 + (k - 1.0);
        if self.compact {
            -h1
        } else {
            h1
        }
    }

    /// Volume of the geodesic ball of radius `radius`.
    pub fn ball_volume(&self, radius: f64) -> Result<f64> {
        if !(radius > 0.0) || radius > self.max_ball_radius() {
            return Err(Error::Range(format!(
                "ball radius R={radius} not admissible in {self}"
            )));
        }
        Ok(unit_sphere_area(self.m()) * self.radial_integral(radius))
    }

    fn radial_integral(&self, radius: f64) -> f64 {
        let rule = GaussLegendre::new(20);
        let pieces = ((radius / 0.05).ceil() as usize).clamp(4, 4000);
        rule.integrate_composite(0.0, radius, pieces, |r| self.density_unchecked(r))
    }

    /// Radius of the geodesic ball with volume `volume` (bisection on the
    /// monotone volume function).
    pub fn radius_from_volume(&self, volume: f64) -> Result<f64> {
        if !(volume > 0.0) || !volume.is_finite() {
            return Err(Error::Range(format!("volume V={volume} must be positive")));
        }
        let area = unit_sphere_area(self.m());
        let target = volume / area;
        let mut hi = if self.compact {
            let vmax = self.radial_integral(FRAC_PI_4);
            if target > vmax * (1.0 + 1e-14) {
                return Err(Error::RadiusConstraint(format!(
                    "volume {volume} exceeds the volume {} of the π/4 ball in {self}",
                    vmax * area
                )));
            }
            FRAC_PI_4
        } else {
            let mut hi = 1.0;
            while self.radial_integral(hi) < target {
                hi *= 2.0;
                if hi > 700.0 {
                    return Err(Error::Range(format!("volume {volume} too large")));
                }
            }
            hi
        };
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.radial_integral(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// `Vol(S^{d-1})` for the unit sphere in `R^d`.
pub fn unit_sphere_area(d: u32) -> f64 {
    // 2π^{d/2}/Γ(d/2) via recurrence A_d = 2π/(d-2) A_{d-2}
    let mut area = if d % 2 == 0 { 2.0 * PI } else { 2.0 };
    let mut j = if d % 2 == 0 { 2 } else { 1 };
    while j < d {
        area *= 2.0 * PI / j as f64;
        j += 2;
    }
    area
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K{}_n{}_{}",
            self.field_dim,
            self.quat_dim,
            if self.compact { "c" } else { "nc" }
        )
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpace(format!("cannot parse space string {s:?}"));
        let mut parts = s.split('_');
        let k = parts
            .next()
            .and_then(|p| p.strip_prefix('K'))
            .and_then(|p| p.parse().ok())
            .ok_or_else(bad)?;
        let n = parts
            .next()
            .and_then(|p| p.strip_prefix('n'))
            .and_then(|p| p.parse().ok())
            .ok_or_else(bad)?;
        let compact = match parts.next() {
            Some("c") => true,
            Some("nc") => false,
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Space::new(k, n, compact)
    }
}

impl TryFrom<String> for Space {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Space> for String {
    fn from(s: Space) -> String {
        s.to_string()
    }
}

/// Every admissible `(k, n)` with `m ≤ max_m`, in both compact and noncompact form.
pub fn all_spaces(max_m: u32) -> Vec<Space> {
    let mut out = Vec::new();
    for compact in [true, false] {
        for k in [1u32, 2, 4, 8] {
            for n in 1..=max_m {
                if k * n > max_m {
                    break;
                }
                if let Ok(s) = Space::new(k, n, compact) {
                    out.push(s);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn density_examples() {
        let s = Space::new(1, 2, true).unwrap();
        assert!(close(s.density(FRAC_PI_2 - 1e-12).unwrap(), 1.0, 1e-12));
        let cp1 = Space::cp1();
        assert!(close(cp1.density(FRAC_PI_4).unwrap(), 0.5, 1e-15));
        let h3 = Space::new(1, 3, false).unwrap();
        assert!(close(h3.density(1.0).unwrap(), 1f64.sinh().powi(2), 1e-15));
        assert!(close(h3.density(1.0).unwrap(), 1.381097845541816, 1e-12));
    }

    #[test]
    fn density_domain_errors() {
        let cp2 = Space::new(2, 2, true).unwrap();
        assert!(matches!(cp2.density(FRAC_PI_2), Err(Error::Range(_))));
        assert!(matches!(cp2.density(0.0), Err(Error::Range(_))));
        assert!(matches!(
            Space::hyperbolic_plane().density(-1.0),
            Err(Error::Range(msg)) if msg.contains("-1")
        ));
    }

    #[test]
    fn curvature_examples() {
        assert!(close(Space::sphere2().curvature_trace(FRAC_PI_4).unwrap(), 1.0, 1e-15));
        let cp2 = Space::new(2, 2, true).unwrap();
        assert!(close(-cp2.curvature_trace_deriv(FRAC_PI_4).unwrap(), 8.0, 1e-14));
        for s in all_spaces(16) {
            let r = 1e-7;
            let hr = s.curvature_trace(r).unwrap() * r;
            assert!(close(hr, (s.m() - 1) as f64, 1e-10), "{s}: {hr}");
        }
    }

    #[test]
    fn mode_constant_examples() {
        let c = Space::new(1, 5, true).unwrap().mode_constants();
        assert_eq!((c.l, c.p), (4, 4));
        let c = Space::new(2, 2, true).unwrap().mode_constants();
        assert_eq!((c.l, c.p), (1, 2));
        let c = Space::cp1().mode_constants();
        assert_eq!((c.l, c.p), (1, 1));
        let c = Space::new(8, 2, false).unwrap().mode_constants();
        assert_eq!((c.l, c.p), (4, 8));
    }

    #[test]
    fn mode_constants_match_case_table() {
        // table written out independently of the closed form above
        for s in all_spaces(16) {
            let (k, n) = (s.k() as usize, s.n() as usize);
            let m = k * n;
            let l = if k == 1 || k == m {
                m - 1
            } else {
                let mut best = 0;
                for cand in 0..=m {
                    if 2 * cand <= m - k + 1 {
                        best = cand;
                    }
                }
                best
            };
            let p = if k < m { k * (n - 1) } else { m - 1 };
            let c = s.mode_constants();
            assert_eq!((c.l, c.p), (l, p), "{s}");
            assert!(c.l <= m - 1 && c.p <= m - 1 && c.l >= 1 && c.p >= 1);
            if k == 1 {
                assert_eq!(c.l, m - 1);
                assert_eq!(c.p, m - 1);
            }
        }
    }

    #[test]
    fn gradient_sum_examples() {
        let cp2 = Space::new(2, 2, true).unwrap();
        assert!(close(cp2.gradient_sum(FRAC_PI_4).unwrap(), 8.0, 1e-14));
        let h3 = Space::new(1, 3, false).unwrap();
        let v = h3.gradient_sum(1.0).unwrap();
        assert!(close(v, 2.0 / 1f64.sinh().powi(2), 1e-15));
        assert!((v - 1.4482).abs() < 1e-4);
        assert!(close(v, -h3.curvature_trace_deriv(1.0).unwrap(), 1e-14));
    }

    #[test]
    fn noncompact_dh_far_out() {
        let ch1 = Space::new(2, 1, false).unwrap();
        let r = 20.0f64;
        let exact = -4.0 / (2.0 * r).sinh().powi(2);
        assert!(close(ch1.curvature_trace_deriv(r).unwrap(), exact, 1e-13));
    }

    #[test]
    fn gradient_bound_examples() {
        let cp2 = Space::new(2, 2, true).unwrap();
        let b = cp2.gradient_bound(FRAC_PI_4).unwrap();
        assert!(close(b, 4.0, 1e-14));
        assert!(b <= -cp2.curvature_trace_deriv(FRAC_PI_4).unwrap() / 1.0);

        let h2 = Space::hyperbolic_plane();
        let b = h2.gradient_bound(1.0).unwrap();
        assert!(close(b, -h2.curvature_trace_deriv(1.0).unwrap(), 1e-15));

        let hh2 = Space::new(4, 2, false).unwrap();
        let b = hh2.gradient_bound(2.0).unwrap();
        assert!(close(b, 1.0 / 2f64.sinh().powi(2), 1e-15));
        assert!(b <= -hh2.curvature_trace_deriv(2.0).unwrap() / 4.0);

        assert!(cp2.gradient_bound(1.0).is_err());
    }

    #[test]
    fn ball_volume_examples() {
        let h2 = Space::hyperbolic_plane();
        for r in [0.1, 0.7, 2.0] {
            let v = h2.ball_volume(r).unwrap();
            assert!(close(v, 2.0 * PI * (r.cosh() - 1.0), 1e-13));
        }
        let v = Space::cp1().ball_volume(FRAC_PI_4).unwrap();
        assert!(close(v, PI / 2.0, 1e-14));
        for s in all_spaces(16) {
            let r = 0.7;
            let back = s.radius_from_volume(s.ball_volume(r).unwrap()).unwrap();
            assert!(close(back, r, 1e-10), "{s}");
        }
    }

    #[test]
    fn radius_constraint_violated() {
        let cp1 = Space::cp1();
        let err = cp1.radius_from_volume(PI / 2.0 * 1.01).unwrap_err();
        assert!(matches!(err, Error::RadiusConstraint(_)));
        assert!(err.to_string().contains("radius constraint violated"));
        assert!(cp1.ball_volume(0.9).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert!(close(unit_sphere_area(2), 2.0 * PI, 1e-15));
        assert!(close(unit_sphere_area(3), 4.0 * PI, 1e-15));
        assert!(close(unit_sphere_area(4), 2.0 * PI * PI, 1e-15));
        assert!(close(unit_sphere_area(5), 8.0 * PI * PI / 3.0, 1e-15));
    }

    #[test]
    fn space_strings() {
        assert_eq!(Space::new(2, 2, true).unwrap().to_string(), "K2_n2_c");
        assert_eq!("K1_n3_nc".parse::<Space>().unwrap(), Space::new(1, 3, false).unwrap());
        for bad in ["K3_n2_c", "K8_n3_c", "K1_n1_nc", "K2_n2", "K2_n2_x", "x", "K2_n2_c_d"] {
            assert!(bad.parse::<Space>().is_err(), "{bad}");
        }
        let json = serde_json::to_string(&Space::cp1()).unwrap();
        assert_eq!(json, "\"K2_n1_c\"");
        assert_eq!(serde_json::from_str::<Space>(&json).unwrap(), Space::cp1());
    }
}
