use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::geometry::Space;
use crate::{Error, Result};

/// Conformal chart `λ²(dx² + dy²)` of one of the four 2-dimensional model
/// spaces: the Poincaré disk for curvature `-a²`, stereographic coordinates
/// for curvature `a²`. `a = 1` for `k = 1` and `a = 2` for `CP¹`/`CH¹`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalModel {
    pub space: Space,
    /// Square root of the absolute sectional curvature.
    pub a: f64,
}

impl ConformalModel {
    pub fn new(space: Space) -> Result<Self> {
        if space.m() != 2 {
            return Err(Error::Unsupported(format!(
                "planar finite elements need real dimension 2, {space} has m={}",
                space.m()
            )));
        }
        let a = if space.k() == 1 { 1.0 } else { 2.0 };
        Ok(Self { space, a })
    }

    pub fn is_compact(&self) -> bool {
        self.space.is_compact()
    }

    /// Conformal factor `λ` at a chart point.
    #[inline]
    pub fn lambda(&self, p: [f64; 2]) -> f64 {
        let q = p[0] * p[0] + p[1] * p[1];
        if self.is_compact() {
            (2.0 / self.a) / (1.0 + q)
        } else {
            (2.0 / self.a) / (1.0 - q)
        }
    }

    /// Geodesic distance from the chart origin to a point at chart radius `rho`.
    pub fn distance_from_origin(&self, rho: f64) -> f64 {
        if self.is_compact() {
            (2.0 / self.a) * rho.atan()
        } else {
            (2.0 / self.a) * rho.atanh()
        }
    }

    /// Chart radius of the geodesic circle of radius `r` about the origin.
    pub fn chart_radius(&self, r: f64) -> f64 {
        if self.is_compact() {
            (0.5 * self.a * r).tan()
        } else {
            (0.5 * self.a * r).tanh()
        }
    }

    /// Chart radius of the admissible region: the unit disk, or the geodesic
    /// ball of radius π/4 about the origin for compact spaces.
    pub fn region_radius(&self) -> f64 {
        if self.is_compact() {
            self.chart_radius(FRAC_PI_4)
        } else {
            1.0
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let rho = p[0].hypot(p[1]);
        if self.is_compact() {
            rho <= self.region_radius() * (1.0 + 1e-12)
        } else {
            rho < 1.0
        }
    }

    /// Isometry moving `o` to the origin with positive real derivative at
    /// `o`, so tangent directions at `o` are preserved.
    #[inline]
    pub fn recenter(&self, o: [f64; 2], p: [f64; 2]) -> [f64; 2] {
        let num = [p[0] - o[0], p[1] - o[1]];
        // ō p
        let op = [o[0] * p[0] + o[1] * p[1], o[0] * p[1] - o[1] * p[0]];
        let den = if self.is_compact() {
            [1.0 + op[0], op[1]]
        } else {
            [1.0 - op[0], -op[1]]
        };
        cdiv(num, den)
    }

    /// Inverse of [`ConformalModel::recenter`].
    pub fn uncenter(&self, o: [f64; 2], w: [f64; 2]) -> [f64; 2] {
        let num = [w[0] + o[0], w[1] + o[1]];
        let ow = [o[0] * w[0] + o[1] * w[1], o[0] * w[1] - o[1] * w[0]];
        let den = if self.is_compact() {
            [1.0 - ow[0], -ow[1]]
        } else {
            [1.0 + ow[0], ow[1]]
        };
        cdiv(num, den)
    }

    /// Geodesic polar coordinates of `p` about `o`: distance and the unit
    /// initial direction `ξ` in the chart frame at `o`.
    #[inline]
    pub fn polar(&self, o: [f64; 2], p: [f64; 2]) -> (f64, [f64; 2]) {
        let w = self.recenter(o, p);
        let rho = w[0].hypot(w[1]);
        if rho == 0.0 {
            return (0.0, [1.0, 0.0]);
        }
        (self.distance_from_origin(rho), [w[0] / rho, w[1] / rho])
    }

    pub fn distance(&self, o: [f64; 2], p: [f64; 2]) -> f64 {
        self.polar(o, p).0
    }

    /// Point at geodesic distance `r` from `o` in chart direction `theta`.
    pub fn exp(&self, o: [f64; 2], r: f64, theta: f64) -> [f64; 2] {
        let rho = self.chart_radius(r);
        self.uncenter(o, [rho * theta.cos(), rho * theta.sin()])
    }
}

#[inline]
fn cdiv(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let d = b[0] * b[0] + b[1] * b[1];
    [(a[0] * b[0] + a[1] * b[1]) / d, (a[1] * b[0] - a[0] * b[1]) / d]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;

    fn models() -> Vec<ConformalModel> {
        [Space::hyperbolic_plane(), Space::sphere2(), Space::cp1(), Space::ch1()]
            .into_iter()
            .map(|s| ConformalModel::new(s).unwrap())
            .collect()
    }

    #[test]
    fn rejects_higher_dimensions() {
        assert!(matches!(
            ConformalModel::new(Space::new(2, 2, false).unwrap()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn origin_factor() {
        for m in models() {
            assert_eq!(m.lambda([0.0, 0.0]), 2.0 / m.a);
        }
    }

    #[test]
    fn rays_reproduce_density() {
        let g = GaussLegendre::new(30);
        for m in models() {
            let rho = 0.8 * m.region_radius();
            // ∫ λ dρ along a ray is the geodesic distance
            let r = g.integrate(0.0, rho, |t| m.lambda([t, 0.0]));
            assert!((r - m.distance_from_origin(rho)).abs() < 1e-12);
            // the chart circle of radius ρ has length 2π J(r)
            let j = m.space.density(r).unwrap();
            assert!((rho * m.lambda([rho, 0.0]) - j).abs() < 1e-8 * j, "{:?}", m.space);
        }
    }

    #[test]
    fn sphere_total_area() {
        // ∫ λ² over the whole plane = 4π/a²; radial integral with t = tan(u)
        let g = GaussLegendre::new(40);
        for m in models().into_iter().filter(|m| m.is_compact()) {
            let area = 2.0
                * std::f64::consts::PI
                * g.integrate(0.0, std::f64::consts::FRAC_PI_2, |u| {
                    let t = u.tan();
                    let l = m.lambda([t, 0.0]);
                    l * l * t / u.cos().powi(2)
                });
            let exact = 4.0 * std::f64::consts::PI / (m.a * m.a);
            assert!((area - exact).abs() < 1e-10 * exact);
        }
    }

    #[test]
    fn recentering_is_an_isometry() {
        let o = [0.2, -0.1];
        let pts = [[0.3, 0.25], [-0.1, 0.05], [0.0, -0.3]];
        for m in models() {
            for p in pts {
                let w = m.recenter(o, p);
                let back = m.uncenter(o, w);
                assert!((back[0] - p[0]).abs() < 1e-14 && (back[1] - p[1]).abs() < 1e-14);
            }
            // d(o, p) along a straight chart path from o vs the closed form, for
            // a point on the ray through the origin (a geodesic)
            let p = [0.3, -0.15];
            let d = m.distance(o, p);
            let d2 = (m.distance_from_origin(0.3f64.hypot(0.15)) - m.distance_from_origin(0.2f64.hypot(0.1))).abs();
            assert!((d - d2).abs() < 1e-12);
            // exp/polar round trip
            let q = m.exp(o, 0.4, 1.1);
            let (r, xi) = m.polar(o, q);
            assert!((r - 0.4).abs() < 1e-12);
            assert!((xi[1].atan2(xi[0]) - 1.1).abs() < 1e-12);
        }
    }

    #[test]
    fn recenter_preserves_directions_at_center() {
        let o = [0.25, 0.1];
        for m in models() {
            let eps = 1e-7;
            for theta in [0.0, 0.7, 2.0, -2.5] {
                let p = [o[0] + eps * f64::cos(theta), o[1] + eps * f64::sin(theta)];
                let (_, xi) = m.polar(o, p);
                assert!((xi[1].atan2(xi[0]) - theta).abs() < 1e-6);
            }
        }
    }
}
