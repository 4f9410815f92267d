use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::model::ConformalModel;
use crate::{Error, Result};

/// Conforming triangulation in chart coordinates.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    /// Closed counterclockwise boundary polyline; first and last ids coincide.
    pub boundary: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub triangles: usize,
    /// Longest edge in chart coordinates.
    pub h_chart: f64,
    /// Longest edge measured in the model metric.
    pub h_max: f64,
    pub min_angle_deg: f64,
}

impl Mesh {
    /// Builds a mesh from vertices and triangles, orienting triangles
    /// counterclockwise and extracting the boundary loop.
    pub fn from_parts(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        let mut tris = triangles;
        for t in &mut tris {
            if t.iter().any(|&i| i >= nv) {
                return Err(Error::Geometry(format!("triangle {t:?} references a missing vertex")));
            }
            let area = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if area == 0.0 {
                return Err(Error::Geometry(format!("degenerate triangle {t:?}")));
            }
            if area < 0.0 {
                t.swap(1, 2);
            }
        }
        let boundary = boundary_loop(&tris)?;
        Ok(Self {
            vertices,
            triangles: tris,
            boundary,
        })
    }

    pub fn triangle(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Unique undirected edges.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
        let mut out = Vec::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if seen.insert(key, ()).is_none() {
                    out.push([key.0, key.1]);
                }
            }
        }
        out
    }

    pub fn is_boundary_vertex(&self) -> Vec<bool> {
        let mut flags = vec![false; self.vertices.len()];
        for &b in &self.boundary {
            flags[b] = true;
        }
        flags
    }

    pub fn stats(&self, model: &ConformalModel) -> MeshStats {
        let mut h_chart = 0.0f64;
        let mut h_max = 0.0f64;
        for [a, b] in self.edges() {
            let (p, q) = (self.vertices[a], self.vertices[b]);
            let len = (q[0] - p[0]).hypot(q[1] - p[1]);
            h_chart = h_chart.max(len);
            // Simpson on λ along the chord
            let mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            let lam = (model.lambda(p) + 4.0 * model.lambda(mid) + model.lambda(q)) / 6.0;
            h_max = h_max.max(lam * len);
        }
        MeshStats {
            vertices: self.vertices.len(),
            triangles: self.triangles.len(),
            h_chart,
            h_max,
            min_angle_deg: self.min_angle_deg(),
        }
    }

    pub fn min_angle_deg(&self) -> f64 {
        let mut best = 180.0f64;
        for t in 0..self.triangles.len() {
            let p = self.triangle(t);
            for k in 0..3 {
                let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                best = best.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
            }
        }
        best
    }

    /// Text format: `nv nt`, then `x y` per vertex, then `i j k` per triangle (0-based).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.vertices.len(), self.triangles.len());
        for v in &self.vertices {
            let _ = writeln!(out, "{:.17e} {:.17e}", v[0], v[1]);
        }
        for t in &self.triangles {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty mesh file".into()))?;
        let mut it = header.split_whitespace();
        let parse_usize = |s: Option<&str>, what: &str| -> Result<usize> {
            s.ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse()
                .map_err(|e| Error::Parse(format!("{what}: {e}")))
        };
        let nv = parse_usize(it.next(), "vertex count")?;
        let nt = parse_usize(it.next(), "triangle count")?;
        let mut vertices = Vec::with_capacity(nv);
        for i in 0..nv {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing vertex {i}")))?;
            let xy: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Parse(format!("vertex {i}: {e}"))))
                .collect::<Result<_>>()?;
            if xy.len() != 2 {
                return Err(Error::Parse(format!("vertex {i}: expected 2 coordinates")));
            }
            vertices.push([xy[0], xy[1]]);
        }
        let mut triangles = Vec::with_capacity(nt);
        for i in 0..nt {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing triangle {i}")))?;
            let mut ids = line.split_whitespace();
            let t = [
                parse_usize(ids.next(), "triangle index")?,
                parse_usize(ids.next(), "triangle index")?,
                parse_usize(ids.next(), "triangle index")?,
            ];
            triangles.push(t);
        }
        Self::from_parts(vertices, triangles)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    /// Rotates all vertices about the chart origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v = [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        }
        out
    }

    /// Red refinement: each triangle split into four. New boundary vertices
    /// are placed by `boundary_point(a, b)` given the two endpoint ids.
    pub fn refine_uniform<F>(&self, mut boundary_point: F) -> Self
    where
        F: FnMut(usize, usize) -> [f64; 2],
    {
        let mut vertices = self.vertices.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut boundary_edges: HashMap<(usize, usize), ()> = HashMap::new();
        for w in self.boundary.windows(2) {
            boundary_edges.insert((w[0].min(w[1]), w[0].max(w[1])), ());
        }
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<[f64; 2]>| -> usize {
            let key = (a.min(b), a.max(b));
            if let Some(&i) = midpoint.get(&key) {
                return i;
            }
            let p = if boundary_edges.contains_key(&key) {
                boundary_point(key.0, key.1)
            } else {
                let (p, q) = (vertices[a], vertices[b]);
                [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
            };
            vertices.push(p);
            let i = vertices.len() - 1;
            midpoint.insert(key, i);
            i
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = mid(a, b, &mut vertices);
            let bc = mid(b, c, &mut vertices);
            let ca = mid(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        let mut boundary = Vec::with_capacity(2 * self.boundary.len());
        for w in self.boundary.windows(2) {
            boundary.push(w[0]);
            boundary.push(midpoint[&(w[0].min(w[1]), w[0].max(w[1]))]);
        }
        boundary.push(boundary[0]);
        Self {
            vertices,
            triangles,
            boundary,
        }
    }
}

pub(crate) fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn boundary_loop(tris: &[[usize; 3]]) -> Result<Vec<usize>> {
    let mut count: HashMap<(usize, usize), i32> = HashMap::new();
    for t in tris {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    if count.values().any(|&c| c > 2) {
        return Err(Error::Geometry("non-manifold edge in triangulation".into()));
    }
    // directed boundary edges keep the ccw orientation of their triangle
    let mut next: HashMap<usize, usize> = HashMap::new();
    for t in tris {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if count[&(a.min(b), a.max(b))] == 1 && next.insert(a, b).is_some() {
                return Err(Error::Geometry(format!("boundary pinches at vertex {a}")));
            }
        }
    }
    if next.is_empty() {
        return Err(Error::Geometry("triangulation has no boundary".into()));
    }
    let start = *next.keys().min().unwrap();
    let mut out = vec![start];
    let mut cur = start;
    loop {
        cur = next[&cur];
        out.push(cur);
        if cur == start {
            break;
        }
        if out.len() > next.len() + 1 {
            return Err(Error::Geometry("boundary is not a single closed loop".into()));
        }
    }
    if out.len() != next.len() + 1 {
        return Err(Error::Geometry("boundary has several components".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square() -> Mesh {
        Mesh::from_parts(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]],
            vec![[0, 1, 4], [1, 2, 4], [2, 4, 3], [3, 0, 4]],
        )
        .unwrap()
    }

    #[test]
    fn boundary_closes_and_orients() {
        let m = square();
        assert_eq!(m.boundary.first(), m.boundary.last());
        assert_eq!(m.boundary.len(), 5);
        for t in 0..m.triangles.len() {
            let [a, b, c] = m.triangle(t);
            assert!(signed_area(a, b, c) > 0.0);
        }
    }

    #[test]
    fn refinement_quadruples() {
        let m = square();
        let r = m.refine_uniform(|a, b| {
            let (p, q) = (m.vertices[a], m.vertices[b]);
            [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
        });
        assert_eq!(r.triangles.len(), 16);
        assert_eq!(r.vertices.len(), 5 + 8);
        assert_eq!(r.boundary.len(), 9);
        let again = Mesh::from_parts(r.vertices.clone(), r.triangles.clone()).unwrap();
        assert_eq!(again.boundary.len(), 9);
    }

    #[test]
    fn text_errors() {
        assert!(Mesh::from_text("").is_err());
        assert!(Mesh::from_text("3 1\n0 0\n1 0\n0 1\n0 1 5\n").is_err());
        assert!(Mesh::from_text("3 1\n0 0\n1 0\n0 1\n").is_err());
    }

    proptest! {
        #[test]
        fn text_round_trip(dx in -0.3f64..0.3, dy in -0.3f64..0.3, s in 0.1f64..2.0) {
            let m = square();
            let moved: Vec<[f64; 2]> = m.vertices.iter().map(|v| [s * v[0] + dx, s * v[1] + dy]).collect();
            let m = Mesh::from_parts(moved, m.triangles.clone()).unwrap();
            let back = Mesh::from_text(&m.to_text()).unwrap();
            prop_assert_eq!(&back.vertices, &m.vertices);
            prop_assert_eq!(&back.triangles, &m.triangles);
            prop_assert_eq!(&back.boundary, &m.boundary);
        }
    }
}
