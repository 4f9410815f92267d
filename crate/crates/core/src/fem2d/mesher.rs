use std::collections::HashMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::mesh::Mesh;
use super::model::ConformalModel;
use crate::{Error, Result};

/// Closed boundary curves in chart coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundaryCurve {
    /// Geodesic circle of the model metric about a chart point.
    GeodesicDisk { center: [f64; 2], radius: f64 },
    /// Chart ellipse, rotated about the chart origin by `rotation`.
    Ellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
        rotation: f64,
    },
    /// Two-lobe curve `ρ(θ) = scale·(1 + waist·cos 2θ)`, rotated about the origin.
    Peanut {
        scale: f64,
        waist: f64,
        rotation: f64,
    },
    /// Arbitrary closed polyline (last point connects back to the first).
    Polyline { points: Vec<[f64; 2]> },
}

impl BoundaryCurve {
    pub fn rotation(&self) -> f64 {
        match self {
            BoundaryCurve::Ellipse { rotation, .. } | BoundaryCurve::Peanut { rotation, .. } => {
                *rotation
            }
            _ => 0.0,
        }
    }

    /// Same curve with an extra rotation about the chart origin.
    pub fn rotated_by(&self, angle: f64) -> Self {
        let rot = |p: [f64; 2]| {
            let (s, c) = angle.sin_cos();
            [c * p[0] - s * p[1], s * p[0] + c * p[1]]
        };
        match self.clone() {
            BoundaryCurve::GeodesicDisk { center, radius } => BoundaryCurve::GeodesicDisk {
                center: rot(center),
                radius,
            },
            BoundaryCurve::Ellipse {
                center,
                semi_axes,
                rotation,
            } => BoundaryCurve::Ellipse {
                center,
                semi_axes,
                rotation: rotation + angle,
            },
            BoundaryCurve::Peanut {
                scale,
                waist,
                rotation,
            } => BoundaryCurve::Peanut {
                scale,
                waist,
                rotation: rotation + angle,
            },
            BoundaryCurve::Polyline { points } => BoundaryCurve::Polyline {
                points: points.into_iter().map(rot).collect(),
            },
        }
    }

    /// Point at parameter `t ∈ [0, 1)` before the curve's own rotation.
    fn point_unrotated(&self, model: &ConformalModel, t: f64) -> [f64; 2] {
        let th = 2.0 * PI * t;
        match self {
            BoundaryCurve::GeodesicDisk { center, radius } => model.exp(*center, *radius, th),
            BoundaryCurve::Ellipse {
                center, semi_axes, ..
            } => [
                center[0] + semi_axes[0] * th.cos(),
                center[1] + semi_axes[1] * th.sin(),
            ],
            BoundaryCurve::Peanut { scale, waist, .. } => {
                let rho = scale * (1.0 + waist * (2.0 * th).cos());
                [rho * th.cos(), rho * th.sin()]
            }
            BoundaryCurve::Polyline { points } => {
                let n = points.len();
                let x = t.rem_euclid(1.0) * n as f64;
                let i = (x.floor() as usize).min(n - 1);
                let f = x - i as f64;
                let (p, q) = (points[i], points[(i + 1) % n]);
                [p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])]
            }
        }
    }

    /// Point at parameter `t` in final chart position.
    pub fn point(&self, model: &ConformalModel, t: f64) -> [f64; 2] {
        rotate(self.point_unrotated(model, t), self.rotation())
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            BoundaryCurve::GeodesicDisk { radius, .. } => *radius > 0.0,
            BoundaryCurve::Ellipse { semi_axes, .. } => semi_axes[0] > 0.0 && semi_axes[1] > 0.0,
            BoundaryCurve::Peanut { scale, waist, .. } => *scale > 0.0 && (0.0..0.9).contains(waist),
            BoundaryCurve::Polyline { points } => points.len() >= 3,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid boundary curve {self:?}")))
        }
    }
}

fn rotate(p: [f64; 2], angle: f64) -> [f64; 2] {
    if angle == 0.0 {
        return p;
    }
    let (s, c) = angle.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

/// A mesh together with the curve it discretizes, so that uniform
/// refinement can place new boundary vertices on the curve.
#[derive(Clone, Debug)]
pub struct DomainMesh {
    pub model: ConformalModel,
    pub curve: BoundaryCurve,
    pub mesh: Mesh,
    /// Curve parameter of every boundary vertex.
    pub boundary_param: HashMap<usize, f64>,
}

impl DomainMesh {
    /// Red refinement with boundary midpoints projected onto the curve.
    pub fn refine(&self) -> Self {
        let mut params = self.boundary_param.clone();
        let mut new_params = Vec::new();
        let base = self.mesh.vertices.len();
        let mut created = 0usize;
        let mesh = self.mesh.refine_uniform(|a, b| {
            let (ta, tb) = (self.boundary_param[&a], self.boundary_param[&b]);
            // shorter arc between the two parameters on the circle [0,1)
            let mut d = tb - ta;
            if d > 0.5 {
                d -= 1.0;
            } else if d < -0.5 {
                d += 1.0;
            }
            let t = (ta + 0.5 * d).rem_euclid(1.0);
            new_params.push(t);
            created += 1;
            self.curve.point(&self.model, t)
        });
        // boundary midpoints are the only vertices created through the
        // callback; match them up by position in the new boundary loop
        let old: std::collections::HashSet<usize> = self.boundary_param.keys().copied().collect();
        let mut fresh: Vec<usize> = mesh
            .boundary
            .iter()
            .copied()
            .filter(|v| *v >= base && !old.contains(v))
            .collect();
        fresh.sort_unstable();
        fresh.dedup();
        debug_assert_eq!(fresh.len(), created);
        for (v, t) in fresh.into_iter().zip(new_params) {
            params.insert(v, t);
        }
        Self {
            model: self.model,
            curve: self.curve.clone(),
            mesh,
            boundary_param: params,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MeshOptions {
    /// Target longest edge measured in the model metric.
    pub target_h: f64,
    /// Random displacement of interior lattice points, as a fraction of the spacing.
    pub jitter: f64,
    pub seed: u64,
    pub smoothing_passes: usize,
}

impl MeshOptions {
    pub fn new(target_h: f64) -> Self {
        Self {
            target_h,
            jitter: 0.0,
            seed: 0,
            smoothing_passes: 4,
        }
    }
}

/// Triangulates the region bounded by `curve`.
pub fn mesh_domain(model: &ConformalModel, curve: &BoundaryCurve, target_h: f64) -> Result<DomainMesh> {
    mesh_domain_with(model, curve, MeshOptions::new(target_h))
}

/// Triangulates the region bounded by `curve`: boundary nodes at equal arc
/// length, interior nodes from a hexagonal lattice, constrained Delaunay
/// triangulation and a few Laplacian smoothing passes. The chart spacing is
/// reduced until the longest metric edge is at most `target_h`. The mesh is
/// built for the unrotated curve and then rotated, so rotating a curve about
/// the origin rotates its mesh exactly.
pub fn mesh_domain_with(model: &ConformalModel, curve: &BoundaryCurve, opts: MeshOptions) -> Result<DomainMesh> {
    curve.validate()?;
    if !(opts.target_h > 0.0) {
        return Err(Error::InvalidArgument(format!("target_h must be positive, got {}", opts.target_h)));
    }
    let fine: Vec<[f64; 2]> = (0..4096)
        .map(|i| curve.point_unrotated(model, i as f64 / 4096.0))
        .collect();
    for p in &fine {
        if !model.contains(rotate(*p, curve.rotation())) {
            return Err(Error::Range(format!(
                "boundary point {p:?} leaves the admissible model region of {}",
                model.space
            )));
        }
    }
    check_simple(&fine)?;

    let lam_max = {
        let mut l = fine.iter().map(|p| model.lambda(*p)).fold(0.0f64, f64::max);
        if inside(&fine, [0.0, 0.0]) {
            l = l.max(model.lambda([0.0, 0.0]));
        }
        l
    };
    let mut spacing = opts.target_h / lam_max;
    for _ in 0..30 {
        let dm = build(model, curve, &fine, spacing, &opts)?;
        if dm.mesh.stats(model).h_max <= opts.target_h {
            return Ok(dm);
        }
        spacing *= 0.93;
    }
    Err(Error::Geometry(format!(
        "could not reach metric edge length {} for {curve:?}",
        opts.target_h
    )))
}

/// Boundary parameters at equal arc length along the fine sampling.
fn arc_length_params(fine: &[[f64; 2]], spacing: f64) -> Vec<f64> {
    let nf = fine.len();
    let mut cum = vec![0.0; nf + 1];
    for i in 0..nf {
        let (p, q) = (fine[i], fine[(i + 1) % nf]);
        cum[i + 1] = cum[i] + (q[0] - p[0]).hypot(q[1] - p[1]);
    }
    let perimeter = cum[nf];
    let nb = ((perimeter / spacing).round() as usize).max(12);
    let mut params = Vec::with_capacity(nb);
    let mut seg = 0;
    for i in 0..nb {
        let s = perimeter * i as f64 / nb as f64;
        while cum[seg + 1] < s {
            seg += 1;
        }
        let f = (s - cum[seg]) / (cum[seg + 1] - cum[seg]);
        params.push((seg as f64 + f) / nf as f64);
    }
    params
}

/// Polyline nodes: every corner, with each edge split evenly.
fn polyline_params(points: &[[f64; 2]], spacing: f64) -> Vec<f64> {
    let n = points.len();
    let mut params = Vec::new();
    for i in 0..n {
        let (p, q) = (points[i], points[(i + 1) % n]);
        let k = (((q[0] - p[0]).hypot(q[1] - p[1]) / spacing).round() as usize).max(1);
        params.extend((0..k).map(|j| (i as f64 + j as f64 / k as f64) / n as f64));
    }
    params
}

fn build(
    model: &ConformalModel,
    curve: &BoundaryCurve,
    fine: &[[f64; 2]],
    spacing: f64,
    opts: &MeshOptions,
) -> Result<DomainMesh> {
    let params = match curve {
        BoundaryCurve::Polyline { points } => polyline_params(points, spacing),
        _ => arc_length_params(fine, spacing),
    };
    let boundary: Vec<[f64; 2]> = params.iter().map(|&t| curve.point_unrotated(model, t)).collect();
    check_simple(&boundary)?;

    // hexagonal lattice centred on the bounding box
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &boundary {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let centre = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let dy = spacing * 3f64.sqrt() / 2.0;
    let nx = ((hi[0] - lo[0]) / spacing).ceil() as i64 + 2;
    let ny = ((hi[1] - lo[1]) / dy).ceil() as i64 + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut interior = Vec::new();
    for j in -ny..=ny {
        for i in -nx..=nx {
            let shift = if j.rem_euclid(2) == 1 { 0.5 * spacing } else { 0.0 };
            let mut p = [centre[0] + i as f64 * spacing + shift, centre[1] + j as f64 * dy];
            if opts.jitter > 0.0 {
                p[0] += opts.jitter * spacing * (rng.random::<f64>() - 0.5);
                p[1] += opts.jitter * spacing * (rng.random::<f64>() - 0.5);
            }
            if inside(&boundary, p) && distance_to_polygon(&boundary, p) >= 0.55 * spacing {
                interior.push(p);
            }
        }
    }

    let nbv = boundary.len();
    let mut points: Vec<[f64; 2]> = boundary.iter().copied().chain(interior).collect();
    let mut tris = triangulate(&points, nbv, &boundary)?;
    for _ in 0..opts.smoothing_passes {
        let mut nbr_sum = vec![[0.0f64; 2]; points.len()];
        let mut nbr_cnt = vec![0usize; points.len()];
        for t in &tris {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                // each interior edge is seen twice, boundary edges once; weights cancel in the mean
                nbr_sum[a][0] += points[b][0];
                nbr_sum[a][1] += points[b][1];
                nbr_cnt[a] += 1;
                nbr_sum[b][0] += points[a][0];
                nbr_sum[b][1] += points[a][1];
                nbr_cnt[b] += 1;
            }
        }
        for v in nbv..points.len() {
            if nbr_cnt[v] == 0 {
                continue;
            }
            let cand = [nbr_sum[v][0] / nbr_cnt[v] as f64, nbr_sum[v][1] / nbr_cnt[v] as f64];
            if inside(&boundary, cand) && distance_to_polygon(&boundary, cand) >= 0.3 * spacing {
                points[v] = cand;
            }
        }
        tris = triangulate(&points, nbv, &boundary)?;
    }

    // drop lattice points that ended up in no triangle
    let mut used = vec![false; points.len()];
    for t in &tris {
        for &v in t {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; points.len()];
    let mut kept = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if used[i] || i < nbv {
            remap[i] = kept.len();
            kept.push(rotate(*p, curve.rotation()));
        }
    }
    let tris: Vec<[usize; 3]> = tris.iter().map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]]).collect();
    let mesh = Mesh::from_parts(kept, tris)?;
    if mesh.boundary.len() != nbv + 1 {
        return Err(Error::Geometry(format!(
            "boundary recovery failed: {} of {nbv} boundary vertices on the loop",
            mesh.boundary.len() - 1
        )));
    }
    let boundary_param = (0..nbv).map(|i| (remap[i], params[i])).collect();
    Ok(DomainMesh {
        model: *model,
        curve: curve.clone(),
        mesh,
        boundary_param,
    })
}

fn triangulate(points: &[[f64; 2]], nbv: usize, boundary: &[[f64; 2]]) -> Result<Vec<[usize; 3]>> {
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut handle_to_index = HashMap::new();
    let mut handles = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let h = cdt
            .insert(Point2::new(p[0], p[1]))
            .map_err(|e| Error::Geometry(format!("triangulation insert failed: {e:?}")))?;
        if handle_to_index.insert(h.index(), i).is_some() {
            return Err(Error::Geometry(format!("duplicate mesh point {p:?}")));
        }
        handles.push(h);
    }
    for i in 0..nbv {
        let (a, b) = (handles[i], handles[(i + 1) % nbv]);
        if !cdt.can_add_constraint(a, b) {
            return Err(Error::Geometry("boundary constraint intersects another".into()));
        }
        cdt.add_constraint(a, b);
    }
    let edge2 = (0..nbv)
        .map(|i| {
            let (p, q) = (boundary[i], boundary[(i + 1) % nbv]);
            (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)
        })
        .fold(f64::INFINITY, f64::min);
    let mut tris = Vec::new();
    for face in cdt.inner_faces() {
        let vs = face.vertices();
        let ids = [
            handle_to_index[&vs[0].fix().index()],
            handle_to_index[&vs[1].fix().index()],
            handle_to_index[&vs[2].fix().index()],
        ];
        let c = [
            (points[ids[0]][0] + points[ids[1]][0] + points[ids[2]][0]) / 3.0,
            (points[ids[0]][1] + points[ids[1]][1] + points[ids[2]][1]) / 3.0,
        ];
        // rounding leaves nodes on straight boundary pieces slightly off
        // line; the resulting slivers are dropped rather than classified
        let (a, b, cc) = (points[ids[0]], points[ids[1]], points[ids[2]]);
        if ids.iter().all(|&i| i < nbv) && super::mesh::signed_area(a, b, cc).abs() < 1e-8 * edge2 {
            continue;
        }
        if inside(boundary, c) {
            tris.push(ids);
        }
    }
    // spade's face order depends only on insertion order; sort for a canonical layout
    tris.sort_unstable_by_key(|t| {
        let mut s = *t;
        s.sort_unstable();
        s
    });
    Ok(tris)
}

/// Even-odd point-in-polygon test.
pub(crate) fn inside(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = poly.len();
    let mut c = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0];
            if p[0] < x {
                c = !c;
            }
        }
        j = i;
    }
    c
}

fn distance_to_polygon(poly: &[[f64; 2]], p: [f64; 2]) -> f64 {
    let n = poly.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
        let q = [a[0] + t * d[0], a[1] + t * d[1]];
        best = best.min((p[0] - q[0]).hypot(p[1] - q[1]));
    }
    best
}

fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let orient = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
    };
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Rejects self-intersecting closed polylines.
pub(crate) fn check_simple(poly: &[[f64; 2]]) -> Result<()> {
    let n = poly.len();
    if n < 3 {
        return Err(Error::Geometry("boundary needs at least three points".into()));
    }
    // sweep over segments sorted by min x to prune pairs
    let mut order: Vec<usize> = (0..n).collect();
    let seg_x = |i: usize| {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        (a[0].min(b[0]), a[0].max(b[0]))
    };
    order.sort_by(|&i, &j| seg_x(i).0.partial_cmp(&seg_x(j).0).unwrap());
    for (oi, &i) in order.iter().enumerate() {
        let (_, imax) = seg_x(i);
        for &j in &order[oi + 1..] {
            if seg_x(j).0 > imax {
                break;
            }
            let adjacent = (i + 1) % n == j || (j + 1) % n == i;
            if adjacent {
                continue;
            }
            if segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return Err(Error::Geometry(format!(
                    "boundary self-intersection between segments {i} and {j}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Space;

    fn h2() -> ConformalModel {
        ConformalModel::new(Space::hyperbolic_plane()).unwrap()
    }

    #[test]
    fn disk_mesh_contract() {
        let m = h2();
        let dm = mesh_domain(&m, &BoundaryCurve::GeodesicDisk { center: [0.0, 0.0], radius: 0.8 }, 0.05).unwrap();
        let st = dm.mesh.stats(&m);
        assert!(st.h_max <= 0.05);
        assert!(st.min_angle_deg >= 15.0, "{}", st.min_angle_deg);
        assert_eq!(dm.mesh.boundary.first(), dm.mesh.boundary.last());
        // boundary vertices sit on the geodesic circle
        for &b in &dm.mesh.boundary {
            let r = m.distance([0.0, 0.0], dm.mesh.vertices[b]);
            assert!((r - 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn vertex_count_scales_like_inverse_square() {
        let m = h2();
        let c = BoundaryCurve::GeodesicDisk { center: [0.0, 0.0], radius: 0.8 };
        let counts: Vec<usize> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| mesh_domain(&m, &c, h).unwrap().mesh.vertices.len())
            .collect();
        for w in counts.windows(2) {
            let ratio = w[1] as f64 / w[0] as f64;
            assert!((3.5..=4.5).contains(&ratio), "{counts:?}");
        }
    }

    #[test]
    fn peanut_and_ellipse_quality() {
        let m = h2();
        for c in [
            BoundaryCurve::Peanut { scale: 0.35, waist: 0.35, rotation: 0.3 },
            BoundaryCurve::Ellipse { center: [0.05, 0.0], semi_axes: [0.5, 0.25], rotation: 0.0 },
        ] {
            let dm = mesh_domain(&m, &c, 0.06).unwrap();
            assert!(dm.mesh.min_angle_deg() >= 15.0, "{c:?}: {}", dm.mesh.min_angle_deg());
        }
    }

    #[test]
    fn rotation_rotates_the_mesh_exactly() {
        let m = h2();
        let c = BoundaryCurve::Ellipse { center: [0.1, 0.0], semi_axes: [0.5, 0.25], rotation: 0.0 };
        let a = mesh_domain(&m, &c, 0.08).unwrap().mesh;
        let b = mesh_domain(&m, &c.rotated_by(0.9), 0.08).unwrap().mesh;
        let ar = a.rotated(0.9);
        assert_eq!(a.triangles, b.triangles);
        for (p, q) in ar.vertices.iter().zip(&b.vertices) {
            assert!((p[0] - q[0]).abs() < 1e-14 && (p[1] - q[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn refinement_projects_to_curve() {
        let m = ConformalModel::new(Space::cp1()).unwrap();
        let dm = mesh_domain(&m, &BoundaryCurve::GeodesicDisk { center: [0.0, 0.0], radius: 0.5 }, 0.1).unwrap();
        let fine = dm.refine();
        assert_eq!(fine.mesh.triangles.len(), 4 * dm.mesh.triangles.len());
        for &b in &fine.mesh.boundary {
            let r = m.distance([0.0, 0.0], fine.mesh.vertices[b]);
            assert!((r - 0.5).abs() < 1e-12);
        }
        assert_eq!(fine.boundary_param.len(), fine.mesh.boundary.len() - 1);
    }

    #[test]
    fn self_intersection_detected() {
        let bow = BoundaryCurve::Polyline {
            points: vec![[0.0, 0.0], [0.3, 0.3], [0.3, 0.0], [0.0, 0.3]],
        };
        assert!(matches!(mesh_domain(&h2(), &bow, 0.05), Err(Error::Geometry(_))));
    }

    #[test]
    fn polyline_input() {
        let sq = BoundaryCurve::Polyline {
            points: vec![[-0.2, -0.2], [0.2, -0.2], [0.2, 0.2], [-0.2, 0.2]],
        };
        let dm = mesh_domain(&h2(), &sq, 0.05).unwrap();
        assert!(dm.mesh.min_angle_deg() >= 15.0);
    }

    #[test]
    fn slanted_polyline_keeps_corners() {
        let pent = vec![[-0.2, -0.2], [0.25, -0.2], [0.25, 0.15], [0.0, 0.3], [-0.2, 0.15]];
        let dm = mesh_domain(&h2(), &BoundaryCurve::Polyline { points: pent.clone() }, 0.05).unwrap();
        assert!(dm.mesh.min_angle_deg() >= 15.0);
        for c in pent {
            assert!(dm.mesh.vertices.iter().any(|v| v[0] == c[0] && v[1] == c[1]), "corner {c:?} lost");
        }
    }

    #[test]
    fn region_checks() {
        let s2 = ConformalModel::new(Space::sphere2()).unwrap();
        let too_big = BoundaryCurve::GeodesicDisk { center: [0.0, 0.0], radius: 1.0 };
        assert!(matches!(mesh_domain(&s2, &too_big, 0.1), Err(Error::Range(_))));
    }
}
