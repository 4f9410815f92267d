use rayon::prelude::*;

use super::mesh::{signed_area, Mesh};
use super::model::ConformalModel;
use super::sparse::CsrMatrix;
use crate::{Error, Result};

/// P1 stiffness and mass matrices of the Neumann problem on a mesh.
#[derive(Clone, Debug)]
pub struct FemSystem {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
}

/// Flat element stiffness; by conformal invariance of the Dirichlet energy in
/// two dimensions this is also the curved one.
fn element_stiffness(p: [[f64; 2]; 3]) -> [[f64; 3]; 3] {
    let area = signed_area(p[0], p[1], p[2]);
    // gradients of barycentric coordinates: ∇φ_i = rot90(p_{i+2} − p_{i+1}) / 2A
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
        g[i] = [(a[1] - b[1]) / (2.0 * area), (b[0] - a[0]) / (2.0 * area)];
    }
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
        }
    }
    k
}

/// Element mass with `λ²` sampled at the three edge midpoints.
fn element_mass(model: &ConformalModel, p: [[f64; 2]; 3]) -> [[f64; 3]; 3] {
    let area = signed_area(p[0], p[1], p[2]);
    let mut m = [[0.0; 3]; 3];
    // midpoint opposite vertex i has barycentric coordinates 1/2 on the other two
    for i in 0..3 {
        let (a, b) = ((i + 1) % 3, (i + 2) % 3);
        let x = [0.5 * (p[a][0] + p[b][0]), 0.5 * (p[a][1] + p[b][1])];
        let l = model.lambda(x);
        let w = area / 3.0 * l * l * 0.25;
        m[a][a] += w;
        m[b][b] += w;
        m[a][b] += w;
        m[b][a] += w;
    }
    m
}

/// Assembles stiffness `K` and mass `M`. Element matrices are computed in
/// parallel and summed in element order, so results do not depend on the
/// thread count.
pub fn assemble(model: &ConformalModel, mesh: &Mesh) -> Result<FemSystem> {
    if let Some(v) = mesh.vertices.iter().find(|v| !model.contains(**v)) {
        return Err(Error::Range(format!(
            "mesh vertex {v:?} lies outside the admissible region of {}",
            model.space
        )));
    }
    let locals: Vec<([usize; 3], [[f64; 3]; 3], [[f64; 3]; 3])> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let p = mesh.triangle(t);
            (mesh.triangles[t], element_stiffness(p), element_mass(model, p))
        })
        .collect();
    let mut kt = Vec::with_capacity(9 * locals.len());
    let mut mt = Vec::with_capacity(9 * locals.len());
    for (ids, k, m) in &locals {
        for a in 0..3 {
            for b in 0..3 {
                kt.push((ids[a], ids[b], k[a][b]));
                mt.push((ids[a], ids[b], m[a][b]));
            }
        }
    }
    let n = mesh.vertices.len();
    Ok(FemSystem {
        stiffness: CsrMatrix::from_triplets(n, &kt),
        mass: CsrMatrix::from_triplets(n, &mt),
    })
}

/// Curved area `1ᵀ M 1`.
pub fn mass_total(system: &FemSystem) -> f64 {
    system.mass.vals.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem2d::mesher::{mesh_domain, BoundaryCurve};
    use crate::geometry::Space;

    #[test]
    fn stiffness_kernel_and_symmetry() {
        let m = ConformalModel::new(Space::hyperbolic_plane()).unwrap();
        let dm = mesh_domain(&m, &BoundaryCurve::GeodesicDisk { center: [0.1, 0.0], radius: 0.6 }, 0.08).unwrap();
        let sys = assemble(&m, &dm.mesh).unwrap();
        let scale = sys.stiffness.vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for i in 0..sys.stiffness.n {
            let s: f64 = sys.stiffness.row(i).map(|(_, v)| v).sum();
            assert!(s.abs() < 1e-12 * scale);
        }
        assert!(sys.stiffness.is_symmetric());
        assert!(sys.mass.is_symmetric());
    }

    #[test]
    fn mass_is_curved_area() {
        let m = ConformalModel::new(Space::hyperbolic_plane()).unwrap();
        let r: f64 = 0.8;
        let exact = 2.0 * std::f64::consts::PI * (r.cosh() - 1.0);
        let dm = mesh_domain(&m, &BoundaryCurve::GeodesicDisk { center: [0.0, 0.0], radius: r }, 0.04).unwrap();
        let area = mass_total(&assemble(&m, &dm.mesh).unwrap());
        assert!((area - exact).abs() < 2e-3 * exact, "{area} vs {exact}");
    }

    #[test]
    fn stiffness_independent_of_metric() {
        let dm = mesh_domain(
            &ConformalModel::new(Space::hyperbolic_plane()).unwrap(),
            &BoundaryCurve::Ellipse { center: [0.0, 0.0], semi_axes: [0.4, 0.2], rotation: 0.0 },
            0.08,
        )
        .unwrap();
        let mut stiff = Vec::new();
        for s in [Space::hyperbolic_plane(), Space::sphere2(), Space::cp1(), Space::ch1()] {
            let model = ConformalModel::new(s).unwrap();
            stiff.push(assemble(&model, &dm.mesh).unwrap().stiffness);
        }
        assert!(stiff.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn outside_region_rejected() {
        let m = ConformalModel::new(Space::sphere2()).unwrap();
        let mesh = Mesh::from_parts(vec![[0.0, 0.0], [0.9, 0.0], [0.0, 0.9]], vec![[0, 1, 2]]).unwrap();
        assert!(matches!(assemble(&m, &mesh), Err(Error::Range(_))));
    }
}
