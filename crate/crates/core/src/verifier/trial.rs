use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Check, CheckInputs, Provenance, Relation};
use crate::fem2d::sparse::CsrMatrix;
use crate::fem2d::{ConformalModel, FemSystem, Mesh, SpectrumResult};
use crate::radial::{BallEig, RadialProfile};
use crate::{Error, Result};

/// Center `o` at which the trial functions have zero mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterResult {
    pub center: [f64; 2],
    /// `|(∫ v₁, ∫ v₂)| / ∫ G` with mesh mass-matrix integrals.
    pub residual: f64,
    pub strategy: String,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

/// Nodal values of `v_i = G(r_o) ξ_i` for `i = 1, 2` (chart frame at `o`).
pub fn trial_functions(model: &ConformalModel, mesh: &Mesh, g: &RadialProfile, o: [f64; 2]) -> [Vec<f64>; 2] {
    let mut v = [Vec::with_capacity(mesh.vertices.len()), Vec::with_capacity(mesh.vertices.len())];
    for &x in &mesh.vertices {
        let (r, xi) = model.polar(o, x);
        let gr = g.eval(r);
        v[0].push(gr * xi[0]);
        v[1].push(gr * xi[1]);
    }
    v
}

struct CenterMap<'a> {
    model: &'a ConformalModel,
    mesh: &'a Mesh,
    g: &'a RadialProfile,
    weights: Vec<f64>,
}

impl CenterMap<'_> {
    fn eval(&self, o: [f64; 2]) -> ([f64; 2], f64) {
        let (mut f, mut total) = ([0.0; 2], 0.0);
        for (x, w) in self.mesh.vertices.iter().zip(&self.weights) {
            let (r, xi) = self.model.polar(o, *x);
            let gr = self.g.eval(r);
            f[0] += w * gr * xi[0];
            f[1] += w * gr * xi[1];
            total += w * gr;
        }
        (f, total)
    }

    fn relative(&self, o: [f64; 2]) -> f64 {
        let (f, total) = self.eval(o);
        f[0].hypot(f[1]) / total
    }

    fn newton(&self, start: [f64; 2], step: f64, trace: &mut Vec<f64>) -> ([f64; 2], f64, usize) {
        let mut o = start;
        let mut res = self.relative(o);
        trace.push(res);
        let mut iters = 0;
        for _ in 0..60 {
            if res < 1e-14 {
                break;
            }
            iters += 1;
            let (f, _) = self.eval(o);
            let mut jac = [[0.0; 2]; 2];
            for c in 0..2 {
                let (mut p, mut m) = (o, o);
                p[c] += step;
                m[c] -= step;
                let (fp, _) = self.eval(p);
                let (fm, _) = self.eval(m);
                jac[0][c] = (fp[0] - fm[0]) / (2.0 * step);
                jac[1][c] = (fp[1] - fm[1]) / (2.0 * step);
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let d = [
                -(jac[1][1] * f[0] - jac[0][1] * f[1]) / det,
                -(-jac[1][0] * f[0] + jac[0][0] * f[1]) / det,
            ];
            let mut t = 1.0;
            let mut accepted = false;
            while t > 1e-6 {
                let cand = [o[0] + t * d[0], o[1] + t * d[1]];
                if self.model.contains(cand) {
                    let r = self.relative(cand);
                    if r < res {
                        o = cand;
                        res = r;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            trace.push(res);
            if !accepted {
                break;
            }
        }
        (o, res, iters)
    }
}

/// Finds `o` with `∫_Ω G(r_o) ξ_i = 0` for the mesh mass matrix: damped
/// Newton with a finite-difference Jacobian from the area barycenter, then a
/// grid search over the mesh bounding box if that stalls.
pub fn select_center(model: &ConformalModel, mesh: &Mesh, mass: &CsrMatrix, g: &RadialProfile, tol: f64) -> Result<CenterResult> {
    let weights = mass.mul_vec(&vec![1.0; mass.n]);
    let map = CenterMap { model, mesh, g, weights };
    let total: f64 = map.weights.iter().sum();
    let mut bary = [0.0; 2];
    for (x, w) in mesh.vertices.iter().zip(&map.weights) {
        bary[0] += w * x[0] / total;
        bary[1] += w * x[1] / total;
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for x in &mesh.vertices {
        for c in 0..2 {
            lo[c] = lo[c].min(x[c]);
            hi[c] = hi[c].max(x[c]);
        }
    }
    let step = 1e-6 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let mut trace = Vec::new();
    let (o, res, iters) = map.newton(bary, step, &mut trace);
    // aim well below the requested tolerance so the residual is not a limiting factor
    if res <= 1e-2 * tol {
        return Ok(CenterResult {
            center: o,
            residual: res,
            strategy: "newton".into(),
            iterations: iters,
            trace,
        });
    }
    let poly: Vec<[f64; 2]> = mesh.boundary.iter().map(|&b| mesh.vertices[b]).collect();
    let mut best = (f64::INFINITY, bary);
    for i in 0..=16 {
        for j in 0..=16 {
            let p = [
                lo[0] + (hi[0] - lo[0]) * i as f64 / 16.0,
                lo[1] + (hi[1] - lo[1]) * j as f64 / 16.0,
            ];
            if !crate::fem2d::point_in_polygon(&poly, p) {
                continue;
            }
            let r = map.relative(p);
            if r < best.0 {
                best = (r, p);
            }
        }
    }
    trace.push(f64::NAN);
    let (o, res, iters2) = map.newton(best.1, step, &mut trace);
    if res <= tol {
        return Ok(CenterResult {
            center: o,
            residual: res,
            strategy: "grid+newton".into(),
            iterations: iters + iters2,
            trace,
        });
    }
    Err(Error::Convergence(format!(
        "center selection stalled at relative residual {res:e}; trace {trace:?}"
    )))
}

/// Orthogonal `a` with `a·q` upper triangular and a nonnegative diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orthogonalization {
    pub a: Vec<Vec<f64>>,
    pub rank_deficient: bool,
    /// Largest `|(a·q)_{ij}|`, `i > j`, relative to `‖q‖`.
    pub lower_residual: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Householder QR of `q` with a positive-diagonal convention; `a = Qᵀ`
/// (rows flipped where needed). A rank-deficient `q` is flagged with a
/// warning. Its rotation still triangularizes `q` unless the first column
/// vanishes, in which case every rotation does and the identity is returned.
pub fn orthogonalize(q: &[Vec<f64>]) -> Orthogonalization {
    let n = q.len();
    let qm = DMatrix::from_fn(n, n, |i, j| q[i][j]);
    let norm = qm.norm();
    let identity = DMatrix::<f64>::identity(n, n);
    let (a, rank_deficient) = if norm > 0.0 && qm.column(0).norm() > 1e-12 * norm {
        let qr = qm.clone().qr();
        let (qq, r) = (qr.q(), qr.r());
        let mut a = qq.transpose();
        for i in 0..n {
            if r[(i, i)] < 0.0 {
                for j in 0..n {
                    a[(i, j)] = -a[(i, j)];
                }
            }
        }
        (a, (0..n).any(|i| r[(i, i)].abs() <= 1e-12 * norm))
    } else {
        (identity, true)
    };
    let aq = &a * &qm;
    let mut lower: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            lower = lower.max(aq[(i, j)].abs() / norm.max(f64::MIN_POSITIVE));
        }
    }
    Orthogonalization {
        a: (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect(),
        rank_deficient,
        lower_residual: lower,
        warning: rank_deficient.then(|| {
            "q is numerically rank deficient: some trial functions are already orthogonal to the lower eigenfunctions".to_string()
        }),
    }
}

/// Everything the trial-function argument needs on one discretized domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialSetup {
    pub center: CenterResult,
    /// Radius of the ball with the same volume.
    pub radius: f64,
    pub mu1_ball: f64,
    pub volume: f64,
    pub q: Vec<Vec<f64>>,
    pub orthogonalization: Orthogonalization,
    /// Largest geodesic distance from `o` to a vertex.
    pub max_distance: f64,
    #[serde(skip)]
    pub g: Option<RadialProfile>,
    /// Rotated trial functions `Σ_k a_ik v_k` at the vertices.
    #[serde(skip)]
    pub trial: Vec<Vec<f64>>,
}

impl TrialSetup {
    pub fn build(
        model: &ConformalModel,
        mesh: &Mesh,
        system: &FemSystem,
        spectrum: &SpectrumResult,
        ball: &BallEig,
        volume: f64,
    ) -> Result<Self> {
        if spectrum.eigenvectors.len() < 3 {
            return Err(Error::InvalidArgument("need eigenvectors u₀, u₁, u₂".into()));
        }
        let g = ball.extended();
        let center = select_center(model, mesh, &system.mass, &g, 1e-8)?;
        let v = trial_functions(model, mesh, &g, center.center);
        let q: Vec<Vec<f64>> = (0..2)
            .map(|i| (1..=2).map(|j| system.mass.form(&v[i], &spectrum.eigenvectors[j])).collect())
            .collect();
        let orth = orthogonalize(&q);
        let trial: Vec<Vec<f64>> = (0..2)
            .map(|i| {
                (0..v[0].len())
                    .map(|k| orth.a[i][0] * v[0][k] + orth.a[i][1] * v[1][k])
                    .collect()
            })
            .collect();
        let max_distance = mesh
            .vertices
            .iter()
            .map(|x| model.distance(center.center, *x))
            .fold(0.0, f64::max);
        Ok(Self {
            center,
            radius: ball.radius,
            mu1_ball: ball.mu1,
            volume,
            q,
            orthogonalization: orth,
            max_distance,
            g: Some(g),
            trial,
        })
    }
}

/// Discrete trial bounds `vᵢᵀKvᵢ / vᵢᵀMvᵢ ≥ μᵢ` together with the
/// orthogonality premises they rest on.
pub fn trial_bound_check(setup: &TrialSetup, system: &FemSystem, spectrum: &SpectrumResult, inputs: &CheckInputs) -> Vec<Check> {
    let (k, m) = (&system.stiffness, &system.mass);
    let mut out = vec![Check::new(
        "center_condition",
        "trial functions have zero mean at the selected center",
        Relation::Le,
        setup.center.residual,
        0.0,
        1.0,
        1e-8,
        Provenance::Fem,
        inputs,
    )];
    for (i, v) in setup.trial.iter().enumerate() {
        let idx = i + 1;
        let vm = m.form(v, v);
        for j in 0..idx {
            let u = &spectrum.eigenvectors[j];
            let c = m.form(v, u) / (vm * m.form(u, u)).sqrt();
            let check = Check::new(
                format!("orthogonality[{idx},{j}]"),
                "trial function orthogonal to lower eigenfunctions",
                Relation::Le,
                c.abs(),
                0.0,
                1.0,
                1e-6,
                Provenance::Fem,
                inputs,
            );
            out.push(match (&setup.orthogonalization.warning, j) {
                (Some(w), 1..) => check.with_note(w.clone()),
                _ => check,
            });
        }
        let ratio = k.form(v, v) / vm / spectrum.eigenvalues[idx];
        out.push(
            Check::new(
                format!("trial_bound[{idx}]"),
                "Rayleigh quotient of the trial function dominates the eigenvalue",
                Relation::Ge,
                ratio,
                1.0,
                1.0,
                1e-6,
                Provenance::Fem,
                inputs,
            )
            .with_note("lhs = (vᵀKv / vᵀMv) / μ_i"),
        );
    }
    out
}
