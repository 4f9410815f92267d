use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::assemble::FemSystem;
use super::model::ConformalModel;
use super::sparse::{CsrMatrix, SkylineLdl};
use crate::{Error, Result};

/// Smallest Neumann eigenpairs of a discretized domain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub model: Option<ConformalModel>,
    pub h_max: Option<f64>,
    pub nv: usize,
    /// `μ₀ ≤ μ₁ ≤ …`; `μ₀` is the Rayleigh quotient of the constant.
    pub eigenvalues: Vec<f64>,
    /// `‖Ku − μMu‖ / (‖Mu‖(1 + μ))` for each pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    /// M-orthonormal eigenvectors sampled at vertices.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
}

impl SpectrumResult {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Extra block vectors beyond the requested count.
    pub guard: usize,
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub shift: f64,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            guard: 6,
            residual_tol: 1e-10,
            max_iterations: 300,
            shift: 1.0,
            seed: 0,
        }
    }
}

pub fn solve_spectrum(system: &FemSystem, q: usize) -> Result<SpectrumResult> {
    solve_spectrum_with(system, q, EigenOptions::default())
}

/// The `q` smallest eigenpairs (constant mode included) of `K u = μ M u`, by
/// block subspace iteration with `(K + σM)⁻¹ M` on the M-orthogonal
/// complement of the constants, followed by Rayleigh–Ritz.
pub fn solve_spectrum_with(system: &FemSystem, q: usize, opts: EigenOptions) -> Result<SpectrumResult> {
    let (k, m) = (&system.stiffness, &system.mass);
    let n = k.n;
    if q < 2 {
        return Err(Error::InvalidArgument(format!("need q ≥ 2 eigenpairs, got {q}")));
    }
    let wanted = q - 1;
    let block = (wanted + opts.guard).min(n - 1);
    if wanted > block {
        return Err(Error::InvalidArgument(format!("q = {q} exceeds the {n} mesh vertices")));
    }
    let shifted = k.add_scaled(opts.shift, m)?;
    let ldl = SkylineLdl::factor(&shifted)?;

    let ones = vec![1.0; n];
    let m_ones = m.mul_vec(&ones);
    let total = m_ones.iter().sum::<f64>();
    let deflate = |x: &mut [f64]| {
        let c = dot(&m_ones, x) / total;
        x.iter_mut().for_each(|v| *v -= c);
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect())
        .collect();
    x.iter_mut().for_each(|v| deflate(v));
    m_orthonormalize(m, &mut x)?;

    let mut history = Vec::new();
    let mut ritz = vec![0.0; block];
    for iter in 1..=opts.max_iterations {
        let mut y: Vec<Vec<f64>> = x
            .par_iter()
            .map(|v| {
                let mut w = ldl.solve(&m.mul_vec(v));
                deflate(&mut w);
                w
            })
            .collect();
        m_orthonormalize(m, &mut y)?;
        let ky: Vec<Vec<f64>> = y.par_iter().map(|v| k.mul_vec(v)).collect();
        let mut kr = DMatrix::zeros(block, block);
        for i in 0..block {
            for j in i..block {
                let v = 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i]));
                kr[(i, j)] = v;
                kr[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(kr);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        x = order
            .iter()
            .map(|&c| {
                let mut v = vec![0.0; n];
                for (j, yj) in y.iter().enumerate() {
                    let w = eig.eigenvectors[(j, c)];
                    v.iter_mut().zip(yj).for_each(|(a, b)| *a += w * b);
                }
                v
            })
            .collect();
        ritz = order.iter().map(|&c| eig.eigenvalues[c]).collect();
        let res: Vec<f64> = (0..wanted).map(|i| residual(k, m, &x[i], ritz[i])).collect();
        let worst = res.iter().copied().fold(0.0, f64::max);
        history.push(worst);
        if worst <= opts.residual_tol {
            return Ok(finish(k, m, &ones, total, x, &ritz[..wanted], res, iter));
        }
    }
    Err(Error::Convergence(format!(
        "subspace iteration did not reach residual {:e} in {} iterations; worst residual per iteration: {:?}; ritz values {:?}",
        opts.residual_tol,
        opts.max_iterations,
        history,
        &ritz[..wanted]
    )))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    k: &CsrMatrix,
    m: &CsrMatrix,
    ones: &[f64],
    total: f64,
    mut x: Vec<Vec<f64>>,
    ritz: &[f64],
    res: Vec<f64>,
    iterations: usize,
) -> SpectrumResult {
    let mu0 = k.form(ones, ones) / total;
    let c = 1.0 / total.sqrt();
    let mut eigenvalues = vec![mu0];
    eigenvalues.extend_from_slice(ritz);
    let mut residuals = vec![residual(k, m, ones, mu0)];
    residuals.extend(res);
    x.truncate(ritz.len());
    // deterministic sign: largest-magnitude entry positive
    for v in &mut x {
        let big = v.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
        if big < 0.0 {
            v.iter_mut().for_each(|e| *e = -*e);
        }
    }
    let mut eigenvectors = vec![vec![c; ones.len()]];
    eigenvectors.extend(x);
    SpectrumResult {
        model: None,
        h_max: None,
        nv: ones.len(),
        eigenvalues,
        residuals,
        iterations,
        eigenvectors,
    }
}

fn residual(k: &CsrMatrix, m: &CsrMatrix, v: &[f64], mu: f64) -> f64 {
    let kv = k.mul_vec(v);
    let mv = m.mul_vec(v);
    let r: f64 = kv.iter().zip(&mv).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt();
    r / (norm(&mv) * (1.0 + mu.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Modified Gram–Schmidt in the M inner product, two passes.
fn m_orthonormalize(m: &CsrMatrix, x: &mut [Vec<f64>]) -> Result<()> {
    for _ in 0..2 {
        for i in 0..x.len() {
            for j in 0..i {
                let mj = m.mul_vec(&x[j]);
                let c = dot(&mj, &x[i]);
                let (head, tail) = x.split_at_mut(i);
                tail[0].iter_mut().zip(&head[j]).for_each(|(a, b)| *a -= c * b);
            }
            let nrm = m.form(&x[i], &x[i]).sqrt();
            if !(nrm > 1e-300) {
                return Err(Error::Convergence("block vectors became linearly dependent".into()));
            }
            x[i].iter_mut().for_each(|v| *v /= nrm);
        }
    }
    Ok(())
}
