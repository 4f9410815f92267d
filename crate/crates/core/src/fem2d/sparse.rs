use std::collections::VecDeque;

use crate::{Error, Result};

/// Compressed sparse row matrix with sorted column indices.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from triplets; duplicates are summed in the order given, so the
    /// result is independent of how the triplets were produced as long as
    /// their order is fixed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n + 1];
        for &(i, _, _) in triplets {
            counts[i + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        // stable bucket by row
        let mut slot = counts.clone();
        let mut by_row = vec![(0usize, 0.0f64); triplets.len()];
        for &(i, j, v) in triplets {
            by_row[slot[i]] = (j, v);
            slot[i] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            let row = &mut by_row[counts[i]..counts[i + 1]];
            row.sort_by_key(|e| e.0);
            for &(j, v) in row.iter() {
                if cols.len() > row_ptr[i] && *cols.last().unwrap() == j {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr[i + 1] = cols.len();
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |p| (self.cols[p], self.vals[p]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match r.binary_search(&j) {
            Ok(p) => self.vals[self.row_ptr[i] + p],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `xᵀ A y`.
    pub fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>())
            .sum()
    }

    /// `A + s B` for matrices with identical sparsity.
    pub fn add_scaled(&self, s: f64, other: &CsrMatrix) -> Result<CsrMatrix> {
        if self.row_ptr != other.row_ptr || self.cols != other.cols {
            return Err(Error::InvalidArgument("sparsity patterns differ".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.vals.iter_mut().zip(&other.vals) {
            *a += s * b;
        }
        Ok(out)
    }

    /// True when the stored pattern and values are exactly symmetric.
    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| self.get(j, i).to_bits() == v.to_bits()))
    }
}

/// Reverse Cuthill–McKee ordering; `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n;
    let degree: Vec<usize> = (0..n).map(|i| a.row_ptr[i + 1] - a.row_ptr[i]).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        // start each component from a pseudo-peripheral node: min degree,
        // then the last node of a BFS from it
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| (degree[i], i)).unwrap();
        let start = last_of_bfs(a, seed, &visited, &degree);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = a.row(v).map(|(j, _)| j).filter(|&j| !visited[j]).collect();
            nbrs.sort_by_key(|&j| (degree[j], j));
            for j in nbrs {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

fn last_of_bfs(a: &CsrMatrix, seed: usize, visited: &[bool], degree: &[usize]) -> usize {
    let mut seen = visited.to_vec();
    let mut queue = VecDeque::from([seed]);
    seen[seed] = true;
    let mut last = seed;
    while let Some(v) = queue.pop_front() {
        last = v;
        let mut nbrs: Vec<usize> = a.row(v).map(|(j, _)| j).filter(|&j| !seen[j]).collect();
        nbrs.sort_by_key(|&j| (degree[j], j));
        for j in nbrs {
            seen[j] = true;
            queue.push_back(j);
        }
    }
    last
}

/// `LDLᵀ` factorization of a symmetric positive-definite matrix stored by
/// variable-band (skyline) rows after a bandwidth-reducing permutation.
#[derive(Clone, Debug)]
pub struct SkylineLdl {
    n: usize,
    perm: Vec<usize>,
    /// `first[i]` = first stored column of permuted row `i`.
    first: Vec<usize>,
    /// start of row `i` in `vals`; row holds columns `first[i]..i` of `L`.
    start: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
}

impl SkylineLdl {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n;
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (old, &i) in inv.iter().enumerate() {
            for (jold, _) in a.row(old) {
                let j = inv[jold];
                if j < i {
                    first[i] = first[i].min(j);
                }
            }
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i]);
        }
        let mut vals = vec![0.0; start[n]];
        let mut diag = vec![0.0; n];
        for (old, &i) in inv.iter().enumerate() {
            for (jold, v) in a.row(old) {
                let j = inv[jold];
                if j < i {
                    vals[start[i] + j - first[i]] = v;
                } else if j == i {
                    diag[i] = v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            // row i: t_j = a_ij − Σ_k t_k l_jk with rows j < i already holding l, then l_ij = t_j / d_j
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let ti = &vals[start[i] + lo - fi..start[i] + j - fi];
                let lj = &vals[start[j] + lo - fj..start[j] + j - fj];
                let dot: f64 = ti.iter().zip(lj).map(|(a, b)| a * b).sum();
                vals[start[i] + j - fi] -= dot;
            }
            let mut d = diag[i];
            for j in fi..i {
                let t = vals[start[i] + j - fi];
                let l = t / diag[j];
                d -= t * l;
                vals[start[i] + j - fi] = l;
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Convergence(format!("matrix not positive definite at pivot {i}: {d:e}")));
            }
            diag[i] = d;
        }
        Ok(Self {
            n,
            perm,
            first,
            start,
            vals,
            diag,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Stored entries of `L` (envelope size).
    pub fn envelope(&self) -> usize {
        self.vals.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.start[i]..self.start[i + 1]];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(l, x)| l * x).sum();
            y[i] -= s;
        }
        for i in 0..n {
            y[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let yi = y[i];
            let row = &self.vals[self.start[i]..self.start[i + 1]];
            for (l, x) in row.iter().zip(&mut y[fi..i]) {
                *x -= l * yi;
            }
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = y[new];
        }
        out
    }
}
