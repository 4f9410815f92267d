//! Gauss–Legendre rules on intervals and collapsed (Duffy) rules on triangles.

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule, exact for polynomials of degree `2n-1`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            // Newton on P_n from the Chebyshev-like initial guess
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        pieces: usize,
        mut f: F,
    ) -> f64 {
        let h = (b - a) / pieces as f64;
        (0..pieces)
            .map(|j| {
                let lo = a + j as f64 * h;
                let hi = if j + 1 == pieces { b } else { lo + h };
                self.integrate(lo, hi, &mut f)
            })
            .sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature on the reference triangle `{(s,t): s,t ≥ 0, s+t ≤ 1}`, weights summing to 1/2.
#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Collapsed Gauss rule with `n×n` points, exact to degree `2n-2`.
    pub fn collapsed(n: usize) -> Self {
        let g = GaussLegendre::new(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (&xi, &wi) in g.nodes.iter().zip(&g.weights) {
            let u = 0.5 * (xi + 1.0);
            for (&xj, &wj) in g.nodes.iter().zip(&g.weights) {
                let v = 0.5 * (xj + 1.0);
                points.push([u, (1.0 - u) * v]);
                weights.push(0.25 * wi * wj * (1.0 - u));
            }
        }
        Self { points, weights }
    }

    /// Three edge-midpoint rule, exact to degree 2.
    pub fn edge_midpoints() -> Self {
        Self {
            points: vec![[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]],
            weights: vec![1.0 / 6.0; 3],
        }
    }

    /// Integrates `f` over the triangle with the given vertices.
    pub fn integrate<F: FnMut([f64; 2]) -> f64>(&self, tri: [[f64; 2]; 3], mut f: F) -> f64 {
        let [a, b, c] = tri;
        let jac = ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
        let mut acc = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            let x = [
                a[0] + p[0] * (b[0] - a[0]) + p[1] * (c[0] - a[0]),
                a[1] + p[0] * (b[1] - a[1]) + p[1] * (c[1] - a[1]),
            ];
            acc += w * f(x);
        }
        acc * jac
    }
}
