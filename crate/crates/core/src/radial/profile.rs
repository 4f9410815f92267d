use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// Radial eigenfunction `g` of the ball problem.
    BallEigenfunction,
    /// `G`: `g` continued by the constant `g(R)` beyond `R`.
    Extended,
    /// Sign function `s(r)` of the monotonicity lemmas.
    Sign,
    /// Radial factor of an annulus mode.
    AnnulusMode,
}

/// A radial function sampled on a strictly increasing grid.
///
/// Evaluation is cubic Hermite between grid points (slopes either supplied by
/// the solver or estimated by centered differences) and exact at grid points.
/// An [`ProfileKind::Extended`] profile is constant beyond its last grid point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RadialProfile {
    pub kind: ProfileKind,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl RadialProfile {
    pub fn new(kind: ProfileKind, grid: Vec<f64>, values: Vec<f64>, slopes: Option<Vec<f64>>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::InvalidArgument(
                "profile needs at least two samples and matching lengths".into(),
            ));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("profile grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("profile values must be finite".into()));
        }
        let slopes = match slopes {
            Some(s) if s.len() == grid.len() => s,
            Some(_) => return Err(Error::InvalidArgument("slope length mismatch".into())),
            None => finite_difference_slopes(&grid, &values),
        };
        Ok(Self {
            kind,
            grid,
            values,
            slopes,
        })
    }

    pub fn start(&self) -> f64 {
        self.grid[0]
    }

    pub fn end(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    fn locate(&self, r: f64) -> usize {
        match self.grid.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(self.grid.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.grid.len() - 2),
        }
    }

    /// Value and derivative at `r`.
    pub fn eval_with_slope(&self, r: f64) -> (f64, f64) {
        let last = self.grid.len() - 1;
        if r >= self.grid[last] {
            if self.kind == ProfileKind::Extended || r == self.grid[last] {
                let d = if self.kind == ProfileKind::Extended && r > self.grid[last] {
                    0.0
                } else {
                    self.slopes[last]
                };
                return (self.values[last], d);
            }
        }
        let i = self.locate(r);
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1;
        let dv = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * d1)
            / h;
        (v, dv)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.eval_with_slope(r).0
    }

    pub fn max_abs_slope(&self) -> f64 {
        self.slopes.iter().fold(0.0f64, |a, b| a.max(b.abs()))
    }

    /// Two-column `r,value` CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,value\n");
        for (r, v) in self.grid.iter().zip(&self.values) {
            let _ = writeln!(out, "{r:.16e},{v:.16e}");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn from_csv(kind: ProfileKind, text: &str) -> Result<Self> {
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with('r')) {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected two columns", lineno + 1)))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            };
            grid.push(parse(a)?);
            values.push(parse(b)?);
        }
        Self::new(kind, grid, values, None)
    }
}

fn finite_difference_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (y[1] - y[0]) / (x[1] - x[0])
            } else if i == n - 1 {
                (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2])
            } else {
                // three-point derivative on a nonuniform grid
                let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                (y[i + 1] - y[i]) * h0 / (h1 * (h0 + h1)) + (y[i] - y[i - 1]) * h1 / (h0 * (h0 + h1))
            }
        })
        .collect()
}
