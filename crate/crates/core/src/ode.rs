//! Dormand–Prince 5(4) explicit Runge–Kutta integrator with step-size
//! control, mandatory output stations and an early-stop observer.

use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 2_000_000;

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`.
///
/// Every entry of `stations` inside `(t0, t1]` is hit exactly. `observe` is
/// called at `t0`, after every accepted step and at each station with
/// `(t, y, y')`; returning `false` stops the integration early, in which case
/// the state at the stopping time is returned.
pub(crate) fn integrate<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: Tolerance,
    stations: &[f64],
    mut observe: O,
) -> Result<(f64, [f64; N])>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N], &[f64; N]) -> bool,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    if !observe(t, &y, &k1) {
        return Ok((t, y));
    }
    let span = t1 - t0;
    let mut h = initial_step(&f, t, &y, &k1, span, tol);
    let mut next_station = stations.iter().copied().filter(|&s| s > t0 && s <= t1);
    let mut target = next_station.next().unwrap_or(t1);
    let mut steps = 0usize;

    while t < t1 {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Convergence(format!(
                "ODE integration exceeded {MAX_STEPS} steps at t={t}"
            )));
        }
        let h_prop = h;
        let mut hit = false;
        if t + h >= target || (target - t - h) < 1e-12 * span.abs() {
            h = target - t;
            hit = true;
        }
        let ys = |k: &[&[f64; N]], c: &[f64]| -> [f64; N] {
            let mut out = y;
            for (kk, cc) in k.iter().zip(c) {
                for i in 0..N {
                    out[i] += h * cc * kk[i];
                }
            }
            out
        };
        let k2 = f(t + C2 * h, &ys(&[&k1], &[A21]));
        let k3 = f(t + C3 * h, &ys(&[&k1, &k2], &[A31, A32]));
        let k4 = f(t + C4 * h, &ys(&[&k1, &k2, &k3], &[A41, A42, A43]));
        let k5 = f(t + C5 * h, &ys(&[&k1, &k2, &k3, &k4], &[A51, A52, A53, A54]));
        let k6 = f(
            t + h,
            &ys(&[&k1, &k2, &k3, &k4, &k5], &[A61, A62, A63, A64, A65]),
        );
        let ynew = ys(&[&k1, &k3, &k4, &k5, &k6], &[B1, B3, B4, B5, B6]);
        let k7 = f(t + h, &ynew);

        let mut err = 0.0f64;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(ynew[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            h *= 0.1;
            if h.abs() < 1e-300 {
                return Err(Error::Convergence(format!("ODE step underflow at t={t}")));
            }
            continue;
        }
        if err <= 1.0 {
            t = if hit { target } else { t + h };
            y = ynew;
            k1 = k7;
            if !observe(t, &y, &k1) {
                return Ok((t, y));
            }
            if hit {
                target = next_station.next().unwrap_or(t1);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = if hit { h_prop.max(h * fac) } else { h * fac };
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h.abs() < 1e-14 * t.abs().max(1e-300) {
                return Err(Error::Convergence(format!("ODE step size collapsed at t={t}")));
            }
        }
    }
    Ok((t, y))
}

fn initial_step<const N: usize, F>(
    f: &F,
    t: f64,
    y: &[f64; N],
    dy: &[f64; N],
    span: f64,
    tol: Tolerance,
) -> f64
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let norm = |v: &[f64; N], base: &[f64; N]| -> f64 {
        v.iter()
            .zip(base)
            .map(|(a, b)| (a / (tol.atol + tol.rtol * b.abs())).powi(2))
            .sum::<f64>()
            .sqrt()
            / (N as f64).sqrt()
    };
    let d0 = norm(y, y);
    let d1 = norm(dy, y);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span.abs());
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += h0 * dy[i];
    }
    let dy1 = f(t + h0, &y1);
    let mut diff = [0.0; N];
    for i in 0..N {
        diff[i] = dy1[i] - dy[i];
    }
    let d2 = norm(&diff, y) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span.abs())
}
