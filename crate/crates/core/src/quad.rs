//! Quadrature helpers: adaptive Simpson on real intervals, composite
//! Gauss-Legendre on complex segments, and trapezoid rules on circles
//! for Cauchy integrals.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex number stored as `mantissa * exp(log_scale)`; used wherever a
/// product of many factors can leave the binary64 range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn from_log(log: Complex64) -> Self {
        Scaled {
            mantissa: Complex64::from_polar(1.0, log.im),
            log_scale: log.re,
        }
    }

    pub fn zero() -> Self {
        Scaled {
            mantissa: Complex64::new(0.0, 0.0),
            log_scale: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    /// Natural log; `-inf` real part for zero.
    pub fn ln(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(f64::NEG_INFINITY, 0.0);
        }
        self.mantissa.ln() + self.log_scale
    }

    pub fn log_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.norm().ln() + self.log_scale
    }

    /// Plain value; may overflow to infinity or underflow to zero.
    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            return self.mantissa;
        }
        self.mantissa * self.log_scale.exp()
    }
}

/// Sum of `exp(logs[i])` as a [`Scaled`]; `-inf` real parts contribute zero.
pub fn log_sum_exp(logs: &[Complex64]) -> Scaled {
    let shift = logs
        .iter()
        .map(|l| l.re)
        .filter(|r| r.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Scaled::zero();
    }
    let sum: Complex64 = logs
        .iter()
        .filter(|l| l.re.is_finite())
        .map(|l| (l - shift).exp())
        .sum();
    Scaled {
        mantissa: sum,
        log_scale: shift,
    }
}

fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` with absolute tolerance
/// `tol`. The interval is split into `panels` pieces before refinement so
/// that narrow features are not stepped over.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, panels: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let ptol = tol / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { lo + h };
            let fa = f(lo);
            let fb = f(hi);
            let fm = f(0.5 * (lo + hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_step(&f, lo, hi, fa, fm, fb, whole, ptol, 48)
        })
        .sum()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (x * p0 - p1) / (x * x - 1.0);
            let dx = p0 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl15() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(15))
}

/// Panel value and the matching estimate of `integral |f| |dz|`.
fn gl_panel<F>(f: &F, a: Complex64, b: Complex64) -> Result<(Complex64, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let (x, w) = gl15();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut l1 = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        let v = f(mid + half * *xi)?;
        acc += v * *wi;
        l1 += v.norm() * *wi;
    }
    Ok((acc * half, l1 * half.norm()))
}

/// `integral_a^b f(z) dz` along the straight segment, by 15-point
/// Gauss-Legendre with adaptive bisection. `tol` is relative to the
/// larger of the integral and the integral of `|f|`.
pub fn segment_integral<F>(f: &F, a: Complex64, b: Complex64, tol: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (whole, l1) = gl_panel(f, a, b)?;
    let out = segment_rec(f, a, b, whole, tol * l1.max(whole.norm()), 0)?;
    if !(out.re.is_finite() && out.im.is_finite()) {
        return Err(Error::NonFinite("segment integral".into()));
    }
    Ok(out)
}

fn segment_rec<F>(
    f: &F,
    a: Complex64,
    b: Complex64,
    whole: Complex64,
    abs_tol: f64,
    depth: u32,
) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let m = 0.5 * (a + b);
    let (left, _) = gl_panel(f, a, m)?;
    let (right, _) = gl_panel(f, m, b)?;
    let refined = left + right;
    if (refined - whole).norm() <= abs_tol.max(1e-300) {
        return Ok(refined);
    }
    if depth >= 40 {
        return Err(Error::Quadrature(format!(
            "segment bisection exceeded depth 40 near {m}"
        )));
    }
    Ok(segment_rec(f, a, m, left, 0.5 * abs_tol, depth + 1)?
        + segment_rec(f, m, b, right, 0.5 * abs_tol, depth + 1)?)
}

/// Trapezoid estimate of the Taylor coefficient `F^(order)(c) / order!`
/// from samples on the circle `|zeta - c| = radius`. `log_at(u)` returns
/// `ln F(c + radius u)` for `u` on the unit circle, so that samples spanning
/// many orders of magnitude are combined without overflow.
fn taylor_coefficient<G>(log_at: &G, order: u32, radius: f64, points: usize) -> Result<(Scaled, f64)>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    let logs: Vec<Complex64> = (0..points)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / points as f64;
            let u = Complex64::from_polar(1.0, t);
            log_at(u).map(|l| l - Complex64::new(0.0, order as f64 * t))
        })
        .collect::<Result<_>>()?;
    let log_max = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max) - order as f64 * radius.ln();
    let mut s = log_sum_exp(&logs);
    s.mantissa /= points as f64;
    s.log_scale -= order as f64 * radius.ln();
    Ok((s, log_max))
}

/// Result of an adaptive circle rule.
#[derive(Debug, Clone, Copy)]
pub struct CircleRule {
    pub value: Scaled,
    pub points: usize,
    pub relative_change: f64,
    /// Log of the rounding level of the estimate, set by the largest sample.
    pub log_floor: f64,
}

/// Cauchy-integral derivative `F^(order)(c)` on the circle of `radius`
/// around `c`, doubling the trapezoid point count from `start` up to `cap`
/// until the relative change drops below `tol`.
pub fn cauchy_derivative<G>(
    log_at: &G,
    order: u32,
    radius: f64,
    start: usize,
    cap: usize,
    tol: f64,
) -> Result<CircleRule>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    let factorial: f64 = (1..=order).map(|k| k as f64).product();
    let mut m = start.max(4);
    let (mut prev, _) = taylor_coefficient(log_at, order, radius, m)?;
    loop {
        let next_m = 2 * m;
        let (next, log_max) = taylor_coefficient(log_at, order, radius, next_m)?;
        // Compare on the scale of the larger of the two. Values at the
        // rounding level of the largest sample are reported as zero.
        let shift = prev.log_scale.max(next.log_scale).max(log_max);
        let a = prev.mantissa * (prev.log_scale - shift).exp();
        let b = next.mantissa * (next.log_scale - shift).exp();
        let floor = 64.0 * f64::EPSILON * (log_max - shift).exp();
        let err = (a - b).norm();
        let rel = if err == 0.0 { 0.0 } else { err / b.norm().max(a.norm()) };
        let noise = b.norm().max(a.norm()) <= floor;
        if rel <= tol || noise {
            let mut value = if noise { Scaled::zero() } else { next };
            value.mantissa *= factorial;
            return Ok(CircleRule {
                value,
                points: next_m,
                relative_change: rel,
                log_floor: floor.ln() + shift + factorial.ln(),
            });
        }
        if next_m >= cap {
            return Err(Error::Quadrature(format!(
                "circle rule for derivative of order {order} changed by {rel:.3e} at {next_m} points"
            )));
        }
        m = next_m;
        prev = next;
    }
}
