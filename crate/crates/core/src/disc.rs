//! Geometry of the unit disc: points, Möbius maps, pseudohyperbolic
//! distance, Carleson boxes and a box-sampling Carleson estimator.
//!
//! A [`DiscPoint`] is stored as an unevaluated sum `base + offset` of two
//! binary64 complex numbers. Generators that cluster points far below the
//! spacing of binary64 near `|z| = 1` keep the cluster structure in the
//! offset, and every quantity that suffers cancellation (differences
//! `z - w`, `1 - |z|^2`, `1 - conj(z) w`) is computed from the two parts.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `1 - |c|^2` for a binary64 complex `c`, accurate to a few ulps of the
/// result even when `|c|` is within rounding of 1.
fn one_minus_abs_sq_exact(c: Complex64) -> f64 {
    let (xx, ex) = two_prod(c.re, c.re);
    let (yy, ey) = two_prod(c.im, c.im);
    let (s1, e1) = two_sum(1.0, -xx);
    let (s2, e2) = two_sum(s1, -yy);
    s2 + (e1 + e2 - ex - ey)
}

/// A point of the open unit disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscPoint {
    base: Complex64,
    offset: Complex64,
}

impl DiscPoint {
    pub fn new(value: Complex64) -> Result<Self> {
        Self::from_parts(value, Complex64::new(0.0, 0.0))
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    /// Point with value `base + offset`, where `offset` is carried
    /// separately instead of being rounded into `base`.
    pub fn from_parts(base: Complex64, offset: Complex64) -> Result<Self> {
        let p = DiscPoint { base, offset };
        let finite = base.re.is_finite()
            && base.im.is_finite()
            && offset.re.is_finite()
            && offset.im.is_finite();
        if !finite || p.one_minus_abs_sq() <= 0.0 {
            let v = p.value();
            return Err(Error::OutsideDisc { re: v.re, im: v.im });
        }
        Ok(p)
    }

    /// Shift by `delta`, keeping the base part.
    pub fn shifted(&self, delta: Complex64) -> Result<Self> {
        Self::from_parts(self.base, self.offset + delta)
    }

    /// Shift by `delta` without checking membership of the disc. Callers
    /// guarantee `|delta|` is below the distance to the boundary.
    pub(crate) fn shifted_unchecked(&self, delta: Complex64) -> Self {
        DiscPoint {
            base: self.base,
            offset: self.offset + delta,
        }
    }

    pub fn origin() -> Self {
        DiscPoint {
            base: Complex64::new(0.0, 0.0),
            offset: Complex64::new(0.0, 0.0),
        }
    }

    pub fn base(&self) -> Complex64 {
        self.base
    }

    pub fn offset(&self) -> Complex64 {
        self.offset
    }

    /// Rounded value `base + offset`.
    pub fn value(&self) -> Complex64 {
        self.base + self.offset
    }

    pub fn modulus(&self) -> f64 {
        self.value().norm()
    }

    pub fn is_origin(&self) -> bool {
        self.value() == Complex64::new(0.0, 0.0) && self.sub(&DiscPoint::origin()).norm() == 0.0
    }

    /// `self - other`, accurate to rounding of the result.
    pub fn sub(&self, other: &DiscPoint) -> Complex64 {
        let (sr, er) = two_sum(self.base.re, -other.base.re);
        let (si, ei) = two_sum(self.base.im, -other.base.im);
        let dr = er + (self.offset.re - other.offset.re);
        let di = ei + (self.offset.im - other.offset.im);
        Complex64::new(sr + dr, si + di)
    }

    /// `1 - |z|^2`.
    pub fn one_minus_abs_sq(&self) -> f64 {
        let head = one_minus_abs_sq_exact(self.base);
        let cross = 2.0 * (self.base.conj() * self.offset).re;
        head - cross - self.offset.norm_sqr()
    }

    /// `1 - |z|`.
    pub fn one_minus_modulus(&self) -> f64 {
        self.one_minus_abs_sq() / (1.0 + self.modulus())
    }

    /// `1 - conj(self) * other`, using
    /// `1 - conj(a) b = (1 - |a|^2) + conj(a) (a - b)`.
    pub fn one_minus_conj_mul(&self, other: &DiscPoint) -> Complex64 {
        let a = self.value();
        Complex64::new(self.one_minus_abs_sq(), 0.0) + a.conj() * self.sub(other)
    }

    /// Unnormalized pair `(head, tail)` with `head + tail = 1 - |z|^2`;
    /// points sharing a base differ only in `tail`.
    fn abs_sq_complement_key(&self) -> (f64, f64) {
        let head = one_minus_abs_sq_exact(self.base);
        let tail = -2.0 * (self.base.conj() * self.offset).re - self.offset.norm_sqr();
        (head, tail)
    }

    /// Total ordering by modulus, ties broken by argument.
    pub fn modulus_cmp(&self, other: &DiscPoint) -> Ordering {
        let (ha, ta) = self.abs_sq_complement_key();
        let (hb, tb) = other.abs_sq_complement_key();
        hb.total_cmp(&ha)
            .then_with(|| tb.total_cmp(&ta))
            .then_with(|| self.value().arg().total_cmp(&other.value().arg()))
    }
}

impl TryFrom<Complex64> for DiscPoint {
    type Error = Error;

    fn try_from(value: Complex64) -> Result<Self> {
        DiscPoint::new(value)
    }
}

/// Disc automorphism `(z - w) / (1 - conj(z) w)`.
pub fn phi_map(z: &DiscPoint, w: &DiscPoint) -> Complex64 {
    z.sub(w) / z.one_minus_conj_mul(w)
}

/// Pseudohyperbolic distance `|phi_map(z, w)|`.
pub fn pseudo_dist(z: &DiscPoint, w: &DiscPoint) -> f64 {
    z.sub(w).norm() / z.one_minus_conj_mul(w).norm()
}

/// Representative of `angle` modulo `2 pi` in `(-pi, pi]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// The box `{ |zeta| >= 1 - delta, |arg zeta - phi| <= pi delta }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlesonBox {
    delta: f64,
    phi: f64,
}

impl CarlesonBox {
    pub fn new(delta: f64, phi: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "box size delta must lie in (0, 1], got {delta}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter("box angle must be finite".into()));
        }
        Ok(CarlesonBox {
            delta,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn contains(&self, zeta: Complex64) -> bool {
        let r = zeta.norm();
        if r < 1.0 - self.delta {
            return false;
        }
        if r == 0.0 {
            // Only reachable for delta = 1, where every angle is covered.
            return true;
        }
        wrap_angle(zeta.arg() - self.phi).abs() <= PI * self.delta
    }

    /// Lebesgue area of the box.
    pub fn area(&self) -> f64 {
        let inner = 1.0 - self.delta;
        PI * self.delta * (1.0 - inner * inner)
    }
}

pub fn box_contains(b: &CarlesonBox, zeta: Complex64) -> bool {
    b.contains(zeta)
}

/// Resolution of the per-box midpoint rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxQuadrature {
    pub radial_cells: usize,
    pub angular_cells: usize,
}

impl Default for BoxQuadrature {
    fn default() -> Self {
        BoxQuadrature {
            radial_cells: 64,
            angular_cells: 64,
        }
    }
}

/// `mu(Q)` for `d mu = density dA`, by the polar tensor-product midpoint rule.
pub fn box_measure<F>(density: &F, b: &CarlesonBox, quad: BoxQuadrature) -> Result<f64>
where
    F: Fn(Complex64) -> f64 + Sync + ?Sized,
{
    let nr = quad.radial_cells.max(1);
    let na = quad.angular_cells.max(1);
    let r0 = 1.0 - b.delta;
    let dr = b.delta / nr as f64;
    let half = PI * b.delta;
    let dt = 2.0 * half / na as f64;
    let mut total = 0.0;
    for i in 0..nr {
        let r = r0 + (i as f64 + 0.5) * dr;
        let mut ring = 0.0;
        for j in 0..na {
            let t = b.phi - half + (j as f64 + 0.5) * dt;
            let value = density(Complex64::from_polar(r, t));
            if !value.is_finite() {
                return Err(Error::NonFinite(format!(
                    "density at r = {r}, theta = {t} is {value}"
                )));
            }
            ring += value;
        }
        total += ring * r * dr * dt;
    }
    Ok(total)
}

/// One row of a Carleson scan: the largest `mu(Q_delta) / delta` over the
/// sampled angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlesonRow {
    pub delta: f64,
    pub ratio: f64,
    pub phi_at_max: f64,
}

/// `mu(Q_delta) / delta` maximised over `angular_samples` equally spaced
/// box angles, for each `delta`.
pub fn carleson_scan<F>(
    density: &F,
    deltas: &[f64],
    angular_samples: usize,
    quad: BoxQuadrature,
) -> Result<Vec<CarlesonRow>>
where
    F: Fn(Complex64) -> f64 + Sync + ?Sized,
{
    if angular_samples == 0 {
        return Err(Error::InvalidParameter("angular_samples must be positive".into()));
    }
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let boxes: Vec<CarlesonBox> = (0..angular_samples)
            .map(|j| CarlesonBox::new(delta, 2.0 * PI * j as f64 / angular_samples as f64))
            .collect::<Result<_>>()?;
        let ratios: Vec<f64> = boxes
            .par_iter()
            .map(|b| box_measure(density, b, quad).map(|m| m / delta))
            .collect::<Result<_>>()?;
        let (best, phi) = ratios
            .iter()
            .zip(&boxes)
            .fold((f64::NEG_INFINITY, 0.0), |acc, (&r, b)| {
                if r > acc.0 {
                    (r, b.phi)
                } else {
                    acc
                }
            });
        rows.push(CarlesonRow {
            delta,
            ratio: best,
            phi_at_max: phi,
        });
    }
    Ok(rows)
}

/// Lower estimate of the Carleson constant: the largest sampled
/// `mu(Q_delta) / delta`.
pub fn carleson_norm_estimate<F>(
    density: &F,
    deltas: &[f64],
    angular_samples: usize,
) -> Result<f64>
where
    F: Fn(Complex64) -> f64 + Sync + ?Sized,
{
    let rows = carleson_scan(density, deltas, angular_samples, BoxQuadrature::default())?;
    Ok(rows.iter().map(|r| r.ratio).fold(0.0, f64::max))
}
