//! Canonical products `P(z) = prod_n E(w_n(z), s)` with
//! `w_n(z) = (1 - |z_n|^2) / (1 - conj(z_n) z)`, evaluated as sums of
//! per-factor logarithms.
//!
//! A zero at the origin has `w_n == 1` identically, so its primary factor
//! would vanish everywhere; it contributes the factor `z` instead.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::disc::DiscPoint;
use crate::error::{Error, Result};
use crate::quad::{cauchy_derivative, CircleRule, Scaled};
use crate::scale::{genus_from_scale, GrowthScale};
use crate::sequence::{blaschke_sum, counting_N, BlaschkeSum, ZeroSequence};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Contour settings for Cauchy-integral derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourConfig {
    pub start: usize,
    pub cap: usize,
    pub tol: f64,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig {
            start: 16,
            cap: 1024,
            tol: 1e-7,
        }
    }
}

/// `S_s(w) = w + w^2/2 + ... + w^s/s`.
fn partial_log_series(w: Complex64, s: u32) -> Complex64 {
    let mut acc = ZERO;
    let mut p = ONE;
    for j in 1..=s {
        p *= w;
        acc += p / j as f64;
    }
    acc
}

/// Below this `|w|` the primary factor log is summed as a series.
const SERIES_RADIUS: f64 = 1.0 / 32.0;

/// `-sum_{j > s} w^j / j`, for `|w| < SERIES_RADIUS`.
fn log_primary_tail(w: Complex64, s: u32) -> Complex64 {
    let mut p = w.powu(s + 1);
    let mut acc = ZERO;
    let mut j = s + 1;
    loop {
        let term = p / j as f64;
        acc -= term;
        if term.norm_sqr() <= 1e-34 * acc.norm_sqr() || p == ZERO {
            return acc;
        }
        p *= w;
        j += 1;
    }
}

/// `E(w, s) = (1 - w) exp(w + ... + w^s / s)`.
pub fn primary_factor(w: Complex64, s: u32) -> Complex64 {
    (ONE - w) * partial_log_series(w, s).exp()
}

/// `log E(w, s)` with the principal branch of `log(1 - w)`.
pub fn primary_factor_log(w: Complex64, s: u32) -> Result<Complex64> {
    if w == ONE {
        return Err(Error::InvalidParameter("log E(w, s) at its zero w = 1".into()));
    }
    if w.norm_sqr() < SERIES_RADIUS * SERIES_RADIUS {
        Ok(log_primary_tail(w, s))
    } else {
        Ok((ONE - w).ln() + partial_log_series(w, s))
    }
}

/// Per-factor data at a point: `log E`, its first and second derivative.
#[derive(Debug, Clone, Copy)]
struct FactorTerms {
    log: Complex64,
    d1: Complex64,
    d2: Complex64,
}

impl std::ops::AddAssign for FactorTerms {
    fn add_assign(&mut self, o: Self) {
        self.log += o.log;
        self.d1 += o.d1;
        self.d2 += o.d2;
    }
}

impl FactorTerms {
    fn zero() -> Self {
        FactorTerms {
            log: ZERO,
            d1: ZERO,
            d2: ZERO,
        }
    }
}

/// `log f`, `f'/f` and `(f'/f)'` of a product at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogJet {
    pub log: Complex64,
    pub d1: Complex64,
    pub d1_prime: Complex64,
}

impl LogJet {
    /// `f''/f = (f'/f)' + (f'/f)^2`.
    pub fn d2(&self) -> Complex64 {
        self.d1_prime + self.d1 * self.d1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaIndexRow {
    pub lhs: f64,
    pub rhs_sum: f64,
}

#[derive(Debug, Clone)]
pub struct CanonicalProduct {
    zeros: ZeroSequence,
    genus: u32,
    radii: Vec<f64>,
    conj: Vec<Complex64>,
    one_minus_sq: Vec<f64>,
    blaschke: BlaschkeSum,
}

impl CanonicalProduct {
    pub fn new(zeros: ZeroSequence, genus: u32) -> Result<Self> {
        let nn = zeros.nearest_distances();
        let radii: Vec<f64> = zeros
            .points()
            .iter()
            .zip(&nn)
            .map(|(p, d)| (d / 4.0).min(p.one_minus_modulus() / 8.0))
            .collect();
        if let Some(k) = radii.iter().position(|r| !(*r > 0.0)) {
            return Err(Error::InvalidParameter(format!("exclusion radius of node {k} is not positive")));
        }
        let conj = zeros.points().iter().map(|p| p.value().conj()).collect();
        let one_minus_sq = zeros.points().iter().map(|p| p.one_minus_abs_sq()).collect();
        let blaschke = blaschke_sum(&zeros, genus);
        Ok(CanonicalProduct {
            zeros,
            genus,
            radii,
            conj,
            one_minus_sq,
            blaschke,
        })
    }

    /// Product with genus `floor(polya order) + 1`, or `genus` if larger.
    pub fn from_scale(zeros: ZeroSequence, scale: &GrowthScale, genus: Option<u32>) -> Result<Self> {
        let min = genus_from_scale(scale);
        let s = genus.unwrap_or(min);
        if s < min {
            return Err(Error::InvalidParameter(format!(
                "genus {s} is below {min}, the genus required by the scale"
            )));
        }
        Self::new(zeros, s)
    }

    pub fn zeros(&self) -> &ZeroSequence {
        &self.zeros
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn node(&self, k: usize) -> &DiscPoint {
        &self.zeros.points()[k]
    }

    pub fn exclusion_radius(&self, k: usize) -> f64 {
        self.radii[k]
    }

    pub fn exclusion_radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn blaschke(&self) -> &BlaschkeSum {
        &self.blaschke
    }

    pub fn tail_bound(&self) -> Option<f64> {
        self.blaschke.tail
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.len() {
            return Err(Error::InvalidParameter(format!("node index {k} out of range 0..{}", self.len())));
        }
        Ok(())
    }

    /// `w_n(z)`, `z - z_n` and `1 - conj(z_n) z`.
    fn w(&self, n: usize, z: &DiscPoint) -> (Complex64, Complex64, Complex64) {
        let zn = &self.zeros.points()[n];
        let q = zn.one_minus_conj_mul(z);
        let diff = z.sub(zn);
        (self.one_minus_sq[n] / q, diff, q)
    }

    pub fn w_at(&self, n: usize, z: &DiscPoint) -> Complex64 {
        self.w(n, z).0
    }

    fn terms(&self, n: usize, z: &DiscPoint) -> FactorTerms {
        let s = self.genus;
        let (w, diff, q) = self.w(n, z);
        if self.conj[n] == ZERO && self.zeros.points()[n].is_origin() {
            return FactorTerms {
                log: diff.ln(),
                d1: diff.inv(),
                d2: -(diff * diff).inv(),
            };
        }
        let log = if w.norm_sqr() < SERIES_RADIUS * SERIES_RADIUS {
            log_primary_tail(w, s)
        } else {
            (-self.conj[n] * diff / q).ln() + partial_log_series(w, s)
        };
        let ws1 = w.powu(s + 1);
        let d1 = ws1 / diff;
        let d2 = ws1 * ((s + 1) as f64 * self.conj[n] / (q * diff) - (diff * diff).inv());
        FactorTerms { log, d1, d2 }
    }

    fn log_term(&self, n: usize, z: &DiscPoint) -> Complex64 {
        let (w, diff, q) = self.w(n, z);
        if self.conj[n] == ZERO && self.zeros.points()[n].is_origin() {
            return diff.ln();
        }
        if w.norm_sqr() < SERIES_RADIUS * SERIES_RADIUS {
            log_primary_tail(w, self.genus)
        } else {
            (-self.conj[n] * diff / q).ln() + partial_log_series(w, self.genus)
        }
    }

    fn sum_logs(&self, z: &DiscPoint) -> Complex64 {
        let n = self.len();
        if n < 512 {
            (0..n).map(|i| self.log_term(i, z)).sum()
        } else {
            (0..n).into_par_iter().map(|i| self.log_term(i, z)).sum()
        }
    }

    fn sum_terms(&self, z: &DiscPoint, skip: Option<usize>) -> FactorTerms {
        let n = self.len();
        let fold = |acc: FactorTerms, i: usize| {
            if Some(i) == skip {
                acc
            } else {
                let mut a = acc;
                a += self.terms(i, z);
                a
            }
        };
        if n < 512 {
            (0..n).fold(FactorTerms::zero(), fold)
        } else {
            (0..n)
                .into_par_iter()
                .fold(FactorTerms::zero, fold)
                .reduce(FactorTerms::zero, |mut a, b| {
                    a += b;
                    a
                })
        }
    }

    /// Index of an exclusion disc containing `z`, other than `skip`.
    pub fn exclusion_hit(&self, z: &DiscPoint, skip: Option<usize>) -> Option<usize> {
        (0..self.len())
            .find(|&n| Some(n) != skip && z.sub(&self.zeros.points()[n]).norm() < self.radii[n])
    }

    /// Index of the exclusion disc containing `z`, if any.
    pub fn containing_exclusion(&self, z: &DiscPoint) -> Option<usize> {
        self.exclusion_hit(z, None)
    }

    /// `log P(z)`: a sum of principal logs, so the imaginary part is
    /// determined modulo `2 pi` only.
    pub fn log_eval(&self, z: &DiscPoint) -> Result<Complex64> {
        if let Some(node) = self.exclusion_hit(z, None) {
            return Err(Error::InsideExclusion { node });
        }
        Ok(self.log_eval_unchecked(z))
    }

    pub(crate) fn log_eval_unchecked(&self, z: &DiscPoint) -> Complex64 {
        self.sum_logs(z)
    }

    /// `log P`, `P'/P` and `(P'/P)'` outside the exclusion discs.
    pub fn log_jet(&self, z: &DiscPoint) -> Result<LogJet> {
        if let Some(node) = self.exclusion_hit(z, None) {
            return Err(Error::InsideExclusion { node });
        }
        Ok(self.log_jet_unchecked(z))
    }

    pub(crate) fn log_jet_unchecked(&self, z: &DiscPoint) -> LogJet {
        let t = self.sum_terms(z, None);
        LogJet {
            log: t.log,
            d1: t.d1,
            d1_prime: t.d2,
        }
    }

    /// `log B_k(z)` for the product with factor `k` removed.
    pub fn deleted_log_eval(&self, k: usize, z: &DiscPoint) -> Result<Complex64> {
        Ok(self.deleted_log_jet(k, z)?.log)
    }

    pub fn deleted_eval(&self, k: usize, z: &DiscPoint) -> Result<Complex64> {
        Ok(self.deleted_log_eval(k, z)?.exp())
    }

    pub fn deleted_log_jet(&self, k: usize, z: &DiscPoint) -> Result<LogJet> {
        self.check_index(k)?;
        if let Some(node) = self.exclusion_hit(z, Some(k)) {
            return Err(Error::InsideExclusion { node });
        }
        let t = self.sum_terms(z, Some(k));
        Ok(LogJet {
            log: t.log,
            d1: t.d1,
            d1_prime: t.d2,
        })
    }

    /// `log (E_k(z) / (z - z_k)) = log(-conj z_k) + S_s(w_k) - log(1 - conj(z_k) z)`,
    /// `0` for an origin node.
    pub fn log_factor_quotient(&self, k: usize, z: &DiscPoint) -> Complex64 {
        if self.zeros.points()[k].is_origin() {
            return ZERO;
        }
        let (w, _, q) = self.w(k, z);
        (-self.conj[k]).ln() + partial_log_series(w, self.genus) - q.ln()
    }

    /// `g'/g` for `g = E_k / (z - z_k)`: `conj(z_k)/q * sum_{j <= s} w^j`.
    pub fn factor_quotient_log_derivative(&self, k: usize, z: &DiscPoint) -> Complex64 {
        if self.zeros.points()[k].is_origin() {
            return ZERO;
        }
        let (w, _, q) = self.w(k, z);
        let mut acc = ZERO;
        let mut p = ONE;
        for _ in 0..=self.genus {
            acc += p;
            p *= w;
        }
        self.conj[k] / q * acc
    }

    /// `log P'(z_k)` from
    /// `P'(z_k) = -conj(z_k) B_k(z_k) exp(H_s) / (1 - |z_k|^2)`.
    pub fn log_derivative_at_zero(&self, k: usize) -> Result<Complex64> {
        self.check_index(k)?;
        let zk = &self.zeros.points()[k];
        if zk.is_origin() {
            return Err(Error::OriginNode { node: k });
        }
        let h: f64 = (1..=self.genus).map(|j| 1.0 / j as f64).sum();
        let log_b = self.deleted_log_eval(k, zk)?;
        Ok((-self.conj[k]).ln() + log_b + h - self.one_minus_sq[k].ln())
    }

    pub fn derivative_at_zero(&self, k: usize) -> Result<Complex64> {
        Ok(self.log_derivative_at_zero(k)?.exp())
    }

    /// `log P'(z_k)`, from the identity or, at the origin, from
    /// `P'(0) = B_k(0)`.
    pub fn node_log_derivative(&self, k: usize) -> Result<Complex64> {
        match self.log_derivative_at_zero(k) {
            Err(Error::OriginNode { .. }) => self.deleted_log_eval(k, &self.zeros.points()[k]),
            other => other,
        }
    }

    /// `P^(order)(c)` by the trapezoid rule on the circle `|z - c| = radius`.
    pub fn contour_derivative_at(
        &self,
        center: &DiscPoint,
        radius: f64,
        order: u32,
        cfg: ContourConfig,
    ) -> Result<CircleRule> {
        let log_at = |u: Complex64| Ok(self.log_eval_unchecked(&center.shifted_unchecked(radius * u)));
        cauchy_derivative(&log_at, order, radius, cfg.start, cfg.cap, cfg.tol)
    }

    /// `P^(order)(z_k)` on the exclusion circle of node `k`.
    pub fn contour_derivative(&self, k: usize, order: u32, cfg: ContourConfig) -> Result<CircleRule> {
        self.check_index(k)?;
        self.contour_derivative_at(&self.zeros.points()[k], self.radii[k], order, cfg)
    }

    pub fn second_derivative_at_zero(&self, k: usize, cfg: ContourConfig) -> Result<Scaled> {
        Ok(self.contour_derivative(k, 2, cfg)?.value)
    }

    /// `P''(z_k) / P'(z_k)` in closed form:
    /// `2 (s+1) conj(z_k) / (1 - |z_k|^2) + 2 B_k'(z_k) / B_k(z_k)`.
    pub fn node_second_ratio(&self, k: usize) -> Result<Complex64> {
        let zk = &self.zeros.points()[k];
        let jet = self.deleted_log_jet(k, zk)?;
        let own = if zk.is_origin() {
            ZERO
        } else {
            (self.genus + 1) as f64 * self.conj[k] / self.one_minus_sq[k]
        };
        Ok(2.0 * (own + jet.d1))
    }

    /// `(|log|B_k(z_k)| + N_{z_k}(delta (1 - |z_k|))|, sum_n |w_n(z_k)|^(s+1))`.
    pub fn lemma_index_check(&self, k: usize, delta: f64) -> Result<LemmaIndexRow> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta must lie in (0, 1), got {delta}")));
        }
        self.check_index(k)?;
        let zk = &self.zeros.points()[k];
        let log_b = self.deleted_log_eval(k, zk)?.re;
        let big_n = counting_N(&self.zeros, zk, delta * zk.one_minus_modulus())?;
        let rhs_sum = (0..self.len())
            .map(|n| self.w_at(n, zk).norm().powi(self.genus as i32 + 1))
            .sum();
        Ok(LemmaIndexRow {
            lhs: (log_b + big_n).abs(),
            rhs_sum,
        })
    }

    /// `max_k lhs / rhs_sum` over all nodes.
    pub fn lemma_index_constant(&self, delta: f64) -> Result<f64> {
        let rows = (0..self.len())
            .into_par_iter()
            .map(|k| self.lemma_index_check(k, delta))
            .collect::<Result<Vec<_>>>()?;
        Ok(rows.iter().map(|r| r.lhs / r.rhs_sum).fold(0.0, f64::max))
    }

    /// `max_{|z| = r} log|P(z)|` over `samples` equally spaced points.
    pub fn max_log_modulus(&self, r: f64, samples: usize) -> Result<f64> {
        let pts = circle_points(r, samples)?;
        Ok(pts
            .par_iter()
            .map(|z| self.log_eval_unchecked(z).re)
            .reduce(|| f64::NEG_INFINITY, f64::max))
    }
}

/// `samples` points on `|z| = r`, offset by half a step from the real axis.
pub fn circle_points(r: f64, samples: usize) -> Result<Vec<DiscPoint>> {
    if !(0.0..1.0).contains(&r) || samples == 0 {
        return Err(Error::InvalidParameter(format!("circle radius {r} with {samples} samples")));
    }
    (0..samples)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / samples as f64;
            DiscPoint::new(Complex64::from_polar(r, t))
        })
        .collect()
}
