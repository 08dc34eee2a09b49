//! Finite zero sequences in the disc, generators, counting functions,
//! separation constants and density estimates.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::disc::{pseudo_dist, DiscPoint};
use crate::error::{Error, Result};
use crate::scale::{GrowthScale, WeightPair};

/// Closed-form model of the part of an infinite sequence beyond the
/// truncation, used for tail estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailModel {
    Geometric { ratio: f64, count: usize },
    Sharpness { eta1: f64, eta2: f64, n_max: usize },
}

/// A finite sequence of distinct points, sorted by nondecreasing modulus.
#[derive(Debug, Clone)]
pub struct ZeroSequence {
    points: Vec<DiscPoint>,
    label: String,
    meta: Map<String, Value>,
    tail: Option<TailModel>,
}

impl ZeroSequence {
    /// Sorts `points` by modulus and rejects duplicates, naming the input
    /// indices of the first duplicated pair found.
    pub fn new(points: Vec<DiscPoint>, label: impl Into<String>) -> Result<Self> {
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].modulus_cmp(&points[b]));
        let sorted: Vec<DiscPoint> = order.iter().map(|&i| points[i]).collect();
        let nn = nearest_neighbours(&sorted);
        if let Some((i, &(d, j))) = nn.iter().enumerate().find(|(_, (d, _))| *d == 0.0) {
            let _ = d;
            let (a, b) = (order[i].min(order[j]), order[i].max(order[j]));
            return Err(Error::DuplicatePoints { first: a, second: b });
        }
        let mut meta = Map::new();
        if let Some(last) = sorted.last() {
            meta.insert("truncation_radius".into(), json!(last.modulus()));
        }
        Ok(ZeroSequence {
            points: sorted,
            label: label.into(),
            meta,
            tail: None,
        })
    }

    pub fn from_complex(points: &[Complex64], label: impl Into<String>) -> Result<Self> {
        let pts = points.iter().map(|&z| DiscPoint::new(z)).collect::<Result<Vec<_>>>()?;
        Self::new(pts, label)
    }

    pub fn points(&self) -> &[DiscPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn meta(&self) -> &Map<String, Value> {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut Map<String, Value> {
        &mut self.meta
    }

    pub fn tail(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }

    pub fn with_tail(mut self, tail: TailModel) -> Self {
        self.tail = Some(tail);
        self
    }

    /// Points with `|z| <= r`.
    pub fn within(&self, r: f64) -> impl Iterator<Item = (usize, &DiscPoint)> {
        self.points.iter().enumerate().filter(move |(_, z)| z.modulus() <= r)
    }

    /// Euclidean distance to the nearest other point, for each point.
    /// Infinite for a single-point sequence.
    pub fn nearest_distances(&self) -> Vec<f64> {
        nearest_neighbours(&self.points).into_iter().map(|(d, _)| d).collect()
    }

    /// Union of two sequences (fails on a shared point).
    pub fn union(&self, other: &ZeroSequence, label: impl Into<String>) -> Result<Self> {
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        Self::new(pts, label)
    }
}

/// All-nearest-neighbour distances by a sweep along the real axis.
/// Returns `(distance, index)` pairs; `(inf, i)` when there is no other point.
fn nearest_neighbours(points: &[DiscPoint]) -> Vec<(f64, usize)> {
    let n = points.len();
    let mut by_re: Vec<usize> = (0..n).collect();
    by_re.sort_by(|&a, &b| {
        let (pa, pb) = (&points[a], &points[b]);
        pa.value()
            .re
            .total_cmp(&pb.value().re)
            .then_with(|| pa.base().re.total_cmp(&pb.base().re))
            .then_with(|| pa.offset().re.total_cmp(&pb.offset().re))
    });
    (0..n)
        .into_par_iter()
        .map(|pos| {
            let i = by_re[pos];
            let mut best = (f64::INFINITY, i);
            for step in [1isize, -1] {
                let mut q = pos as isize + step;
                while q >= 0 && (q as usize) < n {
                    let j = by_re[q as usize];
                    let (ri, rj) = (points[i].value().re, points[j].value().re);
                    if (rj - ri).abs() > best.0 + 4.0 * f64::EPSILON * ri.abs().max(rj.abs()) {
                        break;
                    }
                    let d = points[j].sub(&points[i]).norm();
                    if d < best.0 || (d == best.0 && j < best.1) {
                        best = (d, j);
                    }
                    q += step;
                }
            }
            best
        })
        .collect()
}

/// Parameters of the clustered sharpness sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessParams {
    pub eta1: f64,
    pub eta2: f64,
    pub n_max: usize,
}

pub const SHARPNESS_N_MAX_LIMIT: usize = 30;

impl SharpnessParams {
    pub fn new(eta1: f64, eta2: f64, n_max: usize) -> Result<Self> {
        let p = SharpnessParams { eta1, eta2, n_max };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta1 > 0.0 && self.eta1.is_finite() && self.eta2 > 0.0 && self.eta2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sharpness exponents must be positive, got eta1 = {}, eta2 = {}",
                self.eta1, self.eta2
            )));
        }
        if self.n_max == 0 || self.n_max > SHARPNESS_N_MAX_LIMIT {
            return Err(Error::InvalidParameter(format!(
                "n_max must lie in 1..={SHARPNESS_N_MAX_LIMIT}, got {}",
                self.n_max
            )));
        }
        Ok(())
    }
}

/// Block `n` of the sharpness sequence: `m` points
/// `1 - 3^-n + k eps / m`, `k = 0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessBlock {
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    /// Binary64 value of `1 - 3^-n` that anchors the block.
    pub anchor: f64,
    /// `3^-n`.
    pub gap: f64,
}

impl SharpnessBlock {
    /// `ln eps_n`, exact even where `eps_n` itself underflows.
    pub fn log_eps(&self, eta2: f64) -> f64 {
        -(self.n as f64 * 3f64.ln()).powf(1.0 + eta2)
    }
}

/// Block data for `n = 1..=n_max`, including blocks with `m_n = 0`.
pub fn sharpness_blocks(params: &SharpnessParams) -> Result<Vec<SharpnessBlock>> {
    params.validate()?;
    let ln3 = 3f64.ln();
    (1..=params.n_max)
        .map(|n| {
            let x = n as f64 * ln3;
            let m = x.powf(params.eta1).floor() as usize;
            let eps = (-x.powf(1.0 + params.eta2)).exp();
            let gap = 3f64.powi(-(n as i32));
            if m > 0 && !(eps / m as f64).is_normal() {
                return Err(Error::InvalidParameter(format!(
                    "eps_{n} / m_{n} underflows binary64 (log eps_{n} = {:.1}); lower n_max",
                    -x.powf(1.0 + params.eta2)
                )));
            }
            Ok(SharpnessBlock {
                n,
                m,
                eps,
                anchor: 1.0 - gap,
                gap,
            })
        })
        .collect()
}

pub fn generate_sharpness(params: SharpnessParams) -> Result<ZeroSequence> {
    let blocks = sharpness_blocks(&params)?;
    let mut pts = Vec::new();
    let mut skipped = Vec::new();
    for b in &blocks {
        if b.m == 0 {
            skipped.push(b.n);
            continue;
        }
        let base = Complex64::new(b.anchor, 0.0);
        for k in 0..b.m {
            let offset = Complex64::new(k as f64 * b.eps / b.m as f64, 0.0);
            pts.push(DiscPoint::from_parts(base, offset)?);
        }
    }
    let mut z = ZeroSequence::new(
        pts,
        format!("sharpness eta1={} eta2={} n_max={}", params.eta1, params.eta2, params.n_max),
    )?;
    let meta = z.meta_mut();
    meta.insert("generator".into(), json!("sharpness"));
    meta.insert("eta1".into(), json!(params.eta1));
    meta.insert("eta2".into(), json!(params.eta2));
    meta.insert("n_max".into(), json!(params.n_max));
    meta.insert("skipped_blocks".into(), json!(skipped));
    Ok(z.with_tail(TailModel::Sharpness {
        eta1: params.eta1,
        eta2: params.eta2,
        n_max: params.n_max,
    }))
}

/// `z_k = 1 - ratio^k`, `k = 1..=count`.
pub fn generate_radial_geometric(ratio: f64, count: usize) -> Result<ZeroSequence> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(format!("ratio must lie in (0, 1), got {ratio}")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let mut pts = Vec::with_capacity(count);
    for k in 1..=count {
        let t = ratio.powi(k as i32);
        if !t.is_normal() {
            return Err(Error::InvalidParameter(format!("ratio^{k} underflows binary64")));
        }
        // 1 - t split exactly into a rounded head and its error
        let head = 1.0 - t;
        let tail = (1.0 - head) - t;
        pts.push(DiscPoint::from_parts(Complex64::new(head, 0.0), Complex64::new(tail, 0.0))?);
    }
    let mut z = ZeroSequence::new(pts, format!("geometric ratio={ratio} count={count}"))?;
    let meta = z.meta_mut();
    meta.insert("generator".into(), json!("geometric"));
    meta.insert("ratio".into(), json!(ratio));
    meta.insert("count".into(), json!(count));
    Ok(z.with_tail(TailModel::Geometric { ratio, count }))
}

pub const RHO_LATTICE_MAX_POINTS: usize = 2_000_000;

/// Rings `r_0 = 0`, `r_{j+1} = r_j + spacing rho(r_j)` below `r_max`, each
/// carrying `max(1, floor(2 pi r_j / (spacing rho(r_j))))` equally spaced
/// points, with phase shifted by half a step on alternate rings.
pub fn generate_rho_lattice(weight: &WeightPair, spacing: f64, r_max: f64) -> Result<ZeroSequence> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidParameter(format!("spacing must be positive, got {spacing}")));
    }
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(Error::InvalidParameter(format!("r_max must lie in (0, 1), got {r_max}")));
    }
    let mut pts = vec![DiscPoint::origin()];
    let mut rings = 1usize;
    let mut r = 0.0f64;
    loop {
        let rho = weight.rho(r);
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Hypothesis(format!("rho({r}) = {rho} is not positive and finite")));
        }
        let next = r + spacing * rho;
        if next >= r_max {
            break;
        }
        if next <= r {
            return Err(Error::InvalidParameter(format!(
                "ring step spacing * rho underflows at r = {r} before reaching r_max = {r_max}"
            )));
        }
        r = next;
        let step = spacing * weight.rho(r);
        let n = ((2.0 * PI * r / step).floor() as usize).max(1);
        if pts.len() + n > RHO_LATTICE_MAX_POINTS {
            return Err(Error::InvalidParameter(format!(
                "rho lattice exceeds {RHO_LATTICE_MAX_POINTS} points; raise spacing or lower r_max"
            )));
        }
        let phase = if rings % 2 == 1 { 0.5 } else { 0.0 };
        for k in 0..n {
            let theta = 2.0 * PI * (k as f64 + phase) / n as f64;
            pts.push(DiscPoint::new(Complex64::from_polar(r, theta))?);
        }
        rings += 1;
    }
    let mut z = ZeroSequence::new(pts, format!("rho lattice spacing={spacing} r_max={r_max}"))?;
    let c = if z.len() >= 2 {
        rho_separation(&z, &|r| weight.rho(r))?
    } else {
        f64::INFINITY
    };
    let meta = z.meta_mut();
    meta.insert("generator".into(), json!("rho-lattice"));
    meta.insert("spacing".into(), json!(spacing));
    meta.insert("r_max".into(), json!(r_max));
    meta.insert("rings".into(), json!(rings));
    if c.is_finite() {
        meta.insert("rho_separation".into(), json!(c));
    }
    Ok(z)
}

/// `n_zeta(t) = #{k : |z_k - zeta| <= t}`.
pub fn counting_n(z: &ZeroSequence, zeta: &DiscPoint, t: f64) -> usize {
    z.points.iter().filter(|p| p.sub(zeta).norm() <= t).count()
}

/// `N_zeta(r) = int_0^r (n_zeta(t) - 1)^+ / t dt`, as
/// `sum_{j >= 2, d_(j) <= r} log(r / d_(j))` over sorted distances.
#[allow(non_snake_case)]
pub fn counting_N(z: &ZeroSequence, zeta: &DiscPoint, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("counting radius must be positive, got {r}")));
    }
    let mut d: Vec<f64> = z.points.iter().map(|p| p.sub(zeta).norm()).filter(|&d| d <= r).collect();
    if d.len() < 2 {
        return Ok(0.0);
    }
    d.sort_by(f64::total_cmp);
    if d[1] == 0.0 {
        return Err(Error::NonFinite("second-smallest distance to the sequence is 0".into()));
    }
    Ok(d[1..].iter().map(|&dj| (r / dj).ln()).sum())
}

fn need_two(z: &ZeroSequence) -> Result<()> {
    if z.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: z.len() });
    }
    Ok(())
}

/// `min_{n != j} sigma(z_n, z_j)`.
pub fn separation_constant(z: &ZeroSequence) -> Result<f64> {
    need_two(z)?;
    let p = &z.points;
    Ok((0..p.len())
        .into_par_iter()
        .map(|i| {
            p[i + 1..]
                .iter()
                .map(|w| pseudo_dist(&p[i], w))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min))
}

/// `min_j sum_{n != j} log sigma(z_n, z_j)`.
pub fn log_uniform_separation(z: &ZeroSequence) -> Result<f64> {
    need_two(z)?;
    let p = &z.points;
    Ok((0..p.len())
        .into_par_iter()
        .map(|j| {
            p.iter()
                .enumerate()
                .filter(|&(n, _)| n != j)
                .map(|(_, w)| pseudo_dist(&p[j], w).ln())
                .sum::<f64>()
        })
        .reduce(|| f64::INFINITY, f64::min))
}

/// `min_j prod_{n != j} sigma(z_n, z_j)`.
pub fn uniform_separation_constant(z: &ZeroSequence) -> Result<f64> {
    Ok(log_uniform_separation(z)?.exp())
}

/// `inf_{k != n} |z_k - z_n| / min(rho(|z_k|), rho(|z_n|))`.
pub fn rho_separation(z: &ZeroSequence, rho: &(dyn Fn(f64) -> f64 + Sync)) -> Result<f64> {
    need_two(z)?;
    let p = &z.points;
    let rho_at: Vec<f64> = p.iter().map(|w| rho(w.modulus())).collect();
    if let Some(bad) = rho_at.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter(format!("rho must be positive and finite, got {bad}")));
    }
    Ok((0..p.len())
        .into_par_iter()
        .map(|i| {
            (i + 1..p.len())
                .map(|j| p[i].sub(&p[j]).norm() / rho_at[i].min(rho_at[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlaschkeSum {
    pub s: u32,
    /// `sum_k (1 - |z_k|)^(s+1)` over the stored points.
    pub finite: f64,
    /// Closed-form remainder of the untruncated sequence, when known.
    pub tail: Option<f64>,
}

pub fn blaschke_sum(z: &ZeroSequence, s: u32) -> BlaschkeSum {
    let e = s as i32 + 1;
    let finite = z.points.iter().map(|p| p.one_minus_modulus().powi(e)).sum();
    let tail = z.tail.as_ref().map(|t| match *t {
        TailModel::Geometric { ratio, count } => {
            let q = ratio.powi(e);
            q.powi(count as i32 + 1) / (1.0 - q)
        }
        TailModel::Sharpness { eta1, n_max, .. } => {
            let ln3 = 3f64.ln();
            (n_max + 1..n_max + 200)
                .map(|n| {
                    let m = (n as f64 * ln3).powf(eta1).floor();
                    m * 3f64.powf(-(n as f64) * e as f64)
                })
                .sum()
        }
    });
    BlaschkeSum { s, finite, tail }
}

/// Polar grid `r_i = 1 - 2^(-(i+1)/2)`, `i < radii`, times `angles`
/// equally spaced arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub radii: usize,
    pub angles: usize,
}

impl Default for DensityGrid {
    fn default() -> Self {
        DensityGrid { radii: 32, angles: 64 }
    }
}

impl DensityGrid {
    pub fn points(&self) -> Vec<DiscPoint> {
        let mut out = Vec::with_capacity(self.radii * self.angles);
        for i in 0..self.radii {
            let r = 1.0 - 2f64.powf(-((i + 1) as f64) / 2.0);
            for k in 0..self.angles {
                let theta = 2.0 * PI * k as f64 / self.angles as f64;
                out.push(DiscPoint::new(Complex64::from_polar(r, theta)).expect("grid radius below 1"));
            }
        }
        out
    }
}

fn centers(z: &ZeroSequence, grid: Option<DensityGrid>) -> Vec<DiscPoint> {
    let mut c = z.points.clone();
    if let Some(g) = grid {
        c.extend(g.points());
    }
    c
}

/// For each `r`, the sup over the sequence (and the optional grid) of
/// `sum_{1/2 < sigma(z, z_j) < r} log(1/sigma(z, z_j)) / log(1/(1 - r))`.
/// Finite-`r` lower estimates of the uniform density.
pub fn uniform_density_estimate(
    z: &ZeroSequence,
    r_ladder: &[f64],
    grid: Option<DensityGrid>,
) -> Result<Vec<(f64, f64)>> {
    if r_ladder.is_empty() {
        return Err(Error::InvalidParameter("empty r ladder".into()));
    }
    if let Some(&bad) = r_ladder.iter().find(|&&r| !(r > 0.5 && r < 1.0)) {
        return Err(Error::InvalidParameter(format!("ladder radius {bad} not in (1/2, 1)")));
    }
    let cs = centers(z, grid);
    let sigmas: Vec<Vec<f64>> = cs
        .par_iter()
        .map(|c| {
            z.points
                .iter()
                .map(|w| pseudo_dist(c, w))
                .filter(|&s| s > 0.5 && s < 1.0)
                .collect()
        })
        .collect();
    Ok(r_ladder
        .iter()
        .map(|&r| {
            let denom = (1.0 / (1.0 - r)).ln();
            let sup = sigmas
                .iter()
                .map(|ss| ss.iter().filter(|&&s| s < r).map(|s| -s.ln()).sum::<f64>())
                .fold(0.0, f64::max);
            (r, sup / denom)
        })
        .collect())
}

/// Center selection for [`rho_density_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RhoDensityOptions {
    pub grid: Option<DensityGrid>,
    /// Restrict centers to `lo <= |z| <= hi`.
    pub band: Option<(f64, f64)>,
}

/// For each `R`, sup over centers of `card(Z ∩ U(z, R rho(|z|))) / R^2`,
/// with `U` the open disc.
pub fn rho_density_estimate(
    z: &ZeroSequence,
    rho: &(dyn Fn(f64) -> f64 + Sync),
    r_ladder: &[f64],
    options: RhoDensityOptions,
) -> Result<Vec<(f64, f64)>> {
    if let Some(&bad) = r_ladder.iter().find(|&&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter(format!("R ladder value {bad} is not positive")));
    }
    let mut cs = centers(z, options.grid);
    if let Some((lo, hi)) = options.band {
        cs.retain(|c| {
            let m = c.modulus();
            m >= lo && m <= hi
        });
    }
    let p = &z.points;
    let mut by_re: Vec<usize> = (0..p.len()).collect();
    by_re.sort_by(|&a, &b| p[a].value().re.total_cmp(&p[b].value().re));
    let res: Vec<f64> = by_re.iter().map(|&i| p[i].value().re).collect();
    Ok(r_ladder
        .iter()
        .map(|&big_r| {
            let sup = cs
                .par_iter()
                .map(|c| {
                    let rad = big_r * rho(c.modulus());
                    let re = c.value().re;
                    let lo = res.partition_point(|&x| x < re - rad);
                    let hi = res.partition_point(|&x| x <= re + rad);
                    by_re[lo..hi].iter().filter(|&&i| p[i].sub(c).norm() < rad).count()
                })
                .max()
                .unwrap_or(0);
            (big_r, sup as f64 / (big_r * big_r))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionRow {
    pub index: usize,
    pub one_minus_modulus: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: f64,
    pub ratio_n: Option<f64>,
    #[serde(rename = "ratio_N")]
    pub ratio_big_n: Option<f64>,
}

/// Empirical constants of the counting hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub c_n: f64,
    #[serde(rename = "c_N")]
    pub c_big_n: f64,
    /// Points where a comparator vanishes and the ratio is undefined.
    pub skipped: Vec<usize>,
    pub rows: Vec<ConditionRow>,
}

/// `sup_k n_{z_k}((1-|z_k|)/2) / psi(1/(1-|z_k|))` and
/// `sup_k N_{z_k}((1-|z_k|)/2) / psi_tilde(1/(1-|z_k|))`.
pub fn condition_report(z: &ZeroSequence, scale: &GrowthScale) -> Result<ConditionReport> {
    condition_report_with(z, &|x| scale.psi(x), &|x| scale.psi_tilde(x).unwrap_or(f64::NAN))
}

/// As [`condition_report`] with arbitrary comparators for `n` and `N`.
pub fn condition_report_with(
    z: &ZeroSequence,
    n_cmp: &(dyn Fn(f64) -> f64 + Sync),
    big_n_cmp: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<ConditionReport> {
    let rows = z
        .points
        .par_iter()
        .enumerate()
        .map(|(k, p)| {
            let q = p.one_minus_modulus();
            let x = 1.0 / q;
            let n = counting_n(z, p, q / 2.0);
            let big_n = counting_N(z, p, q / 2.0)?;
            let ratio = |num: f64, den: f64| {
                if num == 0.0 {
                    Some(0.0)
                } else if den > 0.0 && den.is_finite() {
                    Some(num / den)
                } else {
                    None
                }
            };
            Ok(ConditionRow {
                index: k,
                one_minus_modulus: q,
                n,
                big_n,
                ratio_n: ratio(n as f64, n_cmp(x)),
                ratio_big_n: ratio(big_n, big_n_cmp(x)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let skipped = rows
        .iter()
        .filter(|r| r.ratio_n.is_none() || r.ratio_big_n.is_none())
        .map(|r| r.index)
        .collect();
    let c_n = rows.iter().filter_map(|r| r.ratio_n).fold(0.0, f64::max);
    let c_big_n = rows.iter().filter_map(|r| r.ratio_big_n).fold(0.0, f64::max);
    Ok(ConditionReport {
        c_n,
        c_big_n,
        skipped,
        rows,
    })
}
