//! The coefficient `a(z)` for which `f'' + a f = 0` has the solution
//! `f = P e^g`, where `P` vanishes exactly on the prescribed zeros and
//! `g' = h` interpolates `-P''(z_k) / (2 P'(z_k))`:
//!
//! `a = -P''/P - 2 h P'/P - h^2 - h'`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::disc::{carleson_scan, BoxQuadrature, CarlesonRow, DiscPoint};
use crate::error::{Error, Result};
use crate::interp::{max_on_circle, GrowthRow, InterpolationSeries, TargetData, DEFAULT_MARGIN};
use crate::product::{circle_points, CanonicalProduct, ContourConfig};
use crate::quad::{cauchy_derivative, segment_integral};
use crate::scale::GrowthScale;
use crate::sequence::{sharpness_blocks, SharpnessParams, ZeroSequence};

pub const RESIDUE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BuildOptions {
    pub margin: f64,
    /// Genus override. It bypasses the genus the scale requires, which is
    /// harmless for finite sequences.
    pub genus: Option<u32>,
    pub contour: ContourConfig,
    pub residue_tol: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            margin: DEFAULT_MARGIN,
            genus: None,
            contour: ContourConfig::default(),
            residue_tol: RESIDUE_TOL,
        }
    }
}

/// How `P''(z_k)` entered the residue check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecondDerivativeSource {
    Contour,
    /// The circle rule did not converge on the exclusion circle (its
    /// radius is below what binary64 samples resolve), so the closed form
    /// `P''/P' = 2 (s+1) conj(z_k)/(1-|z_k|^2) + 2 B_k'/B_k` was used.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeDiagnostic {
    pub index: usize,
    pub z: Complex64,
    pub b: Complex64,
    /// `|h(z_k) - b_k| / (1 + |b_k|)`.
    pub interpolation_residual: f64,
    /// `(|P'' + 2 P' h| - e)+ / (|P''| + 2 |P' h|)` at `z_k`, where `e` is
    /// the rounding level of the contour estimate of `P''`.
    pub residue_defect: f64,
    pub source: SecondDerivativeSource,
}

/// `b_k = -P''(z_k) / (2 P'(z_k))`.
pub fn targets_from_product(product: &CanonicalProduct, scale: &GrowthScale) -> Result<TargetData> {
    let values = (0..product.len())
        .into_par_iter()
        .map(|k| {
            let ratio = product.node_second_ratio(k)?;
            if !(ratio.re.is_finite() && ratio.im.is_finite()) {
                return Err(Error::NonFinite(format!("P''/P' at node {k}")));
            }
            Ok(-0.5 * ratio)
        })
        .collect::<Result<Vec<_>>>()?;
    TargetData::new(values, scale.clone(), product.zeros())
}

/// `max_k (log|b_k| - log(4 / (1 - |z_k|)))+ / max(psi_tilde(1/(1-|z_k|)), 1)`.
pub fn target_chain_constant(product: &CanonicalProduct, targets: &TargetData) -> Result<f64> {
    let mut c: f64 = 0.0;
    for (k, b) in targets.values().iter().enumerate() {
        let q = product.node(k).one_minus_modulus();
        let pt = targets.scale().psi_tilde_at_q(q)?.max(1.0);
        c = c.max((b.norm().ln() - (4.0 / q).ln()).max(0.0) / pt);
    }
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct OscillationBundle {
    series: InterpolationSeries,
    scale: GrowthScale,
    diagnostics: Vec<NodeDiagnostic>,
    chain_constant: f64,
    options: BuildOptions,
}

pub fn build_coefficient(z: ZeroSequence, scale: GrowthScale) -> Result<OscillationBundle> {
    build_coefficient_with(z, scale, &BuildOptions::default())
}

pub fn build_coefficient_with(z: ZeroSequence, scale: GrowthScale, options: &BuildOptions) -> Result<OscillationBundle> {
    let product = match options.genus {
        Some(s) => CanonicalProduct::new(z, s)?,
        None => CanonicalProduct::from_scale(z, &scale, None)?,
    };
    let targets = targets_from_product(&product, &scale)?;
    let chain_constant = target_chain_constant(&product, &targets)?;
    let series = InterpolationSeries::build(product, targets, options.margin)?;
    let diagnostics = (0..series.product().len())
        .into_par_iter()
        .map(|k| node_diagnostic(&series, k, options.contour))
        .collect::<Result<Vec<_>>>()?;
    if let Some(d) = diagnostics.iter().find(|d| !(d.residue_defect <= options.residue_tol)) {
        return Err(Error::ResidueCancellation {
            node: d.index,
            defect: d.residue_defect,
        });
    }
    Ok(OscillationBundle {
        series,
        scale,
        diagnostics,
        chain_constant,
        options: *options,
    })
}

fn node_diagnostic(series: &InterpolationSeries, k: usize, cfg: ContourConfig) -> Result<NodeDiagnostic> {
    let p = series.product();
    let zk = p.node(k);
    let b = series.targets().values()[k];
    let h = series.eval(zk)?;
    let (ratio, floor, source) = match p.contour_derivative(k, 2, cfg) {
        Ok(rule) => {
            let lp1 = p.node_log_derivative(k)?;
            let ratio = if rule.value.is_zero() { Complex64::new(0.0, 0.0) } else { (rule.value.ln() - lp1).exp() };
            (ratio, (rule.log_floor - lp1.re).exp(), SecondDerivativeSource::Contour)
        }
        Err(Error::Quadrature(_)) => (p.node_second_ratio(k)?, 0.0, SecondDerivativeSource::ClosedForm),
        Err(e) => return Err(e),
    };
    let denom = ratio.norm() + 2.0 * h.norm();
    let excess = ((ratio + 2.0 * h).norm() - floor).max(0.0);
    let residue_defect = if excess == 0.0 { 0.0 } else { excess / denom };
    Ok(NodeDiagnostic {
        index: k,
        z: zk.value(),
        b,
        interpolation_residual: (h - b).norm() / (1.0 + b.norm()),
        residue_defect,
        source,
    })
}

/// Relative agreement of `f''/f` and `-a` at the probes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeResidual {
    pub max: f64,
    pub per_probe: Vec<f64>,
}

impl OscillationBundle {
    pub fn product(&self) -> &CanonicalProduct {
        self.series.product()
    }

    pub fn series(&self) -> &InterpolationSeries {
        &self.series
    }

    pub fn scale(&self) -> &GrowthScale {
        &self.scale
    }

    pub fn diagnostics(&self) -> &[NodeDiagnostic] {
        &self.diagnostics
    }

    pub fn options(&self) -> &BuildOptions {
        &self.options
    }

    /// Diagnostic for `log|b_k| <= C psi_tilde + log(4/(1-|z_k|))`.
    pub fn chain_constant(&self) -> f64 {
        self.chain_constant
    }

    pub fn max_interpolation_residual(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.interpolation_residual).fold(0.0, f64::max)
    }

    pub fn max_residue_defect(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.residue_defect).fold(0.0, f64::max)
    }

    /// The formula for `a`, only valid outside the exclusion discs, with
    /// the sum of the moduli of its four terms.
    fn coefficient_direct(&self, z: &DiscPoint) -> Result<(Complex64, f64)> {
        let jet = self.product().log_jet(z)?;
        let h = self.series.jet(z)?;
        let terms = [jet.d2(), 2.0 * h.value * jet.d1, h.value * h.value, h.derivative];
        let a = -terms.iter().sum::<Complex64>();
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::NonFinite(format!("a({})", z.value())));
        }
        Ok((a, terms.iter().map(|t| t.norm()).sum()))
    }

    /// `a(z)`; inside the exclusion disc of `z_k` by the Cauchy integral
    /// over `|zeta - z_k| = 2 r_k`.
    pub fn eval_coefficient(&self, z: &DiscPoint) -> Result<Complex64> {
        match self.product().containing_exclusion(z) {
            None => Ok(self.coefficient_direct(z)?.0),
            Some(k) => self.cauchy_recovery(k, z),
        }
    }

    fn cauchy_recovery(&self, k: usize, z: &DiscPoint) -> Result<Complex64> {
        let zk = self.product().node(k);
        let radius = 2.0 * self.product().exclusion_radius(k);
        let dz = z.sub(zk);
        // Returns the trapezoid mean and the rounding level of the samples.
        let mean = |m: usize| -> Result<(Complex64, f64)> {
            let vals = (0..m)
                .into_par_iter()
                .map(|j| {
                    let u = Complex64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / m as f64);
                    let (a, size) = self.coefficient_direct(&zk.shifted_unchecked(radius * u))?;
                    let kernel = radius * u / (radius * u - dz);
                    Ok((a * kernel, size * kernel.norm()))
                })
                .collect::<Result<Vec<_>>>()?;
            let sum: Complex64 = vals.iter().map(|v| v.0).sum();
            let floor = vals.iter().map(|v| v.1).fold(0.0, f64::max);
            Ok((sum / m as f64, 64.0 * f64::EPSILON * floor))
        };
        let mut m = 32;
        let (mut prev, _) = mean(m)?;
        loop {
            m *= 2;
            let (next, floor) = mean(m)?;
            let scale = next.norm().max(prev.norm());
            if (next - prev).norm() <= (1e-12 * scale).max(floor) || scale == 0.0 {
                return Ok(next);
            }
            if m >= 8192 {
                return Err(Error::Quadrature(format!(
                    "Cauchy recovery of a near node {k} did not settle at {m} points"
                )));
            }
            prev = next;
        }
    }

    /// `g(z) = integral_0^z h`.
    pub fn eval_g(&self, z: &DiscPoint) -> Result<Complex64> {
        self.g_increment(&DiscPoint::origin(), z.value())
    }

    fn g_increment(&self, from: &DiscPoint, to: Complex64) -> Result<Complex64> {
        if self.product().is_empty() {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let h = |zeta: Complex64| self.series.eval(&DiscPoint::new(zeta)?);
        segment_integral(&h, from.value(), to, 1e-13)
    }

    /// `log f(z) = log P(z) + g(z)`, with real part `-inf` at the nodes.
    pub fn log_solution(&self, z: &DiscPoint) -> Result<Complex64> {
        let p = self.product();
        if (0..p.len()).any(|k| z.sub(p.node(k)) == Complex64::new(0.0, 0.0)) {
            return Ok(Complex64::new(f64::NEG_INFINITY, 0.0));
        }
        Ok(p.log_eval_unchecked(z) + self.eval_g(z)?)
    }

    pub fn eval_solution(&self, z: &DiscPoint) -> Result<Complex64> {
        let l = self.log_solution(z)?;
        if l.re == f64::NEG_INFINITY {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(l.exp())
    }

    /// `f''(z) / f(z)` by a Cauchy integral of `f / f(z)` on the circle of
    /// radius `min((1-|z|)/8, dist(z, Z)/2)`.
    pub fn second_log_ratio(&self, z: &DiscPoint) -> Result<Complex64> {
        let p = self.product();
        let nearest = (0..p.len()).map(|k| z.sub(p.node(k)).norm()).fold(f64::INFINITY, f64::min);
        let radius = (z.one_minus_modulus() / 8.0).min(nearest / 2.0);
        let l0 = p.log_eval_unchecked(z);
        let log_at = |u: Complex64| -> Result<Complex64> {
            let zeta = z.shifted_unchecked(radius * u);
            Ok(p.log_eval_unchecked(&zeta) - l0 + self.g_increment(z, zeta.value())?)
        };
        let rule = cauchy_derivative(&log_at, 2, radius, 32, 4096, 1e-7)?;
        Ok(rule.value.value())
    }

    /// `max |f'' + a f| / (|f''| + |a f| + 1e-300)` over the probes, with
    /// both sides divided by `f(z)`.
    pub fn ode_residual(&self, probes: &[DiscPoint]) -> Result<OdeResidual> {
        for z in probes {
            if z.modulus() > 0.95 {
                return Err(Error::InvalidParameter(format!("probe {} has modulus above 0.95", z.value())));
            }
            if let Some(node) = self.product().containing_exclusion(z) {
                return Err(Error::InsideExclusion { node });
            }
        }
        let per_probe = probes
            .par_iter()
            .map(|z| {
                let f2 = self.second_log_ratio(z)?;
                let a = self.eval_coefficient(z)?;
                Ok((f2 + a).norm() / (f2.norm() + a.norm() + 1e-300))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OdeResidual {
            max: per_probe.iter().cloned().fold(0.0, f64::max),
            per_probe,
        })
    }

    /// `h(r)` for weight scales, `psi_tilde(1/(1-r))` otherwise.
    pub fn growth_comparator(&self, r: f64) -> Result<f64> {
        match self.scale.weight() {
            Some(w) => Ok(w.h(r)),
            None => self.scale.psi_tilde(1.0 / (1.0 - r)),
        }
    }

    pub fn coefficient_growth_table(&self, r_ladder: &[f64], samples: usize) -> Result<Vec<GrowthRow>> {
        r_ladder
            .iter()
            .map(|&r| {
                if !(r > 0.0 && r <= 0.995) {
                    return Err(Error::InvalidParameter(format!("growth radius {r} outside (0, 0.995]")));
                }
                let log_m = max_on_circle(r, samples, &|z| Ok(self.eval_coefficient(z)?.norm().ln()))?;
                Ok(GrowthRow::new(r, log_m, self.growth_comparator(r)?))
            })
            .collect()
    }

    /// Carleson scan of `|a(zeta)|^2 (1 - |zeta|^2)^3 dm`.
    pub fn carleson_condition_check(&self, deltas: &[f64], samples: usize) -> Result<Vec<CarlesonRow>> {
        let density = |zeta: Complex64| match DiscPoint::new(zeta).and_then(|z| self.eval_coefficient(&z)) {
            Ok(a) => a.norm_sqr() * (1.0 - zeta.norm_sqr()).powi(3),
            Err(_) => f64::NAN,
        };
        carleson_scan(&density, deltas, samples, BoxQuadrature::default())
    }
}

/// `count` points uniform in `|z| <= r_max`, outside every exclusion disc.
pub fn random_probes(product: &CanonicalProduct, count: usize, r_max: f64, seed: u64) -> Result<Vec<DiscPoint>> {
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(Error::InvalidParameter(format!("probe radius {r_max} outside (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * (count + 1) {
            return Err(Error::InvalidParameter("probe region is covered by exclusion discs".into()));
        }
        let r = r_max * rng.gen::<f64>().sqrt();
        let t = 2.0 * PI * rng.gen::<f64>();
        let z = DiscPoint::new(Complex64::from_polar(r, t))?;
        if product.containing_exclusion(&z).is_none() {
            out.push(z);
        }
    }
    Ok(out)
}

/// `sup over the grid of (1 - |z|^2)^p |F(z)|`.
pub fn anorm_estimate(
    evaluator: &(dyn Fn(&DiscPoint) -> Result<Complex64> + Sync),
    p: f64,
    grid: &[DiscPoint],
) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
    }
    let vals = grid
        .par_iter()
        .map(|z| Ok(z.one_minus_abs_sq().powf(p) * evaluator(z)?.norm()))
        .collect::<Result<Vec<_>>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Maxima of `|P'/P|` and `|P''/P|` on a circle, skipping exclusion discs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub r: f64,
    pub max_d1: f64,
    pub max_d2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogDerivativeEnvelope {
    pub rows: Vec<EnvelopeRow>,
    /// Smallest `q` with both maxima `<= (1 - r)^(-q)` on every row.
    pub q_hat: f64,
}

pub fn log_derivative_envelope(product: &CanonicalProduct, r_ladder: &[f64], samples: usize) -> Result<LogDerivativeEnvelope> {
    let mut rows = Vec::with_capacity(r_ladder.len());
    let mut q_hat: f64 = 0.0;
    for &r in r_ladder {
        let pts = circle_points(r, samples)?;
        let (max_d1, max_d2) = pts
            .par_iter()
            .filter(|z| product.containing_exclusion(z).is_none())
            .map(|z| {
                let j = product.log_jet_unchecked(z);
                (j.d1.norm(), j.d2().norm())
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        let l = (1.0 / (1.0 - r)).ln();
        q_hat = q_hat.max(max_d1.max(max_d2).ln() / l);
        rows.push(EnvelopeRow { r, max_d1, max_d2 });
    }
    Ok(LogDerivativeEnvelope { rows, q_hat })
}

/// One region of the argument-principle scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionWinding {
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// Angular edges; both zero for the central disc.
    pub theta0: f64,
    pub theta1: f64,
    pub expected: usize,
    pub winding: f64,
}

impl RegionWinding {
    pub fn found(&self) -> i64 {
        self.winding.round() as i64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroScan {
    pub regions: Vec<RegionWinding>,
    pub expected: usize,
    pub found: i64,
    /// Largest distance of a winding number from the nearest integer.
    pub max_deviation: f64,
}

impl ZeroScan {
    pub fn exact(&self) -> bool {
        self.regions.iter().all(|r| r.found() == r.expected as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanOptions {
    pub radii: Vec<f64>,
    pub sectors: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            radii: vec![0.3, 0.6, 0.9],
            sectors: 8,
        }
    }
}

/// Shifts `x` by small multiples of `step` until `clear(x)` holds.
fn snap(x: f64, step: f64, clear: impl Fn(f64) -> bool) -> Result<f64> {
    for i in 0..200 {
        let d = ((i + 1) / 2) as f64 * step * if i % 2 == 0 { 1.0 } else { -1.0 };
        if clear(x + d) {
            return Ok(x + d);
        }
    }
    Err(Error::Hypothesis(format!("no contour edge near {x} avoids the exclusion discs")))
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let t = (((p - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
    (p - (a + t * ab)).norm()
}

impl OscillationBundle {
    /// Winding numbers of `f` around the central disc and the annular
    /// sectors cut out by `opts.radii` and `opts.sectors` rays (offset by
    /// half a sector), each compared with the number of nodes inside.
    pub fn zero_scan(&self, opts: &ScanOptions) -> Result<ZeroScan> {
        let p = self.product();
        if opts.radii.is_empty() || opts.sectors == 0 || opts.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("scan needs increasing radii and at least one sector".into()));
        }
        let nodes: Vec<(Complex64, f64)> =
            (0..p.len()).map(|k| (p.node(k).value(), 2.0 * p.exclusion_radius(k))).collect();
        let radii = opts
            .radii
            .iter()
            .map(|&r| snap(r, 1e-3 * r, |x| nodes.iter().all(|(z, e)| (z.norm() - x).abs() > *e)))
            .collect::<Result<Vec<_>>>()?;
        let width = 2.0 * PI / opts.sectors as f64;
        let (r_in, r_out) = (radii[0], *radii.last().unwrap());
        let mut thetas = (0..opts.sectors)
            .map(|j| {
                snap(width * (j as f64 + 0.5), 1e-3 * width, |t| {
                    let u = Complex64::from_polar(1.0, t);
                    nodes.iter().all(|(z, e)| segment_distance(*z, r_in * u, r_out * u) > *e)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        thetas.push(thetas[0] + 2.0 * PI);

        let mut regions = Vec::new();
        let central = vec![Edge::Arc { r: r_in, t0: 0.0, t1: 2.0 * PI }];
        regions.push((0.0, r_in, 0.0, 0.0, central));
        for w in radii.windows(2) {
            for s in thetas.windows(2) {
                let (a, b, t0, t1) = (w[0], w[1], s[0], s[1]);
                let edges = vec![
                    Edge::Arc { r: b, t0, t1 },
                    Edge::Ray { t: t1, r0: b, r1: a },
                    Edge::Arc { r: a, t0: t1, t1: t0 },
                    Edge::Ray { t: t0, r0: a, r1: b },
                ];
                regions.push((a, b, t0, t1, edges));
            }
        }
        let regions = regions
            .into_par_iter()
            .map(|(a, b, t0, t1, edges)| {
                let expected = nodes
                    .iter()
                    .filter(|(z, _)| {
                        let r = z.norm();
                        if t0 == t1 {
                            return r < b;
                        }
                        let ang = (z.arg() - t0).rem_euclid(2.0 * PI);
                        r > a && r < b && ang < t1 - t0
                    })
                    .count();
                let winding = self.winding(&edges)?;
                Ok(RegionWinding {
                    inner_radius: a,
                    outer_radius: b,
                    theta0: t0,
                    theta1: t1,
                    expected,
                    winding,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let expected = regions.iter().map(|r| r.expected).sum();
        let found = regions.iter().map(|r| r.found()).sum();
        let max_deviation = regions.iter().map(|r| (r.winding - r.winding.round()).abs()).fold(0.0, f64::max);
        Ok(ZeroScan {
            regions,
            expected,
            found,
            max_deviation,
        })
    }

    fn winding(&self, edges: &[Edge]) -> Result<f64> {
        let mut total = 0.0;
        for e in edges {
            let pieces = 64;
            for i in 0..pieces {
                let t0 = i as f64 / pieces as f64;
                let t1 = (i + 1) as f64 / pieces as f64;
                total += self.arg_change(e, t0, t1, 0)?;
            }
        }
        Ok(total / (2.0 * PI))
    }

    /// Change of `arg f = Im(log P + g)` along the edge between the
    /// parameters `t0` and `t1`.
    fn arg_change(&self, e: &Edge, t0: f64, t1: f64, depth: u32) -> Result<f64> {
        let p = self.product();
        let (a, b) = (DiscPoint::new(e.at(t0))?, DiscPoint::new(e.at(t1))?);
        let dl = p.log_eval_unchecked(&b) - p.log_eval_unchecked(&a);
        let dp = wrap(dl.im);
        if (dp.abs() > 0.3 || dl.re.abs() > 0.5) && depth < 30 {
            let m = 0.5 * (t0 + t1);
            return Ok(self.arg_change(e, t0, m, depth + 1)? + self.arg_change(e, m, t1, depth + 1)?);
        }
        let dg = self.g_increment(&a, b.value())?;
        Ok(dp + dg.im)
    }
}

fn wrap(x: f64) -> f64 {
    x - 2.0 * PI * (x / (2.0 * PI)).round()
}

enum Edge {
    Arc { r: f64, t0: f64, t1: f64 },
    Ray { t: f64, r0: f64, r1: f64 },
}

impl Edge {
    fn at(&self, s: f64) -> Complex64 {
        match *self {
            Edge::Arc { r, t0, t1 } => Complex64::from_polar(r, t0 + s * (t1 - t0)),
            Edge::Ray { t, r0, r1 } => Complex64::from_polar(r0 + s * (r1 - r0), t),
        }
    }
}

/// The quantities of the sharpness witness at block `n`: `I_1` collects the
/// other points of block `n`, `I_2` all other blocks, both summing
/// `(1 - |z|^2) / ((z_{n,0} - z)(1 - conj(z) z_{n,0}))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessRow {
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    pub i1_abs: f64,
    /// `(1/2) (m_n / eps_n) H_{m_n - 1}`.
    pub i1_lower: f64,
    pub i2_abs: f64,
    /// `sum_{j<n} 4 m_j / (1 - |z_{j,0}|) + sum_{j>n} sum_k 4 (1 - |z_{j,k}|) / (1 - |z_{n,0}|)^2`,
    /// over the blocks up to `n_max`.
    pub i2_upper: f64,
    pub logderiv: Complex64,
}

impl WitnessRow {
    pub fn dominance(&self) -> f64 {
        self.i1_abs / self.i2_upper
    }
}

pub fn sharpness_witness(params: SharpnessParams, n: usize) -> Result<WitnessRow> {
    if !(2..=params.n_max).contains(&n) {
        return Err(Error::InvalidParameter(format!("witness block {n} outside 2..={}", params.n_max)));
    }
    let blocks = sharpness_blocks(&params)?;
    let points = |j: usize| -> Result<Vec<DiscPoint>> {
        let b = &blocks[j - 1];
        (0..b.m)
            .map(|k| {
                DiscPoint::from_parts(
                    Complex64::new(b.anchor, 0.0),
                    Complex64::new(k as f64 * b.eps / b.m as f64, 0.0),
                )
            })
            .collect()
    };
    let blk = &blocks[n - 1];
    if blk.m < 2 {
        return Err(Error::WitnessUndefined { block: n, m: blk.m });
    }
    let own = points(n)?;
    let z0 = own[0];
    let term = |z: &DiscPoint| z.one_minus_abs_sq() / (z0.sub(z) * z.one_minus_conj_mul(&z0));
    let i1: Complex64 = own[1..].iter().map(term).sum();
    let mut i2 = Complex64::new(0.0, 0.0);
    let mut i2_upper = 0.0;
    let q0 = z0.one_minus_modulus();
    for j in (1..=params.n_max).filter(|&j| j != n) {
        let pts = points(j)?;
        i2 += pts.iter().map(term).sum::<Complex64>();
        if j < n {
            if let Some(first) = pts.first() {
                i2_upper += 4.0 * pts.len() as f64 / first.one_minus_modulus();
            }
        } else {
            i2_upper += pts.iter().map(|z| 4.0 * z.one_minus_modulus()).sum::<f64>() / (q0 * q0);
        }
    }
    let harmonic: f64 = (1..blk.m).map(|k| 1.0 / k as f64).sum();
    Ok(WitnessRow {
        n,
        m: blk.m,
        eps: blk.eps,
        i1_abs: i1.norm(),
        i1_lower: 0.5 * blk.m as f64 / blk.eps * harmonic,
        i2_abs: i2.norm(),
        i2_upper,
        logderiv: i1 + i2,
    })
}

/// Witness rows for every block `2..=n_max` where the witness is defined.
pub fn witness_table(params: SharpnessParams) -> Result<Vec<WitnessRow>> {
    (2..=params.n_max)
        .filter_map(|n| match sharpness_witness(params, n) {
            Err(Error::WitnessUndefined { .. }) => None,
            other => Some(other),
        })
        .collect()
}

/// Smallest `n0` such that every row with `n >= n0` has
/// `|I_1| / I2_upper >= threshold`.
pub fn dominance_threshold(rows: &[WitnessRow], threshold: f64) -> Option<usize> {
    let mut n0 = None;
    for row in rows.iter().rev() {
        if row.dominance() >= threshold {
            n0 = Some(row.n);
        } else {
            break;
        }
    }
    n0
}
