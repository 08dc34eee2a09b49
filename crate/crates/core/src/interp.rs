//! The interpolation series
//! `f(z) = sum_n b_n / (z - z_n) * P(z) / P'(z_n) * w_n(z)^(s_n - 1)`,
//! which satisfies `f(z_k) = b_k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::disc::DiscPoint;
use crate::error::{Error, Result};
use crate::product::{circle_points, CanonicalProduct};
use crate::quad::{log_sum_exp, Scaled};
use crate::scale::GrowthScale;
use crate::sequence::ZeroSequence;

/// Target values `b_k` aligned with the zeros, with
/// `bound_constant = sup_k log+|b_k| / max(psi_tilde(1/(1-|z_k|)), 1)`.
#[derive(Debug, Clone)]
pub struct TargetData {
    values: Vec<Complex64>,
    scale: GrowthScale,
    bound_constant: f64,
}

impl TargetData {
    pub fn new(values: Vec<Complex64>, scale: GrowthScale, zeros: &ZeroSequence) -> Result<Self> {
        if values.len() != zeros.len() {
            return Err(Error::InvalidParameter(format!(
                "{} target values for {} zeros",
                values.len(),
                zeros.len()
            )));
        }
        if let Some(k) = values.iter().position(|b| !(b.re.is_finite() && b.im.is_finite())) {
            return Err(Error::NonFinite(format!("target value {k}")));
        }
        let mut bound_constant: f64 = 0.0;
        for (b, z) in values.iter().zip(zeros.points()) {
            let pt = scale.psi_tilde_at_q(z.one_minus_modulus())?.max(1.0);
            bound_constant = bound_constant.max(b.norm().ln().max(0.0) / pt);
        }
        Ok(TargetData {
            values,
            scale,
            bound_constant,
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn scale(&self) -> &GrowthScale {
        &self.scale
    }

    pub fn bound_constant(&self) -> f64 {
        self.bound_constant
    }
}

/// `s_n = s + ceil((margin + c_hat psi_tilde(1/(1-|z_n|)) + 2 log(n+1)) / log 2)`
/// for 1-based `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentRule {
    pub genus: u32,
    pub margin: f64,
    pub c_hat: f64,
}

pub const DEFAULT_MARGIN: f64 = 10.0;

pub fn choose_exponents(z: &ZeroSequence, scale: &GrowthScale, rule: &ExponentRule) -> Result<Vec<u64>> {
    if !(rule.margin > 0.0) || !(rule.c_hat >= 0.0 && rule.c_hat.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "exponent rule needs margin > 0 and finite c_hat >= 0, got {rule:?}"
        )));
    }
    z.points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let n = (i + 1) as f64;
            let pt = scale.psi_tilde_at_q(p.one_minus_modulus())?;
            let extra = ((rule.margin + rule.c_hat * pt + 2.0 * (n + 1.0).ln()) / 2f64.ln()).ceil();
            if !(extra.is_finite() && extra < 1e15) {
                return Err(Error::NonFinite(format!("exponent for node {i}")));
            }
            Ok(rule.genus as u64 + extra as u64)
        })
        .collect()
}

/// Value and derivative of a series at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesJet {
    pub value: Complex64,
    pub derivative: Complex64,
}

#[derive(Debug, Clone)]
pub struct InterpolationSeries {
    product: CanonicalProduct,
    targets: TargetData,
    exponents: Vec<u64>,
    /// `log(b_n / P'(z_n))`; `None` for `b_n = 0`.
    log_coeffs: Vec<Option<Complex64>>,
    lemma_constant: f64,
    rule: Option<ExponentRule>,
}

impl InterpolationSeries {
    /// Series with exponents from [`choose_exponents`], using
    /// `c_hat = bound_constant + C(1/2, s)`.
    pub fn build(product: CanonicalProduct, targets: TargetData, margin: f64) -> Result<Self> {
        let lemma_constant = product.lemma_index_constant(0.5)?;
        let rule = ExponentRule {
            genus: product.genus(),
            margin,
            c_hat: targets.bound_constant() + lemma_constant,
        };
        let exponents = choose_exponents(product.zeros(), targets.scale(), &rule)?;
        let mut series = Self::build_with_exponents(product, targets, exponents)?;
        series.lemma_constant = lemma_constant;
        series.rule = Some(rule);
        Ok(series)
    }

    pub fn build_with_exponents(product: CanonicalProduct, targets: TargetData, exponents: Vec<u64>) -> Result<Self> {
        let n = product.len();
        if targets.values().len() != n || exponents.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} targets and {} exponents for {n} zeros",
                targets.values().len(),
                exponents.len()
            )));
        }
        if let Some(i) = exponents.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter(format!("exponents decrease at node {}", i + 1)));
        }
        if exponents.first().is_some_and(|&e| e < 1) {
            return Err(Error::InvalidParameter("exponents must be at least 1".into()));
        }
        let log_coeffs = (0..n)
            .into_par_iter()
            .map(|k| {
                let b = targets.values()[k];
                if b == Complex64::new(0.0, 0.0) {
                    return Ok(None);
                }
                let lp = product.node_log_derivative(k)?;
                if !lp.re.is_finite() {
                    return Err(Error::NonFinite(format!("log P'(z_{k})")));
                }
                Ok(Some(b.ln() - lp))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InterpolationSeries {
            product,
            targets,
            exponents,
            log_coeffs,
            lemma_constant: f64::NAN,
            rule: None,
        })
    }

    pub fn product(&self) -> &CanonicalProduct {
        &self.product
    }

    pub fn targets(&self) -> &TargetData {
        &self.targets
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn rule(&self) -> Option<&ExponentRule> {
        self.rule.as_ref()
    }

    /// `C(1/2, s)` measured at build time (NaN when exponents were given).
    pub fn lemma_constant(&self) -> f64 {
        self.lemma_constant
    }

    /// `log w_n(z)` and `conj(z_n) / (1 - conj(z_n) z)`.
    fn w_log(&self, n: usize, z: &DiscPoint) -> (Complex64, Complex64) {
        let zn = self.product.node(n);
        let q = zn.one_minus_conj_mul(z);
        (self.product.w_at(n, z).ln(), zn.value().conj() / q)
    }

    /// Logs of `C_n w_n^(s_n - 1) / (z - z_n)` and of the same times
    /// `(s_n - 1) conj(z_n)/q_n - 1/(z - z_n)`, skipping `skip`, with
    /// `(z - z_k)` multiplied in when `skip = Some(k)`.
    fn term_logs(&self, z: &DiscPoint, skip: Option<usize>) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.product.len();
        let shift = skip.map(|k| z.sub(self.product.node(k)));
        let mut vals = Vec::with_capacity(n);
        let mut ders = Vec::with_capacity(n);
        for i in 0..n {
            if Some(i) == skip {
                continue;
            }
            let Some(lc) = self.log_coeffs[i] else { continue };
            let (lw, cq) = self.w_log(i, z);
            let d = z.sub(self.product.node(i));
            let m = (self.exponents[i] - 1) as f64;
            let base = lc + m * lw - d.ln();
            let factor = m * cq - d.inv();
            vals.push(base);
            ders.push(base + factor.ln());
        }
        if let Some(dk) = shift {
            let ldk = dk.ln();
            for v in vals.iter_mut() {
                *v += ldk;
            }
            for v in ders.iter_mut() {
                *v += ldk;
            }
        }
        (vals, ders)
    }

    /// `log h(z)` as a scaled value.
    pub fn eval_scaled(&self, z: &DiscPoint) -> Result<Scaled> {
        Ok(Scaled::from_log(self.log_jet(z)?.0))
    }

    pub fn eval(&self, z: &DiscPoint) -> Result<Complex64> {
        let value = self.eval_scaled(z)?.value();
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::NonFinite(format!("series at {}", z.value())));
        }
        Ok(value)
    }

    pub fn derivative(&self, z: &DiscPoint) -> Result<Complex64> {
        Ok(self.jet(z)?.derivative)
    }

    pub fn jet(&self, z: &DiscPoint) -> Result<SeriesJet> {
        let (lv, ld) = self.log_jet(z)?;
        let value = Scaled::from_log(lv).value();
        let derivative = Scaled::from_log(ld).value();
        let finite = |c: Complex64| c.re.is_finite() && c.im.is_finite();
        if !(finite(value) && finite(derivative)) {
            return Err(Error::NonFinite(format!("series at {}", z.value())));
        }
        Ok(SeriesJet { value, derivative })
    }

    /// `(log h, log h')`, with `-inf` real parts for zeros.
    fn log_jet(&self, z: &DiscPoint) -> Result<(Complex64, Complex64)> {
        match self.product.containing_exclusion(z) {
            None => {
                let pj = self.product.log_jet_unchecked(z);
                let (vals, ders) = self.term_logs(z, None);
                let s = log_sum_exp(&vals);
                let v = log_sum_exp(&ders);
                let lh = pj.log + s.ln();
                // h' = (P'/P) h + P V
                let lh1 = log_sum_exp(&[lh + pj.d1.ln(), pj.log + v.ln()]).ln();
                Ok((lh, lh1))
            }
            Some(k) => self.log_jet_near(k, z),
        }
    }

    /// Factored form inside the exclusion disc of node `k`:
    /// `h = B_k g_k T`, `T = C_k w_k^(s_k - 1) + (z - z_k) U`.
    fn log_jet_near(&self, k: usize, z: &DiscPoint) -> Result<(Complex64, Complex64)> {
        let bj = self.product.deleted_log_jet(k, z)?;
        let lg = self.product.log_factor_quotient(k, z);
        let g1 = self.product.factor_quotient_log_derivative(k, z);
        let (mut vals, ders) = self.term_logs(z, Some(k));
        // U and U' without the (z - z_k) factor, for T' = own' + U + (z - z_k) U'
        let u_vals = self.term_logs_plain(z, k);
        let mut tder = ders;
        tder.extend(u_vals);
        if let Some(lc) = self.log_coeffs[k] {
            let (lw, cq) = self.w_log(k, z);
            let m = (self.exponents[k] - 1) as f64;
            let own = lc + m * lw;
            vals.push(own);
            tder.push(own + (m * cq).ln());
        }
        let t = log_sum_exp(&vals).ln();
        let t1 = log_sum_exp(&tder).ln();
        let lbg = bj.log + lg;
        let lh = lbg + t;
        let lh1 = log_sum_exp(&[lh + (bj.d1 + g1).ln(), lbg + t1]).ln();
        Ok((lh, lh1))
    }

    /// Logs of `C_n w_n^(s_n - 1) / (z - z_n)` for `n != k`.
    fn term_logs_plain(&self, z: &DiscPoint, k: usize) -> Vec<Complex64> {
        let mut vals = Vec::new();
        for i in 0..self.product.len() {
            if i == k {
                continue;
            }
            let Some(lc) = self.log_coeffs[i] else { continue };
            let (lw, _) = self.w_log(i, z);
            let d = z.sub(self.product.node(i));
            vals.push(lc + (self.exponents[i] - 1) as f64 * lw - d.ln());
        }
        vals
    }

    /// `log |T_n(z)|` for every term, `-inf` for zero terms. Only outside
    /// exclusion discs.
    pub fn term_log_moduli(&self, z: &DiscPoint) -> Result<Vec<f64>> {
        let lp = self.product.log_eval(z)?.re;
        Ok((0..self.product.len())
            .map(|i| match self.log_coeffs[i] {
                None => f64::NEG_INFINITY,
                Some(lc) => {
                    let (lw, _) = self.w_log(i, z);
                    let d = z.sub(self.product.node(i));
                    lp + (lc + (self.exponents[i] - 1) as f64 * lw - d.ln()).re
                }
            })
            .collect())
    }

    /// Rows `(r, log M(r, h), psi_tilde(1/(1-r)), ratio)`.
    pub fn growth_table(&self, r_ladder: &[f64], samples: usize) -> Result<Vec<GrowthRow>> {
        let scale = self.targets.scale().clone();
        r_ladder
            .iter()
            .map(|&r| {
                let log_m = max_on_circle(r, samples, &|z| Ok(self.eval_scaled(z)?.log_abs()))?;
                let comparator = scale.psi_tilde(1.0 / (1.0 - r))?;
                Ok(GrowthRow::new(r, log_m, comparator))
            })
            .collect()
    }
}

/// One row of a growth table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub r: f64,
    pub log_m: f64,
    pub comparator: f64,
    pub ratio: f64,
    /// `log M` is `-inf` (function vanishes on the sampled circle).
    pub vanishing: bool,
}

impl GrowthRow {
    pub fn new(r: f64, log_m: f64, comparator: f64) -> Self {
        GrowthRow {
            r,
            log_m,
            comparator,
            ratio: log_m / comparator,
            vanishing: log_m == f64::NEG_INFINITY,
        }
    }
}

/// `max_{|z| = r} F(z)` for a real-valued `F` (typically `log |f|`):
/// `samples` equally spaced points, then golden-section refinement in the
/// angle around the best sample.
pub fn max_on_circle(
    r: f64,
    samples: usize,
    f: &(dyn Fn(&DiscPoint) -> Result<f64> + Sync),
) -> Result<f64> {
    let pts = circle_points(r, samples)?;
    let vals = pts.par_iter().map(f).collect::<Result<Vec<_>>>()?;
    let (best, &best_val) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one sample");
    if best_val == f64::NEG_INFINITY {
        return Ok(best_val);
    }
    let step = 2.0 * PI / samples as f64;
    let theta0 = step * (best as f64 + 0.5);
    let at = |t: f64| -> Result<f64> { f(&DiscPoint::new(Complex64::from_polar(r, t))?) };
    let gr = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (theta0 - step, theta0 + step);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = at(c)?;
    let mut fd = at(d)?;
    let mut top = best_val.max(fc).max(fd);
    for _ in 0..40 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = at(c)?;
            top = top.max(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = at(d)?;
            top = top.max(fd);
        }
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::product::ContourConfig;
    use crate::sequence::{generate_radial_geometric, generate_sharpness, SharpnessParams};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dp(re: f64, im: f64) -> DiscPoint {
        DiscPoint::from_re_im(re, im).unwrap()
    }

    fn log1() -> GrowthScale {
        GrowthScale::log_power(1.0).unwrap()
    }

    fn series(points: &[Complex64], b: Vec<Complex64>, s: u32) -> InterpolationSeries {
        let z = ZeroSequence::from_complex(points, "t").unwrap();
        let t = TargetData::new(b, log1(), &z).unwrap();
        InterpolationSeries::build(CanonicalProduct::new(z, s).unwrap(), t, DEFAULT_MARGIN).unwrap()
    }

    #[test]
    fn exponent_rule_examples() {
        let z = generate_radial_geometric(0.5, 20).unwrap();
        let flat = GrowthScale::log_power(0.0).unwrap();
        let rule = ExponentRule {
            genus: 1,
            margin: 10.0,
            c_hat: 0.0,
        };
        let e = choose_exponents(&z, &flat, &rule).unwrap();
        for (i, &s) in e.iter().enumerate() {
            let n = (i + 1) as f64;
            assert_eq!(s, 1 + ((10.0 + 2.0 * (n + 1.0).ln()) / 2f64.ln()).ceil() as u64);
        }
        assert!(e.windows(2).all(|w| w[0] <= w[1]));
        let rule = ExponentRule { c_hat: 1.5, ..rule };
        let e = choose_exponents(&z, &log1(), &rule).unwrap();
        for (i, &s) in e.iter().enumerate() {
            let k = (i + 1) as f64;
            let n = k;
            let pt = k * k * 2f64.ln().powi(2) / 2.0;
            let expect = 1 + ((10.0 + 1.5 * pt + 2.0 * (n + 1.0).ln()) / 2f64.ln()).ceil() as u64;
            assert!(s.abs_diff(expect) <= 1, "{s} {expect}");
        }
    }

    #[test]
    fn alignment_and_zero_targets() {
        let z = generate_radial_geometric(0.5, 3).unwrap();
        assert!(TargetData::new(vec![c(1.0, 0.0)], log1(), &z).is_err());
        let t = TargetData::new(vec![c(0.0, 0.0); 3], log1(), &z).unwrap();
        let s = InterpolationSeries::build(CanonicalProduct::new(z, 1).unwrap(), t, DEFAULT_MARGIN).unwrap();
        assert_eq!(s.eval(&dp(0.2, 0.3)).unwrap(), c(0.0, 0.0));
        assert_eq!(s.eval(s.product().node(1)).unwrap(), c(0.0, 0.0));
        let rows = s.growth_table(&[0.5], 64).unwrap();
        assert!(rows[0].vanishing);
    }

    #[test]
    fn single_node_closed_form() {
        let s = series(&[c(0.5, 0.0)], vec![c(1.0, 0.0)], 0);
        let m = s.exponents()[0] as i32 - 1;
        let p = s.product();
        for z in [dp(0.1, 0.2), dp(-0.6, 0.1), dp(0.5, 0.2)] {
            let pz = p.log_eval(&z).unwrap().exp();
            let pp = p.derivative_at_zero(0).unwrap();
            let w = 0.75 / (1.0 - 0.5 * z.value());
            let expect = pz / pp / (z.value() - 0.5) * w.powi(m);
            let got = s.eval(&z).unwrap();
            assert!((got - expect).norm() <= 1e-12 * expect.norm(), "{got} {expect}");
        }
        assert!((s.eval(p.node(0)).unwrap() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn derivative_matches_contour() {
        let s = series(&[c(0.5, 0.0), c(-0.3, 0.4), c(0.1, -0.7)], vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.3, 0.3)], 1);
        let cfg = ContourConfig {
            start: 64,
            cap: 1024,
            tol: 1e-12,
        };
        for z in [dp(0.0, 0.0), dp(0.5, 0.001), dp(0.2, 0.2)] {
            let jet = s.jet(&z).unwrap();
            let r = 0.01;
            let log_at = |u: Complex64| Ok(s.eval_scaled(&z.shifted_unchecked(r * u))?.ln());
            let d = crate::quad::cauchy_derivative(&log_at, 1, r, cfg.start, cfg.cap, cfg.tol).unwrap();
            let num = d.value.value();
            assert!((jet.derivative - num).norm() <= 1e-8 * num.norm(), "{z:?} {} {num}", jet.derivative);
        }
    }

    #[test]
    fn interpolates_on_fixtures() {
        let g = generate_radial_geometric(0.5, 40).unwrap();
        let p = CanonicalProduct::new(g.clone(), 1).unwrap();
        let b: Vec<Complex64> = (0..g.len()).map(|k| c(1.0 + k as f64, -0.5)).collect();
        let t = TargetData::new(b.clone(), log1(), &g).unwrap();
        let s = InterpolationSeries::build(p, t, DEFAULT_MARGIN).unwrap();
        for k in 0..g.len() {
            let v = s.eval(s.product().node(k)).unwrap();
            assert!((v - b[k]).norm() / (1.0 + b[k].norm()) <= 1e-6, "node {k}");
        }
        let sh = generate_sharpness(SharpnessParams::new(1.0, 1.0, 6).unwrap()).unwrap();
        let p = CanonicalProduct::new(sh.clone(), 1).unwrap();
        let b: Vec<Complex64> = (0..sh.len()).map(|k| c(k as f64, 1.0)).collect();
        let t = TargetData::new(b.clone(), log1(), &sh).unwrap();
        let s = InterpolationSeries::build(p, t, DEFAULT_MARGIN).unwrap();
        for k in 0..sh.len() {
            let v = s.eval(s.product().node(k)).unwrap();
            assert!((v - b[k]).norm() / (1.0 + b[k].norm()) <= 1e-6, "node {k}");
        }
    }

    #[test]
    fn linearity_and_margin_robustness() {
        let g = generate_radial_geometric(0.5, 20).unwrap();
        let p = CanonicalProduct::new(g.clone(), 1).unwrap();
        let b1: Vec<Complex64> = (0..20).map(|k| c(1.0, k as f64)).collect();
        let b2: Vec<Complex64> = (0..20).map(|k| c(-(k as f64), 2.0)).collect();
        let sum: Vec<Complex64> = b1.iter().zip(&b2).map(|(a, b)| a + b).collect();
        let base = InterpolationSeries::build(p.clone(), TargetData::new(sum.clone(), log1(), &g).unwrap(), 10.0).unwrap();
        let e = base.exponents().to_vec();
        let mk = |b: Vec<Complex64>| {
            InterpolationSeries::build_with_exponents(p.clone(), TargetData::new(b, log1(), &g).unwrap(), e.clone()).unwrap()
        };
        let (s1, s2) = (mk(b1), mk(b2));
        let wide = InterpolationSeries::build(p.clone(), TargetData::new(sum, log1(), &g).unwrap(), 20.0).unwrap();
        for z in [dp(0.1, 0.2), dp(-0.5, 0.5), dp(0.8, 0.1)] {
            let a = base.eval(&z).unwrap();
            let b = s1.eval(&z).unwrap() + s2.eval(&z).unwrap();
            assert!((a - b).norm() <= 1e-10 * a.norm().max(b.norm()));
        }
        for k in 0..g.len() {
            let node = base.product().node(k);
            let (a, w) = (base.eval(node).unwrap(), wide.eval(node).unwrap());
            assert!((a - w).norm() <= 1e-8 * (1.0 + a.norm()), "node {k}");
        }
    }

    #[test]
    fn tail_terms_decay_on_geometric_fixture() {
        let g = generate_radial_geometric(0.5, 40).unwrap();
        let b: Vec<Complex64> = vec![c(1.0, 0.0); 40];
        let t = TargetData::new(b, log1(), &g).unwrap();
        let s = InterpolationSeries::build(CanonicalProduct::new(g, 1).unwrap(), t, DEFAULT_MARGIN).unwrap();
        for z in [dp(0.3, 0.4), dp(-0.9, 0.0), dp(0.0, 0.9)] {
            let terms = s.term_log_moduli(&z).unwrap();
            let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for (i, &t) in terms.iter().enumerate().skip(10) {
                assert!(t <= top - 2.0 * ((i + 1) as f64).ln() + 1e-9, "term {i}");
            }
        }
    }

    #[test]
    fn single_node_growth() {
        let s = series(&[c(0.5, 0.0)], vec![c(1.0, 0.0)], 0);
        let m = (s.exponents()[0] - 1) as f64;
        let rows = s.growth_table(&[0.9, 0.99, 0.999], 256).unwrap();
        // |w| peaks at z = r with limit 1.5
        for row in &rows {
            let w = 0.75 / (1.0 - 0.5 * row.r);
            assert!((row.log_m - m * w.ln()).abs() < 5.0, "{row:?}");
        }
    }

    #[test]
    fn max_on_circle_refines() {
        let v = max_on_circle(0.5, 8, &|z| Ok((z.value() * Complex64::from_polar(1.0, -0.3)).re)).unwrap();
        assert_relative_eq!(v, 0.5, max_relative = 1e-12);
    }
}
