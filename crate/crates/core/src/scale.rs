//! Growth functions `psi` on `[1, inf)`, their integrals
//! `psi_tilde(x) = int_1^x psi(t)/t dt`, Pólya-order estimates, and radial
//! weights `h` with `rho = (Laplacian h)^(-1/2)` and
//! `sigma = (1 - r)^2 / rho^2`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Ladder `10^(k/2)`, `k = 2..=24`: the decades `[10, 1e12]`.
pub fn default_polya_ladder() -> Vec<f64> {
    (2..=24).map(|k| 10f64.powf(k as f64 / 2.0)).collect()
}

/// Radial weight `h` on `[0, 1)`.
#[derive(Clone)]
pub enum WeightKind {
    /// `h(r) = log^gamma (1 / (1 - r))`.
    LogPower { gamma: f64 },
    /// Arbitrary `h`; derivatives by central differences with step
    /// `(1 - r) / 64`.
    Custom { name: String, h: RealFn },
}

#[derive(Clone)]
pub struct WeightPair {
    kind: WeightKind,
}

impl fmt::Debug for WeightPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::LogPower { gamma } => write!(f, "WeightPair(log^{gamma}(1/(1-r)))"),
            WeightKind::Custom { name, .. } => write!(f, "WeightPair({name})"),
        }
    }
}

impl WeightPair {
    pub fn log_power(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "weight exponent gamma must be positive, got {gamma}"
            )));
        }
        Ok(WeightPair {
            kind: WeightKind::LogPower { gamma },
        })
    }

    pub fn custom(name: impl Into<String>, h: RealFn) -> Self {
        WeightPair {
            kind: WeightKind::Custom {
                name: name.into(),
                h,
            },
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn h(&self, r: f64) -> f64 {
        self.h_q(1.0 - r)
    }

    /// `h` at `r = 1 - q`.
    pub fn h_q(&self, q: f64) -> f64 {
        match &self.kind {
            WeightKind::LogPower { gamma } => (-q.ln()).max(0.0).powf(*gamma),
            WeightKind::Custom { h, .. } => h(1.0 - q),
        }
    }

    pub fn hp(&self, r: f64) -> f64 {
        self.hp_q(1.0 - r)
    }

    pub fn hp_q(&self, q: f64) -> f64 {
        match &self.kind {
            WeightKind::LogPower { gamma } => {
                let l = -q.ln();
                gamma * l.powf(gamma - 1.0) / q
            }
            WeightKind::Custom { h, .. } => {
                let (r, e) = fd_point(q);
                (h(r + e) - h(r - e)) / (2.0 * e)
            }
        }
    }

    /// Radial Laplacian `h'' + h'/r` at `r = 1 - q`.
    pub fn laplacian_q(&self, q: f64) -> f64 {
        match &self.kind {
            WeightKind::LogPower { gamma } => {
                // The limit r -> 0 of h'/r is taken by evaluating slightly off 0.
                let q = q.min(1.0 - 1e-8);
                let r = 1.0 - q;
                let l = -q.ln();
                let hp = gamma * l.powf(gamma - 1.0) / q;
                let hpp = gamma * ((gamma - 1.0) * l.powf(gamma - 2.0) + l.powf(gamma - 1.0)) / (q * q);
                hpp + hp / r
            }
            WeightKind::Custom { h, .. } => {
                let (r, e) = fd_point(q);
                let hm = h(r - e);
                let h0 = h(r);
                let hp = h(r + e);
                (hp - 2.0 * h0 + hm) / (e * e) + (hp - hm) / (2.0 * e * r)
            }
        }
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        self.laplacian_q(1.0 - r)
    }

    /// `rho(r) = (Laplacian h)^(-1/2)`.
    pub fn rho(&self, r: f64) -> f64 {
        self.laplacian(r).powf(-0.5)
    }

    /// `sigma = (1 - r)^2 Laplacian h` at `r = 1 - q`.
    pub fn sigma_q(&self, q: f64) -> f64 {
        q * q * self.laplacian_q(q)
    }

    pub fn sigma(&self, r: f64) -> f64 {
        self.sigma_q(1.0 - r)
    }

    /// Ladder checks of the standing hypotheses on the weight.
    pub fn diagnostics(&self, ladder: &[f64]) -> WeightDiagnostics {
        let rho: Vec<f64> = ladder.iter().map(|&r| self.rho(r)).collect();
        let sigma: Vec<f64> = ladder.iter().map(|&r| self.sigma(r)).collect();
        let index = ladder
            .iter()
            .filter(|&&r| r >= 0.5)
            .map(|&r| (1.0 - r) * self.hp(r) / self.h(r))
            .fold(0.0, f64::max);
        WeightDiagnostics {
            rho_decreasing: rho.windows(2).all(|w| w[1] < w[0]),
            sigma_nondecreasing: sigma.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)),
            max_log_index: index,
        }
    }
}

/// Centre and half-step for central differences at `r = 1 - q`, moved off
/// the origin when the stencil would cross it.
fn fd_point(q: f64) -> (f64, f64) {
    let e = q / 64.0;
    let r = (1.0 - q).max(2.0 * e);
    (r, e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightDiagnostics {
    pub rho_decreasing: bool,
    pub sigma_nondecreasing: bool,
    /// `max (1 - r) h'(r) / h(r)` over ladder points `r >= 1/2`.
    pub max_log_index: f64,
}

/// Kind of growth function.
#[derive(Clone)]
pub enum ScaleKind {
    /// `psi(x) = x^rho`.
    Power { rho: f64 },
    /// `psi(x) = log^p x`.
    LogPower { p: f64 },
    /// User-supplied `psi`; `psi_tilde` by quadrature.
    Tabulated { name: String, psi: RealFn },
    /// `psi(t) = t^(-2) Laplacian h(1 - 1/t)` from a weight.
    Weight(WeightPair),
}

impl fmt::Debug for ScaleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScaleKind::Power { rho } => write!(f, "Power({rho})"),
            ScaleKind::LogPower { p } => write!(f, "LogPower({p})"),
            ScaleKind::Tabulated { name, .. } => write!(f, "Tabulated({name})"),
            ScaleKind::Weight(w) => write!(f, "Weight({w:?})"),
        }
    }
}

/// A nondecreasing growth function with its cached Pólya-order estimate.
#[derive(Debug, Clone)]
pub struct GrowthScale {
    kind: ScaleKind,
    polya_order: f64,
}

impl GrowthScale {
    pub fn power(rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("power exponent must be positive, got {rho}")));
        }
        Ok(Self::with_kind(ScaleKind::Power { rho }))
    }

    pub fn log_power(p: f64) -> Result<Self> {
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!("log-power exponent must be >= 0, got {p}")));
        }
        Ok(Self::with_kind(ScaleKind::LogPower { p }))
    }

    pub fn tabulated(name: impl Into<String>, psi: RealFn) -> Self {
        Self::with_kind(ScaleKind::Tabulated {
            name: name.into(),
            psi,
        })
    }

    fn with_kind(kind: ScaleKind) -> Self {
        let mut scale = GrowthScale {
            kind,
            polya_order: 0.0,
        };
        scale.polya_order = polya_order_estimate(&scale, &default_polya_ladder());
        scale
    }

    /// Re-estimate and cache the Pólya order on `ladder`.
    pub fn with_polya_ladder(mut self, ladder: &[f64]) -> Self {
        self.polya_order = polya_order_estimate(&self, ladder);
        self
    }

    pub fn kind(&self) -> &ScaleKind {
        &self.kind
    }

    pub fn polya_order(&self) -> f64 {
        self.polya_order
    }

    pub fn weight(&self) -> Option<&WeightPair> {
        match &self.kind {
            ScaleKind::Weight(w) => Some(w),
            _ => None,
        }
    }

    pub fn psi(&self, x: f64) -> f64 {
        match &self.kind {
            ScaleKind::Power { rho } => x.powf(*rho),
            ScaleKind::LogPower { p } => {
                if *p == 0.0 {
                    1.0
                } else {
                    x.ln().max(0.0).powf(*p)
                }
            }
            ScaleKind::Tabulated { psi, .. } => psi(x),
            ScaleKind::Weight(w) => w.sigma_q(1.0 / x),
        }
    }

    /// `int_1^x psi(t)/t dt`; closed form for power and log-power kinds.
    pub fn psi_tilde(&self, x: f64) -> Result<f64> {
        if !(x >= 1.0) {
            return Err(Error::InvalidParameter(format!("psi_tilde needs x >= 1, got {x}")));
        }
        Ok(match &self.kind {
            ScaleKind::Power { rho } => (x.powf(*rho) - 1.0) / rho,
            ScaleKind::LogPower { p } => x.ln().powf(p + 1.0) / (p + 1.0),
            _ => self.psi_tilde_quadrature(x),
        })
    }

    /// `psi_tilde` by adaptive Simpson in `u = log t`, whatever the kind.
    pub fn psi_tilde_quadrature(&self, x: f64) -> f64 {
        let top = x.ln();
        if top == 0.0 {
            return 0.0;
        }
        let magnitude = self.psi(x).abs().max(self.psi(1.0).abs()).max(1.0) * top;
        let panels = (top.ceil() as usize).clamp(1, 256);
        adaptive_simpson(|u: f64| self.psi(u.exp()), 0.0, top, 1e-12 * magnitude, panels)
    }

    /// `psi_tilde(1 / (1 - r))` given `q = 1 - r`.
    pub fn psi_tilde_at_q(&self, q: f64) -> Result<f64> {
        self.psi_tilde(1.0 / q)
    }

    pub fn spec(&self) -> ScaleSpec {
        match &self.kind {
            ScaleKind::Power { rho } => ScaleSpec::Power { rho: *rho },
            ScaleKind::LogPower { p } => ScaleSpec::LogPower { p: *p },
            ScaleKind::Tabulated { name, .. } => ScaleSpec::Tabulated { name: name.clone() },
            ScaleKind::Weight(w) => match w.kind() {
                WeightKind::LogPower { gamma } => ScaleSpec::Weight {
                    h: WEIGHT_LOG_POWER.into(),
                    gamma: *gamma,
                },
                WeightKind::Custom { name, .. } => ScaleSpec::Tabulated { name: name.clone() },
            },
        }
    }
}

pub const WEIGHT_LOG_POWER: &str = "log-power-of-one-minus-r";

/// Serialized scale description, e.g. `{"kind": "log-power", "p": 1.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", try_from = "RawScaleSpec")]
pub enum ScaleSpec {
    Power { rho: f64 },
    LogPower { p: f64 },
    Weight { h: String, gamma: f64 },
    Tabulated { name: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScaleSpec {
    kind: String,
    rho: Option<f64>,
    p: Option<f64>,
    h: Option<String>,
    gamma: Option<f64>,
    name: Option<String>,
}

impl TryFrom<RawScaleSpec> for ScaleSpec {
    type Error = String;

    fn try_from(raw: RawScaleSpec) -> std::result::Result<Self, String> {
        let need = |v: Option<f64>, field: &str| v.ok_or_else(|| format!("scale kind {:?} needs field {field:?}", raw.kind));
        match raw.kind.as_str() {
            "power" => Ok(ScaleSpec::Power { rho: need(raw.rho, "rho")? }),
            "log-power" => Ok(ScaleSpec::LogPower { p: need(raw.p, "p")? }),
            "weight" => Ok(ScaleSpec::Weight {
                h: raw.h.clone().ok_or("scale kind \"weight\" needs field \"h\"")?,
                gamma: need(raw.gamma, "gamma")?,
            }),
            "tabulated" => Ok(ScaleSpec::Tabulated {
                name: raw.name.clone().unwrap_or_default(),
            }),
            other => Err(format!("unknown scale kind {other:?}")),
        }
    }
}

impl ScaleSpec {
    pub fn build(&self) -> Result<GrowthScale> {
        match self {
            ScaleSpec::Power { rho } => GrowthScale::power(*rho),
            ScaleSpec::LogPower { p } => GrowthScale::log_power(*p),
            ScaleSpec::Weight { h, gamma } => {
                if h != WEIGHT_LOG_POWER {
                    return Err(Error::InvalidParameter(format!("unknown weight family {h:?}")));
                }
                weight_to_psi(&WeightPair::log_power(*gamma)?)
            }
            ScaleSpec::Tabulated { name } => Err(Error::InvalidParameter(format!(
                "tabulated scale {name:?} cannot be rebuilt from its description"
            ))),
        }
    }
}

/// `sup psi(2x)/psi(x)` over the ladder.
pub fn polya_doubling(scale: &GrowthScale, ladder: &[f64]) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for &x in ladder {
        let base = scale.psi(x);
        if base == 0.0 {
            return Err(Error::InvalidParameter(format!("psi vanishes at ladder point {x}")));
        }
        sup = sup.max(scale.psi(2.0 * x) / base);
    }
    Ok(sup)
}

/// Pólya-order estimate: `sup log(psi(Cx)/psi(x)) / log C` over
/// `C in {2, 4, 8}` and the ladder points in the upper half (log scale) of
/// the ladder, clamped at 0. Ladder points where `psi` vanishes are skipped.
pub fn polya_order_estimate(scale: &GrowthScale, ladder: &[f64]) -> f64 {
    let (lo, hi) = ladder
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if !(lo.is_finite() && hi.is_finite()) {
        return 0.0;
    }
    let cut = (lo.ln() + hi.ln()) / 2.0;
    let mut sup: f64 = 0.0;
    for &x in ladder.iter().filter(|x| x.ln() >= cut) {
        let base = scale.psi(x);
        if !(base > 0.0) {
            continue;
        }
        for c in [2.0f64, 4.0, 8.0] {
            let ratio = scale.psi(c * x) / base;
            if ratio > 0.0 && ratio.is_finite() {
                sup = sup.max(ratio.ln() / c.ln());
            }
        }
    }
    sup
}

/// Genus `s = floor(order) + 1` from the cached Pólya order.
pub fn genus_from_scale(scale: &GrowthScale) -> u32 {
    scale.polya_order().floor() as u32 + 1
}

/// Ladder `t` used to re-check monotonicity of a weight-derived `psi`.
pub fn weight_psi_ladder() -> Vec<f64> {
    (1..=64).map(|k| 10f64.powf(k as f64 / 8.0)).collect()
}

/// Growth scale `psi(t) = t^(-2) Laplacian h(1 - 1/t)` attached to a weight.
pub fn weight_to_psi(weight: &WeightPair) -> Result<GrowthScale> {
    let scale = GrowthScale::with_kind(ScaleKind::Weight(weight.clone()));
    let ladder = weight_psi_ladder();
    let values: Vec<f64> = ladder.iter().map(|&t| scale.psi(t)).collect();
    // central differences carry relative truncation error of order (1/64)^2
    let slack = match weight.kind() {
        WeightKind::LogPower { .. } => 1e-10,
        WeightKind::Custom { .. } => 1e-3,
    };
    for (i, w) in values.windows(2).enumerate() {
        if !(w[1].is_finite() && w[0].is_finite()) || w[1] < w[0] * (1.0 - slack) {
            return Err(Error::Hypothesis(format!(
                "psi from weight {weight:?} decreases between t = {} and t = {}",
                ladder[i],
                ladder[i + 1]
            )));
        }
    }
    Ok(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn psi_tilde_closed_forms() {
        let log1 = GrowthScale::log_power(1.0).unwrap();
        assert_relative_eq!(log1.psi_tilde(E * E).unwrap(), 2.0, max_relative = 1e-15);
        let lin = GrowthScale::power(1.0).unwrap();
        assert_relative_eq!(lin.psi_tilde(3.0).unwrap(), 2.0, max_relative = 1e-15);
        for s in [log1, lin, GrowthScale::log_power(0.0).unwrap()] {
            assert_eq!(s.psi_tilde(1.0).unwrap(), 0.0);
            assert!(s.psi_tilde(0.5).is_err());
        }
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let scales = [
            GrowthScale::log_power(0.0).unwrap(),
            GrowthScale::log_power(1.0).unwrap(),
            GrowthScale::log_power(2.5).unwrap(),
            GrowthScale::power(0.5).unwrap(),
            GrowthScale::power(1.3).unwrap(),
        ];
        for s in &scales {
            for x in [1.5, 10.0, 1e3, 1e6, 1e9] {
                let closed = s.psi_tilde(x).unwrap();
                let quad = s.psi_tilde_quadrature(x);
                assert_relative_eq!(closed, quad, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn psi_tilde_outgrows_log() {
        let s = GrowthScale::log_power(1.0).unwrap();
        let top: Vec<f64> = (10..=12)
            .map(|k| {
                let x = 10f64.powi(k);
                s.psi_tilde(x).unwrap() / x.ln()
            })
            .collect();
        assert!(top.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn doubling_examples() {
        let log = GrowthScale::log_power(1.0).unwrap();
        let ladder = [E, E * E, E.powi(4)];
        let d = polya_doubling(&log, &ladder).unwrap();
        assert!(d <= 1.0 + 2f64.ln());
        let ratios: Vec<f64> = ladder.iter().map(|&x| log.psi(2.0 * x) / log.psi(x)).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]));
        let sq = GrowthScale::power(2.0).unwrap();
        assert_relative_eq!(polya_doubling(&sq, &[3.0, 30.0]).unwrap(), 4.0, max_relative = 1e-14);
        let flat = GrowthScale::log_power(0.0).unwrap();
        assert_eq!(polya_doubling(&flat, &[5.0, 50.0]).unwrap(), 1.0);
        let zero = GrowthScale::tabulated("zero", Arc::new(|_| 0.0));
        assert!(polya_doubling(&zero, &[5.0]).is_err());
    }

    #[test]
    fn polya_order_examples() {
        let p07 = GrowthScale::power(0.7).unwrap();
        assert_relative_eq!(p07.polya_order(), 0.7, epsilon = 1e-9);
        let log2 = GrowthScale::log_power(2.0).unwrap();
        let short = polya_order_estimate(&log2, &(2..=12).map(|k| 10f64.powf(k as f64 / 2.0)).collect::<Vec<_>>());
        let long = polya_order_estimate(&log2, &(2..=48).map(|k| 10f64.powf(k as f64 / 2.0)).collect::<Vec<_>>());
        assert!(long < short && long < 0.1);
        let xlogx = GrowthScale::tabulated("x log x", Arc::new(|x: f64| x * x.ln()));
        let est = xlogx.polya_order();
        assert!(est > 1.0 && est <= 1.2, "{est}");
        let longer = polya_order_estimate(&xlogx, &(2..=48).map(|k| 10f64.powf(k as f64 / 2.0)).collect::<Vec<_>>());
        assert!(longer < est && longer > 1.0);
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus_from_scale(&GrowthScale::log_power(1.0).unwrap()), 1);
        assert_eq!(genus_from_scale(&GrowthScale::log_power(3.0).unwrap()), 1);
        assert_eq!(genus_from_scale(&GrowthScale::power(0.7).unwrap()), 1);
        assert_eq!(genus_from_scale(&GrowthScale::power(2.3).unwrap()), 3);
    }

    #[test]
    fn log_squared_weight() {
        let w = WeightPair::log_power(2.0).unwrap();
        // closed-form derivatives against central differences
        let fd = WeightPair::custom("log^2", Arc::new(|r: f64| (1.0 / (1.0 - r)).ln().powi(2)));
        for r in [0.3, 0.6, 0.9, 0.99] {
            assert_relative_eq!(w.hp(r), fd.hp(r), max_relative = 1e-3);
            assert_relative_eq!(w.laplacian(r), fd.laplacian(r), max_relative = 1e-3);
        }
        let ladder: Vec<f64> = (1..100).map(|k| 1.0 - 0.95f64.powi(k)).collect();
        let diag = w.diagnostics(&ladder);
        assert!(diag.rho_decreasing && diag.sigma_nondecreasing);
        assert!(diag.max_log_index.is_finite() && diag.max_log_index < 3.0);
        // (1 - r)/rho = sqrt(sigma) and h / log(1/(1-r)) increasing
        let ratios: Vec<f64> = ladder.iter().map(|&r| w.h(r) / (1.0 / (1.0 - r)).ln()).collect();
        assert!(ratios.windows(2).all(|p| p[1] > p[0]));
        for &r in &ladder {
            assert_relative_eq!((1.0 - r) / w.rho(r), w.sigma(r).sqrt(), max_relative = 1e-12);
        }
    }

    #[test]
    fn weight_psi_matches_log_leading_term() {
        let w = WeightPair::log_power(2.0).unwrap();
        let s = weight_to_psi(&w).unwrap();
        // psi(t) = 2 (1 + log t) + O(log t / t)
        for t in [1e4, 1e6, 1e8] {
            let lead = 2.0 * (1.0 + f64::ln(t));
            assert_relative_eq!(s.psi(t), lead, max_relative = 1e-3);
        }
        // psi_tilde(x) ~ log^2 x ~ h(1 - 1/x)
        for x in [1e4, 1e8] {
            let pt = s.psi_tilde(x).unwrap();
            let h = w.h_q(1.0 / x);
            assert!(pt / h > 1.0 && pt / h < 1.5, "{}", pt / h);
        }
        // chain psi_tilde(T) <= h'(1 - 1/T)/T + 2 h(1 - 1/T) once T >= 6
        for t in [6.0, 10.0, 1e3, 1e6, 1e9] {
            let q = 1.0 / t;
            let bound = w.hp_q(q) * q + 2.0 * w.h_q(q);
            assert!(s.psi_tilde(t).unwrap() <= bound * (1.0 + 1e-9));
        }
        assert_eq!(genus_from_scale(&s), 1);
        let ladder: Vec<f64> = (1..20).map(|k| 2f64.powi(k)).collect();
        assert!(polya_doubling(&s, &ladder).unwrap() < 2.0);
    }

    fn dilog(x: f64) -> f64 {
        let series = |x: f64| (1..200).map(|k| x.powi(k) / (k * k) as f64).sum::<f64>();
        if x <= 0.5 {
            series(x)
        } else {
            std::f64::consts::PI.powi(2) / 6.0 - x.ln() * (1.0 - x).ln() - series(1.0 - x)
        }
    }

    #[test]
    fn constant_sigma_weight_gives_constant_psi() {
        // r h'(r) = int_0^r s/(1-s)^2 ds = r/(1-r) + log(1-r) makes (1-r)^2 Laplacian h = 1
        let w = WeightPair::custom(
            "sigma=1",
            Arc::new(|r: f64| -(1.0 - r).ln() - dilog(r)),
        );
        let s = weight_to_psi(&w).unwrap();
        for t in [2.0, 10.0, 1e3] {
            assert_relative_eq!(s.psi(t), 1.0, max_relative = 1e-3);
        }
    }

    #[test]
    fn decreasing_weight_psi_is_rejected() {
        // sigma decreasing: Laplacian h ~ (1-r)^-1 gives sigma ~ (1 - r)
        let w = WeightPair::custom("sub-critical", Arc::new(|r: f64| r * r));
        assert!(matches!(weight_to_psi(&w), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn scale_spec_json() {
        let s: ScaleSpec = serde_json::from_str(r#"{"kind": "log-power", "p": 1.0}"#).unwrap();
        assert_eq!(s, ScaleSpec::LogPower { p: 1.0 });
        let w: ScaleSpec =
            serde_json::from_str(r#"{"kind": "weight", "h": "log-power-of-one-minus-r", "gamma": 2.0}"#).unwrap();
        assert!(w.build().unwrap().weight().is_some());
        let p: ScaleSpec = serde_json::from_str(r#"{"kind": "power", "rho": 0.5}"#).unwrap();
        assert_relative_eq!(p.build().unwrap().psi(4.0), 2.0);
    }
}
