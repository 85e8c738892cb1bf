//! Effective code distance and logical-error-rate scaling laws.
//!
//! The central law is `p_log = α (p_phy/β)^{γ d_R − δ}` with
//! `d_R = d e^{−λ(θ² + φ²)}`. `δ` is stored signed, as it comes out of the
//! fits (negative), so `0.065 (p/0.0044)^{0.68 d_R + 0.87}` has `δ = −0.87`.
//! Every curve of this form passes through `(β, α)` whatever `d_R` is.
//!
//! Probabilities are never clamped. A sweep that produces values above 1
//! marks its series and logs a warning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default threshold for depolarizing noise.
pub const P_TH_SD: f64 = 0.018;
/// Default threshold for Z-biased noise.
pub const P_TH_SI: f64 = 0.015;
/// Default scaling exponent `ν₀`.
pub const NU0: f64 = 1.01;
/// Default power-law prefactor `A`; an arbitrary choice, not a fitted value.
pub const PREFACTOR_A: f64 = 0.1;

const MIN_DR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// Standard depolarizing.
    Sd,
    /// Superconducting-inspired, Z-biased.
    Si,
}

impl NoiseModel {
    pub const ALL: [NoiseModel; 2] = [NoiseModel::Sd, NoiseModel::Si];

    pub fn default_p_th(self) -> f64 {
        match self {
            NoiseModel::Sd => P_TH_SD,
            NoiseModel::Si => P_TH_SI,
        }
    }

    /// Exponent `ξ` of the power law: `(d_R+1)/2` or `(d_R+2)/2`.
    pub fn xi(self, d_r: f64) -> f64 {
        match self {
            NoiseModel::Sd => (d_r + 1.0) / 2.0,
            NoiseModel::Si => (d_r + 2.0) / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Small,
    Large,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
    Combined,
}

tag_enum!(NoiseModel, NoiseModel::Sd => "sd", NoiseModel::Si => "si");
tag_enum!(Regime, Regime::Small => "small", Regime::Large => "large", Regime::Combined => "combined");
tag_enum!(Parity, Parity::Odd => "odd", Parity::Even => "even", Parity::Combined => "combined");

/// Parameters of every scaling law in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Signed offset; the exponent is `γ d_R − δ`.
    pub delta: f64,
    pub nu0: f64,
    pub p_th: f64,
    pub prefactor_a: f64,
    pub model: NoiseModel,
    pub regime: Regime,
    pub parity: Parity,
}

impl ScalingParams {
    /// `α, β, γ, δ` with the model's default threshold, `ν₀` and `A`.
    pub fn new(model: NoiseModel, regime: Regime, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            gamma,
            delta,
            nu0: NU0,
            p_th: model.default_p_th(),
            prefactor_a: PREFACTOR_A,
            model,
            regime,
            parity: Parity::Combined,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::invalid("beta", format!("must lie in (0, 1), got {}", self.beta)));
        }
        if !(self.p_th > 0.0 && self.p_th < 1.0) {
            return Err(Error::invalid("p_th", format!("must lie in (0, 1), got {}", self.p_th)));
        }
        if !(self.nu0 > 0.0) {
            return Err(Error::invalid("nu0", format!("must be > 0, got {}", self.nu0)));
        }
        if ![self.alpha, self.gamma, self.delta, self.prefactor_a]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::invalid("params", "alpha, gamma, delta and A must be finite"));
        }
        Ok(())
    }

    /// The closed-form fit equations; only small and large regimes exist.
    pub fn table1(model: NoiseModel, regime: Regime) -> Option<Self> {
        TABLE1
            .iter()
            .find(|r| r.0 == model && r.1 == regime)
            .map(|&(m, g, a, b, c, d)| Self::new(m, g, a, b, c, d).expect("table values are valid"))
    }

    /// Exponent `γ d_R − δ`.
    pub fn exponent(&self, d_r: f64) -> f64 {
        self.gamma * d_r - self.delta
    }
}

/// `(model, regime, α, β, γ, δ)` of the four fit equations.
pub const TABLE1: [(NoiseModel, Regime, f64, f64, f64, f64); 4] = [
    (NoiseModel::Sd, Regime::Small, 0.065, 0.0044, 0.68, -0.87),
    (NoiseModel::Sd, Regime::Large, 0.063, 0.0064, 0.65, -1.12),
    (NoiseModel::Si, Regime::Small, 0.064, 0.0042, 0.81, -0.62),
    (NoiseModel::Si, Regime::Large, 0.034, 0.0057, 0.77, -0.87),
];

/// One row of the per-parity fit table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub model: NoiseModel,
    pub regime: Regime,
    pub parity: Parity,
    pub d_r: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl TableRow {
    pub fn params(&self) -> ScalingParams {
        let mut p = ScalingParams::new(self.model, self.regime, self.alpha, self.beta, self.gamma, self.delta)
            .expect("table values are valid");
        p.parity = self.parity;
        p
    }
}

#[allow(clippy::too_many_arguments)]
const fn row(
    model: NoiseModel,
    regime: Regime,
    parity: Parity,
    d_r: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> TableRow {
    TableRow {
        model,
        regime,
        parity,
        d_r,
        alpha,
        beta,
        gamma,
        delta,
    }
}

/// Fitted parameters for every model, regime and parity. The two combined
/// rows per model are listed in the order of increasing `d_R`.
pub const TABLE2: [TableRow; 12] = {
    use NoiseModel::{Sd, Si};
    use Parity::{Combined as Both, Even, Odd};
    use Regime::{Combined, Large, Small};
    [
        row(Sd, Small, Even, 2.7498, 0.0644, 0.0044, 0.6818, -0.8749),
        row(Sd, Small, Odd, 3.2497, 0.0622, 0.0064, 0.6539, -1.1249),
        row(Sd, Large, Even, 2.7445, 0.0645, 0.0062, 0.6822, -0.8723),
        row(Sd, Large, Odd, 3.2435, 0.0978, 0.0042, 0.6542, -1.1218),
        row(Sd, Combined, Both, 2.7400, 0.0645, 0.0044, 0.6825, -0.8700),
        row(Sd, Combined, Both, 3.2380, 0.0623, 0.0064, 0.6544, -1.1190),
        row(Si, Small, Even, 3.2497, 0.0643, 0.0042, 0.8077, -0.6249),
        row(Si, Small, Odd, 3.7497, 0.0664, 0.0039, 0.7667, -0.8749),
        row(Si, Large, Even, 3.2435, 0.0357, 0.0042, 0.8083, -0.6218),
        row(Si, Large, Odd, 3.7425, 0.0664, 0.0039, 0.7672, -0.8713),
        row(Si, Combined, Both, 3.2390, 0.0643, 0.0042, 0.8087, -0.6195),
        row(Si, Combined, Both, 3.7370, 0.0336, 0.0057, 0.7676, -0.8685),
    ]
};

/// `f(θ, φ) = e^{−λ(θ² + φ²)}`.
pub fn deformation(lambda_dec: f64, theta: f64, phi: f64) -> Result<f64> {
    if !(lambda_dec >= 0.0) {
        return Err(Error::invalid("lambda", format!("must be >= 0, got {lambda_dec}")));
    }
    Ok((-lambda_dec * (theta * theta + phi * phi)).exp())
}

/// `d_R = d f(θ, φ)`.
pub fn effective_distance(d: u32, lambda_dec: f64, theta: f64, phi: f64) -> Result<f64> {
    if d < 1 {
        return Err(Error::invalid("d", "code distance must be at least 1"));
    }
    Ok(d as f64 * deformation(lambda_dec, theta, phi)?)
}

/// `d/2` for even `d`, `(d+1)/2` for odd `d`.
pub fn parity_adjusted_distance(d: u32) -> f64 {
    if d % 2 == 0 {
        d as f64 / 2.0
    } else {
        (d as f64 + 1.0) / 2.0
    }
}

/// `A p^ξ` with the model's exponent `ξ`.
pub fn plog_power_law(p_phy: f64, d_r: f64, a: f64, model: NoiseModel) -> f64 {
    a * p_phy.powf(model.xi(d_r))
}

/// `(p_phy − p_th) d_R^{1/ν₀}`; negative above the threshold's far side.
pub fn plog_threshold_form(p_phy: f64, p_th: f64, d_r: f64, nu0: f64) -> Result<f64> {
    check_dr(d_r)?;
    Ok((p_phy - p_th) * d_r.powf(1.0 / nu0))
}

/// `p_th d_R^{−1/ν₀}`.
pub fn threshold_rotated(p_th: f64, d_r: f64, nu0: f64) -> Result<f64> {
    check_dr(d_r)?;
    Ok(p_th * d_r.powf(-1.0 / nu0))
}

fn check_dr(d_r: f64) -> Result<()> {
    if !(d_r > 0.0) {
        return Err(Error::invalid("d_R", format!("must be > 0, got {d_r}")));
    }
    Ok(())
}

/// `Σ_{i=1}^{n} α_i (p_phy / p_th_i)^{d_R + i}` over `terms = [(α_i, p_th_i)]`.
pub fn plog_series(p_phy: f64, d_r: f64, terms: &[(f64, f64)]) -> Result<f64> {
    if terms.is_empty() {
        return Err(Error::Empty);
    }
    let mut sum = 0.0;
    for (i, &(alpha, p_th)) in terms.iter().enumerate() {
        if !(p_th > 0.0 && p_th < 1.0) {
            return Err(Error::invalid(
                "p_th",
                format!("term {} threshold {p_th} not in (0, 1)", i + 1),
            ));
        }
        sum += alpha * (p_phy / p_th).powf(d_r + (i + 1) as f64);
    }
    Ok(sum)
}

/// [`plog_series`] from a raw distance, optionally halving it by parity before
/// the deformation is applied.
pub fn plog_series_for_distance(
    p_phy: f64,
    d: u32,
    lambda_dec: f64,
    theta: f64,
    phi: f64,
    terms: &[(f64, f64)],
    parity_adjust: bool,
) -> Result<f64> {
    let base = if parity_adjust {
        parity_adjusted_distance(d)
    } else {
        d as f64
    };
    plog_series(p_phy, base * deformation(lambda_dec, theta, phi)?, terms)
}

/// `(γ, δ)` as functions of `d_R`.
pub fn gamma_delta_from_dr(d_r: f64, model: NoiseModel) -> Result<(f64, f64)> {
    if !(d_r >= MIN_DR) {
        return Err(Error::SingularDistance(d_r));
    }
    Ok(match model {
        NoiseModel::Sd => (0.5 + 1.0 / (2.0 * d_r), 0.5 - d_r / 2.0),
        NoiseModel::Si => (0.5 + 1.0 / d_r, 1.0 - d_r / 2.0),
    })
}

/// `(γ, δ)` for `d_R = d e^{−λ(θ² + φ²)}`.
pub fn gamma_delta(d: u32, lambda_dec: f64, theta: f64, phi: f64, model: NoiseModel) -> Result<(f64, f64)> {
    gamma_delta_from_dr(effective_distance(d, lambda_dec, theta, phi)?, model)
}

/// `α (p_phy/β)^{γ d_R − δ}`.
pub fn plog_fitted(p_phy: f64, params: &ScalingParams, d_r: f64) -> f64 {
    params.alpha * (p_phy / params.beta).powf(params.exponent(d_r))
}

/// The point `(β, α)` shared by every curve of [`plog_fitted`].
pub fn crossing_point(params: &ScalingParams) -> (f64, f64) {
    (params.beta, params.alpha)
}

/// A scaling law evaluated by [`curve_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub enum ScalingLaw {
    Fitted(ScalingParams),
    PowerLaw { a: f64, model: NoiseModel },
    Series { terms: Vec<(f64, f64)>, model: NoiseModel },
}

impl ScalingLaw {
    pub fn model(&self) -> NoiseModel {
        match self {
            ScalingLaw::Fitted(p) => p.model,
            ScalingLaw::PowerLaw { model, .. } | ScalingLaw::Series { model, .. } => *model,
        }
    }

    pub fn regime(&self) -> Regime {
        match self {
            ScalingLaw::Fitted(p) => p.regime,
            _ => Regime::Combined,
        }
    }

    pub fn eval(&self, p_phy: f64, d_r: f64) -> Result<f64> {
        match self {
            ScalingLaw::Fitted(p) => Ok(plog_fitted(p_phy, p, d_r)),
            ScalingLaw::PowerLaw { a, model } => Ok(plog_power_law(p_phy, d_r, *a, *model)),
            ScalingLaw::Series { terms, .. } => plog_series(p_phy, d_r, terms),
        }
    }
}

/// One `p_log(p_phy)` curve at fixed distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSeries {
    pub model: NoiseModel,
    pub regime: Regime,
    pub d: u32,
    pub d_r: f64,
    /// `(p_phy, p_log)` with strictly increasing `p_phy`.
    pub points: Vec<(f64, f64)>,
}

impl DataSeries {
    /// True when some `p_log` lies above 1, outside the probability range.
    pub fn exceeds_unit(&self) -> bool {
        self.points.iter().any(|&(_, p)| p > 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::invalid(
                    "p_phy",
                    format!("not strictly increasing at {}", w[1].0),
                ));
            }
        }
        for &(p, l) in &self.points {
            if !(p > 0.0 && p <= 1.0) || !(l > 0.0) {
                return Err(Error::invalid(
                    "points",
                    format!("({p}, {l}) outside the probability range"),
                ));
            }
        }
        Ok(())
    }
}

/// Evaluates `law` over `grid` for each `(d, d_R)`.
pub fn curve_sweep(law: &ScalingLaw, distances: &[(u32, f64)], grid: &[f64]) -> Result<Vec<DataSeries>> {
    if let Some(&bad) = grid.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::invalid("grid", format!("p_phy = {bad} outside (0, 1)")));
    }
    distances
        .iter()
        .map(|&(d, d_r)| {
            let points = grid
                .iter()
                .map(|&p| law.eval(p, d_r).map(|v| (p, v)))
                .collect::<Result<Vec<_>>>()?;
            let s = DataSeries {
                model: law.model(),
                regime: law.regime(),
                d,
                d_r,
                points,
            };
            if s.exceeds_unit() {
                log::warn!("d = {d}: extrapolated p_log above 1");
            }
            Ok(s)
        })
        .collect()
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || n == 0 {
        return Err(Error::invalid(
            "grid",
            format!("need 0 < lo < hi and n >= 1, got ({lo}, {hi}, {n})"),
        ));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}
