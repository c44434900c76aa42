//! Closed-form upper bounds for `|a_2|` and `|a_3|` in the three classes.
//!
//! Every bound is `prefactor * core`. The prefactor is the binomial ratio that
//! carries all dependence on the Cesàro mean; the core is the bound for the
//! unweighted class.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cesaro::{generalized_binomial, CesaroError, CesaroParams, FactorRule};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("bound needs mean index k >= {need}, got k = {k}")]
    IndexTooSmall { need: u32, k: u32 },
    #[error("zero denominator in prefactor (k = {k}, alpha = {alpha})")]
    ZeroDenominator { k: u32, alpha: f64 },
    #[error("radicand {0} is not positive")]
    NonPositiveRadicand(f64),
    #[error(transparent)]
    Cesaro(#[from] CesaroError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("B1 must be finite and positive, got {0}")]
    B1(f64),
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("alpha must lie in (0, 1], got {0}")]
    Alpha(f64),
    #[error("beta must lie in [0, 1), got {0}")]
    Beta(f64),
    #[error("lambda must be >= 1, got {0}")]
    Lambda(f64),
    #[error("missing parameter `{0}`")]
    Missing(&'static str),
}

/// Taylor data `ψ(z) = 1 + B_1 z + B_2 z^2 + ...` of the majorant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiCoefficients {
    b1: f64,
    b2: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    higher: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPsi {
    b1: f64,
    b2: f64,
    #[serde(default)]
    higher: Vec<f64>,
}

impl<'de> Deserialize<'de> for PsiCoefficients {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawPsi::deserialize(d)?;
        Self::with_higher(raw.b1, raw.b2, raw.higher).map_err(serde::de::Error::custom)
    }
}

impl PsiCoefficients {
    pub fn new(b1: f64, b2: f64) -> Result<Self, ParamError> {
        Self::with_higher(b1, b2, Vec::new())
    }

    /// `higher` holds `B_3, B_4, ...`.
    pub fn with_higher(b1: f64, b2: f64, higher: Vec<f64>) -> Result<Self, ParamError> {
        if !b1.is_finite() || b1 <= 0.0 {
            return Err(ParamError::B1(b1));
        }
        if !b2.is_finite() {
            return Err(ParamError::NonFinite { name: "B2", value: b2 });
        }
        if let Some(&value) = higher.iter().find(|x| !x.is_finite()) {
            return Err(ParamError::NonFinite { name: "B_n", value });
        }
        Ok(Self { b1, b2, higher })
    }

    /// `ψ(z) = (1+z)/(1-z)`: every `B_n = 2`.
    pub fn half_plane() -> Self {
        Self {
            b1: 2.0,
            b2: 2.0,
            higher: Vec::new(),
        }
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn higher(&self) -> &[f64] {
        &self.higher
    }

    /// `[1, B_1, B_2, B_3, ...]` as far as known.
    pub fn taylor_prefix(&self) -> Vec<f64> {
        let mut v = vec![1.0, self.b1, self.b2];
        v.extend_from_slice(&self.higher);
        v
    }
}

/// Parameters of the strongly-starlike-type class: `0 < alpha <= 1`, `lambda >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QParams {
    alpha: f64,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawQ {
    alpha: f64,
    lambda: f64,
}

impl<'de> Deserialize<'de> for QParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawQ::deserialize(d)?;
        Self::new(raw.alpha, raw.lambda).map_err(serde::de::Error::custom)
    }
}

impl QParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self, ParamError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(ParamError::Alpha(alpha));
        }
        check_lambda(lambda)?;
        Ok(Self { alpha, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Parameters of the real-part class: `0 <= beta < 1`, `lambda >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HBetaParams {
    beta: f64,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawH {
    beta: f64,
    lambda: f64,
}

impl<'de> Deserialize<'de> for HBetaParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawH::deserialize(d)?;
        Self::new(raw.beta, raw.lambda).map_err(serde::de::Error::custom)
    }
}

impl HBetaParams {
    pub fn new(beta: f64, lambda: f64) -> Result<Self, ParamError> {
        if !(0.0..1.0).contains(&beta) {
            return Err(ParamError::Beta(beta));
        }
        check_lambda(lambda)?;
        Ok(Self { beta, lambda })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

fn check_lambda(lambda: f64) -> Result<(), ParamError> {
    // rejects NaN as well as +inf
    if lambda.is_finite() && lambda >= 1.0 {
        Ok(())
    } else {
        Err(ParamError::Lambda(lambda))
    }
}

/// Which displayed bound a value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaId {
    PsiA2,
    PsiA3,
    StrongA2,
    StrongA3,
    RealPartA2,
    RealPartA3,
}

impl FormulaId {
    pub fn as_str(&self) -> &'static str {
        match self {
            FormulaId::PsiA2 => "psi-a2",
            FormulaId::PsiA3 => "psi-a3",
            FormulaId::StrongA2 => "strong-a2",
            FormulaId::StrongA3 => "strong-a3",
            FormulaId::RealPartA2 => "real-part-a2",
            FormulaId::RealPartA3 => "real-part-a3",
        }
    }

    pub fn coefficient(&self) -> Coefficient {
        match self {
            FormulaId::PsiA2 | FormulaId::StrongA2 | FormulaId::RealPartA2 => Coefficient::A2,
            _ => Coefficient::A3,
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficient {
    A2,
    A3,
}

impl Coefficient {
    pub fn index(&self) -> u32 {
        match self {
            Coefficient::A2 => 2,
            Coefficient::A3 => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub formula_id: FormulaId,
    pub value: f64,
    pub prefactor: f64,
    pub core: f64,
}

/// Prefactor of the `|a_2|` bounds: `C(k+α-1, k-2) / C(k+α-2, k-2)`.
///
/// Under the classical factor rule this is `1 / A_2` of that rule, which is
/// what the verbatim display also equals for the verbatim rule.
pub fn ratio_a2(params: &CesaroParams) -> Result<f64, BoundError> {
    binomial_ratio(params, 2)
}

/// Prefactor of the `|a_3|` bounds: `C(k+α-1, k-3) / C(k+α-3, k-3)`.
pub fn ratio_a3(params: &CesaroParams) -> Result<f64, BoundError> {
    binomial_ratio(params, 3)
}

fn binomial_ratio(params: &CesaroParams, index: u32) -> Result<f64, BoundError> {
    let k = params.k();
    if k < index {
        return Err(BoundError::IndexTooSmall { need: index, k });
    }
    let zero_den = || BoundError::ZeroDenominator {
        k,
        alpha: params.alpha(),
    };
    match params.rule() {
        FactorRule::Verbatim => {
            let top = k as f64 + params.alpha() - 1.0;
            let bottom = k as f64 + params.alpha() - index as f64;
            let den = generalized_binomial(bottom, k - index);
            if den == 0.0 {
                return Err(zero_den());
            }
            Ok(generalized_binomial(top, k - index) / den)
        }
        FactorRule::Classical => {
            let factor = params.factor(index)?;
            if factor == 0.0 {
                return Err(zero_den());
            }
            Ok(1.0 / factor)
        }
    }
}

pub fn bound_a2_psi(cp: &CesaroParams, psi: &PsiCoefficients) -> Result<BoundResult, BoundError> {
    let prefactor = ratio_a2(cp)?;
    let core = psi_a2_core(psi.b1, psi.b2, 4.0);
    Ok(BoundResult {
        formula_id: FormulaId::PsiA2,
        value: prefactor.abs() * core,
        prefactor,
        core,
    })
}

/// The `|a_2|` value obtained when the coefficient of `B_2` inside the
/// absolute value is read as 8 instead of 4. Reported next to the psi-class
/// bound, never used as the bound itself.
pub fn alternative_a2_psi(cp: &CesaroParams, psi: &PsiCoefficients) -> Result<f64, BoundError> {
    Ok(ratio_a2(cp)?.abs() * psi_a2_core(psi.b1, psi.b2, 8.0))
}

fn psi_a2_core(b1: f64, b2: f64, b2_weight: f64) -> f64 {
    b1 * b1.sqrt() / ((3.0 * b1 * b1 - b2_weight * b2).abs() + 4.0 * b1).sqrt()
}

pub fn bound_a3_psi(cp: &CesaroParams, psi: &PsiCoefficients) -> Result<BoundResult, BoundError> {
    let prefactor = ratio_a3(cp)?;
    let (b1, b2) = (psi.b1, psi.b2);
    let denom = (3.0 * b1 * b1 - 4.0 * b2).abs() + 4.0 * b1;
    let core = (1.0 - 4.0 / (3.0 * b1)) * b1.powi(3) / denom + b1 / 3.0;
    Ok(BoundResult {
        formula_id: FormulaId::PsiA3,
        value: prefactor * core,
        prefactor,
        core,
    })
}

/// `4^k (1+λ)^2 + α [2·3^k (1+λ) - 4^k (1+λ)^2]`.
pub fn strong_a2_radicand(k: u32, q: &QParams) -> f64 {
    let l1 = 1.0 + q.lambda;
    let four_k = 4f64.powi(k as i32);
    let three_k = 3f64.powi(k as i32);
    four_k * l1 * l1 + q.alpha * (2.0 * three_k * l1 - four_k * l1 * l1)
}

pub fn bound_a2_strong(cp: &CesaroParams, q: &QParams) -> Result<BoundResult, BoundError> {
    let prefactor = ratio_a2(cp)?;
    let radicand = strong_a2_radicand(cp.k(), q);
    if !(radicand > 0.0) {
        return Err(BoundError::NonPositiveRadicand(radicand));
    }
    let core = 2.0 * q.alpha / radicand.sqrt();
    Ok(BoundResult {
        formula_id: FormulaId::StrongA2,
        value: prefactor.abs() * core,
        prefactor,
        core,
    })
}

pub fn bound_a3_strong(cp: &CesaroParams, q: &QParams) -> Result<BoundResult, BoundError> {
    let prefactor = ratio_a3(cp)?;
    let (a, l) = (q.alpha, q.lambda);
    let core = 2.0 * a / (1.0 + 2.0 * l) + 4.0 * a * a / ((1.0 + l) * (1.0 + l));
    Ok(BoundResult {
        formula_id: FormulaId::StrongA3,
        value: prefactor * core,
        prefactor,
        core,
    })
}

pub fn bound_a2_realpart(cp: &CesaroParams, h: &HBetaParams) -> Result<BoundResult, BoundError> {
    let prefactor = ratio_a2(cp)?;
    let core = (2.0 * (1.0 - h.beta) / (1.0 + 2.0 * h.lambda)).sqrt();
    Ok(BoundResult {
        formula_id: FormulaId::RealPartA2,
        value: prefactor * core,
        prefactor,
        core,
    })
}

pub fn bound_a3_realpart(cp: &CesaroParams, h: &HBetaParams) -> Result<BoundResult, BoundError> {
    let prefactor = ratio_a3(cp)?;
    let (b, l) = (h.beta, h.lambda);
    let core =
        4.0 * (1.0 - b) * (1.0 - b) / ((1.0 + l) * (1.0 + l)) + 2.0 * (1.0 - b) / (1.0 + 2.0 * l);
    Ok(BoundResult {
        formula_id: FormulaId::RealPartA3,
        value: prefactor * core,
        prefactor,
        core,
    })
}
