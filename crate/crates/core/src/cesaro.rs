//! The Cesàro mean operator on normalized series.
//!
//! The mean of index `k` and order `alpha` keeps the first `k` coefficients of
//! `f(z) = z + a_2 z^2 + ...`, each weighted by a factor `A_n`. Two factor
//! rules are provided:
//!
//! * [`FactorRule::Verbatim`]: `A_n = C(k+α-n, k-n) / C(k+α-1, k-n)`.
//! * [`FactorRule::Classical`]: `A_n = C(k-n+α, k-n) / C(k-1+α, k-1)`, the
//!   classical order-`α` weight rescaled so that `A_1 = 1`. At `α = 0` this is
//!   the partial sum.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::{NormalizedSeries, SeriesError, TaylorSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CesaroError {
    #[error("mean index k must be at least 1, got {0}")]
    IndexTooSmall(u32),
    #[error("mean order alpha must be finite and >= 0, got {0}")]
    BadOrder(f64),
    #[error("coefficient index {n} outside 1..={k}")]
    IndexOutOfRange { k: u32, n: u32 },
    #[error("zero denominator in Cesaro factor (k = {k}, alpha = {alpha}, n = {n})")]
    ZeroDenominator { k: u32, alpha: f64, n: u32 },
    #[error("series order {order} is smaller than the mean index {k}")]
    SeriesTooShort { order: usize, k: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `x (x-1) ... (x-m+1) / m!`, with `C(x, 0) = 1`.
pub fn generalized_binomial(x: f64, m: u32) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (x - j as f64) / (j + 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorRule {
    #[default]
    Verbatim,
    Classical,
}

impl fmt::Display for FactorRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorRule::Verbatim => "verbatim",
            FactorRule::Classical => "classical",
        })
    }
}

/// Mean index `k` and mean order `alpha`, plus the factor rule in force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CesaroParams {
    k: u32,
    alpha: f64,
    #[serde(default)]
    rule: FactorRule,
}

#[derive(Deserialize)]
struct RawCesaroParams {
    k: u32,
    alpha: f64,
    #[serde(default)]
    rule: FactorRule,
}

impl<'de> Deserialize<'de> for CesaroParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = RawCesaroParams::deserialize(d)?;
        Self::with_rule(raw.k, raw.alpha, raw.rule).map_err(serde::de::Error::custom)
    }
}

impl CesaroParams {
    pub fn new(k: u32, alpha: f64) -> Result<Self, CesaroError> {
        Self::with_rule(k, alpha, FactorRule::Verbatim)
    }

    /// Validates `k`, `alpha` and every denominator the rule will divide by.
    pub fn with_rule(k: u32, alpha: f64, rule: FactorRule) -> Result<Self, CesaroError> {
        if k < 1 {
            return Err(CesaroError::IndexTooSmall(k));
        }
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(CesaroError::BadOrder(alpha));
        }
        let params = Self { k, alpha, rule };
        for n in 1..=k {
            if params.denominator(n) == 0.0 {
                return Err(CesaroError::ZeroDenominator { k, alpha, n });
            }
        }
        Ok(params)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rule(&self) -> FactorRule {
        self.rule
    }

    fn numerator(&self, n: u32) -> f64 {
        let (k, a) = (self.k as f64, self.alpha);
        match self.rule {
            FactorRule::Verbatim => generalized_binomial(k + a - n as f64, self.k - n),
            FactorRule::Classical => generalized_binomial(k - n as f64 + a, self.k - n),
        }
    }

    fn denominator(&self, n: u32) -> f64 {
        let (k, a) = (self.k as f64, self.alpha);
        match self.rule {
            FactorRule::Verbatim => generalized_binomial(k + a - 1.0, self.k - n),
            FactorRule::Classical => generalized_binomial(k - 1.0 + a, self.k - 1),
        }
    }

    /// The weight `A_n` for `1 <= n <= k`.
    pub fn factor(&self, n: u32) -> Result<f64, CesaroError> {
        if n < 1 || n > self.k {
            return Err(CesaroError::IndexOutOfRange { k: self.k, n });
        }
        let den = self.denominator(n);
        if den == 0.0 {
            return Err(CesaroError::ZeroDenominator {
                k: self.k,
                alpha: self.alpha,
                n,
            });
        }
        Ok(self.numerator(n) / den)
    }

    /// `A_n`, or `None` when `n > k` (the coefficient is dropped by the mean).
    pub fn factor_or_dropped(&self, n: u32) -> Option<f64> {
        (n <= self.k).then(|| self.factor(n).ok()).flatten()
    }

    /// Applies the weights to an arbitrary series: `c_0` is kept, `c_n` is
    /// multiplied by `A_n` for `1 <= n <= k` and zeroed above `k`.
    pub fn weigh(&self, s: &TaylorSeries) -> Result<TaylorSeries, CesaroError> {
        let coeffs = s
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| match n {
                0 => Ok(*c),
                n if n as u64 <= self.k as u64 => Ok(c * self.factor(n as u32)?),
                _ => Ok(Complex64::new(0.0, 0.0)),
            })
            .collect::<Result<Vec<_>, CesaroError>>()?;
        Ok(TaylorSeries::new(coeffs)?)
    }
}

/// `A_n` under the configured rule; see [`CesaroParams::factor`].
pub fn cesaro_factor(params: &CesaroParams, n: u32) -> Result<f64, CesaroError> {
    params.factor(n)
}

/// The degree-`k` mean `z + A_2 a_2 z^2 + ... + A_k a_k z^k` at `f`'s order.
pub fn apply_cesaro(
    f: &NormalizedSeries,
    params: &CesaroParams,
) -> Result<NormalizedSeries, CesaroError> {
    if f.order() < params.k as usize {
        return Err(CesaroError::SeriesTooShort {
            order: f.order(),
            k: params.k,
        });
    }
    let weighed = params.weigh(f.series())?;
    Ok(NormalizedSeries::new(weighed)?)
}
