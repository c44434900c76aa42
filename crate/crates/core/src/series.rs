//! Truncated complex power series.
//!
//! A [`TaylorSeries`] stores the coefficients `c_0 ..= c_N` of a polynomial
//! section of an analytic function. Every operation keeps the truncation order
//! fixed; mixing orders is an error rather than an implicit padding.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Truncation order used when nothing else is requested.
pub const DEFAULT_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("truncation order must be at least 1, got {0}")]
    OrderTooSmall(usize),
    #[error("expected {expected} coefficients for order {order}, got {got}")]
    LengthMismatch {
        order: usize,
        expected: usize,
        got: usize,
    },
    #[error("coefficient {index} is not finite")]
    NonFinite { index: usize },
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("inner series has nonzero constant term {0}; composition is undefined")]
    InnerConstant(Complex64),
    #[error("series is not normalized: c0 = {c0}, c1 = {c1}")]
    NotNormalized { c0: Complex64, c1: Complex64 },
}

/// Coefficients `c_0 ..= c_N` of a truncated power series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaylorSeries {
    coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    /// Builds a series of order `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, SeriesError> {
        if coeffs.len() < 2 {
            return Err(SeriesError::OrderTooSmall(coeffs.len().saturating_sub(1)));
        }
        if let Some(index) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(SeriesError::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    /// Builds a series of the given order, padding `prefix` with zeros.
    ///
    /// Coefficients of `prefix` beyond `order` are dropped.
    pub fn from_prefix(prefix: &[Complex64], order: usize) -> Result<Self, SeriesError> {
        if order < 1 {
            return Err(SeriesError::OrderTooSmall(order));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        for (slot, c) in coeffs.iter_mut().zip(prefix) {
            *slot = *c;
        }
        Self::new(coeffs)
    }

    pub fn from_real(prefix: &[f64], order: usize) -> Result<Self, SeriesError> {
        let prefix: Vec<Complex64> = prefix.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_prefix(&prefix, order)
    }

    pub fn zero(order: usize) -> Result<Self, SeriesError> {
        Self::from_prefix(&[], order)
    }

    pub fn one(order: usize) -> Result<Self, SeriesError> {
        Self::from_real(&[1.0], order)
    }

    /// The series `z`.
    pub fn identity(order: usize) -> Result<Self, SeriesError> {
        Self::from_real(&[0.0, 1.0], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `z^n`, zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    fn check_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    /// `ls * self + lt * other`, coefficientwise.
    pub fn linear_combine(
        &self,
        other: &Self,
        ls: Complex64,
        lt: Complex64,
    ) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(s, t)| ls * s + lt * t)
            .collect();
        Self::new(coeffs)
    }

    /// Cauchy product truncated at the common order.
    pub fn multiply(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        Ok(Self {
            coeffs: cauchy_product(&self.coeffs, &other.coeffs),
        })
    }

    /// Coefficients of `self(inner(z))` up to the common order.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.check_order(inner)?;
        let c0 = inner.coeffs[0];
        if c0 != Complex64::new(0.0, 0.0) {
            return Err(SeriesError::InnerConstant(c0));
        }
        // Horner in the series ring.
        let n = self.order();
        let mut acc = vec![Complex64::new(0.0, 0.0); n + 1];
        for &c in self.coeffs.iter().rev() {
            acc = cauchy_product(&acc, &inner.coeffs);
            acc[0] += c;
        }
        Ok(Self { coeffs: acc })
    }

    /// Termwise derivative; the top coefficient is padded with zero so the
    /// order is unchanged.
    pub fn derive(&self) -> Self {
        let n = self.order();
        let mut coeffs = Vec::with_capacity(n + 1);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            coeffs.push(c * k as f64);
        }
        coeffs.push(Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    /// Horner evaluation of the polynomial section.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Largest coefficientwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64, SeriesError> {
        self.check_order(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl fmt::Display for TaylorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl<'de> Deserialize<'de> for TaylorSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let coeffs = Vec::<Complex64>::deserialize(d)?;
        Self::new(coeffs).map_err(serde::de::Error::custom)
    }
}

fn cauchy_product(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, x) in a.iter().enumerate() {
        if *x == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, y) in b.iter().take(n - i).enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// A series with `c_0 = 0` and `c_1 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct NormalizedSeries(TaylorSeries);

impl NormalizedSeries {
    pub fn new(series: TaylorSeries) -> Result<Self, SeriesError> {
        let (c0, c1) = (series.coeff(0), series.coeff(1));
        if c0 != Complex64::new(0.0, 0.0) || c1 != Complex64::new(1.0, 0.0) {
            return Err(SeriesError::NotNormalized { c0, c1 });
        }
        Ok(Self(series))
    }

    /// `z + a_2 z^2 + ...` from the tail `[a_2, a_3, ...]`, truncated at `order`.
    pub fn from_tail(tail: &[Complex64], order: usize) -> Result<Self, SeriesError> {
        let mut prefix = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        prefix.extend_from_slice(tail);
        Self::new(TaylorSeries::from_prefix(&prefix, order)?)
    }

    pub fn identity(order: usize) -> Result<Self, SeriesError> {
        Ok(Self(TaylorSeries::identity(order)?))
    }

    pub fn series(&self) -> &TaylorSeries {
        &self.0
    }

    pub fn into_series(self) -> TaylorSeries {
        self.0
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.0.coeff(n)
    }

    /// The compositional inverse `g` with `self(g(w)) = w` up to the order.
    ///
    /// Solved order by order: with `g_2 .. g_{n-1}` fixed, the degree-`n`
    /// coefficient of `f(g)` is `g_n + (terms in lower g_j)`, so `g_n` is the
    /// negated residual.
    pub fn invert(&self) -> Self {
        let order = self.order();
        let zero = Complex64::new(0.0, 0.0);
        let mut g = vec![zero; order + 1];
        g[1] = Complex64::new(1.0, 0.0);
        for n in 2..=order {
            let residual = degree_coeff_of_composition(self.0.coeffs(), &g, n);
            g[n] = -residual;
        }
        Self(TaylorSeries { coeffs: g })
    }
}

impl AsRef<TaylorSeries> for NormalizedSeries {
    fn as_ref(&self) -> &TaylorSeries {
        &self.0
    }
}

impl fmt::Display for NormalizedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Degree-`n` coefficient of `outer(inner(z))`, using only `inner[..=n]`.
fn degree_coeff_of_composition(outer: &[Complex64], inner: &[Complex64], n: usize) -> Complex64 {
    let zero = Complex64::new(0.0, 0.0);
    let inner = &inner[..=n];
    let mut power = vec![zero; n + 1];
    power[0] = Complex64::new(1.0, 0.0);
    let mut total = zero;
    for &c in outer.iter().take(n + 1).skip(1) {
        power = cauchy_product(&power, inner);
        total += c * power[n];
    }
    total
}
