//! The three bi-univalent classes as interchangeable strategies.
//!
//! Each class implements [`BiUnivalentClass`]: it knows its coefficient
//! bounds, how a two-coefficient seed determines `(a_2, a_3)` together with the
//! coupled data on the inverse side, and which region the class-defining
//! expression must map into. [`ClassRegistry`] resolves a class by name so the
//! CLI and sweeps can select it at run time.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    self, BoundError, BoundResult, Coefficient, FormulaId, HBetaParams, ParamError,
    PsiCoefficients, QParams,
};
use crate::cesaro::CesaroParams;
use crate::construct::{
    caratheodory_violation, schwarz_violation, ConstructError, MeanFactors, Solution,
};
use crate::series::{NormalizedSeries, TaylorSeries};

/// Which kind of two-coefficient prefix seeds a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedKind {
    /// `(b_1, b_2)` of a Schwarz function.
    Schwarz,
    /// `(p_1, p_2)` of a function with positive real part.
    Caratheodory,
}

impl SeedKind {
    /// How far `(first, second)` lies outside the admissible region; `<= 0`
    /// means admissible.
    pub fn violation(&self, first: Complex64, second: Complex64) -> f64 {
        match self {
            SeedKind::Schwarz => schwarz_violation(first, second),
            SeedKind::Caratheodory => caratheodory_violation(first, second),
        }
    }
}

/// Target region of the class-defining expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    /// `|arg w| < half_angle`.
    Sector { half_angle: f64 },
    /// `Re w > min_real`.
    HalfPlane { min_real: f64 },
    /// `|w| < 1`.
    UnitDisk,
}

/// Tagged parameter record selecting one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum ClassSpec {
    Psi {
        psi: PsiCoefficients,
        cesaro: CesaroParams,
    },
    Strong {
        params: QParams,
        cesaro: CesaroParams,
    },
    RealPart {
        params: HBetaParams,
        cesaro: CesaroParams,
    },
}

impl ClassSpec {
    pub fn instantiate(&self) -> Box<dyn BiUnivalentClass> {
        match self {
            ClassSpec::Psi { psi, cesaro } => Box::new(PsiClass::new(psi.clone(), *cesaro)),
            ClassSpec::Strong { params, cesaro } => Box::new(StrongClass::new(*params, *cesaro)),
            ClassSpec::RealPart { params, cesaro } => {
                Box::new(RealPartClass::new(*params, *cesaro))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassSpec::Psi { .. } => PsiClass::NAME,
            ClassSpec::Strong { .. } => StrongClass::NAME,
            ClassSpec::RealPart { .. } => RealPartClass::NAME,
        }
    }

    pub fn cesaro(&self) -> &CesaroParams {
        match self {
            ClassSpec::Psi { cesaro, .. }
            | ClassSpec::Strong { cesaro, .. }
            | ClassSpec::RealPart { cesaro, .. } => cesaro,
        }
    }
}

/// Common interface of the three classes.
pub trait BiUnivalentClass: fmt::Debug + Send + Sync {
    fn name(&self) -> &'static str;

    fn spec(&self) -> ClassSpec;

    fn cesaro(&self) -> &CesaroParams;

    fn seed_kind(&self) -> SeedKind;

    fn formula(&self, coefficient: Coefficient) -> FormulaId;

    fn bound(&self, coefficient: Coefficient) -> Result<BoundResult, BoundError>;

    /// A second reading of a bound worth logging next to it, if any.
    fn alternative_bound(&self, _coefficient: Coefficient) -> Option<f64> {
        None
    }

    /// `(a_2, a_3)` and the inverse-side prefix for the seed `(first, second)`.
    ///
    /// No admissibility checks; see [`crate::construct::build_member`].
    fn solve(&self, first: Complex64, second: Complex64, factors: &MeanFactors) -> Solution;

    /// Series whose values on `|z| = r` must lie in [`Self::region`], computed
    /// from the Cesàro mean of `f` (or the inverse of that mean).
    fn membership_expression(
        &self,
        mean: &NormalizedSeries,
    ) -> Result<TaylorSeries, ConstructError>;

    fn region(&self) -> Region;
}

/// `((1-λ) F(z) + λ z F'(z)) / z` as a series, for `F = z + Σ d_n z^n`.
fn lambda_mixture(mean: &NormalizedSeries, lambda: f64) -> Result<TaylorSeries, ConstructError> {
    let order = mean.order();
    let coeffs: Vec<Complex64> = (1..=order)
        .map(|n| mean.coeff(n) * (1.0 + (n as f64 - 1.0) * lambda))
        .collect();
    Ok(TaylorSeries::from_prefix(&coeffs, order)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiClass {
    psi: PsiCoefficients,
    cesaro: CesaroParams,
}

impl PsiClass {
    pub const NAME: &'static str = "psi";

    pub fn new(psi: PsiCoefficients, cesaro: CesaroParams) -> Self {
        Self { psi, cesaro }
    }
}

impl BiUnivalentClass for PsiClass {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn spec(&self) -> ClassSpec {
        ClassSpec::Psi {
            psi: self.psi.clone(),
            cesaro: self.cesaro,
        }
    }

    fn cesaro(&self) -> &CesaroParams {
        &self.cesaro
    }

    fn seed_kind(&self) -> SeedKind {
        SeedKind::Schwarz
    }

    fn formula(&self, coefficient: Coefficient) -> FormulaId {
        match coefficient {
            Coefficient::A2 => FormulaId::PsiA2,
            Coefficient::A3 => FormulaId::PsiA3,
        }
    }

    fn bound(&self, coefficient: Coefficient) -> Result<BoundResult, BoundError> {
        match coefficient {
            Coefficient::A2 => bounds::bound_a2_psi(&self.cesaro, &self.psi),
            Coefficient::A3 => bounds::bound_a3_psi(&self.cesaro, &self.psi),
        }
    }

    fn alternative_bound(&self, coefficient: Coefficient) -> Option<f64> {
        match coefficient {
            Coefficient::A2 => bounds::alternative_a2_psi(&self.cesaro, &self.psi).ok(),
            Coefficient::A3 => None,
        }
    }

    fn solve(&self, b1: Complex64, b2: Complex64, m: &MeanFactors) -> Solution {
        let (big1, big2) = (self.psi.b1(), self.psi.b2());
        let a2 = big1 * b1 / (2.0 * m.a2);
        let a3 = (big1 * b2 + big2 * b1 * b1) / (3.0 * m.a3);
        let d2 = m.a2 * a2;
        // -2 A_2 a_2 = B_1 c_1
        let c1 = -2.0 * d2 / big1;
        // 3 [2 A_2^2 a_2^2 - A_3 a_3] = B_1 c_2 + B_2 c_1^2
        let c2 = (3.0 * (2.0 * d2 * d2 - m.a3 * a3) - big2 * c1 * c1) / big1;
        Solution {
            a2,
            a3,
            mirror_first: c1,
            mirror_second: c2,
        }
    }

    /// The Schwarz function `u` with `(δf)' = ψ ∘ u`, recovered by inverting
    /// `(ψ - 1) / B_1`. Unknown `B_n` are taken as zero.
    fn membership_expression(
        &self,
        mean: &NormalizedSeries,
    ) -> Result<TaylorSeries, ConstructError> {
        let order = mean.order();
        let b1 = self.psi.b1();
        let scaled: Vec<Complex64> = self
            .psi
            .taylor_prefix()
            .iter()
            .enumerate()
            .map(|(n, &b)| {
                if n == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(b / b1, 0.0)
                }
            })
            .collect();
        let h = NormalizedSeries::new(TaylorSeries::from_prefix(&scaled, order)?)?;
        let h_inv = h.invert();
        let derivative = mean.series().derive();
        let shifted: Vec<Complex64> = derivative
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| {
                if n == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    c / b1
                }
            })
            .collect();
        let inner = TaylorSeries::new(shifted)?;
        Ok(h_inv.series().compose(&inner)?)
    }

    fn region(&self) -> Region {
        Region::UnitDisk
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrongClass {
    params: QParams,
    cesaro: CesaroParams,
}

impl StrongClass {
    pub const NAME: &'static str = "strong";

    pub fn new(params: QParams, cesaro: CesaroParams) -> Self {
        Self { params, cesaro }
    }
}

impl BiUnivalentClass for StrongClass {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn spec(&self) -> ClassSpec {
        ClassSpec::Strong {
            params: self.params,
            cesaro: self.cesaro,
        }
    }

    fn cesaro(&self) -> &CesaroParams {
        &self.cesaro
    }

    fn seed_kind(&self) -> SeedKind {
        SeedKind::Caratheodory
    }

    fn formula(&self, coefficient: Coefficient) -> FormulaId {
        match coefficient {
            Coefficient::A2 => FormulaId::StrongA2,
            Coefficient::A3 => FormulaId::StrongA3,
        }
    }

    fn bound(&self, coefficient: Coefficient) -> Result<BoundResult, BoundError> {
        match coefficient {
            Coefficient::A2 => bounds::bound_a2_strong(&self.cesaro, &self.params),
            Coefficient::A3 => bounds::bound_a3_strong(&self.cesaro, &self.params),
        }
    }

    fn solve(&self, p1: Complex64, p2: Complex64, m: &MeanFactors) -> Solution {
        let (a, l) = (self.params.alpha(), self.params.lambda());
        let a2 = a * p1 / ((1.0 + l) * m.a2);
        let a3 = (2.0 * a * p2 + a * (a - 1.0) * p1 * p1) / (2.0 * (1.0 + 2.0 * l) * m.a3);
        let d2 = m.a2 * a2;
        // -(1+λ) A_2 a_2 = α q_1
        let q1 = -(1.0 + l) * d2 / a;
        // (1+2λ) [2 A_2^2 a_2^2 - A_3 a_3] = α q_2 + α(α-1) q_1^2 / 2
        let q2 = ((1.0 + 2.0 * l) * (2.0 * d2 * d2 - m.a3 * a3) - a * (a - 1.0) * q1 * q1 / 2.0) / a;
        Solution {
            a2,
            a3,
            mirror_first: q1,
            mirror_second: q2,
        }
    }

    fn membership_expression(
        &self,
        mean: &NormalizedSeries,
    ) -> Result<TaylorSeries, ConstructError> {
        lambda_mixture(mean, self.params.lambda())
    }

    fn region(&self) -> Region {
        Region::Sector {
            half_angle: self.params.alpha() * FRAC_PI_2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealPartClass {
    params: HBetaParams,
    cesaro: CesaroParams,
}

impl RealPartClass {
    pub const NAME: &'static str = "real-part";

    pub fn new(params: HBetaParams, cesaro: CesaroParams) -> Self {
        Self { params, cesaro }
    }
}

impl BiUnivalentClass for RealPartClass {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn spec(&self) -> ClassSpec {
        ClassSpec::RealPart {
            params: self.params,
            cesaro: self.cesaro,
        }
    }

    fn cesaro(&self) -> &CesaroParams {
        &self.cesaro
    }

    fn seed_kind(&self) -> SeedKind {
        SeedKind::Caratheodory
    }

    fn formula(&self, coefficient: Coefficient) -> FormulaId {
        match coefficient {
            Coefficient::A2 => FormulaId::RealPartA2,
            Coefficient::A3 => FormulaId::RealPartA3,
        }
    }

    fn bound(&self, coefficient: Coefficient) -> Result<BoundResult, BoundError> {
        match coefficient {
            Coefficient::A2 => bounds::bound_a2_realpart(&self.cesaro, &self.params),
            Coefficient::A3 => bounds::bound_a3_realpart(&self.cesaro, &self.params),
        }
    }

    fn solve(&self, p1: Complex64, p2: Complex64, m: &MeanFactors) -> Solution {
        let (one_b, l) = (1.0 - self.params.beta(), self.params.lambda());
        let a2 = one_b * p1 / ((1.0 + l) * m.a2);
        let a3 = one_b * p2 / ((1.0 + 2.0 * l) * m.a3);
        let d2 = m.a2 * a2;
        let q1 = -(1.0 + l) * d2 / one_b;
        let q2 = (1.0 + 2.0 * l) * (2.0 * d2 * d2 - m.a3 * a3) / one_b;
        Solution {
            a2,
            a3,
            mirror_first: q1,
            mirror_second: q2,
        }
    }

    fn membership_expression(
        &self,
        mean: &NormalizedSeries,
    ) -> Result<TaylorSeries, ConstructError> {
        lambda_mixture(mean, self.params.lambda())
    }

    fn region(&self) -> Region {
        Region::HalfPlane {
            min_real: self.params.beta(),
        }
    }
}

/// Loose parameter bag from flags or config files, turned into a
/// [`ClassSpec`] by a registered factory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub b1: Option<f64>,
    pub b2: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub higher: Vec<f64>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub beta: Option<f64>,
}

fn need(value: Option<f64>, name: &'static str) -> Result<f64, ParamError> {
    value.ok_or(ParamError::Missing(name))
}

pub type ClassFactory = fn(&ClassParams, CesaroParams) -> Result<ClassSpec, ParamError>;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("unknown class `{name}` (known: {known})")]
    Unknown { name: String, known: String },
    #[error("class `{name}`: {source}")]
    Params {
        name: String,
        #[source]
        source: ParamError,
    },
}

#[derive(Clone)]
pub struct RegistryEntry {
    pub factory: ClassFactory,
    /// Parameter names the factory reads.
    pub params: &'static [&'static str],
    pub summary: &'static str,
}

impl fmt::Debug for RegistryEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegistryEntry")
            .field("params", &self.params)
            .field("summary", &self.summary)
            .finish()
    }
}

/// Name → factory table for the known classes.
#[derive(Debug, Clone, Default)]
pub struct ClassRegistry {
    entries: BTreeMap<String, RegistryEntry>,
}

impl ClassRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry with `psi`, `strong` and `real-part`.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(
            PsiClass::NAME,
            RegistryEntry {
                factory: |p, cesaro| {
                    let psi = PsiCoefficients::with_higher(
                        need(p.b1, "b1")?,
                        need(p.b2, "b2")?,
                        p.higher.clone(),
                    )?;
                    Ok(ClassSpec::Psi { psi, cesaro })
                },
                params: &["b1", "b2"],
                summary: "derivative of the mean subordinate to psi",
            },
        );
        r.register(
            StrongClass::NAME,
            RegistryEntry {
                factory: |p, cesaro| {
                    let params = QParams::new(need(p.alpha, "alpha")?, need(p.lambda, "lambda")?)?;
                    Ok(ClassSpec::Strong { params, cesaro })
                },
                params: &["alpha", "lambda"],
                summary: "argument of the lambda-mixture bounded by alpha*pi/2",
            },
        );
        r.register(
            RealPartClass::NAME,
            RegistryEntry {
                factory: |p, cesaro| {
                    let params = HBetaParams::new(need(p.beta, "beta")?, need(p.lambda, "lambda")?)?;
                    Ok(ClassSpec::RealPart { params, cesaro })
                },
                params: &["beta", "lambda"],
                summary: "real part of the lambda-mixture above beta",
            },
        );
        r
    }

    /// Adds or replaces an entry.
    pub fn register(&mut self, name: &str, entry: RegistryEntry) {
        self.entries.insert(name.to_string(), entry);
    }

    pub fn get(&self, name: &str) -> Option<&RegistryEntry> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn spec(
        &self,
        name: &str,
        params: &ClassParams,
        cesaro: CesaroParams,
    ) -> Result<ClassSpec, RegistryError> {
        let entry = self.get(name).ok_or_else(|| RegistryError::Unknown {
            name: name.to_string(),
            known: self.names().collect::<Vec<_>>().join(", "),
        })?;
        (entry.factory)(params, cesaro).map_err(|source| RegistryError::Params {
            name: name.to_string(),
            source,
        })
    }

    pub fn build(
        &self,
        name: &str,
        params: &ClassParams,
        cesaro: CesaroParams,
    ) -> Result<Box<dyn BiUnivalentClass>, RegistryError> {
        Ok(self.spec(name, params, cesaro)?.instantiate())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp() -> CesaroParams {
        CesaroParams::new(3, 1.0).unwrap()
    }

    #[test]
    fn builtin_names() {
        let r = ClassRegistry::builtin();
        assert_eq!(r.names().collect::<Vec<_>>(), ["psi", "real-part", "strong"]);
    }

    #[test]
    fn build_by_name() {
        let r = ClassRegistry::builtin();
        let params = ClassParams {
            beta: Some(0.25),
            lambda: Some(2.0),
            ..Default::default()
        };
        let class = r.build("real-part", &params, cp()).unwrap();
        assert_eq!(class.name(), "real-part");
        assert_eq!(class.seed_kind(), SeedKind::Caratheodory);
        assert_eq!(class.formula(Coefficient::A2), FormulaId::RealPartA2);
        assert_eq!(class.region(), Region::HalfPlane { min_real: 0.25 });
    }

    #[test]
    fn unknown_and_missing() {
        let r = ClassRegistry::builtin();
        let err = r.build("convex", &ClassParams::default(), cp()).unwrap_err();
        assert!(err.to_string().contains("known: psi, real-part, strong"));
        let err = r.build("strong", &ClassParams::default(), cp()).unwrap_err();
        assert!(matches!(
            err,
            RegistryError::Params {
                source: ParamError::Missing("alpha"),
                ..
            }
        ));
    }

    #[test]
    fn custom_registration() {
        let mut r = ClassRegistry::empty();
        r.register(
            "half-plane",
            RegistryEntry {
                factory: |_, cesaro| {
                    Ok(ClassSpec::Psi {
                        psi: PsiCoefficients::half_plane(),
                        cesaro,
                    })
                },
                params: &[],
                summary: "psi = (1+z)/(1-z)",
            },
        );
        let spec = r.spec("half-plane", &ClassParams::default(), cp()).unwrap();
        assert_eq!(spec.name(), "psi");
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ClassSpec::Strong {
            params: QParams::new(0.5, 1.5).unwrap(),
            cesaro: cp(),
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.starts_with(r#"{"class":"strong""#));
        let back: ClassSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.instantiate().spec(), spec);
    }

    #[test]
    fn lambda_mixture_coefficients() {
        let f = NormalizedSeries::from_tail(
            &[Complex64::new(0.5, 0.0), Complex64::new(0.25, 0.0)],
            4,
        )
        .unwrap();
        let e = lambda_mixture(&f, 2.0).unwrap();
        assert_eq!(e.coeff(0), Complex64::new(1.0, 0.0));
        assert_eq!(e.coeff(1), Complex64::new(1.5, 0.0));
        assert_eq!(e.coeff(2), Complex64::new(1.25, 0.0));
        assert_eq!(e.coeff(3), Complex64::new(0.0, 0.0));
    }
}
