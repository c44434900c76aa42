//! Class members built from two-coefficient seeds, and boundary-sampling
//! verification of the class-defining expressions.
//!
//! A seed fixes `(a_2, a_3)` through the coefficient relations of the chosen
//! class. The inverse side is then determined: its prefix is solved from the
//! same relations applied to the inverse of the Cesàro mean, and a seed is
//! *feasible* only when that derived prefix is admissible as well.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{HBetaParams, PsiCoefficients, QParams};
use crate::cesaro::{apply_cesaro, CesaroError, CesaroParams};
use crate::class::{
    BiUnivalentClass, ClassSpec, PsiClass, RealPartClass, Region, SeedKind, StrongClass,
};
use crate::series::{NormalizedSeries, SeriesError, TaylorSeries, DEFAULT_ORDER};

/// Slack allowed in admissibility checks, absorbing rounding at the boundary.
pub const FEASIBILITY_SLACK: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("Schwarz prefix outside |b1| <= 1, |b2| <= 1 - |b1|^2 (excess {0:e})")]
    SchwarzPrefix(f64),
    #[error("Caratheodory prefix fails |p1| <= 2, |p2 - p1^2/2| <= 2 - |p1|^2/2 (excess {0:e})")]
    CaratheodoryPrefix(f64),
    #[error("class `{class}` is seeded by a {expected:?} prefix, got {got:?}")]
    SeedKind {
        class: &'static str,
        expected: SeedKind,
        got: SeedKind,
    },
    #[error("construction needs the factors A_2 and A_3, but the mean index is k = {0}")]
    IndexTooSmall(u32),
    #[error("Cesaro factor A_{n} is zero")]
    ZeroFactor { n: u32 },
    #[error("not a Schwarz function on |z| = {radius}: sup |u| = {sup}")]
    NotSchwarz { radius: f64, sup: f64 },
    #[error("sampling radius must lie in (0, 1), got {0}")]
    Radius(f64),
    #[error("need at least 16 samples, got {0}")]
    Samples(usize),
    #[error(transparent)]
    Cesaro(#[from] CesaroError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `max(|b1| - 1, |b2| - (1 - |b1|^2))`.
pub fn schwarz_violation(b1: Complex64, b2: Complex64) -> f64 {
    let r1 = b1.norm();
    (r1 - 1.0).max(b2.norm() - (1.0 - r1 * r1))
}

/// `max(|p1| - 2, |p2 - p1^2/2| - (2 - |p1|^2/2))`.
///
/// The second term is the two-coefficient Carathéodory–Toeplitz condition; it
/// is exactly the Schwarz condition on `b = ((p1/2), p2/2 - p1^2/4)`.
pub fn caratheodory_violation(p1: Complex64, p2: Complex64) -> f64 {
    let r1 = p1.norm();
    (r1 - 2.0).max((p2 - p1 * p1 / 2.0).norm() - (2.0 - r1 * r1 / 2.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchwarzPrefix {
    b1: Complex64,
    b2: Complex64,
}

impl SchwarzPrefix {
    pub fn new(b1: Complex64, b2: Complex64) -> Result<Self, ConstructError> {
        let v = schwarz_violation(b1, b2);
        if !(v <= FEASIBILITY_SLACK) {
            return Err(ConstructError::SchwarzPrefix(v));
        }
        Ok(Self { b1, b2 })
    }

    pub fn b1(&self) -> Complex64 {
        self.b1
    }

    pub fn b2(&self) -> Complex64 {
        self.b2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaratheodoryPrefix {
    p1: Complex64,
    p2: Complex64,
}

impl CaratheodoryPrefix {
    pub fn new(p1: Complex64, p2: Complex64) -> Result<Self, ConstructError> {
        let v = caratheodory_violation(p1, p2);
        if !(v <= FEASIBILITY_SLACK) {
            return Err(ConstructError::CaratheodoryPrefix(v));
        }
        Ok(Self { p1, p2 })
    }

    pub fn p1(&self) -> Complex64 {
        self.p1
    }

    pub fn p2(&self) -> Complex64 {
        self.p2
    }
}

/// A validated seed of either kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Seed {
    Schwarz { b1: Complex64, b2: Complex64 },
    Caratheodory { p1: Complex64, p2: Complex64 },
}

impl Seed {
    pub fn kind(&self) -> SeedKind {
        match self {
            Seed::Schwarz { .. } => SeedKind::Schwarz,
            Seed::Caratheodory { .. } => SeedKind::Caratheodory,
        }
    }

    pub fn pair(&self) -> (Complex64, Complex64) {
        match *self {
            Seed::Schwarz { b1, b2 } => (b1, b2),
            Seed::Caratheodory { p1, p2 } => (p1, p2),
        }
    }

    /// Builds a seed of `kind`, checking admissibility.
    pub fn checked(kind: SeedKind, first: Complex64, second: Complex64) -> Result<Self, ConstructError> {
        Ok(match kind {
            SeedKind::Schwarz => {
                let s = SchwarzPrefix::new(first, second)?;
                Seed::from(s)
            }
            SeedKind::Caratheodory => {
                let p = CaratheodoryPrefix::new(first, second)?;
                Seed::from(p)
            }
        })
    }

    pub fn validate(&self) -> Result<(), ConstructError> {
        let (a, b) = self.pair();
        Self::checked(self.kind(), a, b).map(|_| ())
    }
}

impl From<SchwarzPrefix> for Seed {
    fn from(s: SchwarzPrefix) -> Self {
        Seed::Schwarz { b1: s.b1, b2: s.b2 }
    }
}

impl From<CaratheodoryPrefix> for Seed {
    fn from(p: CaratheodoryPrefix) -> Self {
        Seed::Caratheodory { p1: p.p1, p2: p.p2 }
    }
}

/// The Cesàro weights `A_2`, `A_3` that enter the coefficient relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFactors {
    pub a2: f64,
    pub a3: f64,
}

impl MeanFactors {
    pub fn new(cp: &CesaroParams) -> Result<Self, ConstructError> {
        if cp.k() < 3 {
            return Err(ConstructError::IndexTooSmall(cp.k()));
        }
        let a2 = cp.factor(2)?;
        let a3 = cp.factor(3)?;
        if a2 == 0.0 {
            return Err(ConstructError::ZeroFactor { n: 2 });
        }
        if a3 == 0.0 {
            return Err(ConstructError::ZeroFactor { n: 3 });
        }
        Ok(Self { a2, a3 })
    }
}

/// Coefficients solved from a seed, plus the inverse-side prefix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Solution {
    pub a2: Complex64,
    pub a3: Complex64,
    pub mirror_first: Complex64,
    pub mirror_second: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMember {
    pub f: NormalizedSeries,
    pub a2: Complex64,
    pub a3: Complex64,
    pub class_spec: ClassSpec,
    pub seed: Seed,
    /// Inverse-side prefix `(q_1, q_2)` or `(c_1, c_2)`.
    pub mirror: (Complex64, Complex64),
    /// How far the inverse-side prefix is from admissible; `<= 0` is fine.
    pub mirror_violation: f64,
    pub feasible: bool,
}

impl ClassMember {
    /// The same member with `f` truncated or zero-padded to `order`.
    pub fn with_order(&self, order: usize) -> Result<Self, ConstructError> {
        let order = order.max(self.class_spec.cesaro().k() as usize).max(3);
        let f = NormalizedSeries::from_tail(&[self.a2, self.a3], order)?;
        Ok(Self { f, ..self.clone() })
    }
}

/// Solves `class`'s coefficient relations for `seed` and checks the derived
/// inverse-side prefix.
pub fn build_member(
    class: &dyn BiUnivalentClass,
    seed: Seed,
) -> Result<ClassMember, ConstructError> {
    if seed.kind() != class.seed_kind() {
        return Err(ConstructError::SeedKind {
            class: class.name(),
            expected: class.seed_kind(),
            got: seed.kind(),
        });
    }
    seed.validate()?;
    let factors = MeanFactors::new(class.cesaro())?;
    let (first, second) = seed.pair();
    let sol = class.solve(first, second, &factors);
    let mirror_violation = class
        .seed_kind()
        .violation(sol.mirror_first, sol.mirror_second);
    let order = DEFAULT_ORDER.max(class.cesaro().k() as usize);
    let f = NormalizedSeries::from_tail(&[sol.a2, sol.a3], order)?;
    Ok(ClassMember {
        f,
        a2: sol.a2,
        a3: sol.a3,
        class_spec: class.spec(),
        seed,
        mirror: (sol.mirror_first, sol.mirror_second),
        mirror_violation,
        feasible: mirror_violation <= FEASIBILITY_SLACK,
    })
}

pub fn make_q_member(
    p: CaratheodoryPrefix,
    cp: &CesaroParams,
    q: &QParams,
) -> Result<ClassMember, ConstructError> {
    build_member(&StrongClass::new(*q, *cp), p.into())
}

pub fn make_hbeta_member(
    p: CaratheodoryPrefix,
    cp: &CesaroParams,
    h: &HBetaParams,
) -> Result<ClassMember, ConstructError> {
    build_member(&RealPartClass::new(*h, *cp), p.into())
}

pub fn make_psi_member(
    b: SchwarzPrefix,
    cp: &CesaroParams,
    psi: &PsiCoefficients,
) -> Result<ClassMember, ConstructError> {
    build_member(&PsiClass::new(psi.clone(), *cp), b.into())
}

/// Boundary sampling settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingOptions {
    pub radius: f64,
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            radius: 0.999,
            samples: 4096,
            tolerance: 1e-9,
        }
    }
}

impl SamplingOptions {
    fn check(&self) -> Result<(), ConstructError> {
        if !(self.radius > 0.0 && self.radius < 1.0) {
            return Err(ConstructError::Radius(self.radius));
        }
        if self.samples < 16 {
            return Err(ConstructError::Samples(self.samples));
        }
        Ok(())
    }

    fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.samples)
            .map(move |j| Complex64::from_polar(self.radius, TAU * j as f64 / self.samples as f64))
    }
}

/// `(1 + u) / (1 - u)` for a Schwarz series `u`.
///
/// `u` must have zero constant term and stay inside the unit disk at the
/// sample points of `opts`.
pub fn caratheodory_from_schwarz(
    u: &TaylorSeries,
    opts: &SamplingOptions,
) -> Result<TaylorSeries, ConstructError> {
    opts.check()?;
    let c0 = u.coeff(0);
    if c0 != Complex64::new(0.0, 0.0) {
        return Err(SeriesError::InnerConstant(c0).into());
    }
    let sup = opts.points().map(|z| u.eval(z).norm()).fold(0.0, f64::max);
    if sup >= 1.0 {
        return Err(ConstructError::NotSchwarz {
            radius: opts.radius,
            sup,
        });
    }
    let order = u.order();
    let geometric = TaylorSeries::new(vec![Complex64::new(1.0, 0.0); order + 1])?;
    let reciprocal = geometric.compose(u)?;
    let one_plus = TaylorSeries::one(order)?.linear_combine(
        u,
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
    )?;
    Ok(one_plus.multiply(&reciprocal)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub class: String,
    pub params: ClassSpec,
    pub radius: f64,
    pub samples: usize,
    /// Worst value over both sides: max |arg|, min Re, or max modulus.
    pub extremal_value: f64,
    pub threshold: f64,
    pub pass: bool,
    pub flags: Vec<String>,
}

/// Worst value of `expr` on the sampling circle for the given region.
fn extremal(expr: &TaylorSeries, region: Region, opts: &SamplingOptions) -> f64 {
    let values = opts.points().map(|z| expr.eval(z));
    match region {
        Region::Sector { .. } => values.map(|w| w.arg().abs()).fold(0.0, f64::max),
        Region::HalfPlane { .. } => values.map(|w| w.re).fold(f64::INFINITY, f64::min),
        Region::UnitDisk => values.map(|w| w.norm()).fold(0.0, f64::max),
    }
}

fn within(value: f64, region: Region, tol: f64) -> (f64, bool) {
    match region {
        Region::Sector { half_angle } => (half_angle, value < half_angle + tol),
        Region::HalfPlane { min_real } => (min_real, value > min_real - tol),
        Region::UnitDisk => (1.0, value < 1.0 + tol),
    }
}

fn worse(a: f64, b: f64, region: Region) -> f64 {
    match region {
        Region::HalfPlane { .. } => a.min(b),
        _ => a.max(b),
    }
}

/// Samples the class-defining expression of `m` on `|z| = radius`, for the
/// Cesàro mean of `f` and for the inverse of that mean.
///
/// Both series are truncations, so the verdict is advisory; the report always
/// carries the `advisory-truncated` flag.
pub fn verify_membership(
    m: &ClassMember,
    opts: &SamplingOptions,
) -> Result<VerificationReport, ConstructError> {
    opts.check()?;
    let class = m.class_spec.instantiate();
    let region = class.region();
    let mean = apply_cesaro(&m.f, class.cesaro())?;
    let inverse = mean.invert();

    let f_side = extremal(&class.membership_expression(&mean)?, region, opts);
    let g_side = extremal(&class.membership_expression(&inverse)?, region, opts);
    let extremal_value = worse(f_side, g_side, region);
    let (threshold, pass) = within(extremal_value, region, opts.tolerance);

    let mut flags = vec!["advisory-truncated".to_string()];
    if !within(f_side, region, opts.tolerance).1 {
        flags.push("f-side-fails".to_string());
    }
    if !within(g_side, region, opts.tolerance).1 {
        flags.push("g-side-fails".to_string());
    }
    if !m.feasible {
        flags.push("seed-infeasible".to_string());
    }
    if let ClassSpec::Psi { psi, .. } = &m.class_spec {
        if psi.taylor_prefix().len() <= m.f.order() {
            flags.push("psi-truncated".to_string());
        }
    }
    Ok(VerificationReport {
        class: class.name().to_string(),
        params: m.class_spec.clone(),
        radius: opts.radius,
        samples: opts.samples,
        extremal_value,
        threshold,
        pass,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit() -> CesaroParams {
        CesaroParams::with_rule(3, 0.0, crate::cesaro::FactorRule::Classical).unwrap()
    }

    #[test]
    fn prefix_validation() {
        assert!(SchwarzPrefix::new(c(0.6, 0.0), c(0.64, 0.0)).is_ok());
        assert!(SchwarzPrefix::new(c(0.6, 0.0), c(0.65, 0.0)).is_err());
        assert!(SchwarzPrefix::new(c(1.01, 0.0), c(0.0, 0.0)).is_err());
        assert!(CaratheodoryPrefix::new(c(2.0, 0.0), c(2.0, 0.0)).is_ok());
        assert!(CaratheodoryPrefix::new(c(2.0, 0.0), c(2.1, 0.0)).is_err());
        assert!(CaratheodoryPrefix::new(c(0.0, 0.0), c(0.0, -2.0)).is_ok());
        assert!(CaratheodoryPrefix::new(c(2.1, 0.0), c(2.205, 0.0)).is_err());
    }

    #[test]
    fn q_member_examples() {
        let q = QParams::new(1.0, 1.0).unwrap();
        let zero = CaratheodoryPrefix::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let m = make_q_member(zero, &unit(), &q).unwrap();
        assert_eq!((m.a2, m.a3), (c(0.0, 0.0), c(0.0, 0.0)));
        assert_eq!(m.mirror, (c(0.0, 0.0), c(0.0, 0.0)));
        assert!(m.feasible);

        let ext = CaratheodoryPrefix::new(c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        let m = make_q_member(ext, &unit(), &q).unwrap();
        assert_abs_diff_eq!((m.a2 - 1.0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.a3 - 2.0 / 3.0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.mirror.0 + 2.0).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(m.f.coeff(2), m.a2);
        assert_eq!(m.f.coeff(3), m.a3);
    }

    #[test]
    fn hbeta_member_examples() {
        let h = HBetaParams::new(0.0, 1.0).unwrap();
        let ext = CaratheodoryPrefix::new(c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        let m = make_hbeta_member(ext, &unit(), &h).unwrap();
        assert_abs_diff_eq!((m.a2 - 1.0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.a3 - 2.0 / 3.0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.mirror.1 - 4.0).norm(), 0.0, epsilon = 1e-14);
        assert!(!m.feasible);

        let h = HBetaParams::new(0.5, 1.0).unwrap();
        let p = CaratheodoryPrefix::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let m = make_hbeta_member(p, &unit(), &h).unwrap();
        assert_abs_diff_eq!((m.a2 - 0.25).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.a3 - 1.0 / 6.0).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn psi_member_examples() {
        let psi = PsiCoefficients::half_plane();
        let zero = SchwarzPrefix::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let m = make_psi_member(zero, &unit(), &psi).unwrap();
        assert_eq!((m.a2, m.a3), (c(0.0, 0.0), c(0.0, 0.0)));
        let b = SchwarzPrefix::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let m = make_psi_member(b, &unit(), &psi).unwrap();
        assert_abs_diff_eq!((m.a2 - 1.0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.a3 - 2.0 / 3.0).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m.mirror.0 + 1.0).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn construction_needs_k_three() {
        let q = QParams::new(1.0, 1.0).unwrap();
        let p = CaratheodoryPrefix::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let cp = CesaroParams::new(2, 1.0).unwrap();
        assert_eq!(
            make_q_member(p, &cp, &q).unwrap_err(),
            ConstructError::IndexTooSmall(2)
        );
    }

    #[test]
    fn seed_kind_mismatch() {
        let class = PsiClass::new(PsiCoefficients::half_plane(), unit());
        let seed = Seed::Caratheodory {
            p1: c(0.0, 0.0),
            p2: c(0.0, 0.0),
        };
        assert!(matches!(
            build_member(&class, seed),
            Err(ConstructError::SeedKind { .. })
        ));
    }

    #[test]
    fn caratheodory_from_schwarz_cases() {
        let opts = SamplingOptions::default();
        let zero = TaylorSeries::zero(6).unwrap();
        assert_eq!(
            caratheodory_from_schwarz(&zero, &opts).unwrap(),
            TaylorSeries::one(6).unwrap()
        );
        let z = TaylorSeries::identity(6).unwrap();
        let p = caratheodory_from_schwarz(&z, &opts).unwrap();
        let expected: Vec<f64> = (0..=6).map(|n| if n == 0 { 1.0 } else { 2.0 }).collect();
        assert_eq!(p, TaylorSeries::from_real(&expected, 6).unwrap());
        let z2 = TaylorSeries::from_real(&[0.0, 0.0, 1.0], 6).unwrap();
        let p = caratheodory_from_schwarz(&z2, &opts).unwrap();
        assert_eq!(
            p,
            TaylorSeries::from_real(&[1.0, 0.0, 2.0, 0.0, 2.0, 0.0, 2.0], 6).unwrap()
        );
        let big = TaylorSeries::from_real(&[0.0, 1.2], 6).unwrap();
        assert!(matches!(
            caratheodory_from_schwarz(&big, &opts),
            Err(ConstructError::NotSchwarz { .. })
        ));
    }

    #[test]
    fn caratheodory_from_schwarz_positive_real_part() {
        let opts = SamplingOptions::default();
        let u = TaylorSeries::from_real(&[0.0, 0.5, 0.2], 24).unwrap();
        let p = caratheodory_from_schwarz(&u, &opts).unwrap();
        for j in 0..256 {
            let z = Complex64::from_polar(0.999, TAU * j as f64 / 256.0);
            assert!(p.eval(z).re > 0.0);
        }
    }

    #[test]
    fn verify_identity_members() {
        let opts = SamplingOptions::default();
        let zero = CaratheodoryPrefix::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let h = HBetaParams::new(0.3, 1.0).unwrap();
        let m = make_hbeta_member(zero, &unit(), &h).unwrap();
        let r = verify_membership(&m, &opts).unwrap();
        assert!(r.pass);
        assert_eq!(r.extremal_value, 1.0);
        assert_eq!(r.threshold, 0.3);
        assert_eq!(r.flags, ["advisory-truncated"]);

        let q = QParams::new(0.5, 2.0).unwrap();
        let m = make_q_member(zero, &unit(), &q).unwrap();
        let r = verify_membership(&m, &opts).unwrap();
        assert!(r.pass);
        assert_eq!(r.extremal_value, 0.0);

        let zero = SchwarzPrefix::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let m = make_psi_member(zero, &unit(), &PsiCoefficients::half_plane()).unwrap();
        let r = verify_membership(&m, &opts).unwrap();
        assert!(r.pass);
        assert_eq!(r.extremal_value, 0.0);
    }

    #[test]
    fn verify_rejects_bad_options() {
        let zero = CaratheodoryPrefix::new(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let h = HBetaParams::new(0.0, 1.0).unwrap();
        let m = make_hbeta_member(zero, &unit(), &h).unwrap();
        let mut opts = SamplingOptions::default();
        opts.radius = 1.0;
        assert!(matches!(verify_membership(&m, &opts), Err(ConstructError::Radius(_))));
        opts.radius = 0.5;
        opts.samples = 8;
        assert!(matches!(verify_membership(&m, &opts), Err(ConstructError::Samples(8))));
    }

    #[test]
    fn verify_reports_extremal_member() {
        let h = HBetaParams::new(0.0, 1.0).unwrap();
        let ext = CaratheodoryPrefix::new(c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        let m = make_hbeta_member(ext, &unit(), &h).unwrap().with_order(3).unwrap();
        let r = verify_membership(&m, &SamplingOptions::default()).unwrap();
        assert!(r.flags.contains(&"seed-infeasible".to_string()));
        assert!(r.extremal_value.is_finite());
    }
}
