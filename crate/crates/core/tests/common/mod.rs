//! Helpers shared by the integration tests: random admissible seeds, random
//! class specs, and hand-written seed recovery used as an independent check.
#![allow(dead_code)]

use std::f64::consts::TAU;

use bicoeff::bounds::{HBetaParams, PsiCoefficients, QParams};
use bicoeff::cesaro::{apply_cesaro, CesaroParams, FactorRule};
use bicoeff::class::{ClassSpec, SeedKind};
use bicoeff::construct::{build_member, ClassMember, Seed};
use bicoeff::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn polar(r: f64, turns: f64) -> Complex64 {
    Complex64::from_polar(r, TAU * turns)
}

/// `(p_1, p_2)` with `|p_1| <= 2` and `|p_2 - p_1^2/2| <= 2 - |p_1|^2/2`.
pub fn caratheodory_seed(rng: &mut ChaCha8Rng) -> Seed {
    let p1 = polar(2.0 * rng.random::<f64>(), rng.random());
    let room = 2.0 - p1.norm_sqr() / 2.0;
    let p2 = p1 * p1 / 2.0 + polar(room * rng.random::<f64>(), rng.random());
    Seed::Caratheodory { p1, p2 }
}

/// `(b_1, b_2)` with `|b_1| <= 1` and `|b_2| <= 1 - |b_1|^2`.
pub fn schwarz_seed(rng: &mut ChaCha8Rng) -> Seed {
    let b1 = polar(rng.random(), rng.random());
    let b2 = polar((1.0 - b1.norm_sqr()) * rng.random::<f64>(), rng.random());
    Seed::Schwarz { b1, b2 }
}

pub fn seed_for(kind: SeedKind, rng: &mut ChaCha8Rng) -> Seed {
    match kind {
        SeedKind::Caratheodory => caratheodory_seed(rng),
        SeedKind::Schwarz => schwarz_seed(rng),
    }
}

pub fn cesaro(rng: &mut ChaCha8Rng) -> CesaroParams {
    let k = rng.random_range(3..=8);
    let alpha = 3.0 * rng.random::<f64>();
    let rule = if rng.random::<bool>() {
        FactorRule::Verbatim
    } else {
        FactorRule::Classical
    };
    CesaroParams::with_rule(k, alpha, rule).unwrap()
}

pub fn psi_spec(rng: &mut ChaCha8Rng) -> ClassSpec {
    let psi = PsiCoefficients::new(0.2 + 2.8 * rng.random::<f64>(), 4.0 * rng.random::<f64>() - 2.0)
        .unwrap();
    ClassSpec::Psi {
        psi,
        cesaro: cesaro(rng),
    }
}

pub fn strong_spec(rng: &mut ChaCha8Rng) -> ClassSpec {
    let params = QParams::new(0.05 + 0.95 * rng.random::<f64>(), 1.0 + 4.0 * rng.random::<f64>())
        .unwrap();
    ClassSpec::Strong {
        params,
        cesaro: cesaro(rng),
    }
}

pub fn realpart_spec(rng: &mut ChaCha8Rng) -> ClassSpec {
    let params = HBetaParams::new(0.95 * rng.random::<f64>(), 1.0 + 4.0 * rng.random::<f64>())
        .unwrap();
    ClassSpec::RealPart {
        params,
        cesaro: cesaro(rng),
    }
}

pub fn random_member(spec: &ClassSpec, rng: &mut ChaCha8Rng) -> ClassMember {
    let class = spec.instantiate();
    let seed = seed_for(class.seed_kind(), rng);
    build_member(class.as_ref(), seed).unwrap()
}

/// Coefficients 2 and 3 of the Cesàro mean of `m.f` and of its inverse.
pub fn mean_and_inverse(m: &ClassMember) -> ([Complex64; 2], [Complex64; 2]) {
    let mean = apply_cesaro(&m.f, m.class_spec.cesaro()).unwrap();
    let inv = mean.invert();
    (
        [mean.coeff(2), mean.coeff(3)],
        [inv.coeff(2), inv.coeff(3)],
    )
}

/// Recovers the seed pair from coefficients 2 and 3 of a mean series
/// (`F = z + d_2 z^2 + d_3 z^3 + ...`), reading off the defining relation of
/// the class at orders one and two.
pub fn recover_pair(spec: &ClassSpec, d: [Complex64; 2]) -> (Complex64, Complex64) {
    match spec {
        // F' = psi(u): 2 d_2 = B_1 u_1, 3 d_3 = B_1 u_2 + B_2 u_1^2
        ClassSpec::Psi { psi, .. } => {
            let u1 = 2.0 * d[0] / psi.b1();
            let u2 = (3.0 * d[1] - psi.b2() * u1 * u1) / psi.b1();
            (u1, u2)
        }
        // mixture = p^alpha
        ClassSpec::Strong { params, .. } => {
            let (a, l) = (params.alpha(), params.lambda());
            let e1 = (1.0 + l) * d[0];
            let e2 = (1.0 + 2.0 * l) * d[1];
            let p1 = e1 / a;
            let p2 = (e2 - a * (a - 1.0) * p1 * p1 / 2.0) / a;
            (p1, p2)
        }
        // mixture = beta + (1 - beta) p
        ClassSpec::RealPart { params, .. } => {
            let (b, l) = (params.beta(), params.lambda());
            let p1 = (1.0 + l) * d[0] / (1.0 - b);
            let p2 = (1.0 + 2.0 * l) * d[1] / (1.0 - b);
            (p1, p2)
        }
    }
}

/// Largest of the absolute differences, scaled by `max(1, |expected|)`.
pub fn scaled_err(pairs: &[(Complex64, Complex64)]) -> f64 {
    pairs
        .iter()
        .map(|(got, want)| (got - want).norm() / want.norm().max(1.0))
        .fold(0.0, f64::max)
}

/// Exact maximum of `|a_2|` over the real-part class with unit prefactor
/// when both `(p_1, p_2)` and the inverse-side `(q_1, q_2)` must be
/// admissible. With `c = (1+2λ)(1-β)/(1+λ)^2` the two conditions combine to
/// `|p_1|^2/4 <= 1/(1 + |2c - 1|)`.
pub fn coupled_max_a2(beta: f64, lambda: f64) -> f64 {
    let c = (1.0 + 2.0 * lambda) * (1.0 - beta) / (1.0 + lambda).powi(2);
    let r = (1.0 / (1.0 + (2.0 * c - 1.0).abs())).sqrt();
    2.0 * (1.0 - beta) * r / (1.0 + lambda)
}
