//! Brute-force extremal search over admissible seeds.
//!
//! The oracle maximizes `|a_2|` or `|a_3|` over seeds whose own prefix and
//! derived inverse-side prefix are both admissible, independently of the
//! closed-form bounds it is compared with. Seeds are parameterized on the unit
//! cube `[r1, t1, r2, t2]`:
//!
//! * Schwarz: `b1 = r1 e^{2πi t1}`, `b2 = r2 (1 - r1^2) e^{2πi t2}`;
//! * Carathéodory: `p1 = 2 r1 e^{2πi t1}`,
//!   `p2 = p1^2/2 + r2 (2 - |p1|^2/2) e^{2πi t2}`,
//!
//! so every cube point is an admissible seed and only the inverse side can
//! fail. The search is a dense grid, then seeded random restarts, then
//! coordinate-wise golden-section refinement of the best grid point of every
//! dyadic sub-grid and of every restart.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{BoundError, Coefficient, FormulaId};
use crate::class::{BiUnivalentClass, ClassSpec, SeedKind};
use crate::construct::{ConstructError, MeanFactors, Seed, FEASIBILITY_SLACK};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("grid density must be at least 8, got {0}")]
    GridDensity(u32),
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("nothing to sweep")]
    EmptySweep,
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Grid points per real dimension (radii get one extra endpoint).
    pub grid_density: u32,
    pub random_restarts: u32,
    /// Rounds of coordinate-wise refinement per start.
    pub refine_steps: u32,
    pub seed: u64,
    /// Exceedance above which the oracle is said to beat the formula.
    pub tolerance: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_density: 32,
            random_restarts: 64,
            refine_steps: 20,
            seed: 0,
            tolerance: 1e-9,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.grid_density < 8 {
            return Err(SearchError::GridDensity(self.grid_density));
        }
        if !(self.tolerance > 0.0) {
            return Err(SearchError::Tolerance(self.tolerance));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    OracleExceeds,
    FormulaUndefined,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::OracleExceeds => "oracle_exceeds",
            Verdict::FormulaUndefined => "formula_undefined",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub class: ClassSpec,
    pub formula_id: FormulaId,
    /// `None` when the closed form is undefined at these parameters.
    pub formula_value: Option<f64>,
    /// Second reading of the formula, logged but never used for the verdict.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alternative_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub undefined_reason: Option<String>,
    pub oracle_max: f64,
    pub argmax_seed: Seed,
    /// `max(oracle_max - formula_value, 0)`.
    pub exceedance: f64,
    pub verdict: Verdict,
}

/// Point of the unit cube `[r1, t1, r2, t2]`.
type Point = [f64; 4];

const RADIAL: [bool; 4] = [true, false, true, false];
const GOLDEN_ITERATIONS: usize = 48;
const RESTART_HALF_WIDTH: f64 = 1.0 / 16.0;

fn phase(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * t)
}

fn seed_pair(kind: SeedKind, r1: f64, e1: Complex64, r2: f64, e2: Complex64) -> (Complex64, Complex64) {
    match kind {
        SeedKind::Schwarz => (e1 * r1, e2 * (r2 * (1.0 - r1 * r1))),
        SeedKind::Caratheodory => {
            let p1 = e1 * (2.0 * r1);
            let radius = 2.0 - 2.0 * r1 * r1;
            (p1, p1 * p1 / 2.0 + e2 * (r2 * radius))
        }
    }
}

fn seed_at(kind: SeedKind, x: &Point) -> (Complex64, Complex64) {
    seed_pair(kind, x[0], phase(x[1]), x[2], phase(x[3]))
}

fn seed_value(kind: SeedKind, pair: (Complex64, Complex64)) -> Seed {
    match kind {
        SeedKind::Schwarz => Seed::Schwarz {
            b1: pair.0,
            b2: pair.1,
        },
        SeedKind::Caratheodory => Seed::Caratheodory {
            p1: pair.0,
            p2: pair.1,
        },
    }
}

/// Objective at one seed.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    x: Point,
    /// `Some(|a_n|)` when both sides are admissible.
    value: Option<f64>,
    /// Negated inverse-side violation: the margin when feasible, the deficit
    /// otherwise.
    merit: f64,
}

impl Candidate {
    /// Total order: feasible before infeasible, then larger objective, then
    /// larger margin, then lexicographically smaller point.
    ///
    /// The margin term lets coordinate moves slide along directions where the
    /// objective is flat but admissibility improves.
    fn better_than(&self, other: &Candidate) -> bool {
        let key = |c: &Candidate| match c.value {
            Some(v) => (1, v, c.merit),
            None => (0, c.merit, 0.0),
        };
        let (a, b) = (key(self), key(other));
        match a
            .0
            .cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
        {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => lex_less(&self.x, &other.x),
        }
    }
}

fn lex_less(a: &Point, b: &Point) -> bool {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    false
}

fn pick(a: Candidate, b: Candidate) -> Candidate {
    if b.better_than(&a) {
        b
    } else {
        a
    }
}

struct Objective<'a> {
    class: &'a dyn BiUnivalentClass,
    kind: SeedKind,
    factors: MeanFactors,
    coefficient: Coefficient,
}

impl Objective<'_> {
    fn eval_pair(&self, x: Point, pair: (Complex64, Complex64)) -> Candidate {
        let sol = self.class.solve(pair.0, pair.1, &self.factors);
        let violation = self.kind.violation(sol.mirror_first, sol.mirror_second);
        let a = match self.coefficient {
            Coefficient::A2 => sol.a2,
            Coefficient::A3 => sol.a3,
        };
        if violation <= FEASIBILITY_SLACK && a.is_finite() {
            Candidate {
                x,
                value: Some(a.norm()),
                merit: -violation,
            }
        } else {
            Candidate {
                x,
                value: None,
                merit: if violation.is_nan() { f64::NEG_INFINITY } else { -violation },
            }
        }
    }

    fn eval(&self, x: Point) -> Candidate {
        self.eval_pair(x, seed_at(self.kind, &x))
    }

    /// Golden-section search along one coordinate around `start`, keeping the
    /// best point seen.
    fn line_search(&self, start: Candidate, coord: usize, half_width: f64) -> Candidate {
        let centre = start.x[coord];
        let (mut lo, mut hi) = (centre - half_width, centre + half_width);
        if RADIAL[coord] {
            lo = lo.max(0.0);
            hi = hi.min(1.0);
        }
        let at = |t: f64| {
            let mut x = start.x;
            x[coord] = if RADIAL[coord] { t } else { t.rem_euclid(1.0) };
            self.eval(x)
        };
        let mut best = start;
        best = pick(best, at(lo));
        best = pick(best, at(hi));
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = hi - inv_phi * (hi - lo);
        let mut d = lo + inv_phi * (hi - lo);
        let mut fc = at(c);
        let mut fd = at(d);
        for _ in 0..GOLDEN_ITERATIONS {
            best = pick(best, fc);
            best = pick(best, fd);
            if fc.better_than(&fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - inv_phi * (hi - lo);
                fc = at(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + inv_phi * (hi - lo);
                fd = at(d);
            }
        }
        best = pick(best, fc);
        pick(best, fd)
    }

    fn refine(&self, start: Candidate, rounds: u32, half_width: f64) -> Candidate {
        let mut best = start;
        for _ in 0..rounds {
            let before = best;
            for coord in 0..4 {
                best = self.line_search(best, coord, half_width);
            }
            if !best.better_than(&before) {
                break;
            }
        }
        best
    }

    /// Best point of the full grid and of each dyadic sub-grid with density
    /// at least 8, coarsest last.
    fn grid_bests(&self, n: u32) -> Vec<(Candidate, u32)> {
        let mut levels = vec![n];
        let mut step = 2u32;
        while n % step == 0 && n / step >= 8 {
            levels.push(n / step);
            step *= 2;
        }
        let strides: Vec<u32> = levels.iter().map(|l| n / l).collect();
        let phases: Vec<Complex64> = (0..n).map(|j| phase(j as f64 / n as f64)).collect();
        let radii: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();

        let slabs: Vec<Vec<Option<Candidate>>> = (0..=n)
            .into_par_iter()
            .map(|i1| {
                let mut bests: Vec<Option<Candidate>> = vec![None; levels.len()];
                for j1 in 0..n {
                    for i2 in 0..=n {
                        for j2 in 0..n {
                            let x = [
                                radii[i1 as usize],
                                j1 as f64 / n as f64,
                                radii[i2 as usize],
                                j2 as f64 / n as f64,
                            ];
                            let pair = seed_pair(
                                self.kind,
                                x[0],
                                phases[j1 as usize],
                                x[2],
                                phases[j2 as usize],
                            );
                            let cand = self.eval_pair(x, pair);
                            for (slot, &s) in bests.iter_mut().zip(&strides) {
                                if i1 % s == 0 && j1 % s == 0 && i2 % s == 0 && j2 % s == 0 {
                                    *slot = Some(match *slot {
                                        Some(b) => pick(b, cand),
                                        None => cand,
                                    });
                                }
                            }
                        }
                    }
                }
                bests
            })
            .collect();

        levels
            .iter()
            .enumerate()
            .map(|(lvl, &density)| {
                let best = slabs
                    .iter()
                    .filter_map(|s| s[lvl])
                    .reduce(pick)
                    .expect("every level contains the origin");
                (best, density)
            })
            .collect()
    }
}

/// Maximizes `|a_n|` for `coefficient` over admissible seeds of `class`.
pub fn oracle_max(
    class: &dyn BiUnivalentClass,
    coefficient: Coefficient,
    cfg: &SearchConfig,
) -> Result<ConsistencyReport, SearchError> {
    cfg.validate()?;
    let objective = Objective {
        class,
        kind: class.seed_kind(),
        factors: MeanFactors::new(class.cesaro())?,
        coefficient,
    };
    let n = cfg.grid_density;
    // Each start carries its own bracket half-width, fixed by where it came
    // from, so a larger budget only ever adds starts.
    let mut starts: Vec<(Candidate, f64)> = objective
        .grid_bests(n)
        .into_iter()
        .map(|(c, density)| (c, 2.0 / density as f64))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.random_restarts {
        let x: Point = [rng.random(), rng.random(), rng.random(), rng.random()];
        starts.push((objective.eval(x), RESTART_HALF_WIDTH));
    }

    let refined: Vec<Candidate> = starts
        .par_iter()
        .map(|&(s, w)| objective.refine(s, cfg.refine_steps, w))
        .collect();
    let best = starts
        .iter()
        .map(|(c, _)| *c)
        .chain(refined)
        .reduce(pick)
        .expect("grid is never empty");

    // The origin is always admissible, so the best candidate is feasible.
    let oracle_max = best.value.unwrap_or(0.0);
    let argmax_seed = seed_value(objective.kind, seed_at(objective.kind, &best.x));

    let formula_id = class.formula(coefficient);
    let alternative_value = class.alternative_bound(coefficient);
    let report = match class.bound(coefficient) {
        Ok(b) => {
            let exceedance = (oracle_max - b.value).max(0.0);
            ConsistencyReport {
                class: class.spec(),
                formula_id,
                formula_value: Some(b.value),
                alternative_value,
                undefined_reason: None,
                oracle_max,
                argmax_seed,
                exceedance,
                verdict: if exceedance > cfg.tolerance {
                    Verdict::OracleExceeds
                } else {
                    Verdict::Consistent
                },
            }
        }
        Err(e) => ConsistencyReport {
            class: class.spec(),
            formula_id,
            formula_value: None,
            alternative_value,
            undefined_reason: Some(undefined_reason(&e)),
            oracle_max,
            argmax_seed,
            exceedance: 0.0,
            verdict: Verdict::FormulaUndefined,
        },
    };
    Ok(report)
}

fn undefined_reason(e: &BoundError) -> String {
    e.to_string()
}

pub fn oracle_max_a2(spec: &ClassSpec, cfg: &SearchConfig) -> Result<ConsistencyReport, SearchError> {
    oracle_max(spec.instantiate().as_ref(), Coefficient::A2, cfg)
}

pub fn oracle_max_a3(spec: &ClassSpec, cfg: &SearchConfig) -> Result<ConsistencyReport, SearchError> {
    oracle_max(spec.instantiate().as_ref(), Coefficient::A3, cfg)
}

/// Both oracles for every spec, in order: `[a2, a3]` per spec.
pub fn sweep(specs: &[ClassSpec], cfg: &SearchConfig) -> Result<Vec<ConsistencyReport>, SearchError> {
    if specs.is_empty() {
        return Err(SearchError::EmptySweep);
    }
    let mut out = Vec::with_capacity(specs.len() * 2);
    for spec in specs {
        out.push(oracle_max_a2(spec, cfg)?);
        out.push(oracle_max_a3(spec, cfg)?);
    }
    Ok(out)
}
