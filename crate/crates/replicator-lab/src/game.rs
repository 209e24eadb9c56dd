//! Game data model and payoff evaluation.
//!
//! A symmetric 2x2 game between teams that favor two-point or three-point
//! offense. The four payoffs are
//!
//! ```text
//! alpha = payoff(TwoPoint,   TwoPoint)     beta  = payoff(TwoPoint,   ThreePoint)
//! gamma = payoff(ThreePoint, TwoPoint)     delta = payoff(ThreePoint, ThreePoint)
//! ```
//!
//! A population state (x1, x2) on the 1-simplex records the share of teams
//! playing each strategy. The replicator field
//!
//! ```text
//! dx_i/dt = x_i * (payoff(s_i, x) - average_payoff(x))
//! ```
//!
//! is tangent to the simplex, so with x2 = 1 - x1 the dynamics reduce to the
//! cubic `x1 * (x1 - 1) * bracket(x1)` with the linear factor
//! `bracket(x1) = (delta - beta) + (beta - delta + gamma - alpha) * x1`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Relative-absolute tolerance used for every payoff comparison downstream.
///
/// Two values are equal when `|a - b| <= eps * max(1, |a|, |b|)`. The default
/// `eps` is 1e-9; `Tolerance::exact()` (eps = 0) gives exact comparisons for
/// inputs whose arithmetic is exact, e.g. small integer payoffs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    eps: f64,
}

/// Sign of a quantity under a [`Tolerance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(eps: f64) -> Result<Self> {
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidTolerance(eps));
        }
        Ok(Tolerance { eps })
    }

    /// Exact comparison mode (eps = 0) for rational/integer payoff tables.
    pub fn exact() -> Self {
        Tolerance { eps: 0.0 }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn approx_eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.eps * 1f64.max(a.abs()).max(b.abs())
    }

    /// Strictly less under the tolerance: `a < b` and not approximately equal.
    pub fn lt(&self, a: f64, b: f64) -> bool {
        a < b && !self.approx_eq(a, b)
    }

    pub fn gt(&self, a: f64, b: f64) -> bool {
        self.lt(b, a)
    }

    pub fn le(&self, a: f64, b: f64) -> bool {
        a < b || self.approx_eq(a, b)
    }

    pub fn ge(&self, a: f64, b: f64) -> bool {
        self.le(b, a)
    }

    pub fn sign(&self, v: f64) -> Sign {
        if self.approx_eq(v, 0.0) {
            Sign::Zero
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }

    /// Zero test scaled by an external magnitude (e.g. the largest payoff).
    pub fn is_zero_scaled(&self, v: f64, scale: f64) -> bool {
        v.abs() <= self.eps * 1f64.max(scale.abs())
    }
}

/// The two predominant offensive strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    TwoPoint,
    ThreePoint,
}

impl Strategy {
    pub const ALL: [Strategy; 2] = [Strategy::TwoPoint, Strategy::ThreePoint];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::TwoPoint => write!(f, "TwoPoint"),
            Strategy::ThreePoint => write!(f, "ThreePoint"),
        }
    }
}

/// One of the four payoff parameters, for sweeps and CLI selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" => Ok(Param::Alpha),
            "beta" => Ok(Param::Beta),
            "gamma" => Ok(Param::Gamma),
            "delta" => Ok(Param::Delta),
            other => Err(Error::UnknownParameter(other.to_string())),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::Gamma => "gamma",
            Param::Delta => "delta",
        };
        write!(f, "{name}")
    }
}

/// Payoffs of the symmetric game. Entries are arbitrary finite reals; the
/// whole analysis is condition-based, never magnitude-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl PayoffMatrix {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let m = PayoffMatrix {
            alpha,
            beta,
            gamma,
            delta,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if [self.alpha, self.beta, self.gamma, self.delta]
            .iter()
            .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(Error::NonFinitePayoff(
                self.alpha, self.beta, self.gamma, self.delta,
            ))
        }
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Alpha => self.alpha,
            Param::Beta => self.beta,
            Param::Gamma => self.gamma,
            Param::Delta => self.delta,
        }
    }

    /// Copy of the matrix with one entry replaced.
    pub fn with_param(&self, p: Param, value: f64) -> Self {
        let mut m = *self;
        match p {
            Param::Alpha => m.alpha = value,
            Param::Beta => m.beta = value,
            Param::Gamma => m.gamma = value,
            Param::Delta => m.delta = value,
        }
        m
    }

    /// Spread max − min of the four entries; zero for a constant game.
    pub fn payoff_range(&self) -> f64 {
        let e = self.entries();
        let max = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = e.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Payoff of `s` against a single opponent playing `opponent`.
    pub fn payoff(&self, s: Strategy, opponent: Strategy) -> f64 {
        match (s, opponent) {
            (Strategy::TwoPoint, Strategy::TwoPoint) => self.alpha,
            (Strategy::TwoPoint, Strategy::ThreePoint) => self.beta,
            (Strategy::ThreePoint, Strategy::TwoPoint) => self.gamma,
            (Strategy::ThreePoint, Strategy::ThreePoint) => self.delta,
        }
    }

    /// Expected payoff of `s` against an opponent drawn from the population:
    /// `alpha*x1 + beta*x2` for TwoPoint, `gamma*x1 + delta*x2` for ThreePoint.
    pub fn payoff_vs_population(&self, s: Strategy, x: &PopulationState) -> f64 {
        match s {
            Strategy::TwoPoint => self.alpha * x.x1() + self.beta * x.x2(),
            Strategy::ThreePoint => self.gamma * x.x1() + self.delta * x.x2(),
        }
    }

    /// Population-average payoff `x1*payoff(TwoPoint, x) + x2*payoff(ThreePoint, x)`.
    pub fn average_payoff(&self, x: &PopulationState) -> f64 {
        x.x1() * self.payoff_vs_population(Strategy::TwoPoint, x)
            + x.x2() * self.payoff_vs_population(Strategy::ThreePoint, x)
    }

    /// Payoff of a mixed strategy against the population profile:
    /// the double sum of `p(s) * x(s') * payoff(s, s')`.
    pub fn mixed_payoff(&self, sigma: &MixedStrategy, x: &PopulationState) -> f64 {
        sigma.two_point() * self.payoff_vs_population(Strategy::TwoPoint, x)
            + sigma.three_point() * self.payoff_vs_population(Strategy::ThreePoint, x)
    }
}

/// How far a two-component simplex point may deviate from summing to 1 before
/// construction rejects it instead of renormalizing.
const SIMPLEX_REJECT: f64 = 1e-9;

fn simplex_components(a: f64, b: f64) -> Result<(f64, f64)> {
    for v in [a, b] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidProportion(v));
        }
    }
    let sum = a + b;
    if (sum - 1.0).abs() >= SIMPLEX_REJECT {
        return Err(Error::SimplexViolation(sum));
    }
    if sum == 1.0 {
        Ok((a, b))
    } else {
        Ok((a / sum, b / sum))
    }
}

/// Point on the 1-simplex: shares of two-point and three-point teams.
///
/// Constructors renormalize inputs whose sum deviates from 1 by less than
/// 1e-9 and reject anything worse, so `x1 + x2 = 1` holds to within 1e-12.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationState {
    x1: f64,
    x2: f64,
}

impl PopulationState {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        let (x1, x2) = simplex_components(x1, x2)?;
        Ok(PopulationState { x1, x2 })
    }

    /// State with a given two-point share, three-point share `1 - x1`.
    pub fn from_two_point_share(x1: f64) -> Result<Self> {
        if !x1.is_finite() || !(0.0..=1.0).contains(&x1) {
            return Err(Error::InvalidProportion(x1));
        }
        Ok(PopulationState { x1, x2: 1.0 - x1 })
    }

    /// Share of teams favoring two-point offense.
    pub fn x1(&self) -> f64 {
        self.x1
    }

    /// Share of teams favoring three-point offense.
    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn share(&self, s: Strategy) -> f64 {
        match s {
            Strategy::TwoPoint => self.x1,
            Strategy::ThreePoint => self.x2,
        }
    }
}

impl<'de> Deserialize<'de> for PopulationState {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            x1: f64,
            x2: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        PopulationState::new(raw.x1, raw.x2).map_err(serde::de::Error::custom)
    }
}

/// A mixed strategy: probabilities of playing each pure strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedStrategy {
    two_point: f64,
    three_point: f64,
}

impl MixedStrategy {
    pub fn new(two_point: f64, three_point: f64) -> Result<Self> {
        let (two_point, three_point) = simplex_components(two_point, three_point)?;
        Ok(MixedStrategy {
            two_point,
            three_point,
        })
    }

    pub fn pure(s: Strategy) -> Self {
        match s {
            Strategy::TwoPoint => MixedStrategy {
                two_point: 1.0,
                three_point: 0.0,
            },
            Strategy::ThreePoint => MixedStrategy {
                two_point: 0.0,
                three_point: 1.0,
            },
        }
    }

    pub fn from_two_point_weight(p: f64) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProportion(p));
        }
        Ok(MixedStrategy {
            two_point: p,
            three_point: 1.0 - p,
        })
    }

    pub fn two_point(&self) -> f64 {
        self.two_point
    }

    pub fn three_point(&self) -> f64 {
        self.three_point
    }

    pub fn prob(&self, s: Strategy) -> f64 {
        match s {
            Strategy::TwoPoint => self.two_point,
            Strategy::ThreePoint => self.three_point,
        }
    }
}

impl From<PopulationState> for MixedStrategy {
    fn from(x: PopulationState) -> Self {
        MixedStrategy {
            two_point: x.x1(),
            three_point: x.x2(),
        }
    }
}

impl<'de> Deserialize<'de> for MixedStrategy {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        #[derive(Deserialize)]
        struct Raw {
            two_point: f64,
            three_point: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        MixedStrategy::new(raw.two_point, raw.three_point).map_err(serde::de::Error::custom)
    }
}

/// Linear factor of the reduced field:
/// `(delta - beta) + (beta - delta + gamma - alpha) * x1`.
///
/// This is the negated payoff gap `-(payoff(TwoPoint, x) - payoff(ThreePoint, x))`
/// evaluated along `x2 = 1 - x1`; its root is the interior rest point.
pub fn reduced_field_bracket(m: &PayoffMatrix, x1: f64) -> f64 {
    (m.delta - m.beta) + (m.beta - m.delta + m.gamma - m.alpha) * x1
}

/// Full planar replicator field `(x1*(pi_1 - avg), x2*(pi_2 - avg))`.
/// The two components sum to zero: the field is tangent to the simplex.
pub fn replicator_field_2d(m: &PayoffMatrix, x: &PopulationState) -> (f64, f64) {
    let avg = m.average_payoff(x);
    let v1 = x.x1() * (m.payoff_vs_population(Strategy::TwoPoint, x) - avg);
    let v2 = x.x2() * (m.payoff_vs_population(Strategy::ThreePoint, x) - avg);
    (v1, v2)
}

/// Reduced one-dimensional field `x1 * (x1 - 1) * bracket(x1)`.
///
/// Defined for every real `x1` (the flow and the analysis only use [0, 1];
/// evaluating the cubic everywhere supports phase-line plots and the
/// sign-structure checks on the extended line). `x1 = 0` and `x1 = 1` are
/// exact roots for every payoff matrix.
pub fn replicator_field_reduced(m: &PayoffMatrix, x1: f64) -> f64 {
    x1 * (x1 - 1.0) * reduced_field_bracket(m, x1)
}
