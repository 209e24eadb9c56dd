//! Rest points of the reduced dynamics and their local structure.
//!
//! The reduced field `x1*(x1-1)*bracket(x1)` always vanishes at the two
//! monomorphic states 0 and 1. The linear bracket contributes one more root,
//!
//! ```text
//! x1* = (beta - delta) / (-alpha + beta - delta + gamma),
//! ```
//!
//! which collapses onto 0 when `beta = delta` and onto 1 when `alpha = gamma`.
//! Those two lines in payoff space are exactly where a boundary state changes
//! stability, so they are the bifurcation loci of the system.
//!
//! Classification is by the sign of the analytic derivative of the cubic at
//! the rest point; the classical payoff-inequality conditions (sink iff
//! `delta < beta` and `gamma > alpha`, source for the reversed strict pair,
//! "saddle" for the degenerate cases) are evaluated alongside and reported in
//! the same record so the two routes can be compared.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::game::{
    reduced_field_bracket, replicator_field_reduced, Param, PayoffMatrix, Sign, Tolerance,
};
use crate::{Error, Result};

/// Identity of a rest point of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedPointKind {
    /// x1 = 0: every team plays three-point offense.
    #[serde(rename = "P1_AllThree")]
    P1AllThree,
    /// x1 = 1: every team plays two-point offense.
    #[serde(rename = "P2_AllTwo")]
    P2AllTwo,
    /// Interior root of the bracket, strictly between 0 and 1.
    #[serde(rename = "P3_Interior")]
    P3Interior,
    /// Interior branch collapsed onto 0 (beta = delta).
    #[serde(rename = "P3_CoincidesP1")]
    P3CoincidesP1,
    /// Interior branch collapsed onto 1 (alpha = gamma).
    #[serde(rename = "P3_CoincidesP2")]
    P3CoincidesP2,
    /// The field vanishes identically; every point of [0, 1] is at rest.
    #[serde(rename = "DegenerateLine")]
    DegenerateLine,
}

impl fmt::Display for FixedPointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FixedPointKind::P1AllThree => "P1_AllThree",
            FixedPointKind::P2AllTwo => "P2_AllTwo",
            FixedPointKind::P3Interior => "P3_Interior",
            FixedPointKind::P3CoincidesP1 => "P3_CoincidesP1",
            FixedPointKind::P3CoincidesP2 => "P3_CoincidesP2",
            FixedPointKind::DegenerateLine => "DegenerateLine",
        };
        write!(f, "{s}")
    }
}

/// Derivative-sign classification of a rest point of a scalar field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Sink,
    Source,
    NonHyperbolic,
    Unclassified,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Classification::Sink => "Sink",
            Classification::Source => "Source",
            Classification::NonHyperbolic => "NonHyperbolic",
            Classification::Unclassified => "Unclassified",
        };
        write!(f, "{s}")
    }
}

/// Map a tolerance-sign of the derivative to the rest-point class.
pub fn classification_from_sign(sign: Sign) -> Classification {
    match sign {
        Sign::Negative => Classification::Sink,
        Sign::Positive => Classification::Source,
        Sign::Zero => Classification::NonHyperbolic,
    }
}

/// A rest point with its location, identity and derivative-sign class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub location: f64,
    pub kind: FixedPointKind,
    pub classification: Classification,
    /// Analytic derivative of the reduced field at `location`.
    pub derivative: f64,
}

/// Payoff-inequality conditions reported alongside the derivative class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperConditions {
    /// `delta < beta` and `gamma > alpha`.
    pub sink: bool,
    /// `delta > beta` and `gamma < alpha`.
    pub source: bool,
    /// `delta = beta` with `gamma != alpha - beta + delta`, or `delta != beta`
    /// with `gamma = (alpha*delta - alpha*beta)/(delta - beta)`.
    pub saddle: bool,
}

/// Label implied by the payoff-inequality conditions alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PaperLabel {
    Sink,
    Source,
    Saddle,
}

/// Full classification record for one rest point.
///
/// `classification` is the derivative-sign ground truth. The condition-based
/// label can disagree in degenerate cases: a one-dimensional system has no
/// genuine saddles, so condition-"Saddle" points are reported here as
/// `NonHyperbolic` with `paper_label: Saddle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub location: f64,
    pub kind: FixedPointKind,
    pub classification: Classification,
    pub paper_label: Option<PaperLabel>,
    pub derivative: f64,
    pub conditions: PaperConditions,
    /// First-order coefficient of the boundary linearization in the
    /// inequality-based account: `beta - delta` near 0, `gamma - alpha`
    /// near 1. Coincides with `derivative` there.
    pub paper_linearization: Option<f64>,
}

/// The two feasibility verdicts for the interior rest point.
///
/// `p3_in_simplex` tests `0 <= (beta-delta)/(-alpha+beta-delta+gamma) <= 1`
/// directly. `paper_condition_holds` evaluates the inequality union
/// `[delta<beta ∩ gamma<=alpha] ∪ [delta=beta ∩ gamma!=alpha] ∪
/// [delta>beta ∩ gamma<=alpha]` verbatim. The two disagree on some inputs (e.g.
/// (10, 2, 0, 1): the union holds but the ratio is negative), so both are
/// reported and `disagreement` flags any mismatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub p3_in_simplex: bool,
    pub paper_condition_holds: bool,
    pub disagreement: bool,
}

/// Parameter line on which a boundary rest point changes stability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BifurcationLine {
    BetaEqualsDelta,
    GammaEqualsAlpha,
}

/// A transversal crossing of a bifurcation line inside a sweep range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationLocus {
    pub kind: BifurcationLine,
    /// Exact parameter value of the crossing (closed form, not grid search).
    pub crossing_parameter: f64,
    /// Derivative-sign class of the interior branch just before and just
    /// after the crossing.
    pub side_classifications: (Classification, Classification),
}

/// Whether the field vanishes identically (`beta = delta` and `alpha = gamma`).
pub fn is_degenerate_line(m: &PayoffMatrix, tol: &Tolerance) -> bool {
    tol.approx_eq(m.beta, m.delta) && tol.approx_eq(m.alpha, m.gamma)
}

/// Raw root of the linear bracket, wherever it falls on the real line.
/// `None` when the bracket is (tolerance-)constant, i.e. the denominator
/// `-alpha + beta - delta + gamma` vanishes at the payoff scale.
pub fn interior_branch_root(m: &PayoffMatrix, tol: &Tolerance) -> Option<f64> {
    let den = -m.alpha + m.beta - m.delta + m.gamma;
    if tol.is_zero_scaled(den, m.max_abs()) {
        None
    } else {
        Some((m.beta - m.delta) / den)
    }
}

/// Analytic derivative of the reduced cubic at `x_star`.
///
/// With `q(x) = x^2 - x` and the linear bracket `b(x)`, the field is `q*b`
/// and the derivative is `(2x - 1)*b(x) + q(x)*b'(x)`. At the boundaries this
/// gives `beta - delta` at 0 and `gamma - alpha` at 1.
pub fn linearize_at(m: &PayoffMatrix, x_star: f64) -> f64 {
    let den = m.beta - m.delta + m.gamma - m.alpha;
    (2.0 * x_star - 1.0) * reduced_field_bracket(m, x_star) + (x_star * x_star - x_star) * den
}

fn make_point(
    m: &PayoffMatrix,
    location: f64,
    kind: FixedPointKind,
    tol: &Tolerance,
) -> FixedPoint {
    let derivative = linearize_at(m, location);
    FixedPoint {
        location,
        kind,
        classification: classification_from_sign(tol.sign(derivative)),
        derivative,
    }
}

/// Locations of merged rest points are snapped to the exact boundary when the
/// branch root lands within this distance of it.
const MERGE_TOL: f64 = 1e-12;

/// All rest points of the reduced system on [0, 1], classified.
///
/// Always contains the two boundary states. The interior branch is included
/// when its root lies inside the simplex; a root within 1e-12 of a boundary
/// is merged into it and reported as the coinciding kind. When the field
/// vanishes identically a single [`FixedPointKind::DegenerateLine`] entry
/// stands for the whole segment. A branch root outside [0, 1] is not a rest
/// point of the population system; it is surfaced by [`feasibility_check`]
/// and [`interior_branch_root`] instead.
pub fn fixed_points(m: &PayoffMatrix, tol: &Tolerance) -> Vec<FixedPoint> {
    if is_degenerate_line(m, tol) {
        return vec![FixedPoint {
            location: 0.0,
            kind: FixedPointKind::DegenerateLine,
            classification: Classification::NonHyperbolic,
            derivative: 0.0,
        }];
    }

    match interior_branch_root(m, tol) {
        Some(x) if x.abs() <= MERGE_TOL => vec![
            make_point(m, 0.0, FixedPointKind::P3CoincidesP1, tol),
            make_point(m, 1.0, FixedPointKind::P2AllTwo, tol),
        ],
        Some(x) if (x - 1.0).abs() <= MERGE_TOL => vec![
            make_point(m, 0.0, FixedPointKind::P1AllThree, tol),
            make_point(m, 1.0, FixedPointKind::P3CoincidesP2, tol),
        ],
        Some(x) if x > 0.0 && x < 1.0 => vec![
            make_point(m, 0.0, FixedPointKind::P1AllThree, tol),
            make_point(m, x, FixedPointKind::P3Interior, tol),
            make_point(m, 1.0, FixedPointKind::P2AllTwo, tol),
        ],
        _ => vec![
            make_point(m, 0.0, FixedPointKind::P1AllThree, tol),
            make_point(m, 1.0, FixedPointKind::P2AllTwo, tol),
        ],
    }
}

/// Nearest rest point to `x` and its distance. A degenerate line contains
/// every point of [0, 1], so the distance there is to the segment.
pub(crate) fn nearest_fixed_point(points: &[FixedPoint], x: f64) -> (f64, f64) {
    let mut best = (f64::NAN, f64::INFINITY);
    for p in points {
        let (loc, dist) = if p.kind == FixedPointKind::DegenerateLine {
            let clamped = x.clamp(0.0, 1.0);
            (clamped, (x - clamped).abs())
        } else {
            (p.location, (x - p.location).abs())
        };
        if dist < best.1 {
            best = (loc, dist);
        }
    }
    best
}

/// Both feasibility verdicts for the interior rest point (see [`Feasibility`]).
pub fn feasibility_check(m: &PayoffMatrix, tol: &Tolerance) -> Feasibility {
    let p3_in_simplex = match interior_branch_root(m, tol) {
        Some(x) => tol.ge(x, 0.0) && tol.le(x, 1.0),
        None => false,
    };
    let paper_condition_holds = (tol.lt(m.delta, m.beta) && tol.le(m.gamma, m.alpha))
        || (tol.approx_eq(m.delta, m.beta) && !tol.approx_eq(m.gamma, m.alpha))
        || (tol.gt(m.delta, m.beta) && tol.le(m.gamma, m.alpha));
    Feasibility {
        p3_in_simplex,
        paper_condition_holds,
        disagreement: p3_in_simplex != paper_condition_holds,
    }
}

fn paper_conditions(m: &PayoffMatrix, tol: &Tolerance) -> PaperConditions {
    let sink = tol.lt(m.delta, m.beta) && tol.gt(m.gamma, m.alpha);
    let source = tol.gt(m.delta, m.beta) && tol.lt(m.gamma, m.alpha);
    let equal_branch =
        tol.approx_eq(m.delta, m.beta) && !tol.approx_eq(m.gamma, m.alpha - m.beta + m.delta);
    let quotient_branch = !tol.approx_eq(m.delta, m.beta) && {
        let q = (m.alpha * m.delta - m.alpha * m.beta) / (m.delta - m.beta);
        tol.approx_eq(m.gamma, q)
    };
    PaperConditions {
        sink,
        source,
        saddle: equal_branch || quotient_branch,
    }
}

/// Classify a rest point previously produced by [`fixed_points`] for the same
/// matrix. Rejects points that do not lie on this game's phase line (field
/// residual above 1e-9).
pub fn classify(
    m: &PayoffMatrix,
    fp: &FixedPoint,
    tol: &Tolerance,
) -> Result<ClassificationRecord> {
    if fp.kind == FixedPointKind::DegenerateLine {
        if !is_degenerate_line(m, tol) {
            return Err(Error::ForeignFixedPoint {
                location: fp.location,
                residual: f64::NAN,
            });
        }
    } else {
        let residual = replicator_field_reduced(m, fp.location);
        if residual.abs() > 1e-9 {
            return Err(Error::ForeignFixedPoint {
                location: fp.location,
                residual,
            });
        }
    }

    let derivative = linearize_at(m, fp.location);
    let conditions = paper_conditions(m, tol);
    let paper_label = if conditions.sink {
        Some(PaperLabel::Sink)
    } else if conditions.source {
        Some(PaperLabel::Source)
    } else if conditions.saddle {
        Some(PaperLabel::Saddle)
    } else {
        None
    };
    let paper_linearization = if fp.location.abs() <= MERGE_TOL {
        Some(m.beta - m.delta)
    } else if (fp.location - 1.0).abs() <= MERGE_TOL {
        Some(m.gamma - m.alpha)
    } else {
        None
    };

    Ok(ClassificationRecord {
        location: fp.location,
        kind: fp.kind,
        classification: classification_from_sign(tol.sign(derivative)),
        paper_label,
        derivative,
        conditions,
        paper_linearization,
    })
}

/// Derivative-sign class of the interior branch with one payoff entry set to
/// `value`; `Unclassified` when the branch disappears there.
fn branch_class_at(m: &PayoffMatrix, param: Param, value: f64, tol: &Tolerance) -> Classification {
    let shifted = m.with_param(param, value);
    match interior_branch_root(&shifted, tol) {
        Some(x) => classification_from_sign(tol.sign(linearize_at(&shifted, x))),
        None => Classification::Unclassified,
    }
}

/// Transversal crossings of the bifurcation lines when `param` runs over
/// `[lo, hi]`.
///
/// Each payoff entry sits on exactly one line (`alpha`/`gamma` on
/// `gamma = alpha`, `beta`/`delta` on `beta = delta`), and the crossing value
/// is the opposing entry of the base matrix, located in closed form. `steps`
/// only controls how far to each side the branch is sampled for the
/// side classifications.
pub fn bifurcation_scan(
    m: &PayoffMatrix,
    param: Param,
    lo: f64,
    hi: f64,
    steps: usize,
    tol: &Tolerance,
) -> Result<Vec<BifurcationLocus>> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidSweepRange(lo, hi));
    }
    if steps < 2 {
        return Err(Error::InvalidInput(format!(
            "sweep needs at least 2 steps, got {steps}"
        )));
    }

    let (line, crossing) = match param {
        Param::Alpha => (BifurcationLine::GammaEqualsAlpha, m.gamma),
        Param::Gamma => (BifurcationLine::GammaEqualsAlpha, m.alpha),
        Param::Beta => (BifurcationLine::BetaEqualsDelta, m.delta),
        Param::Delta => (BifurcationLine::BetaEqualsDelta, m.beta),
    };
    if !(lo < crossing && crossing < hi) {
        return Ok(Vec::new());
    }

    let offset = (hi - lo) / steps as f64;
    let before = (crossing - offset).max(lo);
    let after = (crossing + offset).min(hi);
    Ok(vec![BifurcationLocus {
        kind: line,
        crossing_parameter: crossing,
        side_classifications: (
            branch_class_at(m, param, before, tol),
            branch_class_at(m, param, after, tol),
        ),
    }])
}
