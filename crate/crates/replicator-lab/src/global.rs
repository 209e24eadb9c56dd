//! Global stability certificates and Nash equilibria.
//!
//! On the invariant set S = {0 < x1 < 1} the functions Z1 = log(1 - x1) and
//! Z2 = log(x1) have orbit derivatives
//!
//! ```text
//! dZ1/dt = x1 * bracket(x1)          dZ2/dt = (x1 - 1) * bracket(x1)
//! ```
//!
//! with the linear bracket of the reduced field. When such a function is
//! strictly decreasing along orbits, the monotonicity principle confines
//! every ω-limit set to the part of the boundary where the function does not
//! approach its supremum: Z1 decreasing forces ω ⊆ {x1 = 1}, Z2 decreasing
//! forces ω ⊆ {x1 = 0}. The certificates below check the two payoff corners
//! where a linear sign analysis of the bracket closes (`beta > delta` with
//! `alpha >= gamma` for Z1; `beta = delta` with `alpha < gamma` for Z2) and
//! report `Inconclusive` elsewhere; the overall verdict then falls back to
//! local analysis plus numerical integration.
//!
//! An asymptotically stable share x* yields the symmetric Nash profile
//! [(x*, 1-x*), (x*, 1-x*)]; an independent best-response enumeration of the
//! 2x2 game cross-checks every such profile.

use serde::{Deserialize, Serialize};

use crate::flow;
use crate::game::{
    reduced_field_bracket, replicator_field_reduced, MixedStrategy, PayoffMatrix, PopulationState,
    Strategy, Tolerance,
};
use crate::local::{
    classify, feasibility_check, fixed_points, Classification, ClassificationRecord, Feasibility,
    FixedPoint, FixedPointKind,
};

/// Which monotone function a certificate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateFunction {
    /// Z1 = log(1 - x1).
    #[serde(rename = "Z1_LogOneMinusX")]
    Z1LogOneMinusX,
    /// Z2 = log(x1).
    #[serde(rename = "Z2_LogX")]
    Z2LogX,
}

/// How the negative orbit-derivative sign was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignProof {
    /// The linear bracket is strictly negative at both ends of [0, 1].
    AnalyticNegative,
    /// Dense interior sampling (1e4 points) found no non-negative value.
    SampledNegative,
    Inconclusive,
}

/// Subset of the boundary {x1 = 0} ∪ {x1 = 1} that can contain ω-limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaConclusion {
    #[serde(rename = "empty")]
    Empty,
    /// ω ⊆ {x1 = 1}.
    #[serde(rename = "x1=1")]
    AllTwoPoint,
    /// ω ⊆ {x1 = 0}.
    #[serde(rename = "x1=0")]
    AllThreePoint,
}

/// Outcome of one monotone-function certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneCertificate {
    pub function_id: CertificateFunction,
    pub condition_holds: bool,
    pub derivative_sign_proof: SignProof,
    pub omega_limit_conclusion: OmegaConclusion,
}

/// Where a Nash profile came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NashSource {
    StabilityTheorem,
    BestResponseOracle,
    Both,
}

/// A symmetric Nash profile with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NashResult {
    pub strategy_pair: (MixedStrategy, MixedStrategy),
    pub source: NashSource,
    /// Certificate backing the stability evidence, when there is one.
    pub certificate: Option<MonotoneCertificate>,
    /// Member of the equilibrium continuum of a game whose field vanishes
    /// identically.
    pub degenerate: bool,
}

/// Long-run structure of the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    GloballyStableAt0,
    GloballyStableAt1,
    InteriorAttractor,
    Bistable,
    DegenerateLine,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvidenceMethod {
    DerivativeSign,
    MonotoneCertificate,
    NumericalIntegration,
    FieldSign,
    BestResponse,
}

/// One link in the audit chain: which check concluded what.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub subject: String,
    pub method: EvidenceMethod,
    pub conclusion: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificates {
    pub z1: MonotoneCertificate,
    pub z2: MonotoneCertificate,
}

/// Aggregate analysis of one game: local structure, certificates, global
/// verdict, Nash profiles from both routes, and the evidence chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub payoffs: PayoffMatrix,
    pub tolerance: f64,
    pub fixed_points: Vec<ClassificationRecord>,
    pub feasibility: Feasibility,
    pub certificates: Certificates,
    pub verdict: Verdict,
    pub nash: Vec<NashResult>,
    /// Every symmetric profile is an equilibrium (degenerate game); the list
    /// above then carries the pure representatives flagged `degenerate`.
    pub degenerate_nash_continuum: bool,
    pub evidence: Vec<Evidence>,
}

fn sampled_negative<F: Fn(f64) -> f64>(f: F) -> bool {
    const N: usize = 10_000;
    (1..=N).all(|i| f(i as f64 / (N + 1) as f64) < 0.0)
}

/// Certificate for Z1 = log(1 - x1); decreasing forces ω ⊆ {x1 = 1}.
pub fn certificate_z1(m: &PayoffMatrix, tol: &Tolerance) -> MonotoneCertificate {
    let condition = tol.gt(m.beta, m.delta) && tol.ge(m.alpha, m.gamma);
    let (proof, omega) = if condition {
        let proof = if tol.lt(reduced_field_bracket(m, 0.0), 0.0)
            && tol.lt(reduced_field_bracket(m, 1.0), 0.0)
        {
            SignProof::AnalyticNegative
        } else if sampled_negative(|x| x * reduced_field_bracket(m, x)) {
            SignProof::SampledNegative
        } else {
            SignProof::Inconclusive
        };
        (proof, OmegaConclusion::AllTwoPoint)
    } else {
        (SignProof::Inconclusive, OmegaConclusion::Empty)
    };
    MonotoneCertificate {
        function_id: CertificateFunction::Z1LogOneMinusX,
        condition_holds: condition,
        derivative_sign_proof: proof,
        omega_limit_conclusion: omega,
    }
}

/// Certificate for Z2 = log(x1); decreasing forces ω ⊆ {x1 = 0}.
///
/// The exhibited corner is `beta = delta` with `alpha < gamma`; other
/// sufficient conditions are not searched for.
pub fn certificate_z2(m: &PayoffMatrix, tol: &Tolerance) -> MonotoneCertificate {
    let condition = tol.approx_eq(m.beta, m.delta) && tol.lt(m.alpha, m.gamma);
    let (proof, omega) = if condition {
        // dZ2/dt < 0 on (0,1) iff the bracket is positive there.
        let proof = if tol.gt(reduced_field_bracket(m, 0.0), 0.0)
            && tol.gt(reduced_field_bracket(m, 1.0), 0.0)
        {
            SignProof::AnalyticNegative
        } else if sampled_negative(|x| (x - 1.0) * reduced_field_bracket(m, x)) {
            SignProof::SampledNegative
        } else {
            SignProof::Inconclusive
        };
        (proof, OmegaConclusion::AllThreePoint)
    } else {
        (SignProof::Inconclusive, OmegaConclusion::Empty)
    };
    MonotoneCertificate {
        function_id: CertificateFunction::Z2LogX,
        condition_holds: condition,
        derivative_sign_proof: proof,
        omega_limit_conclusion: omega,
    }
}

/// Does `sigma` best-respond to a population playing `sigma` (ties allowed)?
fn is_symmetric_best_response(m: &PayoffMatrix, sigma: &MixedStrategy, tol: &Tolerance) -> bool {
    let x = PopulationState::new(sigma.two_point(), sigma.three_point())
        .expect("mixed strategy lies on the simplex");
    let own = m.mixed_payoff(sigma, &x);
    Strategy::ALL
        .iter()
        .all(|s| tol.le(m.payoff_vs_population(*s, &x), own))
}

fn nash_entry(
    location: f64,
    source: NashSource,
    certificate: Option<MonotoneCertificate>,
) -> NashResult {
    let sigma = MixedStrategy::from_two_point_weight(location)
        .expect("fixed-point location lies in [0, 1]");
    NashResult {
        strategy_pair: (sigma, sigma),
        source,
        certificate,
        degenerate: false,
    }
}

/// Symmetric Nash profiles derived from asymptotically stable rest points.
///
/// Evidence is ranked: a strictly negative derivative settles it; at
/// non-hyperbolic points a holding certificate settles it; otherwise an
/// ω-limit probe from the adjacent interior is the backstop. Profiles also
/// passing the direct best-response inequalities are upgraded to
/// [`NashSource::Both`].
pub fn nash_from_stability(m: &PayoffMatrix, tol: &Tolerance) -> Vec<NashResult> {
    let points = fixed_points(m, tol);
    if points[0].kind == FixedPointKind::DegenerateLine {
        return Vec::new();
    }
    let z1 = certificate_z1(m, tol);
    let z2 = certificate_z2(m, tol);

    let mut out = Vec::new();
    for fp in &points {
        let stable: Option<Option<MonotoneCertificate>> = match fp.classification {
            Classification::Sink => Some(None),
            Classification::Source => None,
            Classification::NonHyperbolic | Classification::Unclassified => {
                if (fp.location - 1.0).abs() <= 1e-9 && z1.condition_holds {
                    Some(Some(z1))
                } else if fp.location.abs() <= 1e-9 && z2.condition_holds {
                    Some(Some(z2))
                } else {
                    let probe = if fp.location.abs() <= 1e-9 {
                        Some(0.01)
                    } else if (fp.location - 1.0).abs() <= 1e-9 {
                        Some(0.99)
                    } else {
                        None
                    };
                    let attracts = probe.is_some_and(|x0| {
                        flow::omega_limit_estimate(m, x0).is_ok_and(|limit| {
                            limit
                                .value()
                                .is_some_and(|v| (v - fp.location).abs() <= 1e-6)
                        })
                    });
                    if attracts {
                        Some(None)
                    } else {
                        None
                    }
                }
            }
        };
        if let Some(cert) = stable {
            let mut entry = nash_entry(fp.location, NashSource::StabilityTheorem, cert);
            if is_symmetric_best_response(m, &entry.strategy_pair.0, tol) {
                entry.source = NashSource::Both;
            }
            out.push(entry);
        }
    }
    out.sort_by(|a, b| {
        a.strategy_pair
            .0
            .two_point()
            .total_cmp(&b.strategy_pair.0.two_point())
    });
    out
}

/// Independent enumeration of the symmetric Nash profiles of the 2x2 game:
/// [TwoPoint, TwoPoint] iff `alpha >= gamma`, [ThreePoint, ThreePoint] iff
/// `delta >= beta` (ties count), and the interior mixture when the branch
/// root is strictly interior and both strategies are indifferent there.
pub fn best_response_nash(m: &PayoffMatrix, tol: &Tolerance) -> Vec<NashResult> {
    let mut out = Vec::new();
    if tol.ge(m.delta, m.beta) {
        out.push(nash_entry(0.0, NashSource::BestResponseOracle, None));
    }
    let points = fixed_points(m, tol);
    if let Some(p3) = points.iter().find(|p| p.kind == FixedPointKind::P3Interior) {
        let x = PopulationState::from_two_point_share(p3.location)
            .expect("interior location lies in [0, 1]");
        let gap = m.payoff_vs_population(Strategy::TwoPoint, &x)
            - m.payoff_vs_population(Strategy::ThreePoint, &x);
        if tol.approx_eq(gap, 0.0) {
            out.push(nash_entry(
                p3.location,
                NashSource::BestResponseOracle,
                None,
            ));
        }
    }
    if tol.ge(m.alpha, m.gamma) {
        out.push(nash_entry(1.0, NashSource::BestResponseOracle, None));
    }
    out
}

fn merge_nash(stability: Vec<NashResult>, oracle: Vec<NashResult>) -> Vec<NashResult> {
    let mut merged = stability;
    for entry in oracle {
        let p = entry.strategy_pair.0.two_point();
        match merged
            .iter_mut()
            .find(|e| (e.strategy_pair.0.two_point() - p).abs() <= 1e-9)
        {
            Some(existing) => existing.source = NashSource::Both,
            None => merged.push(entry),
        }
    }
    merged.sort_by(|a, b| {
        a.strategy_pair
            .0
            .two_point()
            .total_cmp(&b.strategy_pair.0.two_point())
    });
    merged
}

/// Integration probe toward `target`; returns false only on a contradiction
/// (an orbit settling at a different rest point). Transit that has not
/// resolved by the horizon does not contradict analytic evidence.
fn integration_supports(
    m: &PayoffMatrix,
    points: &[FixedPoint],
    starts: &[f64],
    target: impl Fn(f64) -> f64,
    subject: &str,
    evidence: &mut Vec<Evidence>,
) -> bool {
    let mut contradicted = false;
    let mut notes = Vec::new();
    for &x0 in starts {
        match flow::probe_limit(m, points, x0, 1e4) {
            Some(limit) if (limit - target(x0)).abs() <= 1e-6 => {
                notes.push(format!("{x0} -> {limit}"));
            }
            Some(limit) => {
                contradicted = true;
                notes.push(format!("{x0} -> {limit} (conflicts)"));
            }
            None => notes.push(format!("{x0} -> unresolved by t=1e4")),
        }
    }
    evidence.push(Evidence {
        subject: subject.to_string(),
        method: EvidenceMethod::NumericalIntegration,
        conclusion: notes.join(", "),
    });
    !contradicted
}

const VERDICT_STARTS: [f64; 3] = [0.01, 0.5, 0.99];

fn decide_verdict(
    m: &PayoffMatrix,
    points: &[FixedPoint],
    z1: &MonotoneCertificate,
    z2: &MonotoneCertificate,
    tol: &Tolerance,
    evidence: &mut Vec<Evidence>,
) -> Verdict {
    if points[0].kind == FixedPointKind::DegenerateLine {
        evidence.push(Evidence {
            subject: "[0,1]".to_string(),
            method: EvidenceMethod::FieldSign,
            conclusion: "field vanishes identically; every share is at rest".to_string(),
        });
        return Verdict::DegenerateLine;
    }

    if z1.condition_holds {
        evidence.push(Evidence {
            subject: "x1=1".to_string(),
            method: EvidenceMethod::MonotoneCertificate,
            conclusion: "log(1-x1) decreasing on orbits; omega subset of {x1=1}".to_string(),
        });
        return if integration_supports(m, points, &VERDICT_STARTS, |_| 1.0, "x1=1", evidence) {
            Verdict::GloballyStableAt1
        } else {
            Verdict::Undetermined
        };
    }
    if z2.condition_holds {
        evidence.push(Evidence {
            subject: "x1=0".to_string(),
            method: EvidenceMethod::MonotoneCertificate,
            conclusion: "log(x1) decreasing on orbits; omega subset of {x1=0}".to_string(),
        });
        return if integration_supports(m, points, &VERDICT_STARTS, |_| 0.0, "x1=0", evidence) {
            Verdict::GloballyStableAt0
        } else {
            Verdict::Undetermined
        };
    }

    if let Some(p3) = points.iter().find(|p| p.kind == FixedPointKind::P3Interior) {
        match p3.classification {
            Classification::Sink => {
                evidence.push(Evidence {
                    subject: format!("x1={}", p3.location),
                    method: EvidenceMethod::DerivativeSign,
                    conclusion: format!("f' = {} < 0: interior sink", p3.derivative),
                });
                let loc = p3.location;
                return if integration_supports(
                    m,
                    points,
                    &VERDICT_STARTS,
                    |_| loc,
                    "interior sink",
                    evidence,
                ) {
                    Verdict::InteriorAttractor
                } else {
                    Verdict::Undetermined
                };
            }
            Classification::Source => {
                evidence.push(Evidence {
                    subject: format!("x1={}", p3.location),
                    method: EvidenceMethod::DerivativeSign,
                    conclusion: format!(
                        "f' = {} > 0: interior source splitting the basins",
                        p3.derivative
                    ),
                });
                // Probe each basin at its midpoint.
                let loc = p3.location;
                let starts = [loc / 2.0, (loc + 1.0) / 2.0];
                let target = move |x0: f64| if x0 < loc { 0.0 } else { 1.0 };
                return if integration_supports(m, points, &starts, target, "bistable", evidence) {
                    Verdict::Bistable
                } else {
                    Verdict::Undetermined
                };
            }
            _ => return Verdict::Undetermined,
        }
    }

    // No interior rest point and no certificate: the bracket keeps one sign
    // on (0, 1), so the field does too and every interior orbit drifts to the
    // same boundary.
    let mid = replicator_field_reduced(m, 0.5);
    match tol.sign(mid) {
        crate::game::Sign::Positive => {
            evidence.push(Evidence {
                subject: "x1=1".to_string(),
                method: EvidenceMethod::FieldSign,
                conclusion: format!("f(0.5) = {mid} > 0: interior flow is increasing"),
            });
            if integration_supports(m, points, &VERDICT_STARTS, |_| 1.0, "x1=1", evidence) {
                Verdict::GloballyStableAt1
            } else {
                Verdict::Undetermined
            }
        }
        crate::game::Sign::Negative => {
            evidence.push(Evidence {
                subject: "x1=0".to_string(),
                method: EvidenceMethod::FieldSign,
                conclusion: format!("f(0.5) = {mid} < 0: interior flow is decreasing"),
            });
            if integration_supports(m, points, &VERDICT_STARTS, |_| 0.0, "x1=0", evidence) {
                Verdict::GloballyStableAt0
            } else {
                Verdict::Undetermined
            }
        }
        crate::game::Sign::Zero => Verdict::Undetermined,
    }
}

/// Full stability and equilibrium analysis of one game.
pub fn global_verdict(m: &PayoffMatrix, tol: &Tolerance) -> StabilityReport {
    let points = fixed_points(m, tol);
    let records: Vec<ClassificationRecord> = points
        .iter()
        .map(|fp| classify(m, fp, tol).expect("points produced from the same matrix"))
        .collect();
    let feasibility = feasibility_check(m, tol);
    let z1 = certificate_z1(m, tol);
    let z2 = certificate_z2(m, tol);

    let mut evidence = Vec::new();
    if feasibility.disagreement {
        evidence.push(Evidence {
            subject: "interior branch".to_string(),
            method: EvidenceMethod::FieldSign,
            conclusion: format!(
                "feasibility verdicts disagree: direct ratio test {} vs payoff-inequality union {}",
                feasibility.p3_in_simplex, feasibility.paper_condition_holds
            ),
        });
    }
    let verdict = decide_verdict(m, &points, &z1, &z2, tol, &mut evidence);

    let mut nash = merge_nash(nash_from_stability(m, tol), best_response_nash(m, tol));
    for entry in &nash {
        evidence.push(Evidence {
            subject: format!(
                "sigma=({}, {})",
                entry.strategy_pair.0.two_point(),
                entry.strategy_pair.0.three_point()
            ),
            method: EvidenceMethod::BestResponse,
            conclusion: match entry.source {
                NashSource::Both => "stability theorem and best-response check agree".to_string(),
                NashSource::StabilityTheorem => "stability theorem only".to_string(),
                NashSource::BestResponseOracle => "best-response check only".to_string(),
            },
        });
    }
    let degenerate_nash_continuum = verdict == Verdict::DegenerateLine;
    if degenerate_nash_continuum {
        for entry in &mut nash {
            entry.degenerate = true;
        }
        evidence.push(Evidence {
            subject: "all symmetric profiles".to_string(),
            method: EvidenceMethod::BestResponse,
            conclusion:
                "payoffs are strategy-independent; every symmetric profile is an equilibrium"
                    .to_string(),
        });
    }

    StabilityReport {
        payoffs: *m,
        tolerance: tol.eps(),
        fixed_points: records,
        feasibility,
        certificates: Certificates { z1, z2 },
        verdict,
        nash,
        degenerate_nash_continuum,
        evidence,
    }
}
