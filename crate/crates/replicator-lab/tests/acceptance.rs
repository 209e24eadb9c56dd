//! Acceptance gate: every analytic claim the library makes is checked here
//! against an independent route (monomial cubic evaluation, grid+bisection
//! root-finding, central finite differences, direct best-response
//! inequalities, or stochastic simulation), at fixed tolerances, with one
//! printed PASS/FAIL line per gate.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use replicator_lab::flow::{self, Limit, TerminalReason};
use replicator_lab::game::{Param, PayoffMatrix, PopulationState, Strategy, Tolerance};
use replicator_lab::global::{
    best_response_nash, certificate_z1, certificate_z2, global_verdict, nash_from_stability,
    NashSource, OmegaConclusion, Verdict,
};
use replicator_lab::league::{run_sampled, LeagueState, RevisionProtocol};
use replicator_lab::local::{
    bifurcation_scan, feasibility_check, fixed_points, Classification, FixedPointKind,
};

fn mat(a: f64, b: f64, c: f64, d: f64) -> PayoffMatrix {
    PayoffMatrix::new(a, b, c, d).unwrap()
}

fn rand_matrix<R: Rng>(rng: &mut R) -> PayoffMatrix {
    mat(
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
    )
}

/// Independent evaluation of the reduced cubic, written from the monomial
/// expansion rather than the library's factored form.
fn cubic(m: &PayoffMatrix, x: f64) -> f64 {
    let g0 = m.delta - m.beta;
    let den = m.beta - m.delta + m.gamma - m.alpha;
    den * x * x * x + (g0 - den) * x * x - g0 * x
}

/// Roots of the cubic in [0, 1] found by grid scan plus bisection.
///
/// The monomorphic states 0 and 1 are rest points for every payoff matrix
/// (each component of the share dynamics carries its own share as a factor),
/// so they are seeded directly; the expanded monomial form only reproduces
/// them up to cancellation noise. Interior roots come from sign changes, with
/// the boundary intervals nudged inward so the noise cannot mask a change.
fn bisection_roots(m: &PayoffMatrix, grid: usize) -> Vec<f64> {
    let h = 1.0 / grid as f64;
    let nudge = h * 1e-6;
    let mut roots = vec![0.0, 1.0];
    for i in 1..grid {
        let x = i as f64 * h;
        if cubic(m, x) == 0.0 {
            roots.push(x);
        }
    }
    for i in 0..grid {
        let mut a = if i == 0 { nudge } else { i as f64 * h };
        let b = if i == grid - 1 {
            1.0 - nudge
        } else {
            (i + 1) as f64 * h
        };
        let mut hi = b;
        let mut fa = cubic(m, a);
        let fb = cubic(m, b);
        if fa == 0.0 {
            a += nudge;
            fa = cubic(m, a);
        }
        if fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..80 {
            let mid = 0.5 * (a + hi);
            let fm = cubic(m, mid);
            if fm == 0.0 {
                a = mid;
                hi = mid;
                break;
            }
            if fm.signum() == fa.signum() {
                a = mid;
                fa = fm;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (a + hi));
    }
    roots
}

#[test]
fn a01_fixed_point_locations_match_bisection() {
    let start = Instant::now();
    let mut rng = rand::rngs::StdRng::seed_from_u64(101);
    let tol = Tolerance::default();
    let mut checked = 0;
    while checked < 1000 {
        let m = rand_matrix(&mut rng);
        if (-m.alpha + m.beta - m.delta + m.gamma).abs() <= 1e-3 {
            continue;
        }
        checked += 1;
        let reported = fixed_points(&m, &tol);
        let oracle = bisection_roots(&m, 10_000);
        for r in &oracle {
            assert!(
                reported.iter().any(|fp| (fp.location - r).abs() < 1e-6),
                "bisection root {r} not reported for {m:?}"
            );
        }
        for fp in &reported {
            assert!(
                oracle.iter().any(|r| (fp.location - r).abs() < 1e-6),
                "reported point {} not found by bisection for {m:?}",
                fp.location
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!("PASS a01 fixed-point locations match grid+bisection on 1000 matrices ({elapsed:?})");
}

#[test]
fn a02_branch_collapses_onto_the_boundaries() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(102);
    let tol = Tolerance::default();

    // beta = delta collapses the branch onto 0, exactly in floats because the
    // numerator cancels exactly.
    for _ in 0..100 {
        let beta: f64 = rng.gen_range(-5.0..5.0);
        let mut m;
        loop {
            m = mat(
                rng.gen_range(-5.0..5.0),
                beta,
                rng.gen_range(-5.0..5.0),
                beta,
            );
            if (m.gamma - m.alpha).abs() > 1e-3 {
                break;
            }
        }
        let fps = fixed_points(&m, &tol);
        let merged = fps
            .iter()
            .find(|p| p.kind == FixedPointKind::P3CoincidesP1)
            .unwrap_or_else(|| panic!("no merge at 0 for {m:?}"));
        assert_eq!(merged.location, 0.0);
    }

    // alpha = gamma collapses it onto 1 within 1e-12 (intermediate rounding
    // in the denominator), reported at exactly 1.
    for _ in 0..100 {
        let alpha: f64 = rng.gen_range(-5.0..5.0);
        let mut m;
        loop {
            m = mat(
                alpha,
                rng.gen_range(-5.0..5.0),
                alpha,
                rng.gen_range(-5.0..5.0),
            );
            if (m.beta - m.delta).abs() > 1e-3 {
                break;
            }
        }
        let den = -m.alpha + m.beta - m.delta + m.gamma;
        let raw = (m.beta - m.delta) / den;
        assert!((raw - 1.0).abs() <= 1e-12, "raw branch {raw} for {m:?}");
        let fps = fixed_points(&m, &tol);
        let merged = fps
            .iter()
            .find(|p| p.kind == FixedPointKind::P3CoincidesP2)
            .unwrap_or_else(|| panic!("no merge at 1 for {m:?}"));
        assert_eq!(merged.location, 1.0);
    }

    // Integer payoffs under exact comparisons behave identically.
    let exact = Tolerance::exact();
    let fps = fixed_points(&mat(1.0, 2.0, 1.0, 1.0), &exact);
    assert!(fps.iter().any(|p| p.kind == FixedPointKind::P3CoincidesP2));
    let fps = fixed_points(&mat(1.0, 2.0, 3.0, 2.0), &exact);
    assert!(fps.iter().any(|p| p.kind == FixedPointKind::P3CoincidesP1));

    println!("PASS a02 branch collapse onto 0 (beta=delta) and 1 (alpha=gamma), 100 matrices each");
}

#[test]
fn a03_inequality_conditions_agree_with_derivative_sign() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(103);
    let tol = Tolerance::default();
    let mut checked = 0;
    let mut disagreements = 0;
    while checked < 1000 {
        let m = rand_matrix(&mut rng);
        let fps = fixed_points(&m, &tol);
        let Some(p3) = fps.iter().find(|p| p.kind == FixedPointKind::P3Interior) else {
            continue;
        };
        if p3.derivative.abs() <= 1e-6 {
            continue;
        }
        checked += 1;
        let sink_cond = tol.lt(m.delta, m.beta) && tol.gt(m.gamma, m.alpha);
        let source_cond = tol.gt(m.delta, m.beta) && tol.lt(m.gamma, m.alpha);
        if sink_cond != (p3.derivative < 0.0) || source_cond != (p3.derivative > 0.0) {
            disagreements += 1;
        }
    }
    assert_eq!(disagreements, 0);
    println!(
        "PASS a03 sink/source payoff conditions match derivative signs on 1000 interior branches"
    );
}

#[test]
fn a04_analytic_derivative_matches_finite_differences() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(104);
    let tol = Tolerance::default();
    let h = 1e-6;
    for _ in 0..1000 {
        let m = rand_matrix(&mut rng);
        for fp in fixed_points(&m, &tol) {
            let x = fp.location;
            let fd = (cubic(&m, x + h) - cubic(&m, x - h)) / (2.0 * h);
            assert!(
                (fp.derivative - fd).abs() < 1e-6,
                "analytic {} vs central difference {fd} at {x} for {m:?}",
                fp.derivative
            );
        }
    }
    println!("PASS a04 analytic linearization within 1e-6 of central differences, 1000 matrices");
}

/// Matrices in the corner `beta > delta`, `alpha >= gamma`, with margin 0.1
/// on both gaps. An exact `alpha = gamma` tie makes the approach to 1
/// algebraic (share deficit ~ 1/((beta-delta) t), still ~1e-3 at t = 1e4),
/// so the margin is applied to both gaps to keep the 1e-6 target meaningful;
/// the tie itself is exercised in a09.
fn z1_corner_matrix<R: Rng>(rng: &mut R) -> PayoffMatrix {
    loop {
        let m = rand_matrix(rng);
        if m.beta - m.delta >= 0.1 && m.alpha - m.gamma >= 0.1 {
            return m;
        }
    }
}

#[test]
fn a05_z1_corner_drives_every_start_to_all_two_point() {
    let start = Instant::now();
    let mut rng = rand::rngs::StdRng::seed_from_u64(105);
    let tol = Tolerance::default();
    let matrices: Vec<PayoffMatrix> = (0..100).map(|_| z1_corner_matrix(&mut rng)).collect();
    matrices.par_iter().for_each(|m| {
        let cert = certificate_z1(m, &tol);
        assert!(cert.condition_holds, "certificate failed for {m:?}");
        assert_eq!(cert.omega_limit_conclusion, OmegaConclusion::AllTwoPoint);
        for x0 in [0.01, 0.5, 0.99] {
            let traj = flow::integrate(m, x0, 1e4, 1e-9).unwrap();
            assert!(
                traj.last_state() > 1.0 - 1e-6,
                "{m:?} from {x0} only reached {}",
                traj.last_state()
            );
        }
    });
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!("PASS a05 orbits reach x1 > 1-1e-6 by t=1e4 on 100 certified matrices x 3 starts ({elapsed:?})");
}

#[test]
fn a06_z2_corner_drives_every_start_to_all_three_point() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(106);
    let tol = Tolerance::default();

    // beta = delta exactly (the corner requires the tie), gamma - alpha >= 0.1.
    let matrices: Vec<PayoffMatrix> = (0..100)
        .map(|_| loop {
            let beta: f64 = rng.gen_range(-5.0..5.0);
            let alpha: f64 = rng.gen_range(-5.0..5.0);
            let gamma: f64 = rng.gen_range(-5.0..5.0);
            if gamma - alpha >= 0.1 {
                return mat(alpha, beta, gamma, beta);
            }
        })
        .collect();

    let mut worst_terminal: f64 = 0.0;
    for m in &matrices {
        let cert = certificate_z2(m, &tol);
        assert!(cert.condition_holds, "certificate failed for {m:?}");
        assert_eq!(cert.omega_limit_conclusion, OmegaConclusion::AllThreePoint);
    }
    let terminals: Vec<f64> = matrices
        .par_iter()
        .flat_map(|m| {
            [0.01, 0.5, 0.99].into_par_iter().map(move |x0| {
                let traj = flow::integrate(m, x0, 1e4, 1e-9).unwrap();
                // The limit itself is unambiguous.
                assert_eq!(flow::omega_limit_estimate(m, x0).unwrap(), Limit::Zero);
                // log(x1) decreases along the orbit (the certified function).
                let mut prev = f64::INFINITY;
                for x in &traj.states {
                    let z = x.ln();
                    assert!(z <= prev + 1e-9, "log x1 rose along orbit for {m:?}");
                    prev = z;
                }
                assert!(
                    traj.last_state() < 1e-2,
                    "{m:?} from {x0} stalled at {}",
                    traj.last_state()
                );
                traj.last_state()
            })
        })
        .collect();
    for t in terminals {
        worst_terminal = worst_terminal.max(t);
    }

    if worst_terminal >= 1e-6 {
        println!(
            "FAIL a06 certified descent to x1=0 confirmed (certificates, omega limits, monotone \
             log x1, terminal < 1e-2), but the x1 < 1e-6 threshold at t=1e4 is unreachable: \
             worst terminal {worst_terminal:.3e}"
        );
        panic!(
            "with beta = delta the boundary x1=0 is non-hyperbolic and the flow obeys \
             dx/dt = (alpha-gamma) x^2 (1-x); by the comparison principle \
             x(t) >= 1/(1/x0 + (gamma-alpha) t) >= 1/(100 + 10*1e4) ~ 9.9e-6 for any \
             payoffs in [-5,5] and x0 >= 0.01, so x1 < 1e-6 by t=1e4 is impossible for the \
             exact solution and for any consistent integrator (worst observed terminal: \
             {worst_terminal:.3e})"
        );
    }
    println!("PASS a06 orbits reach x1 < 1e-6 by t=1e4 on 100 certified matrices x 3 starts");
}

#[test]
fn a07_certified_orbits_decrease_log_distance_to_the_target() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(107);
    for _ in 0..10 {
        let m = z1_corner_matrix(&mut rng);
        for x0 in [0.01, 0.5, 0.99] {
            let traj = flow::integrate(&m, x0, 1e4, 1e-9).unwrap();
            let mut prev = f64::INFINITY;
            for x in &traj.states {
                let z = (1.0 - x).ln();
                assert!(
                    z <= prev + 1e-9,
                    "log(1-x1) increased along orbit of {m:?} from {x0}"
                );
                prev = z;
            }
        }
    }
    println!("PASS a07 log(1-x1) non-increasing along certified orbits (10 matrices x 3 starts)");
}

#[test]
fn a08_stability_nash_profiles_survive_the_best_response_oracle() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(108);
    let tol = Tolerance::default();
    let mut checked = 0;
    while checked < 1000 {
        let m = rand_matrix(&mut rng);
        if tol.approx_eq(m.beta, m.delta) || tol.approx_eq(m.gamma, m.alpha) {
            continue;
        }
        checked += 1;
        let oracle = best_response_nash(&m, &tol);
        for r in nash_from_stability(&m, &tol) {
            let p = r.strategy_pair.0.two_point();
            assert!(
                oracle
                    .iter()
                    .any(|o| (o.strategy_pair.0.two_point() - p).abs() <= 1e-9),
                "profile {p} from stability unconfirmed for {m:?}"
            );
            // Interior profiles must be exactly indifferent.
            if p > 0.0 && p < 1.0 {
                let x = PopulationState::from_two_point_share(p).unwrap();
                let gap = m.payoff_vs_population(Strategy::TwoPoint, &x)
                    - m.payoff_vs_population(Strategy::ThreePoint, &x);
                assert!(gap.abs() < 1e-9, "indifference violated at {p} for {m:?}");
            }
        }
    }
    println!(
        "PASS a08 every stability-derived Nash profile confirmed by best response, 1000 matrices"
    );
}

#[test]
fn a09_exhibited_equilibria_reproduce_exactly() {
    let tol = Tolerance::default();

    // Two-point corner: payoff(T,T) = payoff(Th,T), payoff(T,Th) > payoff(Th,Th).
    let m = mat(1.0, 2.0, 1.0, 1.0);
    let report = global_verdict(&m, &tol);
    assert_eq!(report.verdict, Verdict::GloballyStableAt1);
    assert_eq!(report.nash.len(), 1);
    let sigma = report.nash[0].strategy_pair.0;
    assert_eq!((sigma.two_point(), sigma.three_point()), (1.0, 0.0));
    assert_eq!(report.nash[0].source, NashSource::Both);

    // Three-point corner: payoff(T,Th) = payoff(Th,Th), payoff(T,T) < payoff(Th,T).
    let m = mat(1.0, 2.0, 2.0, 2.0);
    let report = global_verdict(&m, &tol);
    assert_eq!(report.verdict, Verdict::GloballyStableAt0);
    assert_eq!(report.nash.len(), 1);
    let sigma = report.nash[0].strategy_pair.0;
    assert_eq!((sigma.two_point(), sigma.three_point()), (0.0, 1.0));
    assert_eq!(report.nash[0].source, NashSource::Both);

    println!("PASS a09 the two exhibited corner equilibria reproduce with their global verdicts");
}

#[test]
fn a10_bifurcation_loci_are_exact_with_flipped_sides() {
    let tol = Tolerance::default();
    let base = mat(1.0, 3.0, 2.0, 1.0);

    for (param, lo, hi, expected) in [
        (Param::Gamma, 0.0, 3.0, base.alpha),
        (Param::Beta, 0.0, 2.0, base.delta),
    ] {
        let loci = bifurcation_scan(&base, param, lo, hi, 100, &tol).unwrap();
        assert_eq!(loci.len(), 1);
        let locus = loci[0];
        // Closed form: bit-exact, error 0.
        assert_eq!(locus.crossing_parameter, expected);
        let (before, after) = locus.side_classifications;
        assert_ne!(before, after, "sides agree across the {param} crossing");

        // At the crossing the colliding rest point is non-hyperbolic.
        let at = base.with_param(param, locus.crossing_parameter);
        let merged = fixed_points(&at, &tol)
            .into_iter()
            .find(|p| {
                matches!(
                    p.kind,
                    FixedPointKind::P3CoincidesP1 | FixedPointKind::P3CoincidesP2
                )
            })
            .expect("branch merges at the crossing");
        assert_eq!(merged.classification, Classification::NonHyperbolic);
    }
    println!("PASS a10 loci located in closed form (error 0), non-hyperbolic at the crossing, sides differ");
}

#[test]
fn a11_league_mean_tracks_the_flow_within_five_percent() {
    let start = Instant::now();
    let n = 10_000u64;
    let seeds = 50u64;
    let horizon = 100.0;
    let checkpoints: Vec<f64> = (1..=20).map(|k| horizon * k as f64 / 20.0).collect();

    for (m, n1) in [
        (mat(1.0, 2.0, 1.0, 1.0), n / 2),
        (mat(1.0, 3.0, 2.0, 1.0), n / 10),
    ] {
        let protocol = RevisionProtocol::replicator_aligned(&m);
        let s0 = LeagueState::new(n1, n - n1);
        let x0 = n1 as f64 / n as f64;

        let sums: Vec<f64> = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                run_sampled(&s0, &m, &protocol, horizon, seed, &checkpoints)
                    .unwrap()
                    .into_iter()
                    .map(|(_, s)| s.n1 as f64 / s.total() as f64)
                    .collect::<Vec<f64>>()
            })
            .reduce(
                || vec![0.0; checkpoints.len()],
                |mut acc, row| {
                    for (a, v) in acc.iter_mut().zip(&row) {
                        *a += v;
                    }
                    acc
                },
            );

        let mut sup_norm: f64 = 0.0;
        for (t, sum) in checkpoints.iter().zip(&sums) {
            let mean = sum / seeds as f64;
            let reference = flow::integrate(&m, x0, *t, 1e-9).unwrap().last_state();
            sup_norm = sup_norm.max((mean - reference).abs());
        }
        assert!(
            sup_norm < 0.05,
            "sup-norm {sup_norm} for {m:?} over {seeds} seeds"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!("PASS a11 mean of 50 league runs (N=1e4) within 0.05 of the flow at 20 checkpoints ({elapsed:?})");
}

#[test]
fn a12_feasibility_disagreement_is_surfaced() {
    let tol = Tolerance::default();
    let m = mat(10.0, 2.0, 0.0, 1.0);
    let feasibility = feasibility_check(&m, &tol);
    assert!(!feasibility.p3_in_simplex);
    assert!(feasibility.paper_condition_holds);
    assert!(feasibility.disagreement);

    let report = global_verdict(&m, &tol);
    assert!(report.feasibility.disagreement);
    assert!(report
        .evidence
        .iter()
        .any(|e| e.conclusion.contains("feasibility verdicts disagree")));
    println!("PASS a12 feasibility verdicts disagree on (10,2,0,1) and the report flags it");
}

/// Boundary starts are rest points and must terminate immediately; this pins
/// the Converged semantics the other gates rely on.
#[test]
fn boundary_rest_points_terminate_immediately() {
    let m = mat(1.0, 3.0, 2.0, 1.0);
    for x0 in [0.0, 1.0] {
        let traj = flow::integrate(&m, x0, 1e3, 1e-9).unwrap();
        assert_eq!(traj.terminal_reason, TerminalReason::Converged);
        assert_eq!(traj.states.len(), 1);
    }
}
