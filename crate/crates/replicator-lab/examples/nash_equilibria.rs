//! Symmetric Nash profiles computed two independent ways: from asymptotically
//! stable rest points, and by direct best-response enumeration.
//!
//! ```bash
//! cargo run --example nash_equilibria
//! ```

use replicator_lab::game::{PayoffMatrix, Tolerance};
use replicator_lab::global::{best_response_nash, nash_from_stability, NashResult};

fn show(results: &[NashResult]) -> String {
    if results.is_empty() {
        return "(none)".to_string();
    }
    results
        .iter()
        .map(|r| {
            let sigma = r.strategy_pair.0;
            format!(
                "[({}, {}), ({}, {})]",
                sigma.two_point(),
                sigma.three_point(),
                sigma.two_point(),
                sigma.three_point()
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn main() {
    let tol = Tolerance::default();
    let games = [
        (
            "all two-point is Nash",
            PayoffMatrix::new(1.0, 2.0, 1.0, 1.0),
        ),
        (
            "all three-point is Nash",
            PayoffMatrix::new(1.0, 2.0, 2.0, 2.0),
        ),
        (
            "mixed 2/3 : 1/3 is Nash",
            PayoffMatrix::new(1.0, 3.0, 2.0, 1.0),
        ),
        (
            "both pure profiles are Nash",
            PayoffMatrix::new(2.0, 1.0, 1.0, 3.0),
        ),
    ];

    for (label, m) in games {
        let m = m.expect("finite payoffs");
        println!(
            "== {label}: ({}, {}, {}, {})",
            m.alpha, m.beta, m.gamma, m.delta
        );
        println!(
            "  from stability:     {}",
            show(&nash_from_stability(&m, &tol))
        );
        println!(
            "  from best response: {}",
            show(&best_response_nash(&m, &tol))
        );
    }
}
