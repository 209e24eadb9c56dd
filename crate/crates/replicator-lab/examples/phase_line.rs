//! Phase-line summary: every rest point of a few characteristic games with
//! its location, derivative and classification.
//!
//! ```bash
//! cargo run --example phase_line
//! ```

use replicator_lab::game::{PayoffMatrix, Tolerance};
use replicator_lab::local::{classify, fixed_points};

fn main() {
    let tol = Tolerance::default();
    let games = [
        ("interior attractor", PayoffMatrix::new(1.0, 3.0, 2.0, 1.0)),
        ("bistable", PayoffMatrix::new(2.0, 1.0, 1.0, 3.0)),
        ("two-point corner", PayoffMatrix::new(1.0, 2.0, 1.0, 1.0)),
        ("three-point corner", PayoffMatrix::new(1.0, 2.0, 2.0, 2.0)),
        ("constant game", PayoffMatrix::new(1.0, 1.0, 1.0, 1.0)),
    ];

    for (label, m) in games {
        let m = m.expect("finite payoffs");
        println!(
            "{label}: alpha={} beta={} gamma={} delta={}",
            m.alpha, m.beta, m.gamma, m.delta
        );
        for fp in fixed_points(&m, &tol) {
            let record = classify(&m, &fp, &tol).expect("point belongs to this game");
            // The payoff-inequality label describes the interior branch.
            let is_branch = matches!(
                record.kind,
                replicator_lab::local::FixedPointKind::P3Interior
                    | replicator_lab::local::FixedPointKind::P3CoincidesP1
                    | replicator_lab::local::FixedPointKind::P3CoincidesP2
            );
            let label_note = match record.paper_label {
                Some(l) if is_branch => format!(" (condition label: {l:?})"),
                _ => String::new(),
            };
            println!(
                "  {:<16} x1 = {:<22} f' = {:<24} {}{}",
                record.kind.to_string(),
                record.location,
                record.derivative,
                record.classification,
                label_note
            );
        }
        println!();
    }
}
