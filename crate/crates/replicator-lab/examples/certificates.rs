//! Monotone-function certificates for the two payoff corners with global
//! conclusions, shown next to the aggregated verdict.
//!
//! ```bash
//! cargo run --example certificates
//! ```

use replicator_lab::cli::to_json_pretty_17;
use replicator_lab::game::{PayoffMatrix, Tolerance};
use replicator_lab::global::{certificate_z1, certificate_z2, global_verdict};

fn main() {
    let tol = Tolerance::default();
    let games = [
        (
            "beta > delta, alpha >= gamma",
            PayoffMatrix::new(1.0, 2.0, 1.0, 1.0),
        ),
        (
            "beta = delta, alpha < gamma",
            PayoffMatrix::new(1.0, 2.0, 2.0, 2.0),
        ),
        ("neither corner", PayoffMatrix::new(1.0, 3.0, 2.0, 1.0)),
    ];

    for (label, m) in games {
        let m = m.expect("finite payoffs");
        println!("== {label}");
        let z1 = certificate_z1(&m, &tol);
        let z2 = certificate_z2(&m, &tol);
        println!("z1: {}", to_json_pretty_17(&z1).unwrap().trim_end());
        println!("z2: {}", to_json_pretty_17(&z2).unwrap().trim_end());
        println!("verdict: {:?}\n", global_verdict(&m, &tol).verdict);
    }
}
