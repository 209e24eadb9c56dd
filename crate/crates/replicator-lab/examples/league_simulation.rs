//! Finite league against the mean-field flow: the average share of
//! simulated leagues tracks the deterministic trajectory.
//!
//! ```bash
//! cargo run --example league_simulation
//! ```

use replicator_lab::flow::integrate;
use replicator_lab::game::PayoffMatrix;
use replicator_lab::league::{run_sampled, LeagueState, RevisionProtocol};

fn main() {
    let m = PayoffMatrix::new(1.0, 3.0, 2.0, 1.0).expect("finite payoffs");
    let protocol = RevisionProtocol::replicator_aligned(&m);
    let teams = 2_000u64;
    let s0 = LeagueState::new(teams / 10, teams - teams / 10);
    let horizon = 30.0;
    let seeds = 20u64;
    let checkpoints: Vec<f64> = (1..=10).map(|k| horizon * k as f64 / 10.0).collect();

    let mut means = vec![0.0; checkpoints.len()];
    for seed in 0..seeds {
        let samples =
            run_sampled(&s0, &m, &protocol, horizon, seed, &checkpoints).expect("valid run");
        for (mean, (_, state)) in means.iter_mut().zip(&samples) {
            *mean += state.n1 as f64 / state.total() as f64 / seeds as f64;
        }
    }

    println!(
        "{teams} teams, {seeds} seeds, imitation rate {}",
        protocol.rate
    );
    println!(
        "{:>8} {:>12} {:>12} {:>10}",
        "t", "league mean", "flow", "gap"
    );
    for (t, mean) in checkpoints.iter().zip(&means) {
        let ode = integrate(&m, 0.1, *t, 1e-9)
            .expect("valid inputs")
            .last_state();
        println!(
            "{t:>8.1} {mean:>12.5} {ode:>12.5} {:>10.2e}",
            (mean - ode).abs()
        );
    }
}
