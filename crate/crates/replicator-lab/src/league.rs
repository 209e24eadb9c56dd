//! Finite-population league simulator.
//!
//! N teams each hold one strategy. Revision events arrive as a Poisson stream
//! with total rate `rate * N`; at each event a uniformly random team compares
//! its payoff against the current league profile with that of a uniformly
//! random *other* team and imitates it with probability
//! `max(0, payoff_other - payoff_own) / payoff_range`. The range
//! normalization keeps the probability in [0, 1] for arbitrary payoff
//! magnitudes (a zero-range game never switches).
//!
//! Pairwise proportional imitation is chosen because its expected motion is
//! the replicator field: the positive-part probabilities of the two switch
//! directions net to the signed payoff gap, so
//! `E[dx1/dt] = (rate / range) * x1 * x2 * gap * (1 + O(1/N))`.
//! [`RevisionProtocol::replicator_aligned`] sets `rate = range` so that the
//! simulated clock matches the replicator clock directly.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::flow::fmt_float;
use crate::game::{PayoffMatrix, PopulationState, Strategy};
use crate::{Error, Result};

/// Strategy counts of the league; the total is implicit and conserved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeagueState {
    /// Teams favoring two-point offense.
    pub n1: u64,
    /// Teams favoring three-point offense.
    pub n2: u64,
}

impl LeagueState {
    pub fn new(n1: u64, n2: u64) -> Self {
        LeagueState { n1, n2 }
    }

    pub fn total(&self) -> u64 {
        self.n1 + self.n2
    }

    /// Shares (n1/N, n2/N) of the two strategies.
    pub fn empirical_state(&self) -> Result<PopulationState> {
        let n = self.total();
        if n == 0 {
            return Err(Error::EmptyLeague);
        }
        PopulationState::new(self.n1 as f64 / n as f64, self.n2 as f64 / n as f64)
    }

    fn count(&self, s: Strategy) -> u64 {
        match s {
            Strategy::TwoPoint => self.n1,
            Strategy::ThreePoint => self.n2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProtocolKind {
    PairwiseProportionalImitation,
}

/// Revision rule plus the per-team event rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevisionProtocol {
    pub kind: ProtocolKind,
    /// Revision events per team per unit time.
    pub rate: f64,
}

impl RevisionProtocol {
    pub fn pairwise_proportional(rate: f64) -> Result<Self> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(Error::InvalidRevisionRate(rate));
        }
        Ok(RevisionProtocol {
            kind: ProtocolKind::PairwiseProportionalImitation,
            rate,
        })
    }

    /// Rate equal to the payoff range, so the mean-field limit is the
    /// replicator field on the same clock. Falls back to rate 1 for a
    /// zero-range (constant) game, whose state never moves anyway.
    pub fn replicator_aligned(m: &PayoffMatrix) -> Self {
        let range = m.payoff_range();
        RevisionProtocol {
            kind: ProtocolKind::PairwiseProportionalImitation,
            rate: if range > 0.0 { range } else { 1.0 },
        }
    }
}

/// One revision event. Leagues with fewer than two teams have no imitation
/// partner and never change.
pub fn step<R: Rng + ?Sized>(
    state: &LeagueState,
    m: &PayoffMatrix,
    _protocol: &RevisionProtocol,
    rng: &mut R,
) -> LeagueState {
    let n = state.total();
    if n < 2 {
        return *state;
    }

    let own = if rng.gen_range(0..n) < state.n1 {
        Strategy::TwoPoint
    } else {
        Strategy::ThreePoint
    };
    // Partner drawn uniformly from the other N-1 teams.
    let other_pool = state.count(Strategy::TwoPoint) - u64::from(own == Strategy::TwoPoint);
    let other = if rng.gen_range(0..n - 1) < other_pool {
        Strategy::TwoPoint
    } else {
        Strategy::ThreePoint
    };
    if other == own {
        return *state;
    }

    let range = m.payoff_range();
    if range <= 0.0 {
        return *state;
    }
    // Payoffs against the full profile, revising team included.
    let x = state.empirical_state().expect("n >= 2");
    let diff = m.payoff_vs_population(other, &x) - m.payoff_vs_population(own, &x);
    let p = (diff / range).max(0.0);
    if rng.gen::<f64>() >= p {
        return *state;
    }
    match own {
        Strategy::TwoPoint => LeagueState::new(state.n1 - 1, state.n2 + 1),
        Strategy::ThreePoint => LeagueState::new(state.n1 + 1, state.n2 - 1),
    }
}

fn validate_run_inputs(protocol: &RevisionProtocol, horizon: f64) -> Result<()> {
    if !protocol.rate.is_finite() || protocol.rate <= 0.0 {
        return Err(Error::InvalidRevisionRate(protocol.rate));
    }
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    Ok(())
}

/// Event-driven run to `horizon`, invoking `on_event` after every revision
/// event (including no-change events). Deterministic for a given seed.
/// Returns the final (time, state).
pub fn run_with<F: FnMut(f64, &LeagueState)>(
    s0: &LeagueState,
    m: &PayoffMatrix,
    protocol: &RevisionProtocol,
    horizon: f64,
    seed: u64,
    mut on_event: F,
) -> Result<(f64, LeagueState)> {
    m.validate()?;
    validate_run_inputs(protocol, horizon)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = *s0;
    let mut t = 0.0;
    let n = s0.total();
    if n == 0 {
        return Ok((t, state));
    }
    let total_rate = protocol.rate * n as f64;
    let waiting = Exp::new(total_rate).expect("positive rate");

    loop {
        let dt = waiting.sample(&mut rng);
        if dt <= 0.0 {
            continue; // zero-length waits would stall the clock
        }
        if t + dt > horizon {
            return Ok((t, state));
        }
        t += dt;
        state = step(&state, m, protocol, &mut rng);
        on_event(t, &state);
    }
}

/// Full event record of one run, starting with (0, s0).
pub fn run(
    s0: &LeagueState,
    m: &PayoffMatrix,
    protocol: &RevisionProtocol,
    horizon: f64,
    seed: u64,
) -> Result<Vec<(f64, LeagueState)>> {
    let mut events = vec![(0.0, *s0)];
    run_with(s0, m, protocol, horizon, seed, |t, s| events.push((t, *s)))?;
    Ok(events)
}

/// States sampled at the given (sorted, within-horizon) checkpoint times
/// without storing the full event record: each checkpoint reports the state
/// left by the last event at or before it.
pub fn run_sampled(
    s0: &LeagueState,
    m: &PayoffMatrix,
    protocol: &RevisionProtocol,
    horizon: f64,
    seed: u64,
    checkpoints: &[f64],
) -> Result<Vec<(f64, LeagueState)>> {
    let mut samples: Vec<(f64, LeagueState)> = Vec::with_capacity(checkpoints.len());
    let mut next = 0usize;
    let mut last = *s0;
    run_with(s0, m, protocol, horizon, seed, |t, s| {
        while next < checkpoints.len() && checkpoints[next] < t {
            samples.push((checkpoints[next], last));
            next += 1;
        }
        last = *s;
    })?;
    while next < checkpoints.len() {
        samples.push((checkpoints[next], last));
        next += 1;
    }
    Ok(samples)
}

/// CSV export of an event record: header `t,n1,n2,x1`.
pub fn write_run_csv<W: Write>(events: &[(f64, LeagueState)], mut w: W) -> std::io::Result<()> {
    writeln!(w, "t,n1,n2,x1")?;
    for (t, s) in events {
        let x1 = if s.total() == 0 {
            0.0
        } else {
            s.n1 as f64 / s.total() as f64
        };
        writeln!(w, "{},{},{},{}", fmt_float(*t), s.n1, s.n2, fmt_float(x1))?;
    }
    Ok(())
}
