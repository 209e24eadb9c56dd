//! Evolutionary dynamics of symmetric two-strategy games.
//!
//! The model is a league of teams that each favor one of two offensive
//! strategies (predominantly two-point vs. predominantly three-point play).
//! Strategy shares evolve under replicator dynamics: a strategy's share grows
//! in proportion to its payoff advantage over the league average. Because the
//! shares sum to one, the dynamics reduce to a single cubic ODE on [0, 1].
//!
//! The crate answers, for an arbitrary payoff matrix (α, β, γ, δ):
//!
//! - [`game`] — payoff evaluation and the replicator vector field,
//! - [`local`] — every rest point, its local stability, and the bifurcation
//!   loci β = δ and γ = α where that structure changes,
//! - [`global`] — monotone (Lyapunov-style) certificates for global stability,
//!   the resulting verdict, and symmetric Nash equilibria derived both from
//!   stability and from a direct best-response check,
//! - [`flow`] — adaptive Runge-Kutta integration of the reduced ODE, ω-limit
//!   estimation, and basin-of-attraction sweeps, used throughout as the
//!   numerical cross-check on the closed-form analysis,
//! - [`league`] — a finite-population imitation simulator whose mean-field
//!   limit is the same replicator equation,
//! - [`cli`] — configuration, report assembly, and the file formats behind
//!   the `replicator-lab` binary.
//!
//! ```
//! use replicator_lab::game::{PayoffMatrix, Tolerance};
//! use replicator_lab::{global, local};
//!
//! let m = PayoffMatrix::new(1.0, 3.0, 2.0, 1.0).unwrap();
//! let tol = Tolerance::default();
//!
//! // Interior rest point at 2/3, attracting from both sides.
//! let points = local::fixed_points(&m, &tol);
//! assert_eq!(points.len(), 3);
//! assert!((points[1].location - 2.0 / 3.0).abs() < 1e-12);
//!
//! let report = global::global_verdict(&m, &tol);
//! assert_eq!(report.verdict, global::Verdict::InteriorAttractor);
//! ```

pub mod cli;
pub mod flow;
pub mod game;
pub mod global;
pub mod league;
pub mod local;

use thiserror::Error;

/// Errors produced by construction, validation, and analysis entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error("payoff entries must be finite, got ({0}, {1}, {2}, {3})")]
    NonFinitePayoff(f64, f64, f64, f64),
    #[error("proportion {0} outside [0, 1]")]
    InvalidProportion(f64),
    #[error("components must sum to 1 (got sum {0}); deviations up to 1e-9 are renormalized")]
    SimplexViolation(f64),
    #[error("tolerance must be finite and non-negative, got {0}")]
    InvalidTolerance(f64),
    #[error("{0}")]
    InvalidInput(String),
    #[error("unknown payoff parameter `{0}` (expected alpha, beta, gamma or delta)")]
    UnknownParameter(String),
    #[error("sweep range must satisfy lo < hi, got [{0}, {1}]")]
    InvalidSweepRange(f64, f64),
    #[error(
        "fixed point at {location} does not belong to this game (field residual {residual:e})"
    )]
    ForeignFixedPoint { location: f64, residual: f64 },
    #[error("league has no teams")]
    EmptyLeague,
    #[error("revision rate must be finite and positive, got {0}")]
    InvalidRevisionRate(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
