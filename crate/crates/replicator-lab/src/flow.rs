//! Numerical flow of the reduced dynamics.
//!
//! An embedded Dormand-Prince 4(5) pair integrates the scalar cubic field
//! with adaptive steps (maximum 0.1, minimum 1e-12). States are clamped to
//! [0, 1] after every accepted step; the segment is invariant for the exact
//! flow, so clamping only absorbs roundoff. A run stops early (`Converged`)
//! once the field is small (`|f| < tol * 1e-3`) *and* the state sits within
//! `tol` of a known rest point — the combined test avoids declaring
//! convergence during the slow crawl past a non-hyperbolic point.
//!
//! This module is the numerical cross-check for the closed-form analysis:
//! ω-limit estimation and basin sweeps are built on the same integrator.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::game::{replicator_field_reduced, PayoffMatrix, Tolerance};
use crate::local::{fixed_points, nearest_fixed_point, FixedPoint};
use crate::{Error, Result};

const MAX_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-12;

/// Why a trajectory stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalReason {
    Converged,
    HorizonReached,
    StepFailure,
}

impl fmt::Display for TerminalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TerminalReason::Converged => "Converged",
            TerminalReason::HorizonReached => "HorizonReached",
            TerminalReason::StepFailure => "StepFailure",
        };
        write!(f, "{s}")
    }
}

/// Time-stamped sequence of population shares along one orbit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    /// Sample times, strictly increasing, starting at 0.
    pub times: Vec<f64>,
    /// Two-point share at each sample, clamped to [0, 1].
    pub states: Vec<f64>,
    pub terminal_reason: TerminalReason,
    /// Largest distance any accepted step landed outside [0, 1] before
    /// clamping; stays at roundoff scale.
    pub max_overshoot: f64,
}

impl Trajectory {
    pub fn last_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory has at least one sample")
    }

    pub fn last_state(&self) -> f64 {
        *self
            .states
            .last()
            .expect("trajectory has at least one sample")
    }

    /// CSV export: header `t,x1,x2`, one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x1,x2")?;
        for (t, x) in self.times.iter().zip(&self.states) {
            writeln!(
                w,
                "{},{},{}",
                fmt_float(*t),
                fmt_float(*x),
                fmt_float(1.0 - *x)
            )?;
        }
        Ok(())
    }
}

/// Estimated long-run destination of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Limit {
    /// All teams end up favoring three-point offense (x1 = 0).
    Zero,
    /// All teams end up favoring two-point offense (x1 = 1).
    One,
    /// An interior share.
    Interior(f64),
    Undetermined,
}

impl Limit {
    fn from_value(v: f64) -> Limit {
        if v <= 1e-6 {
            Limit::Zero
        } else if v >= 1.0 - 1e-6 {
            Limit::One
        } else {
            Limit::Interior(v)
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Limit::Zero => Some(0.0),
            Limit::One => Some(1.0),
            Limit::Interior(v) => Some(*v),
            Limit::Undetermined => None,
        }
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Zero => write!(f, "0"),
            Limit::One => write!(f, "1"),
            Limit::Interior(v) => write!(f, "{}", fmt_float(*v)),
            Limit::Undetermined => write!(f, "undetermined"),
        }
    }
}

/// Initial shares mapped to their estimated limits over a uniform grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasinMap {
    pub grid: Vec<f64>,
    pub limits: Vec<Limit>,
}

impl BasinMap {
    /// CSV export: header `x0,limit`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "x0,limit")?;
        for (x0, limit) in self.grid.iter().zip(&self.limits) {
            writeln!(w, "{},{}", fmt_float(*x0), limit)?;
        }
        Ok(())
    }
}

/// 17-significant-digit float formatting shared by every CSV/JSON writer.
pub(crate) fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

// Dormand-Prince 4(5) coefficients.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;

/// One trial step: returns the 5th-order state and the embedded error estimate.
fn dopri_step<F: Fn(f64) -> f64>(f: &F, y: f64, h: f64) -> (f64, f64) {
    let k1 = f(y);
    let k2 = f(y + h * (A21 * k1));
    let k3 = f(y + h * (A31 * k1 + A32 * k2));
    let k4 = f(y + h * (A41 * k1 + A42 * k2 + A43 * k3));
    let k5 = f(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    let k6 = f(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    let y5 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    let k7 = f(y5);
    let y4 = y + h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    (y5, (y5 - y4).abs())
}

/// Integrate the reduced field from `x0` up to `horizon`.
///
/// `tol` controls both the local error target per step and the convergence
/// declaration (see module docs). Step-controller underflow is reported as
/// `TerminalReason::StepFailure`, not as an error.
pub fn integrate(m: &PayoffMatrix, x0: f64, horizon: f64, tol: f64) -> Result<Trajectory> {
    m.validate()?;
    if !(0.0..=1.0).contains(&x0) || !x0.is_finite() {
        return Err(Error::InvalidProportion(x0));
    }
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidTolerance(tol));
    }

    let points = fixed_points(m, &Tolerance::default());
    integrate_with_points(m, &points, x0, horizon, tol)
}

pub(crate) fn integrate_with_points(
    m: &PayoffMatrix,
    points: &[FixedPoint],
    x0: f64,
    horizon: f64,
    tol: f64,
) -> Result<Trajectory> {
    let f = |x: f64| replicator_field_reduced(m, x);

    let converged = |x: f64| -> bool {
        let (_, dist) = nearest_fixed_point(points, x);
        f(x).abs() < tol * 1e-3 && dist < tol
    };

    let mut t = 0.0;
    let mut y = x0;
    let mut times = vec![0.0];
    let mut states = vec![x0];
    let mut max_overshoot: f64 = 0.0;
    let mut h = MAX_STEP.min(horizon);

    if converged(y) {
        return Ok(Trajectory {
            times,
            states,
            terminal_reason: TerminalReason::Converged,
            max_overshoot,
        });
    }

    let reason = loop {
        if t >= horizon {
            break TerminalReason::HorizonReached;
        }
        h = h.min(horizon - t).min(MAX_STEP);

        let (y_new, err) = dopri_step(&f, y, h);
        let scale = tol * (1.0 + y.abs().max(y_new.abs()));
        if err <= scale {
            t += h;
            let overshoot = (y_new - 1.0).max(-y_new).max(0.0);
            max_overshoot = max_overshoot.max(overshoot);
            y = y_new.clamp(0.0, 1.0);
            times.push(t);
            states.push(y);
            if converged(y) {
                break TerminalReason::Converged;
            }
            // Standard controller with order-5 exponent, growth capped at 5x.
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).clamp(MIN_STEP, MAX_STEP);
        } else {
            if h <= MIN_STEP {
                break TerminalReason::StepFailure;
            }
            let factor = (0.9 * (scale / err).powf(0.2)).clamp(0.1, 0.9);
            h = (h * factor).max(MIN_STEP);
        }
    };

    Ok(Trajectory {
        times,
        states,
        terminal_reason: reason,
        max_overshoot,
    })
}

/// Terminal states closer than this to a rest point are identified with it
/// when estimating ω-limits; non-hyperbolic approaches stall at ~1e-3 of the
/// boundary within the escalation horizons, so the resolution must sit above
/// that scale.
const SNAP_TOL: f64 = 1e-2;

fn snapped_estimate(points: &[FixedPoint], traj: &Trajectory) -> f64 {
    let terminal = traj.last_state();
    let (loc, dist) = nearest_fixed_point(points, terminal);
    if traj.terminal_reason == TerminalReason::Converged || dist <= SNAP_TOL {
        loc
    } else {
        terminal
    }
}

/// Single-horizon probe: the rest point an orbit has settled at by `horizon`,
/// or `None` while it is still in transit.
pub(crate) fn probe_limit(
    m: &PayoffMatrix,
    points: &[FixedPoint],
    x0: f64,
    horizon: f64,
) -> Option<f64> {
    let traj = integrate_with_points(m, points, x0, horizon, 1e-9).ok()?;
    let terminal = traj.last_state();
    let (loc, dist) = nearest_fixed_point(points, terminal);
    if traj.terminal_reason == TerminalReason::Converged || dist <= SNAP_TOL {
        Some(loc)
    } else {
        None
    }
}

/// Estimate the ω-limit of the orbit through `x0` by integrating over
/// escalating horizons (1e2, 1e3, 1e4) and accepting the first two
/// consecutive estimates that agree within 1e-6.
pub fn omega_limit_estimate(m: &PayoffMatrix, x0: f64) -> Result<Limit> {
    let points = fixed_points(m, &Tolerance::default());
    let mut previous: Option<f64> = None;
    for horizon in [1e2, 1e3, 1e4] {
        let traj = integrate_with_points(m, &points, x0, horizon, 1e-9)?;
        let estimate = snapped_estimate(&points, &traj);
        if let Some(prev) = previous {
            if (estimate - prev).abs() <= 1e-6 {
                return Ok(Limit::from_value(estimate));
            }
        }
        previous = Some(estimate);
    }
    Ok(Limit::Undetermined)
}

/// ω-limit estimates over a uniform grid of `grid_size` initial shares.
///
/// Grid points run in parallel; the map is assembled by index, so the output
/// is deterministic. For a scalar field the resulting partition is always a
/// union of intervals.
pub fn basin_sweep(m: &PayoffMatrix, grid_size: usize) -> Result<BasinMap> {
    m.validate()?;
    if grid_size < 2 {
        return Err(Error::InvalidInput(format!(
            "basin sweep needs at least 2 grid points, got {grid_size}"
        )));
    }
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| i as f64 / (grid_size - 1) as f64)
        .collect();
    let limits = grid
        .par_iter()
        .map(|x0| omega_limit_estimate(m, *x0))
        .collect::<Result<Vec<_>>>()?;
    Ok(BasinMap { grid, limits })
}
