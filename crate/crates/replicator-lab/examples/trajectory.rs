//! Integrate the share dynamics from one initial condition and stream the
//! trajectory as CSV to stdout (same format as `replicator-lab integrate`).
//!
//! ```bash
//! cargo run --example trajectory > trajectory.csv
//! ```

use std::io;

use replicator_lab::flow::integrate;
use replicator_lab::game::PayoffMatrix;

fn main() {
    let m = PayoffMatrix::new(1.0, 3.0, 2.0, 1.0).expect("finite payoffs");
    let traj = integrate(&m, 0.1, 1e3, 1e-9).expect("valid inputs");
    traj.write_csv(io::stdout().lock())
        .expect("stdout writable");
    eprintln!(
        "terminal t={} x1={} reason={}",
        traj.last_time(),
        traj.last_state(),
        traj.terminal_reason
    );
}
