//! Basin-of-attraction sweep for a bistable game: initial shares below the
//! interior repeller at 2/3 flow to all-three-point, shares above it to
//! all-two-point.
//!
//! ```bash
//! cargo run --example basin_map
//! ```

use std::io;

use replicator_lab::flow::basin_sweep;
use replicator_lab::game::PayoffMatrix;

fn main() {
    let m = PayoffMatrix::new(2.0, 1.0, 1.0, 3.0).expect("finite payoffs");
    let map = basin_sweep(&m, 21).expect("valid grid");
    map.write_csv(io::stdout().lock()).expect("stdout writable");
}
