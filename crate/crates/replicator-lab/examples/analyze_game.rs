//! Full analysis of one game, printed as the same JSON report the
//! `replicator-lab analyze` subcommand emits.
//!
//! ```bash
//! cargo run --example analyze_game
//! ```

use replicator_lab::cli::to_json_pretty_17;
use replicator_lab::game::{PayoffMatrix, Tolerance};
use replicator_lab::global::global_verdict;

fn main() {
    // Mixed incentives: against a two-point opponent the three-point style
    // pays more (gamma > alpha), against a three-point opponent the two-point
    // style pays more (beta > delta). The league settles at a 2/3 : 1/3 mix.
    let m = PayoffMatrix::new(1.0, 3.0, 2.0, 1.0).expect("finite payoffs");
    let report = global_verdict(&m, &Tolerance::default());
    print!("{}", to_json_pretty_17(&report).expect("report serializes"));
}
