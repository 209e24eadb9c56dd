//! Trace the interior branch while one payoff entry varies and locate the
//! stability-changing crossing in closed form.
//!
//! ```bash
//! cargo run --example bifurcation_sweep
//! ```

use replicator_lab::game::{Param, PayoffMatrix, Tolerance};
use replicator_lab::local::{
    bifurcation_scan, classification_from_sign, interior_branch_root, linearize_at,
};

fn main() {
    let tol = Tolerance::default();
    let base = PayoffMatrix::new(1.0, 3.0, 2.0, 1.0).expect("finite payoffs");
    let (lo, hi, steps) = (0.0, 3.0, 13);

    println!("branch of the interior rest point while gamma varies on [{lo}, {hi}]:");
    for i in 0..steps {
        let value = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let m = base.with_param(Param::Gamma, value);
        match interior_branch_root(&m, &tol) {
            Some(root) => {
                let class = classification_from_sign(tol.sign(linearize_at(&m, root)));
                let note = if (0.0..=1.0).contains(&root) {
                    ""
                } else {
                    " (outside the simplex)"
                };
                println!("  gamma = {value:<6} branch at {root:<22} {class}{note}");
            }
            None => println!("  gamma = {value:<6} branch absent"),
        }
    }

    for locus in bifurcation_scan(&base, Param::Gamma, lo, hi, 100, &tol).expect("valid range") {
        let (before, after) = locus.side_classifications;
        println!(
            "\ncrossing of {:?} at gamma = {} exactly: {before} -> {after}",
            locus.kind, locus.crossing_parameter
        );
    }
}
