//! Prints the best ratio found by the default search for a few dimensions and budgets.

use lp_extremal::{minimize_ratio, Seeds};

fn main() {
    for n in [2u64, 3, 4, 6] {
        for budget in [10_000u64, 100_000] {
            let gaps: Vec<f64> =
                (0..16u64).map(|seed| minimize_ratio(n, budget, &Seeds::Auto, seed).unwrap().gap).collect();
            let worst = gaps.iter().cloned().fold(0.0, f64::max);
            let best = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
            println!("n={n} budget={budget} gap min={best:.2e} max={worst:.2e}");
        }
    }
}
