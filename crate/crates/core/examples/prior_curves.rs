//! Per-edge regularizer curves and the bimodal pull of the reweighted prior.

use rgtv::priors::{curve_argmax, descend_difference, difference_grid, pairwise_curve, PriorKind};

fn main() {
    let sigma = 0.1;
    for d in [0.0, 0.05, 0.1, 0.2, 0.5] {
        let row: Vec<String> = PriorKind::ALL
            .iter()
            .map(|&k| format!("{k}={:.4}", pairwise_curve(k, d, 1.0, sigma).0))
            .collect();
        println!("d={d:.2}  {}", row.join("  "));
    }
    let grid = difference_grid(10_001);
    println!("rgtv peaks at {:.4}", curve_argmax(PriorKind::Rgtv, &grid, 1.0, sigma));

    // small differences shrink, large ones grow
    for d in [0.03, 0.15] {
        let next = descend_difference(PriorKind::Rgtv, d, 1e-2, 1.0, sigma);
        println!("gradient step: {d} -> {next:.5}");
    }
}
