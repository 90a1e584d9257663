//! Edge weights and the two Laplacians built from a small image.

use rgtv::graph::{build_gamma_graph, build_weight_graph};
use rgtv::{Image, WeightParams};

fn main() -> rgtv::Result<()> {
    let img = Image::from_fn(4, 3, |x, _| if x < 2 { 0.2 } else { 0.8 });
    let p = WeightParams::default();

    let w = build_weight_graph(&img, p)?;
    println!("similarity weights, horizontal: {:.4?}", w.horizontal_weights());

    // across the edge the similarity collapses and so does the l1 weight
    let g = build_gamma_graph(&img, p)?;
    println!("gamma weights, horizontal: {:.4?}", g.horizontal_weights());
    println!("x^T L_gamma x = {:.4}", g.quadratic_form(img.as_slice()));
    Ok(())
}
