//! Samples the self-affine measure by random iteration and compares the
//! empirical quantization error of the samples with the one computed on the
//! deterministic level discretization.

use carpet_quant::quantizer::{discretize, lloyd, LloydParams, WeightedCloud};
use carpet_quant::reference::balanced_rows_example;

fn main() -> carpet_quant::Result<()> {
    let carpet = balanced_rows_example();
    let points = carpet.chaos_sample(7, 10, 100)?;
    println!("first samples:");
    for p in &points {
        println!("  ({:.6}, {:.6})", p.x, p.y);
    }
    let samples = WeightedCloud::from_samples(&carpet, 7, 20_000, 100)?;
    let level = discretize(&carpet, 6)?;
    let params = LloydParams { restarts: 4, ..LloydParams::default() };
    println!("{:>4} {:>12} {:>12}", "k", "samples", "level 6");
    for k in [1, 2, 4, 8, 16] {
        let a = lloyd(&samples, k, 2.0, &params)?.error;
        let b = lloyd(&level, k, 2.0, &params)?.error;
        println!("{k:>4} {a:>12.6} {b:>12.6}");
    }
    Ok(())
}
