//! Empirical quantization dimension: error curves of order 2 for the
//! two-map carpet (dimension 1) and the full 3x2 grid (dimension 2).

use std::time::Instant;

use carpet_quant::dims::solve_sr;
use carpet_quant::quantizer::{error_curve, LloydParams};
use carpet_quant::reference::{full_grid, two_map};

fn main() -> carpet_quant::Result<()> {
    let r = 2.0;
    let k_list = [2, 4, 8, 16, 32, 64];
    let params = LloydParams { seed: 2024, restarts: 8, ..LloydParams::default() };
    for (name, carpet) in [("two-map", two_map()), ("full 3x2 grid", full_grid(3, 2))] {
        let s = solve_sr(&carpet, r)?;
        let start = Instant::now();
        let curve = error_curve(&carpet, r, &k_list, 8, s, &params)?;
        println!("{name}: s_r = {s:.6}, depth 8, {:.2}s", start.elapsed().as_secs_f64());
        println!("{:>4} {:>14} {:>14}", "k", "e_k", "k^(1/s) e_k");
        for row in &curve.rows {
            println!("{:>4} {:>14.6e} {:>14.6}", row.k, row.error, row.coefficient);
        }
        println!(
            "slope = {:.4} (residual {:.2e}), coefficient max/min = {:.3}\n",
            curve.slope,
            curve.slope_residual,
            curve.coefficient_ratio()
        );
    }
    Ok(())
}
