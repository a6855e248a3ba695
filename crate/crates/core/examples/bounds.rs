//! Compares antichain-based upper bounds with Lloyd-refined codebooks of the
//! same size on the balanced-rows carpet.
//!
//! The bound places one centre per approximate square of the antichain.
//! Lloyd starts from exactly that codebook on a refined cloud, so its error
//! can only go down.

use std::time::Instant;

use carpet_quant::quantizer::{
    antichain_cloud, antichain_codebook, antichain_upper_bound, codebook_error, geometric_bound, lloyd_from,
    LloydParams,
};
use carpet_quant::reference::balanced_rows_example;
use carpet_quant::symbolic::{AntichainKind, DEFAULT_NODE_BUDGET};

fn main() -> carpet_quant::Result<()> {
    let carpet = balanced_rows_example();
    let params = LloydParams { max_iter: 5, ..LloydParams::default() };
    let budget = DEFAULT_NODE_BUDGET;
    for j in [1e2, 1e3] {
        let start = Instant::now();
        let b = antichain_upper_bound(&carpet, 1.0, j, budget)?;
        let kind = AntichainKind::GammaJR { j, r: 1.0 };
        let cloud = antichain_cloud(&carpet, kind, 2, budget)?;
        let codebook = antichain_codebook(&carpet, kind, budget)?;
        let initial = codebook_error(&cloud, 1.0, &codebook)?;
        let refined = lloyd_from(&cloud, codebook, 1.0, &params)?;
        println!(
            "r=1 j={j:>6} N={:>6} atoms={:>8} bound={:.6e} centres={initial:.6e} lloyd={:.6e} ({:.1}s)",
            b.count,
            cloud.len(),
            b.bound,
            refined.error,
            start.elapsed().as_secs_f64()
        );
    }
    // The log-error case at j = 100 only; larger j takes tens of seconds.
    let j = 1e2;
    let start = Instant::now();
    let g = geometric_bound(&carpet, j, budget)?;
    let kind = AntichainKind::Lambda0J { j };
    let cloud = antichain_cloud(&carpet, kind, 0, budget)?;
    let codebook = antichain_codebook(&carpet, kind, budget)?;
    let refined = lloyd_from(&cloud, codebook, 0.0, &LloydParams { max_iter: 2, ..params })?;
    println!(
        "r=0 j={j:>6} psi={:>6} bound={:.6} lloyd log error={:.6} ({:.1}s)",
        g.count,
        g.bound,
        refined.objective,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
