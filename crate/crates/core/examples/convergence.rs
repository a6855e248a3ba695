//! Follows the antichain exponents t_(j,r) and t_j towards s_r and s0 as the
//! threshold parameter j grows, together with the level-wise exponents s_(k,0).

use carpet_quant::dims::{s0, solve_sr};
use carpet_quant::reference::balanced_rows_example;
use carpet_quant::symbolic::{
    antichain_entropy_ratio, antichain_exponent, build_antichain, mean_exponent_sk0, AntichainKind, BuildOptions,
};

fn main() -> carpet_quant::Result<()> {
    let carpet = balanced_rows_example();
    let opts = BuildOptions::default();
    for r in [0.5, 1.0, 2.0] {
        let sr = solve_sr(&carpet, r)?;
        println!("r = {r}: s_r = {sr:.6}");
        for j in [1e1, 1e2, 1e3, 1e4] {
            let a = build_antichain(&carpet, AntichainKind::GammaJR { j, r }, opts)?;
            let t = antichain_exponent(&a)?.t;
            println!("  j = {j:>7}: N = {:>6}  t_jr = {t:.6}  gap = {:.2e}", a.stats.cardinality, (t - sr).abs());
        }
    }
    let target = s0(&carpet);
    println!("r = 0: s0 = {target:.6}");
    for j in [1e1, 1e2, 1e3, 1e4] {
        let a = build_antichain(&carpet, AntichainKind::Lambda0J { j }, opts)?;
        let t = antichain_entropy_ratio(&a)?;
        println!("  j = {j:>7}: psi = {:>9}  t_j = {t:.6}  gap = {:.2e}", a.stats.cardinality, (t - target).abs());
    }
    for k in [1, 2, 4, 8, 16, 32] {
        println!("  s_(k,0) at k = {k:>2}: {:.6}", mean_exponent_sk0(&carpet, k));
    }
    Ok(())
}
