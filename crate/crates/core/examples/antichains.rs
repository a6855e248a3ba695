//! Builds the antichains of the balanced-rows carpet and prints their
//! statistics, exponents and cardinality sandwiches.

use std::time::Instant;

use carpet_quant::reference::balanced_rows_example;
use carpet_quant::symbolic::{
    antichain_entropy_ratio, antichain_exponent, build_antichain, AntichainKind, BuildOptions,
};

fn main() -> carpet_quant::Result<()> {
    let carpet = balanced_rows_example();
    let d = carpet.derived();
    let r = 1.0;
    println!("Gamma_(j,r), r = {r}: eta_r = {:.6e}", d.eta_lower(r));
    println!("{:>8} {:>10} {:>6} {:>6} {:>12} {:>10} {:>8}", "j", "N", "l1", "l2", "sum mu", "t_jr", "secs");
    for j in [1e2, 1e3, 1e4] {
        let start = Instant::now();
        let a = build_antichain(&carpet, AntichainKind::GammaJR { j, r }, BuildOptions::default())?;
        let e = antichain_exponent(&a)?;
        let s = &a.stats;
        println!(
            "{j:>8} {:>10} {:>6} {:>6} {:>12.9} {:>10.6} {:>8.2}",
            s.cardinality,
            s.min_depth,
            s.max_depth,
            s.sum_weight,
            e.t,
            start.elapsed().as_secs_f64()
        );
    }

    println!("\nLambda_j: eta_0 = {:.6e}", d.eta0);
    println!("{:>8} {:>10} {:>6} {:>6} {:>10} {:>8}", "j", "psi", "k1", "k2", "t_j", "secs");
    for j in [1e1, 1e2, 1e3, 1e4] {
        let start = Instant::now();
        let a = build_antichain(&carpet, AntichainKind::Lambda0J { j }, BuildOptions::default())?;
        let s = &a.stats;
        println!(
            "{j:>8} {:>10} {:>6} {:>6} {:>10.6} {:>8.2}",
            s.cardinality,
            s.min_depth,
            s.max_depth,
            antichain_entropy_ratio(&a)?,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
