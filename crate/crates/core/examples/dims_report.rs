//! Prints the dimension report (s0, s_r, t_r and the row conditions) for a
//! few reference carpets.
//!
//! Run with `cargo run --example dims_report`.

use carpet_quant::dims::condition_report;
use carpet_quant::reference::{balanced_rows_example, full_grid, two_map, unequal_rows};

fn main() -> carpet_quant::Result<()> {
    let carpets = [
        ("two-map", two_map()),
        ("full 3x2 grid", full_grid(3, 2)),
        ("balanced rows", balanced_rows_example()),
        ("unequal rows", unequal_rows()),
    ];
    for (name, carpet) in &carpets {
        println!("{name} (n = {}, m = {}, theta = {:.6})", carpet.n(), carpet.m(), carpet.theta());
        println!(
            "  {:>4} {:>10} {:>10} {:>10} {:>8} {:>6} {:>6} {:>6}",
            "r", "s0", "s_r", "t_r", "kappa", "A", "B", "C"
        );
        for r in [0.0, 0.5, 1.0, 2.0] {
            let rep = condition_report(carpet, r)?;
            let a = rep.condition_a.as_ref().map_or("na".to_string(), |a| a.equal.to_string());
            println!(
                "  {r:>4} {:>10.6} {:>10.6} {:>10.6} {:>8.5} {a:>6} {:>6} {:>6}",
                rep.s0, rep.sr, rep.tr, rep.kappa, rep.condition_b.equal, rep.condition_c.equal
            );
        }
    }
    Ok(())
}
