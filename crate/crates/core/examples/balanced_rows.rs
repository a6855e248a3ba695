//! Reproduces the nine-by-three example whose two rows have the same
//! constant at r = 1, so that s_1 = t_1 = 1 although the row marginals are
//! not uniform in the digits.

use carpet_quant::dims::{condition_report, solve_sr, solve_tr};
use carpet_quant::reference::{balanced_rows_example, balanced_rows_weights};

fn main() -> carpet_quant::Result<()> {
    let (x1, x2) = balanced_rows_weights();
    // Closed forms of the two roots: ab = 1/16 resp. 1/32 with a + b = sqrt(2)/2.
    let c1 = (3.0 - 2.0 * 2f64.sqrt()) / 16.0;
    let c2 = (7.0 - 4.0 * 3f64.sqrt()) / 32.0;
    println!("x1 = {x1:.17} (closed form {c1:.17})");
    println!("x2 = {x2:.17} (closed form {c2:.17})");
    let carpet = balanced_rows_example();
    let psum: f64 = carpet.digits().iter().map(|d| d.p).sum();
    println!("sum of p = {psum:?}");
    println!("s_1 = {:.15}, t_1 = {:.15}", solve_sr(&carpet, 1.0)?, solve_tr(&carpet, 1.0)?);
    let rep = condition_report(&carpet, 1.0)?;
    let a = rep.condition_a.expect("r > 0");
    println!("row constants C_(j,1) = {:?}, equal = {}", a.values, a.equal);
    println!("row marginals q_j = {:?}", rep.condition_c.values);
    println!("s0 = {:.15}", rep.s0);
    Ok(())
}
