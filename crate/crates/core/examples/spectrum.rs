//! Tabulates the temperature function, its Legendre spectrum and the
//! parameters theta_r of the balanced-rows carpet.

use carpet_quant::dims::{solve_tr, spectrum};
use carpet_quant::reference::balanced_rows_example;

fn main() -> carpet_quant::Result<()> {
    let carpet = balanced_rows_example();
    let grid: Vec<f64> = (0..=20).map(|i| -1.0 + 0.2 * i as f64).collect();
    let r_list = [0.5, 1.0, 2.0, 4.0];
    let table = spectrum(&carpet, &grid, &r_list)?;
    println!("{:>6} {:>12} {:>10} {:>10}", "t", "T(t)", "alpha", "f(alpha)");
    for row in &table.rows {
        println!("{:>6.2} {:>12.6} {:>10.6} {:>10.6}", row.t, row.temperature, row.alpha, row.f);
    }
    println!("minimum second difference of T: {:.3e}", table.min_second_difference());
    println!("{:>5} {:>10} {:>16} {:>10}", "r", "theta_r", "T/(1-theta)", "t_r");
    for th in &table.theta {
        println!("{:>5} {:>10.6} {:>16.12} {:>10.6}", th.r, th.theta, th.ratio, solve_tr(&carpet, th.r)?);
    }
    Ok(())
}
