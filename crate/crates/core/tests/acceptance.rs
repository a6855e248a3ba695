//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report is always printed; the
//! process exits nonzero when any criterion fails.

use std::path::PathBuf;
use std::time::Instant;

use carpet_quant::carpet::{Carpet, CarpetSpec};
use carpet_quant::cli::{cmd_quantize, QuantizeArgs};
use carpet_quant::dims::{
    condition_report, s0, solve_sr, solve_sr_detail, solve_theta_r, solve_tr, spectrum, temperature,
};
use carpet_quant::quantizer::{
    antichain_cloud, antichain_codebook, antichain_upper_bound, brute_force_error, discretize, error_curve,
    geometric_bound, lloyd, lloyd_from, LloydParams,
};
use carpet_quant::reference::{balanced_rows_weights, full_grid, random_carpet, two_map};
use carpet_quant::symbolic::{
    antichain_entropy_ratio, antichain_exponent, build_antichain, AntichainKind, BuildOptions,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn config(name: &str) -> Carpet {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name);
    let text = std::fs::read_to_string(&path).expect("bundled config");
    Carpet::from_json_str(&text).expect("valid bundled config")
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within_runtime(start: Instant, limit: f64) -> Result<f64, String> {
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < limit, format!("runtime {secs:.2}s exceeds {limit}s"))?;
    Ok(secs)
}

fn c1_balanced_rows() -> Outcome {
    let start = Instant::now();
    let c = config("paper_example.json");
    let sr = solve_sr(&c, 1.0).map_err(fail)?;
    let tr = solve_tr(&c, 1.0).map_err(fail)?;
    ensure((sr - 1.0).abs() < 1e-9 && (tr - 1.0).abs() < 1e-9, format!("s_1 = {sr}, t_1 = {tr}"))?;
    let rep = condition_report(&c, 1.0).map_err(fail)?;
    let a = rep.condition_a.ok_or("condition A missing")?;
    ensure(a.values.len() == 2 && a.values.iter().all(|v| (v - 1.5).abs() < 1e-10), format!("C = {:?}", a.values))?;
    ensure(c.q(0) == 0.5 && c.q(2) == 0.5, format!("q = {}, {}", c.q(0), c.q(2)))?;
    let secs = within_runtime(start, 1.0)?;
    Ok(format!("s_1 = {sr:.15}, t_1 = {tr:.15}, C = {:?} ({secs:.3}s)", a.values))
}

fn c2_derived_weights() -> Outcome {
    let (x1, x2) = balanced_rows_weights();
    // Smaller root of z^2 - (sqrt2/2) z + ab, squared; written without cancellation.
    let o1 = 1.0 / (16.0 * (3.0 + 2.0 * 2f64.sqrt()));
    let o2 = 1.0 / (32.0 * (7.0 + 4.0 * 3f64.sqrt()));
    ensure((x1 - o1).abs() < 1e-12 && (x2 - o2).abs() < 1e-12, format!("x1 = {x1}, x2 = {x2}"))?;
    let c = config("paper_example.json");
    let sum = c.digits().iter().fold(0.0, |acc, d| acc + d.p);
    ensure(sum == 1.0, format!("p sums to {sum:?}"))?;
    // The same from unnormalized weights.
    let raw: Vec<(u32, u32, f64)> = c.digits().iter().map(|d| (d.i, d.j, d.p * (1.0 + 1e-13))).collect();
    let c2 = Carpet::new(CarpetSpec::from_triples(9, 3, &raw)).map_err(fail)?;
    let sum2 = c2.digits().iter().fold(0.0, |acc, d| acc + d.p);
    ensure(sum2 == 1.0, format!("renormalized p sums to {sum2:?}"))?;
    Ok(format!("|x1 - oracle| = {:.1e}, |x2 - oracle| = {:.1e}", (x1 - o1).abs(), (x2 - o2).abs()))
}

fn c3_full_grid() -> Outcome {
    let c = full_grid(3, 2);
    ensure((s0(&c) - 2.0).abs() < 1e-10, format!("s0 = {}", s0(&c)))?;
    for r in [0.5, 1.0, 2.0] {
        let sr = solve_sr(&c, r).map_err(fail)?;
        let tr = solve_tr(&c, r).map_err(fail)?;
        ensure((sr - 2.0).abs() < 1e-10 && (tr - 2.0).abs() < 1e-10, format!("r = {r}: s_r = {sr}, t_r = {tr}"))?;
        let th = solve_theta_r(&c, r).map_err(fail)?;
        ensure((th - 2.0 / (2.0 + r)).abs() < 1e-10, format!("theta_{r} = {th}"))?;
    }
    let dev = (0..=100)
        .map(|i| -2.0 + 0.05 * i as f64)
        .map(|t| (temperature(&c, t) - 2.0 * (1.0 - t)).abs())
        .fold(0.0, f64::max);
    ensure(dev < 1e-10, format!("max |T - 2(1-t)| = {dev:e}"))?;
    Ok(format!("max |T - 2(1-t)| = {dev:.1e}"))
}

fn c4_identity_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let grid: Vec<f64> = (0..=100).map(|i| -2.0 + 0.05 * i as f64).collect();
    let (mut worst_eq, mut worst_theta) = (0.0f64, 0.0f64);
    for idx in 0..100 {
        let c = random_carpet(&mut rng);
        let t1 = temperature(&c, 1.0);
        ensure(t1.abs() < 1e-12, format!("carpet {idx}: T(1) = {t1:e}"))?;
        let table = spectrum(&c, &grid, &[]).map_err(fail)?;
        let scale = table.rows.iter().map(|row| row.temperature.abs()).fold(1.0, f64::max);
        let min2 = table.min_second_difference();
        ensure(min2 >= -1e-12 * scale, format!("carpet {idx}: second difference {min2:e}"))?;
        for r in [0.25, 1.0, 4.0] {
            let s = solve_sr_detail(&c, r).map_err(fail)?;
            let eq = s.residual.exp() - 1.0;
            worst_eq = worst_eq.max(eq.abs());
            ensure(eq.abs() < 1e-12, format!("carpet {idx}, r = {r}: equation residual {eq:e}"))?;
            let t = solve_tr(&c, r).map_err(fail)?;
            ensure(t <= s.value + 1e-12, format!("carpet {idx}, r = {r}: t_r = {t} > s_r = {}", s.value))?;
            let th = solve_theta_r(&c, r).map_err(fail)?;
            let gap = (temperature(&c, th) / (1.0 - th) - t).abs();
            worst_theta = worst_theta.max(gap);
            ensure(gap < 1e-9, format!("carpet {idx}, r = {r}: theta identity off by {gap:e}"))?;
        }
    }
    let secs = within_runtime(start, 30.0)?;
    Ok(format!("100 carpets, worst residual {worst_eq:.1e}, worst theta gap {worst_theta:.1e} ({secs:.2}s)"))
}

fn c5_sandwiches() -> Outcome {
    let start = Instant::now();
    let c = config("paper_example.json");
    let d = c.derived();
    let r = 1.0;
    let eta = d.eta_lower(r);
    let eta_bar = d.eta_upper(r);
    let opts = BuildOptions::default();
    let mut report = Vec::new();
    for j in [1e2, 1e3, 1e4] {
        let a = build_antichain(&c, AntichainKind::GammaJR { j, r }, opts).map_err(fail)?;
        let u = antichain_exponent(&a).map_err(fail)?.u;
        let n = a.stats.cardinality as f64;
        let lo = (j / eta).powf(u);
        let hi = (j / (eta * eta)).powf(u);
        let ulp = 1.0 + f64::EPSILON;
        ensure(lo <= n * ulp && n <= hi * ulp, format!("j = {j}: {lo} <= N = {n} <= {hi} fails"))?;
        ensure((a.stats.sum_weight - 1.0).abs() < 1e-10, format!("j = {j}: sum mu = {}", a.stats.sum_weight))?;
        let l1 = a.stats.min_depth as f64;
        let l2 = a.stats.max_depth as f64;
        let w_lo = j.ln() / -eta.ln() - 1.0;
        let w_hi = 2.0 * j.ln() / -eta_bar.ln() + 2.0;
        ensure(l1 >= w_lo && l2 <= w_hi, format!("j = {j}: depths {l1}..{l2} outside [{w_lo:.2}, {w_hi:.2}]"))?;
        report.push(format!("N={n}"));
    }
    for j in [1e1, 1e2, 1e3] {
        let a = build_antichain(&c, AntichainKind::Lambda0J { j }, opts).map_err(fail)?;
        let psi = a.stats.cardinality as f64;
        let lo = (j / d.eta0).floor();
        let hi = (j / (d.eta0 * d.eta0)).floor();
        ensure(lo <= psi && psi <= hi, format!("j = {j}: {lo} <= psi = {psi} <= {hi} fails"))?;
        report.push(format!("psi={psi}"));
    }
    let secs = within_runtime(start, 60.0)?;
    Ok(format!("{} ({secs:.2}s)", report.join(" ")))
}

fn c6_convergence() -> Outcome {
    let c = config("paper_example.json");
    let sr = solve_sr(&c, 1.0).map_err(fail)?;
    let target0 = s0(&c);
    let mut gaps = Vec::new();
    let mut gaps0 = Vec::new();
    for j in [1e2, 1e3, 1e4] {
        let a = build_antichain(&c, AntichainKind::GammaJR { j, r: 1.0 }, BuildOptions::default()).map_err(fail)?;
        gaps.push((antichain_exponent(&a).map_err(fail)?.t - sr).abs());
        let l = build_antichain(&c, AntichainKind::Lambda0J { j }, BuildOptions::default()).map_err(fail)?;
        gaps0.push((antichain_entropy_ratio(&l).map_err(fail)? - target0).abs());
    }
    let shrinking = gaps.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    ensure(shrinking, format!("t_jr gaps {gaps:?} grow by more than 10%"))?;
    ensure(gaps[2] < 0.05, format!("final t_jr gap {}", gaps[2]))?;
    ensure(gaps0[2] < 0.05, format!("final t_j gap {}", gaps0[2]))?;
    Ok(format!(
        "t_jr gaps {:.4} {:.4} {:.4}; t_j gaps {:.4} {:.4} {:.4}",
        gaps[0], gaps[1], gaps[2], gaps0[0], gaps0[1], gaps0[2]
    ))
}

fn c7_oracle() -> Outcome {
    let start = Instant::now();
    let three = Carpet::new(CarpetSpec::from_triples(3, 2, &[(0, 0, 0.2), (2, 0, 0.3), (1, 1, 0.5)])).map_err(fail)?;
    let res = 64;
    let cell = std::f64::consts::SQRT_2 / res as f64;
    let tol = cell.max(1e-6);
    let params = LloydParams { seed: 1, restarts: 16, ..LloydParams::default() };
    let mut worst = 0.0f64;
    for (name, c) in [("two-map", two_map()), ("three-digit", three)] {
        let cloud = discretize(&c, 3).map_err(fail)?;
        for r in [1.0, 2.0] {
            for k in 1..=3 {
                let b = brute_force_error(&cloud, k, r, res).map_err(fail)?;
                let l = lloyd(&cloud, k, r, &params).map_err(fail)?.error;
                worst = worst.max((l - b).abs());
                ensure((l - b).abs() <= tol, format!("{name}, r = {r}, k = {k}: lloyd {l} vs exhaustive {b}"))?;
            }
        }
    }
    let secs = within_runtime(start, 120.0)?;
    Ok(format!("worst |lloyd - exhaustive| = {worst:.1e} (allowed {tol:.3}) ({secs:.2}s)"))
}

fn c8_empirical_dimension() -> Outcome {
    let k_list = [2, 4, 8, 16, 32, 64];
    let params = LloydParams { seed: 2024, restarts: 8, ..LloydParams::default() };
    let mut summary = Vec::new();
    for (name, c, target) in [("two-map", two_map(), 1.0), ("full grid", full_grid(3, 2), 2.0)] {
        let s = solve_sr(&c, 2.0).map_err(fail)?;
        let curve = error_curve(&c, 2.0, &k_list, 8, s, &params).map_err(fail)?;
        let ratio = curve.coefficient_ratio();
        let ok = (curve.slope - target).abs() <= 0.2 * target && ratio < 10.0;
        if !ok {
            let rows: Vec<String> = curve.rows.iter().map(|row| format!("k={} e={:.6e}", row.k, row.error)).collect();
            return Err(format!("{name}: slope {:.4}, ratio {ratio:.3}; curve {}", curve.slope, rows.join(", ")));
        }
        summary.push(format!("{name} slope {:.4} ratio {ratio:.3}", curve.slope));
    }
    Ok(summary.join("; "))
}

fn c9_bounds() -> Outcome {
    let c = config("paper_example.json");
    let budget = carpet_quant::symbolic::DEFAULT_NODE_BUDGET;
    let params = LloydParams { max_iter: 5, ..LloydParams::default() };
    let mut summary = Vec::new();
    for j in [1e2, 1e3] {
        let b = antichain_upper_bound(&c, 1.0, j, budget).map_err(fail)?;
        let kind = AntichainKind::GammaJR { j, r: 1.0 };
        let cloud = antichain_cloud(&c, kind, 2, budget).map_err(fail)?;
        let codebook = antichain_codebook(&c, kind, budget).map_err(fail)?;
        ensure(codebook.len() as u64 == b.count, "codebook size differs from N")?;
        let e = lloyd_from(&cloud, codebook, 1.0, &params).map_err(fail)?.error;
        ensure(e <= b.bound, format!("r = 1, j = {j}: lloyd {e} exceeds bound {}", b.bound))?;

        let g = geometric_bound(&c, j, budget).map_err(fail)?;
        let kind = AntichainKind::Lambda0J { j };
        let levels = if j < 500.0 { 1 } else { 0 };
        let cloud = antichain_cloud(&c, kind, levels, budget).map_err(fail)?;
        let codebook = antichain_codebook(&c, kind, budget).map_err(fail)?;
        ensure(codebook.len() as u64 == g.count, "codebook size differs from psi")?;
        let le = lloyd_from(&cloud, codebook, 0.0, &params).map_err(fail)?.objective;
        ensure(le <= g.bound + 1e-6, format!("r = 0, j = {j}: log error {le} exceeds bound {}", g.bound))?;
        summary.push(format!("j={j}: {e:.3e} <= {:.3e}, {le:.3} <= {:.3}", b.bound, g.bound));
    }
    Ok(summary.join("; "))
}

fn c10_determinism() -> Outcome {
    let c = two_map();
    let args = QuantizeArgs { r: 2.0, k_list: vec![2, 4, 8, 16], depth: 6, seed: 7, restarts: 4, tol: 1e-10 };
    let a = cmd_quantize(&c, &args).map_err(fail)?;
    let b = cmd_quantize(&c, &args).map_err(fail)?;
    ensure(a == b, "two runs differ")?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("balanced-rows example reproduction", c1_balanced_rows),
        ("derived weights and exact normalization", c2_derived_weights),
        ("full-grid closed forms", c3_full_grid),
        ("identity suite on random carpets", c4_identity_suite),
        ("antichain sandwiches", c5_sandwiches),
        ("antichain exponent convergence", c6_convergence),
        ("optimizer vs exhaustive search", c7_oracle),
        ("empirical dimension", c8_empirical_dimension),
        ("bounds consistency", c9_bounds),
        ("determinism", c10_determinism),
    ];
    let mut failures = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", idx + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.2}s]", idx + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
