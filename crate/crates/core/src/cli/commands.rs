//! Subcommand bodies. Each returns CSV text (without the header comment
//! lines, which carry the run manifest) plus any console lines.

use std::fmt::Write as _;

use crate::carpet::Carpet;
use crate::dims::{
    condition_report_with_tol, s0, solve_sr, solve_sr_detail, solve_theta_r, solve_tr, spectrum, temperature,
};
use crate::error::{Error, Result};
use crate::quantizer::{
    antichain_upper_bound, brute_force_error, discretize, error_curve, geometric_bound, lloyd, LloydParams,
};
use crate::symbolic::{
    antichain_entropy_ratio, antichain_exponent, build_antichain, check_incomparable, check_membership, level_size,
    write_antichain_csv, AntichainKind, BuildOptions,
};

/// Full-precision number formatting shared by every CSV.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Short human formatting: 12 decimals with trailing zeros removed.
pub fn short(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0');
    s.strip_suffix('.').unwrap_or(s).to_string()
}

/// `r, s0, sr, tr, kappa, condA, condB, condC` per requested `r`.
pub fn cmd_dims(carpet: &Carpet, r_list: &[f64], tol: f64) -> Result<String> {
    let mut out = String::from("r,s0,sr,tr,kappa,condA,condB,condC\n");
    for &r in r_list {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Usage(format!("r = {r} must be non-negative")));
        }
        let rep = condition_report_with_tol(carpet, r, tol)?;
        let cond_a = rep.condition_a.as_ref().map_or("na".to_string(), |a| a.equal.to_string());
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(r),
            num(rep.s0),
            num(rep.sr),
            num(rep.tr),
            num(rep.kappa),
            cond_a,
            rep.condition_b.equal,
            rep.condition_c.equal
        )
        .expect("write to string");
    }
    Ok(out)
}

/// Grid rows `t, T, alpha, f`, then one `theta` row per `r` with the
/// identity value `T(theta) / (1 - theta)`.
pub fn cmd_spectrum(carpet: &Carpet, t_lo: f64, t_hi: f64, steps: usize, r_list: &[f64]) -> Result<String> {
    if !(t_lo.is_finite() && t_hi.is_finite() && t_lo < t_hi) || steps < 2 {
        return Err(Error::Usage("need t_lo < t_hi and steps >= 2".into()));
    }
    let grid: Vec<f64> = (0..steps).map(|i| t_lo + (t_hi - t_lo) * i as f64 / (steps - 1) as f64).collect();
    let table = spectrum(carpet, &grid, r_list)?;
    let mut out = String::from("t,T,alpha,f\n");
    for row in &table.rows {
        writeln!(out, "{},{},{},{}", num(row.t), num(row.temperature), num(row.alpha), num(row.f)).expect("write");
    }
    out.push_str("r,theta,T(theta),T(theta)/(1-theta)\n");
    for th in &table.theta {
        writeln!(out, "{},{},{},{}", num(th.r), num(th.theta), num(temperature(carpet, th.theta)), num(th.ratio))
            .expect("write");
    }
    Ok(out)
}

/// The antichain CSV and a one-line summary such as `psi=8 depth=3..3`.
pub fn cmd_antichain(carpet: &Carpet, kind: AntichainKind, budget: u64) -> Result<(String, String)> {
    let a = build_antichain(carpet, kind, BuildOptions { budget, collect_words: true })?;
    let mut buf = Vec::new();
    write_antichain_csv(carpet, &a, &mut buf)?;
    let label = match kind {
        AntichainKind::GammaJR { .. } => "N",
        AntichainKind::Lambda0J { .. } => "psi",
        AntichainKind::LambdaTildeKR { .. } => "phi_tilde",
    };
    let s = &a.stats;
    let stats = format!("{label}={} depth={}..{}", s.cardinality, s.min_depth, s.max_depth);
    Ok((String::from_utf8(buf).expect("utf8"), stats))
}

/// Exponent sequence over `j_list` with its gap to the limit, and the
/// matching bounds CSV. `r > 0` uses `Gamma_{j,r}` and `s_r`; `r = 0` uses
/// `Lambda_j` and `s0`.
pub fn cmd_converge(carpet: &Carpet, r: f64, j_list: &[f64], budget: u64) -> Result<(String, String)> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::Usage(format!("r = {r} must be non-negative")));
    }
    let target = if r == 0.0 { s0(carpet) } else { solve_sr(carpet, r)? };
    let opts = BuildOptions { budget, collect_words: false };
    let mut conv = String::from("j,count,exponent,target,gap\n");
    let mut bounds = String::from(if r == 0.0 { "j,psi,bound\n" } else { "j,N,bound\n" });
    for &j in j_list {
        let (count, exponent, bound) = if r == 0.0 {
            let a = build_antichain(carpet, AntichainKind::Lambda0J { j }, opts)?;
            let b = geometric_bound(carpet, j, budget)?;
            (a.stats.cardinality, antichain_entropy_ratio(&a)?, b.bound)
        } else {
            let a = build_antichain(carpet, AntichainKind::GammaJR { j, r }, opts)?;
            let b = antichain_upper_bound(carpet, r, j, budget)?;
            (a.stats.cardinality, antichain_exponent(&a)?.t, b.bound)
        };
        writeln!(conv, "{},{},{},{},{}", num(j), count, num(exponent), num(target), num((exponent - target).abs()))
            .expect("write");
        writeln!(bounds, "{},{},{}", num(j), count, num(bound)).expect("write");
    }
    Ok((conv, bounds))
}

/// Parameters of [`cmd_quantize`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizeArgs {
    pub r: f64,
    pub k_list: Vec<usize>,
    pub depth: usize,
    pub seed: u64,
    pub restarts: usize,
    pub tol: f64,
}

/// Error curve CSV `k, e, residual, restarts, coefficient` followed by the
/// slope summary as comment lines.
pub fn cmd_quantize(carpet: &Carpet, args: &QuantizeArgs) -> Result<String> {
    if args.k_list.is_empty() || args.k_list[0] == 0 || args.k_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Usage(format!("k list {:?} must be strictly ascending", args.k_list)));
    }
    let s = if args.r == 0.0 { s0(carpet) } else { solve_sr(carpet, args.r)? };
    let params = LloydParams { seed: args.seed, restarts: args.restarts, tol: args.tol, ..LloydParams::default() };
    let curve = error_curve(carpet, args.r, &args.k_list, args.depth, s, &params)?;
    let coef = if args.r == 0.0 { "s0inv_logk_plus_ehat" } else { "k_pow_inv_s_times_e" };
    let mut out = format!("k,e,residual,restarts,{coef}\n");
    for row in &curve.rows {
        writeln!(out, "{},{},{},{},{}", row.k, num(row.error), num(row.residual), row.restarts, num(row.coefficient))
            .expect("write");
    }
    writeln!(out, "# s={} slope={} slope_residual={}", num(s), num(curve.slope), num(curve.slope_residual))
        .expect("write");
    writeln!(out, "# discretization_bias={}", num(curve.discretization_bias)).expect("write");
    if !curve.monotone_violations.is_empty() {
        writeln!(out, "# non-monotone at k = {:?}", curve.monotone_violations).expect("write");
    }
    Ok(out)
}

/// Outcome of [`cmd_verify`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub lines: Vec<String>,
    pub passed: bool,
}

struct Checks {
    lines: Vec<String>,
    passed: bool,
}

impl Checks {
    fn check(&mut self, ok: bool, what: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {what}", if ok { "PASS" } else { "FAIL" }));
    }

    fn info(&mut self, what: String) {
        self.lines.push(format!("INFO {what}"));
    }
}

/// Runs the invariant suite on one carpet.
pub fn cmd_verify(carpet: &Carpet, tol: f64, seed: u64, budget: u64) -> Result<VerifyReport> {
    let mut c = Checks { lines: Vec::new(), passed: true };
    let d = carpet.derived();
    let qsum: f64 = d.qj.iter().sum();
    c.check((qsum - 1.0).abs() < 1e-12, format!("row marginals sum to one ({})", short(qsum)));
    let t1 = temperature(carpet, 1.0);
    c.check(t1.abs() < 1e-12, format!("T(1) = {t1:.3e}"));

    for r in [0.25, 1.0, 4.0] {
        let s = solve_sr_detail(carpet, r)?;
        let lhs = s.residual.exp();
        c.check((lhs - 1.0).abs() < 1e-12, format!("r={r}: dimension equation at kappa_r equals 1 ({})", num(lhs)));
        let t = solve_tr(carpet, r)?;
        c.check(t <= s.value + 1e-12, format!("r={r}: t_r = {} <= s_r = {}", short(t), short(s.value)));
        let th = solve_theta_r(carpet, r)?;
        let ratio = temperature(carpet, th) / (1.0 - th);
        c.check((ratio - t).abs() < 1e-9, format!("r={r}: T(theta)/(1-theta) matches t_r ({:.3e})", (ratio - t).abs()));
        let rep = condition_report_with_tol(carpet, r, tol)?;
        let flag = rep.condition_a.as_ref().is_some_and(|a| a.equal);
        c.check(
            flag == ((s.value - t).abs() < tol),
            format!("r={r}: condition (a) flag {flag} agrees with |s_r - t_r| = {:.3e}", (s.value - t).abs()),
        );
    }
    let grid: Vec<f64> = (0..=100).map(|i| -2.0 + 0.05 * i as f64).collect();
    let table = spectrum(carpet, &grid, &[])?;
    let min2 = table.min_second_difference();
    c.check(min2 >= -1e-8, format!("T convex on [-2, 3] (min second difference {min2:.3e})"));

    let rep = condition_report_with_tol(carpet, 1.0, tol)?;
    let a = rep.condition_a.as_ref().expect("r > 0");
    c.info(format!(
        "r=1: s0={} sr={} tr={} condA={} condB={} condC={}",
        short(rep.s0),
        short(rep.sr),
        short(rep.tr),
        a.equal,
        rep.condition_b.equal,
        rep.condition_c.equal
    ));
    c.info(format!("C values: {}", a.values.iter().map(|&v| short(v)).collect::<Vec<_>>().join(" ")));
    if rep.sr > rep.tr + tol {
        c.info(format!("sr > tr by {:.3e}", rep.sr - rep.tr));
    }

    let opts = BuildOptions { budget, collect_words: true };
    for j in [10.0, 100.0] {
        let r = 1.0;
        let g = build_antichain(carpet, AntichainKind::GammaJR { j, r }, opts)?;
        c.check(
            (g.stats.sum_weight - 1.0).abs() < 1e-10,
            format!("Gamma(j={j}): total weight {}", num(g.stats.sum_weight)),
        );
        c.check(check_membership(carpet, &g).is_ok(), format!("Gamma(j={j}): membership predicate"));
        c.check(check_incomparable(carpet, &g).is_ok(), format!("Gamma(j={j}): pairwise incomparable"));
        if g.stats.cardinality >= 2 {
            let u = antichain_exponent(&g)?.u;
            let eta = d.eta_lower(r);
            let n = g.stats.cardinality as f64;
            let lo = (j / eta).powf(u);
            let hi = (j / (eta * eta)).powf(u);
            c.check(
                lo <= n * (1.0 + f64::EPSILON) && n <= hi * (1.0 + f64::EPSILON),
                format!("Gamma(j={j}): {} <= N = {n} <= {}", short(lo), short(hi)),
            );
        }
    }
    if d.separated {
        let j = 10.0;
        let l = build_antichain(carpet, AntichainKind::Lambda0J { j }, BuildOptions { budget, collect_words: false })?;
        let psi = l.stats.cardinality as f64;
        let (lo, hi) = ((j / d.eta0).floor(), (j / (d.eta0 * d.eta0)).floor());
        c.check(lo <= psi && psi <= hi, format!("Lambda(j={j}): {lo} <= psi = {psi} <= {hi}"));
    }

    // Optimizer against exhaustive search on the deepest level with at most 16 atoms.
    match (1..=12).rev().find(|&k| level_size(carpet, k) <= 16) {
        Some(depth) => {
            let cloud = discretize(carpet, depth)?;
            let res = 32;
            let slack = std::f64::consts::SQRT_2 / res as f64;
            let params = LloydParams { seed, restarts: 8, ..LloydParams::default() };
            for k in 1..=3.min(cloud.len()) {
                let b = brute_force_error(&cloud, k, 2.0, res)?;
                let l = lloyd(&cloud, k, 2.0, &params)?.error;
                c.check(
                    l <= b + slack && b <= l + slack,
                    format!("optimizer vs exhaustive search, depth {depth}, k={k}: {} vs {}", short(l), short(b)),
                );
            }
        }
        None => c.info("no level small enough for exhaustive search".into()),
    }
    Ok(VerifyReport { lines: c.lines, passed: c.passed })
}
