//! Command-line front end: argument parsing, config loading, run manifests
//! and deterministic CSV emission.

pub mod commands;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::carpet::Carpet;
use crate::dims::CONDITION_TOL;
use crate::error::{Error, Result};
use crate::symbolic::{AntichainKind, DEFAULT_NODE_BUDGET};

pub use commands::{
    cmd_antichain, cmd_converge, cmd_dims, cmd_quantize, cmd_spectrum, cmd_verify, num, short, QuantizeArgs,
    VerifyReport,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "carpet-quant", version, about = "Quantization dimensions of self-affine carpet measures")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Carpet configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for `<command>.csv` and `manifest.json`; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized restarts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on generated tree nodes.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: u64,
    /// Condition tolerance (dims, verify) or gradient tolerance (quantize).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Gamma,
    Lambda0,
    LambdaTilde,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Dimensions and conditions per order r.
    Dims {
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        r: Vec<f64>,
    },
    /// Temperature function, spectrum and theta_r.
    Spectrum {
        #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
        t_lo: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        t_hi: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        r: Vec<f64>,
    },
    /// Enumerate one finite maximal antichain.
    Antichain {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Threshold parameter for gamma and lambda0.
        #[arg(long)]
        j: Option<f64>,
        /// Shell index for lambda-tilde.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Antichain exponents against their limit, plus bounds.
    Converge {
        /// Order; 0 selects the geometric-mean case.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        j: Vec<f64>,
    },
    /// Empirical quantization error curve.
    Quantize {
        #[arg(long, default_value_t = 2.0)]
        r: f64,
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
    },
    /// Invariant suite; exits nonzero on any failure.
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dims { .. } => "dims",
            Command::Spectrum { .. } => "spectrum",
            Command::Antichain { .. } => "antichain",
            Command::Converge { .. } => "converge",
            Command::Quantize { .. } => "quantize",
            Command::Verify => "verify",
        }
    }
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_path: String,
    pub config_hash: String,
    pub command: Command,
    pub common: Common,
    pub version: String,
    /// Hash of every field above.
    pub hash: String,
    pub timestamp: u64,
    pub outputs: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(config_path: &Path, config_text: &str, command: &Command, common: &Common) -> Self {
        let config_hash = sha256_hex(config_text.as_bytes());
        // The output directory does not influence results.
        let common = Common { out: None, ..common.clone() };
        let key = serde_json::json!({
            "config_hash": config_hash,
            "command": command,
            "common": common,
            "version": VERSION,
        });
        let hash = sha256_hex(key.to_string().as_bytes());
        let timestamp = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
        RunManifest {
            config_path: config_path.display().to_string(),
            config_hash,
            command: command.clone(),
            common,
            version: VERSION.to_string(),
            hash,
            timestamp,
            outputs: Vec::new(),
        }
    }

    /// Comment lines that open every CSV.
    pub fn header(&self) -> String {
        format!(
            "# carpet-quant {}\n# manifest {}\n# config {}\n# command {}\n",
            self.version,
            self.hash,
            self.config_hash,
            self.command.name()
        )
    }
}

/// Output of one command: named CSV bodies and console lines.
struct Output {
    files: Vec<(String, String)>,
    console: Vec<String>,
    failed: bool,
}

fn load_config(path: &Path) -> Result<(String, Carpet)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let carpet = Carpet::from_json_str(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    Ok((text, carpet))
}

fn execute(carpet: &Carpet, command: &Command, common: &Common) -> Result<Output> {
    let name = command.name();
    let single = |body: String| Output { files: vec![(format!("{name}.csv"), body)], console: vec![], failed: false };
    let cond_tol = common.tol.unwrap_or(CONDITION_TOL);
    match command {
        Command::Dims { r } => Ok(single(cmd_dims(carpet, r, cond_tol)?)),
        Command::Spectrum { t_lo, t_hi, steps, r } => Ok(single(cmd_spectrum(carpet, *t_lo, *t_hi, *steps, r)?)),
        Command::Antichain { kind, j, k, r } => {
            let need_j = || j.ok_or_else(|| Error::Usage("--j is required for this kind".into()));
            let kind = match kind {
                KindArg::Gamma => AntichainKind::GammaJR { j: need_j()?, r: *r },
                KindArg::Lambda0 => AntichainKind::Lambda0J { j: need_j()? },
                KindArg::LambdaTilde => AntichainKind::LambdaTildeKR {
                    k: k.ok_or_else(|| Error::Usage("--k is required for lambda-tilde".into()))?,
                    r: *r,
                },
            };
            let (csv, stats) = cmd_antichain(carpet, kind, common.budget)?;
            let mut out = single(csv);
            out.console.push(stats);
            Ok(out)
        }
        Command::Converge { r, j } => {
            let (conv, bounds) = cmd_converge(carpet, *r, j, common.budget)?;
            Ok(Output {
                files: vec![(format!("{name}.csv"), conv), ("bounds.csv".into(), bounds)],
                console: vec![],
                failed: false,
            })
        }
        Command::Quantize { r, k, depth, restarts } => {
            let args = QuantizeArgs {
                r: *r,
                k_list: k.clone(),
                depth: *depth,
                seed: common.seed,
                restarts: *restarts,
                tol: common.tol.unwrap_or(crate::quantizer::LloydParams::default().tol),
            };
            Ok(single(cmd_quantize(carpet, &args)?))
        }
        Command::Verify => {
            let rep = cmd_verify(carpet, cond_tol, common.seed, common.budget)?;
            let mut out = single(rep.lines.join("\n") + "\n");
            out.failed = !rep.passed;
            out.console.push(if rep.passed { "verify: all checks passed".into() } else { "verify: FAILED".into() });
            Ok(out)
        }
    }
}

/// Runs a parsed command line, writing files or stdout. Returns whether all
/// checks passed.
pub fn run(cli: &Cli) -> Result<bool> {
    let path = cli.common.config.as_ref().ok_or_else(|| Error::Usage("--config PATH is required".into()))?;
    let (text, carpet) = load_config(path)?;
    let mut manifest = RunManifest::new(path, &text, &cli.command, &cli.common);
    let out = execute(&carpet, &cli.command, &cli.common)?;
    let header = manifest.header();
    match &cli.common.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for (file, body) in &out.files {
                fs::write(dir.join(file), format!("{header}{body}"))?;
                manifest.outputs.push(file.clone());
            }
            let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
            fs::write(dir.join("manifest.json"), json + "\n")?;
        }
        None => {
            for (file, body) in &out.files {
                if out.files.len() > 1 {
                    println!("# file {file}");
                }
                print!("{header}{body}");
            }
        }
    }
    // Keep stdout a clean CSV stream when it carries the CSV.
    for line in &out.console {
        if cli.common.out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(!out.failed)
}

/// Entry point for the binary: parses `std::env::args` and maps the outcome
/// to an exit code.
pub fn main_exit() -> std::process::ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => std::process::ExitCode::SUCCESS,
        Ok(false) => std::process::ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::ExitCode::from(if matches!(e, Error::Usage(_)) { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn common(out: Option<&str>, seed: u64) -> Common {
        Common { config: None, out: out.map(PathBuf::from), seed, budget: 10, tol: None }
    }

    #[test]
    fn manifest_hash_ignores_output_dir_only() {
        let cmd = Command::Dims { r: vec![1.0] };
        let path = Path::new("c.json");
        let a = RunManifest::new(path, "{}", &cmd, &common(Some("/tmp/a"), 1));
        let b = RunManifest::new(path, "{}", &cmd, &common(None, 1));
        let c = RunManifest::new(path, "{}", &cmd, &common(None, 2));
        let d = RunManifest::new(path, "{ }", &cmd, &common(None, 1));
        assert_eq!(a.hash, b.hash);
        assert_ne!(a.hash, c.hash);
        assert_ne!(a.hash, d.hash);
        assert!(a.header().lines().all(|l| l.starts_with("# ")));
    }

    #[test]
    fn short_trims_zeros() {
        assert_eq!(short(1.5), "1.5");
        assert_eq!(short(2.0), "2");
        assert_eq!(short(1.5000000000000002), "1.5");
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn parses_global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["carpet-quant", "quantize", "--config", "x.json", "--k", "2,4", "--seed", "9"])
            .unwrap();
        assert_eq!(cli.common.seed, 9);
        assert!(matches!(cli.command, Command::Quantize { ref k, .. } if k == &vec![2, 4]));
    }
}
