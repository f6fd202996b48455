//! Command-line front end: config parsing, suite dispatch and report files.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::Value;

use crate::domain::{RootSystem, WeightedGrid};
use crate::dunkl::DunklKernel;
use crate::error::Error;
use crate::verification::{
    check_pointwise_domination, explore_conjecture, heat_check, transform_check, verify_banach_hds, verify_dunkl_fs,
    verify_fefferman_stein, verify_scalar_hds, verify_vector_hds, TrialConfig, VerificationReport,
};

/// Tolerance of the transform and heat checks.
pub const CHECK_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "maxlab", version, about = "Maximal inequality experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key=value config file; keys mirror the trial config fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed of the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    x: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    y: Option<f64>,
    /// Prints every measure of a report.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    VerifyScalarHds,
    VerifyVectorHds,
    VerifyBanachHds,
    VerifyFs,
    VerifyDunklFs,
    CheckDomination,
    ExploreConjecture,
    /// Evaluates E_kappa(x, y), or the slice x -> E_kappa(ix, y) without --x.
    Kernel,
    /// Plancherel identity and inversion roundtrip.
    TransformCheck,
    /// Mass, semigroup law, contraction and positivity of the heat semigroup.
    HeatCheck,
}

/// Invalid config file contents.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.key {
            Some(key) => write!(f, "line {}: key `{key}`: {}", self.line, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Parsed config file: the trial config plus the optional thread cap.
#[derive(Debug, Clone, PartialEq)]
pub struct FileConfig {
    pub trial: TrialConfig,
    pub threads: Option<usize>,
}

/// Parses a flat `key = value` file. `#` starts a comment; list values are
/// comma separated; enum values use their snake_case names.
pub fn parse_config(text: &str) -> Result<FileConfig, ConfigError> {
    let defaults = match serde_json::to_value(TrialConfig::default()) {
        Ok(Value::Object(map)) => map,
        _ => unreachable!("config serializes to an object"),
    };
    let mut current = defaults.clone();
    let mut threads = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |key: Option<&str>, message: String| ConfigError {
            line,
            key: key.map(str::to_string),
            message,
        };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(None, format!("expected key = value, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if key == "threads" {
            threads = Some(value.parse().map_err(|e| err(Some(key), format!("{e}")))?);
            continue;
        }
        let default = defaults
            .get(key)
            .ok_or_else(|| err(Some(key), "unknown key".to_string()))?;
        let parsed = parse_value(default, value).map_err(|m| err(Some(key), m))?;
        current.insert(key.to_string(), parsed);
        // reject bad enum names or ranges on the line that introduced them
        serde_json::from_value::<TrialConfig>(Value::Object(current.clone()))
            .map_err(|e| err(Some(key), e.to_string()))?;
    }
    let trial = serde_json::from_value(Value::Object(current)).expect("checked per line");
    Ok(FileConfig { trial, threads })
}

fn parse_value(default: &Value, text: &str) -> Result<Value, String> {
    let number = |t: &str, integer: bool| -> Result<Value, String> {
        if integer {
            t.parse::<u64>().map(Value::from).map_err(|e| format!("`{t}`: {e}"))
        } else {
            let v: f64 = t.parse().map_err(|e| format!("`{t}`: {e}"))?;
            serde_json::Number::from_f64(v)
                .map(Value::Number)
                .ok_or_else(|| format!("`{t}` is not finite"))
        }
    };
    match default {
        Value::Number(n) => number(text, n.is_u64()),
        Value::String(_) => Ok(Value::String(text.to_string())),
        Value::Array(items) => {
            let integer = items.first().is_none_or(|v| v.is_u64());
            text.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| number(t, integer))
                .collect::<Result<Vec<_>, _>>()
                .map(Value::Array)
        }
        _ => Err("unsupported value type".to_string()),
    }
}

fn io_error(path: &Path, e: io::Error) -> io::Error {
    io::Error::new(e.kind(), format!("{}: {e}", path.display()))
}

/// Writes `<suite>-<seed>.json` and `<suite>-<seed>.csv` into `outdir`.
///
/// CSV columns are `trial, constant, bound, pass, measure`; the bound is
/// empty for bound-free measures, whose pass flag then also reflects the
/// report's envelope checks.
pub fn emit_report(report: &VerificationReport, outdir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir).map_err(|e| io_error(outdir, e))?;
    let stem = format!("{}-{}", report.suite, report.config.seed);
    let json = outdir.join(format!("{stem}.json"));
    fs::write(&json, report.to_json() + "\n").map_err(|e| io_error(&json, e))?;
    let csv_path = outdir.join(format!("{stem}.csv"));
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| io_error(&csv_path, e.into()))?;
    let write_err = |e: csv::Error| io_error(&csv_path, e.into());
    w.write_record(["trial", "constant", "bound", "pass", "measure"])
        .map_err(write_err)?;
    for r in &report.per_trial {
        let pass = match r.bound {
            Some(_) => r.pass,
            None => r.pass && report.pass,
        };
        w.write_record([
            r.trial.to_string(),
            r.constant.to_string(),
            r.bound.map(|b| b.to_string()).unwrap_or_default(),
            pass.to_string(),
            r.measure.clone(),
        ])
        .map_err(write_err)?;
    }
    w.flush().map_err(|e| io_error(&csv_path, e))?;
    Ok(vec![json, csv_path])
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidExponent(_)
            | Error::InvalidParameter { .. }
            | Error::ExponentOrder { .. }
            | Error::DimensionMismatch { .. }
            | Error::DomainTruncation { .. }
            | Error::HeatTruncation { .. }
            | Error::EmptyField
            | Error::RootSystem(_)
    )
}

fn suite_exit(e: Error) -> i32 {
    eprintln!("error: {e}");
    if is_config_error(&e) {
        2
    } else {
        1
    }
}

fn print_report(report: &VerificationReport, verbose: u8) {
    let bound = report.bound.map(|b| b.to_string()).unwrap_or_else(|| "none".into());
    println!(
        "{}: {} worst_case={} bound={} trials={} runtime_ms={}",
        report.suite,
        if report.pass { "PASS" } else { "FAIL" },
        report.worst_case,
        bound,
        report.config.trials,
        report.runtime_ms
    );
    if verbose > 0 {
        for m in &report.measures {
            let bound = m.bound.map(|b| b.to_string()).unwrap_or_else(|| "none".into());
            println!(
                "  {} {} worst={} bound={bound}",
                if m.pass { "PASS" } else { "FAIL" },
                m.measure,
                m.worst_case
            );
        }
    }
}

fn grid_for(cfg: &TrialConfig) -> crate::Result<WeightedGrid> {
    let rs = if cfg.kappa == 0.0 {
        RootSystem::trivial(cfg.dim)?
    } else {
        RootSystem::product(&vec![cfg.kappa; cfg.dim])?
    };
    WeightedGrid::new(rs, cfg.half_width, cfg.grid_points)
}

fn write_json(out: Option<&Path>, name: &str, value: &impl serde::Serialize) -> io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("check serializes");
    println!("{text}");
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        let path = dir.join(name);
        fs::write(&path, text + "\n").map_err(|e| io_error(&path, e))?;
    }
    Ok(())
}

fn run_kernel(cli: &Cli, cfg: &TrialConfig) -> i32 {
    let kernel = match DunklKernel::new(cfg.kappa) {
        Ok(k) => k,
        Err(e) => return suite_exit(e),
    };
    let y = cli.y.unwrap_or(1.0);
    if let Some(x) = cli.x {
        return match kernel.eval(x, Complex64::new(y, 0.0)) {
            Ok(v) => {
                println!("{}", v.re);
                0
            }
            Err(e) => suite_exit(e),
        };
    }
    let mut rows = String::from("x,y,re,im\n");
    for i in 0..=100 {
        let x = -5.0 + 0.1 * i as f64;
        let v = kernel.imaginary(x * y);
        rows.push_str(&format!("{x},{y},{},{}\n", v.re, v.im));
    }
    match &cli.out {
        Some(dir) => {
            let path = dir.join(format!("kernel-kappa{}.csv", cfg.kappa));
            let written = fs::create_dir_all(dir).and_then(|_| fs::write(&path, rows));
            if let Err(e) = written {
                eprintln!("error: {}: {e}", path.display());
                return 1;
            }
            println!("{}", path.display());
        }
        None => print!("{rows}"),
    }
    0
}

fn dispatch(cli: &Cli, cfg: &TrialConfig) -> i32 {
    let suite: fn(&TrialConfig) -> crate::Result<VerificationReport> = match cli.command {
        Command::VerifyScalarHds => verify_scalar_hds,
        Command::VerifyVectorHds => verify_vector_hds,
        Command::VerifyBanachHds => verify_banach_hds,
        Command::VerifyFs => verify_fefferman_stein,
        Command::VerifyDunklFs => verify_dunkl_fs,
        Command::CheckDomination => check_pointwise_domination,
        Command::ExploreConjecture => explore_conjecture,
        Command::Kernel => return run_kernel(cli, cfg),
        Command::TransformCheck | Command::HeatCheck => {
            let grid = match grid_for(cfg) {
                Ok(g) => g,
                Err(e) => return suite_exit(e),
            };
            let out = cli.out.as_deref();
            let (written, pass) = if cli.command == Command::TransformCheck {
                match transform_check(&grid, CHECK_TOLERANCE) {
                    Ok(c) => (
                        write_json(out, &format!("transform-check-{}.json", cfg.seed), &c),
                        c.pass,
                    ),
                    Err(e) => return suite_exit(e),
                }
            } else {
                match heat_check(&grid, CHECK_TOLERANCE) {
                    Ok(c) => (write_json(out, &format!("heat-check-{}.json", cfg.seed), &c), c.pass),
                    Err(e) => return suite_exit(e),
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 1;
            }
            return if pass { 0 } else { 1 };
        }
    };
    let report = match suite(cfg) {
        Ok(r) => r,
        Err(e) => return suite_exit(e),
    };
    print_report(&report, cli.verbose);
    if let Some(dir) = &cli.out {
        match emit_report(&report, dir) {
            Ok(paths) if cli.verbose > 0 => paths.iter().for_each(|p| println!("wrote {}", p.display())),
            Ok(_) => {}
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        }
    }
    if report.pass {
        0
    } else {
        1
    }
}

/// Runs the command line `argv` (without the program name) and returns the
/// process exit code: 0 pass, 1 suite failure, 2 usage or config error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = std::iter::once(OsString::from("maxlab")).chain(argv.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut file = FileConfig {
        trial: TrialConfig::default(),
        threads: None,
    };
    if let Some(path) = &cli.config {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return 2;
            }
        };
        file = match parse_config(&text) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return 2;
            }
        };
    }
    let mut cfg = file.trial;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(p) = cli.p {
        cfg.p = p;
    }
    if let Some(q) = cli.q {
        cfg.q = q;
    }
    if let Some(kappa) = cli.kappa {
        cfg.kappa = kappa;
    }
    if cli.command != Command::Kernel {
        if let Err(e) = cfg.validate() {
            return suite_exit(e);
        }
    }
    let threads = cli.threads.or(file.threads).unwrap_or(0);
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| dispatch(&cli, &cfg)),
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Map;

    #[test]
    fn parses_documented_keys() {
        let c = parse_config(
            "seed = 7\n# comment\ngenerator = identity\nn_seq_sweep = 1, 2\nkappa=1 # inline\nthreads = 2\n",
        )
        .unwrap();
        assert_eq!(c.trial.seed, 7);
        assert_eq!(c.trial.n_seq_sweep, vec![1, 2]);
        assert_eq!(c.trial.kappa, 1.0);
        assert_eq!(c.threads, Some(2));
    }

    #[test]
    fn rejects_unknown_key_with_line() {
        let e = parse_config("seed = 1\n\nbogus_key = 3\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.key.as_deref(), Some("bogus_key"));
        assert!(e.to_string().contains("bogus_key"));
    }

    #[test]
    fn rejects_bad_values() {
        assert_eq!(parse_config("trials = -3").unwrap_err().key.as_deref(), Some("trials"));
        assert_eq!(
            parse_config("generator = nope").unwrap_err().key.as_deref(),
            Some("generator")
        );
        assert!(parse_config("just text").is_err());
    }

    #[test]
    fn echoed_config_round_trips() {
        let cfg = TrialConfig {
            seed: 99,
            p: 1.25,
            ..TrialConfig::default()
        };
        let json = serde_json::to_string(&cfg).unwrap();
        let back: TrialConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        let map: Map<String, Value> = serde_json::from_str(&json).unwrap();
        assert_eq!(
            map.len(),
            serde_json::to_value(TrialConfig::default())
                .unwrap()
                .as_object()
                .unwrap()
                .len()
        );
    }
}
