//! Command-line front end: parameter sweeps to CSV, optimum queries and the
//! oracle verification suite.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::channels::GadParams;
use crate::entangle::{
    concurrence_lambda2, lambda2_with_optimal_reversal, optimal_parameters, protected_state,
    EntangledInput,
};
use crate::qubit::{
    average_fidelity_six, bb84_error_rate, optimal_average, optimal_strengths, protect_equatorial,
};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const SUBCOMMANDS: [&str; 6] = [
    "qubit-fidelity",
    "qubit-average",
    "qkd-error",
    "entangle",
    "optimal",
    "verify",
];

#[derive(Debug, Parser)]
#[command(
    name = "decoshield",
    version,
    about = "Weak-measurement protection against generalized amplitude damping",
    args_override_self = true
)]
struct Cli {
    /// key=value file supplying flag defaults; command-line flags win
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep equatorial-state fidelity over (m, n).
    /// CSV columns: m,n,fidelity,success_prob
    QubitFidelity(QubitSweep),
    /// Sweep six-state fidelities over (m, n).
    /// CSV columns: m,n,f0,f1,fe,favg
    QubitAverage(QubitSweep),
    /// Sweep the BB84 error rate over (m, n).
    /// CSV columns: m,n,error_rate,success_prob
    QkdError(QubitSweep),
    /// Sweep two-qubit concurrence over the pre-measurement strength m.
    /// CSV columns: m,n1,n2,lambda2,concurrence,success_prob
    Entangle(EntangleSweep),
    /// Print closed-form optimal strengths as key=value lines.
    /// Give --p/--r for one qubit or --p1/--r1/--p2/--r2 for two.
    Optimal(OptimalArgs),
    /// Run the oracle cross-check suite; exit 1 if any check fails.
    Verify,
}

#[derive(Debug, Args)]
struct QubitSweep {
    /// GAD temperature weight p in [0, 1]
    #[arg(long, value_parser = unit_interval)]
    p: f64,
    /// GAD damping strength r in [0, 1]
    #[arg(long, value_parser = unit_interval)]
    r: f64,
    /// N×N grid with m, n in (2/N):2:N; overridden per axis by --m / --n
    #[arg(long, value_parser = grid_size, default_value_t = 100)]
    grid: usize,
    /// pre-measurement strengths lo:hi:steps
    #[arg(long, value_parser = strength_range)]
    m: Option<Range>,
    /// reversal strengths lo:hi:steps
    #[arg(long, value_parser = strength_range)]
    n: Option<Range>,
    /// output CSV path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EntangleSweep {
    #[arg(long, value_parser = unit_interval)]
    p1: f64,
    #[arg(long, value_parser = unit_interval)]
    r1: f64,
    #[arg(long, value_parser = unit_interval)]
    p2: f64,
    #[arg(long, value_parser = unit_interval)]
    r2: f64,
    /// |α|² of the input α|00⟩ + β|11⟩
    #[arg(long, value_parser = unit_interval, default_value_t = 0.5)]
    alpha_sq: f64,
    /// pre-measurement strengths lo:hi:steps (m₂ = 1)
    #[arg(long, value_parser = strength_range, default_value = "0:1:200")]
    sweep_m: Range,
    /// fixed reversal strength on qubit 1 (default: optimal for each m)
    #[arg(long, value_parser = positive, requires = "n2")]
    n1: Option<f64>,
    /// fixed reversal strength on qubit 2 (default: optimal for each m)
    #[arg(long, value_parser = positive, requires = "n1")]
    n2: Option<f64>,
    /// output CSV path (stdout if omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OptimalArgs {
    #[arg(long, value_parser = unit_interval, conflicts_with_all = ["p1", "r1", "p2", "r2"], requires = "r")]
    p: Option<f64>,
    #[arg(long, value_parser = unit_interval, requires = "p")]
    r: Option<f64>,
    #[arg(long, value_parser = unit_interval, requires_all = ["r1", "p2", "r2"])]
    p1: Option<f64>,
    #[arg(long, value_parser = unit_interval, requires = "p1")]
    r1: Option<f64>,
    #[arg(long, value_parser = unit_interval, requires = "p1")]
    p2: Option<f64>,
    #[arg(long, value_parser = unit_interval, requires = "p1")]
    r2: Option<f64>,
    #[arg(long, value_parser = unit_interval, default_value_t = 0.5)]
    alpha_sq: f64,
}

/// Inclusive linear range `lo:hi:steps`.
#[derive(Clone, Debug, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * i as f64 / last as f64
                }
            })
            .collect()
    }
}

pub fn parse_range(s: &str) -> std::result::Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts.as_slice() else {
        return Err(format!("expected lo:hi:steps, got '{s}'"));
    };
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound '{lo}'"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("bad upper bound '{hi}'"))?;
    let steps: usize = steps
        .trim()
        .parse()
        .map_err(|_| format!("bad step count '{steps}'"))?;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(format!("need finite lo <= hi, got {lo}:{hi}"));
    }
    if steps == 0 || (steps == 1 && lo != hi) {
        return Err("steps must be at least 2 (or 1 with lo == hi)".into());
    }
    Ok(Range { lo, hi, steps })
}

fn strength_range(s: &str) -> std::result::Result<Range, String> {
    let range = parse_range(s)?;
    if range.lo < 0.0 {
        return Err(format!(
            "strengths must be non-negative, got lower bound {}",
            range.lo
        ));
    }
    Ok(range)
}

fn unit_interval(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn grid_size(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s
        .parse()
        .map_err(|_| format!("'{s}' is not a positive integer"))?;
    if v >= 2 {
        Ok(v)
    } else {
        Err("grid must be at least 2".into())
    }
}

/// Fixed-decimal rendering with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return "NaN".into();
    }
    if x == 0.0 {
        return format!("{:.11}", 0.0);
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (11 - exponent).clamp(0, 60) as usize;
    let s = format!("{x:.decimals$}");
    if s.starts_with("-0") && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

/// Reads `key=value` lines into `--key value` tokens; `#` starts a comment.
fn config_tokens(path: &Path) -> std::result::Result<Vec<OsString>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("--config: cannot read {}: {e}", path.display()))?;
    let mut tokens = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!("--config: line {}: expected key=value", lineno + 1));
        };
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(format!(
                "--config: line {}: invalid key '{key}'",
                lineno + 1
            ));
        }
        tokens.push(OsString::from(format!("--{key}")));
        tokens.push(OsString::from(value.trim()));
    }
    Ok(tokens)
}

/// Splices config-file flags in right after the subcommand name so that
/// later command-line occurrences override them.
fn expand_config(args: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let mut config = None;
    for (i, arg) in args.iter().enumerate() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            config = args.get(i + 1).map(PathBuf::from);
            if config.is_none() {
                return Err("--config: missing file path".into());
            }
        } else if let Some(path) = s.strip_prefix("--config=") {
            config = Some(PathBuf::from(path));
        }
    }
    let Some(path) = config else {
        return Ok(args);
    };
    let tokens = config_tokens(&path)?;
    let Some(pos) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let mut out = args[..=pos].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&args[pos + 1..]);
    Ok(out)
}

fn gad(p: f64, r: f64) -> GadParams {
    GadParams::new(p, r).expect("validated by the argument parser")
}

fn qubit_axes(sweep: &QubitSweep) -> (Vec<f64>, Vec<f64>) {
    let default = Range {
        lo: 2.0 / sweep.grid as f64,
        hi: 2.0,
        steps: sweep.grid,
    };
    let m = sweep.m.clone().unwrap_or_else(|| default.clone()).values();
    let n = sweep.n.clone().unwrap_or(default).values();
    (m, n)
}

type Rows = (Vec<&'static str>, Vec<Vec<f64>>);

fn qubit_rows(sweep: &QubitSweep, kind: &Command) -> Rows {
    let params = gad(sweep.p, sweep.r);
    let (ms, ns) = qubit_axes(sweep);
    let cells: Vec<(f64, f64)> = ms
        .iter()
        .flat_map(|&m| ns.iter().map(move |&n| (m, n)))
        .collect();
    let header = match kind {
        Command::QubitFidelity(_) => vec!["m", "n", "fidelity", "success_prob"],
        Command::QubitAverage(_) => vec!["m", "n", "f0", "f1", "fe", "favg"],
        _ => vec!["m", "n", "error_rate", "success_prob"],
    };
    let rows = cells
        .par_iter()
        .map(|&(m, n)| {
            let mut row = vec![m, n];
            match kind {
                Command::QubitFidelity(_) => match protect_equatorial(params, m, n, 0.0) {
                    Ok(res) => row.extend([res.fidelity, res.success_prob]),
                    Err(_) => row.extend([f64::NAN, 0.0]),
                },
                Command::QubitAverage(_) => match average_fidelity_six(params, m, n) {
                    Ok(rep) => row.extend([rep.f0, rep.f1, rep.fe, rep.favg]),
                    Err(_) => row.extend([f64::NAN; 4]),
                },
                _ => match (
                    bb84_error_rate(params, m, n),
                    protect_equatorial(params, m, n, 0.0),
                ) {
                    (Ok(re), Ok(res)) => row.extend([re, res.success_prob]),
                    _ => row.extend([f64::NAN, 0.0]),
                },
            }
            row
        })
        .collect();
    (header, rows)
}

fn entangle_rows(sweep: &EntangleSweep) -> std::result::Result<Rows, String> {
    let (ch1, ch2) = (gad(sweep.p1, sweep.r1), gad(sweep.p2, sweep.r2));
    let input =
        EntangledInput::from_alpha_sq(sweep.alpha_sq).map_err(|e| format!("--alpha-sq: {e}"))?;
    let rows = sweep
        .sweep_m
        .values()
        .par_iter()
        .map(|&m| {
            let (lambda2, n1, n2, prob) = match (sweep.n1, sweep.n2) {
                (Some(n1), Some(n2)) => match protected_state(&input, ch1, ch2, m, 1.0, n1, n2) {
                    Ok((coeffs, prob)) => (concurrence_lambda2(&coeffs, n1, n2), n1, n2, prob),
                    Err(_) => (f64::NAN, n1, n2, 0.0),
                },
                _ => lambda2_with_optimal_reversal(&input, ch1, ch2, m).unwrap_or((
                    f64::NAN,
                    f64::NAN,
                    f64::NAN,
                    0.0,
                )),
            };
            vec![m, n1, n2, lambda2, lambda2.max(0.0), prob]
        })
        .collect();
    Ok((
        vec!["m", "n1", "n2", "lambda2", "concurrence", "success_prob"],
        rows,
    ))
}

fn write_csv(
    rows: &Rows,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> std::result::Result<(), String> {
    let sink: Box<dyn Write + '_> = match out {
        Some(path) => Box::new(
            File::create(path)
                .map_err(|e| format!("--out: cannot create {}: {e}", path.display()))?,
        ),
        None => Box::new(&mut *stdout),
    };
    let mut writer = csv::Writer::from_writer(sink);
    let io_err = |e: csv::Error| format!("writing CSV: {e}");
    writer.write_record(&rows.0).map_err(io_err)?;
    for row in &rows.1 {
        writer
            .write_record(row.iter().map(|&x| format_sig12(x)))
            .map_err(io_err)?;
    }
    writer.flush().map_err(|e| format!("writing CSV: {e}"))
}

fn run_optimal(args: &OptimalArgs, stdout: &mut dyn Write) -> std::result::Result<(), String> {
    let mut lines: Vec<(String, String)> = Vec::new();
    if let (Some(p), Some(r)) = (args.p, args.r) {
        let params = gad(p, r);
        let opt = optimal_strengths(params).map_err(|e| format!("--p/--r: {e}"))?;
        let avg = optimal_average(params).map_err(|e| format!("--p/--r: {e}"))?;
        lines.extend([
            ("m".into(), opt.m.to_string()),
            ("n".into(), opt.n.to_string()),
            ("f_max".into(), opt.f_max.to_string()),
            ("favg_max".into(), avg.f_max.to_string()),
            ("projective".into(), opt.projective.to_string()),
        ]);
    } else if let (Some(p1), Some(r1), Some(p2), Some(r2)) = (args.p1, args.r1, args.p2, args.r2) {
        let input =
            EntangledInput::from_alpha_sq(args.alpha_sq).map_err(|e| format!("--alpha-sq: {e}"))?;
        let rep = optimal_parameters(&input, gad(p1, r1), gad(p2, r2))
            .map_err(|e| format!("--p1/--r1/--p2/--r2: {e}"))?;
        lines.extend([
            ("lambda1".into(), rep.lambda1.to_string()),
            ("lambda2".into(), rep.lambda2.to_string()),
            ("lambda2_max".into(), rep.lambda2_max.to_string()),
            ("m".into(), rep.m_opt.to_string()),
            ("n1".into(), rep.n1_opt.to_string()),
            ("n2".into(), rep.n2_opt.to_string()),
            ("h".into(), rep.h.to_string()),
            ("alpha_sq_opt".into(), rep.alpha_sq_opt.to_string()),
            ("success_prob".into(), rep.success_prob.to_string()),
            ("regime".into(), format!("{:?}", rep.regime)),
        ]);
    } else {
        return Err("optimal: give either --p and --r, or --p1 --r1 --p2 --r2".into());
    }
    for (k, v) in lines {
        writeln!(stdout, "{k}={v}").map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };

    let outcome = match &cli.command {
        Command::QubitFidelity(s) | Command::QubitAverage(s) | Command::QkdError(s) => {
            write_csv(&qubit_rows(s, &cli.command), s.out.as_deref(), stdout)
        }
        Command::Entangle(s) => {
            entangle_rows(s).and_then(|rows| write_csv(&rows, s.out.as_deref(), stdout))
        }
        Command::Optimal(a) => run_optimal(a, stdout),
        Command::Verify => {
            let checks = verify::run_suite();
            let mut all = true;
            for check in &checks {
                all &= check.passed;
                let _ = writeln!(stdout, "{check}");
            }
            let _ = writeln!(
                stdout,
                "{} of {} checks passed",
                checks.iter().filter(|c| c.passed).count(),
                checks.len()
            );
            return if all { EXIT_OK } else { EXIT_VERIFY_FAILED };
        }
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_env() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("decoshield").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("0:1:3").unwrap().values(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_range("0.5:0.5:1").unwrap().values(), vec![0.5]);
        assert!(parse_range("1:0:3").is_err());
        assert!(parse_range("0:1").is_err());
        assert!(parse_range("0:1:1").is_err());
        assert!(parse_range("a:1:3").is_err());
        assert!(strength_range("-1:1:3").is_err());
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(0.933401234567891), "0.933401234568");
        assert_eq!(format_sig12(1.5), "1.50000000000");
        assert_eq!(format_sig12(0.0), "0.00000000000");
        assert_eq!(format_sig12(123.456), "123.456000000");
        assert_eq!(format_sig12(-0.25), "-0.250000000000");
        assert_eq!(format_sig12(1e-5), "0.0000100000000000");
        assert_eq!(format_sig12(f64::NAN), "NaN");
    }

    #[test]
    fn qubit_fidelity_csv_shape() {
        let (code, out, _) =
            run_capture(&["qubit-fidelity", "--p", "0.8", "--r", "0.3", "--grid", "4"]);
        assert_eq!(code, EXIT_OK);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "m,n,fidelity,success_prob");
        assert_eq!(lines.len(), 17);
        assert!(lines[1].starts_with("0.500000000000,0.500000000000,"));
    }

    #[test]
    fn usage_errors_name_the_flag() {
        let (code, _, err) = run_capture(&["qubit-fidelity", "--p", "1.5", "--r", "0.3"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--p"), "{err}");
        let (code, _, err) =
            run_capture(&["qubit-fidelity", "--p", "0.5", "--r", "0.3", "--bogus", "1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--bogus"), "{err}");
        let (code, _, err) = run_capture(&[
            "entangle",
            "--p1",
            "0.9",
            "--r1",
            "0.5",
            "--p2",
            "0.9",
            "--r2",
            "0.3",
            "--sweep-m",
            "1:0:5",
        ]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--sweep-m"), "{err}");
        let (code, _, err) = run_capture(&["optimal", "--p", "0", "--r", "0.3"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--p"), "{err}");
        let (code, _, _) = run_capture(&[]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn optimal_matches_library_exactly() {
        let (code, out, _) = run_capture(&["optimal", "--p", "0.8", "--r", "0.3"]);
        assert_eq!(code, EXIT_OK);
        let opt = optimal_strengths(gad(0.8, 0.3)).unwrap();
        assert!(out.contains(&format!("m={}\n", opt.m)));
        assert!(out.contains(&format!("f_max={}\n", opt.f_max)));
        let (code, out, _) = run_capture(&[
            "optimal", "--p1", "0.9", "--r1", "0.5", "--p2", "0.95", "--r2", "0.3",
        ]);
        assert_eq!(code, EXIT_OK);
        let rep =
            optimal_parameters(&EntangledInput::bell(), gad(0.9, 0.5), gad(0.95, 0.3)).unwrap();
        assert!(out.contains(&format!("lambda2_max={}\n", rep.lambda2_max)));
        assert!(out.contains("regime=Interior"));
    }

    #[test]
    fn config_file_supplies_defaults_and_flags_override() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "# single-qubit sweep\np = 0.8\nr=0.3\ngrid=3\n").unwrap();
        let cfg_str = cfg.to_str().unwrap();
        let (code, from_file, _) = run_capture(&["qubit-fidelity", "--config", cfg_str]);
        assert_eq!(code, EXIT_OK);
        let (_, explicit, _) =
            run_capture(&["qubit-fidelity", "--p", "0.8", "--r", "0.3", "--grid", "3"]);
        assert_eq!(from_file, explicit);
        let (code, overridden, _) =
            run_capture(&["--config", cfg_str, "qubit-fidelity", "--grid", "2"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(overridden.lines().count(), 5);

        fs::write(&cfg, "nonsense line\n").unwrap();
        let (code, _, err) = run_capture(&["qubit-fidelity", "--config", cfg_str]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--config"));
    }
}
