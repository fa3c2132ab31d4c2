//! Command-line interface. Exit status is 0 on success, 1 when a verification
//! fails and 2 on usage errors.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::certificates::{certify, Theorem};
use crate::equilateral::{verify_integral_table_with, DEFAULT_QUADRATURE_ORDER, TABLE_ABS_TOL, TABLE_REL_TOL};
use crate::error::{Error, Result};
use crate::fem::MAX_LEVEL;
use crate::geometry::{ShapeParams, Triangle};
use crate::scanner::{
    evaluate_triangle, probe_conjectures, scan, verify_theorems, write_rows, FemSetting, OutputFormat, ScanConfig,
    Verdict, DEFAULT_EPS, DEFAULT_VERDICT_TOL,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "trispec", version, about = "Neumann eigenvalue bounds for triangles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Args)]
struct FemArgs {
    /// Finest refinement level
    #[arg(long, conflicts_with = "tol")]
    level: Option<u8>,
    /// Refine until successive extrapolations agree to this relative tolerance
    #[arg(long)]
    tol: Option<f64>,
}

impl FemArgs {
    fn setting(&self) -> Result<FemSetting> {
        match (self.level, self.tol) {
            (Some(l), _) if l > MAX_LEVEL => Err(Error::LevelOutOfRange { level: l, max: MAX_LEVEL }),
            (Some(l), _) => Ok(FemSetting::Level(l)),
            (None, Some(t)) => Ok(FemSetting::Tol(t)),
            (None, None) => Ok(FemSetting::default()),
        }
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Grid resolution NRxNS
    #[arg(long, default_value = "40x40", value_parser = parse_grid)]
    grid: (usize, usize),
    /// Distance kept from the degenerate edge r = 1
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[command(flatten)]
    fem: FemArgs,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
}

impl GridArgs {
    fn config(&self) -> Result<ScanConfig> {
        ScanConfig::new(self.grid.0, self.grid.1, self.eps, self.fem.setting()?, self.jobs)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Neumann eigenvalues of a triangle
    Eig {
        /// Vertices as "x1,y1 x2,y2 x3,y3"
        #[arg(long, value_parser = parse_vertices)]
        vertices: Triangle,
        #[command(flatten)]
        fem: FemArgs,
        /// Number of nonzero eigenvalues
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Closed-form bounds and the finite element reference for one triangle
    Bounds {
        #[arg(long, value_parser = parse_vertices, conflicts_with = "rs", required_unless_present = "rs")]
        vertices: Option<Triangle>,
        /// Moduli coordinates "R,S"
        #[arg(long, value_parser = parse_pair)]
        rs: Option<(f64, f64)>,
        #[command(flatten)]
        fem: FemArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Sweep the moduli triangle
    Scan {
        #[command(flatten)]
        grid: GridArgs,
        /// Output file (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Check the sharp inequalities over a scan
    Verify {
        /// all, 1upS, 1opt, 12upA, 12upAS or geom
        #[arg(long, default_value = "all")]
        theorem: String,
        #[command(flatten)]
        grid: GridArgs,
        /// Relative slack above each sharp constant
        #[arg(long, default_value_t = DEFAULT_VERDICT_TOL)]
        tolerance: f64,
    },
    /// Maxima of the conjectured functionals over a scan
    ProbeConjectures {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = DEFAULT_VERDICT_TOL)]
        tolerance: f64,
    },
    /// Re-verify a proof case analysis by sampling
    Certify {
        /// 1upS, 1opt or lemma83
        #[arg(long)]
        theorem: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Prove polynomial signs in exact rational interval arithmetic
        #[arg(long)]
        strict: bool,
    },
    /// Integrals of the equilateral modes against their closed forms
    Integrals {
        /// Relative tolerance for nonzero entries
        #[arg(long, default_value_t = TABLE_REL_TOL)]
        tol: f64,
        /// Gauss points per direction
        #[arg(long, default_value_t = DEFAULT_QUADRATURE_ORDER)]
        order: usize,
    },
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got `{s}`"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("`{x}`: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("`{y}`: {e}"))?;
    Ok((x, y))
}

fn parse_vertices(s: &str) -> std::result::Result<Triangle, String> {
    let pts: Vec<(f64, f64)> = s.split_whitespace().map(parse_pair).collect::<std::result::Result<_, _>>()?;
    let pts: [(f64, f64); 3] = pts.try_into().map_err(|v: Vec<_>| format!("expected 3 vertices, got {}", v.len()))?;
    Triangle::from_coords(pts).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NRxNS, got `{s}`"))?;
    let a = a.trim().parse().map_err(|e| format!("`{a}`: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("`{b}`: {e}"))?;
    Ok((a, b))
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Eigensolver(_) | Error::Output(_) => EXIT_FAILED,
        _ => EXIT_USAGE,
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Output(e.to_string())
}

fn json_line<T: serde::Serialize>(v: &T, pretty: bool) -> Result<String> {
    let s = if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) };
    s.map_err(|e| Error::Output(e.to_string()))
}

fn print_verdicts(out: &mut dyn Write, verdicts: &[Verdict]) -> Result<()> {
    for v in verdicts {
        let extra = v.degenerate_ratio.map(|d| format!(" degenerate_ratio={d:.6}")).unwrap_or_default();
        writeln!(
            out,
            "{} {} max={:.9} constant={:.9} margin={:+.3e} argmax=({:.6},{:.6}) {} [{}]{}",
            v.theorem,
            v.functional,
            v.max,
            v.constant,
            v.margin,
            v.argmax[0],
            v.argmax[1],
            if v.pass { "PASS" } else { "FAIL" },
            v.note,
            extra
        )
        .map_err(io)?;
    }
    Ok(())
}

fn run_command(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Eig { vertices, fem, k, format } => {
            let est = fem.setting()?.solve(&vertices, k)?;
            match format {
                Format::Json => writeln!(out, "{}", json_line(&est, true)?).map_err(io)?,
                Format::Csv => {
                    writeln!(out, "index,level,eigenvalue,extrapolated,error_estimate").map_err(io)?;
                    for i in 0..est.extrapolated.len() {
                        writeln!(
                            out,
                            "{},{},{},{},{}",
                            i + 1,
                            est.finest_level(),
                            est.eigenvalues[i],
                            est.extrapolated[i],
                            est.error_estimates[i]
                        )
                        .map_err(io)?;
                    }
                }
            }
            if !est.converged {
                writeln!(err, "warning: refinement stopped before reaching the tolerance").map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Bounds { vertices, rs, fem, format } => {
            let t = match (vertices, rs) {
                (Some(t), _) => t,
                (None, Some((r, s))) => ShapeParams::new(r, s)?.triangle()?,
                (None, None) => return Err(Error::Config("give --vertices or --rs".into())),
            };
            let row = evaluate_triangle(&t, fem.setting()?)?;
            match format {
                Format::Json => writeln!(out, "{}", json_line(&row, true)?).map_err(io)?,
                Format::Csv => write_rows(&[row.clone()], OutputFormat::Csv, &mut *out)?,
            }
            Ok(if row.error.is_some() { EXIT_FAILED } else { EXIT_OK })
        }
        Command::Scan { grid, out: path, format } => {
            let cfg = grid.config()?;
            let rows = scan(&cfg)?;
            let failed = rows.iter().filter(|r| r.error.is_some()).count();
            match path {
                Some(p) => {
                    let f = File::create(&p).map_err(io)?;
                    write_rows(&rows, format.into(), BufWriter::new(f))?;
                }
                None => write_rows(&rows, format.into(), &mut *out)?,
            }
            if failed > 0 {
                writeln!(err, "{failed} of {} rows failed to solve", rows.len()).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { theorem, grid, tolerance } => {
            let cfg = grid.config()?;
            // validate the selector before the sweep
            verify_theorems(&[], &theorem, tolerance)?;
            let rows = scan(&cfg)?;
            let verdicts = verify_theorems(&rows, &theorem, tolerance)?;
            print_verdicts(out, &verdicts)?;
            Ok(if verdicts.iter().all(|v| v.pass) { EXIT_OK } else { EXIT_FAILED })
        }
        Command::ProbeConjectures { grid, tolerance } => {
            let rows = scan(&grid.config()?)?;
            print_verdicts(out, &probe_conjectures(&rows, tolerance))?;
            Ok(EXIT_OK)
        }
        Command::Certify { theorem, samples, strict } => {
            let theorem: Theorem = theorem.parse()?;
            let report = certify(theorem, samples, strict)?;
            writeln!(out, "{}", json_line(&report, true)?).map_err(io)?;
            Ok(if report.pass { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Integrals { tol, order } => {
            if !(tol > 0.0) || order < 2 {
                return Err(Error::Config(format!("need tol > 0 and order >= 2, got {tol} and {order}")));
            }
            let report = verify_integral_table_with(order, tol, TABLE_ABS_TOL);
            writeln!(out, "name,computed,exact,error,kind,pass").map_err(io)?;
            for r in &report.rows {
                writeln!(out, "{},{:.15e},{:.15e},{:.3e},{},{}", r.name, r.computed, r.exact, r.error, r.kind, r.pass)
                    .map_err(io)?;
            }
            Ok(if report.pass() { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

/// Parses `argv` (program name first) and runs the command, writing results
/// to `out` and diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match run_command(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_for(&e)
        }
    }
}

pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = run(argv, &mut out, &mut err);
    let _ = out.flush();
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("trispec").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_grid("40x30").unwrap(), (40, 30));
        assert!(parse_grid("40").is_err());
        assert!(parse_vertices("0,0 1,0 0,1").is_ok());
        assert!(parse_vertices("0,0 1,0").is_err());
        assert!(parse_vertices("0,0 1,0 2,0").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_str(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["certify", "--theorem", "2opt"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["certify", "--theorem", "1upS", "--samples", "10"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["eig", "--vertices", "0,0 1,0 0,1", "--level", "3", "--tol", "1e-4"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["scan", "--grid", "1x5"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["verify", "--theorem", "nope", "--grid", "2x2"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("certify"));
    }

    #[test]
    fn integrals_pass() {
        let (code, out, _) = run_str(&["integrals"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert_eq!(out.lines().count(), 14);
    }
}
