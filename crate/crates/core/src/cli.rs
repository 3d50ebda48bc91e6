//! The `fif` command-line front end.
//!
//! Exit codes: 0 success, 1 input error, 2 verification failure, 3 resource cap.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::address::{DepthCap, Triangle};
use crate::energy::{energy_trend, verify_recursion, EnergyClass, HarmonicStructure};
use crate::error::{Error, Result};
use crate::fif::FifSpec;
use crate::harmonic::HarmonicFunction;
use crate::laplacian::{classify, renormalized_series, solve_dirichlet};
use crate::mesh::VertexFunction;
use crate::oracle::{solve_discrete_dirichlet, DEFAULT_SOLVER_CAP};
use crate::verify::{run_all, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

/// Largest oracle deviation accepted by `dirichlet --verify`.
pub const DIRICHLET_VERIFY_TOL: f64 = 1e-8;

const SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "fif",
    version,
    about = "Fractal interpolation functions on the Sierpinski gasket"
)]
pub struct Cli {
    /// Override the depth cap (default: $FIF_DEPTH_CAP, else 12).
    #[arg(long, global = true)]
    pub depth_cap: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a FIF on V_m and write `address,px,py,value` CSV.
    FifEval {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        level: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graph energies E_0..E_M, recursion residuals and the closed-form total.
    Energy {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Renormalized graph Laplacian at one vertex per level, plus classification.
    Laplacian {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value = "1.2")]
        at: String,
    },
    /// Solve u(q_i) = a_i, Δu = η with the d = 1/5 FIF.
    Dirichlet(DirichletArgs),
    #[command(subcommand)]
    Harmonic(HarmonicCommand),
    /// Run every invariant suite; exits 2 if any fails.
    Verify {
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[arg(long, default_value_t = VerifyConfig::default().samples)]
        samples: usize,
        #[arg(long, default_value_t = VerifyConfig::default().seed)]
        seed: u64,
        #[arg(long, hide = true)]
        perturb: bool,
    },
}

#[derive(Debug, Args)]
pub struct DirichletArgs {
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub boundary: [f64; 3],
    #[arg(long, allow_hyphen_values = true)]
    pub eta: f64,
    #[arg(long)]
    pub level: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Cross-check against the brute-force linear solve.
    #[arg(long)]
    pub verify: bool,
    /// Also write the solution's spec JSON.
    #[arg(long)]
    pub spec_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum HarmonicCommand {
    /// Evaluate the harmonic function with the given boundary values.
    Eval {
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        boundary: [f64; 3],
        #[arg(long)]
        address: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!(
            "expected three comma-separated numbers, got {}",
            parts.len()
        ));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p
            .trim()
            .parse()
            .map_err(|e| format!("`{}`: {e}", p.trim()))?;
    }
    Ok(out)
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Input(Error),
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(e) => e.exit_code(),
            Failure::Verification(_) => EXIT_VERIFY,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "error: {e}"),
            Failure::Verification(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.into())
    }
}

fn read_spec(path: &Path) -> Result<FifSpec> {
    let text = std::fs::read_to_string(path)?;
    FifSpec::from_json_str(&text)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_num(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

/// Write `address,px,py,value` rows in canonical vertex order.
pub fn write_surface<W: Write>(u: &VertexFunction, out: W) -> Result<()> {
    let tri = Triangle::default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["address", "px", "py", "value"])?;
    for (v, value) in u.iter() {
        let [px, py] = tri.embed(v.address());
        w.write_record([v.to_string(), num(px), num(py), num(value)])?;
    }
    w.flush()?;
    Ok(())
}

fn write_surface_to(u: &VertexFunction, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_surface(u, io::BufWriter::new(File::create(p)?)),
        None => write_surface(u, stdout),
    }
}

fn resolve_cap(flag: Option<usize>) -> Result<DepthCap> {
    match flag {
        Some(c) => Ok(DepthCap(c)),
        None => DepthCap::from_env(),
    }
}

/// Execute a parsed command line, writing normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let cap = resolve_cap(cli.depth_cap)?;
    match cli.command {
        Command::FifEval {
            spec,
            level,
            out: path,
        } => {
            let spec = read_spec(&spec)?;
            cap.check(level)?;
            let u = spec.on_level(level, cap)?;
            write_surface_to(&u, path.as_deref(), out)?;
        }
        Command::Energy {
            spec,
            levels,
            format,
        } => {
            let spec = read_spec(&spec)?;
            let report = verify_recursion(&spec, levels, &HarmonicStructure::default(), cap)?;
            let summary = json!({
                "schema": SCHEMA,
                "delta": report.delta,
                "classification": match report.classification {
                    EnergyClass::Harmonic => "Harmonic",
                    EnergyClass::Finite => "Finite",
                    EnergyClass::Infinite => "Infinite",
                },
                "total": json_num(report.closed_form_total),
                "trend": format!("{:?}", energy_trend(&report.energies)),
                "max_recursion_residual": report.max_recursion_residual,
            });
            match format {
                Format::Table => {
                    writeln!(out, "{:>3} {:>24} {:>12}", "m", "E_m", "residual")?;
                    for (m, (e, r)) in report
                        .energies
                        .iter()
                        .zip(&report.recursion_residuals)
                        .enumerate()
                    {
                        writeln!(out, "{m:>3} {:>24} {r:>12.3e}", num(*e))?;
                    }
                    writeln!(out, "{summary}")?;
                }
                Format::Json => {
                    let mut full = summary;
                    full["energies"] = json!(report.energies);
                    full["recursion_residuals"] = json!(report.recursion_residuals);
                    writeln!(out, "{full}")?;
                }
            }
        }
        Command::Laplacian { spec, levels, at } => {
            let spec = read_spec(&spec)?;
            let address = at.parse()?;
            let series = renormalized_series(&spec, &address, levels, cap)?;
            writeln!(out, "# vertex {}", series.vertex)?;
            writeln!(out, "{:>3} {:>24}", "m", "(3/2)5^m Δ_m f")?;
            for (m, v) in series.levels.iter().zip(&series.values) {
                writeln!(out, "{m:>3} {:>24}", num(*v))?;
            }
            writeln!(out, "# divergent: {}", series.divergent)?;
            let classification = match classify(&spec) {
                Ok(c) => json!({ "schema": SCHEMA, "classification": c }),
                Err(Error::NonUniform(d)) => json!({
                    "schema": SCHEMA,
                    "classification": null,
                    "reason": format!("non-uniform d = {d:?}"),
                }),
                Err(e) => return Err(e.into()),
            };
            writeln!(out, "{classification}")?;
        }
        Command::Dirichlet(args) => dirichlet(args, cap, out)?,
        Command::Harmonic(HarmonicCommand::Eval { boundary, address }) => {
            let h = HarmonicFunction::new(boundary);
            writeln!(out, "{}", h.eval(&address.parse()?))?;
        }
        Command::Verify {
            levels,
            samples,
            seed,
            perturb,
        } => {
            cap.check(levels)?;
            let cfg = VerifyConfig {
                levels,
                samples,
                seed,
                perturb,
                cap,
            };
            let results = run_all(&cfg);
            let mut failed = Vec::new();
            for (r, err) in &results {
                let status = if r.passed { "PASS" } else { "FAIL" };
                write!(
                    out,
                    "{status} {:<48} worst {:.3e} (tol {:.0e}) {:.2}s",
                    r.name,
                    r.worst,
                    r.tolerance,
                    r.elapsed.as_secs_f64()
                )?;
                if let Some(e) = err {
                    write!(out, " [{e}]")?;
                }
                writeln!(out)?;
                if !r.passed {
                    failed.push(r.name);
                }
            }
            writeln!(
                out,
                "{}/{} suites passed",
                results.len() - failed.len(),
                results.len()
            )?;
            if !failed.is_empty() {
                return Err(Failure::Verification(failed.join(", ")));
            }
        }
    }
    Ok(())
}

fn dirichlet(
    args: DirichletArgs,
    cap: DepthCap,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let DirichletArgs {
        boundary,
        eta,
        level,
        out: path,
        verify,
        spec_out,
    } = args;
    cap.check(level)?;
    if verify && level > DEFAULT_SOLVER_CAP {
        return Err(Error::SolverCap {
            requested: level,
            cap: DEFAULT_SOLVER_CAP,
        }
        .into());
    }
    let spec = solve_dirichlet(boundary, eta)?;
    let [y1, y2, y3] = spec.midpoints();
    writeln!(
        out,
        "# boundary: {} {} {}",
        boundary[0], boundary[1], boundary[2]
    )?;
    writeln!(out, "# eta: {eta}")?;
    writeln!(out, "# d: 0.2")?;
    writeln!(out, "# midpoints: {} {} {}", num(y1), num(y2), num(y3))?;
    let u = spec.on_level(level, cap)?;
    write_surface_to(&u, Some(&path), out)?;
    writeln!(
        out,
        "# wrote {} vertices to {}",
        u.values().len(),
        path.display()
    )?;
    if let Some(p) = spec_out {
        let text = serde_json::to_string_pretty(&spec).map_err(Error::from)?;
        std::fs::write(&p, text + "\n")?;
    }
    if verify {
        let oracle = solve_discrete_dirichlet(boundary, eta, level, DEFAULT_SOLVER_CAP)?;
        let dev = u
            .values()
            .iter()
            .zip(oracle.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        writeln!(out, "# max oracle deviation: {dev:.3e}")?;
        if dev.is_nan() || dev >= DIRICHLET_VERIFY_TOL {
            return Err(Failure::Verification(format!(
                "oracle deviation {dev:e} exceeds {DIRICHLET_VERIFY_TOL:e}"
            )));
        }
    }
    Ok(())
}

/// Parse `args`, run, and map the outcome to an exit code; errors go to `err`.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
        }
    };
    match run(cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "{f}");
            f.exit_code()
        }
    }
}
