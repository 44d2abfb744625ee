//! Command-line frontend: every library operation behind one binary with
//! deterministic, machine-readable output.
//!
//! Exit codes: 0 success, 1 negative verdict (inadmissible set, locator
//! not found, stabiliser mismatch), 2 usage or domain errors, 3 resource
//! limits. Diagnostics go to standard error only.

use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use kfree::admissibility::{
    find_locator, is_admissible, locator_density_bound, LocateOutcome, LocateStrategy,
    LocatorQuery,
};
use kfree::analytics::{
    density_report_csv, density_report_with_limit, entropy, DEFAULT_EULER_LIMIT,
};
use kfree::error::Error;
use kfree::lattice::Point;
use kfree::render::{render_pgm, render_svg, RenderOptions};
use kfree::ring::RingId;
use kfree::sieve::{sieve_with_threads, BoxWindow, PointSet, VSpec, BIN_MAGIC};
use kfree::symmetry::{inadmissible_image_witness, stab_search, UniMat};

#[derive(Parser)]
#[command(name = "kfree", version, about = "number-theoretic point sets, exactly")]
struct Cli {
    /// Worker threads for sieving; KFREE_THREADS overrides the default.
    /// Output never depends on the thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// Point-set family: visible | kfree | bfree.
    #[arg(long)]
    set: String,
    /// Dimension for the lattice families (default 2).
    #[arg(long)]
    d: Option<u8>,
    /// Power for the k-free families.
    #[arg(long)]
    k: Option<u32>,
    /// Quadratic ring (gauss|eisenstein|sqrt2|golden|sqrt3); selects the
    /// ring k-free family.
    #[arg(long)]
    ring: Option<String>,
    /// Comma-separated modulus list for bfree.
    #[arg(long)]
    moduli: Option<String>,
}

impl SpecArgs {
    fn to_vspec(&self) -> Result<VSpec, Error> {
        let d = self.d.unwrap_or(2);
        let spec = match self.set.as_str() {
            "visible" => VSpec::Visible { d },
            "kfree" => {
                let k = self.k.ok_or_else(|| Error::invalid("kfree needs --k"))?;
                match &self.ring {
                    Some(name) => VSpec::KfreeRing { ring: RingId::parse(name)?, k },
                    None => VSpec::KfreeLattice { d, k },
                }
            }
            "bfree" => {
                let list = self
                    .moduli
                    .as_ref()
                    .ok_or_else(|| Error::invalid("bfree needs --moduli"))?;
                let moduli = parse_i64_list(list)?;
                VSpec::BfreeLattice { d, moduli }
            }
            other => return Err(Error::invalid(format!("unknown set `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sieve a window of the chosen point set and write it out.
    Sieve {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        radius: i64,
        /// json | binary
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Render one or two point-set files (dots, then open circles).
    Render {
        /// Input pointset files (JSON or binary), at most two.
        inputs: Vec<String>,
        /// svg | pgm
        #[arg(long, default_value = "svg")]
        format: String,
        /// Draw eisenstein sets under the real (triangular) embedding.
        #[arg(long)]
        real_embedding: bool,
        #[arg(long, default_value_t = 8.0)]
        scale: f64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Decide admissibility of a finite set, with certificates.
    Admissible {
        #[command(flatten)]
        spec: SpecArgs,
        /// Points as "(x,y);(x,y);…" (parens optional).
        #[arg(long)]
        points: String,
    },
    /// Find a translate placing P inside V and Q outside.
    Locate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = "")]
        p: String,
        #[arg(long, default_value = "")]
        q: String,
        #[arg(long, default_value_t = 500)]
        radius: i64,
        /// Use the CRT-guided coset scan instead of the plain shell scan.
        #[arg(long)]
        crt: bool,
    },
    /// Truncated lower bound for the density of the locator set of P.
    LocatorBound {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = "")]
        p: String,
        #[arg(long, default_value_t = 100)]
        truncation: u64,
    },
    /// Search all unimodular matrices at an entry bound for stabilisers.
    Stab {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 2)]
        entry_bound: i64,
        #[arg(long, default_value_t = 64)]
        radius: i64,
    },
    /// Build the inadmissible-image witness for a non-stabiliser matrix.
    Witness {
        #[arg(long)]
        ring: String,
        #[arg(long)]
        k: u32,
        /// Row-major entries "a,b,c,d".
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value_t = 128)]
        max_shell: i64,
    },
    /// Empirical vs theoretical density table.
    Density {
        #[command(flatten)]
        spec: SpecArgs,
        /// Comma-separated radii.
        #[arg(long)]
        radii: String,
        /// json | csv
        #[arg(long, default_value = "json")]
        format: String,
        /// Norm truncation of the Euler product for ring sets.
        #[arg(long, default_value_t = DEFAULT_EULER_LIMIT)]
        euler_limit: u64,
    },
    /// Topological entropy constant of the set.
    Entropy {
        #[command(flatten)]
        spec: SpecArgs,
    },
}

fn parse_i64_list(text: &str) -> Result<Vec<i64>, Error> {
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<i64>()
                .map_err(|e| Error::invalid(format!("bad integer `{s}`: {e}")))
        })
        .collect()
}

fn parse_points(text: &str) -> Result<Vec<Point>, Error> {
    let mut out = Vec::new();
    for part in text.split(';') {
        let cleaned = part.trim().trim_start_matches('(').trim_end_matches(')');
        if cleaned.is_empty() {
            continue;
        }
        let coords = parse_i64_list(cleaned)?;
        out.push(Point::new(&coords)?);
    }
    Ok(out)
}

fn read_pointset(path: &str) -> Result<PointSet, Error> {
    let data = std::fs::read(path)?;
    if data.starts_with(BIN_MAGIC) {
        PointSet::from_binary(&data)
    } else {
        PointSet::from_json(
            std::str::from_utf8(&data)
                .map_err(|_| Error::invalid("pointset file is neither binary nor UTF-8 JSON"))?,
        )
    }
}

fn emit(out: &Option<String>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T) -> Result<(), Error> {
    let mut text = serde_json::to_string(value)?;
    text.push('\n');
    std::io::stdout().write_all(text.as_bytes())?;
    Ok(())
}

#[derive(Serialize)]
struct AdmissibleOut<'a> {
    schema: &'static str,
    spec: &'a VSpec,
    #[serde(flatten)]
    report: &'a kfree::admissibility::AdmissibilityReport,
}

#[derive(Serialize)]
struct LocateOut<'a> {
    schema: &'static str,
    spec: &'a VSpec,
    radius: i64,
    strategy: LocateStrategy,
    #[serde(flatten)]
    outcome: &'a LocateOutcome,
}

#[derive(Serialize)]
struct BoundOut<'a> {
    schema: &'static str,
    spec: &'a VSpec,
    pattern: &'a [Point],
    truncation: u64,
    bound: f64,
}

#[derive(Serialize)]
struct EntropyOut<'a> {
    schema: &'static str,
    spec: &'a VSpec,
    #[serde(flatten)]
    entropy: kfree::analytics::EntropyValue,
}

fn threads_from(cli_threads: Option<usize>) -> usize {
    cli_threads
        .or_else(|| {
            std::env::var("KFREE_THREADS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok())
        })
        .unwrap_or(1)
        .max(1)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let threads = threads_from(cli.threads);
    match cli.command {
        Command::Sieve { spec, radius, format, out } => {
            let spec = spec.to_vspec()?;
            let window = BoxWindow::new(spec.dim(), radius)?;
            let ps = sieve_with_threads(&spec, &window, threads)?;
            match format.as_str() {
                "json" => {
                    let mut text = ps.to_json();
                    text.push('\n');
                    emit(&out, text.as_bytes())?;
                }
                "binary" => emit(&out, &ps.to_binary())?,
                other => return Err(Error::invalid(format!("unknown format `{other}`"))),
            }
            Ok(0)
        }
        Command::Render { inputs, format, real_embedding, scale, out } => {
            if inputs.is_empty() || inputs.len() > 2 {
                return Err(Error::invalid("render takes one or two pointset files"));
            }
            let primary = read_pointset(&inputs[0])?;
            let secondary = inputs.get(1).map(|p| read_pointset(p)).transpose()?;
            let opts = RenderOptions { real_embedding, scale };
            match format.as_str() {
                "svg" => {
                    let svg = render_svg(&primary, secondary.as_ref(), &opts)?;
                    emit(&out, svg.as_bytes())?;
                }
                "pgm" => {
                    if real_embedding {
                        return Err(Error::invalid("--real-embedding needs the svg format"));
                    }
                    let pgm = render_pgm(&primary, secondary.as_ref())?;
                    emit(&out, &pgm)?;
                }
                other => return Err(Error::invalid(format!("unknown format `{other}`"))),
            }
            Ok(0)
        }
        Command::Admissible { spec, points } => {
            let spec = spec.to_vspec()?;
            let set = parse_points(&points)?;
            let report = is_admissible(&set, &spec)?;
            emit_json(&AdmissibleOut { schema: "admissibility/1", spec: &spec, report: &report })?;
            Ok(if report.admissible { 0 } else { 1 })
        }
        Command::Locate { spec, p, q, radius, crt } => {
            let spec = spec.to_vspec()?;
            let query = LocatorQuery {
                pattern: parse_points(&p)?,
                forbidden: parse_points(&q)?,
                spec: spec.clone(),
                radius,
                strategy: if crt { LocateStrategy::CrtGuided } else { LocateStrategy::Scan },
            };
            let outcome = find_locator(&query)?;
            emit_json(&LocateOut {
                schema: "locate/1",
                spec: &spec,
                radius,
                strategy: query.strategy,
                outcome: &outcome,
            })?;
            Ok(match outcome {
                LocateOutcome::Found { .. } => 0,
                _ => 1,
            })
        }
        Command::LocatorBound { spec, p, truncation } => {
            let spec = spec.to_vspec()?;
            let pattern = parse_points(&p)?;
            let bound = locator_density_bound(&pattern, &spec, truncation)?;
            emit_json(&BoundOut {
                schema: "locatorbound/1",
                spec: &spec,
                pattern: &pattern,
                truncation,
                bound,
            })?;
            Ok(0)
        }
        Command::Stab { spec, entry_bound, radius } => {
            let spec = spec.to_vspec()?;
            let report = stab_search(&spec, entry_bound, radius, threads)?;
            let exact = matches!(report.group.verdict, kfree::symmetry::GroupVerdict::Exact);
            emit_json(&report)?;
            Ok(if exact { 0 } else { 1 })
        }
        Command::Witness { ring, k, matrix, max_shell } => {
            let ring = RingId::parse(&ring)?;
            let mat = UniMat::parse(&matrix)?;
            let witness = inadmissible_image_witness(&mat, ring, k, max_shell)?;
            emit_json(&witness)?;
            Ok(0)
        }
        Command::Density { spec, radii, format, euler_limit } => {
            let spec = spec.to_vspec()?;
            let radii = parse_i64_list(&radii)?;
            if radii.is_empty() {
                return Err(Error::invalid("density needs at least one radius"));
            }
            let report = density_report_with_limit(&spec, &radii, threads, euler_limit)?;
            match format.as_str() {
                "json" => emit_json(&report)?,
                "csv" => {
                    std::io::stdout().write_all(density_report_csv(&report).as_bytes())?;
                }
                other => return Err(Error::invalid(format!("unknown format `{other}`"))),
            }
            Ok(0)
        }
        Command::Entropy { spec } => {
            let spec = spec.to_vspec()?;
            let value = entropy(&spec)?;
            emit_json(&EntropyOut { schema: "entropy/1", spec: &spec, entropy: value })?;
            Ok(0)
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Resource(_) | Error::Overflow(_) | Error::Internal(_) | Error::Io(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("kfree: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
