use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sitnet_core::intersection::{analyze, sit_scan, verify_flow, AnalysisOptions, CheckRecord, McConfig, ScanMode};
use sitnet_core::measure::{build_kernel, PathKernel};
use sitnet_core::solver::unit_current_flow;
use sitnet_core::{exhaustion, rng, Error, Flow, GraphFamily, Network, DEFAULT_TOL};

#[derive(Parser)]
#[command(
    name = "sitnet",
    version,
    about = "Current flows, path measures and intersection statistics on rooted networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a family truncation as a sitnet-graph-v1 file.
    Gen(GenArgs),
    /// Solve for the unit current flow and print the effective resistance.
    Solve(SolveArgs),
    /// Exact (and optionally sampled) intersection statistics of a flow's path measure.
    Measure(MeasureArgs),
    /// Run every inequality check and print one line per check.
    Verify(VerifyArgs),
    /// Sweep a family over a range of radii and write a CSV table.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Path,
    Lattice,
    BinaryTree,
    Diamond,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Number of diamond levels.
    #[arg(long)]
    n: Option<usize>,
    /// Path length.
    #[arg(long)]
    l: Option<usize>,
    /// Lattice dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Lattice radius.
    #[arg(long)]
    r: Option<usize>,
    /// Binary tree depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Where to write the sitnet-flow-v1 file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Flow file for the graph; the unit current flow is solved when omitted.
    #[arg(long)]
    flow: Option<PathBuf>,
    /// Exact statistics only, no sampling.
    #[arg(long, conflicts_with_all = ["pairs", "seed"])]
    exact: bool,
    /// Number of independent path pairs to sample.
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    /// Seed for every sampled quantity; required unless --exact.
    #[arg(long, required_unless_present = "exact")]
    seed: Option<u64>,
    /// Number of randomly perturbed kernels to check (uses --seed).
    #[arg(long, requires = "seed")]
    perturbations: Option<usize>,
    /// Write this many sampled paths, one per line.
    #[arg(long, requires_all = ["seed", "dump_count"])]
    dump_paths: Option<PathBuf>,
    #[arg(long, requires = "dump_paths")]
    dump_count: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Report file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Flow file to check instead of the solved unit current flow.
    #[arg(long)]
    flow: Option<PathBuf>,
    /// Number of randomly perturbed kernels to check.
    #[arg(long, requires = "seed")]
    perturbations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Lattice dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Radii as `a..b` (inclusive), `a..b:step` or a comma list.
    #[arg(long, value_parser = parse_radii)]
    radii: Radii,
    #[arg(long, conflicts_with_all = ["pairs", "seed"])]
    exact: bool,
    #[arg(long, default_value_t = 100_000)]
    pairs: usize,
    #[arg(long, required_unless_present = "exact")]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Radii(Vec<usize>);

fn parse_radii(text: &str) -> Result<Radii, String> {
    let number = |s: &str| s.trim().parse::<usize>().map_err(|e| format!("bad radius {s:?}: {e}"));
    let radii = if let Some((lo, rest)) = text.split_once("..") {
        let rest = rest.strip_prefix('=').unwrap_or(rest);
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, number(step)?),
            None => (rest, 1),
        };
        if step == 0 {
            return Err("step must be positive".into());
        }
        (number(lo)?..=number(hi)?).step_by(step).collect()
    } else {
        text.split(',').map(number).collect::<Result<Vec<_>, _>>()?
    };
    if radii.is_empty() {
        return Err(format!("no radii in {text:?}"));
    }
    Ok(Radii(radii))
}

/// Failure of a subcommand, mapped to the exit status.
#[derive(Debug)]
enum Failure {
    Checks,
    Input(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Checks => 1,
            Failure::Input(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::NotConverged { .. }
            | Error::ZeroEscapeCurrent
            | Error::PositiveLoop(_)
            | Error::RootInflow(_)
            | Error::InvalidKernel(_) => Failure::Numerical(err.to_string()),
            _ => Failure::Input(err.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::Input(err.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn family_of(arg: FamilyArg, d: Option<usize>) -> Result<GraphFamily, Failure> {
    Ok(match arg {
        FamilyArg::Path => GraphFamily::Path,
        FamilyArg::BinaryTree => GraphFamily::BinaryTree,
        FamilyArg::Diamond => GraphFamily::Diamond,
        FamilyArg::Lattice => GraphFamily::Lattice {
            dim: d.ok_or_else(|| Failure::Input("--d is required for the lattice family".into()))?,
        },
    })
}

fn emit(out: Option<&Path>, text: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn read_graph(path: &Path) -> Result<Network, Failure> {
    sitnet_core::graph::read_network(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_flow<'n>(net: &'n Network, path: Option<&Path>, tol: f64) -> Result<Flow<'n>, Failure> {
    match path {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Flow::from_json(net, &text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => Ok(unit_current_flow(net, tol)?),
    }
}

fn check_tol(tol: f64) -> CmdResult {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::Input(format!("--tol must be positive, got {tol}")))
    }
}

fn cmd_gen(args: GenArgs) -> CmdResult {
    let need = |value: Option<usize>, flag: &str| {
        value.ok_or_else(|| Failure::Input(format!("--{flag} is required for this family")))
    };
    let family = family_of(args.family, args.d)?;
    let r = match family {
        GraphFamily::Path => need(args.l, "l")?,
        GraphFamily::Diamond => need(args.n, "n")?,
        GraphFamily::BinaryTree => need(args.depth, "depth")?,
        GraphFamily::Lattice { .. } => need(args.r, "r")?,
    };
    let net = exhaustion(family, r)?;
    emit(args.out.as_deref(), &net.to_json())?;
    eprintln!(
        "{family} r={r}: {} vertices, {} edges, hash {}",
        net.vertex_count(),
        net.edge_count(),
        net.content_hash()
    );
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> CmdResult {
    check_tol(args.tol)?;
    let net = read_graph(&args.graph)?;
    let flow = unit_current_flow(&net, args.tol)?;
    if let Some(out) = &args.out {
        fs::write(out, flow.to_json())?;
    }
    println!("R_eff={:.12}", flow.energy());
    Ok(())
}

fn dump_paths(kernel: &PathKernel<'_>, path: &Path, count: usize, seed: u64) -> io::Result<()> {
    let lines: Vec<String> = rng::chunked(count, seed, |rng, n| {
        (0..n).map(|_| kernel.sample_with(rng).to_line()).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    let mut text = format!(
        "# graph_hash={} seed={seed} paths={count}\n",
        kernel.network().content_hash()
    );
    for line in lines {
        text.push_str(&line);
        text.push('\n');
    }
    fs::write(path, text)
}

fn cmd_measure(args: MeasureArgs) -> CmdResult {
    check_tol(args.tol)?;
    let net = read_graph(&args.graph)?;
    let flow = load_flow(&net, args.flow.as_deref(), args.tol)?;
    let mc = match (args.exact, args.seed) {
        (false, Some(seed)) => {
            if args.pairs < 2 {
                return Err(Failure::Input("--pairs must be at least 2".into()));
            }
            Some(McConfig {
                pairs: args.pairs,
                seed,
            })
        }
        _ => None,
    };
    let perturbations = args.perturbations.zip(args.seed);
    let report = analyze(&flow, AnalysisOptions { mc, perturbations })?;

    if let (Some(path), Some(count), Some(seed)) = (&args.dump_paths, args.dump_count, args.seed) {
        dump_paths(&build_kernel(&flow)?, path, count, seed)?;
    }
    emit(args.out.as_deref(), &report.to_json())?;
    eprintln!("E_edge={:.12} E_vertex={:.12}", report.e_edge, report.e_vertex);
    if let Some(mc) = report.mc {
        eprintln!(
            "sampled ({} pairs, seed {}): E_edge={:.6} ± {:.6} E_vertex={:.6} ± {:.6}",
            mc.pairs, mc.seed, mc.e_edge, mc.e_edge_se, mc.e_vertex, mc.e_vertex_se
        );
    }
    eprintln!("checks passed: {}/{}", report.checks_passed, report.checks_total);
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn check_line(check: &CheckRecord) -> String {
    let mut line = format!(
        "{} {:<40} value={:.6e} bound={:.6e} slack={:.6e}",
        if check.passed { "PASS" } else { "FAIL" },
        check.name,
        check.value,
        check.bound,
        check.slack
    );
    if let Some(detail) = &check.detail {
        line.push_str("  ");
        line.push_str(detail);
    }
    line
}

fn cmd_verify(args: VerifyArgs) -> CmdResult {
    check_tol(args.tol)?;
    let net = read_graph(&args.graph)?;
    let flow = load_flow(&net, args.flow.as_deref(), args.tol)?;
    let checks = verify_flow(&flow, args.perturbations.zip(args.seed));
    println!("# graph_hash={}", net.content_hash());
    for check in &checks {
        println!("{}", check_line(check));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", checks.len() - failed, checks.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn cmd_scan(args: ScanArgs) -> CmdResult {
    check_tol(args.tol)?;
    let family = family_of(args.family, args.d)?;
    let (mode, seed) = match (args.exact, args.seed) {
        (false, Some(seed)) => (ScanMode::Pairs(args.pairs), seed),
        _ => (ScanMode::Exact, 0),
    };
    let table = sit_scan(family, &args.radii.0, mode, seed, args.tol)?;
    let text = match args.format {
        TableFormat::Csv => table.to_csv_string(),
        TableFormat::Json => {
            let mut text = serde_json::to_string_pretty(&table).expect("table serialization cannot fail");
            text.push('\n');
            text
        }
    };
    emit(args.out.as_deref(), &text)?;
    for (r, reason) in &table.failures {
        eprintln!("r={r} failed: {reason}");
    }
    match mode {
        ScanMode::Exact => eprintln!("{family}: {} rows (exact)", table.rows.len()),
        ScanMode::Pairs(pairs) => eprintln!("{family}: {} rows ({pairs} pairs, seed {seed})", table.rows.len()),
    }
    eprintln!("trend: {}", table.trend);
    if table.rows.is_empty() {
        Err(Failure::Numerical("every scan row failed".into()))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Measure(args) => cmd_measure(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Scan(args) => cmd_scan(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Checks => eprintln!("error: one or more checks failed"),
                Failure::Input(msg) => eprintln!("error: {msg}"),
                Failure::Numerical(msg) => eprintln!("numerical failure: {msg}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
