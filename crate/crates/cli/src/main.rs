//! Command-line front door: construct spaces, compute norm certificates,
//! and run the verification suites.
//!
//! Exit codes: 0 success, 1 failed verification rows, 2 invalid input,
//! 3 resource limit, 4 internal error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lipfree::error::Error;
use lipfree::io;
use lipfree::norm::{Method, NormOptions};
use lipfree::space::{make_grid, GridKind};
use lipfree::suites::{self, SuiteConfig, SuiteReport};

#[derive(Parser)]
#[command(
    name = "lipfree",
    about = "Exact norms, operators, and bases in Lipschitz free p-spaces \
             over finite pointed p-metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a norm certificate for a molecule.
    Norm(NormArgs),
    /// Run a verification suite and write CSV/JSON reports.
    Verify(VerifyArgs),
    /// Construct a grid space file.
    Grid(GridArgs),
}

#[derive(Args)]
struct NormArgs {
    /// Space file (JSON); optional when the molecule embeds its space.
    #[arg(long)]
    space: Option<PathBuf>,
    /// Molecule file (JSON).
    #[arg(long)]
    molecule: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodFlag::Auto)]
    method: MethodFlag,
    /// Cap for the enumeration oracle.
    #[arg(long, default_value_t = 9)]
    max_points: usize,
    /// Also evaluate the p = 1 norm in exact rational arithmetic
    /// (reported on standard error).
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodFlag {
    Auto,
    Lp,
    Enumerate,
    BoundsOnly,
}

impl From<MethodFlag> for Method {
    fn from(value: MethodFlag) -> Method {
        match value {
            MethodFlag::Auto => Method::Auto,
            MethodFlag::Lp => Method::Lp,
            MethodFlag::Enumerate => Method::Enumerate,
            MethodFlag::BoundsOnly => Method::BoundsOnly,
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// One of qmetric, norms, complement, embed, bases, all.
    #[arg(long)]
    suite: Option<String>,
    /// Comma-separated exponents for the exploratory batteries.
    #[arg(long)]
    p: Option<String>,
    /// Cap for the enumeration oracle.
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for CSV and JSON reports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = machine parallelism).
    #[arg(long)]
    workers: Option<usize>,
    /// Override the additive slack on bound rows.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Flat key-value config file; command-line flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    /// integer:<m>, dyadic:<level>, or custom:<x0,x1,...>.
    #[arg(long)]
    kind: String,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Norm(args) => cmd_norm(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Grid(args) => cmd_grid(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Structural(_) | Error::Parse(_) | Error::Io(_) => ExitCode::from(2),
                Error::Resource { .. } => ExitCode::from(3),
                Error::Internal(_) => ExitCode::from(4),
            }
        }
    }
}

fn cmd_norm(args: NormArgs) -> lipfree::Result<ExitCode> {
    let molecule = match (&args.space, &args.molecule) {
        (Some(space_path), molecule_path) => {
            let space = io::read_space(space_path)?;
            let file_text = std::fs::read_to_string(molecule_path)?;
            let file: io::MoleculeFile = serde_json::from_str(&file_text)
                .map_err(|e| Error::Parse(format!("{}: {e}", molecule_path.display())))?;
            lipfree::Molecule::new(std::sync::Arc::new(space), file.coeffs)?
        }
        (None, molecule_path) => io::read_molecule(molecule_path)?,
    };
    let opts = NormOptions {
        enumerate_cap: args.max_points,
    };
    let cert = lipfree::norm_with(&molecule, args.method.into(), &opts)?;
    println!(
        "{}",
        io::to_json_string(&io::CertificateFile::from_certificate(&cert))?
    );
    if args.exact {
        let exact = lipfree::exact::norm_exact_p1(&molecule)?;
        eprintln!(
            "exact p=1 value: {exact} (~{})",
            lipfree::exact::rational_to_f64(&exact)
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> lipfree::Result<ExitCode> {
    let mut file_values: std::collections::HashMap<String, String> = Default::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    lineno + 1
                ))
            })?;
            file_values.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    let suite = args
        .suite
        .or_else(|| file_values.get("suite").cloned())
        .unwrap_or_else(|| "all".to_string());
    let parse = |text: &str| -> lipfree::Result<f64> {
        text.parse::<f64>()
            .map_err(|e| Error::Parse(format!("bad number {text}: {e}")))
    };
    let mut cfg = SuiteConfig::default();
    if let Some(p_list) = args.p.or_else(|| file_values.get("p").cloned()) {
        cfg.p_values = p_list
            .split(',')
            .map(|s| parse(s.trim()))
            .collect::<lipfree::Result<_>>()?;
        if cfg.p_values.is_empty() || cfg.p_values.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::structural("exponents must lie in (0, 1]"));
        }
    }
    if let Some(v) = args
        .max_points
        .or_else(|| file_values.get("max-points").and_then(|s| s.parse().ok()))
    {
        cfg.max_points = v.min(lipfree::norm::MAX_POINTS);
    }
    if let Some(v) = args
        .seed
        .or_else(|| file_values.get("seed").and_then(|s| s.parse().ok()))
    {
        cfg.seed = v;
    }
    if let Some(v) = args
        .tolerance
        .or_else(|| file_values.get("tolerance").and_then(|s| s.parse().ok()))
    {
        cfg.slack = Some(v);
    }
    let workers = args
        .workers
        .or_else(|| file_values.get("workers").and_then(|s| s.parse().ok()))
        .unwrap_or(0);
    if workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::internal(format!("thread pool: {e}")))?;
    }
    let out_dir = args
        .out
        .or_else(|| file_values.get("out").map(PathBuf::from));

    let reports = suites::run(&suite, &cfg)?;
    let mut total_pass = 0usize;
    let mut total_fail = 0usize;
    for report in &reports {
        print_report(report);
        total_pass += report.passed;
        total_fail += report.failed;
        if let Some(dir) = &out_dir {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{}.csv", report.suite)), report.to_csv())?;
            std::fs::write(
                dir.join(format!("{}.json", report.suite)),
                io::to_json_string(report)?,
            )?;
            for (name, content) in &report.tables {
                std::fs::write(dir.join(name), content)?;
            }
        }
    }
    println!(
        "summary: {total_pass} passed, {total_fail} failed across {} suite(s)",
        reports.len()
    );
    Ok(if total_fail == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn print_report(report: &SuiteReport) {
    println!("suite {}: {} rows", report.suite, report.rows.len());
    let mut seen = std::collections::BTreeSet::new();
    let ids: Vec<&str> = report.rows.iter().map(|r| r.id.as_str()).collect();
    for id in ids {
        if !seen.insert(id) {
            continue;
        }
        let rows: Vec<_> = report.rows.iter().filter(|r| r.id == id).collect();
        let failed = rows.iter().filter(|r| !r.pass).count();
        let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
        let status = if failed == 0 { "PASS" } else { "FAIL" };
        println!(
            "  [{status}] {id}: {} checks, min margin {min_margin:.3e}",
            rows.len()
        );
        if failed > 0 {
            if let Some(first) = rows.iter().find(|r| !r.pass) {
                println!(
                    "         first failure: [{}] measured {:.12e} vs bound {:.12e}",
                    first.instance, first.measured, first.bound
                );
            }
        }
    }
}

fn cmd_grid(args: GridArgs) -> lipfree::Result<ExitCode> {
    let kind = if let Some(m) = args.kind.strip_prefix("integer:") {
        GridKind::IntegerSegment(
            m.parse()
                .map_err(|e| Error::Parse(format!("bad segment size: {e}")))?,
        )
    } else if let Some(level) = args.kind.strip_prefix("dyadic:") {
        GridKind::Dyadic(
            level
                .parse()
                .map_err(|e| Error::Parse(format!("bad dyadic level: {e}")))?,
        )
    } else if let Some(points) = args.kind.strip_prefix("custom:") {
        GridKind::Custom(
            points
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("bad point {s}: {e}")))
                })
                .collect::<lipfree::Result<_>>()?,
        )
    } else {
        return Err(Error::structural(
            "kind must be integer:<m>, dyadic:<level>, or custom:<points>",
        ));
    };
    let grid = make_grid(kind, args.p)?;
    io::write_space(&args.out, &grid.space)?;
    println!("wrote {} ({} points)", args.out.display(), grid.space.n());
    Ok(ExitCode::SUCCESS)
}
