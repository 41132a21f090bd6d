//! `contour`: compute, validate, benchmark and generate contour trees.

mod bench;
mod report;
mod run;
mod validate;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use contour_core::Error;

#[derive(Parser, Debug)]
#[command(name = "contour", version, about = "Contour trees of triangulated terrains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a tree and its run report.
    Compute(ComputeArgs),
    /// Run every algorithm and check that they agree.
    Validate(ValidateArgs),
    /// Sweep a lower-bound family and emit the bound CSV.
    Bench(BenchArgs),
    /// Generate a tent terrain from a path spec.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Alg {
    Paper,
    Csa,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TreeKind {
    Contour,
    Join,
    Split,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "paper")]
    alg: Alg,
    /// Tree to compute; GRAPH inputs always give the join tree.
    #[arg(long, value_enum, default_value = "contour")]
    tree: TreeKind,
    /// Tree output; `.dot` writes DOT, anything else JSON. Defaults to stdout.
    #[arg(long)]
    out_tree: Option<PathBuf>,
    /// Report output; `.csv` writes CSV, anything else JSON.
    #[arg(long)]
    out_report: Option<PathBuf>,
    /// Write every height comparison made by the heaps, one pair per line.
    #[arg(long)]
    log_comparisons: Option<PathBuf>,
    /// Write the heap-operation ledger as JSON lines.
    #[arg(long)]
    log_heap_ops: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Input file; omit when using --random.
    input: Option<PathBuf>,
    /// Random grid size, e.g. 8x8.
    #[arg(long)]
    random: Option<String>,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bound constants c1 and c2.
    #[arg(long = "const", num_args = 1, default_values_t = [8.0, 8.0])]
    consts: Vec<f64>,
    /// Where to write the minimized failing instance.
    #[arg(long, default_value = "contour-failure.txt")]
    dump: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Balanced,
    Path,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "balanced")]
    family: Family,
    /// Smallest exponent k of t = 2^k.
    #[arg(long, default_value_t = 8)]
    from: u32,
    /// Largest exponent, inclusive.
    #[arg(long, default_value_t = 14)]
    to: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "const", num_args = 1, default_values_t = [8.0, 8.0])]
    consts: Vec<f64>,
    /// CSV output; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    spec: PathBuf,
    /// Derive the saddle permutations from this seed instead of the spec.
    #[arg(long)]
    seed: Option<u64>,
    /// Mesh output; defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::Parse(_)) | Failure::Io(_) => 2,
            Failure::Core(Error::Validation(_)) | Failure::Core(Error::Spec(_)) => 3,
            Failure::Core(Error::OracleSize { .. }) => 4,
            Failure::Mismatch(_) => 5,
            Failure::Core(Error::Invariant(_)) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(m) => write!(f, "{m}"),
            Failure::Mismatch(m) => write!(f, "mismatch: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

pub fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

pub fn write(path: Option<&Path>, data: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, data).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn generate(args: &GenerateArgs) -> CliResult<()> {
    use contour_core::lbgen::{gen_contour_family, PathSpec};
    let src = read(&args.spec)?;
    let src = String::from_utf8(src).map_err(|_| Failure::Core(Error::Parse("spec is not UTF-8".into())))?;
    let mut spec = PathSpec::parse(&src)?;
    if let Some(seed) = args.seed {
        spec = spec.with_seed(seed);
    }
    let g = gen_contour_family(&spec)?;
    write(args.out.as_deref(), &g.mesh.to_tmesh())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Compute(a) => run::compute(a),
        Command::Validate(a) => validate::validate(a),
        Command::Bench(a) => bench::bench(a),
        Command::Generate(a) => generate(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("contour: {e}");
            ExitCode::from(e.code())
        }
    }
}
