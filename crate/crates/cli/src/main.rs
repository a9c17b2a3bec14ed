use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use scalehom::{Error, ErrorKind};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "scalehom", version, about = "Homology, cohomology and entropy bounds at a cover scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    args: Args,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Args {
    /// Model document (JSON); for `verify`, a document or a directory of them.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,

    /// Cover to work at (the coarse scale where two are involved).
    #[arg(long, global = true)]
    pub cover: Option<String>,

    /// Finer cover: source of induced maps and target of refinement.
    #[arg(long = "fine-cover", global = true)]
    pub fine_cover: Option<String>,

    /// Dimension.
    #[arg(long, global = true, default_value_t = 1)]
    pub q: usize,

    /// Largest join length for entropy estimates.
    #[arg(long = "n-max", global = true, default_value_t = 10)]
    pub n_max: usize,

    #[arg(long = "cap-simplices", global = true, default_value_t = scalehom::scale_algebra::DEFAULT_SIMPLEX_CAP)]
    pub cap_simplices: usize,

    #[arg(long = "cap-arcs", global = true, default_value_t = scalehom::entropy::DEFAULT_ARC_CAP)]
    pub cap_arcs: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output file, written atomically; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Homology basis at a cover.
    Homology,
    /// Cohomology basis at a cover.
    Cohomology,
    /// Matrix of integrals between cohomology and homology bases.
    Pairing,
    /// Decompose, simplify and refine the 1-dimensional homology generators.
    Cycles,
    /// Maps induced by the model's self-map and by refinement.
    Induced,
    /// Characteristic and minimal polynomials, factors and entropy bounds.
    Spectral,
    /// Cover-entropy sequence of the model's map.
    Entropy,
    /// Endomorphism, spectral bound, entropy estimate and their comparison.
    Manning,
    /// Randomized invariant suites, plus document checks with --input.
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Homology => "homology",
            Command::Cohomology => "cohomology",
            Command::Pairing => "pairing",
            Command::Cycles => "cycles",
            Command::Induced => "induced",
            Command::Spectral => "spectral",
            Command::Entropy => "entropy",
            Command::Manning => "manning",
            Command::Verify => "verify",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Input => 2,
        ErrorKind::Precondition => 3,
        ErrorKind::ResourceCap => 4,
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = commands::run(cli.command, &cli.args);
    let (text, code) = match outcome {
        Ok(out) => (out.text, out.code),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let written = match &cli.args.out {
        Some(path) => write_atomically(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
