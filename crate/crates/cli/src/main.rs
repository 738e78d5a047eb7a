//! `arrange`: command-line front end for cellular arrangements.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arrangement::io::{export_matrix_market, parse_obj, read_document, LarDocument};
use arrangement::pipeline::{arrange, ArrangeOptions, Report, Tolerance, DEFAULT_RELATIVE_EPS};
use arrangement::tgw::SeedPolicy;
use arrangement::{scene, Error};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;

/// Exit status for malformed input files.
const EXIT_PARSE: u8 = 2;
/// Exit status for well-formed but illegal input.
const EXIT_VALIDATION: u8 = 3;
/// Exit status when an enabled validity check fails.
const EXIT_CHECK: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "arrange",
    version,
    about = "Chain complexes of segment and polygon arrangements"
)]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the arrangement of a 2D or 3D input complex.
    Arrange(ArrangeArgs),
    /// Convert between OBJ, LAR-JSON and coordinate-format matrices.
    Convert(ConvertArgs),
    /// Write a randomized test scene as LAR-JSON.
    Gen(GenArgs),
}

#[derive(Debug, clap::Args)]
struct ArrangeArgs {
    /// Ambient dimension of the input (2 or 3).
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    dim: u8,
    /// Input LAR-JSON (or OBJ for 3D).
    #[arg(long)]
    input: PathBuf,
    /// Output LAR-JSON with boundary operators.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Snap tolerance relative to the bounding-box diagonal.
    #[arg(long, default_value_t = DEFAULT_RELATIVE_EPS)]
    eps: f64,
    /// Print the Euler characteristic with and without the outer cell.
    #[arg(long)]
    report_euler: bool,
    /// Verify the chain-complex law and the generator count; fail otherwise.
    #[arg(long)]
    check: bool,
    /// Directory for one `.mtx` file per operator.
    #[arg(long, value_name = "DIR")]
    export_mm: Option<PathBuf>,
    /// Seed a shuffled wrapping order instead of lowest-index seeding.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SourceFormat {
    Obj,
    LarJson,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetFormat {
    LarJson,
    Mm,
}

#[derive(Debug, clap::Args)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    from: SourceFormat,
    #[arg(long, value_enum)]
    to: TargetFormat,
    /// Output file (lar-json) or directory (mm).
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SceneKind {
    /// Random segments in the unit square.
    Segments,
    /// Two 2x2x2 cube grids under random rigid motions.
    Cubes,
    /// Randomly placed cubes and tetrahedra.
    Meshes,
}

#[derive(Debug, clap::Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: SceneKind,
    /// Number of segments or meshes.
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Lib(Error),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => EXIT_CHECK,
            Failure::Lib(Error::Parse(_) | Error::UnsupportedFormat(_)) => EXIT_PARSE,
            Failure::Lib(
                Error::Validation(_)
                | Error::DimensionMismatch(_)
                | Error::IndexOutOfRange { .. }
                | Error::DegenerateEdge(_)
                | Error::CoefficientOverflow { .. }
                | Error::NonPlanarFace(_)
                | Error::NonManifoldInput(_),
            ) => EXIT_VALIDATION,
            Failure::Lib(_) => 1,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ARRANGE_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let outcome = match cli.command {
        Command::Arrange(args) => run_arrange(&args),
        Command::Convert(args) => run_convert(&args),
        Command::Gen(args) => run_gen(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Check(msg) => eprintln!("check failed: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn run_arrange(args: &ArrangeArgs) -> Result<(), Failure> {
    let doc = read_document(&args.input)?;
    if doc.dim != usize::from(args.dim) {
        return Err(
            Error::Validation(format!("--dim {} but input has dim {}", args.dim, doc.dim)).into(),
        );
    }
    let input = doc.to_complex()?;
    let opts = ArrangeOptions {
        tolerance: Tolerance::Relative(args.eps),
        policy: args
            .seed
            .map_or(SeedPolicy::LowestIndex, SeedPolicy::Shuffled),
    };
    let (result, report) = arrange(&input, &opts)?;
    print!("{}", render_report(&report, args.report_euler));
    if let Some(path) = &args.output {
        fs::write(path, LarDocument::from_result(&result).to_json()).map_err(Error::from)?;
        info!("wrote {}", path.display());
    }
    if let Some(dir) = &args.export_mm {
        let ops = LarDocument::from_result(&result).operators()?;
        export_matrix_market(dir, &ops)?;
        info!("wrote {} operators to {}", ops.len(), dir.display());
    }
    if args.check {
        let mut failed = Vec::new();
        if !report.chain_complex {
            failed.push("boundary of boundary is not zero");
        }
        if !report.eq1 {
            failed.push("generator count differs from twice the codimension-one cells");
        }
        if !failed.is_empty() {
            return Err(Failure::Check(failed.join("; ")));
        }
    }
    Ok(())
}

fn render_report(r: &Report, euler: bool) -> String {
    let mut s = String::new();
    let names = ["vertices", "edges", "faces", "cells"];
    let _ = writeln!(s, "eps: {:e}", r.eps);
    for (k, &n) in r.counts.iter().enumerate() {
        let outer = if k + 1 == r.counts.len() {
            " (+1 outer)"
        } else {
            ""
        };
        let _ = writeln!(s, "{}: {n}{outer}", names[k]);
    }
    if euler {
        let _ = writeln!(
            s,
            "euler: {} bounded, {} with outer",
            r.euler_bounded, r.euler_with_outer
        );
    }
    let verdict = |ok: bool| if ok { "ok" } else { "FAILED" };
    let _ = writeln!(s, "boundary of boundary: {}", verdict(r.chain_complex));
    let _ = writeln!(s, "generator count: {}", verdict(r.eq1));
    for st in &r.stages {
        let _ = writeln!(s, "time {}: {:.6}s", st.stage, st.seconds);
    }
    s
}

fn run_convert(args: &ConvertArgs) -> Result<(), Failure> {
    let text = fs::read_to_string(&args.input).map_err(Error::from)?;
    let doc = match args.from {
        SourceFormat::Obj => parse_obj(&text)?,
        SourceFormat::LarJson => LarDocument::from_json(&text)?,
    };
    doc.to_complex()?;
    match args.to {
        TargetFormat::LarJson => write(&args.output, &doc.to_json()),
        TargetFormat::Mm => {
            let ops = doc.operators()?;
            export_matrix_market(&args.output, &ops)?;
            Ok(())
        }
    }
}

fn run_gen(args: &GenArgs) -> Result<(), Failure> {
    let doc = match args.kind {
        SceneKind::Segments => {
            let segs = scene::random_segments(args.count, args.seed);
            LarDocument {
                dim: 2,
                verts: segs.iter().flatten().map(|p| p.to_vec()).collect(),
                ev: (0..segs.len()).map(|k| [2 * k, 2 * k + 1]).collect(),
                fv: Vec::new(),
                cv: Vec::new(),
                boundary: Default::default(),
            }
        }
        SceneKind::Cubes => LarDocument::from_complex(&scene::two_cube_grids(args.seed)),
        SceneKind::Meshes => {
            LarDocument::from_complex(&scene::random_mesh_scene(args.count, args.seed))
        }
    };
    write(&args.output, &doc.to_json())
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Lib(Error::from(e)))
}
