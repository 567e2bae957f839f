//! Command-line front end: solve, exact, gen, bench.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bpst::gen::{generate, GenSpec};
use bpst::io::{parse_points, render_points, Mode, ResultFile};
use bpst::oracle::{exact_bottleneck_planar_bst_bounded, DEFAULT_BOUND};
use bpst::pipeline::{solve, SolveOptions, BOUND_FACTOR2};
use bpst::svg::{render_svg, stage_svgs, Layers};
use bpst::verify::verify_tree;
use bpst::{Error, Instance};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bpst", version, about = "Plane bichromatic spanning trees with a short longest edge")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a tree with the grid construction and verify it.
    Solve {
        input: PathBuf,
        /// Result file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Decision log, one line per construction step.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Seed for the starting grid offset.
        #[arg(long)]
        grid_offset_seed: Option<u64>,
        /// Directory for one SVG per stage.
        #[arg(long)]
        stages: Option<PathBuf>,
        /// Text dump of the grid cells and final cells.
        #[arg(long)]
        cells: Option<PathBuf>,
    },
    /// Solve exactly by exhaustive search (small inputs only).
    Exact {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Largest accepted instance.
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
    /// Generate a seeded instance.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve every point file in a directory and write a CSV summary.
    Bench {
        dir: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Instances up to this size also get the exact optimum.
        #[arg(long, default_value_t = 9)]
        opt_bound: usize,
        /// Leave the timing column empty so the output is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::MonochromaticInstance { .. } => 3,
        Error::InvariantViolation { .. }
        | Error::AttachFailure { .. }
        | Error::SweepExhausted { .. }
        | Error::ForestRemains { .. }
        | Error::Infeasible => 4,
        _ => 2,
    }
}

fn read_instance(path: &Path) -> Result<Instance, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_points(&text)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

struct SolveArgs {
    input: PathBuf,
    output: Option<PathBuf>,
    svg: Option<PathBuf>,
    trace: Option<PathBuf>,
    grid_offset_seed: Option<u64>,
    stages: Option<PathBuf>,
    cells: Option<PathBuf>,
}

fn run_solve(a: SolveArgs) -> Result<u8, Error> {
    let inst = read_instance(&a.input)?;
    let sol = solve(&inst, &SolveOptions::with_offset_seed(a.grid_offset_seed))?;
    let report = verify_tree(&inst, &sol.edges);
    let result = ResultFile::new(Mode::Solve, &inst, sol.lambda2, sol.edges.clone(), &report);
    write_out(a.output.as_deref(), &result.render())?;
    if let Some(p) = &a.trace {
        write_file(p, &sol.trace.render())?;
    }
    if let Some(p) = &a.svg {
        let layers =
            Layers { complex: sol.complex.as_ref(), edges: Some(&sol.edges), star_edges: sol.star_edges, ..Layers::default() };
        write_file(p, &render_svg(&inst, layers))?;
    }
    if let Some(dir) = &a.stages {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        for (name, svg) in stage_svgs(&inst, &sol) {
            write_file(&dir.join(name), &svg)?;
        }
    }
    if let Some(p) = &a.cells {
        let dump = sol.complex.as_ref().map(|cx| cx.dump()).unwrap_or_default();
        write_file(p, &dump)?;
    }
    if !result.verified() || !result.ratio_bound_ok {
        eprintln!("bpst: verification failed: {:?}", report.crossing_witness);
        return Ok(4);
    }
    Ok(0)
}

fn run_exact(input: &Path, output: Option<&Path>, bound: usize) -> Result<u8, Error> {
    let inst = read_instance(input)?;
    let lambda2 = bpst::bottleneck::compute_lambda(&inst)?.lambda2;
    let r = exact_bottleneck_planar_bst_bounded(&inst, bound)?;
    let report = verify_tree(&inst, &r.witness);
    let result = ResultFile::new(Mode::Exact, &inst, lambda2, r.witness, &report);
    write_out(output, &result.render())?;
    Ok(if result.verified() { 0 } else { 4 })
}

fn run_gen(family: &str, n: usize, seed: u64, output: Option<&Path>) -> Result<u8, Error> {
    let inst = generate(&GenSpec::named(family, n, seed)?)?;
    write_out(output, &render_points(&inst))?;
    Ok(0)
}

const CSV_HEADER: &str = "instance,n,lambda,opt,bottleneck,ratio,ms,status";

/// A CSV row and whether it breaks the tree or ratio guarantee. Per-file
/// errors are recorded in the status column only.
fn bench_row(path: &Path, opt_bound: usize, timing: bool) -> (String, bool) {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let fail = |n: String, status: String| (format!("{name},{n},,,,,,{}", status.replace([',', '\n'], ";")), false);
    let inst = match read_instance(path) {
        Ok(i) => i,
        Err(e) => return fail(String::new(), format!("error: {e}")),
    };
    let n = inst.len().to_string();
    let unit = 10f64.powi(inst.scale() as i32);
    let len = |sq: i128| format!("{:.6}", (sq as f64).sqrt() / unit);
    let start = Instant::now();
    let sol = match solve(&inst, &SolveOptions::default()) {
        Ok(s) => s,
        Err(e) => return fail(n, format!("error: {e}")),
    };
    let ms = start.elapsed().as_millis();
    let report = verify_tree(&inst, &sol.edges);
    let opt = if inst.len() <= opt_bound {
        exact_bottleneck_planar_bst_bounded(&inst, opt_bound).map(|r| len(r.opt2)).unwrap_or_default()
    } else {
        String::new()
    };
    let ratio =
        if sol.lambda2 > 0 { format!("{:.6}", (report.bottleneck2 as f64 / sol.lambda2 as f64).sqrt()) } else { String::new() };
    let ratio_ok = report.bottleneck2 <= BOUND_FACTOR2 * sol.lambda2;
    let status = if !report.is_valid() {
        "invalid-tree"
    } else if !ratio_ok {
        "ratio-violation"
    } else {
        "ok"
    };
    let ms = if timing { ms.to_string() } else { String::new() };
    (
        format!("{name},{n},{},{opt},{},{ratio},{ms},{status}", len(sol.lambda2), len(report.bottleneck2)),
        status != "ok",
    )
}

fn run_bench(dir: &Path, output: Option<&Path>, opt_bound: usize, no_timing: bool) -> Result<u8, Error> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut violated = false;
    for f in &files {
        let (row, bad) = bench_row(f, opt_bound, !no_timing);
        violated |= bad;
        let _ = writeln!(out, "{row}");
    }
    write_out(output, &out)?;
    Ok(if violated { 4 } else { 0 })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match cli.command {
        Command::Solve { input, output, svg, trace, grid_offset_seed, stages, cells } => {
            run_solve(SolveArgs { input, output, svg, trace, grid_offset_seed, stages, cells })
        }
        Command::Exact { input, output, bound } => run_exact(&input, output.as_deref(), bound),
        Command::Gen { family, n, seed, output } => run_gen(&family, n, seed, output.as_deref()),
        Command::Bench { dir, output, opt_bound, no_timing } => run_bench(&dir, output.as_deref(), opt_bound, no_timing),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("bpst: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
