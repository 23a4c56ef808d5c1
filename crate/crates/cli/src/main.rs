use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flexpoly::catalog;
use flexpoly::construction::{assemble, ConstructionPlan, FlexiblePolyhedron};
use flexpoly::io::{export_obj, export_trace, frame_path, frames, load_plan, report_json, serialize_plan, snapshot, write_obj_frames};
use flexpoly::octahedron::flexion_range;
use flexpoly::verification::{invariant_sweep, verify, InvariantTolerances, VerifyOptions};
use flexpoly::Exec;

/// Build, flex and certify flexible polyhedra from construction plans.
#[derive(Parser)]
#[command(name = "flexpoly", version)]
struct Cli {
    /// Evaluate samples on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble and write one snapshot (.json mesh or .obj).
    Build {
        plan: PlanSource,
        #[arg(short, long)]
        output: PathBuf,
        /// Flexion variable in degrees; the plan seed by default.
        #[arg(long)]
        phi: Option<f64>,
    },
    /// Invariant sweep written as CSV.
    Sweep {
        plan: PlanSource,
        /// Start in degrees; the lower end of the flexion range by default.
        #[arg(long)]
        from: Option<f64>,
        /// End in degrees; the upper end of the flexion range by default.
        #[arg(long)]
        to: Option<f64>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Flexibility certificate, invariant suite and rigidity survey.
    Verify {
        plan: PlanSource,
        /// Relative drift tolerance for edge lengths and face areas.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        rigidity_samples: usize,
        /// Also write the full report as JSON.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Animation frames over the flexion range.
    Export {
        plan: PlanSource,
        #[arg(long, default_value_t = 20)]
        frames: usize,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Obj)]
        format: Format,
    },
    /// Flexion interval endpoints in degrees.
    Flexrange { plan: PlanSource },
    /// List the named plans, or print one as a plan document.
    Catalog { key: Option<String> },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Obj,
    Json,
}

/// A plan file, or `catalog:<key>`.
#[derive(Clone)]
struct PlanSource(String);

impl std::str::FromStr for PlanSource {
    type Err = std::convert::Infallible;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(PlanSource(s.to_string()))
    }
}

enum Failure {
    Input(String),
    Verification(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_plan(src: &PlanSource) -> Result<ConstructionPlan, Failure> {
    if let Some(key) = src.0.strip_prefix("catalog:") {
        return catalog::plan(key).ok_or_else(|| Failure::Input(format!("no catalog plan named {key:?}")));
    }
    let text = std::fs::read_to_string(&src.0).map_err(|e| Failure::Input(format!("{}: {e}", src.0)))?;
    load_plan(&text).map_err(|e| Failure::Input(format!("{}: {e}", src.0)))
}

fn build(src: &PlanSource) -> Result<FlexiblePolyhedron, Failure> {
    Ok(assemble(&read_plan(src)?)?)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match cli.command {
        Command::Build { plan, output, phi } => {
            let poly = build(&plan)?;
            let s = snapshot(&poly, phi.map_or(poly.seed, f64::to_radians))?;
            let text = match output.extension().and_then(|e| e.to_str()) {
                Some("obj") => export_obj(&s),
                Some("json") => s.to_json(),
                _ => return Err(Failure::Input(format!("{}: output must end in .obj or .json", output.display()))),
            };
            write(&output, &text)?;
            println!("{}: {} vertices, {} faces at phi = {} deg", poly.name, poly.vertices.len(), poly.faces.len(), s.phi.to_degrees());
        }
        Command::Sweep { plan, from, to, steps, output } => {
            let poly = build(&plan)?;
            let range = flexion_range(&poly, poly.seed)?;
            let lo = from.map_or(range.lo, f64::to_radians);
            let hi = to.map_or(range.hi, f64::to_radians);
            if steps < 2 || !(hi > lo) {
                return Err(Failure::Input(format!("need --steps >= 2 and --to above --from, got {steps} steps over [{lo}, {hi}]")));
            }
            let grid: Vec<f64> = (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect();
            let report = invariant_sweep(&poly, &grid, &InvariantTolerances::default(), exec)?;
            write(&output, &export_trace(&report))?;
            println!("{}: {} samples, invariants {}", poly.name, report.samples, if report.pass { "pass" } else { "FAIL" });
        }
        Command::Verify { plan, tol, samples, rigidity_samples, output } => {
            let poly = build(&plan)?;
            let mut opts = VerifyOptions { samples, rigidity_samples, exec, ..VerifyOptions::default() };
            if let Some(t) = tol {
                if !(t.is_finite() && t > 0.0) {
                    return Err(Failure::Input(format!("tolerance {t} must be positive")));
                }
                opts.tolerances.length_drift = t;
                opts.tolerances.area_drift = t;
            }
            let report = verify(&poly, &opts)?;
            if let Some(path) = output {
                write(&path, &report_json(&report))?;
            }
            let c = &report.certificate;
            let t = &report.topology;
            println!("model        {}", report.model);
            println!("topology     V = {}, E = {}, F = {}, Euler = {}, genus = {:?}", t.vertices, t.edges, t.faces, t.euler, t.genus);
            println!("verdict      {:?}", c.verdict);
            println!("range        [{}, {}] deg{}", c.range.lo.to_degrees(), c.range.hi.to_degrees(), if c.range.periodic { ", periodic" } else { "" });
            println!("residual     {:e} (tolerance {:e})", c.max_residual, c.residual_tolerance);
            println!("dihedrals    max variation {} rad", c.max_dihedral_variation);
            for f in &c.flat_positions {
                println!("flat         phi = {} deg, deviation {:e}", f.phi.to_degrees(), f.deviation);
            }
            println!("rigidity     dim {}..{}, {} of samples flexible", report.rigidity.min_dim, report.rigidity.max_dim, report.rigidity.fraction_flexible);
            for r in report.invariants.records.iter().filter(|r| !r.pass) {
                let mark = if r.enforced { "FAIL" } else { "note" };
                println!("{mark}         {}: {:?} over [{}, {}]", r.name, r.check, r.min, r.max);
            }
            println!("result       {}", if report.pass { "PASS" } else { "FAIL" });
            if !report.pass {
                return Err(Failure::Verification(format!("{} did not verify", report.model)));
            }
        }
        Command::Export { plan, frames: n, outdir, format } => {
            if n == 0 {
                return Err(Failure::Input("need at least one frame".into()));
            }
            let poly = build(&plan)?;
            let fr = frames(&poly, n)?;
            match format {
                Format::Obj => {
                    write_obj_frames(&outdir, &poly.name, &fr)?;
                }
                Format::Json => {
                    std::fs::create_dir_all(&outdir)?;
                    for (k, f) in fr.iter().enumerate() {
                        write(&frame_path(&outdir, &poly.name, k, "json"), &f.to_json())?;
                    }
                }
            }
            println!("{}: {} frames in {}", poly.name, fr.len(), outdir.display());
        }
        Command::Flexrange { plan } => {
            let poly = build(&plan)?;
            let r = flexion_range(&poly, poly.seed)?;
            println!("{} {}{}", r.lo.to_degrees(), r.hi.to_degrees(), if r.periodic { " periodic" } else { "" });
        }
        Command::Catalog { key: None } => {
            for e in catalog::entries() {
                println!("{:<20} {}", e.key, e.summary);
            }
        }
        Command::Catalog { key: Some(key) } => {
            let plan = catalog::plan(&key).ok_or_else(|| Failure::Input(format!("no catalog plan named {key:?}")))?;
            print!("{}", serialize_plan(&plan));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("flexpoly: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("flexpoly: {msg}");
            ExitCode::from(2)
        }
    }
}
