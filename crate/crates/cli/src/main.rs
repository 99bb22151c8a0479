//! Command-line front end for scenario files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hiernet::exec::Execution;
use hiernet::vectorfield::{Orientation, Variant};
use hiernet::workbench::{self, exit, load_scenario, termination_line, PlotOptions, Scenario, WorkbenchError};

const EXIT_CODES: &str = "\
Exit codes:
  0  success (verification passed)
  1  verification failure, or a scenario that violates an invariant (validate)
  2  input error: unreadable file, malformed document, invalid value, bad flag
  3  integration failure (divergence or step-size underflow)";

#[derive(Parser)]
#[command(name = "hiernet", version, about = "Simulate and verify hierarchical heteroclinic networks", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate a scenario without integrating.
    #[command(after_help = EXIT_CODES)]
    Validate { scenario: PathBuf },
    /// Integrate a scenario; write timeseries.csv, itinerary.txt and optional SVG panels.
    #[command(after_help = EXIT_CODES)]
    Simulate {
        scenario: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Write one SVG panel per block.
        #[arg(long)]
        plots: bool,
        /// Plot panels on a logarithmic axis (implies --plots).
        #[arg(long)]
        log_plots: bool,
    },
    /// Run the full realization check and write report.txt.
    #[command(after_help = EXIT_CODES)]
    Verify {
        scenario: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Run independent integrations one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Run witness trajectories for superstructure edges and write witness.txt.
    #[command(after_help = EXIT_CODES)]
    Witness {
        scenario: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Source vertex of a single edge (1-based); all edges when omitted.
        #[arg(long, requires = "to")]
        from: Option<usize>,
        /// Target vertex of a single edge (1-based).
        #[arg(long, requires = "from")]
        to: Option<usize>,
        /// Amplitudes; defaults to the scenario's witness_deltas.
        #[arg(long = "delta")]
        deltas: Vec<f64>,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_parser = parse_orientation)]
    orientation: Option<Orientation>,
    #[arg(long, value_parser = parse_variant)]
    variant: Option<Variant>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    sample_dt: Option<f64>,
}

fn parse_orientation(s: &str) -> Result<Orientation, String> {
    s.parse()
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn fail(e: &WorkbenchError) -> u8 {
    eprintln!("error: {e}");
    e.exit_code()
}

fn load(path: &Path, run: &RunArgs) -> Result<Scenario, u8> {
    let mut s = load_scenario(path).map_err(|e| fail(&e))?;
    if let Some(o) = run.orientation {
        s.set_orientation(o);
    }
    if let Some(v) = run.variant {
        s.set_variant(v);
    }
    if let Some(t) = run.t_end {
        s.integrator.t_end = t;
    }
    if let Some(dt) = run.sample_dt {
        s.integrator.sample_dt = dt;
    }
    if let Err(e) = s.integrator.validate() {
        eprintln!("error: {e}");
        return Err(exit::INPUT_ERROR);
    }
    for w in s.params.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(s)
}

fn validate(path: &Path) -> u8 {
    match load_scenario(path) {
        Ok(s) => {
            let h = s.hierarchy();
            println!("ok: {}", path.display());
            println!("  superstructure: {} vertices, {} edges", h.n_super(), h.superstructure().n_edges());
            for (j, d) in h.substructures().iter().enumerate() {
                println!("  G_{}: {} vertices, {} edges", j + 1, d.n_vertices(), d.n_edges());
            }
            let ts = s.params.timescales();
            println!(
                "  epsilon {}, phi {}, psi {}, omega {}, {} variant, {} orientation",
                s.params.epsilon(),
                ts.phi,
                ts.psi,
                ts.omega,
                s.params.variant().as_str(),
                s.params.orientation().as_str()
            );
            for w in s.params.warnings() {
                println!("warning: {w}");
            }
            exit::PASS
        }
        Err(WorkbenchError::Hierarchy(vs)) => {
            eprintln!("invalid hierarchy in {}:", path.display());
            for v in vs {
                eprintln!("  {v}");
            }
            exit::VERIFICATION_FAILURE
        }
        Err(e) if e.is_violation() => {
            eprintln!("error: {e}");
            exit::VERIFICATION_FAILURE
        }
        Err(e) => fail(&e),
    }
}

fn simulate(path: &Path, run: &RunArgs, plots: Option<PlotOptions>) -> Result<u8, u8> {
    let s = load(path, run)?;
    let out = workbench::simulate(&s, &run.out, plots).map_err(|e| fail(&e))?;
    let traj = &out.trajectory;
    println!("{} samples to t = {}", traj.times.len(), traj.t_last());
    for (r, c) in out.itineraries.reports.iter().zip(&out.itineraries.checks) {
        let seq: Vec<String> = r.sequence().iter().map(|v| v.to_string()).collect();
        println!("{:<6} {}{}", r.level.to_string(), seq.join(" "), if c.pass { "" } else { "  (violations)" });
    }
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    if traj.is_completed() {
        Ok(exit::PASS)
    } else {
        eprintln!("error: integration stopped: {}", termination_line(&traj.termination));
        Ok(exit::INTEGRATION_FAILURE)
    }
}

fn verify(path: &Path, run: &RunArgs, sequential: bool) -> Result<u8, u8> {
    let s = load(path, run)?;
    let report = workbench::verify(&s, &run.out, execution(sequential)).map_err(|e| fail(&e))?;
    print!("{report}");
    println!("wrote {}", run.out.join("report.txt").display());
    Ok(if report.pass { exit::PASS } else { exit::VERIFICATION_FAILURE })
}

fn witness(path: &Path, run: &RunArgs, edge: Option<(usize, usize)>, deltas: &[f64], sequential: bool) -> Result<u8, u8> {
    let s = load(path, run)?;
    let edge = match edge {
        Some((j, k)) if j >= 1 && k >= 1 => Some((j - 1, k - 1)),
        Some(_) => {
            eprintln!("error: vertices are numbered from 1");
            return Err(exit::INPUT_ERROR);
        }
        None => None,
    };
    let deltas = if deltas.is_empty() { s.analysis.witness_deltas.clone() } else { deltas.to_vec() };
    let results = workbench::witnesses(&s, edge, &deltas, &run.out, execution(sequential)).map_err(|e| match e {
        WorkbenchError::Analysis(hiernet::analysis::AnalysisError::Integration(_)) => fail(&e),
        WorkbenchError::Analysis(_) => {
            eprintln!("error: {e}");
            exit::INPUT_ERROR
        }
        e => fail(&e),
    })?;
    for w in &results {
        println!("{w}");
    }
    let pass = results.iter().all(|w| w.converged && w.backward.pass);
    Ok(if pass { exit::PASS } else { exit::VERIFICATION_FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Validate { scenario } => Ok(validate(scenario)),
        Command::Simulate { scenario, run, plots, log_plots } => {
            let opts = (*plots || *log_plots).then_some(PlotOptions { log_scale: *log_plots, ..Default::default() });
            simulate(scenario, run, opts)
        }
        Command::Verify { scenario, run, sequential } => verify(scenario, run, *sequential),
        Command::Witness { scenario, run, from, to, deltas, sequential } => {
            witness(scenario, run, from.zip(*to), deltas, *sequential)
        }
    };
    ExitCode::from(code.unwrap_or_else(|c| c))
}
