//! Command-line front end: run the matching pipeline, evaluate results,
//! solve standalone QUBO files, and serve the line-based solver protocol.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::Serialize;

use cyclematch::error::Error;
use cyclematch::eval::{pck_auc, pck_grid};
use cyclematch::mesh::{
    geodesic_all_pairs, load_mesh, load_mesh_with_labels, write_off, Mesh, MeshFormat,
};
use cyclematch::perm::Permutation;
use cyclematch::pipeline::{initialize_state, match_collection, RunConfig, ShapeSet};
use cyclematch::qubo::QuboProblem;
use cyclematch::solve::wire::{SolveRequest, SolveResponse, WireSample};
use cyclematch::solve::{Backend, SaParams};

#[derive(Parser)]
#[command(name = "cyclematch", version, about = "Cycle-consistent shape collection matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the matching pipeline as described by a config file.
    Match {
        /// TOML run configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Score predictions against ground truth, or average prior summaries.
    Eval {
        /// Mesh the errors are measured on (the maps' target shape).
        #[arg(long, required_unless_present = "group")]
        target_mesh: Option<PathBuf>,
        /// Predicted permutation file; repeat per pair, paired with --truth.
        #[arg(long = "pred", required_unless_present = "group")]
        preds: Vec<PathBuf>,
        /// Ground-truth permutation file; repeat per pair.
        #[arg(long = "truth", required_unless_present = "group")]
        truths: Vec<PathBuf>,
        /// Where pck.csv and summary.json go.
        #[arg(long, required_unless_present = "group")]
        out_dir: Option<PathBuf>,
        /// Average the auc field over existing summary.json files instead.
        #[arg(long, num_args = 1.., conflicts_with_all = ["target_mesh", "preds", "truths", "out_dir"])]
        group: Vec<PathBuf>,
    },
    /// Solve one QUBO problem file and print the result as JSON.
    SolveQubo {
        /// Problem JSON (num_vars, constant, entries).
        #[arg(long)]
        input: PathBuf,
        /// exact, sa, or external:<cmd>.
        #[arg(long, default_value = "sa")]
        backend: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        num_reads: Option<usize>,
        #[arg(long)]
        num_sweeps: Option<usize>,
        /// Result file; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write descriptor-based initial permutations without refinement.
    Init {
        #[arg(long)]
        config: PathBuf,
    },
    /// Displace mesh vertices along their normals with seeded Gaussian noise.
    Perturb {
        #[arg(long)]
        input: PathBuf,
        /// Output mesh path (OFF).
        #[arg(long)]
        output: PathBuf,
        /// Noise variance; standard deviation is its square root.
        #[arg(long)]
        sigma2: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Answer one line-protocol solve request on stdin (reference external solver).
    Serve {
        /// exact or sa.
        #[arg(long, default_value = "sa")]
        backend: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Stable nonzero exit code per error class.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Param { .. } => 3,
        Error::Io { .. } => 4,
        Error::Parse { .. } => 5,
        Error::Topology { .. } => 6,
        Error::Dim { .. } => 7,
        Error::Solver { .. } | Error::Protocol { .. } => 8,
        Error::Eigen { .. } => 9,
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Match { config } => cmd_match(&config),
        Command::Eval { target_mesh, preds, truths, out_dir, group } => {
            if group.is_empty() {
                cmd_eval(&target_mesh.unwrap(), &preds, &truths, &out_dir.unwrap())
            } else {
                cmd_eval_group(&group)
            }
        }
        Command::SolveQubo { input, backend, seed, num_reads, num_sweeps, output } => {
            cmd_solve_qubo(&input, &backend, seed, num_reads, num_sweeps, output.as_deref())
        }
        Command::Init { config } => cmd_init(&config),
        Command::Perturb { input, output, sigma2, seed } => {
            cmd_perturb(&input, &output, sigma2, seed)
        }
        Command::Serve { backend } => cmd_serve(&backend),
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn load_shapes(config: &RunConfig) -> Result<ShapeSet, Error> {
    if let Some(labels) = &config.side_labels {
        let meshes = config
            .shapes
            .iter()
            .zip(labels)
            .map(|(path, label)| {
                load_mesh_with_labels(path, MeshFormat::from_path(path)?, label)
            })
            .collect::<Result<Vec<Mesh>, Error>>()?;
        ShapeSet::new(meshes)
    } else {
        let meshes = config
            .shapes
            .iter()
            .map(|path| load_mesh(path, MeshFormat::from_path(path)?))
            .collect::<Result<Vec<Mesh>, Error>>()?;
        ShapeSet::new(meshes)
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::protocol(format!("serializing {}: {e}", path.display())))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn write_perms(dir: &Path, state: &cyclematch::MatchingState) -> Result<(), Error> {
    for i in 0..state.n_shapes() {
        let path = dir.join(format!("perm_{i:03}.txt"));
        state.to_anchor(i).write_to(&path)?;
    }
    Ok(())
}

fn cmd_match(config_path: &Path) -> Result<(), Error> {
    let config = RunConfig::from_path(config_path)?;
    let params = config.params()?;
    let shapes = load_shapes(&config)?;
    let started_at = unix_now();
    let outcome = match_collection(&shapes, &params)?;
    let finished_at = unix_now();

    ensure_dir(&config.output_dir)?;
    write_perms(&config.output_dir, &outcome.state)?;
    outcome.log.write_csv(&config.output_dir.join("energy_log.csv"))?;

    #[derive(Serialize)]
    struct RunSummary<'a> {
        anchor: usize,
        initial_energy: f64,
        final_energy: f64,
        iterations: usize,
        config: &'a RunConfig,
        started_at: u64,
        finished_at: u64,
    }
    write_json(
        &config.output_dir.join("run_summary.json"),
        &RunSummary {
            anchor: outcome.anchor,
            initial_energy: outcome.initial_energy,
            final_energy: outcome.final_energy,
            iterations: outcome.log.rows().len().saturating_sub(1),
            config: &config,
            started_at,
            finished_at,
        },
    )?;
    println!(
        "anchor {} energy {} -> {} ({} iterations) -> {}",
        outcome.anchor,
        outcome.initial_energy,
        outcome.final_energy,
        outcome.log.rows().len().saturating_sub(1),
        config.output_dir.display()
    );
    Ok(())
}

fn cmd_init(config_path: &Path) -> Result<(), Error> {
    let config = RunConfig::from_path(config_path)?;
    let params = config.params()?;
    let shapes = load_shapes(&config)?;
    let state = initialize_state(&shapes, params.num_eigs, params.num_times)?;

    ensure_dir(&config.output_dir)?;
    write_perms(&config.output_dir, &state)?;
    #[derive(Serialize)]
    struct InitSummary {
        anchor: usize,
        n_shapes: usize,
        n_vertices: usize,
    }
    write_json(
        &config.output_dir.join("init_summary.json"),
        &InitSummary {
            anchor: state.anchor(),
            n_shapes: state.n_shapes(),
            n_vertices: state.n_vertices(),
        },
    )?;
    println!("anchor {} -> {}", state.anchor(), config.output_dir.display());
    Ok(())
}

/// Metadata stating the curve conventions, carried in every summary.
#[derive(Serialize)]
struct GridInfo {
    start: f64,
    stop: f64,
    points: usize,
    auc_normalized_by_span: bool,
}

fn grid_info() -> GridInfo {
    let grid = pck_grid();
    GridInfo {
        start: grid[0],
        stop: grid[grid.len() - 1],
        points: grid.len(),
        auc_normalized_by_span: true,
    }
}

fn cmd_eval(
    target_mesh: &Path,
    preds: &[PathBuf],
    truths: &[PathBuf],
    out_dir: &Path,
) -> Result<(), Error> {
    if preds.len() != truths.len() {
        return Err(Error::param(format!(
            "{} --pred files but {} --truth files",
            preds.len(),
            truths.len()
        )));
    }
    let mesh = load_mesh(target_mesh, MeshFormat::from_path(target_mesh)?)?;
    let field = geodesic_all_pairs(&mesh);
    let mut pooled = Vec::new();
    for (pred_path, truth_path) in preds.iter().zip(truths) {
        let pred = Permutation::read_from(pred_path)?;
        let truth = Permutation::read_from(truth_path)?;
        pooled.extend(cyclematch::eval::geodesic_error(&pred, &truth, &field)?);
    }
    let report = pck_auc(&pooled, &pck_grid())?;

    ensure_dir(out_dir)?;
    let mut csv = String::from("threshold,fraction\n");
    for (t, f) in &report.curve {
        csv.push_str(&format!("{t},{f}\n"));
    }
    let csv_path = out_dir.join("pck.csv");
    std::fs::write(&csv_path, csv).map_err(|e| Error::io(&csv_path, e))?;

    #[derive(Serialize)]
    struct EvalSummary {
        auc: f64,
        n: usize,
        num_pairs: usize,
        grid: GridInfo,
    }
    write_json(
        &out_dir.join("summary.json"),
        &EvalSummary {
            auc: report.auc,
            n: pooled.len(),
            num_pairs: preds.len(),
            grid: grid_info(),
        },
    )?;
    println!("auc {}", report.auc);
    Ok(())
}

fn cmd_eval_group(summaries: &[PathBuf]) -> Result<(), Error> {
    let mut aucs = Vec::new();
    for path in summaries {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::parse(Some(path.clone()), None, e.to_string()))?;
        let auc = value
            .get("auc")
            .and_then(|v| v.as_f64())
            .ok_or_else(|| {
                Error::parse(Some(path.clone()), None, "no numeric auc field".to_string())
            })?;
        aucs.push(auc);
    }
    let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
    println!("{{\"auc_mean\":{mean},\"num_groups\":{}}}", aucs.len());
    Ok(())
}

fn cmd_solve_qubo(
    input: &Path,
    backend: &str,
    seed: u64,
    num_reads: Option<usize>,
    num_sweeps: Option<usize>,
    output: Option<&Path>,
) -> Result<(), Error> {
    let problem = QuboProblem::read_json(input)?;
    let mut backend = Backend::parse(backend)?;
    match &mut backend {
        Backend::Sa(params) => {
            if let Some(r) = num_reads {
                params.num_reads = r;
            }
            if let Some(s) = num_sweeps {
                params.num_sweeps = s;
            }
        }
        Backend::External { num_reads: r, .. } => {
            if let Some(n) = num_reads {
                *r = n;
            }
        }
        Backend::Exact => {}
    }
    let result = backend.build().solve(&problem, seed)?;

    #[derive(Serialize)]
    struct SolveOutput {
        bits: Vec<u8>,
        energy: f64,
        objective: f64,
        num_samples: usize,
        backend: &'static str,
    }
    let out = SolveOutput {
        bits: result.best.bits.clone(),
        energy: result.best.energy,
        objective: result.best.energy + problem.constant(),
        num_samples: result.samples.len(),
        backend: backend.name(),
    };
    match output {
        Some(path) => write_json(path, &out)?,
        None => {
            let text = serde_json::to_string(&out)
                .map_err(|e| Error::protocol(format!("serializing result: {e}")))?;
            println!("{text}");
        }
    }
    Ok(())
}

fn cmd_perturb(input: &Path, output: &Path, sigma2: f64, seed: u64) -> Result<(), Error> {
    let mesh = load_mesh(input, MeshFormat::from_path(input)?)?;
    let noisy = mesh.perturb_along_normals(sigma2, seed)?;
    match MeshFormat::from_path(output)? {
        MeshFormat::Off => write_off(&noisy, output)?,
        MeshFormat::PlyAscii => {
            return Err(Error::param(
                "perturb writes OFF only; use a .off output path".to_string(),
            ))
        }
    }
    println!("{} -> {}", input.display(), output.display());
    Ok(())
}

fn cmd_serve(backend: &str) -> Result<(), Error> {
    let backend = Backend::parse(backend)?;
    if matches!(backend, Backend::External { .. }) {
        return Err(Error::param("serve backend must be exact or sa".to_string()));
    }
    let stdin = std::io::stdin();
    let mut line = String::new();
    stdin
        .lock()
        .read_line(&mut line)
        .map_err(|e| Error::protocol(format!("reading request: {e}")))?;
    if line.trim().is_empty() {
        return Err(Error::protocol("empty request".to_string()));
    }
    let request: SolveRequest = serde_json::from_str(line.trim())
        .map_err(|e| Error::protocol(format!("bad request: {e}")))?;
    let problem = request.to_problem()?;
    let solver = match backend {
        Backend::Exact => Backend::Exact,
        Backend::Sa(_) => Backend::Sa(SaParams {
            num_reads: request.num_reads.max(1),
            num_sweeps: SaParams::default().num_sweeps,
        }),
        Backend::External { .. } => unreachable!(),
    }
    .build();
    let result = solver.solve(&problem, request.seed)?;
    let response = SolveResponse {
        samples: result
            .samples
            .iter()
            .map(|s| WireSample { bits: s.bits.clone(), energy: s.energy })
            .collect(),
    };
    let text = serde_json::to_string(&response)
        .map_err(|e| Error::protocol(format!("serializing response: {e}")))?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{text}").map_err(|e| Error::protocol(format!("writing response: {e}")))?;
    Ok(())
}
