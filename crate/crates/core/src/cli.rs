//! `ecdvqe encode | solve | sweep`.
//!
//! Every file written by `solve` and `sweep` embeds the run manifest, and no
//! file carries timing data, so rerunning a manifest in exact mode rewrites
//! byte-identical outputs.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::hilbert::ModeLayout;
use crate::noise::NoiseConfig;
use crate::qaoa::{run_qaoa, sweep_layers, sweep_to_tsv, QaoaConfig};
use crate::qubo::{
    exact_ground_state, to_pauli_hamiltonian, to_unconstrained, BinaryProblem, PauliTerm, PauliZHamiltonian, ProblemFile,
};
use crate::vqe::{extract_solution, outcome_label, run_multi_seed, solution_from_bits, NoiseMode, OptimizerConfig};

#[derive(Parser, Debug)]
#[command(name = "ecdvqe", version, about = "Binary optimization on one qubit coupled to bosonic modes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the Pauli-Z Hamiltonian of a problem file.
    Encode(EncodeArgs),
    /// Solve a problem file and write trace, histogram and solution files.
    Solve(SolveArgs),
    /// Repeat a solve over a list of κτ, depth or layer values.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// Largest qumode in suggested layouts, in qubit slots.
    #[arg(long, default_value_t = 4)]
    pub max_group_bits: usize,
    /// Also write the term list as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Solver {
    EcdVqe,
    Qaoa,
    Exact,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModeArg {
    Reoptimize,
    Frozen,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, value_enum, default_value_t = Solver::EcdVqe)]
    pub solver: Solver,
    /// Fock cutoff per qumode, e.g. 8,8. Defaults to a balanced two-mode split.
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<usize>>,
    /// ECD blocks.
    #[arg(long, default_value_t = 5)]
    pub depth: usize,
    /// QAOA layers.
    #[arg(long, default_value_t = 20)]
    pub layers: usize,
    /// QAOA random restarts.
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// ECD-VQE runs one optimization per seed; QAOA uses the first as its base seed.
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    pub seeds: Vec<u64>,
    /// Measurement shots per cost evaluation, 0 for exact probabilities.
    #[arg(long, default_value_t = 0)]
    pub shots: usize,
    #[arg(long, default_value_t = 0.0)]
    pub kappa_tau: f64,
    #[arg(long, value_enum, default_value_t = NoiseModeArg::Reoptimize)]
    pub noise_mode: NoiseModeArg,
    /// Defaults to 200 for ECD-VQE and 150 for QAOA.
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Upper end of the initial displacement magnitudes.
    #[arg(long, default_value_t = 0.2)]
    pub initial_scale: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    KappaTau,
    Depth,
    Layers,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long, value_enum)]
    pub axis: Axis,
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
}

/// Everything needed to reproduce a run.
#[derive(Serialize, Debug, Clone)]
pub struct RunManifest {
    pub problem: String,
    pub solver: Solver,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_mode: Option<NoiseMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_scale: Option<f64>,
    pub out: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Schema(_)
        | Error::Json(_)
        | Error::InvalidProblem(_)
        | Error::LengthMismatch { .. }
        | Error::InvalidLayout(_)
        | Error::InvalidParameter(_) => 2,
        Error::SizeGuard { .. } => 4,
        _ => 3,
    }
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: &Command, stdout: &mut impl Write) -> Result<()> {
    match command {
        Command::Encode(args) => encode(args, stdout),
        Command::Solve(args) => {
            let manifest = manifest_for(args, None);
            solve(args, &manifest, stdout)
        }
        Command::Sweep(args) => sweep(args, stdout),
    }
}

fn load_problem(path: &Path) -> Result<BinaryProblem> {
    let text = fs::read_to_string(path).map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
    ProblemFile::from_json(&text)?.into_problem()
}

fn hamiltonian(problem: &BinaryProblem) -> PauliZHamiltonian {
    to_pauli_hamiltonian(&to_unconstrained(problem))
}

/// Qubit plus two qumodes splitting the remaining slots as evenly as possible.
pub fn default_layout(num_qubits: usize) -> Result<ModeLayout> {
    let rest = num_qubits.saturating_sub(1);
    match rest {
        0 => Err(Error::InvalidLayout(format!("{num_qubits} qubit register leaves no slots for a qumode"))),
        1 => ModeLayout::new(num_qubits, &[2]),
        _ => ModeLayout::new(num_qubits, &[1 << (rest / 2), 1 << (rest - rest / 2)]),
    }
}

fn layout_for(args: &SolveArgs, num_qubits: usize) -> Result<ModeLayout> {
    match &args.cutoffs {
        Some(c) => ModeLayout::new(num_qubits, c),
        None => default_layout(num_qubits),
    }
}

fn encode(args: &EncodeArgs, stdout: &mut impl Write) -> Result<()> {
    let problem = load_problem(&args.problem)?;
    let h = hamiltonian(&problem);
    writeln!(stdout, "qubits: {}", h.num_qubits())?;
    writeln!(stdout, "terms: {}", h.len())?;
    for t in h.terms() {
        let word: Vec<String> = t.qubits.iter().map(|q| format!("Z{q}")).collect();
        let word = if word.is_empty() { "I".to_string() } else { word.join(" ") };
        writeln!(stdout, "{:>+14.6}  {word}", t.coefficient)?;
    }
    writeln!(stdout, "suggested layouts:")?;
    for layout in ModeLayout::suggestions(h.num_qubits(), args.max_group_bits) {
        writeln!(stdout, "  --cutoffs {:<8} {layout}", join(&layout.cutoffs()))?;
    }
    if let Some(path) = &args.out {
        fs::write(path, serde_json::to_string_pretty(&hamiltonian_json(&h))? + "\n")?;
    }
    Ok(())
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn manifest_for(args: &SolveArgs, sweep: Option<&SweepArgs>) -> RunManifest {
    let ecd = args.solver == Solver::EcdVqe;
    let qaoa = args.solver == Solver::Qaoa;
    let default_iters = if qaoa { 150 } else { 200 };
    RunManifest {
        problem: args.problem.display().to_string(),
        solver: args.solver,
        cutoffs: ecd.then(|| args.cutoffs.clone()).flatten(),
        depth: ecd.then_some(args.depth),
        layers: qaoa.then_some(args.layers),
        trials: qaoa.then_some(args.trials),
        seeds: args.seeds.clone(),
        shots: ecd.then_some(args.shots),
        kappa_tau: ecd.then_some(args.kappa_tau),
        noise_mode: ecd.then_some(noise_mode(args)),
        max_iterations: (ecd || qaoa).then(|| args.max_iterations.unwrap_or(default_iters)),
        initial_scale: ecd.then_some(args.initial_scale),
        out: args.out.display().to_string(),
        axis: sweep.map(|s| s.axis),
        values: sweep.map(|s| s.values.clone()),
    }
}

fn noise_mode(args: &SolveArgs) -> NoiseMode {
    match args.noise_mode {
        NoiseModeArg::Reoptimize => NoiseMode::Reoptimize,
        NoiseModeArg::Frozen => NoiseMode::FrozenParameters,
    }
}

fn optimizer_config(args: &SolveArgs) -> Result<OptimizerConfig> {
    let config = OptimizerConfig {
        max_iterations: args.max_iterations.unwrap_or(200),
        initial_scale: args.initial_scale,
        shots: args.shots,
        noise: NoiseConfig::new(args.kappa_tau)?,
        noise_mode: noise_mode(args),
        seed: args.seeds.first().copied().unwrap_or(0),
        ..OptimizerConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn qaoa_config(args: &SolveArgs) -> QaoaConfig {
    QaoaConfig {
        max_iterations: args.max_iterations.unwrap_or(150),
        seed: args.seeds.first().copied().unwrap_or(0),
        ..QaoaConfig::default()
    }
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<()> {
    fs::write(dir.join(name), serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn prepare_out(manifest: &RunManifest, out: &Path) -> Result<serde_json::Value> {
    fs::create_dir_all(out)?;
    let value = serde_json::to_value(manifest)?;
    write_json(out, "manifest.json", &value)?;
    Ok(value)
}

fn solve(args: &SolveArgs, manifest: &RunManifest, stdout: &mut impl Write) -> Result<()> {
    if args.seeds.is_empty() {
        return Err(Error::InvalidParameter("--seeds must list at least one seed".into()));
    }
    let problem = load_problem(&args.problem)?;
    let h = hamiltonian(&problem);
    let out = &args.out;
    match args.solver {
        Solver::Exact => {
            let (bits, energy) = exact_ground_state(&h)?;
            let solution = solution_from_bits(&bits, &problem)?;
            let m = prepare_out(manifest, out)?;
            write_json(out, "solution.json", &json!({ "manifest": m, "energy": energy, "solution": solution }))?;
            writeln!(
                stdout,
                "exact: x = {:?}, objective {}, feasible {}, energy {energy}",
                solution.bits, solution.objective, solution.feasible
            )?;
        }
        Solver::EcdVqe => {
            let layout = layout_for(args, h.num_qubits())?;
            let config = optimizer_config(args)?;
            let result = run_multi_seed(&h, &layout, args.depth, &config, &args.seeds)?;
            let best = result.best_run();
            let solution = extract_solution(&best.histogram, &layout, &problem)?;
            let resolved = RunManifest {
                cutoffs: Some(layout.cutoffs()),
                ..manifest.clone()
            };
            let m = prepare_out(&resolved, out)?;
            let header = [format!("manifest {m}"), format!("seed {}", best.seed)];
            fs::write(out.join("trace.tsv"), best.to_tsv(&header))?;
            write_json(
                out,
                "histogram.json",
                &json!({ "manifest": m, "seed": best.seed, "histogram": best.histogram.to_records() }),
            )?;
            let runs: Vec<_> = result
                .runs
                .iter()
                .map(|r| {
                    let (o, p) = r.final_argmax();
                    json!({
                        "seed": r.seed,
                        "energy": r.final_energy,
                        "argmax": outcome_label(&o),
                        "p_argmax": p,
                        "iterations": r.iterations(),
                        "termination": r.termination,
                    })
                })
                .collect();
            write_json(
                out,
                "solution.json",
                &json!({
                    "manifest": m,
                    "seed": best.seed,
                    "energy": best.final_energy,
                    "parameters": best.parameters.packed(),
                    "solution": solution,
                    "runs": runs,
                }),
            )?;
            writeln!(
                stdout,
                "ecd-vqe on {layout}: seed {}, energy {:.6}, argmax {} (p = {:.4}), x = {:?}, objective {}, feasible {}",
                best.seed,
                best.final_energy,
                outcome_label(solution.outcome.as_ref().expect("argmax outcome")),
                solution.probability,
                solution.bits,
                solution.objective,
                solution.feasible
            )?;
        }
        Solver::Qaoa => {
            let result = run_qaoa(&h, args.layers, args.trials, &qaoa_config(args))?;
            let best = result.best_trial();
            let argmax = result.argmax();
            let solution = solution_from_bits(&argmax, &problem)?;
            let m = prepare_out(manifest, out)?;
            let mut tsv = format!("# manifest {m}\n# seed {}\niter\tenergy\n", best.seed);
            for (i, e) in best.energies.iter().enumerate() {
                let _ = writeln!(tsv, "{i}\t{e:.12e}");
            }
            fs::write(out.join("trace.tsv"), tsv)?;
            write_json(
                out,
                "histogram.json",
                &json!({ "manifest": m, "seed": best.seed, "histogram": result.to_records() }),
            )?;
            write_json(
                out,
                "solution.json",
                &json!({
                    "manifest": m,
                    "seed": best.seed,
                    "energy": best.energy,
                    "solution_probability": best.solution_probability,
                    "parameters": best.parameters.packed(),
                    "solution": solution,
                }),
            )?;
            writeln!(
                stdout,
                "qaoa p = {}: seed {}, P(optimum) = {:.4}, argmax x = {:?}, objective {}, feasible {}",
                args.layers, best.seed, best.solution_probability, solution.bits, solution.objective, solution.feasible
            )?;
        }
    }
    Ok(())
}

fn as_count(v: f64, axis: &str) -> Result<usize> {
    if v >= 0.0 && v.fract() == 0.0 && v.is_finite() {
        Ok(v as usize)
    } else {
        Err(Error::InvalidParameter(format!("{axis} values must be nonnegative integers, got {v}")))
    }
}

fn sweep(args: &SweepArgs, stdout: &mut impl Write) -> Result<()> {
    let base = &args.solve;
    match (args.axis, base.solver) {
        (Axis::Layers, Solver::Qaoa) | (Axis::KappaTau | Axis::Depth, Solver::EcdVqe) => {}
        (axis, solver) => {
            return Err(Error::InvalidParameter(format!(
                "axis {} does not apply to solver {}",
                axis.to_possible_value().expect("named").get_name(),
                solver.to_possible_value().expect("named").get_name()
            )))
        }
    }
    if args.values.is_empty() {
        return Err(Error::InvalidParameter("--values must not be empty".into()));
    }
    if base.seeds.is_empty() {
        return Err(Error::InvalidParameter("--seeds must list at least one seed".into()));
    }
    let manifest = manifest_for(base, Some(args));
    let problem = load_problem(&base.problem)?;
    let h = hamiltonian(&problem);

    let table = if args.axis == Axis::Layers {
        let layers = args.values.iter().map(|&v| as_count(v, "layers")).collect::<Result<Vec<_>>>()?;
        let rows = sweep_layers(&h, &layers, base.trials, &qaoa_config(base))?;
        let m = prepare_out(&manifest, &base.out)?;
        sweep_to_tsv(&rows, &[format!("manifest {m}")])
    } else {
        let layout = layout_for(base, h.num_qubits())?;
        let (ground, _) = exact_ground_state(&h)?;
        let target = layout.encode(&ground)?;
        let mut body = String::from("value\tseed\tenergy\targmax\tp_argmax\tp_optimum\tbits\tobjective\tfeasible\n");
        for &v in &args.values {
            let mut config = optimizer_config(base)?;
            let depth = match args.axis {
                Axis::Depth => as_count(v, "depth")?,
                _ => {
                    config.noise = NoiseConfig::new(v)?;
                    base.depth
                }
            };
            let result = run_multi_seed(&h, &layout, depth, &config, &base.seeds)?;
            let best = result.best_run();
            let solution = extract_solution(&best.histogram, &layout, &problem)?;
            let bits: String = solution.bits.iter().map(|b| char::from(b'0' + b)).collect();
            let _ = writeln!(
                body,
                "{v}\t{}\t{:.12e}\t{}\t{:.12e}\t{:.12e}\t{bits}\t{}\t{}",
                best.seed,
                best.final_energy,
                outcome_label(solution.outcome.as_ref().expect("argmax outcome")),
                solution.probability,
                best.histogram.probability(&target),
                solution.objective,
                solution.feasible
            );
        }
        let resolved = RunManifest {
            cutoffs: Some(layout.cutoffs()),
            ..manifest
        };
        let m = prepare_out(&resolved, &base.out)?;
        format!("# manifest {m}\n{body}")
    };
    fs::write(base.out.join("sweep.tsv"), &table)?;
    write!(stdout, "{}", table.lines().skip(1).map(|l| format!("{l}\n")).collect::<String>())?;
    Ok(())
}

/// The JSON form of a Hamiltonian written by `encode --out`.
pub fn hamiltonian_json(h: &PauliZHamiltonian) -> serde_json::Value {
    let terms: &[PauliTerm] = h.terms();
    json!({ "num_qubits": h.num_qubits(), "terms": terms })
}
