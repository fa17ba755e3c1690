//! ECD-VQE: minimize `⟨ψ(v)|H|ψ(v)⟩` over the layered ECD ansatz with BFGS,
//! recording the energy and the leading measurement outcome every iteration.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{BasisOutcome, MeasurementHistogram, ModeLayout};
use crate::noise::NoiseConfig;
use crate::optim::{minimize, BfgsConfig, Objective, Termination};
use crate::qubo::{BinaryProblem, PauliZHamiltonian};
use crate::sim::ansatz::{AnsatzParameters, AnsatzSimulator, INITIAL_RADIUS, PARAMS_PER_MODE};
use crate::sim::state::sample_from_probabilities;

/// How a nonzero κτ enters the optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Optimize the noisy cost directly.
    #[default]
    Reoptimize,
    /// Optimize without noise, then evaluate the final parameters under noise.
    FrozenParameters,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    pub gradient_step: f64,
    pub gradient_tolerance: f64,
    pub energy_tolerance: f64,
    pub seed: u64,
    pub initial_scale: f64,
    /// 0 selects exact probabilities.
    pub shots: usize,
    pub noise: NoiseConfig,
    pub noise_mode: NoiseMode,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_step: 1e-5,
            gradient_tolerance: 1e-6,
            energy_tolerance: 1e-12,
            seed: 0,
            initial_scale: INITIAL_RADIUS,
            shots: 0,
            noise: NoiseConfig::noiseless(),
            noise_mode: NoiseMode::Reoptimize,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gradient_step > 0.0 && self.gradient_step.is_finite()) {
            return Err(Error::InvalidParameter(format!("gradient step must be positive, got {}", self.gradient_step)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max iterations must be at least 1".into()));
        }
        if !(self.initial_scale >= 0.0 && self.initial_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("initial scale must be nonnegative, got {}", self.initial_scale)));
        }
        NoiseConfig::new(self.noise.kappa_tau)?;
        Ok(())
    }

    pub(crate) fn bfgs(&self) -> BfgsConfig {
        BfgsConfig {
            max_iterations: self.max_iterations,
            gradient_step: self.gradient_step,
            gradient_tolerance: self.gradient_tolerance,
            energy_tolerance: self.energy_tolerance,
            ..BfgsConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub energy: f64,
    pub p_argmax: f64,
    pub outcome: BasisOutcome,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub seed: u64,
    pub records: Vec<IterationRecord>,
    pub parameters: AnsatzParameters,
    pub final_energy: f64,
    pub termination: Termination,
    /// Exact outcome distribution at the final parameters.
    pub histogram: MeasurementHistogram,
    pub wall_time: Duration,
}

/// `q,n₁,…,n_R` without the ket decoration.
pub fn outcome_label(outcome: &BasisOutcome) -> String {
    let mut s = outcome.q.to_string();
    for n in &outcome.occupations {
        let _ = write!(s, ",{n}");
    }
    s
}

impl OptimizationTrace {
    pub fn final_record(&self) -> &IterationRecord {
        self.records.last().expect("a trace always holds the starting point")
    }

    /// Leading outcome and its probability at the final parameters.
    pub fn final_argmax(&self) -> (BasisOutcome, f64) {
        let (o, p) = self.histogram.argmax().expect("final histogram is never empty");
        (o.clone(), p)
    }

    pub fn iterations(&self) -> usize {
        self.final_record().iteration
    }

    /// First iteration from which the argmax is `outcome` for the rest of the run.
    pub fn argmax_settles_at(&self, outcome: &BasisOutcome) -> Option<usize> {
        let mut settled = None;
        for r in &self.records {
            match (&r.outcome == outcome, settled) {
                (true, None) => settled = Some(r.iteration),
                (false, _) => settled = None,
                _ => {}
            }
        }
        settled
    }

    /// First iteration with `|E − target| < tolerance`.
    pub fn energy_reaches(&self, target: f64, tolerance: f64) -> Option<usize> {
        self.records.iter().find(|r| (r.energy - target).abs() < tolerance).map(|r| r.iteration)
    }

    /// First iteration whose argmax is `outcome` with probability above `threshold`.
    pub fn outcome_reaches(&self, outcome: &BasisOutcome, threshold: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| &r.outcome == outcome && r.p_argmax > threshold)
            .map(|r| r.iteration)
    }

    /// Tab-separated `iter energy p_argmax outcome grad_norm`, preceded by
    /// `header` lines prefixed with `# `.
    pub fn to_tsv(&self, header: &[String]) -> String {
        let mut out = String::new();
        for line in header {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str("iter\tenergy\tp_argmax\toutcome\tgrad_norm\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{}\t{:.12e}\t{:.12e}\t{}\t{:.6e}",
                r.iteration,
                r.energy,
                r.p_argmax,
                outcome_label(&r.outcome),
                r.grad_norm
            );
        }
        out
    }
}

fn mix_seed(seed: u64, counter: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ counter.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Cost evaluator for one Hamiltonian, layout and depth.
#[derive(Debug, Clone)]
pub struct EcdVqe {
    layout: ModeLayout,
    depth: usize,
    simulator: AnsatzSimulator,
    /// Energy of every register basis state, flat order.
    energies: Vec<f64>,
    config: OptimizerConfig,
    noise: NoiseConfig,
    shot_seed: u64,
    shot_counter: u64,
}

impl EcdVqe {
    pub fn new(h: &PauliZHamiltonian, layout: &ModeLayout, depth: usize, config: OptimizerConfig) -> Result<Self> {
        config.validate()?;
        if h.num_qubits() != layout.num_qubits() {
            return Err(Error::LengthMismatch {
                expected: layout.num_qubits(),
                got: h.num_qubits(),
            });
        }
        // The packed bitstring index coincides with the flat register index.
        let energies = h.diagonal()?;
        let noise = match config.noise_mode {
            NoiseMode::Reoptimize => config.noise,
            NoiseMode::FrozenParameters => NoiseConfig::noiseless(),
        };
        Ok(Self {
            layout: layout.clone(),
            depth,
            simulator: AnsatzSimulator::new(layout),
            energies,
            config,
            noise,
            shot_seed: mix_seed(config.seed, u64::MAX),
            shot_counter: 0,
        })
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn num_parameters(&self) -> usize {
        PARAMS_PER_MODE * self.depth * self.layout.num_modes()
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.config
    }

    fn params(&self, packed: &[f64]) -> Result<AnsatzParameters> {
        AnsatzParameters::from_packed(self.depth, self.layout.num_modes(), packed.to_vec())
    }

    fn probabilities_with(&self, params: &AnsatzParameters, noise: &NoiseConfig) -> Result<Vec<f64>> {
        if noise.is_noiseless() {
            Ok(self.simulator.run(params)?.probabilities())
        } else {
            Ok(self.simulator.run_noisy(params, noise)?.probabilities())
        }
    }

    /// Exact outcome probabilities under the noise model being optimized.
    pub fn probabilities(&self, params: &AnsatzParameters) -> Result<Vec<f64>> {
        self.probabilities_with(params, &self.noise)
    }

    /// Exact outcome distribution including the configured noise, whatever
    /// the noise mode.
    pub fn final_histogram(&self, params: &AnsatzParameters) -> Result<MeasurementHistogram> {
        let p = self.probabilities_with(params, &self.config.noise)?;
        Ok(MeasurementHistogram::from_dense(&self.layout, &p))
    }

    fn exact_energy(&self, probabilities: &[f64]) -> f64 {
        probabilities.iter().zip(&self.energies).map(|(p, e)| p * e).sum()
    }

    /// `⟨ψ(v)|H|ψ(v)⟩`, or its sampled estimate when shots > 0.
    pub fn cost(&mut self, packed: &[f64]) -> Result<f64> {
        let params = self.params(packed)?;
        let p = self.probabilities(&params)?;
        if self.config.shots == 0 {
            return Ok(self.exact_energy(&p));
        }
        let seed = mix_seed(self.shot_seed, self.shot_counter);
        self.shot_counter += 1;
        let hist = sample_from_probabilities(&self.layout, &p, self.config.shots, seed)?;
        Ok(hist
            .iter()
            .map(|(o, f)| f * self.energies[self.layout.flat_index(o)])
            .sum())
    }

    pub fn gradient(&mut self, packed: &[f64]) -> Result<Vec<f64>> {
        let h = self.config.gradient_step;
        Objective::gradient(self, packed, h)
    }

    /// Runs BFGS from the seeded random start.
    pub fn run(&mut self, seed: u64) -> Result<OptimizationTrace> {
        let start = Instant::now();
        self.shot_seed = mix_seed(seed, u64::MAX);
        self.shot_counter = 0;
        let init = AnsatzParameters::random(self.depth, self.layout.num_modes(), seed);
        let mut x0 = init.into_packed();
        for (i, v) in x0.iter_mut().enumerate() {
            if i % PARAMS_PER_MODE == 2 {
                *v *= self.config.initial_scale / INITIAL_RADIUS;
            }
        }

        let mut records = Vec::new();
        let bfgs = self.config.bfgs();
        let observer_view = self.clone();
        let result = minimize(self, &x0, &bfgs, |progress| {
            let params = observer_view.params(progress.x)?;
            let p = observer_view.probabilities(&params)?;
            let hist = MeasurementHistogram::from_dense(&observer_view.layout, &p);
            let (outcome, p_argmax) = hist.argmax().ok_or(Error::EmptyHistogram)?;
            records.push(IterationRecord {
                iteration: progress.iteration,
                energy: progress.value,
                p_argmax,
                outcome: outcome.clone(),
                grad_norm: progress.gradient_norm,
            });
            Ok(true)
        })?;

        let parameters = self.params(&result.x)?;
        let histogram = self.final_histogram(&parameters)?;
        let final_energy = if self.config.noise_mode == NoiseMode::FrozenParameters && !self.config.noise.is_noiseless() {
            histogram.iter().map(|(o, p)| p * self.energies[self.layout.flat_index(o)]).sum()
        } else {
            result.value
        };
        Ok(OptimizationTrace {
            seed,
            records,
            parameters,
            final_energy,
            termination: result.termination,
            histogram,
            wall_time: start.elapsed(),
        })
    }
}

impl Objective for EcdVqe {
    fn value(&mut self, x: &[f64]) -> Result<f64> {
        self.cost(x)
    }
}

/// Single-seed run with `config.seed`.
pub fn run_ecd_vqe(
    h: &PauliZHamiltonian,
    layout: &ModeLayout,
    depth: usize,
    config: &OptimizerConfig,
) -> Result<OptimizationTrace> {
    EcdVqe::new(h, layout, depth, *config)?.run(config.seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiSeedResult {
    pub runs: Vec<OptimizationTrace>,
    pub best: usize,
}

impl MultiSeedResult {
    pub fn best_run(&self) -> &OptimizationTrace {
        &self.runs[self.best]
    }
}

/// Runs every seed and keeps the one whose final argmax probability is
/// highest (earliest seed on ties).
pub fn run_multi_seed(
    h: &PauliZHamiltonian,
    layout: &ModeLayout,
    depth: usize,
    config: &OptimizerConfig,
    seeds: &[u64],
) -> Result<MultiSeedResult> {
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("at least one seed is required".into()));
    }
    let mut engine = EcdVqe::new(h, layout, depth, *config)?;
    let runs = seeds.iter().map(|&s| engine.run(s)).collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.final_argmax().1 > runs[best].final_argmax().1 {
            best = i;
        }
    }
    Ok(MultiSeedResult { runs, best })
}

/// Decoded candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub outcome: Option<BasisOutcome>,
    pub probability: f64,
    /// Primary decision variables.
    pub bits: Vec<u8>,
    /// Slack bits as measured.
    pub slack_bits: Vec<u8>,
    pub objective: f64,
    pub feasible: bool,
}

/// Decodes the argmax outcome and scores it against the original problem.
pub fn extract_solution(
    histogram: &MeasurementHistogram,
    layout: &ModeLayout,
    problem: &BinaryProblem,
) -> Result<Solution> {
    let (outcome, probability) = histogram.argmax().ok_or(Error::EmptyHistogram)?;
    let bits = layout.decode(outcome)?;
    let mut solution = solution_from_bits(&bits, problem)?;
    solution.outcome = Some(outcome.clone());
    solution.probability = probability;
    Ok(solution)
}

/// Scores a full (primary + slack) bitstring against the original problem.
pub fn solution_from_bits(bits: &[u8], problem: &BinaryProblem) -> Result<Solution> {
    if bits.len() != problem.total_variables() {
        return Err(Error::LengthMismatch {
            expected: problem.total_variables(),
            got: bits.len(),
        });
    }
    let n = problem.num_variables();
    let primary = bits[..n].to_vec();
    Ok(Solution {
        outcome: None,
        probability: 1.0,
        objective: problem.objective_value(&primary),
        feasible: problem.is_feasible(&primary),
        slack_bits: bits[n..].to_vec(),
        bits: primary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{evaluate_bitstring, reference_knapsack, to_pauli_hamiltonian, to_unconstrained, PauliTerm};

    fn bkp() -> (BinaryProblem, PauliZHamiltonian, ModeLayout) {
        let problem = reference_knapsack();
        let h = to_pauli_hamiltonian(&to_unconstrained(&problem));
        (problem, h, ModeLayout::new(7, &[8, 8]).unwrap())
    }

    #[test]
    fn vacuum_cost_is_all_zeros_energy() {
        let (_, h, layout) = bkp();
        let mut vqe = EcdVqe::new(&h, &layout, 0, OptimizerConfig::default()).unwrap();
        let e = vqe.cost(&[]).unwrap();
        assert_eq!(e, evaluate_bitstring(&h, &[0; 7]).unwrap());
    }

    #[test]
    fn rejects_bad_config_and_sizes() {
        let (_, h, layout) = bkp();
        let bad = OptimizerConfig {
            gradient_step: 0.0,
            ..Default::default()
        };
        assert!(EcdVqe::new(&h, &layout, 2, bad).is_err());
        let bad = OptimizerConfig {
            max_iterations: 0,
            ..Default::default()
        };
        assert!(EcdVqe::new(&h, &layout, 2, bad).is_err());
        let small = ModeLayout::new(5, &[4, 4]).unwrap();
        assert!(EcdVqe::new(&h, &small, 2, OptimizerConfig::default()).is_err());
        let mut vqe = EcdVqe::new(&h, &layout, 2, OptimizerConfig::default()).unwrap();
        assert!(vqe.cost(&[0.0; 3]).is_err());
    }

    #[test]
    fn identity_hamiltonian_stops_at_the_start() {
        let h = PauliZHamiltonian::from_terms(
            5,
            [PauliTerm {
                coefficient: 2.5,
                qubits: vec![],
            }],
        )
        .unwrap();
        let layout = ModeLayout::new(5, &[4, 4]).unwrap();
        let trace = run_ecd_vqe(&h, &layout, 2, &OptimizerConfig::default()).unwrap();
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.termination, Termination::GradientTolerance);
        assert!((trace.final_energy - 2.5).abs() < 1e-12);
    }

    #[test]
    fn runs_are_deterministic() {
        let (_, h, layout) = bkp();
        let config = OptimizerConfig {
            max_iterations: 5,
            ..Default::default()
        };
        let a = run_ecd_vqe(&h, &layout, 2, &config).unwrap();
        let b = run_ecd_vqe(&h, &layout, 2, &config).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.parameters, b.parameters);
        assert_eq!(a.to_tsv(&[]), b.to_tsv(&[]));
    }

    #[test]
    fn trace_is_well_formed_and_energy_decreases() {
        let (_, h, layout) = bkp();
        let config = OptimizerConfig {
            max_iterations: 10,
            ..Default::default()
        };
        let t = run_ecd_vqe(&h, &layout, 2, &config).unwrap();
        assert!(t.records.windows(2).all(|w| w[1].iteration == w[0].iteration + 1));
        assert!(t.records.windows(2).all(|w| w[1].energy <= w[0].energy));
        assert!(t.records.iter().all(|r| (0.0..=1.0 + 1e-12).contains(&r.p_argmax)));
        let tsv = t.to_tsv(&["manifest {}".into()]);
        assert!(tsv.starts_with("# manifest {}\niter\tenergy\tp_argmax\toutcome\tgrad_norm\n"));
        assert_eq!(tsv.lines().count(), t.records.len() + 2);
    }

    #[test]
    fn shots_mode_is_reproducible() {
        let (_, h, layout) = bkp();
        let config = OptimizerConfig {
            shots: 2000,
            max_iterations: 2,
            ..Default::default()
        };
        let params = AnsatzParameters::random(2, 2, 1).into_packed();
        let mut a = EcdVqe::new(&h, &layout, 2, config).unwrap();
        let mut b = EcdVqe::new(&h, &layout, 2, config).unwrap();
        let ea = (a.cost(&params).unwrap(), a.cost(&params).unwrap());
        let eb = (b.cost(&params).unwrap(), b.cost(&params).unwrap());
        assert_eq!(ea, eb);
        assert_ne!(ea.0, ea.1);
    }

    #[test]
    fn solution_extraction() {
        let (problem, _, layout) = bkp();
        let mut hist = MeasurementHistogram::new();
        hist.add(BasisOutcome::new(0, vec![6, 0]), 0.8);
        hist.add(BasisOutcome::new(0, vec![0, 0]), 0.2);
        let s = extract_solution(&hist, &layout, &problem).unwrap();
        assert_eq!(s.bits, vec![0, 1, 1, 0]);
        assert_eq!(s.slack_bits, vec![0, 0, 0]);
        assert_eq!(s.objective, 12.0);
        assert!(s.feasible);
        assert_eq!(s.probability, 0.8);

        let mut vacuum = MeasurementHistogram::new();
        vacuum.add(BasisOutcome::vacuum(2), 1.0);
        let s = extract_solution(&vacuum, &layout, &problem).unwrap();
        assert_eq!(s.bits, vec![0; 4]);
        assert!(s.feasible);

        assert!(matches!(
            extract_solution(&MeasurementHistogram::new(), &layout, &problem),
            Err(Error::EmptyHistogram)
        ));
    }

    #[test]
    fn settling_helpers() {
        let o = |n| BasisOutcome::new(0, vec![n, 0]);
        let rec = |i, n, e| IterationRecord {
            iteration: i,
            energy: e,
            p_argmax: 0.5,
            outcome: o(n),
            grad_norm: 1.0,
        };
        let trace = OptimizationTrace {
            seed: 0,
            records: vec![rec(0, 6, 5.0), rec(1, 1, 1.0), rec(2, 6, -11.0), rec(3, 6, -11.9)],
            parameters: AnsatzParameters::zeros(0, 2),
            final_energy: -11.9,
            termination: Termination::MaxIterations,
            histogram: MeasurementHistogram::new(),
            wall_time: Duration::ZERO,
        };
        assert_eq!(trace.argmax_settles_at(&o(6)), Some(2));
        assert_eq!(trace.argmax_settles_at(&o(1)), None);
        assert_eq!(trace.energy_reaches(-12.0, 0.5), Some(3));
        assert_eq!(trace.outcome_reaches(&o(6), 0.4), Some(0));
    }
}
