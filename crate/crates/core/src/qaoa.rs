//! Qubit-only QAOA on the same Pauli-Z Hamiltonian: `|+⟩^⊗N`, then `p`
//! alternations of `e^{−iγH_P}` and `e^{−iβΣX}`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{minimize, BfgsConfig, Termination};
use crate::qubo::{bits_to_index, exact_ground_state, index_to_bits, PauliZHamiltonian};

pub const MAX_QAOA_QUBITS: usize = 16;

/// Interleaved `[γ₁, β₁, γ₂, β₂, …]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParameters {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParameters {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        if gammas.len() != betas.len() {
            return Err(Error::LengthMismatch {
                expected: gammas.len(),
                got: betas.len(),
            });
        }
        Ok(Self { gammas, betas })
    }

    pub fn from_packed(packed: &[f64]) -> Result<Self> {
        if !packed.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "packed QAOA parameters need an even length, got {}",
                packed.len()
            )));
        }
        Ok(Self {
            gammas: packed.iter().step_by(2).copied().collect(),
            betas: packed.iter().skip(1).step_by(2).copied().collect(),
        })
    }

    /// Every angle uniform in [0, 2π).
    pub fn random(layers: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let packed: Vec<f64> = (0..2 * layers).map(|_| rng.gen_range(0.0..TAU)).collect();
        Self::from_packed(&packed).expect("even length")
    }

    pub fn layers(&self) -> usize {
        self.gammas.len()
    }

    pub fn packed(&self) -> Vec<f64> {
        self.gammas.iter().zip(&self.betas).flat_map(|(g, b)| [*g, *b]).collect()
    }
}

fn check_size(h: &PauliZHamiltonian) -> Result<()> {
    if h.num_qubits() > MAX_QAOA_QUBITS {
        return Err(Error::SizeGuard {
            what: "QAOA qubits",
            size: h.num_qubits(),
            limit: MAX_QAOA_QUBITS,
        });
    }
    Ok(())
}

/// Statevector simulator with the diagonal of `H_P` precomputed.
#[derive(Debug, Clone)]
pub struct QaoaSimulator {
    num_qubits: usize,
    energies: Vec<f64>,
}

impl QaoaSimulator {
    pub fn new(h: &PauliZHamiltonian) -> Result<Self> {
        check_size(h)?;
        Ok(Self {
            num_qubits: h.num_qubits(),
            energies: h.diagonal()?,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Amplitudes indexed by the packed bitstring (qubit 0 most significant).
    pub fn state(&self, params: &QaoaParameters) -> Vec<C64> {
        let dim = self.energies.len();
        let mut psi = vec![C64::new((dim as f64).sqrt().recip(), 0.0); dim];
        for (&gamma, &beta) in params.gammas.iter().zip(&params.betas) {
            for (a, &e) in psi.iter_mut().zip(&self.energies) {
                *a *= C64::from_polar(1.0, -gamma * e);
            }
            let (s, c) = beta.sin_cos();
            let off = C64::new(0.0, -s);
            for q in 0..self.num_qubits {
                let bit = 1 << (self.num_qubits - 1 - q);
                for i in 0..dim {
                    if i & bit == 0 {
                        let (x, y) = (psi[i], psi[i | bit]);
                        psi[i] = x * c + off * y;
                        psi[i | bit] = off * x + y * c;
                    }
                }
            }
        }
        psi
    }

    pub fn probabilities(&self, params: &QaoaParameters) -> Vec<f64> {
        self.state(params).iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn energy(&self, params: &QaoaParameters) -> f64 {
        self.probabilities(params).iter().zip(&self.energies).map(|(p, e)| p * e).sum()
    }
}

pub fn qaoa_state(h: &PauliZHamiltonian, params: &QaoaParameters) -> Result<Vec<C64>> {
    Ok(QaoaSimulator::new(h)?.state(params))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QaoaConfig {
    pub max_iterations: usize,
    pub gradient_step: f64,
    pub gradient_tolerance: f64,
    pub energy_tolerance: f64,
    /// Trial t starts from seed `seed + t`.
    pub seed: u64,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        Self {
            max_iterations: 150,
            gradient_step: 1e-5,
            gradient_tolerance: 1e-6,
            energy_tolerance: 1e-12,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaTrial {
    pub seed: u64,
    pub parameters: QaoaParameters,
    pub energy: f64,
    pub solution_probability: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Energy after every accepted step, starting point first.
    pub energies: Vec<f64>,
}

/// Raw-bitstring histogram entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BitstringRecord {
    pub bits: String,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaResult {
    pub layers: usize,
    pub solution: Vec<u8>,
    pub ground_energy: f64,
    pub trials: Vec<QaoaTrial>,
    pub best: usize,
    /// Outcome probabilities of the best trial, packed-bitstring order.
    pub distribution: Vec<f64>,
}

impl QaoaResult {
    pub fn best_trial(&self) -> &QaoaTrial {
        &self.trials[self.best]
    }

    pub fn best_probability(&self) -> f64 {
        self.best_trial().solution_probability
    }

    /// Bitstring with the largest probability (smallest index on ties).
    pub fn argmax(&self) -> Vec<u8> {
        let mut best = 0;
        for (i, &p) in self.distribution.iter().enumerate() {
            if p > self.distribution[best] {
                best = i;
            }
        }
        index_to_bits(best, self.solution.len())
    }

    /// Probability mass outside the optimal bitstring.
    pub fn suboptimal_mass(&self) -> f64 {
        1.0 - self.distribution[bits_to_index(&self.solution)]
    }

    /// Nonzero outcomes by decreasing probability.
    pub fn to_records(&self) -> Vec<BitstringRecord> {
        bitstring_records(&self.distribution, self.solution.len())
    }
}

pub fn bitstring_records(distribution: &[f64], num_qubits: usize) -> Vec<BitstringRecord> {
    let mut records: Vec<BitstringRecord> = distribution
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| BitstringRecord {
            bits: index_to_bits(i, num_qubits).iter().map(|b| char::from(b'0' + b)).collect(),
            p,
        })
        .collect();
    records.sort_by(|a, b| b.p.total_cmp(&a.p));
    records
}

fn run_trial(sim: &QaoaSimulator, layers: usize, seed: u64, solution: usize, config: &QaoaConfig) -> Result<QaoaTrial> {
    let x0 = QaoaParameters::random(layers, seed).packed();
    let bfgs = BfgsConfig {
        max_iterations: config.max_iterations,
        gradient_step: config.gradient_step,
        gradient_tolerance: config.gradient_tolerance,
        energy_tolerance: config.energy_tolerance,
        ..BfgsConfig::default()
    };
    let mut energies = Vec::new();
    let mut cost = |x: &[f64]| Ok(sim.energy(&QaoaParameters::from_packed(x)?));
    let m = minimize(&mut cost, &x0, &bfgs, |p| {
        energies.push(p.value);
        Ok(true)
    })?;
    let parameters = QaoaParameters::from_packed(&m.x)?;
    let solution_probability = sim.probabilities(&parameters)[solution];
    Ok(QaoaTrial {
        seed,
        parameters,
        energy: m.value,
        solution_probability,
        iterations: m.iterations,
        termination: m.termination,
        energies,
    })
}

/// Independent random-start trials at depth `layers`; the best trial is the
/// one with the highest probability on the exact ground bitstring.
pub fn run_qaoa(h: &PauliZHamiltonian, layers: usize, trials: usize, config: &QaoaConfig) -> Result<QaoaResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one QAOA trial is required".into()));
    }
    if config.max_iterations == 0 || !(config.gradient_step > 0.0) {
        return Err(Error::InvalidParameter("QAOA needs max iterations ≥ 1 and a positive gradient step".into()));
    }
    let sim = QaoaSimulator::new(h)?;
    let (solution, ground_energy) = exact_ground_state(h)?;
    let target = bits_to_index(&solution);
    let trials = (0..trials as u64)
        .map(|t| run_trial(&sim, layers, config.seed.wrapping_add(t), target, config))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, t) in trials.iter().enumerate() {
        if t.solution_probability > trials[best].solution_probability {
            best = i;
        }
    }
    let distribution = sim.probabilities(&trials[best].parameters);
    Ok(QaoaResult {
        layers,
        solution,
        ground_energy,
        trials,
        best,
        distribution,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSweepRow {
    pub layers: usize,
    pub best_probability: f64,
    pub best_energy: f64,
    pub argmax: String,
}

/// Best solution probability for each layer count, same base seed throughout.
pub fn sweep_layers(
    h: &PauliZHamiltonian,
    layers: &[usize],
    trials: usize,
    config: &QaoaConfig,
) -> Result<Vec<LayerSweepRow>> {
    layers
        .iter()
        .map(|&p| {
            let r = run_qaoa(h, p, trials, config)?;
            Ok(LayerSweepRow {
                layers: p,
                best_probability: r.best_probability(),
                best_energy: r.best_trial().energy,
                argmax: r.argmax().iter().map(|b| char::from(b'0' + b)).collect(),
            })
        })
        .collect()
}

pub fn sweep_to_tsv(rows: &[LayerSweepRow], header: &[String]) -> String {
    let mut out = String::new();
    for line in header {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str("layers\tbest_probability\tbest_energy\targmax\n");
    for r in rows {
        let _ = writeln!(out, "{}\t{:.12e}\t{:.12e}\t{}", r.layers, r.best_probability, r.best_energy, r.argmax);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::PauliTerm;

    fn zz() -> PauliZHamiltonian {
        PauliZHamiltonian::from_terms(
            2,
            [PauliTerm {
                coefficient: 1.0,
                qubits: vec![0, 1],
            }],
        )
        .unwrap()
    }

    fn three_qubit() -> PauliZHamiltonian {
        let terms = [(0.5, vec![0]), (-1.0, vec![1]), (0.7, vec![0, 2]), (0.3, vec![1, 2])];
        PauliZHamiltonian::from_terms(
            3,
            terms.into_iter().map(|(coefficient, qubits)| PauliTerm { coefficient, qubits }),
        )
        .unwrap()
    }

    #[test]
    fn packing_round_trip() {
        let p = QaoaParameters::new(vec![1.0, 3.0], vec![2.0, 4.0]).unwrap();
        assert_eq!(p.packed(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(QaoaParameters::from_packed(&p.packed()).unwrap(), p);
        assert!(QaoaParameters::from_packed(&[1.0]).is_err());
        assert!(QaoaParameters::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn zero_layers_is_uniform() {
        let sim = QaoaSimulator::new(&three_qubit()).unwrap();
        let p = sim.probabilities(&QaoaParameters::new(vec![], vec![]).unwrap());
        assert!(p.iter().all(|&x| (x - 0.125).abs() < 1e-15));
    }

    #[test]
    fn single_layer_factors_keep_uniform_probabilities() {
        let sim = QaoaSimulator::new(&three_qubit()).unwrap();
        for params in [
            QaoaParameters::new(vec![0.0], vec![0.9]).unwrap(),
            QaoaParameters::new(vec![1.3], vec![0.0]).unwrap(),
        ] {
            let p = sim.probabilities(&params);
            assert!(p.iter().all(|&x| (x - 0.125).abs() < 1e-14));
        }
    }

    #[test]
    fn norm_and_variational_bound() {
        let h = three_qubit();
        let sim = QaoaSimulator::new(&h).unwrap();
        let (_, e0) = exact_ground_state(&h).unwrap();
        for seed in 0..20 {
            let params = QaoaParameters::random(4, seed);
            let norm: f64 = sim.state(&params).iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10);
            assert!(sim.energy(&params) >= e0 - 1e-12);
        }
    }

    #[test]
    fn mixer_matches_single_qubit_rotation() {
        // One qubit, H = Z: after γ the state is (e^{−iγ}|0⟩ + e^{iγ}|1⟩)/√2.
        let h = PauliZHamiltonian::from_terms(
            1,
            [PauliTerm {
                coefficient: 1.0,
                qubits: vec![0],
            }],
        )
        .unwrap();
        let (g, b) = (0.4, 0.3);
        let psi = qaoa_state(&h, &QaoaParameters::new(vec![g], vec![b]).unwrap()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a0 = C64::from_polar(s, -g);
        let a1 = C64::from_polar(s, g);
        let (sn, cs) = f64::sin_cos(b);
        let want0 = a0 * cs + C64::new(0.0, -sn) * a1;
        let want1 = C64::new(0.0, -sn) * a0 + a1 * cs;
        assert!((psi[0] - want0).norm() < 1e-14);
        assert!((psi[1] - want1).norm() < 1e-14);
    }

    #[test]
    fn zz_single_layer_beats_uniform() {
        let result = run_qaoa(&zz(), 1, 5, &QaoaConfig::default()).unwrap();
        assert!(result.best_probability() > 0.25);
        assert_eq!(result.solution, vec![0, 1]);
        assert!(result.best_trial().energy >= -1.0 - 1e-12);
    }

    #[test]
    fn size_guard_and_argument_checks() {
        let big = PauliZHamiltonian::from_terms(
            17,
            [PauliTerm {
                coefficient: 1.0,
                qubits: vec![16],
            }],
        )
        .unwrap();
        assert!(matches!(QaoaSimulator::new(&big), Err(Error::SizeGuard { .. })));
        assert!(run_qaoa(&zz(), 1, 0, &QaoaConfig::default()).is_err());
    }

    #[test]
    fn records_are_sorted_bitstrings() {
        let records = bitstring_records(&[0.1, 0.0, 0.6, 0.3], 2);
        let bits: Vec<&str> = records.iter().map(|r| r.bits.as_str()).collect();
        assert_eq!(bits, vec!["10", "11", "00"]);
    }

    #[test]
    fn sweep_rows_follow_the_axis() {
        let rows = sweep_layers(&zz(), &[1, 2], 3, &QaoaConfig::default()).unwrap();
        assert_eq!(rows.iter().map(|r| r.layers).collect::<Vec<_>>(), vec![1, 2]);
        let tsv = sweep_to_tsv(&rows, &[]);
        assert_eq!(tsv.lines().count(), 3);
    }
}
