//! Pure and mixed states of the hybrid register, plus the in-place kernels
//! that apply qubit, ECD and single-mode operators without materializing
//! register-sized matrices.
//!
//! Flat index: `q·∏L + n₁·(L₂⋯L_R) + … + n_R`, qubit slowest.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gates::{rotation_entries, Displacer, ONE, ZERO};
use crate::error::{Error, Result};
use crate::hilbert::{MeasurementHistogram, ModeLayout};

/// Applies a 2×2 row-major `u` to the qubit of every register vector.
pub(crate) fn apply_qubit_gate(amps: &mut [C64], u: &[C64; 4]) {
    let half = amps.len() / 2;
    let (lo, hi) = amps.split_at_mut(half);
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = u[0] * x + u[1] * y;
        *b = u[2] * x + u[3] * y;
    }
}

/// `σ⁻ ⊗ D_k(β/2) + σ⁺ ⊗ D_k(−β/2)` with `plus = D(β/2)` and
/// `minus = D(−β/2)` given row-major. `scratch` needs room for 2L entries.
pub(crate) fn apply_ecd(
    amps: &mut [C64],
    layout: &ModeLayout,
    mode: usize,
    plus: &[C64],
    minus: &[C64],
    scratch: &mut [C64],
) {
    let l = layout.cutoff(mode);
    let stride = layout.stride(mode);
    let half = amps.len() / 2;
    let outer = half / (l * stride);
    let (v0, v1) = scratch[..2 * l].split_at_mut(l);
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * l * stride + inner;
            for n in 0..l {
                v0[n] = amps[base + n * stride];
                v1[n] = amps[half + base + n * stride];
            }
            for m in 0..l {
                let (rp, rm) = (&plus[m * l..(m + 1) * l], &minus[m * l..(m + 1) * l]);
                let mut up = ZERO;
                let mut down = ZERO;
                for n in 0..l {
                    up += rp[n] * v0[n];
                    down += rm[n] * v1[n];
                }
                // |0⟩ branch moves to |1⟩ displaced by +β/2, and vice versa.
                amps[half + base + m * stride] = up;
                amps[base + m * stride] = down;
            }
        }
    }
}

/// Pure state of the hybrid register.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridPureState {
    layout: ModeLayout,
    amplitudes: Vec<C64>,
}

impl HybridPureState {
    /// `|0⟩_Q ⊗ |0⟩ ⊗ … ⊗ |0⟩`.
    pub fn vacuum(layout: &ModeLayout) -> Self {
        let mut amplitudes = vec![ZERO; layout.dim()];
        amplitudes[0] = ONE;
        Self {
            layout: layout.clone(),
            amplitudes,
        }
    }

    /// Wraps (and normalizes) an amplitude vector in flat register order.
    pub fn from_amplitudes(layout: &ModeLayout, mut amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::LengthMismatch {
                expected: layout.dim(),
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter("state has zero or non-finite norm".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self {
            layout: layout.clone(),
            amplitudes,
        })
    }

    pub(crate) fn from_raw(layout: &ModeLayout, amplitudes: Vec<C64>) -> Self {
        Self {
            layout: layout.clone(),
            amplitudes,
        }
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn apply_rotation(&mut self, theta: f64, phi: f64) {
        apply_qubit_gate(&mut self.amplitudes, &rotation_entries(theta, phi));
    }

    pub fn apply_qubit_matrix(&mut self, u: &Matrix2<C64>) {
        apply_qubit_gate(&mut self.amplitudes, &[u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]]);
    }

    /// Echoed conditional displacement on qumode `mode`.
    pub fn apply_ecd(&mut self, mode: usize, beta: C64) -> Result<()> {
        if mode >= self.layout.num_modes() {
            return Err(Error::InvalidParameter(format!(
                "qumode {mode} does not exist in a {}-mode layout",
                self.layout.num_modes()
            )));
        }
        let l = self.layout.cutoff(mode);
        let displacer = Displacer::new(l);
        let mut plus = vec![ZERO; l * l];
        displacer.fill(beta / 2.0, &mut plus);
        let minus = adjoint_row_major(&plus, l);
        let mut scratch = vec![ZERO; 2 * l];
        apply_ecd(&mut self.amplitudes, &self.layout, mode, &plus, &minus, &mut scratch);
        Ok(())
    }

    /// Dense outcome probabilities `|ψᵢ|²` in flat order.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn exact_probabilities(&self) -> MeasurementHistogram {
        MeasurementHistogram::from_dense(&self.layout, &self.probabilities())
    }

    /// Multinomial draw of `shots` measurements, as normalized counts.
    pub fn sample_histogram(&self, shots: usize, seed: u64) -> Result<MeasurementHistogram> {
        sample_from_probabilities(&self.layout, &self.probabilities(), shots, seed)
    }

    /// `(q, occupations, re, im)` per basis state with nonzero amplitude.
    pub fn to_records(&self) -> Vec<StateRecord> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, a)| {
                let o = self.layout.outcome_at(i);
                StateRecord {
                    q: o.q,
                    occ: o.occupations,
                    re: a.re,
                    im: a.im,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub q: u8,
    pub occ: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

pub(crate) fn adjoint_row_major(m: &[C64], l: usize) -> Vec<C64> {
    let mut out = vec![ZERO; l * l];
    for r in 0..l {
        for c in 0..l {
            out[c * l + r] = m[r * l + c].conj();
        }
    }
    out
}

pub(crate) fn sample_from_probabilities(
    layout: &ModeLayout,
    probabilities: &[f64],
    shots: usize,
    seed: u64,
) -> Result<MeasurementHistogram> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    let weights: Vec<f64> = probabilities.iter().map(|&p| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidParameter(format!("cannot sample distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probabilities.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    let freqs: Vec<f64> = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    Ok(MeasurementHistogram::from_dense(layout, &freqs))
}

/// Density matrix of the hybrid register.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridDensityMatrix {
    layout: ModeLayout,
    matrix: DMatrix<C64>,
}

impl HybridDensityMatrix {
    pub fn from_pure(state: &HybridPureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            layout: state.layout().clone(),
            matrix: &v * v.adjoint(),
        }
    }

    pub fn from_matrix(layout: &ModeLayout, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() != layout.dim() || matrix.ncols() != layout.dim() {
            return Err(Error::LengthMismatch {
                expected: layout.dim(),
                got: matrix.nrows(),
            });
        }
        Ok(Self {
            layout: layout.clone(),
            matrix,
        })
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρᵢⱼ|² for Hermitian ρ.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest `|ρ − ρ†|` entry.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.matrix.nrows();
        let mut err: f64 = 0.0;
        for c in 0..d {
            for r in 0..=c {
                err = err.max((self.matrix[(r, c)] - self.matrix[(c, r)].conj()).norm());
            }
        }
        err
    }

    /// `ρ ← UρU†` where `apply` performs `v ← Uv` on one register vector.
    ///
    /// Uses `UρU† = U(Uρ)†` for Hermitian ρ, so only left actions are needed.
    pub fn conjugate_with(&mut self, mut apply: impl FnMut(&mut [C64])) {
        let d = self.matrix.nrows();
        for column in self.matrix.as_mut_slice().chunks_exact_mut(d) {
            apply(column);
        }
        self.matrix.adjoint_mut();
        for column in self.matrix.as_mut_slice().chunks_exact_mut(d) {
            apply(column);
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn exact_probabilities(&self) -> MeasurementHistogram {
        MeasurementHistogram::from_dense(&self.layout, &self.probabilities())
    }

    pub fn sample_histogram(&self, shots: usize, seed: u64) -> Result<MeasurementHistogram> {
        sample_from_probabilities(&self.layout, &self.probabilities(), shots, seed)
    }

    /// Mean photon number of qumode `mode`.
    pub fn mean_photon_number(&self, mode: usize) -> f64 {
        self.probabilities()
            .iter()
            .enumerate()
            .map(|(i, p)| p * self.layout.outcome_at(i).occupations[mode] as f64)
            .sum()
    }
}

/// Exact probabilities of a normalized pure state.
pub fn exact_probabilities(state: &HybridPureState) -> MeasurementHistogram {
    state.exact_probabilities()
}

pub fn sample_histogram(state: &HybridPureState, shots: usize, seed: u64) -> Result<MeasurementHistogram> {
    state.sample_histogram(shots, seed)
}
