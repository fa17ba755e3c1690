//! Layered ECD ansatz: each block applies, for every qumode in order, a
//! qubit rotation `R(θ, φ)` followed by `ECD_k(β)` with `β = r·e^{iφ̃}`.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gates::{rotation_entries, Displacer, ZERO};
use super::state::{adjoint_row_major, apply_ecd, apply_qubit_gate, HybridDensityMatrix, HybridPureState};
use crate::error::{Error, Result};
use crate::hilbert::ModeLayout;
use crate::noise::{apply_single_mode, kraus_for_layout, NoiseConfig};

/// Parameters per (block, qumode): θ, φ, r, φ̃.
pub const PARAMS_PER_MODE: usize = 4;

/// Upper end of the initial displacement magnitude range.
pub const INITIAL_RADIUS: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGate {
    pub theta: f64,
    pub phi: f64,
    pub r: f64,
    pub phi_tilde: f64,
}

impl ModeGate {
    pub fn beta(&self) -> C64 {
        C64::from_polar(self.r, self.phi_tilde)
    }
}

/// Flat parameter vector `[θ, φ, r, φ̃]` per qumode, qumodes ascending within
/// each block, blocks ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzParameters {
    depth: usize,
    num_modes: usize,
    values: Vec<f64>,
}

impl AnsatzParameters {
    pub fn len_for(depth: usize, num_modes: usize) -> usize {
        PARAMS_PER_MODE * depth * num_modes
    }

    pub fn from_packed(depth: usize, num_modes: usize, values: Vec<f64>) -> Result<Self> {
        let expected = Self::len_for(depth, num_modes);
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("ansatz parameters must be finite".into()));
        }
        Ok(Self {
            depth,
            num_modes,
            values,
        })
    }

    pub fn zeros(depth: usize, num_modes: usize) -> Self {
        Self {
            depth,
            num_modes,
            values: vec![0.0; Self::len_for(depth, num_modes)],
        }
    }

    /// Angles uniform in [0, 2π), magnitudes uniform in [0, 0.2].
    pub fn random(depth: usize, num_modes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..Self::len_for(depth, num_modes))
            .map(|i| {
                if i % PARAMS_PER_MODE == 2 {
                    rng.gen_range(0.0..=INITIAL_RADIUS)
                } else {
                    rng.gen_range(0.0..TAU)
                }
            })
            .collect();
        Self {
            depth,
            num_modes,
            values,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn packed(&self) -> &[f64] {
        &self.values
    }

    pub fn into_packed(self) -> Vec<f64> {
        self.values
    }

    pub fn gate(&self, block: usize, mode: usize) -> ModeGate {
        let i = PARAMS_PER_MODE * (block * self.num_modes + mode);
        ModeGate {
            theta: self.values[i],
            phi: self.values[i + 1],
            r: self.values[i + 2],
            phi_tilde: self.values[i + 3],
        }
    }
}

/// Gate matrices of one block, ready for the in-place kernels.
struct BlockGates {
    rotations: Vec<[C64; 4]>,
    plus: Vec<Vec<C64>>,
    minus: Vec<Vec<C64>>,
}

/// Reusable simulator for one layout; caches the displacement eigensystems.
#[derive(Debug, Clone)]
pub struct AnsatzSimulator {
    layout: ModeLayout,
    displacers: Vec<Displacer>,
}

impl AnsatzSimulator {
    pub fn new(layout: &ModeLayout) -> Self {
        let mut displacers: Vec<Displacer> = Vec::new();
        for l in layout.cutoffs() {
            let d = displacers.iter().find(|d| d.cutoff() == l).cloned().unwrap_or_else(|| Displacer::new(l));
            displacers.push(d);
        }
        Self {
            layout: layout.clone(),
            displacers,
        }
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    fn check(&self, params: &AnsatzParameters) -> Result<()> {
        if params.num_modes() != self.layout.num_modes() {
            return Err(Error::LengthMismatch {
                expected: self.layout.num_modes(),
                got: params.num_modes(),
            });
        }
        Ok(())
    }

    fn block_gates(&self, params: &AnsatzParameters, block: usize) -> BlockGates {
        let modes = self.layout.num_modes();
        let mut gates = BlockGates {
            rotations: Vec::with_capacity(modes),
            plus: Vec::with_capacity(modes),
            minus: Vec::with_capacity(modes),
        };
        for k in 0..modes {
            let g = params.gate(block, k);
            let l = self.layout.cutoff(k);
            let mut plus = vec![ZERO; l * l];
            self.displacers[k].fill(g.beta() / 2.0, &mut plus);
            gates.minus.push(adjoint_row_major(&plus, l));
            gates.plus.push(plus);
            gates.rotations.push(rotation_entries(g.theta, g.phi));
        }
        gates
    }

    fn apply_block(&self, gates: &BlockGates, amps: &mut [C64], scratch: &mut [C64]) {
        for k in 0..self.layout.num_modes() {
            apply_qubit_gate(amps, &gates.rotations[k]);
            apply_ecd(amps, &self.layout, k, &gates.plus[k], &gates.minus[k], scratch);
        }
    }

    fn scratch(&self) -> Vec<C64> {
        vec![ZERO; 2 * self.layout.cutoffs().into_iter().max().unwrap_or(1)]
    }

    /// `U(θ)|0⟩_Q|0⟩…|0⟩`.
    pub fn run(&self, params: &AnsatzParameters) -> Result<HybridPureState> {
        self.check(params)?;
        let mut amps = HybridPureState::vacuum(&self.layout).amplitudes().to_vec();
        let mut scratch = self.scratch();
        for block in 0..params.depth() {
            let gates = self.block_gates(params, block);
            self.apply_block(&gates, &mut amps, &mut scratch);
        }
        Ok(HybridPureState::from_raw(&self.layout, amps))
    }

    /// Density-matrix evolution with the photon-loss channel after every
    /// block, the last one included.
    pub fn run_noisy(&self, params: &AnsatzParameters, noise: &NoiseConfig) -> Result<HybridDensityMatrix> {
        self.check(params)?;
        let kraus = kraus_for_layout(noise, &self.layout.cutoffs())?;
        let mut rho = HybridDensityMatrix::from_pure(&HybridPureState::vacuum(&self.layout));
        let mut scratch = self.scratch();
        for block in 0..params.depth() {
            let gates = self.block_gates(params, block);
            rho.conjugate_with(|column| self.apply_block(&gates, column, &mut scratch));
            if !noise.is_noiseless() {
                for (k, set) in kraus.iter().enumerate() {
                    apply_single_mode(&mut rho, k, set);
                }
            }
        }
        Ok(rho)
    }
}

pub fn run_ansatz(params: &AnsatzParameters, layout: &ModeLayout) -> Result<HybridPureState> {
    AnsatzSimulator::new(layout).run(params)
}

pub fn evolve_noisy(params: &AnsatzParameters, layout: &ModeLayout, noise: &NoiseConfig) -> Result<HybridDensityMatrix> {
    AnsatzSimulator::new(layout).run_noisy(params, noise)
}
