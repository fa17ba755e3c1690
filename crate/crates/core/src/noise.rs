//! Photon-loss (amplitude damping) channel on truncated qumodes.
//!
//! `Kⱼ = √((1 − e^{−κτ})ʲ / j!) · e^{−κτ n̂/2} · aʲ` for j ≥ 1, with `K₀`
//! replaced by `(I − Σ_{j≥1} Kⱼ†Kⱼ)^{1/2}` so that the truncated set stays
//! trace preserving. The qubit is left untouched.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::state::HybridDensityMatrix;

/// Per-block photon loss, the dimensionless product κτ.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseConfig {
    pub kappa_tau: f64,
}

impl NoiseConfig {
    pub fn new(kappa_tau: f64) -> Result<Self> {
        if !(kappa_tau >= 0.0 && kappa_tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("κτ must be a finite nonnegative number, got {kappa_tau}")));
        }
        Ok(Self { kappa_tau })
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn is_noiseless(&self) -> bool {
        self.kappa_tau == 0.0
    }
}

/// Kraus operators of the amplitude-damping channel on one qumode.
///
/// Every `Kⱼ` lowers the photon number by exactly j, so it is stored as the
/// real band `band[j][n] = ⟨n−j|Kⱼ|n⟩` (zero for n < j).
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    kappa_tau: f64,
    cutoff: usize,
    bands: Vec<Vec<f64>>,
}

impl KrausSet {
    pub fn kappa_tau(&self) -> f64 {
        self.kappa_tau
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn band(&self, j: usize) -> &[f64] {
        &self.bands[j]
    }

    pub fn operator(&self, j: usize) -> DMatrix<C64> {
        let l = self.cutoff;
        let mut k = DMatrix::zeros(l, l);
        for n in j..l {
            k[(n - j, n)] = C64::new(self.bands[j][n], 0.0);
        }
        k
    }

    pub fn operators(&self) -> Vec<DMatrix<C64>> {
        (0..self.len()).map(|j| self.operator(j)).collect()
    }

    /// `max |Σ Kⱼ†Kⱼ − I|`.
    pub fn completeness_error(&self) -> f64 {
        let l = self.cutoff;
        let sum = self
            .operators()
            .iter()
            .fold(DMatrix::<C64>::zeros(l, l), |acc, k| acc + k.adjoint() * k);
        (sum - DMatrix::identity(l, l)).iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

pub fn kraus_amplitude_damping(kappa_tau: f64, cutoff: usize) -> Result<KrausSet> {
    if !(kappa_tau >= 0.0 && kappa_tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("κτ must be a finite nonnegative number, got {kappa_tau}")));
    }
    if cutoff < 2 {
        return Err(Error::InvalidParameter(format!("cutoff must be at least 2, got {cutoff}")));
    }
    let loss = -(-kappa_tau).exp_m1();
    let mut bands = vec![vec![0.0; cutoff]; cutoff];
    for (j, band) in bands.iter_mut().enumerate().skip(1) {
        if loss == 0.0 {
            break;
        }
        for (n, entry) in band.iter_mut().enumerate().skip(j) {
            // √(lossʲ/j!) · e^{−κτ(n−j)/2} · √(n!/(n−j)!)
            let ln = 0.5 * (j as f64 * loss.ln() - ln_factorial(j)) - 0.5 * kappa_tau * (n - j) as f64
                + 0.5 * (ln_factorial(n) - ln_factorial(n - j));
            *entry = ln.exp();
        }
    }
    // K̃₀: every Kⱼ†Kⱼ is diagonal, so the square root is elementwise.
    let residual: Vec<f64> = (0..cutoff)
        .map(|n| 1.0 - bands[1..].iter().map(|b| b[n] * b[n]).sum::<f64>())
        .collect();
    for (entry, r) in bands[0].iter_mut().zip(residual) {
        *entry = r.max(0.0).sqrt();
    }
    Ok(KrausSet {
        kappa_tau,
        cutoff,
        bands,
    })
}

/// `ρ ← Σⱼ Kⱼ ρ Kⱼ†` on one qumode.
pub(crate) fn apply_single_mode(rho: &mut HybridDensityMatrix, mode: usize, kraus: &KrausSet) {
    let layout = rho.layout().clone();
    let l = layout.cutoff(mode);
    let stride = layout.stride(mode);
    let d = layout.dim();
    let level = |idx: usize| (idx / stride) % l;

    let src = rho.matrix().clone();
    let dst = rho.matrix_mut();
    dst.fill(C64::new(0.0, 0.0));
    let src = src.as_slice();
    let out = dst.as_mut_slice();
    // Column-major: element (r, c) lives at c·d + r.
    for c in 0..d {
        let nc = level(c);
        for r in 0..d {
            let value = src[c * d + r];
            if value.re == 0.0 && value.im == 0.0 {
                continue;
            }
            let nr = level(r);
            for j in 0..=nr.min(nc) {
                let w = kraus.bands[j][nr] * kraus.bands[j][nc];
                out[(c - j * stride) * d + (r - j * stride)] += value * w;
            }
        }
    }
}

/// Applies the same-κτ channel independently to every qumode; the qubit
/// factor is the identity. One Kraus set per qumode, cutoffs must match.
pub fn apply_channel_multimode(rho: &HybridDensityMatrix, kraus: &[KrausSet]) -> Result<HybridDensityMatrix> {
    let layout = rho.layout();
    if kraus.len() != layout.num_modes() {
        return Err(Error::LengthMismatch {
            expected: layout.num_modes(),
            got: kraus.len(),
        });
    }
    for (k, set) in kraus.iter().enumerate() {
        if set.cutoff() != layout.cutoff(k) {
            return Err(Error::InvalidParameter(format!(
                "Kraus cutoff {} does not match qumode {k} cutoff {}",
                set.cutoff(),
                layout.cutoff(k)
            )));
        }
    }
    let mut out = rho.clone();
    for (k, set) in kraus.iter().enumerate() {
        if set.kappa_tau() > 0.0 {
            apply_single_mode(&mut out, k, set);
        }
    }
    Ok(out)
}

/// Kraus sets for every qumode of a layout.
pub fn kraus_for_layout(noise: &NoiseConfig, cutoffs: &[usize]) -> Result<Vec<KrausSet>> {
    cutoffs.iter().map(|&l| kraus_amplitude_damping(noise.kappa_tau, l)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::ModeLayout;
    use crate::sim::state::HybridPureState;

    fn fock(layout: &ModeLayout, q: u8, occ: &[usize]) -> HybridDensityMatrix {
        let mut amps = vec![C64::new(0.0, 0.0); layout.dim()];
        amps[layout.flat_index(&crate::hilbert::BasisOutcome::new(q, occ.to_vec()))] = C64::new(1.0, 0.0);
        HybridDensityMatrix::from_pure(&HybridPureState::from_amplitudes(layout, amps).unwrap())
    }

    #[test]
    fn noiseless_set_is_identity() {
        let k = kraus_amplitude_damping(0.0, 8).unwrap();
        assert_eq!(k.operator(0), DMatrix::identity(8, 8));
        for j in 1..8 {
            assert!(k.operator(j).iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(kraus_amplitude_damping(-0.1, 8).is_err());
        assert!(kraus_amplitude_damping(0.1, 1).is_err());
        assert!(NoiseConfig::new(f64::NAN).is_err());
    }

    #[test]
    fn completeness() {
        for kt in [0.0, 1e-3, 1e-2, 1e-1, 1.0] {
            for l in [4, 8, 16] {
                let k = kraus_amplitude_damping(kt, l).unwrap();
                assert!(k.completeness_error() < 1e-10, "κτ={kt} L={l}");
            }
        }
    }

    #[test]
    fn single_photon_survival() {
        let layout = ModeLayout::new(4, &[8]).unwrap();
        let rho = fock(&layout, 0, &[1]);
        let k = kraus_amplitude_damping(0.1, 8).unwrap();
        let out = apply_channel_multimode(&rho, &[k]).unwrap();
        let p = out.probabilities();
        assert!((p[1] - (-0.1f64).exp()).abs() < 1e-12);
        assert!((p[0] - (1.0 - (-0.1f64).exp())).abs() < 1e-12);
        assert!((p[1] - 0.9048).abs() < 1e-4);
    }

    #[test]
    fn strong_loss_empties_the_mode() {
        let layout = ModeLayout::new(5, &[16]).unwrap();
        let rho = fock(&layout, 0, &[5]);
        let k = kraus_amplitude_damping(20.0, 16).unwrap();
        let out = apply_channel_multimode(&rho, &[k]).unwrap();
        assert!(out.probabilities()[0] > 0.999);
    }

    #[test]
    fn qubit_is_untouched() {
        let layout = ModeLayout::new(4, &[2, 4]).unwrap();
        let rho = fock(&layout, 1, &[1, 3]);
        let sets = kraus_for_layout(&NoiseConfig::new(0.3).unwrap(), &layout.cutoffs()).unwrap();
        let out = apply_channel_multimode(&rho, &sets).unwrap();
        let p = out.probabilities();
        let excited: f64 = p[layout.mode_dim()..].iter().sum();
        assert!((excited - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_sets_are_rejected() {
        let layout = ModeLayout::new(4, &[2, 4]).unwrap();
        let rho = fock(&layout, 0, &[0, 0]);
        let k = kraus_amplitude_damping(0.1, 4).unwrap();
        assert!(apply_channel_multimode(&rho, std::slice::from_ref(&k)).is_err());
        assert!(apply_channel_multimode(&rho, &[k.clone(), k]).is_err());
    }
}
