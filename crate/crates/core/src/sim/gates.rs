//! Gate matrices for the hybrid register: truncated bosonic ladder
//! operators, displacements and single-qubit rotations.

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Truncated annihilation operator: `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(cutoff: usize) -> DMatrix<C64> {
    DMatrix::from_fn(cutoff, cutoff, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

pub fn creation(cutoff: usize) -> DMatrix<C64> {
    annihilation(cutoff).adjoint()
}

pub fn number(cutoff: usize) -> DMatrix<C64> {
    DMatrix::from_fn(cutoff, cutoff, |r, c| if r == c { C64::new(r as f64, 0.0) } else { ZERO })
}

/// Displacement operators `D(β) = exp(βa† − β*a)` on one truncated mode.
///
/// With `β = r·e^{iϕ}`, rotating by `e^{iϕn̂}` and conjugating with
/// `S = diag(iⁿ)` turns the generator into `−i·r·(a + a†)`, so
/// `D(β)ₘₙ = (i·e^{iϕ})^{m−n} Σₖ Vₘₖ Vₙₖ e^{−i r λₖ}` where `(λ, V)` is the
/// eigensystem of the real symmetric `a + a†`. The result is exactly unitary
/// on the truncated space. The eigensystem depends only on the cutoff and is
/// computed once.
#[derive(Debug, Clone)]
pub struct Displacer {
    cutoff: usize,
    /// Row-major eigenvectors.
    vectors: Vec<f64>,
    values: Vec<f64>,
}

impl Displacer {
    pub fn new(cutoff: usize) -> Self {
        assert!(cutoff >= 1, "cutoff must be positive");
        let quadrature = DMatrix::from_fn(cutoff, cutoff, |r, c| {
            if c == r + 1 {
                (c as f64).sqrt()
            } else if r == c + 1 {
                (r as f64).sqrt()
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(quadrature);
        let mut vectors = vec![0.0; cutoff * cutoff];
        for m in 0..cutoff {
            for k in 0..cutoff {
                vectors[m * cutoff + k] = eig.eigenvectors[(m, k)];
            }
        }
        Self {
            cutoff,
            vectors,
            values: eig.eigenvalues.iter().copied().collect(),
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Writes `D(β)` row-major into `out` (length L²).
    pub fn fill(&self, beta: C64, out: &mut [C64]) {
        let l = self.cutoff;
        debug_assert_eq!(out.len(), l * l);
        let (r, phi) = beta.to_polar();
        let z: Vec<C64> = self.values.iter().map(|&lam| C64::from_polar(1.0, -r * lam)).collect();
        // w^d for d = 0..L−1 with w = i·e^{iϕ}; negative powers are conjugates.
        let w = I * C64::from_polar(1.0, phi);
        let mut powers = Vec::with_capacity(l);
        let mut acc = ONE;
        for _ in 0..l {
            powers.push(acc);
            acc *= w;
        }
        for m in 0..l {
            let vm = &self.vectors[m * l..(m + 1) * l];
            for n in m..l {
                let vn = &self.vectors[n * l..(n + 1) * l];
                let mut s = ZERO;
                for k in 0..l {
                    s += z[k] * (vm[k] * vn[k]);
                }
                let d = n - m;
                out[m * l + n] = powers[d].conj() * s;
                out[n * l + m] = powers[d] * s;
            }
        }
    }

    pub fn matrix(&self, beta: C64) -> DMatrix<C64> {
        let l = self.cutoff;
        let mut buf = vec![ZERO; l * l];
        self.fill(beta, &mut buf);
        DMatrix::from_row_slice(l, l, &buf)
    }
}

/// `exp(βa† − β*a)` on a mode truncated at `cutoff` levels.
pub fn displacement_matrix(beta: C64, cutoff: usize) -> DMatrix<C64> {
    Displacer::new(cutoff).matrix(beta)
}

/// `exp(−i(θ/2)[cos φ·X + sin φ·Y])`.
pub fn qubit_rotation(theta: f64, phi: f64) -> Matrix2<C64> {
    let [a, b, c, d] = rotation_entries(theta, phi);
    Matrix2::new(a, b, c, d)
}

/// Row-major entries of [`qubit_rotation`].
pub fn rotation_entries(theta: f64, phi: f64) -> [C64; 4] {
    let (s, c) = (theta / 2.0).sin_cos();
    let diag = C64::new(c, 0.0);
    [
        diag,
        -I * C64::from_polar(s, -phi),
        -I * C64::from_polar(s, phi),
        diag,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn max_abs(m: &DMatrix<C64>) -> f64 {
        m.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Generalized Laguerre polynomial by the three-term recurrence.
    fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
        let (mut prev, mut cur) = (1.0, 1.0 + alpha - x);
        if n == 0 {
            return prev;
        }
        for k in 1..n {
            let k = k as f64;
            let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Matrix elements of the untruncated displacement operator.
    fn analytic_element(m: usize, n: usize, beta: C64) -> C64 {
        let x = beta.norm_sqr();
        let env = (-x / 2.0).exp();
        if m >= n {
            let d = m - n;
            (factorial(n) / factorial(m)).sqrt() * beta.powu(d as u32) * env * laguerre(n, d as f64, x)
        } else {
            let d = n - m;
            (factorial(m) / factorial(n)).sqrt() * (-beta.conj()).powu(d as u32) * env * laguerre(m, d as f64, x)
        }
    }

    /// Taylor series of exp(βa† − β*a), summed to convergence.
    fn series_expm(beta: C64, l: usize) -> DMatrix<C64> {
        let g = creation(l) * beta - annihilation(l) * beta.conj();
        let mut term = DMatrix::<C64>::identity(l, l);
        let mut sum = term.clone();
        for k in 1..200 {
            term = &term * &g / C64::new(k as f64, 0.0);
            sum += &term;
            if max_abs(&term) < 1e-18 {
                break;
            }
        }
        sum
    }

    #[test]
    fn zero_displacement_is_identity() {
        let d = displacement_matrix(ZERO, 8);
        assert!(max_abs(&(d - DMatrix::identity(8, 8))) < 1e-12);
    }

    #[test]
    fn matches_series_exponential() {
        for &(beta, l) in &[(C64::new(0.3, -0.4), 6), (C64::new(1.2, 0.7), 8), (C64::new(-2.0, 0.5), 16)] {
            let d = displacement_matrix(beta, l);
            assert!(max_abs(&(d - series_expm(beta, l))) < 1e-10, "β={beta} L={l}");
        }
    }

    #[test]
    fn unitary_up_to_cutoff_32() {
        for l in [2, 4, 8, 16, 32] {
            let d = displacement_matrix(C64::new(1.1, -0.6), l);
            let err = max_abs(&(d.adjoint() * &d - DMatrix::identity(l, l)));
            assert!(err < 1e-10, "L={l}: {err}");
        }
    }

    #[test]
    fn coherent_state_mean_photon_number() {
        let beta = C64::new(0.5, 0.0);
        let d = displacement_matrix(beta, 16);
        let mean: f64 = (0..16).map(|n| n as f64 * d[(n, 0)].norm_sqr()).sum();
        assert!((mean - 0.25).abs() < 1e-6);
        // Poisson statistics of the coherent state.
        for n in 0..6 {
            let poisson = (-0.25f64).exp() * 0.25f64.powi(n as i32) / factorial(n);
            assert!((d[(n, 0)].norm_sqr() - poisson).abs() < 1e-9);
        }
    }

    #[test]
    fn inverse_is_negated_argument() {
        let beta = C64::new(0.3, 0.4);
        let p = displacement_matrix(beta, 12) * displacement_matrix(-beta, 12);
        assert!(max_abs(&(p - DMatrix::identity(12, 12))) < 1e-10);
    }

    #[test]
    fn composition_phase_law() {
        // D(α)D(β) = exp((αβ* − α*β)/2) D(α + β), exact away from the cutoff.
        let (a, b) = (C64::new(0.2, 0.1), C64::new(-0.1, 0.25));
        let l = 32;
        let lhs = displacement_matrix(a, l) * displacement_matrix(b, l);
        let phase = ((a * b.conj() - a.conj() * b) / 2.0).exp();
        let rhs = displacement_matrix(a + b, l) * phase;
        for m in 0..8 {
            for n in 0..8 {
                assert!((lhs[(m, n)] - rhs[(m, n)]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn agrees_with_laguerre_elements_as_cutoff_grows() {
        let beta = C64::new(0.8, -0.5);
        let mut previous = f64::INFINITY;
        for l in [8, 12, 16, 24] {
            let d = displacement_matrix(beta, l);
            let err = (0..4)
                .flat_map(|m| (0..4).map(move |n| (m, n)))
                .map(|(m, n)| (d[(m, n)] - analytic_element(m, n, beta)).norm())
                .fold(0.0, f64::max);
            assert!(err <= previous + 1e-15, "L={l}: {err} > {previous}");
            previous = err;
        }
        assert!(previous < 1e-10);
    }

    #[test]
    fn rotation_closed_forms() {
        let id = qubit_rotation(0.0, 0.3);
        assert!((id - Matrix2::identity()).norm() < 1e-15);

        // θ = π, φ = 0 → −iX
        let x = qubit_rotation(PI, 0.0);
        let want = Matrix2::new(ZERO, -I, -I, ZERO);
        assert!((x - want).norm() < 1e-15);

        // θ = π, φ = π/2 → −iY = [[0, −1], [1, 0]]
        let y = qubit_rotation(PI, FRAC_PI_2);
        let want = Matrix2::new(ZERO, -ONE, ONE, ZERO);
        assert!((y - want).norm() < 1e-15);

        let u = qubit_rotation(1.234, -2.5);
        assert!((u.adjoint() * u - Matrix2::identity()).norm() < 1e-14);
    }

    #[test]
    fn ladder_operators() {
        let a = annihilation(5);
        let n = creation(5) * &a;
        assert!(max_abs(&(n - number(5))) < 1e-14);
    }
}
