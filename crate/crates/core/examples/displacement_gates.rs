//! Truncated displacements, coherent states and the echoed conditional
//! displacement acting on a qubit and one qumode.
//!
//! cargo run --example displacement_gates

use ecdvqe::hilbert::ModeLayout;
use ecdvqe::sim::{displacement_matrix, HybridPureState};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn main() -> ecdvqe::error::Result<()> {
    let beta = C64::new(1.2, 0.5);
    for cutoff in [4, 8, 16, 32] {
        let d = displacement_matrix(beta, cutoff);
        let unitarity = (d.adjoint() * &d - DMatrix::identity(cutoff, cutoff)).norm();
        let coherent = d.column(0);
        let mean = beta.norm_sqr();
        let poisson_gap: f64 = (0..cutoff)
            .map(|n| (coherent[n].norm_sqr() - (-mean).exp() * mean.powi(n as i32) / factorial(n)).abs())
            .sum();
        println!("L = {cutoff:2}: ‖D†D − 1‖ = {unitarity:.1e}, distance to Poisson statistics {poisson_gap:.1e}");
    }

    // D(β) D(−β) = 1 holds exactly in the truncated space.
    let d = displacement_matrix(beta, 8);
    let back = displacement_matrix(-beta, 8);
    println!("‖D(β)D(−β) − 1‖ = {:.1e}", (d * back - DMatrix::identity(8, 8)).norm());

    // ECD on |0⟩|0⟩ flips the qubit and displaces by +β/2.
    let layout = ModeLayout::new(4, &[8])?;
    let mut state = HybridPureState::vacuum(&layout);
    state.apply_ecd(0, C64::new(2.0, 0.0))?;
    let amplitudes = DVector::from_column_slice(state.amplitudes());
    let mode_after = amplitudes.rows(8, 8);
    let expected = displacement_matrix(C64::new(1.0, 0.0), 8).column(0).into_owned();
    println!("ECD(2)|0,0⟩: qubit-0 weight {:.1e}, overlap with |1⟩|β/2⟩ = {:.12}",
        amplitudes.rows(0, 8).norm_squared(),
        expected.dotc(&mode_after).norm()
    );

    let mut state = HybridPureState::vacuum(&layout);
    state.apply_rotation(std::f64::consts::FRAC_PI_2, 0.0);
    state.apply_ecd(0, C64::new(2.0, 0.0))?;
    println!("after R(π/2, 0) then ECD(2):");
    for record in state.exact_probabilities().to_records().iter().take(6) {
        println!("  |{},{}⟩  {:.4}", record.q, record.occ[0], record.p);
    }
    Ok(())
}
