//! Knapsack ECD-VQE with photon loss after every block, re-optimized under
//! the noisy cost for a range of κτ.
//!
//! cargo run --release --example photon_loss

use ecdvqe::hilbert::ModeLayout;
use ecdvqe::noise::NoiseConfig;
use ecdvqe::qubo::{exact_ground_state, reference_knapsack, to_pauli_hamiltonian, to_unconstrained};
use ecdvqe::vqe::{outcome_label, run_ecd_vqe, OptimizerConfig};

fn main() -> ecdvqe::error::Result<()> {
    let h = to_pauli_hamiltonian(&to_unconstrained(&reference_knapsack()));
    let layout = ModeLayout::new(h.num_qubits(), &[8, 8])?;
    let (ground, _) = exact_ground_state(&h)?;
    let target = layout.encode(&ground)?;

    for kappa_tau in [0.0, 1e-3, 1e-2, 1e-1] {
        let config = OptimizerConfig {
            max_iterations: 80,
            noise: NoiseConfig::new(kappa_tau)?,
            ..Default::default()
        };
        let run = run_ecd_vqe(&h, &layout, 5, &config)?;
        let (outcome, p) = run.final_argmax();
        println!(
            "κτ = {kappa_tau:<6} E = {:>9.4}  argmax {}  p = {:.4}  P{} = {:.4}  {:.1?}",
            run.final_energy,
            outcome_label(&outcome),
            p,
            target,
            run.histogram.probability(&target),
            run.wall_time
        );
    }
    Ok(())
}
