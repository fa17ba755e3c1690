//! Equality, less-than and greater-than constraints on three variables,
//! solved on a qubit plus a 4-level and an 8-level qumode.
//!
//! cargo run --release --example multi_constraint

use ecdvqe::hilbert::ModeLayout;
use ecdvqe::qubo::{exact_ground_state, reference_multi_constraint, to_pauli_hamiltonian, to_unconstrained};
use ecdvqe::vqe::{extract_solution, outcome_label, run_multi_seed, OptimizerConfig};

fn main() -> ecdvqe::error::Result<()> {
    let problem = reference_multi_constraint();
    let h = to_pauli_hamiltonian(&to_unconstrained(&problem));
    println!("{} qubits, {} Pauli terms", h.num_qubits(), h.len());
    let layout = ModeLayout::new(h.num_qubits(), &[4, 8])?;
    let (ground, e0) = exact_ground_state(&h)?;
    let target = layout.encode(&ground)?;
    println!("exact ground state {ground:?}, energy {e0}, outcome {target}");

    let config = OptimizerConfig {
        max_iterations: 80,
        // The optimum sits about four photons out; start the displacements wider.
        initial_scale: 2.0,
        ..Default::default()
    };
    let seeds: Vec<u64> = (0..5).collect();
    let result = run_multi_seed(&h, &layout, 10, &config, &seeds)?;
    for run in &result.runs {
        let (outcome, p) = run.final_argmax();
        println!(
            "seed {}: E = {:.6}, argmax {} p = {:.4}, settled at {:?}, {:.1?}",
            run.seed,
            run.final_energy,
            outcome_label(&outcome),
            p,
            run.argmax_settles_at(&target),
            run.wall_time,
        );
    }
    let best = result.best_run();
    let solution = extract_solution(&best.histogram, &layout, &problem)?;
    println!(
        "best seed {}: x = {:?}, objective {}, feasible {}",
        best.seed, solution.bits, solution.objective, solution.feasible
    );
    Ok(())
}
