//! Solves the four-item knapsack with one qubit and two qumodes.
//!
//! cargo run --release --example bkp_ecd_vqe

use ecdvqe::hilbert::ModeLayout;
use ecdvqe::qubo::{exact_ground_state, reference_knapsack, to_pauli_hamiltonian, to_unconstrained};
use ecdvqe::vqe::{extract_solution, outcome_label, run_multi_seed, OptimizerConfig};

fn main() -> ecdvqe::error::Result<()> {
    let problem = reference_knapsack();
    let h = to_pauli_hamiltonian(&to_unconstrained(&problem));
    let layout = ModeLayout::new(h.num_qubits(), &[8, 8])?;
    let (ground, e0) = exact_ground_state(&h)?;
    let target = layout.encode(&ground)?;
    println!("exact ground state {ground:?}, energy {e0}, outcome {target}");

    let config = OptimizerConfig {
        max_iterations: 200,
        ..Default::default()
    };
    let seeds: Vec<u64> = (0..5).collect();
    let result = run_multi_seed(&h, &layout, 5, &config, &seeds)?;
    for run in &result.runs {
        let (outcome, p) = run.final_argmax();
        println!(
            "seed {}: {} iterations, E = {:.6}, argmax {} p = {:.4}, p>0.9 at {:?}, |E-E0|<0.5 at {:?}, settled at {:?}, {:.1?}",
            run.seed,
            run.iterations(),
            run.final_energy,
            outcome_label(&outcome),
            p,
            run.outcome_reaches(&target, 0.9),
            run.energy_reaches(e0, 0.5),
            run.argmax_settles_at(&target),
            run.wall_time,
        );
    }
    let best = result.best_run();
    let solution = extract_solution(&best.histogram, &layout, &problem)?;
    println!(
        "best seed {}: x = {:?}, value {}, feasible {}",
        best.seed, solution.bits, solution.objective, solution.feasible
    );
    Ok(())
}
