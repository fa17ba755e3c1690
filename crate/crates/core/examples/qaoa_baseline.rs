//! QAOA on the knapsack Hamiltonian, for comparison with the hybrid solver.
//!
//! cargo run --release --example qaoa_baseline

use ecdvqe::qaoa::{run_qaoa, sweep_layers, sweep_to_tsv, QaoaConfig};
use ecdvqe::qubo::{reference_knapsack, to_pauli_hamiltonian, to_unconstrained};

fn main() -> ecdvqe::error::Result<()> {
    let h = to_pauli_hamiltonian(&to_unconstrained(&reference_knapsack()));
    let config = QaoaConfig::default();

    let start = std::time::Instant::now();
    let result = run_qaoa(&h, 20, 50, &config)?;
    let best = result.best_trial();
    println!(
        "p = 20, 50 trials: best P(solution) = {:.4} (trial seed {}), energy {:.4}, argmax {:?}, sub-optimal mass {:.3}, {:.1?}",
        best.solution_probability,
        best.seed,
        best.energy,
        result.argmax(),
        result.suboptimal_mass(),
        start.elapsed()
    );
    for r in result.to_records().iter().take(5) {
        println!("  {} {:.4}", r.bits, r.p);
    }

    let rows = sweep_layers(&h, &[1, 5, 10, 15, 20], 50, &config)?;
    print!("{}", sweep_to_tsv(&rows, &[]));
    Ok(())
}
