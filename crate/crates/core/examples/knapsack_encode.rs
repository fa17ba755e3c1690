//! From a knapsack instance to a diagonal Pauli-Z Hamiltonian and back.
//!
//! cargo run --example knapsack_encode

use ecdvqe::qubo::{
    build_knapsack, exact_ground_state, to_pauli_hamiltonian, to_unconstrained, PauliZHamiltonian, ProblemFile,
};
use ecdvqe::vqe::solution_from_bits;

fn print_terms(h: &PauliZHamiltonian) {
    for term in h.terms() {
        let word: Vec<String> = term.qubits.iter().map(|q| format!("Z{q}")).collect();
        let word = if word.is_empty() { "I".to_string() } else { word.join(" ") };
        println!("  {:+10.4}  {word}", term.coefficient);
    }
}

fn main() -> ecdvqe::error::Result<()> {
    let problem = build_knapsack(&[2.0, 5.0, 7.0, 3.0], &[2.5, 3.0, 4.0, 3.5], 7.0, 2.0)?;
    println!(
        "{} items, {} slack bits, {} qubits",
        problem.num_variables(),
        problem.num_slack_bits(),
        problem.total_variables()
    );
    let poly = to_unconstrained(&problem);
    let h = to_pauli_hamiltonian(&poly);
    println!("{} terms:", h.len());
    print_terms(&h);

    let (ground, energy) = exact_ground_state(&h)?;
    let solution = solution_from_bits(&ground, &problem)?;
    println!("ground state {ground:?} at E = {energy}");
    println!("  items {:?}, value {}, feasible {}", solution.bits, solution.objective, solution.feasible);

    // Problem files accept <=, >= and = rows with optional slack-bit overrides.
    let text = r#"{
        "sense": "min",
        "objective": [[0, 1], [1, 2], [2, 1]],
        "constraints": [
            { "coeffs": [[0, 1], [1, 1], [2, 1]], "sense": "=", "rhs": 1, "lambda": 5 },
            { "coeffs": [[0, 2], [1, 1]], "sense": "<=", "rhs": 3, "lambda": 5, "slack_bits": 2 }
        ]
    }"#;
    let problem = ProblemFile::from_json(text)?.into_problem()?;
    let h = to_pauli_hamiltonian(&to_unconstrained(&problem));
    let (ground, energy) = exact_ground_state(&h)?;
    println!("file problem: {} qubits, {} terms, ground state {ground:?} at E = {energy}", h.num_qubits(), h.len());
    Ok(())
}
