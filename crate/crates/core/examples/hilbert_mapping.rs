//! Regrouping a qubit register into one qubit plus qumodes, and the three
//! equivalent ways of writing the problem energy on that register.
//!
//! cargo run --example hilbert_mapping

use ecdvqe::hilbert::{project_hamiltonian, ModeLayout, SlackNumberHamiltonian};
use ecdvqe::qubo::{exact_ground_state, reference_multi_constraint, to_pauli_hamiltonian, to_unconstrained};

fn main() -> ecdvqe::error::Result<()> {
    let problem = reference_multi_constraint();
    let h = to_pauli_hamiltonian(&to_unconstrained(&problem));
    let (ground, energy) = exact_ground_state(&h)?;
    println!("ground state {ground:?}, E = {energy}");

    println!("candidate layouts for {} qubits:", h.num_qubits());
    for layout in ModeLayout::suggestions(h.num_qubits(), 4) {
        println!("  {layout}  ->  {}", layout.encode(&ground)?);
    }

    let layout = ModeLayout::new(h.num_qubits(), &[4, 8])?;
    let outcome = layout.encode(&ground)?;
    println!("on {layout}: {outcome}, flat index {}", layout.flat_index(&outcome));

    let projected = project_hamiltonian(&h, &layout)?;
    println!(
        "projector form: {} pair tables, E{outcome} = {}",
        projected.num_pair_tables(),
        projected.evaluate(&outcome)
    );

    // Each slack register needs its own qumode for the photon-number form,
    // where the occupation is the slack integer itself.
    let slack_layout = ModeLayout::new(h.num_qubits(), &[4, 4, 2])?;
    let slack = SlackNumberHamiltonian::new(&problem, &slack_layout)?;
    let mut slack_outcome = slack_layout.encode(&ground)?;
    for index in 0..slack_layout.dim() {
        let o = slack_layout.outcome_at(index);
        if slack.equivalent_bits(&o)? == ground {
            slack_outcome = o;
            break;
        }
    }
    println!(
        "slack-number form on {slack_layout}: E{slack_outcome} = {}",
        slack.evaluate(&slack_outcome)?
    );

    let mut worst: f64 = 0.0;
    for index in 0..layout.dim() {
        let o = layout.outcome_at(index);
        worst = worst.max((projected.evaluate(&o) - h.evaluate(&layout.decode(&o)?)?).abs());
    }
    println!("largest projector/Pauli disagreement over {} states: {worst:.1e}", layout.dim());
    Ok(())
}
