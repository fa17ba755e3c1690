//! Constrained binary programs, their penalty/slack QUBO form, and the
//! diagonal Pauli-Z Hamiltonian obtained from `x ↦ (I − Z)/2`.
//!
//! Bitstrings are `&[u8]` with one entry (0 or 1) per variable. Whenever a
//! bitstring is packed into an integer, variable 0 is the most significant
//! bit; this matches the flat index of the hybrid register in [`crate::sim`].

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register [`exact_ground_state`] will enumerate.
pub const MAX_ENUMERATION_QUBITS: usize = 24;

/// Optimization direction of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "min")]
    Minimize,
    #[serde(rename = "max")]
    Maximize,
}

/// Relation between a constraint's left-hand side and its right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    LessEqual,
    #[serde(rename = "=")]
    Equal,
    #[serde(rename = ">=")]
    GreaterEqual,
}

/// A linear constraint enforced through a quadratic penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coefficients: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
    /// Penalty weight λ multiplying the squared violation.
    pub penalty: f64,
    /// Overrides the default number of binary slack variables.
    pub slack_bits: Option<usize>,
}

impl LinearConstraint {
    pub fn new(coefficients: Vec<(usize, f64)>, relation: Relation, rhs: f64, penalty: f64) -> Self {
        Self {
            coefficients,
            relation,
            rhs,
            penalty,
            slack_bits: None,
        }
    }

    pub fn with_slack_bits(mut self, bits: usize) -> Self {
        self.slack_bits = Some(bits);
        self
    }

    /// Largest slack value a feasible assignment can require, or `None` for
    /// equality constraints.
    pub fn slack_range(&self) -> Option<f64> {
        let min_lhs: f64 = self.coefficients.iter().map(|&(_, c)| c.min(0.0)).sum();
        let max_lhs: f64 = self.coefficients.iter().map(|&(_, c)| c.max(0.0)).sum();
        match self.relation {
            Relation::Equal => None,
            Relation::LessEqual => Some(self.rhs - min_lhs),
            Relation::GreaterEqual => Some(max_lhs - self.rhs),
        }
    }

    /// `⌈log₂(range + 1)⌉`, zero for equalities and empty ranges.
    pub fn default_slack_bits(&self) -> usize {
        match self.slack_range() {
            Some(range) if range > 0.0 => (range + 1.0).log2().ceil() as usize,
            _ => 0,
        }
    }

    pub fn slack_bit_count(&self) -> usize {
        match self.relation {
            Relation::Equal => 0,
            _ => self.slack_bits.unwrap_or_else(|| self.default_slack_bits()),
        }
    }

    pub fn lhs(&self, bits: &[u8]) -> f64 {
        self.coefficients
            .iter()
            .map(|&(i, c)| c * f64::from(bits[i]))
            .sum()
    }

    pub fn is_satisfied(&self, bits: &[u8], tol: f64) -> bool {
        let lhs = self.lhs(bits);
        match self.relation {
            Relation::LessEqual => lhs <= self.rhs + tol,
            Relation::Equal => (lhs - self.rhs).abs() <= tol,
            Relation::GreaterEqual => lhs >= self.rhs - tol,
        }
    }
}

/// A linear objective with linear constraints over `num_variables` binaries.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryProblem {
    pub sense: Sense,
    num_variables: usize,
    pub objective: Vec<(usize, f64)>,
    pub constraints: Vec<LinearConstraint>,
}

impl BinaryProblem {
    pub fn new(
        sense: Sense,
        num_variables: usize,
        objective: Vec<(usize, f64)>,
        constraints: Vec<LinearConstraint>,
    ) -> Result<Self> {
        if num_variables == 0 {
            return Err(Error::InvalidProblem("a problem needs at least one variable".into()));
        }
        let check = |i: usize, ctx: &str| -> Result<()> {
            if i >= num_variables {
                return Err(Error::InvalidProblem(format!(
                    "{ctx} references variable {i} but only {num_variables} are declared"
                )));
            }
            Ok(())
        };
        for &(i, c) in &objective {
            check(i, "objective")?;
            if !c.is_finite() {
                return Err(Error::InvalidProblem(format!("objective coefficient of x{i} is not finite")));
            }
        }
        for (k, con) in constraints.iter().enumerate() {
            for &(i, c) in &con.coefficients {
                check(i, &format!("constraint {k}"))?;
                if !c.is_finite() {
                    return Err(Error::InvalidProblem(format!("constraint {k} has a non-finite coefficient")));
                }
            }
            if !(con.penalty > 0.0 && con.penalty.is_finite()) {
                return Err(Error::InvalidProblem(format!(
                    "constraint {k} needs a positive penalty weight, got {}",
                    con.penalty
                )));
            }
            if !con.rhs.is_finite() {
                return Err(Error::InvalidProblem(format!("constraint {k} has a non-finite rhs")));
            }
        }
        Ok(Self {
            sense,
            num_variables,
            objective,
            constraints,
        })
    }

    /// Number of primary (decision) variables N₀.
    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    pub fn num_slack_bits(&self) -> usize {
        self.constraints.iter().map(LinearConstraint::slack_bit_count).sum()
    }

    /// N₀ plus all slack bits: the width of the unconstrained polynomial.
    pub fn total_variables(&self) -> usize {
        self.num_variables + self.num_slack_bits()
    }

    /// Index range of each constraint's slack bits in the unconstrained
    /// variable vector (empty for equalities).
    pub fn slack_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut next = self.num_variables;
        self.constraints
            .iter()
            .map(|c| {
                let start = next;
                next += c.slack_bit_count();
                start..next
            })
            .collect()
    }

    /// Objective value of the primary assignment (the first N₀ bits are used).
    pub fn objective_value(&self, bits: &[u8]) -> f64 {
        self.objective
            .iter()
            .map(|&(i, c)| c * f64::from(bits[i]))
            .sum()
    }

    pub fn is_feasible(&self, bits: &[u8]) -> bool {
        self.constraints.iter().all(|c| c.is_satisfied(bits, 1e-9))
    }
}

/// Knapsack: maximize `Σ vⱼxⱼ` subject to `Σ wⱼxⱼ ≤ capacity`.
pub fn build_knapsack(values: &[f64], weights: &[f64], capacity: f64, penalty: f64) -> Result<BinaryProblem> {
    if values.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            got: weights.len(),
        });
    }
    if values.is_empty() {
        return Err(Error::InvalidProblem("knapsack needs at least one item".into()));
    }
    if !(capacity > 0.0) {
        return Err(Error::InvalidProblem(format!("capacity must be positive, got {capacity}")));
    }
    if values.iter().chain(weights).any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidProblem("item values and weights must be positive".into()));
    }
    let objective = values.iter().copied().enumerate().collect();
    let capacity_row = LinearConstraint::new(
        weights.iter().copied().enumerate().collect(),
        Relation::LessEqual,
        capacity,
        penalty,
    );
    BinaryProblem::new(Sense::Maximize, values.len(), objective, vec![capacity_row])
}

/// Unordered pair key with `.0 < .1`.
fn pair(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

/// Quadratic pseudo-Boolean function `c + Σ aᵢxᵢ + Σ_{i<j} bᵢⱼxᵢxⱼ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinaryPolynomial {
    pub num_variables: usize,
    pub constant: f64,
    pub linear: BTreeMap<usize, f64>,
    pub quadratic: BTreeMap<(usize, usize), f64>,
}

impl BinaryPolynomial {
    pub fn new(num_variables: usize) -> Self {
        Self {
            num_variables,
            ..Default::default()
        }
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    pub fn add_linear(&mut self, i: usize, c: f64) {
        *self.linear.entry(i).or_insert(0.0) += c;
    }

    /// Adds `c·xᵢxⱼ`; `xᵢ² = xᵢ` folds the diagonal into the linear part.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        if i == j {
            self.add_linear(i, c);
        } else {
            *self.quadratic.entry(pair(i, j)).or_insert(0.0) += c;
        }
    }

    /// Adds `weight · (offset + Σ aᵢxᵢ)²`.
    pub fn add_squared_affine(&mut self, weight: f64, offset: f64, terms: &[(usize, f64)]) {
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for &(i, a) in terms {
            *merged.entry(i).or_insert(0.0) += a;
        }
        let merged: Vec<(usize, f64)> = merged.into_iter().collect();

        self.add_constant(weight * offset * offset);
        for (k, &(i, a)) in merged.iter().enumerate() {
            self.add_linear(i, weight * (2.0 * offset * a + a * a));
            for &(j, b) in &merged[k + 1..] {
                self.add_quadratic(i, j, 2.0 * weight * a * b);
            }
        }
    }

    /// Drops coefficients that vanished during accumulation.
    pub fn normalize(&mut self) {
        let scale = self
            .linear
            .values()
            .chain(self.quadratic.values())
            .fold(self.constant.abs(), |m, c| m.max(c.abs()));
        let tol = ZERO_TOLERANCE * scale.max(1.0);
        self.linear.retain(|_, c| c.abs() > tol);
        self.quadratic.retain(|_, c| c.abs() > tol);
    }

    pub fn evaluate(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.num_variables {
            return Err(Error::LengthMismatch {
                expected: self.num_variables,
                got: bits.len(),
            });
        }
        let x = |i: usize| f64::from(bits[i]);
        Ok(self.constant
            + self.linear.iter().map(|(&i, c)| c * x(i)).sum::<f64>()
            + self.quadratic.iter().map(|(&(i, j), c)| c * x(i) * x(j)).sum::<f64>())
    }
}

const ZERO_TOLERANCE: f64 = 1e-12;

/// Penalty/slack transformation to an unconstrained polynomial.
///
/// Maximization objectives are negated. Slack bits follow the primary
/// variables in constraint order, the j-th slack bit of a constraint carrying
/// weight `2ʲ`.
pub fn to_unconstrained(problem: &BinaryProblem) -> BinaryPolynomial {
    let mut poly = BinaryPolynomial::new(problem.total_variables());
    let sign = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    for &(i, c) in &problem.objective {
        poly.add_linear(i, sign * c);
    }

    for (con, slack) in problem.constraints.iter().zip(problem.slack_ranges()) {
        let slack_terms = slack.clone().enumerate().map(|(j, var)| (var, -(2f64.powi(j as i32))));
        let (offset, terms): (f64, Vec<(usize, f64)>) = match con.relation {
            // λ(lhs − rhs)²
            Relation::Equal => (-con.rhs, con.coefficients.clone()),
            // λ(rhs − lhs − Σ2ʲyⱼ)²
            Relation::LessEqual => (
                con.rhs,
                con.coefficients
                    .iter()
                    .map(|&(i, c)| (i, -c))
                    .chain(slack_terms)
                    .collect(),
            ),
            // λ(lhs − Σ2ʲyⱼ − rhs)²
            Relation::GreaterEqual => (-con.rhs, con.coefficients.iter().copied().chain(slack_terms).collect()),
        };
        poly.add_squared_affine(con.penalty, offset, &terms);
    }
    poly.normalize();
    poly
}

/// One weighted Z-word. An empty `qubits` list is the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    #[serde(rename = "coef")]
    pub coefficient: f64,
    #[serde(rename = "z")]
    pub qubits: Vec<usize>,
}

impl PauliTerm {
    /// Bit mask of the word in the packed-index convention (qubit 0 is MSB).
    pub fn mask(&self, num_qubits: usize) -> usize {
        self.qubits
            .iter()
            .fold(0usize, |m, &q| m | (1 << (num_qubits - 1 - q)))
    }
}

/// Weighted sum of Z-words on `num_qubits` qubits. Each index set appears
/// once; terms are ordered identity first, then by degree and index.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliZHamiltonian {
    num_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliZHamiltonian {
    /// Merges duplicate words and drops zero coefficients.
    pub fn from_terms(num_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut merged: BTreeMap<(usize, Vec<usize>), f64> = BTreeMap::new();
        for mut term in terms {
            term.qubits.sort_unstable();
            if term.qubits.windows(2).any(|w| w[0] == w[1]) {
                // Z² = I: cancel repeated indices pairwise.
                let mut reduced: Vec<usize> = Vec::new();
                for q in term.qubits {
                    if reduced.last() == Some(&q) {
                        reduced.pop();
                    } else {
                        reduced.push(q);
                    }
                }
                term.qubits = reduced;
            }
            if let Some(&q) = term.qubits.iter().find(|&&q| q >= num_qubits) {
                return Err(Error::InvalidProblem(format!(
                    "Z-word acts on qubit {q} of a {num_qubits}-qubit register"
                )));
            }
            *merged.entry((term.qubits.len(), term.qubits)).or_insert(0.0) += term.coefficient;
        }
        let scale = merged.values().fold(0.0f64, |m, c| m.max(c.abs()));
        let tol = ZERO_TOLERANCE * scale.max(1.0);
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.abs() > tol)
            .map(|((_, qubits), coefficient)| PauliTerm { coefficient, qubits })
            .collect();
        Ok(Self { num_qubits, terms })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Number of terms N_H, identity included.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the word on `qubits` (order-insensitive), 0 if absent.
    pub fn coefficient(&self, qubits: &[usize]) -> f64 {
        let mut key = qubits.to_vec();
        key.sort_unstable();
        self.terms
            .iter()
            .find(|t| t.qubits == key)
            .map_or(0.0, |t| t.coefficient)
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.coefficient(&[])
    }

    /// `Σ gμ Π (−1)^{bᵢ}` over the word supports.
    pub fn evaluate(&self, bits: &[u8]) -> Result<f64> {
        if bits.len() != self.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                got: bits.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|t| {
                let parity = t.qubits.iter().map(|&q| bits[q] as usize).sum::<usize>() & 1;
                if parity == 0 {
                    t.coefficient
                } else {
                    -t.coefficient
                }
            })
            .sum())
    }

    /// Energy of every basis state, indexed by the packed bitstring
    /// (qubit 0 most significant).
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        if self.num_qubits > MAX_ENUMERATION_QUBITS {
            return Err(Error::SizeGuard {
                what: "diagonal of a Hamiltonian with qubit count",
                size: self.num_qubits,
                limit: MAX_ENUMERATION_QUBITS,
            });
        }
        let dim = 1usize << self.num_qubits;
        let masks: Vec<(usize, f64)> = self
            .terms
            .iter()
            .map(|t| (t.mask(self.num_qubits), t.coefficient))
            .collect();
        Ok((0..dim)
            .map(|idx| {
                masks
                    .iter()
                    .map(|&(m, g)| if (idx & m).count_ones() & 1 == 0 { g } else { -g })
                    .sum()
            })
            .collect())
    }
}

impl fmt::Display for PauliZHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            let sign = if t.coefficient < 0.0 { "-" } else if k == 0 { "" } else { "+" };
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{sign}{}", t.coefficient.abs())?;
            for q in &t.qubits {
                write!(f, " Z{q}")?;
            }
        }
        Ok(())
    }
}

/// Exact substitution `xᵢ ↦ (I − Zᵢ)/2`.
pub fn to_pauli_hamiltonian(poly: &BinaryPolynomial) -> PauliZHamiltonian {
    let mut terms = vec![PauliTerm {
        coefficient: poly.constant,
        qubits: vec![],
    }];
    for (&i, &a) in &poly.linear {
        terms.push(PauliTerm { coefficient: a / 2.0, qubits: vec![] });
        terms.push(PauliTerm { coefficient: -a / 2.0, qubits: vec![i] });
    }
    for (&(i, j), &b) in &poly.quadratic {
        let q = b / 4.0;
        terms.push(PauliTerm { coefficient: q, qubits: vec![] });
        terms.push(PauliTerm { coefficient: -q, qubits: vec![i] });
        terms.push(PauliTerm { coefficient: -q, qubits: vec![j] });
        terms.push(PauliTerm { coefficient: q, qubits: vec![i, j] });
    }
    PauliZHamiltonian::from_terms(poly.num_variables, terms)
        .expect("polynomial indices are bounded by its variable count")
}

pub fn evaluate_bitstring(h: &PauliZHamiltonian, bits: &[u8]) -> Result<f64> {
    h.evaluate(bits)
}

/// Brute-force minimum over all 2^N bitstrings. Ties go to the
/// lexicographically smallest bitstring.
pub fn exact_ground_state(h: &PauliZHamiltonian) -> Result<(Vec<u8>, f64)> {
    let n = h.num_qubits();
    if n > MAX_ENUMERATION_QUBITS {
        return Err(Error::SizeGuard {
            what: "enumeration over qubit count",
            size: n,
            limit: MAX_ENUMERATION_QUBITS,
        });
    }
    let energies = h.diagonal()?;
    // Packed order with qubit 0 as MSB is lexicographic order on bit vectors,
    // so the first strict minimum wins ties.
    let (best, energy) = energies
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, be), (i, e)| if e < be { (i, e) } else { (bi, be) });
    Ok((index_to_bits(best, n), energy))
}

/// Packs a bitstring into an integer with bit 0 as the most significant bit.
pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1))
}

pub fn index_to_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect()
}

/// On-disk problem description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub sense: Sense,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_variables: Option<usize>,
    pub objective: Vec<(usize, f64)>,
    #[serde(default)]
    pub constraints: Vec<ConstraintRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintRecord {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Relation,
    pub rhs: f64,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack_bits: Option<usize>,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn into_problem(self) -> Result<BinaryProblem> {
        let max_index = self
            .objective
            .iter()
            .chain(self.constraints.iter().flat_map(|c| c.coeffs.iter()))
            .map(|&(i, _)| i)
            .max();
        let inferred = max_index.map_or(0, |m| m + 1);
        let n = match self.num_variables {
            Some(n) if n < inferred => {
                return Err(Error::Schema(format!(
                    "num_variables = {n} but variable {} is referenced",
                    inferred - 1
                )))
            }
            Some(n) => n,
            None => inferred,
        };
        let constraints = self
            .constraints
            .into_iter()
            .map(|c| LinearConstraint {
                coefficients: c.coeffs,
                relation: c.sense,
                rhs: c.rhs,
                penalty: c.lambda,
                slack_bits: c.slack_bits,
            })
            .collect();
        BinaryProblem::new(self.sense, n, self.objective, constraints).map_err(|e| Error::Schema(e.to_string()))
    }
}

impl From<&BinaryProblem> for ProblemFile {
    fn from(p: &BinaryProblem) -> Self {
        Self {
            sense: p.sense,
            num_variables: Some(p.num_variables()),
            objective: p.objective.clone(),
            constraints: p
                .constraints
                .iter()
                .map(|c| ConstraintRecord {
                    coeffs: c.coefficients.clone(),
                    sense: c.relation,
                    rhs: c.rhs,
                    lambda: c.penalty,
                    slack_bits: c.slack_bits,
                })
                .collect(),
        }
    }
}

/// The knapsack instance used throughout the examples and tests:
/// values (2, 5, 7, 3), weights (2.5, 3, 4, 3.5), capacity 7, λ = 2.
pub fn reference_knapsack() -> BinaryProblem {
    build_knapsack(&[2.0, 5.0, 7.0, 3.0], &[2.5, 3.0, 4.0, 3.5], 7.0, 2.0).expect("valid instance")
}

/// Three-variable instance with one equality and two inequalities:
/// minimize x₀ + 2x₁ + x₂ s.t. x₀ + x₁ = 1, 2x₀ + 2x₁ + x₂ ≤ 3,
/// x₀ + x₁ + x₂ ≥ 1, all with λ = 5 and slack widths 2 and 1.
pub fn reference_multi_constraint() -> BinaryProblem {
    let lambda = 5.0;
    BinaryProblem::new(
        Sense::Minimize,
        3,
        vec![(0, 1.0), (1, 2.0), (2, 1.0)],
        vec![
            LinearConstraint::new(vec![(0, 1.0), (1, 1.0)], Relation::Equal, 1.0, lambda),
            LinearConstraint::new(vec![(0, 2.0), (1, 2.0), (2, 1.0)], Relation::LessEqual, 3.0, lambda)
                .with_slack_bits(2),
            LinearConstraint::new(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Relation::GreaterEqual, 1.0, lambda)
                .with_slack_bits(1),
        ],
    )
    .expect("valid instance")
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Objective plus penalties evaluated straight from the constraint rows,
    /// with slack integers read off the slack bits.
    fn direct_penalized(problem: &BinaryProblem, bits: &[u8]) -> f64 {
        let sign = if problem.sense == Sense::Maximize { -1.0 } else { 1.0 };
        let mut e = sign * problem.objective_value(bits);
        for (con, range) in problem.constraints.iter().zip(problem.slack_ranges()) {
            let slack: f64 = range
                .enumerate()
                .map(|(j, v)| f64::from(bits[v]) * 2f64.powi(j as i32))
                .sum();
            let lhs = con.lhs(bits);
            let r = match con.relation {
                Relation::Equal => lhs - con.rhs,
                Relation::LessEqual => con.rhs - lhs - slack,
                Relation::GreaterEqual => lhs - slack - con.rhs,
            };
            e += con.penalty * r * r;
        }
        e
    }

    #[test]
    fn knapsack_slack_widths() {
        let p = reference_knapsack();
        assert_eq!(p.num_variables(), 4);
        assert_eq!(p.constraints.len(), 1);
        assert_eq!(p.num_slack_bits(), 3);

        let single = build_knapsack(&[1.0], &[1.0], 1.0, 1.0).unwrap();
        assert_eq!(single.num_slack_bits(), 1);

        // ⌈log₂(3 + 1)⌉ = 2
        let two = build_knapsack(&[1.0, 1.0], &[2.0, 2.0], 3.0, 1.0).unwrap();
        assert_eq!(two.num_slack_bits(), 2);
    }

    #[test]
    fn knapsack_rejects_bad_input() {
        assert!(matches!(
            build_knapsack(&[1.0, 2.0], &[1.0], 3.0, 1.0),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(build_knapsack(&[1.0], &[1.0], 0.0, 1.0).is_err());
        assert!(build_knapsack(&[1.0], &[1.0], -2.0, 1.0).is_err());
        assert!(build_knapsack(&[1.0], &[1.0], 2.0, 0.0).is_err());
    }

    #[test]
    fn problem_rejects_undeclared_variables() {
        let err = BinaryProblem::new(Sense::Minimize, 2, vec![(2, 1.0)], vec![]);
        assert!(err.is_err());
        let con = LinearConstraint::new(vec![(5, 1.0)], Relation::Equal, 1.0, 1.0);
        assert!(BinaryProblem::new(Sense::Minimize, 2, vec![(0, 1.0)], vec![con]).is_err());
    }

    #[test]
    fn default_slack_for_ge_covers_range() {
        let p = reference_multi_constraint();
        let ge = &p.constraints[2];
        assert_eq!(ge.slack_range(), Some(2.0));
        assert_eq!(ge.default_slack_bits(), 2);
        assert_eq!(ge.slack_bit_count(), 1);
        assert_eq!(p.constraints[1].default_slack_bits(), 2);
        assert_eq!(p.total_variables(), 6);
    }

    #[test]
    fn objective_only_polynomial() {
        let p = BinaryProblem::new(Sense::Minimize, 1, vec![(0, 1.0)], vec![]).unwrap();
        let poly = to_unconstrained(&p);
        assert_eq!(poly.constant, 0.0);
        assert_eq!(poly.linear.get(&0), Some(&1.0));
        assert!(poly.quadratic.is_empty());
    }

    #[test]
    fn polynomial_matches_direct_penalties() {
        for p in [reference_knapsack(), reference_multi_constraint()] {
            let poly = to_unconstrained(&p);
            let n = poly.num_variables;
            for idx in 0..1usize << n {
                let bits = index_to_bits(idx, n);
                let a = poly.evaluate(&bits).unwrap();
                let b = direct_penalized(&p, &bits);
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "{bits:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn knapsack_polynomial_minimum() {
        let poly = to_unconstrained(&reference_knapsack());
        let best = (0..128)
            .map(|i| (index_to_bits(i, 7), poly.evaluate(&index_to_bits(i, 7)).unwrap()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        assert_eq!(best.0, vec![0, 1, 1, 0, 0, 0, 0]);
        assert_eq!(best.1, -12.0);
    }

    #[test]
    fn constant_polynomial_gives_identity() {
        let mut poly = BinaryPolynomial::new(3);
        poly.add_constant(2.5);
        let h = to_pauli_hamiltonian(&poly);
        assert_eq!(h.len(), 1);
        assert_eq!(h.identity_coefficient(), 2.5);
    }

    #[test]
    fn from_terms_merges_and_cancels() {
        let h = PauliZHamiltonian::from_terms(
            3,
            vec![
                PauliTerm { coefficient: 1.0, qubits: vec![1, 0] },
                PauliTerm { coefficient: 2.0, qubits: vec![0, 1] },
                PauliTerm { coefficient: 4.0, qubits: vec![2, 2] },
                PauliTerm { coefficient: -1.5, qubits: vec![2] },
                PauliTerm { coefficient: 1.5, qubits: vec![2] },
            ],
        )
        .unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.coefficient(&[0, 1]), 3.0);
        assert_eq!(h.identity_coefficient(), 4.0);
        assert!(PauliZHamiltonian::from_terms(2, vec![PauliTerm { coefficient: 1.0, qubits: vec![2] }]).is_err());
    }

    #[test]
    fn evaluate_checks_length() {
        let h = to_pauli_hamiltonian(&to_unconstrained(&reference_knapsack()));
        assert!(matches!(h.evaluate(&[0, 1]), Err(Error::LengthMismatch { expected: 7, got: 2 })));
    }

    #[test]
    fn identity_only_value_is_constant() {
        let h = PauliZHamiltonian::from_terms(4, vec![PauliTerm { coefficient: 5.0, qubits: vec![] }]).unwrap();
        for idx in 0..16 {
            assert_eq!(h.evaluate(&index_to_bits(idx, 4)).unwrap(), 5.0);
        }
    }

    #[test]
    fn single_qubit_ground_state() {
        let h = PauliZHamiltonian::from_terms(1, vec![PauliTerm { coefficient: -1.0, qubits: vec![0] }]).unwrap();
        assert_eq!(exact_ground_state(&h).unwrap(), (vec![0], -1.0));
    }

    #[test]
    fn ground_state_ties_are_lexicographic() {
        // Z₀Z₁ is minimized by 01 and 10.
        let h = PauliZHamiltonian::from_terms(2, vec![PauliTerm { coefficient: 1.0, qubits: vec![0, 1] }]).unwrap();
        assert_eq!(exact_ground_state(&h).unwrap(), (vec![0, 1], -1.0));
    }

    #[test]
    fn enumeration_guard() {
        let h = PauliZHamiltonian::from_terms(30, vec![PauliTerm { coefficient: 1.0, qubits: vec![29] }]).unwrap();
        assert!(matches!(exact_ground_state(&h), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn packing_round_trip() {
        for idx in 0..64 {
            assert_eq!(bits_to_index(&index_to_bits(idx, 6)), idx);
        }
        assert_eq!(bits_to_index(&[1, 0, 0]), 4);
    }

    #[test]
    fn problem_file_parses() {
        let text = r#"{"sense":"max","objective":[[0,2],[1,5],[2,7],[3,3]],
            "constraints":[{"coeffs":[[0,2.5],[1,3],[2,4],[3,3.5]],"sense":"<=","rhs":7,"lambda":2}]}"#;
        let p = ProblemFile::from_json(text).unwrap().into_problem().unwrap();
        assert_eq!(p, reference_knapsack());

        let bad = r#"{"sense":"max","objective":[[0,1]],"constraints":[{"coeffs":[],"sense":"<","rhs":1,"lambda":1}]}"#;
        assert!(matches!(ProblemFile::from_json(bad), Err(Error::Schema(_))));
        let no_lambda = r#"{"sense":"min","objective":[[0,1]],"constraints":[{"coeffs":[[0,1]],"sense":"=","rhs":1,"lambda":0}]}"#;
        assert!(ProblemFile::from_json(no_lambda).unwrap().into_problem().is_err());
    }
}
