//! Mapping N qubit slots onto one physical qubit plus R truncated qumodes.
//!
//! Slot 0 is the qubit. The remaining slots are split into contiguous groups,
//! one per qumode; a group of g slots becomes a qumode with Fock cutoff 2^g
//! whose occupation is the group's bits read most-significant-first. With this
//! convention the flat register index `q·∏L + n₁·(L₂⋯L_R) + … + n_R` equals the
//! packed bitstring of [`crate::qubo::bits_to_index`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{BinaryProblem, PauliZHamiltonian, Relation, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BitOrder {
    /// The lowest-index slot of a group is its most significant bit.
    #[serde(rename = "msb-first")]
    MsbFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QumodeGroup {
    pub slots: Range<usize>,
    pub cutoff: usize,
}

impl QumodeGroup {
    pub fn width(&self) -> usize {
        self.slots.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeLayout {
    num_qubits: usize,
    groups: Vec<QumodeGroup>,
    bit_order: BitOrder,
}

impl ModeLayout {
    /// Builds the layout for `num_qubits` slots and the given qumode cutoffs.
    pub fn new(num_qubits: usize, cutoffs: &[usize]) -> Result<Self> {
        if cutoffs.is_empty() {
            return Err(Error::InvalidLayout("at least one qumode is required".into()));
        }
        let mut groups = Vec::with_capacity(cutoffs.len());
        let mut next = 1;
        for &l in cutoffs {
            if l < 2 || !l.is_power_of_two() {
                return Err(Error::InvalidLayout(format!("cutoff {l} is not a power of two ≥ 2")));
            }
            let width = l.trailing_zeros() as usize;
            groups.push(QumodeGroup {
                slots: next..next + width,
                cutoff: l,
            });
            next += width;
        }
        if next != num_qubits {
            return Err(Error::InvalidLayout(format!(
                "2·∏L = 2^{next} does not match 2^{num_qubits}"
            )));
        }
        Ok(Self {
            num_qubits,
            groups,
            bit_order: BitOrder::MsbFirst,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_modes(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[QumodeGroup] {
        &self.groups
    }

    pub fn bit_order(&self) -> BitOrder {
        self.bit_order
    }

    pub fn cutoffs(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.cutoff).collect()
    }

    pub fn cutoff(&self, mode: usize) -> usize {
        self.groups[mode].cutoff
    }

    /// ∏Lⱼ, the dimension of all qumodes together.
    pub fn mode_dim(&self) -> usize {
        self.groups.iter().map(|g| g.cutoff).product()
    }

    /// Register dimension 2·∏Lⱼ.
    pub fn dim(&self) -> usize {
        2 * self.mode_dim()
    }

    /// Flat-index stride of qumode `mode`.
    pub fn stride(&self, mode: usize) -> usize {
        self.groups[mode + 1..].iter().map(|g| g.cutoff).product()
    }

    /// Subsystem holding `slot`: 0 for the qubit, k + 1 for qumode k.
    pub fn subsystem_of(&self, slot: usize) -> usize {
        if slot == 0 {
            0
        } else {
            1 + self
                .groups
                .iter()
                .position(|g| g.slots.contains(&slot))
                .expect("slot within layout")
        }
    }

    /// Dimensions of the subsystems `[2, L₁, …, L_R]`.
    pub fn subsystem_dims(&self) -> Vec<usize> {
        std::iter::once(2).chain(self.groups.iter().map(|g| g.cutoff)).collect()
    }

    pub fn flat_index(&self, outcome: &BasisOutcome) -> usize {
        outcome
            .occupations
            .iter()
            .zip(&self.groups)
            .fold(usize::from(outcome.q), |acc, (&n, g)| acc * g.cutoff + n)
    }

    pub fn outcome_at(&self, mut index: usize) -> BasisOutcome {
        let mut occupations = vec![0; self.groups.len()];
        for (k, g) in self.groups.iter().enumerate().rev() {
            occupations[k] = index % g.cutoff;
            index /= g.cutoff;
        }
        BasisOutcome {
            q: index as u8,
            occupations,
        }
    }

    pub fn encode(&self, bits: &[u8]) -> Result<BasisOutcome> {
        if bits.len() != self.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                got: bits.len(),
            });
        }
        let occupations = self
            .groups
            .iter()
            .map(|g| bits[g.slots.clone()].iter().fold(0, |n, &b| (n << 1) | usize::from(b)))
            .collect();
        Ok(BasisOutcome { q: bits[0], occupations })
    }

    pub fn decode(&self, outcome: &BasisOutcome) -> Result<Vec<u8>> {
        self.check_outcome(outcome)?;
        let mut bits = vec![0u8; self.num_qubits];
        bits[0] = outcome.q;
        for (g, &n) in self.groups.iter().zip(&outcome.occupations) {
            let w = g.width();
            for (p, slot) in g.slots.clone().enumerate() {
                bits[slot] = ((n >> (w - 1 - p)) & 1) as u8;
            }
        }
        Ok(bits)
    }

    pub fn check_outcome(&self, outcome: &BasisOutcome) -> Result<()> {
        if outcome.q > 1 {
            return Err(Error::InvalidParameter(format!("qubit value {} is not a bit", outcome.q)));
        }
        if outcome.occupations.len() != self.groups.len() {
            return Err(Error::LengthMismatch {
                expected: self.groups.len(),
                got: outcome.occupations.len(),
            });
        }
        for (k, (&n, g)) in outcome.occupations.iter().zip(&self.groups).enumerate() {
            if n >= g.cutoff {
                return Err(Error::InvalidParameter(format!(
                    "occupation {n} of qumode {k} exceeds cutoff {}",
                    g.cutoff
                )));
            }
        }
        Ok(())
    }

    /// Two-mode (and single-mode) layouts for an N-qubit register with at
    /// most `max_group_bits` slots per qumode.
    pub fn suggestions(num_qubits: usize, max_group_bits: usize) -> Vec<Self> {
        let rest = num_qubits.saturating_sub(1);
        let mut out = Vec::new();
        if rest == 0 {
            return out;
        }
        if rest <= max_group_bits {
            out.extend(Self::new(num_qubits, &[1 << rest]).ok());
        }
        for first in 1..rest {
            let second = rest - first;
            if first <= max_group_bits && second <= max_group_bits {
                out.extend(Self::new(num_qubits, &[1 << first, 1 << second]).ok());
            }
        }
        out
    }
}

impl fmt::Display for ModeLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "qubit[0]")?;
        for (k, g) in self.groups.iter().enumerate() {
            write!(f, " mode{}[{}..{}] L={}", k + 1, g.slots.start, g.slots.end - 1, g.cutoff)?;
        }
        Ok(())
    }
}

/// A measured register state `|q, n₁, …, n_R⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisOutcome {
    pub q: u8,
    #[serde(rename = "occ")]
    pub occupations: Vec<usize>,
}

impl BasisOutcome {
    pub fn new(q: u8, occupations: Vec<usize>) -> Self {
        Self { q, occupations }
    }

    pub fn vacuum(num_modes: usize) -> Self {
        Self::new(0, vec![0; num_modes])
    }
}

impl fmt::Display for BasisOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}", self.q)?;
        for n in &self.occupations {
            write!(f, ",{n}")?;
        }
        write!(f, "⟩")
    }
}

/// One record of the histogram export format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRecord {
    pub q: u8,
    pub occ: Vec<usize>,
    pub p: f64,
}

/// Sparse outcome distribution (exact probabilities or normalized counts).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasurementHistogram {
    entries: BTreeMap<BasisOutcome, f64>,
}

impl MeasurementHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Collects the nonzero entries of a dense probability vector in flat
    /// register order.
    pub fn from_dense(layout: &ModeLayout, probabilities: &[f64]) -> Self {
        let entries = probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (layout.outcome_at(i), p))
            .collect();
        Self { entries }
    }

    pub fn add(&mut self, outcome: BasisOutcome, mass: f64) {
        *self.entries.entry(outcome).or_insert(0.0) += mass;
    }

    pub fn probability(&self, outcome: &BasisOutcome) -> f64 {
        self.entries.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.values().sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisOutcome, f64)> {
        self.entries.iter().map(|(o, &p)| (o, p))
    }

    /// Most probable outcome; ties go to the smallest outcome.
    pub fn argmax(&self) -> Option<(&BasisOutcome, f64)> {
        self.iter()
            .fold(None, |best: Option<(&BasisOutcome, f64)>, (o, p)| match best {
                Some((_, bp)) if bp >= p => best,
                _ => Some((o, p)),
            })
    }

    /// Records sorted by descending probability.
    pub fn to_records(&self) -> Vec<HistogramRecord> {
        let mut records: Vec<HistogramRecord> = self
            .iter()
            .map(|(o, p)| HistogramRecord {
                q: o.q,
                occ: o.occupations.clone(),
                p,
            })
            .collect();
        // Stable sort keeps outcome order among equal probabilities.
        records.sort_by(|a, b| b.p.total_cmp(&a.p));
        records
    }

    pub fn from_records(records: &[HistogramRecord]) -> Self {
        let mut h = Self::new();
        for r in records {
            h.add(BasisOutcome::new(r.q, r.occ.clone()), r.p);
        }
        h
    }
}

/// `Σ P(outcome) · E(decode(outcome))`.
pub fn expectation_from_histogram(
    h: &PauliZHamiltonian,
    histogram: &MeasurementHistogram,
    layout: &ModeLayout,
) -> Result<f64> {
    if h.num_qubits() != layout.num_qubits() {
        return Err(Error::LengthMismatch {
            expected: layout.num_qubits(),
            got: h.num_qubits(),
        });
    }
    histogram.iter().try_fold(0.0, |acc, (outcome, p)| {
        let bits = layout.decode(outcome)?;
        Ok(acc + p * h.evaluate(&bits)?)
    })
}

/// A diagonal Hamiltonian written with Fock projectors:
/// `Σᵢ Σₙ Cⁱₙ Πⁱₙ + Σ_{i<j} Σₙₘ Cⁱʲₙₘ Πⁱₙ ⊗ Πʲₘ` over the subsystems
/// `[Q, B₁, …, B_R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorHamiltonian {
    dims: Vec<usize>,
    single: Vec<Vec<f64>>,
    /// Row-major `dims[i] × dims[j]` tables keyed by `(i, j)` with `i < j`.
    pairs: BTreeMap<(usize, usize), Vec<f64>>,
}

impl ProjectorHamiltonian {
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn single(&self, subsystem: usize) -> &[f64] {
        &self.single[subsystem]
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<&[f64]> {
        self.pairs.get(&(i, j)).map(Vec::as_slice)
    }

    pub fn num_pair_tables(&self) -> usize {
        self.pairs.len()
    }

    pub fn evaluate(&self, outcome: &BasisOutcome) -> f64 {
        let local = |i: usize| if i == 0 { usize::from(outcome.q) } else { outcome.occupations[i - 1] };
        let singles: f64 = self.single.iter().enumerate().map(|(i, t)| t[local(i)]).sum();
        let pairs: f64 = self
            .pairs
            .iter()
            .map(|(&(i, j), t)| t[local(i) * self.dims[j] + local(j)])
            .sum();
        singles + pairs
    }
}

/// Sign of the Z-word restricted to one subsystem, at local level `n`.
fn local_sign(layout: &ModeLayout, subsystem: usize, slots: &[usize], n: usize) -> f64 {
    let parity = if subsystem == 0 {
        n & 1
    } else {
        let g = &layout.groups()[subsystem - 1];
        slots
            .iter()
            .map(|&s| (n >> (g.slots.end - 1 - s)) & 1)
            .sum::<usize>()
            & 1
    };
    if parity == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Folds each Z-word into single-subsystem or pairwise projector tables.
pub fn project_hamiltonian(h: &PauliZHamiltonian, layout: &ModeLayout) -> Result<ProjectorHamiltonian> {
    if h.num_qubits() != layout.num_qubits() {
        return Err(Error::LengthMismatch {
            expected: layout.num_qubits(),
            got: h.num_qubits(),
        });
    }
    let dims = layout.subsystem_dims();
    let mut single: Vec<Vec<f64>> = dims.iter().map(|&d| vec![0.0; d]).collect();
    let mut pairs: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();

    for term in h.terms() {
        let mut by_subsystem: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &q in &term.qubits {
            by_subsystem.entry(layout.subsystem_of(q)).or_default().push(q);
        }
        let parts: Vec<(usize, Vec<usize>)> = by_subsystem.into_iter().collect();
        match parts.as_slice() {
            [] => single[0].iter_mut().for_each(|c| *c += term.coefficient),
            [(i, slots)] => {
                for (n, c) in single[*i].iter_mut().enumerate() {
                    *c += term.coefficient * local_sign(layout, *i, slots, n);
                }
            }
            [(i, si), (j, sj)] => {
                let (di, dj) = (dims[*i], dims[*j]);
                let table = pairs.entry((*i, *j)).or_insert_with(|| vec![0.0; di * dj]);
                for n in 0..di {
                    let a = local_sign(layout, *i, si, n);
                    for m in 0..dj {
                        table[n * dj + m] += term.coefficient * a * local_sign(layout, *j, sj, m);
                    }
                }
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "Z-word {:?} spans {} subsystems",
                    term.qubits,
                    parts.len()
                )))
            }
        }
    }
    Ok(ProjectorHamiltonian { dims, single, pairs })
}

/// Penalty row of a [`SlackNumberHamiltonian`].
#[derive(Debug, Clone, PartialEq)]
pub struct SlackPenalty {
    pub coefficients: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
    pub penalty: f64,
    /// Qumode whose occupation is the integer slack value.
    pub slack_mode: Option<usize>,
}

/// Problem energy with each inequality's slack integer read directly from
/// the photon number of a dedicated qumode (`b ↦ n̂`) instead of from
/// binary slack bits.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackNumberHamiltonian {
    layout: ModeLayout,
    num_primary: usize,
    /// Sign-adjusted objective on the primary variables as a Z-word sum.
    pub objective: PauliZHamiltonian,
    pub penalties: Vec<SlackPenalty>,
}

impl SlackNumberHamiltonian {
    /// Every inequality's slack bits must occupy exactly one qumode group.
    pub fn new(problem: &BinaryProblem, layout: &ModeLayout) -> Result<Self> {
        if problem.total_variables() != layout.num_qubits() {
            return Err(Error::LengthMismatch {
                expected: layout.num_qubits(),
                got: problem.total_variables(),
            });
        }
        let n0 = problem.num_variables();
        let mut penalties = Vec::with_capacity(problem.constraints.len());
        for (con, range) in problem.constraints.iter().zip(problem.slack_ranges()) {
            let slack_mode = if range.is_empty() {
                None
            } else {
                let mode = layout
                    .groups()
                    .iter()
                    .position(|g| g.slots == range)
                    .ok_or_else(|| {
                        Error::InvalidLayout(format!(
                            "slack bits {}..{} are split across qumode groups",
                            range.start, range.end
                        ))
                    })?;
                Some(mode)
            };
            penalties.push(SlackPenalty {
                coefficients: con.coefficients.clone(),
                relation: con.relation,
                rhs: con.rhs,
                penalty: con.penalty,
                slack_mode,
            });
        }

        let mut objective_poly = crate::qubo::BinaryPolynomial::new(n0);
        let sign = if problem.sense == Sense::Maximize { -1.0 } else { 1.0 };
        for &(i, c) in &problem.objective {
            objective_poly.add_linear(i, sign * c);
        }
        Ok(Self {
            layout: layout.clone(),
            num_primary: n0,
            objective: crate::qubo::to_pauli_hamiltonian(&objective_poly),
            penalties,
        })
    }

    pub fn layout(&self) -> &ModeLayout {
        &self.layout
    }

    pub fn evaluate(&self, outcome: &BasisOutcome) -> Result<f64> {
        let bits = self.layout.decode(outcome)?;
        let primary = &bits[..self.num_primary];
        let mut energy = self.objective.evaluate(primary)?;
        for row in &self.penalties {
            let lhs: f64 = row.coefficients.iter().map(|&(i, c)| c * f64::from(primary[i])).sum();
            let b = row.slack_mode.map_or(0.0, |k| outcome.occupations[k] as f64);
            let r = match row.relation {
                Relation::Equal => lhs - row.rhs,
                Relation::LessEqual => row.rhs - lhs - b,
                Relation::GreaterEqual => lhs - b - row.rhs,
            };
            energy += row.penalty * r * r;
        }
        Ok(energy)
    }

    /// Slack-bit assignment of the binary-expanded form that this outcome
    /// stands for: primary bits as decoded, slack bits the base-2 digits of
    /// the occupation (j-th slack bit ↔ weight 2ʲ).
    pub fn equivalent_bits(&self, outcome: &BasisOutcome) -> Result<Vec<u8>> {
        let mut bits = self.layout.decode(outcome)?;
        for row in &self.penalties {
            if let Some(k) = row.slack_mode {
                let g = &self.layout.groups()[k];
                let m = outcome.occupations[k];
                for (j, slot) in g.slots.clone().enumerate() {
                    bits[slot] = ((m >> j) & 1) as u8;
                }
            }
        }
        Ok(bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::{reference_knapsack, to_pauli_hamiltonian, to_unconstrained, PauliTerm};

    #[test]
    fn layouts_from_reference_instances() {
        let l = ModeLayout::new(7, &[8, 8]).unwrap();
        assert_eq!(l.groups()[0].slots, 1..4);
        assert_eq!(l.groups()[1].slots, 4..7);
        assert_eq!(l.dim(), 128);

        let l = ModeLayout::new(6, &[4, 8]).unwrap();
        assert_eq!(l.groups()[0].slots, 1..3);
        assert_eq!(l.groups()[1].slots, 3..6);

        let l = ModeLayout::new(2, &[2]).unwrap();
        assert_eq!(l.num_modes(), 1);
        assert_eq!(l.dim(), 4);
    }

    #[test]
    fn layout_errors() {
        assert!(ModeLayout::new(7, &[8, 4]).is_err());
        assert!(ModeLayout::new(7, &[6, 8]).is_err());
        assert!(ModeLayout::new(3, &[1, 4]).is_err());
        assert!(ModeLayout::new(3, &[]).is_err());
    }

    #[test]
    fn encode_reference_solutions() {
        let l = ModeLayout::new(7, &[8, 8]).unwrap();
        assert_eq!(l.encode(&[0, 1, 1, 0, 0, 0, 0]).unwrap(), BasisOutcome::new(0, vec![6, 0]));
        let l = ModeLayout::new(6, &[4, 8]).unwrap();
        assert_eq!(l.encode(&[1, 0, 0, 1, 0, 0]).unwrap(), BasisOutcome::new(1, vec![0, 4]));
        assert_eq!(l.encode(&[0; 6]).unwrap(), BasisOutcome::vacuum(2));
        assert!(l.encode(&[0; 5]).is_err());
    }

    #[test]
    fn decode_examples() {
        let l = ModeLayout::new(7, &[8, 8]).unwrap();
        assert_eq!(l.decode(&BasisOutcome::new(0, vec![6, 0])).unwrap(), vec![0, 1, 1, 0, 0, 0, 0]);
        let l5 = ModeLayout::new(5, &[4, 4]).unwrap();
        assert_eq!(l5.decode(&BasisOutcome::new(1, vec![3, 2])).unwrap(), vec![1, 1, 1, 1, 0]);
        assert_eq!(l5.decode(&BasisOutcome::vacuum(2)).unwrap(), vec![0; 5]);
        assert!(l5.decode(&BasisOutcome::new(0, vec![4, 0])).is_err());
        assert!(l5.decode(&BasisOutcome::new(2, vec![0, 0])).is_err());
    }

    #[test]
    fn flat_index_is_packed_bitstring() {
        let l = ModeLayout::new(7, &[8, 8]).unwrap();
        for idx in 0..128 {
            let o = l.outcome_at(idx);
            assert_eq!(l.flat_index(&o), idx);
            assert_eq!(crate::qubo::bits_to_index(&l.decode(&o).unwrap()), idx);
        }
        assert_eq!(l.stride(0), 8);
        assert_eq!(l.stride(1), 1);
    }

    #[test]
    fn z2z3_folds_to_parity_pattern() {
        // Z₁Z₂ on a 5-qubit (4,4) layout sits entirely in the first qumode.
        let l = ModeLayout::new(5, &[4, 4]).unwrap();
        let h = PauliZHamiltonian::from_terms(5, vec![PauliTerm { coefficient: 1.0, qubits: vec![1, 2] }]).unwrap();
        let p = project_hamiltonian(&h, &l).unwrap();
        assert_eq!(p.single(1), &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(p.num_pair_tables(), 0);
    }

    #[test]
    fn identity_folds_into_one_table() {
        let l = ModeLayout::new(3, &[4]).unwrap();
        let h = PauliZHamiltonian::from_terms(3, vec![PauliTerm { coefficient: 2.0, qubits: vec![] }]).unwrap();
        let p = project_hamiltonian(&h, &l).unwrap();
        assert_eq!(p.single(0), &[2.0, 2.0]);
        assert_eq!(p.single(1), &[0.0; 4]);
        for idx in 0..8 {
            assert_eq!(p.evaluate(&l.outcome_at(idx)), 2.0);
        }
    }

    #[test]
    fn three_subsystem_word_is_unsupported() {
        let l = ModeLayout::new(3, &[2, 2]).unwrap();
        let h = PauliZHamiltonian::from_terms(3, vec![PauliTerm { coefficient: 1.0, qubits: vec![0, 1, 2] }]).unwrap();
        assert!(matches!(project_hamiltonian(&h, &l), Err(Error::Unsupported(_))));
    }

    #[test]
    fn histogram_argmax_and_records() {
        let mut h = MeasurementHistogram::new();
        h.add(BasisOutcome::new(1, vec![0]), 0.4);
        h.add(BasisOutcome::new(0, vec![1]), 0.4);
        h.add(BasisOutcome::new(0, vec![0]), 0.2);
        let (o, p) = h.argmax().unwrap();
        assert_eq!(o, &BasisOutcome::new(0, vec![1]));
        assert_eq!(p, 0.4);
        let r = h.to_records();
        assert_eq!(r[0].occ, vec![1]);
        assert_eq!(r[2].p, 0.2);
        assert_eq!(MeasurementHistogram::from_records(&r), h);
        assert!(MeasurementHistogram::new().argmax().is_none());
    }

    #[test]
    fn expectation_size_mismatch() {
        let l = ModeLayout::new(3, &[4]).unwrap();
        let h = PauliZHamiltonian::from_terms(2, vec![]).unwrap();
        assert!(expectation_from_histogram(&h, &MeasurementHistogram::new(), &l).is_err());
    }

    #[test]
    fn slack_number_examples() {
        let problem = reference_knapsack();
        let l = ModeLayout::new(7, &[8, 8]).unwrap();
        let s = SlackNumberHamiltonian::new(&problem, &l).unwrap();
        assert_eq!(s.evaluate(&BasisOutcome::new(0, vec![6, 0])).unwrap(), -12.0);
        // Empty knapsack, slack register full: 2·(7 − 7)² = 0.
        assert_eq!(s.evaluate(&BasisOutcome::new(0, vec![0, 7])).unwrap(), 0.0);
        // Empty knapsack, no slack: 2·7².
        assert_eq!(s.evaluate(&BasisOutcome::new(0, vec![0, 0])).unwrap(), 98.0);

        let mut free = s.clone();
        free.penalties.iter_mut().for_each(|p| p.penalty = 0.0);
        for m in 0..8 {
            assert_eq!(free.evaluate(&BasisOutcome::new(0, vec![6, m])).unwrap(), -12.0);
        }

        // A layout that splits the slack bits cannot use the number form.
        let split = ModeLayout::new(7, &[4, 16]).unwrap();
        assert!(SlackNumberHamiltonian::new(&problem, &split).is_err());
    }

    #[test]
    fn slack_number_agrees_with_binary_form() {
        let problem = reference_knapsack();
        let l = ModeLayout::new(7, &[8, 8]).unwrap();
        let h = to_pauli_hamiltonian(&to_unconstrained(&problem));
        let s = SlackNumberHamiltonian::new(&problem, &l).unwrap();
        for idx in 0..l.dim() {
            let o = l.outcome_at(idx);
            let a = s.evaluate(&o).unwrap();
            let b = h.evaluate(&s.equivalent_bits(&o).unwrap()).unwrap();
            assert!((a - b).abs() < 1e-12, "{o}: {a} vs {b}");
        }
    }
}
