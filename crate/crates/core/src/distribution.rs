//! Joint probability distributions over finitely many categorical variables.
//!
//! A [`JointDistribution`] stores a sparse probability mass function keyed by
//! category-index tuples, one axis per variable. Zero-mass cells are simply
//! absent, so the `0 · log 0 = 0` convention is structural rather than a
//! special case in every loop. Distributions are immutable after construction;
//! every operation returns a fresh value, which makes them safe to share
//! across threads.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::CategoricalDataset;

/// Tolerance for normalization and distribution-level identity checks.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Name of one categorical variable, unique within a distribution.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableId(String);

impl VariableId {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::EmptyName);
        }
        Ok(VariableId(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

// Debug renders the bare name so tuples of ids read naturally in test output.
impl fmt::Debug for VariableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ordered, duplicate-free selection of variables naming an analysis margin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSet(Vec<VariableId>);

impl VariableSet {
    pub fn new(members: impl IntoIterator<Item = VariableId>) -> Result<Self> {
        let members: Vec<VariableId> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::EmptyVariableSet);
        }
        for (i, m) in members.iter().enumerate() {
            if members[..i].contains(m) {
                return Err(Error::DuplicateVariable(m.name().to_string()));
            }
        }
        Ok(VariableSet(members))
    }

    pub fn from_names<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let ids = names
            .into_iter()
            .map(VariableId::new)
            .collect::<Result<Vec<_>>>()?;
        Self::new(ids)
    }

    pub fn single(id: VariableId) -> Self {
        VariableSet(vec![id])
    }

    pub fn members(&self) -> &[VariableId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: &VariableId) -> bool {
        self.0.contains(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &VariableId> {
        self.0.iter()
    }

    /// Comma-joined variable names, the form used in reports and flags.
    pub fn joined(&self) -> String {
        self.0
            .iter()
            .map(VariableId::name)
            .collect::<Vec<_>>()
            .join(",")
    }

    /// True when `self` and `other` share no variable.
    pub fn is_disjoint(&self, other: &VariableSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    /// Concatenation preserving order; errors on overlap.
    pub fn union_disjoint(&self, other: &VariableSet) -> Result<VariableSet> {
        if let Some(v) = self.iter().find(|v| other.contains(v)) {
            return Err(Error::OverlappingSets(v.name().to_string()));
        }
        VariableSet::new(self.0.iter().chain(other.0.iter()).cloned())
    }
}

impl FromStr for VariableSet {
    type Err = Error;

    /// Parses `"a,b,c"` into an ordered set.
    fn from_str(s: &str) -> Result<Self> {
        VariableSet::from_names(s.split(','))
    }
}

/// The ordered category labels one variable ranges over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    variable: VariableId,
    categories: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(variable: VariableId, categories: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let categories: Vec<String> = categories.into_iter().map(Into::into).collect();
        if categories.is_empty() {
            return Err(Error::EmptyAlphabet(variable.name().to_string()));
        }
        for (i, c) in categories.iter().enumerate() {
            if categories[..i].contains(c) {
                return Err(Error::DuplicateCategory {
                    variable: variable.name().to_string(),
                    category: c.clone(),
                });
            }
        }
        Ok(Alphabet {
            variable,
            categories,
        })
    }

    /// Binary alphabet with categories `"0"` and `"1"`.
    pub fn binary(variable: VariableId) -> Self {
        Alphabet {
            variable,
            categories: vec!["0".to_string(), "1".to_string()],
        }
    }

    /// Alphabet with categories `"0"… "cardinality-1"`.
    pub fn indexed(variable: VariableId, cardinality: usize) -> Result<Self> {
        if cardinality == 0 {
            return Err(Error::EmptyAlphabet(variable.name().to_string()));
        }
        Ok(Alphabet {
            variable,
            categories: (0..cardinality).map(|i| i.to_string()).collect(),
        })
    }

    pub fn variable(&self) -> &VariableId {
        &self.variable
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn cardinality(&self) -> usize {
        self.categories.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.categories.iter().position(|c| c == label)
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.categories.get(index).map(String::as_str)
    }
}

/// Sparse joint probability mass over category-index tuples.
///
/// Invariants, enforced by every constructor and transform:
/// - probabilities sum to 1 within [`MASS_TOLERANCE`];
/// - every stored probability is strictly positive;
/// - every tuple index is within its alphabet's cardinality.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    alphabets: Vec<Alphabet>,
    mass: BTreeMap<Vec<u32>, f64>,
    total_observations: Option<f64>,
}

impl JointDistribution {
    /// Builds a distribution from co-occurrence counts as relative
    /// frequencies f/N. Zero-count tuples are dropped; fractional counts
    /// (weights) are accepted.
    pub fn from_counts<I>(alphabets: Vec<Alphabet>, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        Self::from_counts_smoothed(alphabets, counts, 0.0)
    }

    /// Like [`from_counts`](Self::from_counts) but adds `pseudocount` to every
    /// cell of the full product space before normalizing. With a positive
    /// pseudocount no cell is empty, which trades sparsity for smoothing.
    pub fn from_counts_smoothed<I>(
        alphabets: Vec<Alphabet>,
        counts: I,
        pseudocount: f64,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        validate_alphabets(&alphabets)?;
        let cards: Vec<usize> = alphabets.iter().map(Alphabet::cardinality).collect();

        let mut accumulated: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        let mut total = 0.0;
        for (tuple, count) in counts {
            if !count.is_finite() || count < 0.0 {
                return Err(Error::InvalidCount { tuple, count });
            }
            if tuple.len() != cards.len()
                || tuple.iter().zip(&cards).any(|(&idx, &card)| idx >= card)
            {
                return Err(Error::TupleOutOfAlphabet { tuple });
            }
            if count > 0.0 {
                let key: Vec<u32> = tuple.iter().map(|&i| i as u32).collect();
                *accumulated.entry(key).or_insert(0.0) += count;
                total += count;
            }
        }

        if pseudocount > 0.0 {
            let mut cells = 1usize;
            for &c in &cards {
                cells = cells.saturating_mul(c);
            }
            for_each_tuple(&cards, |tuple| {
                *accumulated.entry(tuple.to_vec()).or_insert(0.0) += pseudocount;
            });
            total += pseudocount * cells as f64;
        }

        if total <= 0.0 {
            return Err(Error::AllZeroCounts);
        }

        let mass = accumulated
            .into_iter()
            .map(|(k, v)| (k, v / total))
            .collect();
        Ok(JointDistribution {
            alphabets,
            mass,
            total_observations: Some(total),
        })
    }

    /// Counts record co-occurrences in `dataset` over the columns named by
    /// `vars`. Alphabets are the dataset's declared alphabets when present,
    /// otherwise the observed distinct values in first-appearance order.
    pub fn from_records(dataset: &CategoricalDataset, vars: &VariableSet) -> Result<Self> {
        if dataset.is_empty() {
            return Err(Error::EmptyDataset);
        }

        let mut column_indices = Vec::with_capacity(vars.len());
        let mut alphabets = Vec::with_capacity(vars.len());
        for var in vars.iter() {
            let col = dataset
                .column_index(var.name())
                .ok_or_else(|| Error::UnknownVariable(var.name().to_string()))?;
            column_indices.push(col);
            let categories = match dataset.declared_alphabet(var.name()) {
                Some(declared) => declared.to_vec(),
                None => dataset.observed_alphabet(var.name())?,
            };
            alphabets.push(Alphabet::new(var.clone(), categories)?);
        }

        let mut counts: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        for row in dataset.rows() {
            let mut tuple = Vec::with_capacity(vars.len());
            for (slot, (&col, alphabet)) in column_indices.iter().zip(&alphabets).enumerate() {
                let value = &row[col];
                let idx = alphabet.index_of(value).ok_or_else(|| {
                    Error::CategoryOutsideAlphabet {
                        variable: vars.members()[slot].name().to_string(),
                        category: value.clone(),
                    }
                })?;
                tuple.push(idx);
            }
            *counts.entry(tuple).or_insert(0.0) += 1.0;
        }

        Self::from_counts(alphabets, counts)
    }

    /// Constructs directly from already-normalized masses. Exposed for the
    /// generator and fitting paths; validates the same invariants.
    pub(crate) fn from_normalized_weights(
        alphabets: Vec<Alphabet>,
        weights: BTreeMap<Vec<u32>, f64>,
        total_observations: Option<f64>,
    ) -> Result<Self> {
        validate_alphabets(&alphabets)?;
        let cards: Vec<usize> = alphabets.iter().map(Alphabet::cardinality).collect();
        let mut total = 0.0;
        for (tuple, &w) in &weights {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidCount {
                    tuple: tuple.iter().map(|&i| i as usize).collect(),
                    count: w,
                });
            }
            if tuple.len() != cards.len()
                || tuple
                    .iter()
                    .zip(&cards)
                    .any(|(&idx, &card)| idx as usize >= card)
            {
                return Err(Error::TupleOutOfAlphabet {
                    tuple: tuple.iter().map(|&i| i as usize).collect(),
                });
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::AllZeroCounts);
        }
        // Renormalize to absorb accumulated floating-point drift.
        let mass = weights
            .into_iter()
            .map(|(k, w)| (k, w / total))
            .collect();
        Ok(JointDistribution {
            alphabets,
            mass,
            total_observations,
        })
    }

    pub fn alphabets(&self) -> &[Alphabet] {
        &self.alphabets
    }

    pub fn alphabet_of(&self, id: &VariableId) -> Option<&Alphabet> {
        self.alphabets.iter().find(|a| a.variable() == id)
    }

    pub fn arity(&self) -> usize {
        self.alphabets.len()
    }

    pub fn variables(&self) -> impl Iterator<Item = &VariableId> {
        self.alphabets.iter().map(Alphabet::variable)
    }

    /// All variables, in axis order.
    pub fn variable_set(&self) -> VariableSet {
        VariableSet(self.variables().cloned().collect())
    }

    pub fn total_observations(&self) -> Option<f64> {
        self.total_observations
    }

    /// Positive cells in deterministic (lexicographic tuple) order.
    pub fn cells(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.mass.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    pub fn support_len(&self) -> usize {
        self.mass.len()
    }

    /// Probability of one tuple; absent cells are zero.
    pub fn probability(&self, tuple: &[u32]) -> f64 {
        self.mass.get(tuple).copied().unwrap_or(0.0)
    }

    fn axis_of(&self, id: &VariableId) -> Result<usize> {
        self.alphabets
            .iter()
            .position(|a| a.variable() == id)
            .ok_or_else(|| Error::UnknownVariable(id.name().to_string()))
    }

    /// Margin over `vars`: sums matching cells, restricting and reordering
    /// the axes to `vars`. One-step marginalization over several variables
    /// equals any iterated order.
    pub fn marginal(&self, vars: &VariableSet) -> Result<JointDistribution> {
        let axes = vars
            .iter()
            .map(|v| self.axis_of(v))
            .collect::<Result<Vec<_>>>()?;

        let alphabets: Vec<Alphabet> =
            axes.iter().map(|&a| self.alphabets[a].clone()).collect();
        let mut mass: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (tuple, p) in self.cells() {
            let key: Vec<u32> = axes.iter().map(|&a| tuple[a]).collect();
            *mass.entry(key).or_insert(0.0) += p;
        }
        Ok(JointDistribution {
            alphabets,
            mass,
            total_observations: self.total_observations,
        })
    }

    /// Restricts to the event where each assigned variable takes the given
    /// category, renormalizes, and drops the assigned axes. At least one
    /// variable must remain free.
    pub fn slice_condition(
        &self,
        assignment: &[(VariableId, String)],
    ) -> Result<JointDistribution> {
        let mut fixed: Vec<(usize, u32)> = Vec::with_capacity(assignment.len());
        for (var, label) in assignment {
            let axis = self.axis_of(var)?;
            let idx = self.alphabets[axis].index_of(label).ok_or_else(|| {
                Error::CategoryOutsideAlphabet {
                    variable: var.name().to_string(),
                    category: label.clone(),
                }
            })?;
            fixed.push((axis, idx as u32));
        }

        let free_axes: Vec<usize> = (0..self.arity())
            .filter(|a| fixed.iter().all(|&(fa, _)| fa != *a))
            .collect();
        if free_axes.is_empty() {
            return Err(Error::EmptyVariableSet);
        }

        let mut slice_mass = 0.0;
        let mut mass: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (tuple, p) in self.cells() {
            if fixed.iter().all(|&(axis, idx)| tuple[axis] == idx) {
                slice_mass += p;
                let key: Vec<u32> = free_axes.iter().map(|&a| tuple[a]).collect();
                *mass.entry(key).or_insert(0.0) += p;
            }
        }
        if slice_mass <= 0.0 {
            return Err(Error::ZeroProbabilityCondition);
        }

        for p in mass.values_mut() {
            *p /= slice_mass;
        }
        let alphabets = free_axes
            .iter()
            .map(|&a| self.alphabets[a].clone())
            .collect();
        Ok(JointDistribution {
            alphabets,
            mass,
            total_observations: self.total_observations.map(|n| n * slice_mass),
        })
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.mass
            .values()
            .map(|&p| -p * p.log2())
            .sum::<f64>()
            .max(0.0)
    }

    /// Shannon entropy in units of `base`; any base greater than 1.
    pub fn entropy_in(&self, base: f64) -> Result<f64> {
        if base.is_nan() || base <= 1.0 {
            return Err(Error::InvalidBase(base));
        }
        if base == 2.0 {
            return Ok(self.entropy());
        }
        let ln_base = base.ln();
        Ok(self
            .mass
            .values()
            .map(|&p| -p * p.ln() / ln_base)
            .sum::<f64>()
            .max(0.0))
    }

    /// `log2` of the number of representable tuples, from the declared
    /// alphabet cardinalities (not the observed support).
    pub fn max_entropy(&self) -> f64 {
        self.alphabets
            .iter()
            .map(|a| (a.cardinality() as f64).log2())
            .sum()
    }

    /// Maximum entropy in units of `base`.
    pub fn max_entropy_in(&self, base: f64) -> Result<f64> {
        if base.is_nan() || base <= 1.0 {
            return Err(Error::InvalidBase(base));
        }
        let ln_base = base.ln();
        Ok(self
            .alphabets
            .iter()
            .map(|a| (a.cardinality() as f64).ln() / ln_base)
            .sum())
    }

    /// Total stored mass; 1 within [`MASS_TOLERANCE`] by construction.
    pub fn total_mass(&self) -> f64 {
        self.mass.values().sum()
    }
}

fn validate_alphabets(alphabets: &[Alphabet]) -> Result<()> {
    if alphabets.is_empty() {
        return Err(Error::EmptyVariableSet);
    }
    for (i, a) in alphabets.iter().enumerate() {
        if alphabets[..i].iter().any(|b| b.variable() == a.variable()) {
            return Err(Error::DuplicateVariable(a.variable().name().to_string()));
        }
    }
    Ok(())
}

/// Visits every index tuple of the product space in lexicographic order.
pub(crate) fn for_each_tuple(cards: &[usize], mut f: impl FnMut(&[u32])) {
    let mut tuple = vec![0u32; cards.len()];
    if cards.contains(&0) {
        return;
    }
    loop {
        f(&tuple);
        let mut axis = cards.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            tuple[axis] += 1;
            if (tuple[axis] as usize) < cards[axis] {
                break;
            }
            tuple[axis] = 0;
        }
    }
}
