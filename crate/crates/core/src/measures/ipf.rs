//! Iterative proportional fitting: the maximum-entropy distribution whose
//! k-way margins match a target distribution.
//!
//! The fit starts from the uniform table over the full product space and
//! cycles over every k-subset of variables, rescaling cells so the current
//! margin matches the target margin. Cells forced to zero by a zero target
//! margin stay zero. Convergence is judged on the maximum absolute margin
//! deviation after each full cycle.

use std::collections::BTreeMap;

use crate::distribution::{Alphabet, JointDistribution};
use crate::error::{Error, Result};

/// Stopping policy for [`ipf_fit`].
#[derive(Clone, Debug)]
pub struct IpfOptions {
    /// Maximum absolute margin deviation at which the fit counts as
    /// converged.
    pub tolerance: f64,
    /// Upper bound on full cycles over all k-subsets.
    pub max_cycles: usize,
}

impl Default for IpfOptions {
    fn default() -> Self {
        IpfOptions {
            tolerance: 1e-10,
            max_cycles: 10_000,
        }
    }
}

/// Outcome of one fit. Non-convergence is reported here, never as an error.
#[derive(Clone, Debug)]
pub struct IpfResult {
    pub fitted: JointDistribution,
    /// Full cycles performed.
    pub iterations: usize,
    /// Maximum absolute margin deviation at the end.
    pub max_margin_error: f64,
    pub converged: bool,
}

/// Fits the maximum-entropy distribution matching every `margin_order`-way
/// margin of `dist`. Requires `1 ≤ margin_order < arity`.
pub fn ipf_fit(
    dist: &JointDistribution,
    margin_order: usize,
    options: &IpfOptions,
) -> Result<IpfResult> {
    let n = dist.arity();
    if margin_order < 1 || margin_order >= n {
        return Err(Error::InvalidOrder {
            order: margin_order,
            variables: n,
        });
    }

    let cards: Vec<usize> = dist
        .alphabets()
        .iter()
        .map(Alphabet::cardinality)
        .collect();
    let strides = row_major_strides(&cards);
    let cells: usize = cards.iter().product();

    // Target margins for every k-subset, as dense arrays with zeros kept.
    let subsets = k_subsets(n, margin_order);
    let mut targets: Vec<Margin> = subsets
        .iter()
        .map(|axes| Margin::new(axes.clone(), &cards))
        .collect();
    for (tuple, p) in dist.cells() {
        for margin in &mut targets {
            let idx = margin.index_of(tuple);
            margin.values[idx] += p;
        }
    }

    let mut table = vec![1.0 / cells as f64; cells];
    let mut current = vec![0.0; targets.iter().map(|m| m.values.len()).max().unwrap_or(0)];

    let mut iterations = 0;
    let mut max_margin_error = f64::INFINITY;
    let mut converged = false;
    let mut tuple = vec![0u32; n];

    while iterations < options.max_cycles {
        for margin in &targets {
            let width = margin.values.len();
            current[..width].iter_mut().for_each(|v| *v = 0.0);
            for (cell, &w) in table.iter().enumerate() {
                decode(cell, &strides, &cards, &mut tuple);
                current[margin.index_of(&tuple)] += w;
            }
            for (cell, w) in table.iter_mut().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                decode(cell, &strides, &cards, &mut tuple);
                let idx = margin.index_of(&tuple);
                let target = margin.values[idx];
                if target == 0.0 {
                    *w = 0.0;
                } else if current[idx] > 0.0 {
                    *w *= target / current[idx];
                }
            }
        }
        iterations += 1;

        max_margin_error = margin_deviation(&table, &targets, &strides, &cards, &mut tuple);
        if max_margin_error <= options.tolerance {
            converged = true;
            break;
        }
    }

    let mut weights: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for (cell, &w) in table.iter().enumerate() {
        if w > 0.0 {
            decode(cell, &strides, &cards, &mut tuple);
            weights.insert(tuple.clone(), w);
        }
    }
    let fitted = JointDistribution::from_normalized_weights(
        dist.alphabets().to_vec(),
        weights,
        dist.total_observations(),
    )?;

    Ok(IpfResult {
        fitted,
        iterations,
        max_margin_error,
        converged,
    })
}

/// One margin's axes, strides into its own dense value array, and values.
struct Margin {
    axes: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<f64>,
}

impl Margin {
    fn new(axes: Vec<usize>, cards: &[usize]) -> Self {
        let own_cards: Vec<usize> = axes.iter().map(|&a| cards[a]).collect();
        let strides = row_major_strides(&own_cards);
        let len = own_cards.iter().product();
        Margin {
            axes,
            strides,
            values: vec![0.0; len],
        }
    }

    fn index_of(&self, tuple: &[u32]) -> usize {
        self.axes
            .iter()
            .zip(&self.strides)
            .map(|(&axis, &stride)| tuple[axis] as usize * stride)
            .sum()
    }
}

fn margin_deviation(
    table: &[f64],
    targets: &[Margin],
    strides: &[usize],
    cards: &[usize],
    tuple: &mut [u32],
) -> f64 {
    let mut worst = 0.0f64;
    for margin in targets {
        let mut current = vec![0.0; margin.values.len()];
        for (cell, &w) in table.iter().enumerate() {
            decode(cell, strides, cards, tuple);
            current[margin.index_of(tuple)] += w;
        }
        for (got, want) in current.iter().zip(&margin.values) {
            worst = worst.max((got - want).abs());
        }
    }
    worst
}

fn row_major_strides(cards: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; cards.len()];
    for axis in (0..cards.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * cards[axis + 1];
    }
    strides
}

fn decode(cell: usize, strides: &[usize], cards: &[usize], tuple: &mut [u32]) {
    for axis in 0..cards.len() {
        tuple[axis] = ((cell / strides[axis]) % cards[axis]) as u32;
    }
}

/// All k-element subsets of 0..n in lexicographic order.
fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut choice: Vec<usize> = (0..k).collect();
    loop {
        out.push(choice.clone());
        // Advance the rightmost index that can still move.
        let mut axis = k;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if choice[axis] < n - (k - axis) {
                choice[axis] += 1;
                for later in axis + 1..k {
                    choice[later] = choice[later - 1] + 1;
                }
                break;
            }
        }
    }
}
