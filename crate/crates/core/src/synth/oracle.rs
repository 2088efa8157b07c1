//! Dense brute-force reference path for every measure.
//!
//! The oracle materializes the full tensor over the product space (zero cells
//! included) and recomputes each measure with naive loops: its own margin
//! sums, its own subset enumeration, its own proportional fitting. It shares
//! no marginalization or subset-enumeration code with the measures module —
//! the duplication is deliberate, so that agreement between the two paths is
//! evidence rather than tautology.

use crate::distribution::{JointDistribution, VariableSet};
use crate::error::{Error, Result};
use crate::measures::{self, MeasureKind, MeasureOptions};

/// Largest dense cell count the oracle will materialize.
pub const ORACLE_CELL_LIMIT: usize = 1_000_000;

/// Recomputes `kind` over `s` (and `given`, for the conditional transmission)
/// through the dense path. Reports bits.
pub fn oracle_measure(
    dist: &JointDistribution,
    kind: MeasureKind,
    s: &VariableSet,
    given: Option<&VariableSet>,
) -> Result<f64> {
    let tensor = DenseTensor::build(dist)?;
    let axes = tensor.resolve(s)?;

    match kind {
        MeasureKind::Entropy => Ok(tensor.margin_entropy(&axes)),
        MeasureKind::Transmission => Ok(tensor.transmission(&axes)),
        MeasureKind::QMeasure => {
            let h = tensor.subset_entropies(&axes);
            let n = axes.len() as u32;
            let mut q = 0.0;
            for (mask, h_mask) in h.iter().enumerate().skip(1) {
                let k = (mask as u32).count_ones();
                let sign = if (1 + n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
                q += sign * h_mask;
            }
            Ok(q)
        }
        MeasureKind::ExcessEntropy => {
            let t = tensor.transmission_table(&axes);
            Ok(t.iter().skip(1).sum())
        }
        #[allow(clippy::needless_range_loop)]
        MeasureKind::MutualRedundancy => {
            if axes.len() < 2 {
                return Err(Error::ArityTooSmall {
                    required: 2,
                    got: axes.len(),
                });
            }
            // Substitution route: excess entropies in place of joint
            // entropies throughout the inclusion–exclusion. Deliberately not
            // the closed form the main path returns.
            let t = tensor.transmission_table(&axes);
            let full = t.len() - 1;
            let mut r = 0.0;
            for mask in 1..=full {
                let sign = if (mask as u32).count_ones() % 2 == 1 {
                    1.0
                } else {
                    -1.0
                };
                let mut y = 0.0;
                for sub in 1..=full {
                    if sub & mask == sub {
                        y += t[sub];
                    }
                }
                r += sign * y;
            }
            Ok(r)
        }
        MeasureKind::RedundancyFraction => {
            let h_max: f64 = axes
                .iter()
                .map(|&a| (tensor.cards[a] as f64).log2())
                .sum();
            if h_max <= 0.0 {
                return Err(Error::DegenerateAlphabet);
            }
            let h = tensor.margin_entropy(&axes);
            Ok(((h_max - h) / h_max).clamp(0.0, 1.0))
        }
        MeasureKind::ConditionalTransmission => {
            let given = given.ok_or(Error::MissingConditioningSet("tcond"))?;
            if axes.len() != 2 {
                return Err(Error::ArityTooSmall {
                    required: 2,
                    got: axes.len(),
                });
            }
            let g = tensor.resolve(given)?;
            if g.iter().any(|a| axes.contains(a)) {
                return Err(Error::OverlappingSets(given.joined()));
            }
            let xg = [&axes[..1], &g[..]].concat();
            let yg = [&axes[1..], &g[..]].concat();
            let xyg = [&axes[..], &g[..]].concat();
            let t = tensor.margin_entropy(&xg) + tensor.margin_entropy(&yg)
                - tensor.margin_entropy(&xyg)
                - tensor.margin_entropy(&g);
            Ok(t.max(0.0))
        }
        MeasureKind::InteractionInformation => {
            if axes.len() < 3 {
                return Err(Error::ArityTooSmall {
                    required: 3,
                    got: axes.len(),
                });
            }
            tensor.interaction_information(&axes)
        }
    }
}

/// Both routes for one measure, side by side.
#[derive(Clone, Copy, Debug)]
pub struct OracleComparison {
    pub main: f64,
    pub oracle: f64,
    pub diff: f64,
}

/// Runs the measures-module path and the dense oracle path and reports both.
pub fn compare_with_oracle(
    dist: &JointDistribution,
    kind: MeasureKind,
    s: &VariableSet,
    given: Option<&VariableSet>,
) -> Result<OracleComparison> {
    let report = measures::measure_report(dist, kind, s, given, &MeasureOptions::default())?;
    let oracle = oracle_measure(dist, kind, s, given)?;
    Ok(OracleComparison {
        main: report.value,
        oracle,
        diff: (report.value - oracle).abs(),
    })
}

/// The full product-space tensor, zeros included.
struct DenseTensor {
    cards: Vec<usize>,
    strides: Vec<usize>,
    probs: Vec<f64>,
    names: Vec<String>,
}

impl DenseTensor {
    fn build(dist: &JointDistribution) -> Result<Self> {
        let cards: Vec<usize> = dist
            .alphabets()
            .iter()
            .map(|a| a.cardinality())
            .collect();
        let mut cells = 1usize;
        for &c in &cards {
            cells = cells.saturating_mul(c);
        }
        if cells > ORACLE_CELL_LIMIT {
            return Err(Error::TooLargeForOracle {
                cells,
                limit: ORACLE_CELL_LIMIT,
            });
        }

        let mut strides = vec![1usize; cards.len()];
        for axis in (0..cards.len().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * cards[axis + 1];
        }

        let mut probs = vec![0.0; cells];
        for (tuple, p) in dist.cells() {
            let mut flat = 0usize;
            for (axis, &idx) in tuple.iter().enumerate() {
                flat += idx as usize * strides[axis];
            }
            probs[flat] += p;
        }

        Ok(DenseTensor {
            cards,
            strides,
            probs,
            names: dist
                .alphabets()
                .iter()
                .map(|a| a.variable().name().to_string())
                .collect(),
        })
    }

    fn resolve(&self, s: &VariableSet) -> Result<Vec<usize>> {
        s.iter()
            .map(|v| {
                self.names
                    .iter()
                    .position(|n| n == v.name())
                    .ok_or_else(|| Error::UnknownVariable(v.name().to_string()))
            })
            .collect()
    }

    /// Entropy in bits of the margin over `axes`, by summing every full cell
    /// into a dense margin table.
    fn margin_entropy(&self, axes: &[usize]) -> f64 {
        if axes.is_empty() {
            return 0.0;
        }
        let mut margin_strides = vec![1usize; axes.len()];
        for i in (0..axes.len() - 1).rev() {
            margin_strides[i] = margin_strides[i + 1] * self.cards[axes[i + 1]];
        }
        let len: usize = axes.iter().map(|&a| self.cards[a]).product();
        let mut margin = vec![0.0; len];
        for (cell, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut flat = 0usize;
            for (slot, &axis) in axes.iter().enumerate() {
                let idx = (cell / self.strides[axis]) % self.cards[axis];
                flat += idx * margin_strides[slot];
            }
            margin[flat] += p;
        }
        let mut h = 0.0;
        for &p in &margin {
            if p > 0.0 {
                h -= p * p.log2();
            }
        }
        h.max(0.0)
    }

    /// H for every bitmask over the positions of `axes`; index 0 is 0.
    #[allow(clippy::needless_range_loop)]
    fn subset_entropies(&self, axes: &[usize]) -> Vec<f64> {
        let n = axes.len();
        let mut h = vec![0.0; 1 << n];
        for mask in 1usize..(1 << n) {
            let chosen: Vec<usize> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| axes[i])
                .collect();
            h[mask] = self.margin_entropy(&chosen);
        }
        h
    }

    fn transmission(&self, axes: &[usize]) -> f64 {
        let t = self.transmission_table(axes);
        t[t.len() - 1]
    }

    /// T for every bitmask, from the signed sum over contained subsets. The
    /// containment test is the naive `sub & mask == sub` scan.
    #[allow(clippy::needless_range_loop)]
    fn transmission_table(&self, axes: &[usize]) -> Vec<f64> {
        let h = self.subset_entropies(axes);
        let full = h.len() - 1;
        let mut t = vec![0.0; h.len()];
        for mask in 1..=full {
            let mut total = 0.0;
            for sub in 1..=full {
                if sub & mask == sub {
                    let sign = if (sub as u32).count_ones() % 2 == 1 {
                        1.0
                    } else {
                        -1.0
                    };
                    total += sign * h[sub];
                }
            }
            t[mask] = total;
        }
        t
    }

    /// Dense proportional fitting of the (|axes|−1)-way margins of the margin
    /// over `axes`, then the entropy gap to the observed margin.
    fn interaction_information(&self, axes: &[usize]) -> Result<f64> {
        let n = axes.len();
        let cards: Vec<usize> = axes.iter().map(|&a| self.cards[a]).collect();
        let mut strides = vec![1usize; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * cards[i + 1];
        }
        let len: usize = cards.iter().product();

        // Observed margin over `axes`.
        let mut observed = vec![0.0; len];
        for (cell, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let mut flat = 0usize;
            for (slot, &axis) in axes.iter().enumerate() {
                let idx = (cell / self.strides[axis]) % self.cards[axis];
                flat += idx * strides[slot];
            }
            observed[flat] += p;
        }

        // Every (n−1)-subset of positions is "all but one".
        let subsets: Vec<Vec<usize>> = (0..n)
            .map(|skip| (0..n).filter(|&i| i != skip).collect())
            .collect();
        let margin_index = |cell: usize, subset: &[usize], mstrides: &[usize]| -> usize {
            subset
                .iter()
                .zip(mstrides)
                .map(|(&pos, &ms)| ((cell / strides[pos]) % cards[pos]) * ms)
                .sum()
        };

        struct Target {
            subset: Vec<usize>,
            mstrides: Vec<usize>,
            values: Vec<f64>,
        }
        let mut targets = Vec::with_capacity(subsets.len());
        for subset in subsets {
            let sub_cards: Vec<usize> = subset.iter().map(|&p| cards[p]).collect();
            let mut mstrides = vec![1usize; subset.len()];
            for i in (0..subset.len().saturating_sub(1)).rev() {
                mstrides[i] = mstrides[i + 1] * sub_cards[i + 1];
            }
            let mut values = vec![0.0; sub_cards.iter().product()];
            for (cell, &p) in observed.iter().enumerate() {
                if p > 0.0 {
                    values[margin_index(cell, &subset, &mstrides)] += p;
                }
            }
            targets.push(Target {
                subset,
                mstrides,
                values,
            });
        }

        let mut table = vec![1.0 / len as f64; len];
        let tolerance = 1e-10;
        for _cycle in 0..10_000usize {
            for target in &targets {
                let mut current = vec![0.0; target.values.len()];
                for (cell, &w) in table.iter().enumerate() {
                    current[margin_index(cell, &target.subset, &target.mstrides)] += w;
                }
                for (cell, w) in table.iter_mut().enumerate() {
                    if *w == 0.0 {
                        continue;
                    }
                    let idx = margin_index(cell, &target.subset, &target.mstrides);
                    if target.values[idx] == 0.0 {
                        *w = 0.0;
                    } else if current[idx] > 0.0 {
                        *w *= target.values[idx] / current[idx];
                    }
                }
            }
            let mut worst = 0.0f64;
            for target in &targets {
                let mut current = vec![0.0; target.values.len()];
                for (cell, &w) in table.iter().enumerate() {
                    current[margin_index(cell, &target.subset, &target.mstrides)] += w;
                }
                for (got, want) in current.iter().zip(&target.values) {
                    worst = worst.max((got - want).abs());
                }
            }
            if worst <= tolerance {
                break;
            }
        }

        let entropy = |cells: &[f64]| -> f64 {
            let mut h = 0.0;
            for &p in cells {
                if p > 0.0 {
                    h -= p * p.log2();
                }
            }
            h.max(0.0)
        };
        Ok((entropy(&table) - entropy(&observed)).max(0.0))
    }
}
