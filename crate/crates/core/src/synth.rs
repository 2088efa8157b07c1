//! Canonical test distributions and a seeded random generator.
//!
//! The parity family is the canonical witness of purely synergistic
//! dependence: every proper margin is uniform while the full transmission is
//! −1 bit (odd arity) or +1 bit (even arity). The latent-common-cause family
//! interpolates between the copy triple (noise 0) and full independence
//! (noise 0.5), reproducing the spurious-correlation signature where a
//! pairwise dependence vanishes under conditioning.

pub mod oracle;

use std::collections::BTreeMap;

use crate::distribution::{Alphabet, JointDistribution, VariableId};
use crate::error::{Error, Result};

/// A generator request, as accepted by the `synth` command.
#[derive(Clone, Debug)]
pub enum GeneratorSpec {
    /// n binary variables; the first n−1 are independent fair bits and the
    /// last is their XOR.
    Parity { arity: usize },
    /// Product of uniform marginals with the given cardinalities.
    IndependentUniform { cardinalities: Vec<usize> },
    /// One uniform draw copied into every variable.
    CopyChain { arity: usize, cardinality: usize },
    /// Three binary variables that each copy a hidden fair bit, independently
    /// flipped with probability `noise`.
    LatentCommonCause { noise: f64 },
    /// Seed-deterministic random masses, optionally sparsified.
    Random {
        seed: u64,
        cardinalities: Vec<usize>,
        sparsity: f64,
    },
}

pub fn generate(spec: &GeneratorSpec) -> Result<JointDistribution> {
    match spec {
        GeneratorSpec::Parity { arity } => parity(*arity),
        GeneratorSpec::IndependentUniform { cardinalities } => independent_uniform(cardinalities),
        GeneratorSpec::CopyChain { arity, cardinality } => copy_chain(*arity, *cardinality),
        GeneratorSpec::LatentCommonCause { noise } => latent_common_cause(*noise),
        GeneratorSpec::Random {
            seed,
            cardinalities,
            sparsity,
        } => random_distribution(*seed, cardinalities, *sparsity),
    }
}

/// Default variable names: `x, y, z, w` up to four variables, `v1…vn` beyond.
pub fn default_names(n: usize) -> Vec<String> {
    const LETTERS: [&str; 4] = ["x", "y", "z", "w"];
    if n <= LETTERS.len() {
        LETTERS[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("v{i}")).collect()
    }
}

fn named_binary_alphabets(n: usize) -> Result<Vec<Alphabet>> {
    default_names(n)
        .into_iter()
        .map(|name| Ok(Alphabet::binary(VariableId::new(name)?)))
        .collect()
}

/// The parity distribution over `n ≥ 2` binary variables: 2^(n−1) cells of
/// mass 2^−(n−1), one per even-parity tuple.
pub fn parity(n: usize) -> Result<JointDistribution> {
    if n < 2 {
        return Err(Error::ArityTooSmall { required: 2, got: n });
    }
    let alphabets = named_binary_alphabets(n)?;
    let mut counts = Vec::with_capacity(1 << (n - 1));
    for bits in 0..(1usize << (n - 1)) {
        let mut tuple = Vec::with_capacity(n);
        let mut xor = 0usize;
        for axis in 0..n - 1 {
            let bit = (bits >> axis) & 1;
            tuple.push(bit);
            xor ^= bit;
        }
        tuple.push(xor);
        counts.push((tuple, 1.0));
    }
    JointDistribution::from_counts(alphabets, counts)
}

/// Product of uniform marginals.
pub fn independent_uniform(cardinalities: &[usize]) -> Result<JointDistribution> {
    let names = default_names(cardinalities.len());
    let alphabets = names
        .into_iter()
        .zip(cardinalities)
        .map(|(name, &card)| Alphabet::indexed(VariableId::new(name)?, card))
        .collect::<Result<Vec<_>>>()?;
    let mut counts = Vec::new();
    crate::distribution::for_each_tuple(cardinalities, |tuple| {
        counts.push((tuple.iter().map(|&i| i as usize).collect(), 1.0));
    });
    JointDistribution::from_counts(alphabets, counts)
}

/// `n` copies of one uniform draw over `cardinality` categories.
pub fn copy_chain(n: usize, cardinality: usize) -> Result<JointDistribution> {
    if n < 2 {
        return Err(Error::ArityTooSmall { required: 2, got: n });
    }
    let names = default_names(n);
    let alphabets = names
        .into_iter()
        .map(|name| Alphabet::indexed(VariableId::new(name)?, cardinality))
        .collect::<Result<Vec<_>>>()?;
    let counts = (0..cardinality).map(|c| (vec![c; n], 1.0));
    JointDistribution::from_counts(alphabets, counts)
}

/// Three binary variables x, y, z, each copying a hidden fair bit flipped
/// independently with probability `noise`, marginalized over the hidden bit.
/// Noise 0 collapses to the copy triple; noise 0.5 to full independence.
pub fn latent_common_cause(noise: f64) -> Result<JointDistribution> {
    if !(0.0..=1.0).contains(&noise) || noise.is_nan() {
        return Err(Error::InvalidProbability(noise));
    }
    let alphabets = named_binary_alphabets(3)?;
    let flip = |observed: usize, hidden: usize| -> f64 {
        if observed == hidden {
            1.0 - noise
        } else {
            noise
        }
    };
    let mut counts = Vec::with_capacity(8);
    for x in 0..2usize {
        for y in 0..2usize {
            for z in 0..2usize {
                let mass: f64 = [0usize, 1]
                    .iter()
                    .map(|&h| 0.5 * flip(x, h) * flip(y, h) * flip(z, h))
                    .sum();
                counts.push((vec![x, y, z], mass));
            }
        }
    }
    JointDistribution::from_counts(alphabets, counts)
}

/// Seed-deterministic random distribution: positive masses drawn per cell and
/// normalized, with `sparsity · cells` cells forced to zero. `sparsity` must
/// lie in [0, 1).
pub fn random_distribution(
    seed: u64,
    cardinalities: &[usize],
    sparsity: f64,
) -> Result<JointDistribution> {
    if !(0.0..1.0).contains(&sparsity) {
        return Err(Error::InvalidProbability(sparsity));
    }
    let names = default_names(cardinalities.len());
    let alphabets = names
        .into_iter()
        .zip(cardinalities)
        .map(|(name, &card)| Alphabet::indexed(VariableId::new(name)?, card))
        .collect::<Result<Vec<_>>>()?;

    let mut rng = SplitMix64::new(seed);
    let mut weights: Vec<(Vec<u32>, f64)> = Vec::new();
    crate::distribution::for_each_tuple(cardinalities, |tuple| {
        // -ln(u) with u in (0, 1]: exponential draws, symmetric across cells.
        let weight = -rng.next_unit().ln();
        weights.push((tuple.to_vec(), weight.max(f64::MIN_POSITIVE)));
    });

    let zeroed = (sparsity * weights.len() as f64).floor() as usize;
    // Partial Fisher-Yates on the cell order decides which cells vanish.
    let mut order: Vec<usize> = (0..weights.len()).collect();
    for i in 0..zeroed.min(order.len()) {
        let j = i + (rng.next_u64() as usize) % (order.len() - i);
        order.swap(i, j);
        weights[order[i]].1 = 0.0;
    }

    if weights.iter().all(|(_, w)| *w == 0.0) {
        return Err(Error::AllCellsZero);
    }

    let mass: BTreeMap<Vec<u32>, f64> = weights
        .into_iter()
        .filter(|(_, w)| *w > 0.0)
        .collect();
    JointDistribution::from_normalized_weights(alphabets, mass, None)
}

/// SplitMix64: a tiny, stable, seed-deterministic generator. Good enough for
/// test fuel and reproducible across platforms and releases.
struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in (0, 1].
    fn next_unit(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
