//! The measure calculus over joint distributions: transmissions in any
//! dimension, the Q-measure, excess entropy, mutual redundancy with its sign
//! law, redundancy fraction, conditional quantities, and interaction
//! information.
//!
//! Sign conventions, fixed once for the whole crate:
//!
//! - `transmission_n` is the signed inclusion–exclusion of subset entropies,
//!   T(S) = Σ over nonempty X ⊆ S of (−1)^(|X|+1) · H(X). For one variable it
//!   degenerates to T({x}) = H(x), which is exactly what makes the excess
//!   entropy Y(S) = Σ T(X) close over all arities. T can be negative from
//!   three variables up.
//! - `q_measure` is the opposite-sign convention,
//!   Q(S) = Σ over X ⊆ S of (−1)^(1+|S|−|X|) · H(X), so Q(S) = (−1)^|S|·T(S).
//! - `mutual_redundancy` is R(S) = (−1)^(|S|+1) · T(S): computed both in
//!   closed form and by substituting excess entropies for joint entropies in
//!   the inclusion–exclusion; the two routes must agree or the call fails
//!   with [`Error::PathMismatch`].
//!
//! All free functions report bits. Other log bases are threaded through
//! [`measure_report`] via [`MeasureOptions::base`].

mod ipf;

pub use ipf::{ipf_fit, IpfOptions, IpfResult};

use std::collections::BTreeMap;

use crate::distribution::{JointDistribution, VariableId, VariableSet};
use crate::error::{Error, Result};

/// Identity checks between measure routes hold to this many bits.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Entropy of the margin on `s`, symmetric in the order of `s`.
pub fn subset_entropy(dist: &JointDistribution, s: &VariableSet) -> Result<f64> {
    subset_entropy_in(dist, s, 2.0)
}

fn subset_entropy_in(dist: &JointDistribution, s: &VariableSet, base: f64) -> Result<f64> {
    dist.marginal(s)?.entropy_in(base)
}

/// H(S | G) = H(S ∪ G) − H(G); the sets must be disjoint. Tiny negative
/// rounding residues clamp to zero.
pub fn conditional_entropy(
    dist: &JointDistribution,
    s: &VariableSet,
    given: &VariableSet,
) -> Result<f64> {
    conditional_entropy_in(dist, s, given, 2.0)
}

fn conditional_entropy_in(
    dist: &JointDistribution,
    s: &VariableSet,
    given: &VariableSet,
    base: f64,
) -> Result<f64> {
    let joint = s.union_disjoint(given)?;
    let h = subset_entropy_in(dist, &joint, base)? - subset_entropy_in(dist, given, base)?;
    Ok(h.max(0.0))
}

/// Two-variable mutual information T = H(x) + H(y) − H(x,y), clamped to ≥ 0.
pub fn transmission2(dist: &JointDistribution, x: &VariableId, y: &VariableId) -> Result<f64> {
    transmission2_in(dist, x, y, 2.0)
}

fn transmission2_in(
    dist: &JointDistribution,
    x: &VariableId,
    y: &VariableId,
    base: f64,
) -> Result<f64> {
    if x == y {
        return Err(Error::IdenticalVariables(x.name().to_string()));
    }
    let hx = subset_entropy_in(dist, &VariableSet::single(x.clone()), base)?;
    let hy = subset_entropy_in(dist, &VariableSet::single(y.clone()), base)?;
    let hxy = subset_entropy_in(
        dist,
        &VariableSet::new([x.clone(), y.clone()])?,
        base,
    )?;
    let t = hx + hy - hxy;
    debug_assert!(t > -1e-6, "two-variable transmission went negative: {t}");
    Ok(t.max(0.0))
}

/// T(x; y | G) = H(x|G) + H(y|G) − H(x,y|G), clamped to ≥ 0.
pub fn conditional_transmission(
    dist: &JointDistribution,
    x: &VariableId,
    y: &VariableId,
    given: &VariableSet,
) -> Result<f64> {
    conditional_transmission_in(dist, x, y, given, 2.0)
}

fn conditional_transmission_in(
    dist: &JointDistribution,
    x: &VariableId,
    y: &VariableId,
    given: &VariableSet,
    base: f64,
) -> Result<f64> {
    if x == y {
        return Err(Error::IdenticalVariables(x.name().to_string()));
    }
    for v in [x, y] {
        if given.contains(v) {
            return Err(Error::OverlappingSets(v.name().to_string()));
        }
    }
    let hg = subset_entropy_in(dist, given, base)?;
    let hxg = subset_entropy_in(
        dist,
        &VariableSet::single(x.clone()).union_disjoint(given)?,
        base,
    )?;
    let hyg = subset_entropy_in(
        dist,
        &VariableSet::single(y.clone()).union_disjoint(given)?,
        base,
    )?;
    let hxyg = subset_entropy_in(
        dist,
        &VariableSet::new([x.clone(), y.clone()])?.union_disjoint(given)?,
        base,
    )?;
    let t = hxg + hyg - hxyg - hg;
    debug_assert!(t > -1e-6, "conditional transmission went negative: {t}");
    Ok(t.max(0.0))
}

/// N-dimensional transmission T(S); signed for three or more variables.
pub fn transmission_n(dist: &JointDistribution, s: &VariableSet) -> Result<f64> {
    transmission_n_in(dist, s, 2.0)
}

fn transmission_n_in(dist: &JointDistribution, s: &VariableSet, base: f64) -> Result<f64> {
    let lattice = EntropyLattice::build(dist, s, base)?;
    Ok(lattice.transmission(lattice.full_mask()))
}

/// Q(S) = Σ over X ⊆ S of (−1)^(1+|S|−|X|) · H(X), with H(∅) = 0.
pub fn q_measure(dist: &JointDistribution, s: &VariableSet) -> Result<f64> {
    q_measure_in(dist, s, 2.0)
}

fn q_measure_in(dist: &JointDistribution, s: &VariableSet, base: f64) -> Result<f64> {
    let lattice = EntropyLattice::build(dist, s, base)?;
    let n = s.len() as u32;
    let mut q = 0.0;
    for mask in 1..=lattice.full_mask() {
        let k = mask.count_ones();
        let sign = if (1 + n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        q += sign * lattice.h(mask);
    }
    Ok(q)
}

/// Excess entropy Y(S) = Σ over nonempty X ⊆ S of T(X): joint uncertainty
/// with overlaps counted twice instead of subtracted. Always Y(S) ≥ H(S).
pub fn excess_entropy(dist: &JointDistribution, s: &VariableSet) -> Result<f64> {
    excess_entropy_in(dist, s, 2.0)
}

fn excess_entropy_in(dist: &JointDistribution, s: &VariableSet, base: f64) -> Result<f64> {
    let lattice = EntropyLattice::build(dist, s, base)?;
    let t = lattice.transmission_table();
    Ok(t.iter().skip(1).sum())
}

/// Mutual redundancy R(S) = (−1)^(|S|+1) · T(S), validated against the
/// independent route that substitutes Y(X) for every joint entropy H(X) with
/// |X| ≥ 2 in the inclusion–exclusion. Nonpositive for two variables.
pub fn mutual_redundancy(dist: &JointDistribution, s: &VariableSet) -> Result<f64> {
    mutual_redundancy_in(dist, s, 2.0)
}

fn mutual_redundancy_in(dist: &JointDistribution, s: &VariableSet, base: f64) -> Result<f64> {
    if s.len() < 2 {
        return Err(Error::ArityTooSmall {
            required: 2,
            got: s.len(),
        });
    }
    let lattice = EntropyLattice::build(dist, s, base)?;
    let t = lattice.transmission_table();
    let full = lattice.full_mask();

    let closed_sign = if s.len() % 2 == 1 { 1.0 } else { -1.0 };
    let closed = closed_sign * t[full as usize];

    // Substitution route: Y(X) in place of H(X) throughout the
    // inclusion–exclusion. Y({x}) = H(x), so the one-variable terms are
    // untouched.
    let y = excess_table(&t);
    let mut substituted = 0.0;
    for mask in 1..=full {
        let sign = if mask.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
        substituted += sign * y[mask as usize];
    }

    let diff = (closed - substituted).abs();
    if diff > IDENTITY_TOLERANCE {
        return Err(Error::PathMismatch {
            closed,
            substituted,
            diff,
        });
    }
    Ok(closed)
}

/// Unused capacity fraction (H_max − H)/H_max of the margin on `s`,
/// clamped into [0, 1]. H_max comes from the declared alphabets.
pub fn redundancy_fraction(dist: &JointDistribution, s: &VariableSet) -> Result<f64> {
    redundancy_fraction_in(dist, s, 2.0)
}

fn redundancy_fraction_in(dist: &JointDistribution, s: &VariableSet, base: f64) -> Result<f64> {
    let margin = dist.marginal(s)?;
    let h_max = margin.max_entropy_in(base)?;
    if h_max <= 0.0 {
        return Err(Error::DegenerateAlphabet);
    }
    let h = margin.entropy_in(base)?;
    Ok(((h_max - h) / h_max).clamp(0.0, 1.0))
}

/// Entropy removed by the highest-order interaction: the entropy of the
/// maximum-entropy model matching every (|S|−1)-way margin, minus the
/// observed entropy. Clamped to ≥ 0. The fit itself is returned so callers
/// can inspect convergence.
pub fn interaction_information(
    dist: &JointDistribution,
    s: &VariableSet,
    options: &IpfOptions,
) -> Result<(f64, IpfResult)> {
    interaction_information_in(dist, s, options, 2.0)
}

fn interaction_information_in(
    dist: &JointDistribution,
    s: &VariableSet,
    options: &IpfOptions,
    base: f64,
) -> Result<(f64, IpfResult)> {
    if s.len() < 3 {
        return Err(Error::ArityTooSmall {
            required: 3,
            got: s.len(),
        });
    }
    let margin = dist.marginal(s)?;
    let fit = ipf_fit(&margin, s.len() - 1, options)?;
    let value = fit.fitted.entropy_in(base)? - margin.entropy_in(base)?;
    debug_assert!(value > -1e-6, "interaction information went negative: {value}");
    Ok((value.max(0.0), fit))
}

/// Memoized subset entropies over the variables of one analysis set, indexed
/// by bitmask over the set's positions.
struct EntropyLattice {
    h: Vec<f64>,
}

impl EntropyLattice {
    fn build(dist: &JointDistribution, s: &VariableSet, base: f64) -> Result<Self> {
        let n = s.len();
        if n == 0 {
            return Err(Error::EmptyVariableSet);
        }
        if base.is_nan() || base <= 1.0 {
            return Err(Error::InvalidBase(base));
        }
        let mut h = vec![0.0; 1 << n];
        for mask in 1u32..(1 << n) as u32 {
            let members = s
                .members()
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| v.clone());
            let subset = VariableSet::new(members)?;
            h[mask as usize] = subset_entropy_in(dist, &subset, base)?;
        }
        Ok(EntropyLattice { h })
    }

    fn full_mask(&self) -> u32 {
        (self.h.len() - 1) as u32
    }

    fn h(&self, mask: u32) -> f64 {
        self.h[mask as usize]
    }

    /// T(mask) = Σ over nonempty sub ⊆ mask of (−1)^(|sub|+1) · H(sub).
    fn transmission(&self, mask: u32) -> f64 {
        let mut t = 0.0;
        let mut sub = mask;
        loop {
            if sub != 0 {
                let sign = if sub.count_ones() % 2 == 1 { 1.0 } else { -1.0 };
                t += sign * self.h(sub);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        t
    }

    /// T for every mask; index 0 is 0.
    fn transmission_table(&self) -> Vec<f64> {
        (0..self.h.len())
            .map(|mask| self.transmission(mask as u32))
            .collect()
    }
}

/// Y(mask) = Σ over nonempty sub ⊆ mask of T(sub).
fn excess_table(t: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; t.len()];
    for mask in 1..t.len() {
        let mask = mask as u32;
        let mut total = 0.0;
        let mut sub = mask;
        loop {
            if sub != 0 {
                total += t[sub as usize];
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        y[mask as usize] = total;
    }
    y
}

/// The measures reachable by name from reports, series, and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasureKind {
    /// Joint entropy H of the margin.
    Entropy,
    /// N-dimensional transmission T.
    Transmission,
    /// The opposite-sign convention Q.
    QMeasure,
    /// Mutual redundancy R.
    MutualRedundancy,
    /// Excess entropy Y.
    ExcessEntropy,
    /// Unused capacity fraction.
    RedundancyFraction,
    /// Pairwise transmission conditioned on a set.
    ConditionalTransmission,
    /// Highest-order interaction beyond the best lower-order margin model.
    InteractionInformation,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 8] = [
        MeasureKind::Entropy,
        MeasureKind::Transmission,
        MeasureKind::QMeasure,
        MeasureKind::MutualRedundancy,
        MeasureKind::ExcessEntropy,
        MeasureKind::RedundancyFraction,
        MeasureKind::ConditionalTransmission,
        MeasureKind::InteractionInformation,
    ];

    /// The short token used on the command line and in reports.
    pub fn token(&self) -> &'static str {
        match self {
            MeasureKind::Entropy => "entropy",
            MeasureKind::Transmission => "t",
            MeasureKind::QMeasure => "q",
            MeasureKind::MutualRedundancy => "r",
            MeasureKind::ExcessEntropy => "y",
            MeasureKind::RedundancyFraction => "rfrac",
            MeasureKind::ConditionalTransmission => "tcond",
            MeasureKind::InteractionInformation => "ii",
        }
    }

    pub fn parse(token: &str) -> Result<Self> {
        MeasureKind::ALL
            .iter()
            .copied()
            .find(|k| k.token() == token)
            .ok_or_else(|| Error::UnknownMeasure(token.to_string()))
    }

    pub fn requires_given(&self) -> bool {
        matches!(self, MeasureKind::ConditionalTransmission)
    }
}

/// Configuration threaded through [`measure_report`].
#[derive(Clone, Debug)]
pub struct MeasureOptions {
    /// Log base; 2 reports bits.
    pub base: f64,
    /// Fitting policy for interaction information.
    pub ipf: IpfOptions,
    /// Attach the component subset entropies to the report.
    pub explain: bool,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            base: 2.0,
            ipf: IpfOptions::default(),
            explain: false,
        }
    }
}

/// One named measure value plus its provenance.
#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub measure_name: String,
    pub variables: VariableSet,
    pub value: f64,
    pub log_base: f64,
    pub observation_count: Option<f64>,
    /// Component terms (subset entropies and fit diagnostics) when explained.
    pub extra: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

/// Evaluates one measure and assembles its report. `given` is required for
/// the conditional transmission and ignored elsewhere.
pub fn measure_report(
    dist: &JointDistribution,
    kind: MeasureKind,
    vars: &VariableSet,
    given: Option<&VariableSet>,
    options: &MeasureOptions,
) -> Result<MeasureReport> {
    if options.base.is_nan() || options.base <= 1.0 {
        return Err(Error::InvalidBase(options.base));
    }
    let base = options.base;
    let mut extra = BTreeMap::new();
    let mut warnings = Vec::new();

    let value = match kind {
        MeasureKind::Entropy => {
            let h = subset_entropy_in(dist, vars, base)?;
            if options.explain {
                extra.insert(format!("H({})", vars.joined()), h);
            }
            h
        }
        MeasureKind::Transmission => {
            if options.explain {
                explain_subset_entropies(dist, vars, base, &mut extra)?;
            }
            transmission_n_in(dist, vars, base)?
        }
        MeasureKind::QMeasure => {
            if options.explain {
                explain_subset_entropies(dist, vars, base, &mut extra)?;
            }
            q_measure_in(dist, vars, base)?
        }
        MeasureKind::MutualRedundancy => {
            if options.explain {
                explain_subset_entropies(dist, vars, base, &mut extra)?;
                extra.insert("T".to_string(), transmission_n_in(dist, vars, base)?);
            }
            mutual_redundancy_in(dist, vars, base)?
        }
        MeasureKind::ExcessEntropy => {
            if options.explain {
                explain_subset_entropies(dist, vars, base, &mut extra)?;
            }
            excess_entropy_in(dist, vars, base)?
        }
        MeasureKind::RedundancyFraction => {
            let margin = dist.marginal(vars)?;
            if options.explain {
                extra.insert("H".to_string(), margin.entropy_in(base)?);
                extra.insert("H_max".to_string(), margin.max_entropy_in(base)?);
            }
            redundancy_fraction_in(dist, vars, base)?
        }
        MeasureKind::ConditionalTransmission => {
            let given = given.ok_or(Error::MissingConditioningSet("tcond"))?;
            if vars.len() != 2 {
                return Err(Error::ArityTooSmall {
                    required: 2,
                    got: vars.len(),
                });
            }
            let (x, y) = (&vars.members()[0], &vars.members()[1]);
            if options.explain {
                let xg = VariableSet::single(x.clone()).union_disjoint(given)?;
                let yg = VariableSet::single(y.clone()).union_disjoint(given)?;
                let xyg = vars.union_disjoint(given)?;
                extra.insert(
                    format!("H({})", given.joined()),
                    subset_entropy_in(dist, given, base)?,
                );
                extra.insert(
                    format!("H({})", xg.joined()),
                    subset_entropy_in(dist, &xg, base)?,
                );
                extra.insert(
                    format!("H({})", yg.joined()),
                    subset_entropy_in(dist, &yg, base)?,
                );
                extra.insert(
                    format!("H({})", xyg.joined()),
                    subset_entropy_in(dist, &xyg, base)?,
                );
            }
            conditional_transmission_in(dist, x, y, given, base)?
        }
        MeasureKind::InteractionInformation => {
            let (value, fit) = interaction_information_in(dist, vars, &options.ipf, base)?;
            if !fit.converged {
                warnings.push(format!(
                    "ipf did not converge after {} cycles (max margin error {:e})",
                    fit.iterations, fit.max_margin_error
                ));
            }
            if options.explain {
                let margin = dist.marginal(vars)?;
                extra.insert("H_observed".to_string(), margin.entropy_in(base)?);
                extra.insert("H_fitted".to_string(), fit.fitted.entropy_in(base)?);
                extra.insert("ipf_iterations".to_string(), fit.iterations as f64);
                extra.insert("ipf_max_margin_error".to_string(), fit.max_margin_error);
            }
            value
        }
    };

    Ok(MeasureReport {
        measure_name: kind.token().to_string(),
        variables: vars.clone(),
        value,
        log_base: base,
        observation_count: dist.total_observations(),
        extra,
        warnings,
    })
}

fn explain_subset_entropies(
    dist: &JointDistribution,
    s: &VariableSet,
    base: f64,
    extra: &mut BTreeMap<String, f64>,
) -> Result<()> {
    let n = s.len();
    for mask in 1u32..(1 << n) as u32 {
        let members = s
            .members()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| v.clone());
        let subset = VariableSet::new(members)?;
        extra.insert(
            format!("H({})", subset.joined()),
            subset_entropy_in(dist, &subset, base)?,
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Alphabet;

    fn vid(name: &str) -> VariableId {
        VariableId::new(name).unwrap()
    }

    fn vset(names: &[&str]) -> VariableSet {
        VariableSet::from_names(names.iter().copied()).unwrap()
    }

    fn parity(n: usize) -> JointDistribution {
        crate::synth::parity(n).unwrap()
    }

    fn copy_triple() -> JointDistribution {
        crate::synth::copy_chain(3, 2).unwrap()
    }

    fn independent_pair() -> JointDistribution {
        crate::synth::independent_uniform(&[2, 2]).unwrap()
    }

    #[test]
    fn subset_entropy_on_parity() {
        let d = parity(3);
        assert_eq!(subset_entropy(&d, &vset(&["x", "y", "z"])).unwrap(), 2.0);
        assert_eq!(subset_entropy(&d, &vset(&["x", "y"])).unwrap(), 2.0);
        assert_eq!(subset_entropy(&d, &vset(&["x"])).unwrap(), 1.0);
        // Symmetric in the order of S.
        assert_eq!(
            subset_entropy(&d, &vset(&["z", "x"])).unwrap(),
            subset_entropy(&d, &vset(&["x", "z"])).unwrap()
        );
    }

    #[test]
    fn conditional_entropy_cases() {
        let copy2 = crate::synth::copy_chain(2, 2).unwrap();
        let names: Vec<&str> = vec!["x", "y"];
        assert_eq!(
            conditional_entropy(&copy2, &vset(&names[..1]), &vset(&names[1..])).unwrap(),
            0.0
        );
        let ind = independent_pair();
        assert_eq!(
            conditional_entropy(&ind, &vset(&["x"]), &vset(&["y"])).unwrap(),
            1.0
        );
        let d = parity(3);
        assert_eq!(
            conditional_entropy(&d, &vset(&["z"]), &vset(&["x", "y"])).unwrap(),
            0.0
        );
        assert_eq!(
            conditional_entropy(&d, &vset(&["z"]), &vset(&["x"])).unwrap(),
            1.0
        );
    }

    #[test]
    fn conditional_entropy_rejects_overlap() {
        let d = parity(3);
        let err = conditional_entropy(&d, &vset(&["x", "y"]), &vset(&["y"])).unwrap_err();
        assert!(matches!(err, Error::OverlappingSets(_)));
    }

    #[test]
    fn transmission2_cases() {
        let ind = independent_pair();
        assert_eq!(transmission2(&ind, &vid("x"), &vid("y")).unwrap(), 0.0);
        let copy2 = crate::synth::copy_chain(2, 2).unwrap();
        assert_eq!(transmission2(&copy2, &vid("x"), &vid("y")).unwrap(), 1.0);
        let d = parity(3);
        assert_eq!(transmission2(&d, &vid("x"), &vid("y")).unwrap(), 0.0);
        assert!(matches!(
            transmission2(&d, &vid("x"), &vid("x")),
            Err(Error::IdenticalVariables(_))
        ));
    }

    #[test]
    fn conditional_transmission_cases() {
        let d = parity(3);
        assert_eq!(
            conditional_transmission(&d, &vid("x"), &vid("y"), &vset(&["z"])).unwrap(),
            1.0
        );
        let copy3 = copy_triple();
        assert_eq!(
            conditional_transmission(&copy3, &vid("x"), &vid("y"), &vset(&["z"])).unwrap(),
            0.0
        );
        let ind = crate::synth::independent_uniform(&[2, 2, 2]).unwrap();
        assert_eq!(
            conditional_transmission(&ind, &vid("x"), &vid("y"), &vset(&["z"])).unwrap(),
            0.0
        );
    }

    #[test]
    fn transmission_n_parity_and_copy() {
        let d = parity(3);
        assert_eq!(transmission_n(&d, &vset(&["x", "y", "z"])).unwrap(), -1.0);
        let copy3 = copy_triple();
        assert_eq!(transmission_n(&copy3, &vset(&["x", "y", "z"])).unwrap(), 1.0);
        let d4 = parity(4);
        assert_eq!(
            transmission_n(&d4, &vset(&["x", "y", "z", "w"])).unwrap(),
            1.0
        );
    }

    #[test]
    fn transmission_n_degenerates_to_entropy() {
        let d = parity(3);
        assert_eq!(transmission_n(&d, &vset(&["x"])).unwrap(), 1.0);
    }

    #[test]
    fn q_measure_cases() {
        let coin = crate::synth::independent_uniform(&[2]).unwrap();
        let all = coin.variable_set();
        assert_eq!(q_measure(&coin, &all).unwrap(), -1.0);

        let ind = independent_pair();
        assert_eq!(q_measure(&ind, &vset(&["x", "y"])).unwrap(), 0.0);

        let d = parity(3);
        assert_eq!(q_measure(&d, &vset(&["x", "y", "z"])).unwrap(), 1.0);
    }

    #[test]
    fn excess_entropy_cases() {
        let copy2 = crate::synth::copy_chain(2, 2).unwrap();
        assert_eq!(excess_entropy(&copy2, &vset(&["x", "y"])).unwrap(), 3.0);
        let ind = independent_pair();
        assert_eq!(excess_entropy(&ind, &vset(&["x", "y"])).unwrap(), 2.0);
        let d = parity(3);
        assert_eq!(excess_entropy(&d, &vset(&["x", "y", "z"])).unwrap(), 2.0);
    }

    #[test]
    fn mutual_redundancy_sign_law_fixtures() {
        let copy2 = crate::synth::copy_chain(2, 2).unwrap();
        assert_eq!(mutual_redundancy(&copy2, &vset(&["x", "y"])).unwrap(), -1.0);
        let d3 = parity(3);
        assert_eq!(
            mutual_redundancy(&d3, &vset(&["x", "y", "z"])).unwrap(),
            -1.0
        );
        let d4 = parity(4);
        assert_eq!(
            mutual_redundancy(&d4, &vset(&["x", "y", "z", "w"])).unwrap(),
            -1.0
        );
    }

    #[test]
    fn mutual_redundancy_requires_two_variables() {
        let d = parity(3);
        assert!(matches!(
            mutual_redundancy(&d, &vset(&["x"])),
            Err(Error::ArityTooSmall { .. })
        ));
    }

    #[test]
    fn redundancy_fraction_cases() {
        let coin = crate::synth::independent_uniform(&[2]).unwrap();
        let all = coin.variable_set();
        assert_eq!(redundancy_fraction(&coin, &all).unwrap(), 0.0);

        let point = JointDistribution::from_counts(
            vec![Alphabet::binary(vid("x"))],
            vec![(vec![0], 5.0)],
        )
        .unwrap();
        assert_eq!(
            redundancy_fraction(&point, &vset(&["x"])).unwrap(),
            1.0
        );

        let biased = JointDistribution::from_counts(
            vec![Alphabet::binary(vid("x"))],
            vec![(vec![0], 1.0), (vec![1], 3.0)],
        )
        .unwrap();
        let f = redundancy_fraction(&biased, &vset(&["x"])).unwrap();
        assert!((f - 0.188_721_875_540_867_17).abs() < 1e-12);
    }

    #[test]
    fn redundancy_fraction_rejects_singleton_alphabets() {
        let point = JointDistribution::from_counts(
            vec![Alphabet::new(vid("x"), ["only"]).unwrap()],
            vec![(vec![0], 1.0)],
        )
        .unwrap();
        assert!(matches!(
            redundancy_fraction(&point, &vset(&["x"])),
            Err(Error::DegenerateAlphabet)
        ));
    }

    #[test]
    fn interaction_information_cases() {
        let opts = IpfOptions::default();
        let d = parity(3);
        let (v, fit) = interaction_information(&d, &vset(&["x", "y", "z"]), &opts).unwrap();
        assert!(fit.converged);
        assert!((v - 1.0).abs() < 1e-9);

        let ind = crate::synth::independent_uniform(&[2, 2, 2]).unwrap();
        let (v, _) = interaction_information(&ind, &ind.variable_set(), &opts).unwrap();
        assert!(v.abs() < 1e-9);

        let copy3 = copy_triple();
        let (v, _) = interaction_information(&copy3, &copy3.variable_set(), &opts).unwrap();
        assert!(v.abs() < 1e-9);
    }

    #[test]
    fn interaction_information_requires_three_variables() {
        let ind = independent_pair();
        assert!(matches!(
            interaction_information(&ind, &vset(&["x", "y"]), &IpfOptions::default()),
            Err(Error::ArityTooSmall { .. })
        ));
    }

    #[test]
    fn mcgill_identity_on_parity() {
        let d = parity(3);
        let t3 = transmission_n(&d, &vset(&["x", "y", "z"])).unwrap();
        let t2 = transmission2(&d, &vid("x"), &vid("y")).unwrap();
        let tc = conditional_transmission(&d, &vid("x"), &vid("y"), &vset(&["z"])).unwrap();
        assert!((t3 - (t2 - tc)).abs() < IDENTITY_TOLERANCE);
    }

    #[test]
    fn measure_report_carries_components() {
        let d = parity(3);
        let opts = MeasureOptions {
            explain: true,
            ..MeasureOptions::default()
        };
        let report = measure_report(
            &d,
            MeasureKind::Transmission,
            &vset(&["x", "y", "z"]),
            None,
            &opts,
        )
        .unwrap();
        assert_eq!(report.value, -1.0);
        assert_eq!(report.extra.len(), 7);
        // The components recombine to the value under the defining formula.
        let recombined = report.extra["H(x)"] + report.extra["H(y)"] + report.extra["H(z)"]
            - report.extra["H(x,y)"]
            - report.extra["H(x,z)"]
            - report.extra["H(y,z)"]
            + report.extra["H(x,y,z)"];
        assert!((recombined - report.value).abs() < IDENTITY_TOLERANCE);
    }

    #[test]
    fn measure_report_in_other_base() {
        let d = parity(3);
        let opts = MeasureOptions {
            base: 4.0,
            ..MeasureOptions::default()
        };
        let report = measure_report(
            &d,
            MeasureKind::Transmission,
            &vset(&["x", "y", "z"]),
            None,
            &opts,
        )
        .unwrap();
        assert!((report.value - (-0.5)).abs() < 1e-12);
        assert!(matches!(
            measure_report(
                &d,
                MeasureKind::Transmission,
                &vset(&["x"]),
                None,
                &MeasureOptions {
                    base: 1.0,
                    ..MeasureOptions::default()
                },
            ),
            Err(Error::InvalidBase(_))
        ));
    }

    #[test]
    fn tcond_report_requires_given() {
        let d = parity(3);
        let err = measure_report(
            &d,
            MeasureKind::ConditionalTransmission,
            &vset(&["x", "y"]),
            None,
            &MeasureOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::MissingConditioningSet(_)));
    }

    #[test]
    fn measure_kind_tokens_round_trip() {
        for kind in MeasureKind::ALL {
            assert_eq!(MeasureKind::parse(kind.token()).unwrap(), kind);
        }
        assert!(matches!(
            MeasureKind::parse("bogus"),
            Err(Error::UnknownMeasure(_))
        ));
    }
}
