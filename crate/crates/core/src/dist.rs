//! Finite-support distributions and the risk functionals computed on them.
//!
//! Everything here is pure: distributions are immutable once built, and the
//! operations (`convolve`, `dominant_shift`, `cvar_discrete`, ...) return
//! fresh values. Atom values are kept strictly increasing; duplicate values
//! are merged at construction time.

use crate::error::{Error, Result};

/// Absolute tolerance under which two atom values are considered equal and
/// merged into one.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// Tolerance on the total probability mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Default cap on the support size a convolution is allowed to produce.
/// Exceeding it is a signal to switch to the discretized algorithm rather
/// than a recoverable condition.
pub const DEFAULT_SUPPORT_CAP: usize = 5_000_000;

/// Risk level α ∈ (0, 1). The CVaR at level α averages the worst α-fraction
/// of outcomes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskLevel(f64);

impl RiskLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidParameter {
                what: "risk level",
                value: alpha,
            })
        }
    }

    #[inline]
    pub fn alpha(self) -> f64 {
        self.0
    }
}

/// One support point: a value carrying probability mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub mass: f64,
}

/// Finite-support probability distribution.
///
/// Invariants: values are finite and strictly increasing, masses are
/// positive and sum to one within [`MASS_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<Atom>,
}

impl DiscreteDistribution {
    /// Build a distribution from `(value, mass)` pairs. Pairs are sorted,
    /// values within [`MERGE_TOLERANCE`] of each other are merged, and
    /// zero-mass entries are dropped.
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().collect();
        for &(v, m) in &pairs {
            if !v.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "non-finite atom value {v}"
                )));
            }
            if !m.is_finite() || m < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "invalid mass {m} at value {v}"
                )));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let atoms = merge_sorted(pairs);
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.mass).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        Ok(Self { atoms })
    }

    /// Degenerate distribution with all mass at `value`.
    pub fn point_mass(value: f64) -> Self {
        assert!(value.is_finite(), "point mass value must be finite");
        Self {
            atoms: vec![Atom { value, mass: 1.0 }],
        }
    }

    /// Two-point distribution on {0, 1} with P(1) = `p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter {
                what: "bernoulli parameter",
                value: p,
            });
        }
        Self::new([(0.0, 1.0 - p), (1.0, p)])
    }

    /// Internal constructor for atoms already sorted, merged and validated
    /// by the caller.
    pub(crate) fn from_merged(atoms: Vec<Atom>) -> Self {
        debug_assert!(!atoms.is_empty());
        debug_assert!(atoms.windows(2).all(|w| w[0].value < w[1].value));
        debug_assert!({
            let total: f64 = atoms.iter().map(|a| a.mass).sum();
            (total - 1.0).abs() <= MASS_TOLERANCE
        });
        Self { atoms }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    pub fn min_value(&self) -> f64 {
        self.atoms[0].value
    }

    pub fn max_value(&self) -> f64 {
        self.atoms[self.atoms.len() - 1].value
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.mass).sum()
    }

    /// Cumulative distribution function at `x` (right-continuous).
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.value <= x)
            .map(|a| a.mass)
            .sum()
    }
}

/// Merge a value-sorted pair list into atoms, combining values closer than
/// [`MERGE_TOLERANCE`] (the smallest value of a merged run is kept) and
/// dropping zero masses.
fn merge_sorted(pairs: Vec<(f64, f64)>) -> Vec<Atom> {
    let mut atoms: Vec<Atom> = Vec::with_capacity(pairs.len().min(1024));
    for (value, mass) in pairs {
        match atoms.last_mut() {
            Some(last) if value - last.value <= MERGE_TOLERANCE => last.mass += mass,
            _ => {
                if mass > 0.0 {
                    atoms.push(Atom { value, mass });
                }
            }
        }
    }
    atoms.retain(|a| a.mass > 0.0);
    atoms
}

/// Empirical distribution of a sample set: one atom per distinct value with
/// mass `multiplicity / n`.
pub fn empirical_distribution(samples: &[f64]) -> Result<DiscreteDistribution> {
    if samples.is_empty() {
        return Err(Error::NoSamples);
    }
    let n = samples.len() as f64;
    DiscreteDistribution::new(samples.iter().map(|&v| (v, 1.0 / n)))
}

/// Value-at-Risk: the smallest support point whose cumulative mass reaches α.
pub fn var_discrete(dist: &DiscreteDistribution, alpha: RiskLevel) -> f64 {
    let a = alpha.alpha();
    let mut cum = 0.0;
    for atom in dist.atoms() {
        cum += atom.mass;
        if cum >= a {
            return atom.value;
        }
    }
    // Total mass may fall short of α by the construction tolerance.
    dist.max_value()
}

/// CVaR of a discrete distribution:
///
/// ```text
/// CVaR_α(X) = (1/α) [ Σ_{x ≤ x_α} x f(x) − (Σ_{x ≤ x_α} f(x) − α) x_α ]
/// ```
///
/// where `x_α` is the VaR. The correction term removes the part of the mass
/// at `x_α` that exceeds the α cutoff, so CVaR interpolates continuously
/// between atoms as α varies.
pub fn cvar_discrete(dist: &DiscreteDistribution, alpha: RiskLevel) -> f64 {
    let a = alpha.alpha();
    let mut cum = 0.0;
    let mut acc = 0.0;
    for atom in dist.atoms() {
        cum += atom.mass;
        acc += atom.value * atom.mass;
        if cum >= a {
            return (acc - (cum - a) * atom.value) / a;
        }
    }
    let last = dist.max_value();
    (acc - (cum - a) * last) / a
}

/// Distribution of the sum of two independent variables. Every pairwise
/// value sum appears with the product of the masses; equal sums merge.
pub fn convolve(
    d1: &DiscreteDistribution,
    d2: &DiscreteDistribution,
) -> Result<DiscreteDistribution> {
    convolve_with_cap(d1, d2, DEFAULT_SUPPORT_CAP)
}

/// [`convolve`] with an explicit support cap. The pre-merge pair count is
/// what gets allocated, so the cap is enforced on it.
pub fn convolve_with_cap(
    d1: &DiscreteDistribution,
    d2: &DiscreteDistribution,
    cap: usize,
) -> Result<DiscreteDistribution> {
    let size = d1.support_size() * d2.support_size();
    if size > cap {
        return Err(Error::SupportExplosion { size, cap });
    }
    let mut sums: Vec<(f64, f64)> = Vec::with_capacity(size);
    for a1 in d1.atoms() {
        for a2 in d2.atoms() {
            sums.push((a1.value + a2.value, a1.mass * a2.mass));
        }
    }
    sums.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(DiscreteDistribution::from_merged(merge_sorted(sums)))
}

/// Left fold of [`convolve`] over a non-empty list.
pub fn convolve_many(dists: &[DiscreteDistribution]) -> Result<DiscreteDistribution> {
    convolve_many_with_cap(dists, DEFAULT_SUPPORT_CAP)
}

pub fn convolve_many_with_cap(
    dists: &[DiscreteDistribution],
    cap: usize,
) -> Result<DiscreteDistribution> {
    let (first, rest) = dists.split_first().ok_or(Error::Empty {
        what: "distribution list",
    })?;
    let mut acc = first.clone();
    for d in rest {
        acc = convolve_with_cap(&acc, d, cap)?;
    }
    Ok(acc)
}

/// Shift an empirical CDF down by `c` and pile the removed mass onto the
/// known upper bound of the support:
///
/// ```text
/// G(x) = max(F(x) − c, 0)  for x < upper_bound,   G(upper_bound) = 1.
/// ```
///
/// The result first-order stochastically dominates the input, which makes
/// its CVaR an optimistic estimate of the input's CVaR.
pub fn dominant_shift(
    empirical: &DiscreteDistribution,
    c: f64,
    upper_bound: f64,
) -> Result<DiscreteDistribution> {
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidParameter {
            what: "shift constant",
            value: c,
        });
    }
    if !upper_bound.is_finite() || empirical.max_value() > upper_bound {
        return Err(Error::InvalidParameter {
            what: "upper bound (must dominate the support)",
            value: upper_bound,
        });
    }
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(empirical.support_size() + 1);
    let mut cum = 0.0;
    let mut prev_shifted = 0.0;
    for atom in empirical.atoms() {
        if atom.value >= upper_bound {
            break;
        }
        cum += atom.mass;
        let shifted = (cum - c).max(0.0);
        let mass = shifted - prev_shifted;
        prev_shifted = shifted;
        if mass > 0.0 {
            out.push((atom.value, mass));
        }
    }
    let deficit = 1.0 - prev_shifted;
    if deficit > 0.0 {
        out.push((upper_bound, deficit));
    }
    DiscreteDistribution::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(pairs: &[(f64, f64)]) -> DiscreteDistribution {
        DiscreteDistribution::new(pairs.iter().copied()).unwrap()
    }

    fn risk(a: f64) -> RiskLevel {
        RiskLevel::new(a).unwrap()
    }

    #[test]
    fn construction_merges_and_sorts() {
        let d = dist(&[(1.0, 0.25), (0.5, 0.5), (1.0, 0.25)]);
        assert_eq!(d.support_size(), 2);
        assert_eq!(d.atoms()[0].value, 0.5);
        assert_eq!(d.atoms()[1].value, 1.0);
        assert!((d.atoms()[1].mass - 0.5).abs() < 1e-15);
    }

    #[test]
    fn construction_rejects_bad_mass() {
        assert!(DiscreteDistribution::new([(0.0, 0.5), (1.0, 0.6)]).is_err());
        assert!(DiscreteDistribution::new([(0.0, -0.1), (1.0, 1.1)]).is_err());
        assert!(DiscreteDistribution::new([(f64::NAN, 1.0)]).is_err());
        assert!(DiscreteDistribution::new(std::iter::empty()).is_err());
    }

    #[test]
    fn empirical_counts_multiplicities() {
        let d = empirical_distribution(&[0.5, 0.5, 1.0]).unwrap();
        assert_eq!(d.support_size(), 2);
        assert!((d.atoms()[0].mass - 2.0 / 3.0).abs() < 1e-15);
        assert!((d.atoms()[1].mass - 1.0 / 3.0).abs() < 1e-15);

        let single = empirical_distribution(&[0.7]).unwrap();
        assert_eq!(single.atoms(), &[Atom { value: 0.7, mass: 1.0 }]);

        assert!(matches!(
            empirical_distribution(&[]),
            Err(Error::NoSamples)
        ));
    }

    #[test]
    fn var_scans_cumulative_mass() {
        let d = dist(&[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(var_discrete(&d, risk(0.5)), 0.0);
        assert_eq!(var_discrete(&d, risk(0.75)), 1.0);

        let d = dist(&[(0.2, 0.1), (0.4, 0.3), (0.9, 0.6)]);
        assert_eq!(var_discrete(&d, risk(0.35)), 0.4);
    }

    #[test]
    fn cvar_matches_hand_computed_values() {
        let d = dist(&[(0.0, 0.5), (1.0, 0.5)]);
        // α = 0.5: tail is exactly the mass at 0.
        assert!((cvar_discrete(&d, risk(0.5)) - 0.0).abs() < 1e-15);
        // α = 0.75: (1/0.75)(0.5 − 0.25·1) = 1/3.
        assert!((cvar_discrete(&d, risk(0.75)) - 1.0 / 3.0).abs() < 1e-15);

        let p = DiscreteDistribution::point_mass(2.5);
        for a in [0.01, 0.5, 0.99] {
            assert_eq!(cvar_discrete(&p, risk(a)), 2.5);
        }
    }

    #[test]
    fn cvar_tends_to_mean_as_alpha_tends_to_one() {
        let d = dist(&[(0.1, 0.2), (0.3, 0.3), (0.7, 0.4), (1.0, 0.1)]);
        let c = cvar_discrete(&d, risk(1.0 - 1e-12));
        assert!((c - d.mean()).abs() < 1e-6);
    }

    #[test]
    fn convolve_bernoulli_pair() {
        let b = dist(&[(0.0, 0.5), (1.0, 0.5)]);
        let s = convolve(&b, &b).unwrap();
        assert_eq!(s.support_size(), 3);
        assert!((s.atoms()[0].mass - 0.25).abs() < 1e-15);
        assert!((s.atoms()[1].mass - 0.5).abs() < 1e-15);
        assert!((s.atoms()[2].mass - 0.25).abs() < 1e-15);
    }

    #[test]
    fn convolve_identity_element() {
        let d = dist(&[(0.1, 0.3), (0.4, 0.7)]);
        let id = DiscreteDistribution::point_mass(0.0);
        let out = convolve(&d, &id).unwrap();
        assert_eq!(out, d);
    }

    #[test]
    fn convolve_respects_cap() {
        let d = dist(&[(0.0, 0.25), (0.3, 0.25), (0.6, 0.25), (0.9, 0.25)]);
        match convolve_with_cap(&d, &d, 15) {
            Err(Error::SupportExplosion { size: 16, cap: 15 }) => {}
            other => panic!("expected support explosion, got {other:?}"),
        }
    }

    #[test]
    fn convolve_many_binomial() {
        let b = dist(&[(0.0, 0.5), (1.0, 0.5)]);
        let s = convolve_many(&[b.clone(), b.clone(), b]).unwrap();
        let expected = [1.0 / 8.0, 3.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0];
        assert_eq!(s.support_size(), 4);
        for (atom, e) in s.atoms().iter().zip(expected) {
            assert!((atom.mass - e).abs() < 1e-12);
        }

        let single = convolve_many(std::slice::from_ref(&s)).unwrap();
        assert_eq!(single, s);
    }

    #[test]
    fn convolve_many_order_independent() {
        let d1 = dist(&[(0.1, 0.5), (0.9, 0.5)]);
        let d2 = dist(&[(0.2, 0.3), (0.5, 0.7)]);
        let d3 = dist(&[(0.0, 0.6), (1.0, 0.4)]);
        let a = convolve_many(&[d1.clone(), d2.clone(), d3.clone()]).unwrap();
        let b = convolve_many(&[d3, d1, d2]).unwrap();
        assert_eq!(a.support_size(), b.support_size());
        for (x, y) in a.atoms().iter().zip(b.atoms()) {
            assert!((x.value - y.value).abs() < 1e-9);
            assert!((x.mass - y.mass).abs() < 1e-9);
        }
    }

    #[test]
    fn dominant_shift_point_mass() {
        let d = DiscreteDistribution::point_mass(0.5);
        let g = dominant_shift(&d, 0.3, 1.0).unwrap();
        assert_eq!(g.support_size(), 2);
        assert!((g.atoms()[0].value - 0.5).abs() < 1e-15);
        assert!((g.atoms()[0].mass - 0.7).abs() < 1e-15);
        assert!((g.atoms()[1].value - 1.0).abs() < 1e-15);
        assert!((g.atoms()[1].mass - 0.3).abs() < 1e-15);
    }

    #[test]
    fn dominant_shift_zero_is_identity() {
        let d = dist(&[(0.2, 0.5), (0.6, 0.3), (1.0, 0.2)]);
        let g = dominant_shift(&d, 0.0, 1.0).unwrap();
        assert_eq!(g, d);
    }

    #[test]
    fn dominant_shift_crushes_low_atoms() {
        let d = dist(&[(0.2, 0.5), (0.6, 0.5)]);
        let g = dominant_shift(&d, 0.6, 1.0).unwrap();
        assert_eq!(g.support_size(), 2);
        assert!((g.atoms()[0].value - 0.6).abs() < 1e-15);
        assert!((g.atoms()[0].mass - 0.4).abs() < 1e-15);
        assert!((g.atoms()[1].value - 1.0).abs() < 1e-15);
        assert!((g.atoms()[1].mass - 0.6).abs() < 1e-15);
    }

    #[test]
    fn dominant_shift_saturates_to_upper_bound() {
        let d = dist(&[(0.2, 0.5), (0.6, 0.5)]);
        let g = dominant_shift(&d, 1.0, 1.0).unwrap();
        assert_eq!(g.atoms(), &[Atom { value: 1.0, mass: 1.0 }]);
        let g = dominant_shift(&d, 7.5, 1.0).unwrap();
        assert_eq!(g.atoms(), &[Atom { value: 1.0, mass: 1.0 }]);
    }

    #[test]
    fn dominant_shift_dominates_pointwise() {
        let d = dist(&[(0.1, 0.25), (0.3, 0.25), (0.55, 0.25), (0.8, 0.25)]);
        let g = dominant_shift(&d, 0.17, 1.0).unwrap();
        for atom in d.atoms() {
            assert!(g.cdf(atom.value) <= d.cdf(atom.value) + 1e-15);
        }
    }
}
