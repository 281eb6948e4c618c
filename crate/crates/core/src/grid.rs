//! ε-grid round-up discretization.
//!
//! Rounding every atom up to the next multiple of ε yields a distribution
//! that dominates the original and whose support stays on a fixed grid, so
//! convolving many of them cannot blow up the support size. Grid atoms are
//! stored as integer indices; sums of indices merge exactly, with the value
//! reconstructed as `index × ε` only at the end.

use crate::dist::{Atom, DiscreteDistribution};
use crate::error::{Error, Result};

/// Distribution supported on integer multiples of a fixed step.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDistribution {
    step: f64,
    /// (grid index, mass), sorted by index.
    atoms: Vec<(i64, f64)>,
}

impl GridDistribution {
    /// Snap `dist` onto the grid by rounding every value up to the smallest
    /// multiple of `step` that is at least the value.
    pub fn round_up(dist: &DiscreteDistribution, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter {
                what: "grid step",
                value: step,
            });
        }
        let mut atoms: Vec<(i64, f64)> = Vec::with_capacity(dist.support_size());
        for atom in dist.atoms() {
            let idx = ceil_index(atom.value, step);
            match atoms.last_mut() {
                Some(last) if last.0 == idx => last.1 += atom.mass,
                _ => atoms.push((idx, atom.mass)),
            }
        }
        Ok(Self { step, atoms })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn support_size(&self) -> usize {
        self.atoms.len()
    }

    /// Sum of two independent grid variables. Index sums merge exactly.
    pub fn convolve(&self, other: &Self) -> Self {
        assert!(
            self.step == other.step,
            "grid steps differ: {} vs {}",
            self.step,
            other.step
        );
        let mut sums: Vec<(i64, f64)> =
            Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for &(i1, m1) in &self.atoms {
            for &(i2, m2) in &other.atoms {
                sums.push((i1 + i2, m1 * m2));
            }
        }
        sums.sort_by_key(|&(i, _)| i);
        let mut atoms: Vec<(i64, f64)> = Vec::with_capacity(sums.len());
        for (idx, mass) in sums {
            match atoms.last_mut() {
                Some(last) if last.0 == idx => last.1 += mass,
                _ => atoms.push((idx, mass)),
            }
        }
        Self {
            step: self.step,
            atoms,
        }
    }

    /// Materialize grid atoms as an ordinary distribution with values
    /// `index × step`.
    pub fn to_distribution(&self) -> DiscreteDistribution {
        DiscreteDistribution::from_merged(
            self.atoms
                .iter()
                .map(|&(idx, mass)| Atom {
                    value: idx as f64 * self.step,
                    mass,
                })
                .collect(),
        )
    }
}

/// The grid point a single value rounds up to: `⌈value/step⌉ · step`.
pub fn round_up_value(value: f64, step: f64) -> f64 {
    assert!(step.is_finite() && step > 0.0, "grid step must be positive");
    ceil_index(value, step) as f64 * step
}

/// Smallest integer k with `k·step ≥ value`, evaluated against the f64
/// products that will actually be stored so the round-up direction survives
/// floating point.
fn ceil_index(value: f64, step: f64) -> i64 {
    let mut idx = (value / step).ceil() as i64;
    while (idx - 1) as f64 * step >= value {
        idx -= 1;
    }
    while (idx as f64) * step < value {
        idx += 1;
    }
    idx
}

/// Round every atom of `dist` up to the ε-grid. The output dominates the
/// input, each atom moves right by less than ε, and the CVaR rises by at
/// most ε/α.
pub fn discretize_up(dist: &DiscreteDistribution, epsilon: f64) -> Result<DiscreteDistribution> {
    Ok(GridDistribution::round_up(dist, epsilon)?.to_distribution())
}
