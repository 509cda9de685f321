//! Weighted shifts: σ(i) = i + 1 on ℤ or ℤ₊ with μ({i}) = ν_i.
//!
//! Sets are finite windows (sorted integer sets) or d-periodic sets given by
//! residues. With φ = σ, φ^{-k}(A) = A − k and φ^k(A) = A + k, intersected
//! with the index set.

use std::collections::BTreeSet;

use crate::scalar::Scalar;
use crate::spec::{IndexSet, ShiftSpec, ShiftWeights};

/// Finite subset of the index set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WindowSet(pub BTreeSet<i64>);

impl WindowSet {
    pub fn interval(lo: i64, hi: i64) -> Self {
        WindowSet((lo..=hi).collect())
    }

    pub fn contains(&self, x: i64) -> bool {
        self.0.contains(&x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<i64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.0.last().copied()
    }

    /// A + k, dropping points outside the index set.
    pub fn translate(&self, k: i64, index: IndexSet) -> Self {
        WindowSet(self.0.iter().map(|x| x + k).filter(|&x| index == IndexSet::Z || x >= 0).collect())
    }

    pub fn union(&self, other: &Self) -> Self {
        WindowSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        WindowSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn restrict(&self, lo: i64, hi: i64) -> Self {
        WindowSet(self.0.range(lo..=hi).copied().collect())
    }

    pub fn measure<S: Scalar>(&self, spec: &ShiftSpec) -> S {
        self.0.iter().fold(S::zero(), |s, &x| s + spec.nu::<S>(x))
    }
}

/// {x in the index set : x mod d ∈ residues}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicSet {
    pub period: u64,
    pub residues: BTreeSet<u64>,
    pub index: IndexSet,
}

impl PeriodicSet {
    /// ⋃_l (A + l d) over the index set.
    pub fn generated(a: &WindowSet, period: u64, index: IndexSet) -> Self {
        let d = period as i64;
        PeriodicSet { period, residues: a.0.iter().map(|x| x.rem_euclid(d) as u64).collect(), index }
    }

    pub fn contains(&self, x: i64) -> bool {
        (self.index == IndexSet::Z || x >= 0) && self.residues.contains(&(x.rem_euclid(self.period as i64) as u64))
    }

    /// Membership in φ^{-k}(B) = B − k: x + k ∈ B.
    pub fn contains_preimage(&self, x: i64, k: i64) -> bool {
        (self.index == IndexSet::Z || x >= 0) && self.contains(x + k)
    }

    /// μ(B − k) for geometric weights ν_i = b^|i|, b < 1, as a closed-form
    /// sum of geometric series over each residue class. Other weights: None.
    pub fn preimage_measure<S: Scalar>(&self, spec: &ShiftSpec, k: i64) -> Option<S> {
        let ShiftWeights::Geometric { base } = &spec.weights else { return None };
        let b = S::from_rational(base);
        if b >= S::one() {
            return None;
        }
        let d = self.period as i64;
        let bd = b.pow(self.period as u32);
        let denom = S::one() - bd;
        let mut total = S::zero();
        for &r in &self.residues {
            // points x with x + k ≡ r, written x = s + l d with s ∈ ⟦0, d−1⟧
            let s = (r as i64 - k).rem_euclid(d) as u32;
            // x = s + l d for l ≥ 0
            total += b.pow(s) / denom.clone();
            if self.index == IndexSet::Z {
                // x = s − l d for l ≥ 1, |x| = l d − s
                total += b.pow(self.period as u32 - s) / denom.clone();
            }
        }
        Some(total)
    }

    /// B ∩ ⟦lo, hi⟧.
    pub fn window(&self, lo: i64, hi: i64) -> WindowSet {
        WindowSet((lo..=hi).filter(|&x| self.contains(x)).collect())
    }
}

/// ν_{i+n} ν_{i−n} for |i| ≤ window (inside the index set) and 1 ≤ n ≤ n_max.
pub fn salas_products<S: Scalar>(s: &ShiftSpec, window: i64, n_max: u64) -> Vec<(i64, u64, S)> {
    let mut out = Vec::new();
    for i in -window..=window {
        if !s.contains(i) {
            continue;
        }
        for n in 1..=n_max as i64 {
            out.push((i, n as u64, s.nu::<S>(i + n) * s.nu::<S>(i - n)));
        }
    }
    out
}

/// Total mass Σ ν_i in closed form for geometric weights with b < 1.
pub fn total_mass<S: Scalar>(s: &ShiftSpec) -> Option<S> {
    let ShiftWeights::Geometric { base } = &s.weights else { return None };
    let b = S::from_rational(base);
    if b >= S::one() {
        return None;
    }
    let half = S::one() / (S::one() - b.clone());
    Some(match s.index {
        IndexSet::ZPlus => half,
        IndexSet::Z => half.clone() + half - S::one(),
    })
}

/// sup_i ν_i / ν_{i+1}.
pub fn ratio_bound(s: &ShiftSpec) -> f64 {
    match &s.weights {
        ShiftWeights::Geometric { base } => {
            let b = crate::scalar::rational_to_f64(base);
            if s.index == IndexSet::ZPlus {
                1.0 / b
            } else {
                b.max(1.0 / b)
            }
        }
        ShiftWeights::Polynomial { power } => 2f64.powi(*power as i32),
    }
}
