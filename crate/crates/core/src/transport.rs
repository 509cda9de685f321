//! Transport of product sets without enumerating cells.
//!
//! For the odometer, 𝔬^k(x) restricted to N coordinates is x ⊞ (k mod M_{N+1})
//! with carries; a left-to-right pass tracking one carry bit per shifted
//! copy gives the exact measure of any boolean combination of preimages
//! φ^{-k_j}(S_j). The translation is the same pass with carries disabled.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{coordinates, TruncatedSpace};
use crate::spec::{MapKind, SystemSpec};

#[derive(Debug, Clone)]
pub struct ProductView<S: Scalar> {
    pub kind: MapKind,
    pub radices: Vec<u64>,
    pub coords: Vec<Vec<S>>,
}

/// Up to this many simultaneous shifted copies.
pub const MAX_TERMS: usize = 4;

impl<S: Scalar> ProductView<S> {
    pub fn new(spec: &SystemSpec, depth: usize) -> Result<Self> {
        Ok(ProductView { kind: spec.kind, radices: spec.radices(depth)?, coords: coordinates(spec, depth)? })
    }

    pub fn from_space(space: &TruncatedSpace<S>) -> Self {
        ProductView { kind: space.kind, radices: space.radix.radices().to_vec(), coords: space.coords.clone() }
    }

    pub fn depth(&self) -> usize {
        self.radices.len()
    }

    /// Digit added at each coordinate by φ^k.
    pub fn shift_digits(&self, k: &BigInt) -> Vec<u64> {
        match self.kind {
            MapKind::Odometer => {
                let total: BigUint = self.radices.iter().map(|&m| BigUint::from(m)).product();
                let r = k.mod_floor(&BigInt::from(total)).to_biguint().unwrap_or_default();
                let mut r = r;
                self.radices
                    .iter()
                    .map(|&m| {
                        let (q, d) = r.div_rem(&BigUint::from(m));
                        r = q;
                        d.to_u64().unwrap_or(0)
                    })
                    .collect()
            }
            MapKind::Translation => self
                .radices
                .iter()
                .map(|&m| k.mod_floor(&BigInt::from(m)).to_u64().unwrap_or(0))
                .collect(),
        }
    }

    /// μ{x : pred(bits)} where bit j says φ^{k_j}(x) ∈ S_j. Masks shorter
    /// than the view are padded with full coordinates.
    pub fn boolean_measure(&self, terms: &[(BigInt, &[Vec<bool>])], pred: impl Fn(u32) -> bool) -> Result<S> {
        let r = terms.len();
        if r == 0 || r > MAX_TERMS {
            return Err(Error::Domain(format!("between 1 and {MAX_TERMS} terms supported")));
        }
        if terms.iter().any(|(_, masks)| masks.len() > self.depth()) {
            return Err(Error::Domain("set deeper than the view".into()));
        }
        let digits: Vec<Vec<u64>> = terms.iter().map(|(k, _)| self.shift_digits(k)).collect();
        let carries = self.kind == MapKind::Odometer;
        let full = (1u32 << r) - 1;
        let nstates = 1usize << (2 * r);
        // state = carries | flags << r
        let mut prob = vec![S::zero(); nstates];
        prob[(full << r) as usize] = S::one();
        for i in 0..self.depth() {
            let m = self.radices[i];
            let mu = &self.coords[i];
            // without carries an unconstrained coordinate integrates to 1
            if !carries && terms.iter().all(|(_, masks)| masks.get(i).map_or(true, |mk| mk.iter().all(|b| *b))) {
                continue;
            }
            // aggregated weight per (carry in, carry out, membership pattern)
            let mut table = vec![S::zero(); 1 << (3 * r)];
            let carry_ins = if carries { 1u32 << r } else { 1 };
            for cin in 0..carry_ins {
                for x in 0..m {
                    let mut cout = 0u32;
                    let mut pattern = 0u32;
                    for (j, (_, masks)) in terms.iter().enumerate() {
                        let t = x + digits[j][i] + ((cin >> j) & 1) as u64;
                        let y = t % m;
                        if carries && t >= m {
                            cout |= 1 << j;
                        }
                        let inside = masks.get(i).map_or(true, |mask| mask[y as usize]);
                        if inside {
                            pattern |= 1 << j;
                        }
                    }
                    let slot = (cin | cout << r | pattern << (2 * r)) as usize;
                    table[slot] += mu[x as usize].clone();
                }
            }
            let mut next = vec![S::zero(); nstates];
            for (state, p) in prob.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let cin = state as u32 & full;
                let flags = (state as u32) >> r;
                for cout in 0..carry_ins {
                    for pattern in 0..=full {
                        let w = &table[(cin | cout << r | pattern << (2 * r)) as usize];
                        if w.is_zero() {
                            continue;
                        }
                        let ns = (cout | (flags & pattern) << r) as usize;
                        next[ns] += p.clone() * w.clone();
                    }
                }
            }
            prob = next;
        }
        let mut total = S::zero();
        for (state, p) in prob.into_iter().enumerate() {
            if pred((state as u32) >> r) {
                total += p;
            }
        }
        Ok(total)
    }

    /// μ(φ^{-k}(S)).
    pub fn preimage_measure(&self, masks: &[Vec<bool>], k: &BigInt) -> Result<S> {
        self.boolean_measure(&[(k.clone(), masks)], |b| b & 1 == 1)
    }

    /// μ(φ^k(S)).
    pub fn forward_image_measure(&self, masks: &[Vec<bool>], k: &BigInt) -> Result<S> {
        self.boolean_measure(&[(-k.clone(), masks)], |b| b & 1 == 1)
    }

    /// μ(φ^{-a}(S) ∩ φ^{-b}(T)).
    pub fn joint_preimage_measure(&self, s: &[Vec<bool>], a: &BigInt, t: &[Vec<bool>], b: &BigInt) -> Result<S> {
        self.boolean_measure(&[(a.clone(), s), (b.clone(), t)], |bits| bits == 3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::preimage_measure;
    use crate::scalar::{rat, Rational};
    use crate::space::{build_truncation, DepthSet, DEFAULT_CAP};
    use crate::spec::{Alphabet, Measure, Repeat};

    fn spec(kind: MapKind) -> SystemSpec {
        SystemSpec::new(
            kind,
            Alphabet::List { list: vec![2, 3, 2, 4], repeat: Repeat::Cycle },
            Measure::List {
                weights: vec![
                    vec![rat(1, 3), rat(2, 3)],
                    vec![rat(1, 2), rat(1, 3), rat(1, 6)],
                    vec![rat(3, 4), rat(1, 4)],
                    vec![rat(1, 10), rat(2, 10), rat(3, 10), rat(4, 10)],
                ],
                repeat: Repeat::Cycle,
            },
        )
    }

    #[test]
    fn product_transport_matches_cell_permutation() {
        for kind in [MapKind::Odometer, MapKind::Translation] {
            let s = spec(kind);
            let space = build_truncation::<Rational>(&s, 4, DEFAULT_CAP).unwrap();
            let view = ProductView::from_space(&space);
            let set = DepthSet::from_symbols(&[2, 3, 2, 4], &[vec![1], vec![0, 2], vec![0, 1], vec![1, 3]]);
            let DepthSet::Product(masks) = &set else { unreachable!() };
            for k in -60i64..60 {
                let big = BigInt::from(k);
                let (a, b) = (view.preimage_measure(masks, &big).unwrap(), preimage_measure(&space, &set, k as i128)); assert_eq!(a, b, "kind {kind:?} k {k}");
            }
        }
    }

    #[test]
    fn forward_image_inverts_preimage() {
        let s = spec(MapKind::Odometer);
        let view = ProductView::<Rational>::new(&s, 4).unwrap();
        let masks = vec![vec![true, false], vec![true, true, false]];
        for k in 0..48 {
            let k = BigInt::from(k);
            assert_eq!(view.forward_image_measure(&masks, &k).unwrap(), view.preimage_measure(&masks, &-k.clone()).unwrap());
        }
    }
}
