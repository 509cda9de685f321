//! Truncations Ω_{|N}, cylinder-determined sets and simple functions.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spec::{MapKind, SystemSpec};

pub const DEFAULT_CAP: u64 = 1 << 24;

/// Little-endian mixed radix: coordinate 1 varies fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Radix {
    radices: Vec<u64>,
    places: Vec<u64>,
}

impl Radix {
    pub fn new(radices: Vec<u64>, cap: u64) -> Result<Self> {
        let mut places = vec![1u64];
        let mut total: u128 = 1;
        for &m in &radices {
            total *= m as u128;
            if total > cap as u128 {
                // report the full size, saturating
                let full = radices.iter().fold(1u128, |a, &m| a.saturating_mul(m as u128));
                return Err(Error::CapExceeded { cells: full, cap });
            }
            places.push(total as u64);
        }
        Ok(Radix { radices, places })
    }

    pub fn depth(&self) -> usize {
        self.radices.len()
    }

    pub fn radices(&self) -> &[u64] {
        &self.radices
    }

    /// M_1, …, M_{N+1}
    pub fn places(&self) -> &[u64] {
        &self.places
    }

    pub fn cells(&self) -> u64 {
        self.places[self.depth()]
    }

    pub fn encode(&self, digits: &[u64]) -> u64 {
        digits.iter().zip(&self.places).map(|(d, p)| d * p).sum()
    }

    pub fn decode(&self, mut idx: u64) -> Vec<u64> {
        self.radices
            .iter()
            .map(|&m| {
                let d = idx % m;
                idx /= m;
                d
            })
            .collect()
    }

    /// Digit of coordinate `i` (0-based).
    pub fn digit(&self, idx: u64, i: usize) -> u64 {
        (idx / self.places[i]) % self.radices[i]
    }
}

/// Per-coordinate weight vectors μ_1, …, μ_N.
pub fn coordinates<S: Scalar>(spec: &SystemSpec, n: usize) -> Result<Vec<Vec<S>>> {
    (1..=n).map(|i| spec.weights(i)).collect()
}

#[derive(Debug, Clone)]
pub struct TruncatedSpace<S: Scalar> {
    pub kind: MapKind,
    pub radix: Radix,
    pub coords: Vec<Vec<S>>,
    pub cell_measure: Vec<S>,
}

pub fn build_truncation<S: Scalar>(spec: &SystemSpec, depth: usize, cap: u64) -> Result<TruncatedSpace<S>> {
    if depth == 0 {
        return Err(Error::InvalidSpec("depth must be at least 1".into()));
    }
    let radix = Radix::new(spec.radices(depth)?, cap)?;
    let coords = coordinates::<S>(spec, depth)?;
    Ok(TruncatedSpace::from_parts(spec.kind, radix, coords))
}

impl<S: Scalar> TruncatedSpace<S> {
    pub fn from_parts(kind: MapKind, radix: Radix, coords: Vec<Vec<S>>) -> Self {
        let mut cells = vec![S::one()];
        for mu in &coords {
            let mut next = Vec::with_capacity(cells.len() * mu.len());
            for w in mu {
                next.extend(cells.iter().map(|c| c.clone() * w.clone()));
            }
            cells = next;
        }
        TruncatedSpace { kind, radix, coords, cell_measure: cells }
    }

    pub fn depth(&self) -> usize {
        self.radix.depth()
    }

    pub fn cells(&self) -> u64 {
        self.radix.cells()
    }

    pub fn total(&self) -> S {
        let mut s = S::zero();
        for c in &self.cell_measure {
            s += c.clone();
        }
        s
    }

    /// Membership vector over cells.
    pub fn members(&self, set: &DepthSet) -> Vec<bool> {
        assert_eq!(set.depth(), self.depth(), "set depth must match the truncation");
        match set {
            DepthSet::Cells { members, .. } => members.clone(),
            DepthSet::Product(masks) => (0..self.cells()).map(|c| set_contains_product(masks, &self.radix, c)).collect(),
        }
    }

    pub fn measure(&self, set: &DepthSet) -> S {
        match set {
            DepthSet::Product(masks) => product_measure(&self.coords, masks),
            DepthSet::Cells { members, .. } => {
                let mut s = S::zero();
                for (c, inside) in members.iter().enumerate() {
                    if *inside {
                        s += self.cell_measure[c].clone();
                    }
                }
                s
            }
        }
    }
}

fn set_contains_product(masks: &[Vec<bool>], radix: &Radix, cell: u64) -> bool {
    masks.iter().enumerate().all(|(i, mask)| mask[radix.digit(cell, i) as usize])
}

/// A set determined by the first N coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DepthSet {
    /// [B_1, …, B_N] as per-coordinate membership masks
    Product(Vec<Vec<bool>>),
    Cells { depth: usize, members: Vec<bool> },
}

impl DepthSet {
    pub fn depth(&self) -> usize {
        match self {
            DepthSet::Product(m) => m.len(),
            DepthSet::Cells { depth, .. } => *depth,
        }
    }

    pub fn full(radices: &[u64]) -> Self {
        DepthSet::Product(radices.iter().map(|&m| vec![true; m as usize]).collect())
    }

    /// Basic cylinder [x_1, …, x_n].
    pub fn cylinder(radices: &[u64], digits: &[u64]) -> Self {
        DepthSet::Product(
            radices
                .iter()
                .zip(digits)
                .map(|(&m, &x)| (0..m).map(|j| j == x).collect())
                .collect(),
        )
    }

    pub fn from_symbols(radices: &[u64], symbols: &[Vec<u64>]) -> Self {
        DepthSet::Product(
            radices
                .iter()
                .zip(symbols)
                .map(|(&m, set)| {
                    let mut mask = vec![false; m as usize];
                    for &x in set {
                        mask[x as usize] = true;
                    }
                    mask
                })
                .collect(),
        )
    }

    pub fn contains_digits(&self, radix: &Radix, digits: &[u64]) -> bool {
        match self {
            DepthSet::Product(masks) => masks.iter().zip(digits).all(|(m, &x)| m[x as usize]),
            DepthSet::Cells { members, .. } => members[radix.encode(digits) as usize],
        }
    }

    /// Expands a product set into an explicit cell set.
    pub fn expand(&self, radix: &Radix) -> DepthSet {
        match self {
            DepthSet::Cells { .. } => self.clone(),
            DepthSet::Product(masks) => DepthSet::Cells {
                depth: masks.len(),
                members: (0..radix.cells()).map(|c| set_contains_product(masks, radix, c)).collect(),
            },
        }
    }
}

/// ∏ μ_i(B_i) without enumerating cells.
pub fn product_measure<S: Scalar>(coords: &[Vec<S>], masks: &[Vec<bool>]) -> S {
    let mut p = S::one();
    for (mu, mask) in coords.iter().zip(masks) {
        let mut s = S::zero();
        for (w, inside) in mu.iter().zip(mask) {
            if *inside {
                s += w.clone();
            }
        }
        p *= s;
    }
    p
}

/// Partial products ∏_{i≤n} η_i for n = 1..=N.
pub fn atomless_monitor<S: Scalar>(spec: &SystemSpec, depth: usize) -> Result<Vec<S>> {
    let mut out = Vec::with_capacity(depth);
    let mut p = S::one();
    for i in 1..=depth {
        let w: Vec<S> = spec.weights(i)?;
        let eta = w.into_iter().fold(S::zero(), S::max_of);
        p *= eta;
        out.push(p.clone());
    }
    Ok(out)
}

/// A function determined by the first N coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleFunction<S: Scalar> {
    pub depth: usize,
    pub values: Vec<S>,
}

impl<S: Scalar> SimpleFunction<S> {
    pub fn constant(space: &TruncatedSpace<S>, c: S) -> Self {
        SimpleFunction { depth: space.depth(), values: vec![c; space.cells() as usize] }
    }

    pub fn indicator(space: &TruncatedSpace<S>, set: &DepthSet) -> Self {
        let values = space.members(set).into_iter().map(|b| if b { S::one() } else { S::zero() }).collect();
        SimpleFunction { depth: space.depth(), values }
    }

    pub fn linear(&self, a: S, other: &Self, b: S) -> Self {
        assert_eq!(self.depth, other.depth);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a.clone() * x.clone() + b.clone() * y.clone())
            .collect();
        SimpleFunction { depth: self.depth, values }
    }

    pub fn add_constant(&self, c: S) -> Self {
        SimpleFunction { depth: self.depth, values: self.values.iter().map(|v| v.clone() + c.clone()).collect() }
    }

    pub fn product(&self, other: &Self) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(x, y)| x.clone() * y.clone()).collect();
        SimpleFunction { depth: self.depth, values }
    }

    pub fn sup_abs(&self) -> S {
        self.values.iter().map(|v| v.abs()).fold(S::zero(), S::max_of)
    }
}
