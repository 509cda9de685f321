//! Exhaustive oracles over integer weights. A measure is given by positive
//! integers w_0..w_{m-1} with total W; every value below is a numerator
//! over W, so the subset enumeration never touches rationals.

#![allow(dead_code)]

use odolab::Rational;
use rand::Rng;

pub fn to_measure(w: &[u64]) -> Vec<Rational> {
    let total: u64 = w.iter().sum();
    w.iter().map(|&x| Rational::new((x as i64).into(), (total as i64).into())).collect()
}

pub fn over(num: u64, w: &[u64]) -> Rational {
    let total: u64 = w.iter().sum();
    Rational::new((num as i64).into(), (total as i64).into())
}

/// Random weights: m in 2..=max_m, entries in 1..=30.
pub fn random_weights(rng: &mut impl Rng, max_m: usize) -> Vec<u64> {
    let m = rng.gen_range(2..=max_m);
    (0..m).map(|_| rng.gen_range(1..=30)).collect()
}

/// w(D) for every mask D ⊂ ⟦0, m−1⟧.
pub fn subset_sums(w: &[u64]) -> Vec<u64> {
    let m = w.len();
    let mut s = vec![0u64; 1 << m];
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        s[mask] = s[mask & (mask - 1)] + w[low];
    }
    s
}

/// D + k mod m as a mask.
pub fn rotate(mask: usize, k: usize, m: usize) -> usize {
    let full = (1usize << m) - 1;
    let k = k % m;
    ((mask << k) | (mask >> (m - k))) & full
}

/// max_D w(D) − w(D+k), the fixed-shift drop.
pub fn theta_shift(w: &[u64], k: usize) -> u64 {
    let m = w.len();
    let s = subset_sums(w);
    (0..1usize << m).map(|d| s[d].saturating_sub(s[rotate(d, k, m)])).max().unwrap()
}

pub fn theta(w: &[u64]) -> u64 {
    (1..w.len()).map(|k| theta_shift(w, k)).max().unwrap()
}

/// max w(D) with no two members of D differing by j (no wrap).
pub fn disjoint_zplus(w: &[u64], j: usize) -> u64 {
    let m = w.len();
    let full = (1usize << m) - 1;
    let s = subset_sums(w);
    (0..1usize << m).filter(|&d| d & ((d << j) & full) == 0).map(|d| s[d]).max().unwrap()
}

pub fn kappa(w: &[u64]) -> u64 {
    (1..w.len()).map(|j| disjoint_zplus(w, j)).min().unwrap()
}

/// max w(D) with D ∩ (D+n mod m) = ∅.
pub fn alpha(w: &[u64], n: usize) -> u64 {
    let m = w.len();
    let s = subset_sums(w);
    (0..1usize << m).filter(|&d| d & rotate(d, n, m) == 0).map(|d| s[d]).max().unwrap()
}

pub fn beta(w: &[u64]) -> u64 {
    (1..w.len()).map(|n| alpha(w, n)).max().unwrap()
}

/// max_D min(w(D), W − w(D+j mod m)) for one shift.
pub fn gamma_shift(w: &[u64], j: usize) -> u64 {
    let m = w.len();
    let total: u64 = w.iter().sum();
    let s = subset_sums(w);
    (0..1usize << m).map(|d| s[d].min(total - s[rotate(d, j, m)])).max().unwrap()
}

pub fn gamma(w: &[u64]) -> u64 {
    (1..w.len()).map(|j| gamma_shift(w, j)).max().unwrap()
}

/// sup over nonempty I of (Σ_{i∈I} v_i)² / #I, as (numerator, #I) of the
/// best fraction; values are integers.
pub fn gamma_tilde(v: &[u64]) -> (u128, u128) {
    let mut best = (0u128, 1u128);
    for mask in 1usize..(1 << v.len()) {
        let sum: u128 = (0..v.len()).filter(|i| mask >> i & 1 == 1).map(|i| v[i] as u128).sum();
        let card = mask.count_ones() as u128;
        if sum * sum * best.1 > best.0 * card {
            best = (sum * sum, card);
        }
    }
    best
}

/// Max-weight independent set on a path, by enumeration.
pub fn path_mwis(w: &[u64]) -> u64 {
    let m = w.len();
    let s = subset_sums(w);
    (0..1usize << m).filter(|&d| d & (d >> 1) == 0).map(|d| s[d]).max().unwrap()
}

// ---------------------------------------------------------------------------
// structural checks shared by the property suite and the acceptance run

use odolab::function::{apply_composition, period_of};
use odolab::maps::{rn_derivative, InducedBijection};
use odolab::space::{build_truncation, DepthSet, SimpleFunction, TruncatedSpace};
use odolab::{Scalar, SystemSpec};

/// Exact equality, or agreement to 1e-9 relative in double precision.
pub fn same<S: Scalar>(a: &S, b: &S) -> bool {
    if S::EXACT {
        a == b
    } else {
        let (x, y) = (a.as_f64(), b.as_f64());
        (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-300)
    }
}

/// Deepest truncation of at most `max_depth` coordinates and `max_cells` cells.
pub fn fitting_depth(spec: &SystemSpec, max_depth: usize, max_cells: u64) -> usize {
    let mut cells = 1u64;
    let mut depth = 0;
    for i in 1..=max_depth {
        let Ok(m) = spec.m(i) else { break };
        match cells.checked_mul(m) {
            Some(c) if c <= max_cells => {
                cells = c;
                depth = i;
            }
            _ => break,
        }
    }
    depth
}

/// forward^a ∘ forward^b = forward^(a+b), each power a permutation, and the
/// order is the least period.
pub fn bijection_laws<S: Scalar>(space: &TruncatedSpace<S>, a: i128, b: i128) -> Result<(), String> {
    let bij = InducedBijection::of(space);
    let cells = space.cells();
    for c in 0..cells {
        if bij.apply(bij.apply(c, a), b) != bij.apply(c, a + b) {
            return Err(format!("composition fails at cell {c}, a = {a}, b = {b}"));
        }
        if bij.apply(bij.apply(c, a), -a) != c {
            return Err(format!("inverse fails at cell {c}"));
        }
    }
    let mut seen = vec![false; cells as usize];
    for t in bij.permutation(a) {
        if std::mem::replace(&mut seen[t as usize], true) {
            return Err(format!("power {a} is not injective"));
        }
    }
    let order = bij.order();
    if (0..cells).any(|c| bij.apply(c, order as i128) != c) {
        return Err(format!("forward^{order} is not the identity"));
    }
    if order <= 4096 {
        for d in 1..order {
            if order % d == 0 && (0..cells).all(|c| bij.apply(c, d as i128) == c) {
                return Err(format!("forward^{d} is already the identity, order {order}"));
            }
        }
    }
    Ok(())
}

pub fn normalized<S: Scalar>(space: &TruncatedSpace<S>) -> Result<(), String> {
    let total = space.total();
    if same(&total, &S::one()) {
        Ok(())
    } else {
        Err(format!("cell measures sum to {}", total.render()))
    }
}

/// μ(𝔬^{-1}[x]) = h(x) μ[x] on every cell with a nonzero digit; the
/// preimage of a cell is the cell one step back.
pub fn rn_identity<S: Scalar>(spec: &SystemSpec, space: &TruncatedSpace<S>) -> Result<(), String> {
    let bij = InducedBijection::of(space);
    for c in 0..space.cells() {
        let x = space.radix.decode(c);
        if x.iter().all(|&d| d == 0) {
            continue;
        }
        let lhs = space.cell_measure[bij.apply(c, -1) as usize].clone();
        let h: S = rn_derivative(spec, &x).map_err(|e| e.to_string())?;
        let rhs = h * space.cell_measure[c as usize].clone();
        if !same(&lhs, &rhs) {
            return Err(format!("cell {x:?}: {} vs {}", lhs.render(), rhs.render()));
        }
    }
    Ok(())
}

/// The period of a cylinder indicator divides the order, C^period f = f,
/// and no proper divisor of the period fixes f.
pub fn period_laws<S: Scalar>(space: &TruncatedSpace<S>, digits: &[u64]) -> Result<(), String> {
    let radices = space.radix.radices();
    let symbols: Vec<Vec<u64>> = radices
        .iter()
        .enumerate()
        .map(|(i, &m)| digits.get(i).map(|&d| vec![d % m]).unwrap_or_else(|| (0..m).collect()))
        .collect();
    let f = SimpleFunction::indicator(space, &DepthSet::from_symbols(radices, &symbols));
    let p = period_of(space, &f);
    let order = InducedBijection::of(space).order();
    if order % p != 0 {
        return Err(format!("period {p} does not divide {order}"));
    }
    if apply_composition(space, &f, p as i128) != f {
        return Err(format!("C^{p} f differs from f"));
    }
    if let Some(d) = (1..p).find(|&d| p % d == 0 && apply_composition(space, &f, d as i128) == f) {
        return Err(format!("{d} already fixes f, period reported {p}"));
    }
    Ok(())
}

pub fn truncation<S: Scalar>(spec: &SystemSpec, depth: usize) -> TruncatedSpace<S> {
    build_truncation::<S>(spec, depth, 1 << 22).expect("truncation within the cap")
}
