//! Odometer and diagonal translation on truncations: arithmetic, preimages,
//! Radon–Nikodym data, boundedness constants.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{DepthSet, Radix, TruncatedSpace};
use crate::spec::{MapKind, SystemSpec};

/// Mixed-radix digits of k over the given radices; errors when k ≥ ∏ m_i.
pub fn mixed_digits(radices: &[u64], mut k: u128) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(radices.len());
    for &m in radices {
        out.push((k % m as u128) as u64);
        k /= m as u128;
    }
    if k != 0 {
        return Err(Error::CarryOverflow { depth: radices.len() });
    }
    Ok(out)
}

/// x ⊞ digits with carries to the right; the flag reports a carry out of the prefix.
pub fn add_digits(radices: &[u64], x: &[u64], digits: &[u64]) -> (Vec<u64>, bool) {
    let mut out = Vec::with_capacity(x.len());
    let mut carry = 0u64;
    for ((&m, &a), &b) in radices.iter().zip(x).zip(digits) {
        let t = a + b + carry;
        out.push(t % m);
        carry = t / m;
    }
    (out, carry > 0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OdometerSum {
    pub digits: Vec<u64>,
    pub carry_out: bool,
}

/// x ⊞ (k_1, k_2, …) where k = Σ k_i M_i.
pub fn odometer_add(spec: &SystemSpec, x: &[u64], k: u128) -> Result<OdometerSum> {
    let radices = spec.radices(x.len())?;
    let digits = mixed_digits(&radices, k)?;
    let (digits, carry_out) = add_digits(&radices, x, &digits);
    Ok(OdometerSum { digits, carry_out })
}

/// One odometer step on a prefix.
pub fn odometer_step(radices: &[u64], x: &[u64]) -> (Vec<u64>, bool) {
    let mut one = vec![0; x.len()];
    if !one.is_empty() {
        one[0] = 1;
    }
    add_digits(radices, x, &one)
}

/// 𝔬^{-1}[x_1..x_n] as a basic cylinder.
pub fn preimage_cylinder(spec: &SystemSpec, x: &[u64]) -> Result<Vec<u64>> {
    let radices = spec.radices(x.len())?;
    Ok(preimage_cylinder_radices(&radices, x))
}

pub fn preimage_cylinder_radices(radices: &[u64], x: &[u64]) -> Vec<u64> {
    match x.iter().position(|&d| d > 0) {
        None => radices.iter().map(|m| m - 1).collect(),
        Some(l) => {
            let mut out: Vec<u64> = radices[..l].iter().map(|m| m - 1).collect();
            out.push(x[l] - 1);
            out.extend_from_slice(&x[l + 1..]);
            out
        }
    }
}

/// h(x) = ∏_{i<l} μ_i(m_i−1)/μ_i(0) · μ_l(x_l−1)/μ_l(x_l), l the first nonzero coordinate.
pub fn rn_derivative<S: Scalar>(spec: &SystemSpec, x: &[u64]) -> Result<S> {
    let l = x.iter().position(|&d| d > 0).ok_or(Error::UnresolvedTail)?;
    let mut h = S::one();
    for i in 0..l {
        let mu: Vec<S> = spec.weights(i + 1)?;
        h *= mu[mu.len() - 1].clone() / mu[0].clone();
    }
    let mu: Vec<S> = spec.weights(l + 1)?;
    h *= mu[x[l] as usize - 1].clone() / mu[x[l] as usize].clone();
    Ok(h)
}

/// The permutation induced on the cells of Ω_{|N}.
#[derive(Debug, Clone)]
pub struct InducedBijection {
    pub kind: MapKind,
    pub radix: Radix,
}

impl InducedBijection {
    pub fn new(kind: MapKind, radix: Radix) -> Self {
        InducedBijection { kind, radix }
    }

    pub fn of<S: Scalar>(space: &TruncatedSpace<S>) -> Self {
        InducedBijection::new(space.kind, space.radix.clone())
    }

    /// forward^n(cell), n of either sign.
    pub fn apply(&self, cell: u64, n: i128) -> u64 {
        match self.kind {
            MapKind::Odometer => {
                let m = self.radix.cells() as i128;
                (cell as i128 + n).rem_euclid(m) as u64
            }
            MapKind::Translation => {
                let mut out = 0;
                for (i, (&m, &p)) in self.radix.radices().iter().zip(self.radix.places()).enumerate() {
                    let d = self.radix.digit(cell, i) as i128;
                    out += (d + n).rem_euclid(m as i128) as u64 * p;
                }
                out
            }
        }
    }

    pub fn permutation(&self, n: i128) -> Vec<u64> {
        (0..self.radix.cells()).map(|c| self.apply(c, n)).collect()
    }

    /// Least d ≥ 1 with forward^d = id.
    pub fn order(&self) -> u64 {
        match self.kind {
            MapKind::Odometer => self.radix.cells(),
            MapKind::Translation => self.radix.radices().iter().fold(1u64, |a, &m| a.lcm(&m)),
        }
    }
}

/// μ(φ^{-n}(S)) by permuting cells.
pub fn preimage_measure<S: Scalar>(space: &TruncatedSpace<S>, set: &DepthSet, n: i128) -> S {
    let bij = InducedBijection::of(space);
    let members = space.members(set);
    let mut s = S::zero();
    for c in 0..space.cells() {
        if members[bij.apply(c, n) as usize] {
            s += space.cell_measure[c as usize].clone();
        }
    }
    s
}

/// μ(φ^n(S)) by permuting cells.
pub fn forward_image_measure<S: Scalar>(space: &TruncatedSpace<S>, set: &DepthSet, n: i128) -> S {
    let bij = InducedBijection::of(space);
    let members = space.members(set);
    let mut s = S::zero();
    for c in 0..space.cells() {
        if members[c as usize] {
            s += space.cell_measure[bij.apply(c, n) as usize].clone();
        }
    }
    s
}

/// Image or preimage cell set under φ^n.
pub fn transport_set<S: Scalar>(space: &TruncatedSpace<S>, set: &DepthSet, n: i128) -> DepthSet {
    let bij = InducedBijection::of(space);
    let members = space.members(set);
    let mut out = vec![false; members.len()];
    for (c, inside) in members.iter().enumerate() {
        if *inside {
            out[bij.apply(c as u64, n) as usize] = true;
        }
    }
    DepthSet::Cells { depth: space.depth(), members: out }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict", content = "level")]
pub enum BoundVerdict {
    BoundedClosedForm,
    BoundedUpToHorizon,
    UnboundedWitness(usize),
}

#[derive(Debug, Clone)]
pub struct BoundReport<S: Scalar> {
    pub kind: MapKind,
    pub horizon: usize,
    /// bracketed value at l (odometer) or partial product up to l (translation)
    pub values: Vec<S>,
    pub running_sup: Vec<S>,
    pub verdict: BoundVerdict,
}

impl<S: Scalar> BoundReport<S> {
    pub fn sup(&self) -> S {
        self.running_sup.last().cloned().unwrap_or_else(S::one)
    }

    /// ‖C_φ‖ estimate (running sup)^{1/p}.
    pub fn norm_estimate(&self, p: f64) -> f64 {
        self.sup().as_f64().powf(1.0 / p)
    }
}

/// Values beyond this count as an unboundedness witness in numeric mode.
pub const UNBOUNDED_THRESHOLD: f64 = 1e9;

/// sup_j μ(j−1)/μ(j), with j−1 taken mod m.
pub fn max_step_ratio<S: Scalar>(mu: &[S]) -> S {
    let m = mu.len();
    (0..m)
        .map(|j| mu[(j + m - 1) % m].clone() / mu[j].clone())
        .fold(S::zero(), S::max_of)
}

pub fn boundedness<S: Scalar>(spec: &SystemSpec, horizon: usize) -> Result<BoundReport<S>> {
    let mut values = Vec::with_capacity(horizon);
    let mut running_sup = Vec::with_capacity(horizon);
    let mut prefix = S::one();
    let mut sup = S::zero();
    let mut witness = None;
    for l in 1..=horizon {
        // a family that stops producing weights (e.g. underflowing tails)
        // ends the report early
        let mu: Vec<S> = match spec.weights(l) {
            Ok(mu) => mu,
            Err(e) if l == 1 => return Err(e),
            Err(_) => break,
        };
        let step = max_step_ratio(&mu);
        let value = match spec.kind {
            MapKind::Odometer => {
                let v = prefix.clone() * step;
                prefix *= mu[mu.len() - 1].clone() / mu[0].clone();
                v
            }
            MapKind::Translation => {
                prefix *= step;
                prefix.clone()
            }
        };
        if value > sup {
            sup = value.clone();
        }
        if witness.is_none() && sup.as_f64() > UNBOUNDED_THRESHOLD {
            witness = Some(l);
        }
        values.push(value);
        running_sup.push(sup.clone());
    }
    let verdict = match periodic_bound::<S>(spec)? {
        Some(Periodic::Bounded) => BoundVerdict::BoundedClosedForm,
        Some(Periodic::Unbounded) => {
            // first level where the values start to grow without bound
            let l = witness.unwrap_or_else(|| first_growth(&values));
            BoundVerdict::UnboundedWitness(l)
        }
        None => match witness {
            Some(l) => BoundVerdict::UnboundedWitness(l),
            None => BoundVerdict::BoundedUpToHorizon,
        },
    };
    Ok(BoundReport { kind: spec.kind, horizon: values.len(), values, running_sup, verdict })
}

fn first_growth<S: Scalar>(values: &[S]) -> usize {
    (1..values.len()).find(|&i| values[i] > values[i - 1]).map(|i| i + 1).unwrap_or(1)
}

enum Periodic {
    Bounded,
    Unbounded,
}

/// Exact decision for eventually periodic rules: over one period the
/// bracket gets multiplied by a fixed factor.
fn periodic_bound<S: Scalar>(spec: &SystemSpec) -> Result<Option<Periodic>> {
    let Some((start, period)) = spec.periodicity() else {
        return Ok(None);
    };
    let mut factor = S::one();
    let mut steps_above_one = false;
    for i in start..start + period {
        let mu: Vec<S> = spec.weights(i)?;
        match spec.kind {
            MapKind::Odometer => factor *= mu[mu.len() - 1].clone() / mu[0].clone(),
            MapKind::Translation => {
                if max_step_ratio(&mu) > S::one() + S::tol() {
                    steps_above_one = true;
                }
            }
        }
    }
    let unbounded = match spec.kind {
        MapKind::Odometer => factor > S::one() + S::tol(),
        MapKind::Translation => steps_above_one,
    };
    Ok(Some(if unbounded { Periodic::Unbounded } else { Periodic::Bounded }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KakutaniVerdict {
    NonsingularClosedForm,
    SingularClosedForm,
    NonsingularUpToHorizon,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct KakutaniReport {
    pub factors: Vec<f64>,
    pub products: Vec<f64>,
    pub verdict: KakutaniVerdict,
}

/// Partial products of Σ_j √(μ_i(j) μ_i(j−1)).
pub fn kakutani_check(spec: &SystemSpec, horizon: usize) -> Result<KakutaniReport> {
    if spec.kind != MapKind::Translation {
        return Err(Error::WrongKind { expected: "diagonal-translation" });
    }
    let factor = |i: usize| -> Result<f64> {
        let mu: Vec<f64> = spec.weights(i)?;
        let m = mu.len();
        Ok((0..m).map(|j| (mu[j] * mu[(j + m - 1) % m]).sqrt()).sum::<f64>().min(1.0))
    };
    let mut factors = Vec::with_capacity(horizon);
    let mut products = Vec::with_capacity(horizon);
    let mut p = 1.0;
    for i in 1..=horizon {
        let f = factor(i)?;
        p *= f;
        factors.push(f);
        products.push(p);
    }
    let verdict = if let Some((start, period)) = spec.periodicity() {
        let mut per = 1.0;
        for i in start..start + period {
            per *= factor(i)?;
        }
        if per >= 1.0 - 1e-15 {
            KakutaniVerdict::NonsingularClosedForm
        } else {
            KakutaniVerdict::SingularClosedForm
        }
    } else {
        // a positive limit shows as a stalled tail: the last half of the
        // horizon loses less than 1% of the product
        let half = products[horizon / 2];
        if p > 0.0 && p / half > 0.99 {
            KakutaniVerdict::NonsingularUpToHorizon
        } else {
            KakutaniVerdict::Inconclusive
        }
    };
    Ok(KakutaniReport { factors, products, verdict })
}

#[derive(Debug, Clone)]
pub struct NormProbe<S: Scalar> {
    pub n: i128,
    /// sup over cells of μ(φ^{-n}[c]) / μ[c], a lower bound for ‖C^n‖^p
    pub ratio_sup: S,
    pub argmax: u64,
    /// share of cells on which the n-step density is constant (no borrow out of depth N)
    pub resolved_fraction: f64,
}

pub fn norm_probe<S: Scalar>(space: &TruncatedSpace<S>, n: i128) -> NormProbe<S> {
    let bij = InducedBijection::of(space);
    let mut best = S::zero();
    let mut argmax = 0;
    let mut resolved = 0u64;
    let cells = space.cells();
    for c in 0..cells {
        let pre = bij.apply(c, -n);
        let r = space.cell_measure[pre as usize].clone() / space.cell_measure[c as usize].clone();
        if r > best {
            best = r;
            argmax = c;
        }
        if space.kind == MapKind::Odometer && n >= 0 && n < cells as i128 && (c as i128) >= n {
            resolved += 1;
        }
    }
    NormProbe { n, ratio_sup: best, argmax, resolved_fraction: resolved as f64 / cells as f64 }
}
