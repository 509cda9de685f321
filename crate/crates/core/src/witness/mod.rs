//! Witness objects from the constructive arguments, with every defining
//! inequality re-checked and tagged with how it was checked.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::scalar::{fmt_sig, Scalar};

pub mod odometer;
pub mod recurrence;
pub mod shift;
pub mod translation;

/// Verification ladder, strongest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Method {
    /// exact transport or enumeration of every case
    Exact,
    /// exact, through independence of disjoint coordinate blocks
    IndependenceProduct,
    /// the closed-form bound from the construction
    ProofBound,
    /// seeded falsification; `first_violation` holds the offending point
    Sampled { seed: u64, trials: u64, violations: u64, first_violation: Option<String> },
}

impl Method {
    pub fn tag(&self) -> String {
        match self {
            Method::Exact => "exact".into(),
            Method::IndependenceProduct => "independence-product".into(),
            Method::ProofBound => "proof-bound".into(),
            Method::Sampled { seed, trials, violations, .. } => format!("sampled(seed={seed},trials={trials},violations={violations})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    /// Exact for rationals; the float backend allows its tolerance on the
    /// non-strict relations only.
    pub fn holds<S: Scalar>(self, value: &S, bound: &S) -> bool {
        match self {
            Relation::Lt => value < bound,
            Relation::Gt => value > bound,
            Relation::Le => value.le_tol(bound),
            Relation::Ge => value.ge_tol(bound),
            Relation::Eq => value.eq_tol(bound),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub inequality: String,
    pub relation: Relation,
    pub value: String,
    pub bound: String,
    pub value_f64: f64,
    pub bound_f64: f64,
    pub method: Method,
    pub holds: bool,
}

impl Check {
    pub fn compare<S: Scalar>(inequality: impl Into<String>, value: &S, relation: Relation, bound: &S, method: Method) -> Self {
        let holds = relation.holds(value, bound);
        Check {
            inequality: inequality.into(),
            relation,
            value: value.render(),
            bound: bound.render(),
            value_f64: value.as_f64(),
            bound_f64: bound.as_f64(),
            method,
            holds,
        }
    }

    /// A double-precision comparison (transcendental bounds).
    pub fn float(inequality: impl Into<String>, value: f64, relation: Relation, bound: f64, method: Method) -> Self {
        let holds = match relation {
            Relation::Lt => value < bound,
            Relation::Le => value <= bound,
            Relation::Gt => value > bound,
            Relation::Ge => value >= bound,
            Relation::Eq => value == bound,
        };
        Check {
            inequality: inequality.into(),
            relation,
            value: fmt_sig(value),
            bound: fmt_sig(bound),
            value_f64: value,
            bound_f64: bound,
            method,
            holds,
        }
    }

    /// Zero counterexamples found by enumeration or sampling.
    pub fn no_violations(inequality: impl Into<String>, violations: u64, method: Method) -> Self {
        Check {
            inequality: inequality.into(),
            relation: Relation::Eq,
            value: violations.to_string(),
            bound: "0".into(),
            value_f64: violations as f64,
            bound_f64: 0.0,
            method,
            holds: violations == 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub construction: String,
    pub params: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl WitnessReport {
    pub fn new(construction: &str, params: Value, checks: Vec<Check>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.holds);
        WitnessReport { construction: construction.to_string(), params, checks, pass }
    }

    pub fn failed(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    /// One row per check.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("inequality\trelation\tvalue\tbound\tmethod\tholds\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                c.inequality,
                c.relation.symbol(),
                c.value,
                c.bound,
                c.method.tag(),
                c.holds as u8
            ));
        }
        out
    }
}

/// Controls the exact-versus-sampled ladder.
#[derive(Debug, Clone)]
pub struct LadderOptions {
    pub seed: u64,
    pub trials: u64,
    /// enumerate exhaustively up to this many cells
    pub cap: u64,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions { seed: 0x5eed, trials: 1_000_000, cap: 1 << 22 }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Inverse-CDF sampler for one coordinate.
#[derive(Debug, Clone)]
pub struct CoordinateSampler {
    cumulative: Vec<f64>,
}

impl CoordinateSampler {
    pub fn new<S: Scalar>(mu: &[S]) -> Self {
        let mut acc = 0.0;
        let cumulative = mu
            .iter()
            .map(|w| {
                acc += w.as_f64();
                acc
            })
            .collect();
        CoordinateSampler { cumulative }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> u64 {
        let total = *self.cumulative.last().unwrap();
        let u: f64 = rng.gen::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= u).min(self.cumulative.len() - 1) as u64
    }
}

/// M_i = m_1 ⋯ m_{i−1}, the step of coordinate i (1-based).
pub fn place_value(radices: &[u64], i: usize) -> BigInt {
    radices[..i - 1].iter().fold(BigInt::one(), |acc, &m| acc * m)
}

/// Near-uniform integer in ⟦0, bound⟧ (bias below 2^-64).
pub fn random_upto(rng: &mut impl Rng, bound: &BigInt) -> BigInt {
    if bound.is_zero() {
        return BigInt::zero();
    }
    let span = bound.to_biguint().unwrap_or_default() + 1u32;
    let words = span.bits().div_ceil(32) as usize + 2;
    let raw = BigUint::new((0..words).map(|_| rng.gen::<u32>()).collect());
    BigInt::from(raw % span)
}

/// Mask of D + k (mod m).
pub fn shift_mask(mask: &[bool], k: u64) -> Vec<bool> {
    let m = mask.len();
    let k = (k % m as u64) as usize;
    (0..m).map(|y| mask[(y + m - k) % m]).collect()
}

pub fn mask_measure<S: Scalar>(mu: &[S], mask: &[bool]) -> S {
    mu.iter().zip(mask).filter(|(_, &b)| b).fold(S::zero(), |s, (w, _)| s + w.clone())
}

pub fn mask_members(mask: &[bool]) -> Vec<u64> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j as u64).collect()
}

/// Distribution of (ΣX_s, ΣY_s) for independent pairs of indicators, where
/// `pairs[s] = [p00, p01, p10, p11]` with index 2X + Y.
pub fn joint_sum_law<S: Scalar>(pairs: &[[S; 4]]) -> Vec<Vec<S>> {
    let n = pairs.len();
    let mut law = vec![vec![S::zero(); n + 1]; n + 1];
    law[0][0] = S::one();
    for (s, p) in pairs.iter().enumerate() {
        let mut next = vec![vec![S::zero(); n + 1]; n + 1];
        for a in 0..=s {
            for b in 0..=s {
                let w = &law[a][b];
                if w.is_zero() {
                    continue;
                }
                for (idx, q) in p.iter().enumerate() {
                    if q.is_zero() {
                        continue;
                    }
                    let (x, y) = (idx >> 1, idx & 1);
                    next[a + x][b + y] += w.clone() * q.clone();
                }
            }
        }
        law = next;
    }
    law
}

/// Per-coordinate pair law of X = 1{x ∈ D}, Y = 1{x ∈ D + k}.
pub fn pair_law<S: Scalar>(mu: &[S], d: &[bool], dk: &[bool]) -> [S; 4] {
    let mut p = [S::zero(), S::zero(), S::zero(), S::zero()];
    for (j, w) in mu.iter().enumerate() {
        let idx = (d[j] as usize) << 1 | dk[j] as usize;
        p[idx] += w.clone();
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn joint_law_of_independent_pairs_sums_to_one() {
        let p = [rat(1, 4), rat(1, 4), rat(1, 4), rat(1, 4)];
        let law = joint_sum_law::<Rational>(&[p.clone(), p]);
        let total = law.iter().flatten().fold(rat(0, 1), |s, x| s + x);
        assert_eq!(total, rat(1, 1));
        assert_eq!(law[2][2], rat(1, 16));
        assert_eq!(law[1][1], rat(4, 16));
    }

    #[test]
    fn sampler_respects_weights() {
        let s = CoordinateSampler::new(&[0.25f64, 0.75]);
        let mut r = rng(3);
        let ones = (0..20000).filter(|_| s.sample(&mut r) == 1).count();
        assert!((ones as f64 / 20000.0 - 0.75).abs() < 0.02);
    }

    #[test]
    fn shifted_masks_rotate() {
        assert_eq!(shift_mask(&[true, false, false], 1), vec![false, true, false]);
        assert_eq!(shift_mask(&[true, false, false], 5), vec![false, false, true]);
    }
}
