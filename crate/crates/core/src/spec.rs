//! System descriptions: alphabets, per-coordinate measures, map kind.
//!
//! Infinite systems are rules evaluated lazily per index `i ≥ 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rat, rational_to_f64, render_rational, Rational, Scalar};
use crate::solve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    Odometer,
    Translation,
}

impl MapKind {
    pub fn name(self) -> &'static str {
        match self {
            MapKind::Odometer => "odometer",
            MapKind::Translation => "diagonal-translation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Repeat {
    Cycle,
    Last,
}

/// Rule producing m_i ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Alphabet {
    Constant(u64),
    /// m_i = i + offset
    Linear { offset: u64 },
    /// m_i = scale · i²
    Quadratic { scale: u64 },
    /// m_i = scale · 2^i
    Doubling { scale: u64 },
    /// m_i = 2^(i(i+1)/2), so m_i divides m_{i+1} with ratio 2^(i+1)
    TriangularPower,
    /// m_i = 2^(l+1) for l² ≤ i < (l+1)²
    DyadicBlocks,
    List { list: Vec<u64>, repeat: Repeat },
}

/// Per-coordinate step size δ_i of the geometric tails.
#[derive(Debug, Clone, PartialEq)]
pub enum DeltaRule {
    /// δ_i = i^(-a)
    InversePower(Rational),
    /// δ_i = 1/n_i where n_i is the tail length
    InverseTail,
    /// δ_i = 2^(-i/2) / m_{i-1}
    HalfPowerOverPrevious,
}

/// Rule producing μ_i on ⟦0, m_i − 1⟧.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Uniform,
    /// μ(0) = 1/2, the other m−1 symbols share 1/2 equally
    Ornstein,
    /// constant binary weights
    Binary { p0: Rational },
    /// μ_i(0) = 1/2 + i^(-α), uniform while i^(-α) ≥ 1/2
    BinaryAlpha { alpha: Rational },
    /// μ_i(0) = i/(i+1)
    BinaryHarmonic,
    /// two geometric flanks around a central peak c_i
    PeakSplit,
    /// μ_i(j) = (i/(i+1)) c_i^j with Σ_{j<m} c^j = (i+1)/i
    GeometricC,
    /// blocks of three binary coordinates: 1 − 1/(k+1), 1 − 1/(k+1), 1/2
    TripleBlocks,
    /// uniform head, geometric tail of length ⌊fraction · m_i⌋
    TwoInterval { fraction: Rational, delta: DeltaRule },
    /// uniform head, geometric middle and uniform tail, each of length ⌊m_i/5⌋;
    /// uniform below index `start`
    ThreeInterval { start: u64, delta: DeltaRule },
    /// explicit vectors
    List { weights: Vec<Vec<Rational>>, repeat: Repeat },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub kind: MapKind,
    pub alphabet: Alphabet,
    pub measure: Measure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexSet {
    Z,
    ZPlus,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShiftWeights {
    /// ν_i = base^|i|
    Geometric { base: Rational },
    /// ν_i = (1 + |i|)^(-power)
    Polynomial { power: u32 },
}

/// Weighted counting measure on ℤ or ℤ₊ with the shift i ↦ i + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSpec {
    pub index: IndexSet,
    pub weights: ShiftWeights,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnySpec {
    Product(SystemSpec),
    Shift(ShiftSpec),
}

/// A weight vector as produced by a rule, before choosing a backend.
#[derive(Debug, Clone, PartialEq)]
pub enum Weights {
    Exact(Vec<Rational>),
    Approx(Vec<f64>),
}

impl Weights {
    pub fn len(&self) -> usize {
        match self {
            Weights::Exact(v) => v.len(),
            Weights::Approx(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Weights::Exact(_))
    }

    /// Converts to a backend. Float weights entering the rational backend are
    /// taken as exact dyadics with the last entry completing the sum to 1.
    pub fn lift<S: Scalar>(&self) -> Vec<S> {
        match self {
            Weights::Exact(v) => v.iter().map(S::from_rational).collect(),
            Weights::Approx(v) => {
                if S::EXACT {
                    let mut out: Vec<S> = v[..v.len() - 1].iter().map(|x| S::from_float(*x)).collect();
                    let mut rest = S::one();
                    for w in &out {
                        rest -= w.clone();
                    }
                    out.push(rest);
                    out
                } else {
                    v.iter().map(|x| S::from_float(*x)).collect()
                }
            }
        }
    }
}

/// Largest alphabet whose weight vector is ever built.
pub const MAX_MATERIALIZED: u64 = 1 << 24;

fn pow2(e: u64) -> Result<u64> {
    if e >= 63 {
        return Err(Error::InvalidSpec(format!("alphabet size 2^{e} does not fit in 64 bits")));
    }
    Ok(1u64 << e)
}

impl Alphabet {
    pub fn size(&self, i: usize) -> Result<u64> {
        assert!(i >= 1, "indices start at 1");
        let i64_ = i as u64;
        let m = match self {
            Alphabet::Constant(m) => *m,
            Alphabet::Linear { offset } => i64_ + offset,
            Alphabet::Quadratic { scale } => scale * i64_ * i64_,
            Alphabet::Doubling { scale } => scale
                .checked_mul(pow2(i64_)?)
                .ok_or_else(|| Error::InvalidSpec("alphabet overflow".into()))?,
            Alphabet::TriangularPower => pow2(i64_ * (i64_ + 1) / 2)?,
            Alphabet::DyadicBlocks => pow2(isqrt(i64_) + 1)?,
            Alphabet::List { list, repeat } => pick(list, *repeat, i),
        };
        if m < 2 {
            return Err(Error::InvalidSpec(format!("m_{i} = {m} < 2")));
        }
        Ok(m)
    }

    /// Every family but the explicit lists grows without bound.
    pub fn is_bounded(&self) -> bool {
        matches!(self, Alphabet::Constant(_) | Alphabet::List { .. })
    }

    /// Eventual periodicity as (first index of the periodic part, period).
    fn periodicity(&self) -> Option<(usize, usize)> {
        match self {
            Alphabet::Constant(_) => Some((1, 1)),
            Alphabet::List { list, repeat: Repeat::Cycle } => Some((1, list.len())),
            Alphabet::List { list, repeat: Repeat::Last } => Some((list.len(), 1)),
            _ => None,
        }
    }
}

pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn pick<T: Clone>(list: &[T], repeat: Repeat, i: usize) -> T {
    let k = i - 1;
    match repeat {
        Repeat::Cycle => list[k % list.len()].clone(),
        Repeat::Last => list[k.min(list.len() - 1)].clone(),
    }
}

fn uniform(m: u64) -> Weights {
    Weights::Exact(vec![rat(1, m as i64); m as usize])
}

impl DeltaRule {
    fn value(&self, i: usize, tail: u64, prev_m: Option<u64>) -> f64 {
        match self {
            DeltaRule::InversePower(a) => (i as f64).powf(-rational_to_f64(a)),
            DeltaRule::InverseTail => 1.0 / tail as f64,
            DeltaRule::HalfPowerOverPrevious => {
                2f64.powf(-(i as f64) / 2.0) / prev_m.unwrap_or(1) as f64
            }
        }
    }
}

/// Geometric block of `len` descending weights ρ^{len-1}, …, ρ, 1, scaled by
/// ρ^{-(len-1)} so large exponents never overflow. Returns the block and the
/// scaled value of 1.
fn descending_geometric(len: u64, delta: f64) -> (Vec<f64>, f64) {
    let log_rho = delta.ln_1p();
    let out: Vec<f64> = (0..len).map(|k| (-(k as f64) * log_rho).exp()).collect();
    let unit = out[len as usize - 1];
    (out, unit)
}

fn normalize(v: Vec<f64>) -> std::result::Result<Weights, &'static str> {
    let s: f64 = v.iter().sum();
    let out: Vec<f64> = v.into_iter().map(|x| x / s).collect();
    if out.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err("geometric tail underflows double precision");
    }
    Ok(Weights::Approx(out))
}

impl Measure {
    /// μ_i given m_i and m_{i−1}.
    pub fn weights(&self, i: usize, m: u64, prev_m: Option<u64>) -> Result<Weights> {
        let ii = i as i64;
        let bad = |why: &str| Error::InvalidSpec(format!("measure at index {i}: {why}"));
        match self {
            Measure::Uniform => Ok(uniform(m)),
            Measure::Ornstein => {
                let mut v = vec![rat(1, 2)];
                v.extend(std::iter::repeat(rat(1, 2 * (m as i64 - 1))).take(m as usize - 1));
                Ok(Weights::Exact(v))
            }
            Measure::Binary { p0 } => {
                if m != 2 {
                    return Err(bad("binary family needs m = 2"));
                }
                Ok(Weights::Exact(vec![p0.clone(), Rational::one() - p0]))
            }
            Measure::BinaryAlpha { alpha } => {
                if m != 2 {
                    return Err(bad("binary family needs m = 2"));
                }
                binary_alpha(i, alpha)
            }
            Measure::BinaryHarmonic => {
                if m != 2 {
                    return Err(bad("binary family needs m = 2"));
                }
                Ok(Weights::Exact(vec![rat(ii, ii + 1), rat(1, ii + 1)]))
            }
            Measure::PeakSplit => Ok(Weights::Exact(peak_split(m))),
            Measure::GeometricC => {
                if i == 1 {
                    return Ok(uniform(m));
                }
                // μ(0) = i/(i+1) exactly; the other symbols share 1/(i+1) in
                // proportion c^j, so the weights stay positive even when c^{m−1}
                // is far below the root's bracket width
                let c = solve::geometric_c(i, m)?;
                let mut powers = Vec::with_capacity(m as usize - 1);
                let mut w = c.clone();
                for _ in 1..m {
                    powers.push(w.clone());
                    w *= &c;
                }
                let total: Rational = powers.iter().sum();
                let scale = rat(1, ii + 1) / total;
                let mut v = vec![rat(ii, ii + 1)];
                v.extend(powers.into_iter().map(|p| p * &scale));
                Ok(Weights::Exact(v))
            }
            Measure::TripleBlocks => {
                if m != 2 {
                    return Err(bad("binary family needs m = 2"));
                }
                let k = (ii - 1) / 3;
                let p0 = if (ii - 1) % 3 == 2 || k == 0 { rat(1, 2) } else { rat(k, k + 1) };
                Ok(Weights::Exact(vec![p0.clone(), Rational::one() - p0]))
            }
            Measure::TwoInterval { fraction, delta } => {
                let n = (fraction * Rational::from_integer(BigInt::from(m))).floor().to_integer().to_u64().unwrap_or(0);
                if n == 0 || n >= m {
                    return Err(bad("tail length must lie in ⟦1, m−1⟧"));
                }
                let (block, unit) = descending_geometric(n, delta.value(i, n, prev_m));
                let mut v = vec![unit; (m - n) as usize];
                v.extend(block);
                normalize(v).map_err(|why| bad(why))
            }
            Measure::ThreeInterval { start, delta } => {
                if (i as u64) < *start || m < 5 {
                    return Ok(uniform(m));
                }
                let n = m / 5;
                let (block, unit) = descending_geometric(n, delta.value(i, n, prev_m));
                let mut v = vec![unit; (m - 2 * n) as usize];
                v.extend(block);
                v.extend(std::iter::repeat(unit).take(n as usize));
                normalize(v).map_err(|why| bad(why))
            }
            Measure::List { weights, repeat } => {
                let v = pick(weights, *repeat, i);
                if v.len() as u64 != m {
                    return Err(bad("listed vector length differs from m_i"));
                }
                Ok(Weights::Exact(v))
            }
        }
    }

    fn periodicity(&self) -> Option<(usize, usize)> {
        match self {
            Measure::Uniform | Measure::Ornstein | Measure::Binary { .. } | Measure::PeakSplit => Some((1, 1)),
            Measure::List { weights, repeat: Repeat::Cycle } => Some((1, weights.len())),
            Measure::List { weights, repeat: Repeat::Last } => Some((weights.len(), 1)),
            _ => None,
        }
    }
}

fn binary_alpha(i: usize, alpha: &Rational) -> Result<Weights> {
    if !alpha.is_positive() {
        return Err(Error::InvalidSpec("alpha must be positive".into()));
    }
    let ii = i as i64;
    if alpha.is_integer() {
        let a = alpha.to_integer().to_u32().ok_or_else(|| Error::InvalidSpec("alpha too large".into()))?;
        let t = Rational::new(BigInt::one(), num_traits::pow::pow(BigInt::from(ii), a as usize));
        if t >= rat(1, 2) {
            return Ok(uniform(2));
        }
        let p0 = rat(1, 2) + t;
        return Ok(Weights::Exact(vec![p0.clone(), Rational::one() - p0]));
    }
    let t = (i as f64).powf(-rational_to_f64(alpha));
    if t >= 0.5 {
        return Ok(uniform(2));
    }
    Ok(Weights::Approx(vec![0.5 + t, 0.5 - t]))
}

/// Two geometric flanks (ratio 1/2) rising to a peak c; (2/3, 1/3) when m = 2.
fn peak_split(m: u64) -> Vec<Rational> {
    if m == 2 {
        return vec![rat(2, 3), rat(1, 3)];
    }
    let beta = m / 2;
    // unnormalized weights with the peak scaled to 2^beta
    let exps: Vec<u64> = (0..m)
        .map(|j| {
            if m % 2 == 0 {
                if j < beta {
                    beta - 1 - j
                } else {
                    j - beta
                }
            } else if j <= beta {
                beta - j
            } else {
                j - beta
            }
        })
        .collect();
    let top = *exps.iter().max().unwrap();
    let raw: Vec<BigInt> = exps.iter().map(|e| BigInt::one() << (top - e) as usize).collect();
    let total: BigInt = raw.iter().sum();
    raw.into_iter().map(|r| Rational::new(r, total.clone())).collect()
}

/// The peak weight c_i of the split family (the maximal weight).
pub fn peak_weight(m: u64) -> Rational {
    peak_split(m).into_iter().max().unwrap()
}

impl SystemSpec {
    pub fn new(kind: MapKind, alphabet: Alphabet, measure: Measure) -> Self {
        SystemSpec { kind, alphabet, measure }
    }

    pub fn m(&self, i: usize) -> Result<u64> {
        self.alphabet.size(i)
    }

    pub fn radices(&self, n: usize) -> Result<Vec<u64>> {
        (1..=n).map(|i| self.m(i)).collect()
    }

    pub fn raw_weights(&self, i: usize) -> Result<Weights> {
        let m = self.m(i)?;
        if m > MAX_MATERIALIZED {
            return Err(Error::InvalidSpec(format!("m_{i} = {m} is too large to list weights")));
        }
        let prev = if i > 1 { Some(self.m(i - 1)?) } else { None };
        self.measure.weights(i, m, prev)
    }

    pub fn weights<S: Scalar>(&self, i: usize) -> Result<Vec<S>> {
        Ok(self.raw_weights(i)?.lift())
    }

    /// True when every weight up to `horizon` is rational without approximation.
    pub fn is_exact(&self, horizon: usize) -> Result<bool> {
        for i in 1..=horizon {
            if !self.raw_weights(i)?.is_exact() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Checks positivity and normalization for i ≤ horizon.
    pub fn validate(&self, horizon: usize) -> Result<()> {
        for i in 1..=horizon {
            match self.raw_weights(i)? {
                Weights::Exact(v) => {
                    if v.iter().any(|w| !w.is_positive()) {
                        return Err(Error::InvalidSpec(format!("μ_{i} has a non-positive weight")));
                    }
                    let s: Rational = v.iter().sum();
                    if !s.is_one() {
                        return Err(Error::InvalidSpec(format!("μ_{i} sums to {}", render_rational(&s))));
                    }
                }
                Weights::Approx(v) => {
                    if v.iter().any(|w| *w <= 0.0 || !w.is_finite()) {
                        return Err(Error::InvalidSpec(format!("μ_{i} has a non-positive weight")));
                    }
                    let s: f64 = v.iter().sum();
                    if (s - 1.0).abs() > 1e-12 {
                        return Err(Error::InvalidSpec(format!("μ_{i} sums to {s}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// (start, period) when both rules are eventually periodic; criterion
    /// sequences are then periodic too and limits can be read off one period.
    pub fn periodicity(&self) -> Option<(usize, usize)> {
        let (sa, pa) = self.alphabet.periodicity()?;
        let (sm, pm) = self.measure.periodicity()?;
        Some((sa.max(sm), pa.lcm(&pm)))
    }

    /// Products M_1, …, M_{n+1} as u128, None on overflow.
    pub fn place_values(&self, n: usize) -> Result<Option<Vec<u128>>> {
        let mut out = vec![1u128];
        for i in 1..=n {
            match out[i - 1].checked_mul(self.m(i)? as u128) {
                Some(v) => out.push(v),
                None => return Ok(None),
            }
        }
        Ok(Some(out))
    }
}

impl ShiftWeights {
    pub fn nu<S: Scalar>(&self, i: i64) -> S {
        match self {
            ShiftWeights::Geometric { base } => S::from_rational(base).pow(i.unsigned_abs() as u32),
            ShiftWeights::Polynomial { power } => {
                S::one() / S::from_int(1 + i.abs()).pow(*power)
            }
        }
    }
}

impl ShiftSpec {
    pub fn nu<S: Scalar>(&self, i: i64) -> S {
        if self.index == IndexSet::ZPlus && i < 0 {
            return S::zero();
        }
        self.weights.nu(i)
    }

    pub fn contains(&self, i: i64) -> bool {
        self.index == IndexSet::Z || i >= 0
    }
}

// ---------------------------------------------------------------------------
// configuration schema

fn rs(r: &Rational) -> Value {
    Value::String(render_rational(r))
}

fn repeat_name(r: Repeat) -> &'static str {
    match r {
        Repeat::Cycle => "cycle",
        Repeat::Last => "last",
    }
}

fn parse_repeat(v: Option<&Value>) -> Result<Repeat> {
    match v.and_then(Value::as_str).unwrap_or("cycle") {
        "cycle" => Ok(Repeat::Cycle),
        "last" => Ok(Repeat::Last),
        other => Err(Error::Parse(format!("unknown repeat rule `{other}`"))),
    }
}

fn rational_field(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(BigInt::from(i)))
            } else {
                parse_rational(&n.to_string())
            }
        }
        _ => Err(Error::Parse(format!("expected a rational, got {v}"))),
    }
}

fn param<'a>(params: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    params.get(key).ok_or_else(|| Error::Parse(format!("missing parameter `{key}`")))
}

fn uint_param(params: &Map<String, Value>, key: &str) -> Result<u64> {
    param(params, key)?
        .as_u64()
        .ok_or_else(|| Error::Parse(format!("parameter `{key}` must be a non-negative integer")))
}

fn family_of(v: &Value) -> Result<(String, Map<String, Value>)> {
    let family = v
        .get("family")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("rule needs a `family`".into()))?
        .to_string();
    let params = match v.get("params") {
        None | Some(Value::Null) => Map::new(),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(Error::Parse("`params` must be an object".into())),
    };
    Ok((family, params))
}

impl DeltaRule {
    fn to_json(&self) -> Value {
        match self {
            DeltaRule::InversePower(a) => json!({"rule": "inverse-power", "exponent": rs(a)}),
            DeltaRule::InverseTail => json!({"rule": "inverse-tail"}),
            DeltaRule::HalfPowerOverPrevious => json!({"rule": "half-power-over-previous"}),
        }
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v.get("rule").and_then(Value::as_str) {
            Some("inverse-power") => Ok(DeltaRule::InversePower(rational_field(
                v.get("exponent").ok_or_else(|| Error::Parse("missing `exponent`".into()))?,
            )?)),
            Some("inverse-tail") => Ok(DeltaRule::InverseTail),
            Some("half-power-over-previous") => Ok(DeltaRule::HalfPowerOverPrevious),
            _ => Err(Error::Parse(format!("unknown delta rule {v}"))),
        }
    }
}

impl Alphabet {
    pub fn to_json(&self) -> Value {
        match self {
            Alphabet::Constant(m) => json!({"family": "constant", "params": {"m": m}}),
            Alphabet::Linear { offset } => json!({"family": "linear", "params": {"offset": offset}}),
            Alphabet::Quadratic { scale } => json!({"family": "quadratic", "params": {"scale": scale}}),
            Alphabet::Doubling { scale } => json!({"family": "doubling", "params": {"scale": scale}}),
            Alphabet::TriangularPower => json!({"family": "triangular-power"}),
            Alphabet::DyadicBlocks => json!({"family": "dyadic-blocks"}),
            Alphabet::List { list, repeat } => json!({"list": list, "repeat": repeat_name(*repeat)}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(list) = v.get("list") {
            let list: Vec<u64> = list
                .as_array()
                .ok_or_else(|| Error::Parse("`list` must be an array".into()))?
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| Error::Parse("alphabet sizes are integers".into())))
                .collect::<Result<_>>()?;
            if list.is_empty() {
                return Err(Error::Parse("empty alphabet list".into()));
            }
            return Ok(Alphabet::List { list, repeat: parse_repeat(v.get("repeat"))? });
        }
        let (family, p) = family_of(v)?;
        Ok(match family.as_str() {
            "constant" => Alphabet::Constant(uint_param(&p, "m")?),
            "linear" => Alphabet::Linear { offset: uint_param(&p, "offset")? },
            "quadratic" => Alphabet::Quadratic { scale: uint_param(&p, "scale")? },
            "doubling" => Alphabet::Doubling { scale: uint_param(&p, "scale")? },
            "triangular-power" => Alphabet::TriangularPower,
            "dyadic-blocks" => Alphabet::DyadicBlocks,
            other => return Err(Error::Parse(format!("unknown alphabet family `{other}`"))),
        })
    }
}

impl Measure {
    pub fn to_json(&self) -> Value {
        match self {
            Measure::Uniform => json!({"family": "uniform"}),
            Measure::Ornstein => json!({"family": "ornstein"}),
            Measure::Binary { p0 } => json!({"family": "binary", "params": {"p0": rs(p0)}}),
            Measure::BinaryAlpha { alpha } => json!({"family": "binary-alpha", "params": {"alpha": rs(alpha)}}),
            Measure::BinaryHarmonic => json!({"family": "binary-harmonic"}),
            Measure::PeakSplit => json!({"family": "peak-split"}),
            Measure::GeometricC => json!({"family": "geometric-c"}),
            Measure::TripleBlocks => json!({"family": "triple-blocks"}),
            Measure::TwoInterval { fraction, delta } => json!({
                "family": "two-interval",
                "params": {"fraction": rs(fraction), "delta": delta.to_json()}
            }),
            Measure::ThreeInterval { start, delta } => json!({
                "family": "three-interval",
                "params": {"start": start, "delta": delta.to_json()}
            }),
            Measure::List { weights, repeat } => json!({
                "family": "list",
                "params": {
                    "weights": weights.iter().map(|v| v.iter().map(rs).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "repeat": repeat_name(*repeat)
                }
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let (family, p) = family_of(v)?;
        Ok(match family.as_str() {
            "uniform" => Measure::Uniform,
            "ornstein" => Measure::Ornstein,
            "binary" => Measure::Binary { p0: rational_field(param(&p, "p0")?)? },
            "binary-alpha" => Measure::BinaryAlpha { alpha: rational_field(param(&p, "alpha")?)? },
            "binary-harmonic" => Measure::BinaryHarmonic,
            "peak-split" => Measure::PeakSplit,
            "geometric-c" => Measure::GeometricC,
            "triple-blocks" => Measure::TripleBlocks,
            "two-interval" => Measure::TwoInterval {
                fraction: rational_field(param(&p, "fraction")?)?,
                delta: DeltaRule::from_json(param(&p, "delta")?)?,
            },
            "three-interval" => Measure::ThreeInterval {
                start: uint_param(&p, "start")?,
                delta: DeltaRule::from_json(param(&p, "delta")?)?,
            },
            "list" => {
                let rows = param(&p, "weights")?
                    .as_array()
                    .ok_or_else(|| Error::Parse("`weights` must be an array of arrays".into()))?;
                let weights = rows
                    .iter()
                    .map(|row| {
                        row.as_array()
                            .ok_or_else(|| Error::Parse("each weight row must be an array".into()))?
                            .iter()
                            .map(rational_field)
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                if weights.is_empty() {
                    return Err(Error::Parse("empty weight list".into()));
                }
                Measure::List { weights, repeat: parse_repeat(p.get("repeat"))? }
            }
            other => return Err(Error::Parse(format!("unknown measure family `{other}`"))),
        })
    }
}

impl AnySpec {
    pub fn to_json(&self) -> Value {
        match self {
            AnySpec::Product(s) => json!({
                "kind": s.kind.name(),
                "alphabet": s.alphabet.to_json(),
                "measure": s.measure.to_json(),
            }),
            AnySpec::Shift(s) => {
                let weights = match &s.weights {
                    ShiftWeights::Geometric { base } => json!({"family": "geometric", "params": {"base": rs(base)}}),
                    ShiftWeights::Polynomial { power } => json!({"family": "polynomial", "params": {"power": power}}),
                };
                json!({
                    "kind": "weighted-shift",
                    "index": match s.index { IndexSet::Z => "z", IndexSet::ZPlus => "z+" },
                    "weights": weights,
                })
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| Error::Parse("missing `kind`".into()))?;
        let product = |k: MapKind| -> Result<AnySpec> {
            let alphabet = Alphabet::from_json(v.get("alphabet").ok_or_else(|| Error::Parse("missing `alphabet`".into()))?)?;
            let measure = Measure::from_json(v.get("measure").ok_or_else(|| Error::Parse("missing `measure`".into()))?)?;
            Ok(AnySpec::Product(SystemSpec::new(k, alphabet, measure)))
        };
        match kind {
            "odometer" => product(MapKind::Odometer),
            "diagonal-translation" | "translation" => product(MapKind::Translation),
            "weighted-shift" => {
                let index = match v.get("index").and_then(Value::as_str).unwrap_or("z") {
                    "z" => IndexSet::Z,
                    "z+" | "zplus" => IndexSet::ZPlus,
                    other => return Err(Error::Parse(format!("unknown index set `{other}`"))),
                };
                let (family, p) = family_of(v.get("weights").ok_or_else(|| Error::Parse("missing `weights`".into()))?)?;
                let weights = match family.as_str() {
                    "geometric" => ShiftWeights::Geometric { base: rational_field(param(&p, "base")?)? },
                    "polynomial" => ShiftWeights::Polynomial { power: uint_param(&p, "power")? as u32 },
                    other => return Err(Error::Parse(format!("unknown shift weight family `{other}`"))),
                };
                Ok(AnySpec::Shift(ShiftSpec { index, weights }))
            }
            other => Err(Error::Parse(format!("unknown kind `{other}`"))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(spec: &SystemSpec, i: usize) -> Vec<Rational> {
        spec.weights::<Rational>(i).unwrap()
    }

    #[test]
    fn peak_split_shapes() {
        assert_eq!(peak_split(3), vec![rat(1, 4), rat(1, 2), rat(1, 4)]);
        assert_eq!(peak_split(4), vec![rat(1, 6), rat(1, 3), rat(1, 3), rat(1, 6)]);
        assert_eq!(peak_weight(5), rat(4, 10));
    }

    #[test]
    fn binary_alpha_switches_to_the_formula_once_valid() {
        let s = SystemSpec::new(MapKind::Odometer, Alphabet::Constant(2), Measure::BinaryAlpha { alpha: rat(1, 1) });
        assert_eq!(exact(&s, 1), vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(exact(&s, 2), vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(exact(&s, 3), vec![rat(5, 6), rat(1, 6)]);
        let q = SystemSpec::new(MapKind::Odometer, Alphabet::Constant(2), Measure::BinaryAlpha { alpha: rat(1, 4) });
        assert!(!q.raw_weights(17).unwrap().is_exact());
        assert_eq!(q.raw_weights(16).unwrap(), uniform(2));
    }

    #[test]
    fn triple_blocks_pattern() {
        let s = SystemSpec::new(MapKind::Odometer, Alphabet::Constant(2), Measure::TripleBlocks);
        assert_eq!(exact(&s, 4)[0], rat(1, 2));
        assert_eq!(exact(&s, 5)[0], rat(1, 2));
        assert_eq!(exact(&s, 6)[0], rat(1, 2));
        assert_eq!(exact(&s, 7)[0], rat(2, 3));
        assert_eq!(exact(&s, 9)[0], rat(1, 2));
    }

    #[test]
    fn dyadic_blocks_alphabet() {
        let a = Alphabet::DyadicBlocks;
        assert_eq!(a.size(1).unwrap(), 4);
        assert_eq!(a.size(3).unwrap(), 4);
        assert_eq!(a.size(4).unwrap(), 8);
        assert_eq!(a.size(9).unwrap(), 16);
    }

    #[test]
    fn interval_families_are_probability_vectors() {
        let two = SystemSpec::new(
            MapKind::Translation,
            Alphabet::Doubling { scale: 1 },
            Measure::TwoInterval { fraction: rat(1, 2), delta: DeltaRule::InversePower(rat(2, 1)) },
        );
        two.validate(12).unwrap();
        let three = SystemSpec::new(
            MapKind::Translation,
            Alphabet::Quadratic { scale: 10 },
            Measure::ThreeInterval { start: 5, delta: DeltaRule::InversePower(rat(3, 2)) },
        );
        three.validate(20).unwrap();
    }

    #[test]
    fn approx_weights_become_exact_probabilities() {
        let w = Weights::Approx(vec![0.3, 0.3, 0.4]);
        let v: Vec<Rational> = w.lift();
        assert_eq!(v.iter().sum::<Rational>(), Rational::one());
    }

    #[test]
    fn config_round_trip() {
        let text = r#"{"kind":"odometer","alphabet":{"list":[3,4,2],"repeat":"cycle"},
                       "measure":{"family":"binary-alpha","params":{"alpha":"1/4"}}}"#;
        let spec = AnySpec::parse(text).unwrap();
        assert_eq!(AnySpec::from_json(&spec.to_json()).unwrap(), spec);
        let shift = AnySpec::parse(r#"{"kind":"weighted-shift","index":"z","weights":{"family":"geometric","params":{"base":"1/2"}}}"#).unwrap();
        assert_eq!(AnySpec::from_json(&shift.to_json()).unwrap(), shift);
        assert!(AnySpec::parse(r#"{"kind":"nope"}"#).is_err());
    }
}
