//! Witnesses for the translation 𝔱(x) = x + (1, 1, …) without carries.
//! Every coordinate moves independently, so most checks reduce to one
//! coordinate and are cross-checked against the product transport.

use num_bigint::BigInt;
use serde_json::json;

use super::*;
use crate::criteria::optimize;
use crate::criteria::strategy::hoeffding_threshold;
use crate::criteria::verdict::translation_order;
use crate::error::{Error, Result};
use crate::maps::{max_step_ratio, InducedBijection};
use crate::scalar::{rational_to_f64, Rational};
use crate::space::{build_truncation, Radix};
use crate::spec::{DeltaRule, MapKind, Measure, SystemSpec};
use crate::transport::ProductView;

fn require_translation(spec: &SystemSpec) -> Result<()> {
    if spec.kind != MapKind::Translation {
        return Err(Error::WrongKind { expected: "translation" });
    }
    Ok(())
}

/// Cumulative weights for cyclic interval measures in O(1).
struct Prefix<S: Scalar> {
    sums: Vec<S>,
}

impl<S: Scalar> Prefix<S> {
    fn new(mu: &[S]) -> Self {
        let mut sums = Vec::with_capacity(mu.len() + 1);
        sums.push(S::zero());
        for w in mu {
            let next = sums.last().unwrap().clone() + w.clone();
            sums.push(next);
        }
        Prefix { sums }
    }

    fn m(&self) -> u64 {
        self.sums.len() as u64 - 1
    }

    /// μ of the cyclic interval {a, a+1, …, a+len−1} mod m.
    fn interval(&self, a: i128, len: u64) -> S {
        let m = self.m();
        if len >= m {
            return self.sums[m as usize].clone();
        }
        let a = a.rem_euclid(m as i128) as u64;
        let end = a + len;
        if end <= m {
            self.sums[end as usize].clone() - self.sums[a as usize].clone()
        } else {
            self.sums[m as usize].clone() - self.sums[a as usize].clone() + self.sums[(end - m) as usize].clone()
        }
    }
}

fn cylinder_at(radices: &[u64], i: usize, mask: Vec<bool>) -> Vec<Vec<bool>> {
    let mut masks: Vec<Vec<bool>> = radices[..i - 1].iter().map(|&m| vec![true; m as usize]).collect();
    masks.push(mask);
    masks
}

fn interval_mask(m: u64, a: u64, len: u64) -> Vec<bool> {
    (0..m).map(|x| (x + m - a % m) % m < len).collect()
}

fn periodic_flag(spec: &SystemSpec) -> Option<Check> {
    let (_, _, order) = translation_order(spec)?;
    Some(Check::no_violations(format!("no power t^N is the identity (t^{order} = Id)"), 1, Method::Exact))
}

// ---------------------------------------------------------------------------
// transitivity from one coordinate

/// One coordinate i and a shift n with μ_i(D) ≥ 1 − ε and (D + n) ∩ D = ∅;
/// B = [Ω_1, …, Ω_{i−1}, D + n] has μ(B) ≤ ε and μ(𝔱^{-n}B) = μ_i(D) ≥ 1 − ε.
pub fn single_coordinate_witness<S: Scalar>(spec: &SystemSpec, epsilon: &Rational, horizon: usize, quadratic_limit: u64) -> Result<WitnessReport> {
    require_translation(spec)?;
    let eps = S::from_rational(epsilon);
    let floor = S::one() - eps.clone();
    let mut found = None;
    for i in 1..=horizon {
        let Ok(mu) = spec.weights::<S>(i) else { break };
        let m = mu.len() as u64;
        let shifts: Vec<u64> = if m <= quadratic_limit {
            (1..m).collect()
        } else {
            vec![m / 2, m.div_ceil(2), m / 3, 2 * m / 3, m / 5, 2 * m / 5]
        };
        for n in shifts.into_iter().filter(|n| n % m != 0) {
            let (a, set) = optimize::disjoint_set_cyclic(&mu, n);
            if a.ge_tol(&floor) {
                found = Some((i, n, set, mu));
                break;
            }
        }
        if found.is_some() {
            break;
        }
    }
    let (i, n, d, mu) = found.ok_or_else(|| Error::NotFoundWithinHorizon(format!("no coordinate <= {horizon} has alpha >= 1 - eps")))?;
    let dn = shift_mask(&d, n);
    let radices = spec.radices(i)?;
    let b = cylinder_at(&radices, i, dn.clone());
    let view = ProductView::<S>::new(spec, i)?;
    let nb = BigInt::from(n);
    let pulled = view.preimage_measure(&b, &nb)?;
    let mu_d = mask_measure(&mu, &d);
    let overlap = mask_measure(&mu, &d.iter().zip(&dn).map(|(x, y)| *x && *y).collect::<Vec<_>>());
    let mut checks = vec![
        Check::compare("mu_i(D and D + n) = 0", &overlap, Relation::Eq, &S::zero(), Method::Exact),
        Check::compare("mu(B) <= eps", &mask_measure(&mu, &dn), Relation::Le, &eps, Method::Exact),
        Check::compare("mu(t^-n B) >= 1 - eps", &pulled, Relation::Ge, &floor, Method::Exact),
        Check::compare("mu(t^-n B) = mu_i(D)", &pulled, Relation::Eq, &mu_d, Method::Exact),
    ];
    checks.extend(periodic_flag(spec));
    let params = json!({"epsilon": epsilon.to_string(), "i": i, "n": n, "mu_d": mu_d.render(), "d_size": mask_members(&d).len(), "m_i": mu.len()});
    Ok(WitnessReport::new("translation-single-coordinate", params, checks))
}

// ---------------------------------------------------------------------------
// transitivity from many coordinates

/// Hoeffding sets over the coordinates chosen by γ̃ for a common shift n:
/// B = B_X ∩ B_Y with μ(B) ≥ 1 − 2ε and 𝔱^n(B) ∩ B = ∅.
pub fn hoeffding_witness<S: Scalar>(
    spec: &SystemSpec,
    epsilon: &Rational,
    horizon: usize,
    shifts: &[u64],
    ladder: &LadderOptions,
) -> Result<WitnessReport> {
    require_translation(spec)?;
    let eps_f = rational_to_f64(epsilon);
    let coords: Vec<Vec<S>> = (1..=horizon).map_while(|i| spec.weights::<S>(i).ok()).collect();
    let threshold = hoeffding_threshold(eps_f);
    let mut found = None;
    for &n in shifts {
        let thetas: Vec<S> = coords.iter().map(|mu| optimize::theta_shift(mu, n)).collect();
        let (value, chosen) = optimize::gamma_tilde(&thetas);
        if value.as_f64() > threshold {
            found = Some((n, chosen, value));
            break;
        }
    }
    let (n, chosen, value) = found.ok_or_else(|| {
        Error::StrategyInfeasible(format!("no shift in {shifts:?} reaches (sum theta)^2 / #I > {threshold:.4} within {} coordinates", coords.len()))
    })?;
    let mut pairs = Vec::new();
    let mut d = Vec::new();
    let mut dk = Vec::new();
    let (mut tx, mut ty, mut theta_sum) = (S::zero(), S::zero(), S::zero());
    let third = S::from_ratio(1, 3);
    for &c in &chosen {
        let mu = &coords[c];
        let set = optimize::drop_set(mu, n);
        let shifted = shift_mask(&set, n);
        let theta = optimize::theta_shift(mu, n);
        tx += mask_measure(mu, &set) - theta.clone() * third.clone();
        ty += mask_measure(mu, &shifted) + theta.clone() * third.clone();
        theta_sum += theta;
        pairs.push(pair_law(mu, &set, &shifted));
        d.push(set);
        dk.push(shifted);
    }
    let k = chosen.len();
    let law = joint_sum_law(&pairs);
    let x_min = (0..=k).find(|&a| S::from_int(a as i64) >= tx).unwrap_or(k + 1);
    let y_max = (0..=k).rev().find(|&b| S::from_int(b as i64) <= ty);
    let mut mu_b = S::zero();
    if let Some(y) = y_max {
        for row in law.iter().skip(x_min) {
            for w in row.iter().take(y + 1) {
                mu_b += w.clone();
            }
        }
    }
    let tail = (-2.0 * theta_sum.as_f64().powi(2) / (9.0 * k as f64)).exp();
    let eps = S::from_rational(epsilon);
    let mut checks = vec![
        Check::compare("mu(B) >= 1 - 2 eps", &mu_b, Relation::Ge, &(S::one() - S::from_int(2) * eps), Method::IndependenceProduct),
        Check::float("exp(-2 (sum theta)^2 / 9 #I) < eps", tail, Relation::Lt, eps_f, Method::ProofBound),
        Check::compare("t_X > t_Y", &tx, Relation::Gt, &ty, Method::Exact),
    ];
    let radices: Vec<u64> = chosen.iter().map(|&c| coords[c].len() as u64).collect();
    let in_b = |x: &[u64]| {
        let sx: usize = x.iter().zip(&d).map(|(v, s)| s[*v as usize] as usize).sum();
        let sy: usize = x.iter().zip(&dk).map(|(v, s)| s[*v as usize] as usize).sum();
        sx >= x_min && y_max.is_some_and(|y| sy <= y)
    };
    let moved = |x: &[u64]| -> Vec<u64> { x.iter().zip(&radices).map(|(v, m)| (v + n) % m).collect() };
    let total = radices.iter().fold(1u128, |a, &m| a.saturating_mul(m as u128));
    if total <= ladder.cap as u128 {
        let radix = Radix::new(radices.clone(), ladder.cap)?;
        let bad = (0..radix.cells()).map(|c| radix.decode(c)).filter(|x| in_b(x) && in_b(&moved(x))).count() as u64;
        checks.push(Check::no_violations("x in B and t^n(x) in B", bad, Method::Exact));
    } else {
        let samplers: Vec<CoordinateSampler> = chosen.iter().map(|&c| CoordinateSampler::new(&coords[c])).collect();
        let mut r = rng(ladder.seed);
        let (mut bad, mut first) = (0, None);
        for _ in 0..ladder.trials {
            let x: Vec<u64> = samplers.iter().map(|s| s.sample(&mut r)).collect();
            if in_b(&x) && in_b(&moved(&x)) {
                bad += 1;
                first.get_or_insert_with(|| format!("{x:?}"));
            }
        }
        let method = Method::Sampled { seed: ladder.seed, trials: ladder.trials, violations: bad, first_violation: first };
        checks.push(Check::no_violations("x in B and t^n(x) in B", bad, method));
    }
    checks.extend(periodic_flag(spec));
    let params = json!({
        "epsilon": epsilon.to_string(),
        "n": n,
        "coordinates": chosen.iter().map(|c| c + 1).collect::<Vec<_>>(),
        "gamma_tilde": value.render(),
        "t_x": tx.render(),
        "t_y": ty.render(),
    });
    Ok(WitnessReport::new("translation-hoeffding", params, checks))
}

// ---------------------------------------------------------------------------
// frequent hypercyclicity

/// Interval construction on one coordinate: with n_i = ⌊m_i/5⌋,
/// D = ⟦m_i − 2n_i, m_i − 1⟧ (the last two fifths), d_i = m_i and the shift
/// 2n_i; for 0 ≤ k ≤ κ d_i, μ_i(D − k) ≥ 1 − ε and μ_i(D − (2n_i + k)) ≤ ε.
pub fn interval_fhc_witness<S: Scalar>(spec: &SystemSpec, epsilon: &Rational, kappa: &Rational, horizon: usize) -> Result<WitnessReport> {
    require_translation(spec)?;
    let eps = S::from_rational(epsilon);
    let floor = S::one() - eps.clone();
    let mut last_seen = None;
    for i in 1..=horizon {
        let Ok(mu) = spec.weights::<S>(i) else { break };
        let m = mu.len() as u64;
        let ni = m / 5;
        if ni == 0 {
            continue;
        }
        let kd = (Rational::from_integer(m.into()) * kappa).floor().to_integer();
        let kd: u64 = kd.try_into().unwrap_or(0);
        let prefix = Prefix::new(&mu);
        let (a, len) = (m - 2 * ni, 2 * ni);
        let (mut worst_in, mut worst_out) = (S::one(), S::zero());
        for k in 0..=kd {
            worst_in = S::min_of(worst_in, prefix.interval(a as i128 - k as i128, len));
            worst_out = S::max_of(worst_out, prefix.interval(a as i128 - (2 * ni + k) as i128, len));
        }
        last_seen = Some((i, worst_in.render(), worst_out.render()));
        if !(worst_in.ge_tol(&floor) && worst_out.le_tol(&eps)) {
            continue;
        }
        let radices = spec.radices(i)?;
        let divides = radices.iter().filter(|&&r| m % r != 0).count() as u64;
        let b = cylinder_at(&radices, i, interval_mask(m, a, len));
        let view = ProductView::<S>::new(spec, i)?;
        let mut mismatch = 0u64;
        for k in [0, kd] {
            let t_in = view.preimage_measure(&b, &BigInt::from(k))?;
            let t_out = view.preimage_measure(&b, &BigInt::from(2 * ni + k))?;
            let p_in = prefix.interval(a as i128 - k as i128, len);
            let p_out = prefix.interval(a as i128 - (2 * ni + k) as i128, len);
            mismatch += (!t_in.eq_tol(&p_in)) as u64 + (!t_out.eq_tol(&p_out)) as u64;
        }
        let mut checks = vec![
            Check::no_violations("d_i is a multiple of m_1, ..., m_i", divides, Method::Exact),
            Check::compare("min_(k <= kappa d) mu_i(D - k) >= 1 - eps", &worst_in, Relation::Ge, &floor, Method::Exact),
            Check::compare("max_(k <= kappa d) mu_i(D - (2 n_i + k)) <= eps", &worst_out, Relation::Le, &eps, Method::Exact),
            Check::no_violations("product transport agrees at k = 0 and k = kappa d", mismatch, Method::Exact),
        ];
        checks.extend(periodic_flag(spec));
        let params = json!({
            "epsilon": epsilon.to_string(),
            "kappa": kappa.to_string(),
            "i": i,
            "m_i": m,
            "n_i": ni,
            "D": [a, m - 1],
            "shift": 2 * ni,
            "d": m,
            "kappa_d": kd,
            "orientation": "flipped",
        });
        return Ok(WitnessReport::new("translation-fhc-interval", params, checks));
    }
    Err(Error::NotFoundWithinHorizon(format!("no coordinate <= {horizon} passes; last tried (i, min in, max out) = {last_seen:?}")))
}

// ---------------------------------------------------------------------------
// (hereditary) 𝒰-frequent hypercyclicity

/// A ⊂ ℕ given by residues modulo q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSet {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

impl ResidueSet {
    pub fn all() -> Self {
        ResidueSet { modulus: 1, residues: vec![0] }
    }

    pub fn contains(&self, k: u64) -> bool {
        self.residues.contains(&(k % self.modulus))
    }

    /// "q:r1,r2,…"; "all" for ℕ.
    pub fn parse(text: &str) -> Result<Self> {
        if text == "all" {
            return Ok(Self::all());
        }
        let bad = || Error::Parse(format!("residue set `{text}`, expected q:r1,r2,..."));
        let (q, rs) = text.split_once(':').ok_or_else(bad)?;
        let modulus: u64 = q.trim().parse().map_err(|_| bad())?;
        let residues = rs.split(',').map(|r| r.trim().parse::<u64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
        if modulus == 0 || residues.is_empty() || residues.iter().any(|&r| r >= modulus) {
            return Err(bad());
        }
        Ok(ResidueSet { modulus, residues })
    }
}

/// Flipped 𝒰-frequent construction on one coordinate: D = the top
/// ⌊m_i/3⌋ symbols, count range m = 2n with n = ⌊m_i/3⌋, and the density
/// of A on ⟦n, 2n⟦ fixes α = dens/2.
pub fn tail_ufhc_witness<S: Scalar>(spec: &SystemSpec, epsilon: &Rational, a_set: &ResidueSet, horizon: usize) -> Result<WitnessReport> {
    require_translation(spec)?;
    let eps = S::from_rational(epsilon);
    let floor = S::one() - eps.clone();
    for i in 1..=horizon {
        let Ok(mu) = spec.weights::<S>(i) else { break };
        let m_i = mu.len() as u64;
        let n = m_i / 3;
        if n == 0 {
            continue;
        }
        let prefix = Prefix::new(&mu);
        let a = m_i - n;
        let mu_d = prefix.interval(a as i128, n);
        if !mu_d.ge_tol(&floor) {
            continue;
        }
        let range = 2 * n;
        let (mut count, mut missed) = (0u64, 0u64);
        for k in 1..=range {
            if !a_set.contains(k) {
                continue;
            }
            let good = prefix.interval(a as i128 - k as i128, n).le_tol(&eps);
            count += good as u64;
            if !good && k >= n {
                missed += 1;
            }
        }
        let dens_hits = (n..2 * n).filter(|&k| a_set.contains(k)).count() as i64;
        let alpha = S::from_int(dens_hits) / S::from_int(2 * n as i64);
        let achieved = S::from_int(count as i64) / S::from_int(range as i64);
        let checks = vec![
            Check::compare("mu_i(D) >= 1 - eps", &mu_d, Relation::Ge, &floor, Method::Exact),
            Check::no_violations("mu_i(D - k) <= eps for k in A and [n, 2n]", missed, Method::Exact),
            Check::compare("count / m >= alpha", &achieved, Relation::Ge, &alpha, Method::Exact),
        ];
        let params = json!({
            "epsilon": epsilon.to_string(),
            "i": i,
            "m_i": m_i,
            "D": [a, m_i - 1],
            "m": range,
            "count": count,
            "A": {"modulus": a_set.modulus, "residues": a_set.residues},
            "alpha": alpha.render(),
            "alpha_achieved": achieved.render(),
            "orientation": "flipped",
        });
        return Ok(WitnessReport::new("translation-ufhc-tail", params, checks));
    }
    Err(Error::NotFoundWithinHorizon(format!("no coordinate <= {horizon} has mu_i(D) >= 1 - eps")))
}

// ---------------------------------------------------------------------------
// rigidity along (m_i)

/// sup_x μ(x − s)/μ(x) on one coordinate.
fn shift_ratio<S: Scalar>(mu: &[S], s: u64) -> S {
    let m = mu.len() as u64;
    let s = s % m;
    if s == 0 {
        return S::one();
    }
    (0..m).map(|x| mu[((x + m - s) % m) as usize].clone() / mu[x as usize].clone()).fold(S::zero(), S::max_of)
}

/// log K ≤ Σ_{j≥2} m_{j−1} ln ρ_j with ρ_j the largest step ratio of μ_j:
/// exact terms up to `depth`, then the closed-form tail Σ_{j>depth} 2^{-j/2}
/// when δ_j m_{j−1} = 2^{-j/2}. Returns (log K, tail certified).
pub fn rigidity_log_bound<S: Scalar>(spec: &SystemSpec, depth: usize) -> Result<(f64, bool)> {
    let radices = spec.radices(depth)?;
    let mut log_k = 0.0;
    for j in 2..=depth {
        let mu: Vec<S> = spec.weights(j)?;
        log_k += radices[j - 2] as f64 * max_step_ratio(&mu).as_f64().ln();
    }
    let certified = match &spec.measure {
        Measure::Uniform => true,
        Measure::ThreeInterval { delta: DeltaRule::HalfPowerOverPrevious, .. } | Measure::TwoInterval { delta: DeltaRule::HalfPowerOverPrevious, .. } => {
            log_k += 2f64.powf(-((depth + 1) as f64) / 2.0) / (1.0 - 0.5f64.sqrt());
            true
        }
        _ => false,
    };
    Ok((log_k, certified))
}

/// 𝔱^{-m_{i−1}} fixes every cylinder of depth ≤ i − 1 (m_j divides m_{i−1}),
/// and on deeper basic cylinders μ(𝔱^{-m_{i−1}}B) ≤ K μ(B): the worst ratio
/// over all depth-≤`depth` basic cylinders is the product of the
/// per-coordinate sups, compared with K for every 2 ≤ i ≤ `max_i`.
pub fn rigidity_probe<S: Scalar>(spec: &SystemSpec, max_i: usize, depth: usize, enumerate_depth: usize) -> Result<WitnessReport> {
    require_translation(spec)?;
    let (log_k, tail_certified) = rigidity_log_bound::<S>(spec, depth)?;
    let k_bound = log_k.exp();
    let radices = spec.radices(max_i.max(depth))?;
    let coords: Vec<Vec<S>> = (1..=depth).map(|i| spec.weights::<S>(i)).collect::<Result<_>>()?;
    let mut fixed_violations = 0u64;
    let mut worst = 0.0f64;
    let mut per_i = Vec::new();
    for i in 2..=max_i {
        let s = radices[i - 2];
        fixed_violations += radices[..i - 1].iter().filter(|&&m| s % m != 0).count() as u64;
        let ratio = coords.iter().fold(S::one(), |acc, mu| acc * shift_ratio(mu, s));
        let r = ratio.as_f64();
        worst = worst.max(r);
        per_i.push(json!({"i": i, "shift": s, "worst_ratio": ratio.render()}));
    }
    let mut checks = vec![
        Check::no_violations("m_j divides m_(i-1) for j <= i - 1 (cylinders fixed)", fixed_violations, Method::Exact),
        Check::float("K < infinity (tail of the series registered)", tail_certified as u8 as f64, Relation::Eq, 1.0, Method::ProofBound),
        Check::float("max_i sup_B mu(t^-m_(i-1) B) / mu(B) <= K", worst, Relation::Le, k_bound, Method::Exact),
    ];
    // the same sup by enumerating every cell of a shallow truncation
    let e = enumerate_depth.min(depth);
    if e >= 1 {
        let space = build_truncation::<S>(spec, e, 1 << 22)?;
        let bij = InducedBijection::of(&space);
        let weights: Vec<S> = (0..space.cells()).map(|c| {
            let x = space.radix.decode(c);
            x.iter().enumerate().fold(S::one(), |acc, (j, &v)| acc * space.coords[j][v as usize].clone())
        }).collect();
        let mut mismatch = 0u64;
        for i in 2..=max_i {
            let s = radices[i - 2] as i128;
            let perm_ratio = (0..space.cells())
                .map(|c| weights[bij.apply(c, -s) as usize].clone() / weights[c as usize].clone())
                .fold(S::zero(), S::max_of);
            let factored = coords[..e].iter().fold(S::one(), |acc, mu| acc * shift_ratio(mu, s as u64));
            mismatch += (!perm_ratio.eq_tol(&factored)) as u64;
            if i - 1 >= e {
                mismatch += (0..space.cells()).filter(|&c| bij.apply(c, s) != c).count() as u64;
            }
        }
        checks.push(Check::no_violations(format!("enumerated depth-{e} cylinders match the factored sup"), mismatch, Method::Exact));
    }
    let params = json!({"max_i": max_i, "depth": depth, "K": k_bound, "log_K": log_k, "per_i": per_i});
    Ok(WitnessReport::new("translation-rigidity", params, checks))
}
