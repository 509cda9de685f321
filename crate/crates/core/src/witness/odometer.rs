//! Witnesses for the odometer 𝔬: transitivity (Hoeffding sets), mixing
//! (disjoint top digits), frequent hypercyclicity and the 𝒰-frequent count.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::json;

use super::*;
use crate::criteria::optimize::{self, GammaChoice};
use crate::criteria::strategy::{self, StrategyInput};
use crate::error::{Error, Result};
use crate::function::period_of;
use crate::maps::add_digits;
use crate::scalar::{rational_to_f64, Rational};
use crate::space::{build_truncation, DepthSet, Radix, SimpleFunction};
use crate::spec::{MapKind, SystemSpec};
use crate::transport::ProductView;

fn require_odometer(spec: &SystemSpec) -> Result<()> {
    if spec.kind != MapKind::Odometer {
        return Err(Error::WrongKind { expected: "odometer" });
    }
    Ok(())
}

fn full(m: u64) -> Vec<bool> {
    vec![true; m as usize]
}

fn digits_str(x: &[u64]) -> String {
    x.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn members_or_count(mask: &[bool]) -> serde_json::Value {
    if mask.len() <= 64 {
        json!(mask_members(mask))
    } else {
        json!({"size": mask.iter().filter(|b| **b).count(), "of": mask.len()})
    }
}

fn cells(radices: &[u64]) -> u128 {
    radices.iter().fold(1u128, |acc, &m| acc.saturating_mul(m as u128))
}

// ---------------------------------------------------------------------------
// transitivity

#[derive(Debug, Clone)]
pub struct TransitivityOptions {
    pub epsilon: Rational,
    pub horizon: usize,
    /// use these indices i_1 < … < i_n instead of searching
    pub indices: Option<Vec<usize>>,
    pub quadratic_limit: u64,
    pub ladder: LadderOptions,
}

impl Default for TransitivityOptions {
    fn default() -> Self {
        TransitivityOptions {
            epsilon: crate::scalar::rat(1, 10),
            horizon: 200,
            indices: None,
            quadratic_limit: 4096,
            ladder: LadderOptions::default(),
        }
    }
}

/// Membership test for B = (B_X ∩ B_Y) ∖ ⋃E_s on the first i_n coordinates.
struct HoeffdingSet {
    indices: Vec<usize>,
    d: Vec<Vec<bool>>,
    dk: Vec<Vec<bool>>,
    radices: Vec<u64>,
    /// ΣX ≥ x_min and ΣY ≤ y_max
    x_min: usize,
    y_max: Option<usize>,
}

impl HoeffdingSet {
    fn contains(&self, x: &[u64]) -> bool {
        let mut sx = 0;
        let mut sy = 0;
        for (s, &i) in self.indices.iter().enumerate() {
            sx += self.d[s][x[i - 1] as usize] as usize;
            sy += self.dk[s][x[i - 1] as usize] as usize;
        }
        if sx < self.x_min || self.y_max.map_or(true, |y| sy > y) {
            return false;
        }
        // outside every carry band E_s
        self.indices.windows(2).all(|w| (w[0] + 1..w[1]).any(|i| x[i - 1] != self.radices[i - 1] - 1))
    }
}

/// B with μ(B) > 1 − 3ε and 𝔬^k(B) ∩ B = ∅, from a sequence of indices with
/// θ_{i_s} large and thin carry bands between them.
pub fn transitivity_witness<S: Scalar>(spec: &SystemSpec, o: &TransitivityOptions) -> Result<WitnessReport> {
    require_odometer(spec)?;
    let eps_f = rational_to_f64(&o.epsilon);
    let (rule, indices) = match &o.indices {
        Some(ix) => {
            if ix.is_empty() || ix[0] == 0 || ix.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Domain("indices must be increasing and start at 1 or later".into()));
            }
            ("given".to_string(), ix.clone())
        }
        None => {
            let mut last = Vec::new();
            let mut theta = Vec::new();
            for i in 1..=o.horizon {
                let Ok(mu) = spec.weights::<S>(i) else { break };
                last.push(mu[mu.len() - 1].as_f64());
                theta.push(optimize::theta_pick(&mu, o.quadratic_limit).0.as_f64());
            }
            let found = strategy::search(&StrategyInput::new(&last, &theta), eps_f).ok_or_else(|| {
                Error::StrategyInfeasible(format!("no index sequence within {} coordinates at ε = {eps_f}", theta.len()))
            })?;
            (found.rule, found.indices)
        }
    };
    let top = *indices.last().unwrap();
    let radices = spec.radices(top)?;
    let coords: Vec<Vec<S>> = (1..=top).map(|i| spec.weights::<S>(i)).collect::<Result<_>>()?;

    let mut d = Vec::new();
    let mut dk = Vec::new();
    let mut pairs = Vec::new();
    let mut shifts = Vec::new();
    let mut thetas = Vec::new();
    let (mut tx, mut ty, mut theta_sum) = (S::zero(), S::zero(), S::zero());
    let third = S::from_ratio(1, 3);
    for &i in &indices {
        let mu = &coords[i - 1];
        let (theta, k, _) = optimize::theta_pick(mu, o.quadratic_limit);
        let set = optimize::drop_set(mu, k);
        let shifted = shift_mask(&set, k);
        tx += mask_measure(mu, &set) - theta.clone() * third.clone();
        ty += mask_measure(mu, &shifted) + theta.clone() * third.clone();
        theta_sum += theta.clone();
        pairs.push(pair_law(mu, &set, &shifted));
        d.push(set);
        dk.push(shifted);
        shifts.push(k);
        thetas.push(theta);
    }
    let n = indices.len();
    let law = joint_sum_law(&pairs);
    let x_min = (0..=n).find(|&a| S::from_int(a as i64) >= tx).unwrap_or(n + 1);
    let y_max = (0..=n).rev().find(|&b| S::from_int(b as i64) <= ty);
    let (mut p_xy, mut p_x, mut p_y) = (S::zero(), S::zero(), S::zero());
    for (a, row) in law.iter().enumerate() {
        for (b, w) in row.iter().enumerate() {
            let in_x = a >= x_min;
            let in_y = y_max.is_some_and(|y| b <= y);
            if in_x {
                p_x += w.clone();
            }
            if in_y {
                p_y += w.clone();
            }
            if in_x && in_y {
                p_xy += w.clone();
            }
        }
    }
    let bands: Vec<S> = indices
        .windows(2)
        .map(|w| (w[0] + 1..w[1]).fold(S::one(), |acc, i| acc * coords[i - 1][radices[i - 1] as usize - 1].clone()))
        .collect();
    let band_sum = bands.iter().cloned().fold(S::zero(), |a, b| a + b);
    let mu_b = bands.iter().fold(p_xy, |acc, e| acc * (S::one() - e.clone()));
    let tail = (-2.0 * theta_sum.as_f64().powi(2) / (9.0 * n as f64)).exp();

    let eps = S::from_rational(&o.epsilon);
    let mut checks = vec![
        Check::compare("mu(B) > 1 - 3 eps", &mu_b, Relation::Gt, &(S::one() - S::from_int(3) * eps.clone()), Method::IndependenceProduct),
        Check::compare("sum_s mu(E_s) < eps", &band_sum, Relation::Lt, &eps, Method::Exact),
        Check::float("exp(-2 (sum theta)^2 / 9n) < eps", tail, Relation::Lt, eps_f, Method::ProofBound),
        Check::float("mu(Omega \\ B_X) <= Hoeffding tail", (S::one() - p_x).as_f64(), Relation::Le, tail * (1.0 + 1e-12), Method::Exact),
        Check::float("mu(Omega \\ B_Y) <= Hoeffding tail", (S::one() - p_y).as_f64(), Relation::Le, tail * (1.0 + 1e-12), Method::Exact),
        Check::compare("t_X > t_Y", &tx, Relation::Gt, &ty, Method::Exact),
    ];

    let mut k = BigInt::zero();
    let mut kdig = vec![0u64; top];
    for (s, &i) in indices.iter().enumerate() {
        k += place_value(&radices, i) * shifts[s];
        kdig[i - 1] = shifts[s];
    }
    let set = HoeffdingSet { indices: indices.clone(), d, dk, radices: radices.clone(), x_min, y_max };
    let image_in_b = |x: &[u64]| set.contains(&add_digits(&radices, x, &kdig).0);
    let total = cells(&radices);
    let mut sampled_in_b = None;
    if total <= o.ladder.cap as u128 {
        let radix = Radix::new(radices.clone(), o.ladder.cap)?;
        let mut bad = 0;
        for c in 0..radix.cells() {
            let x = radix.decode(c);
            if set.contains(&x) && image_in_b(&x) {
                bad += 1;
            }
        }
        checks.push(Check::no_violations("x in B and o^k(x) in B", bad, Method::Exact));
    } else {
        let samplers: Vec<CoordinateSampler> = coords.iter().map(|mu| CoordinateSampler::new(mu)).collect();
        let mut r = rng(o.ladder.seed);
        let (mut bad, mut hits, mut first) = (0u64, 0u64, None);
        for _ in 0..o.ladder.trials {
            let x: Vec<u64> = samplers.iter().map(|s| s.sample(&mut r)).collect();
            if !set.contains(&x) {
                continue;
            }
            hits += 1;
            if image_in_b(&x) {
                bad += 1;
                first.get_or_insert_with(|| digits_str(&x));
            }
        }
        sampled_in_b = Some(hits);
        let method = Method::Sampled { seed: o.ladder.seed, trials: o.ladder.trials, violations: bad, first_violation: first };
        checks.push(Check::no_violations("x in B and o^k(x) in B", bad, method));
    }

    let params = json!({
        "epsilon": o.epsilon.to_string(),
        "strategy": rule,
        "indices": indices,
        "theta": thetas.iter().map(S::render).collect::<Vec<_>>(),
        "shifts": shifts,
        "k": k.to_string(),
        "t_x": tx.render(),
        "t_y": ty.render(),
        "mu_bx_and_by": law_mass(&law, x_min, y_max).render(),
        "sampled_points_in_b": sampled_in_b,
        "cells": total.to_string(),
    });
    Ok(WitnessReport::new("transitivity", params, checks))
}

fn law_mass<S: Scalar>(law: &[Vec<S>], x_min: usize, y_max: Option<usize>) -> S {
    let Some(y) = y_max else { return S::zero() };
    law.iter().skip(x_min).flat_map(|row| row.iter().take(y + 1)).cloned().fold(S::zero(), |a, b| a + b)
}

// ---------------------------------------------------------------------------
// mixing

/// Digits of k ≥ 1 in the mixed radix of the system, least significant first;
/// the last digit is nonzero.
pub fn odometer_digits(spec: &SystemSpec, k: &BigInt) -> Result<Vec<u64>> {
    if !k.is_positive() {
        return Err(Error::Domain("k must be positive".into()));
    }
    let mut rest = k.clone();
    let mut out = Vec::new();
    let mut i = 1;
    while !rest.is_zero() {
        let m = BigInt::from(spec.m(i)?);
        out.push((&rest % &m).to_u64().unwrap_or(0));
        rest /= m;
        i += 1;
    }
    Ok(out)
}

/// B = [Ω_1, …, Ω_{l−1}, D_l, D_{l+1}] with μ(B) ≥ 1 − ε and 𝔬^k(B) ∩ B = ∅,
/// where l is the top digit of k.
pub fn mixing_witness<S: Scalar>(spec: &SystemSpec, k: &BigInt, epsilon: &Rational, ladder: &LadderOptions) -> Result<WitnessReport> {
    require_odometer(spec)?;
    let digits = odometer_digits(spec, k)?;
    let l = digits.len();
    let kl = digits[l - 1];
    let radices = spec.radices(l + 1)?;
    let ml = radices[l - 1];
    let mu_l: Vec<S> = spec.weights(l)?;
    let mu_top: Vec<S> = spec.weights(l + 1)?;
    let d1 = optimize::disjoint_set_zplus(&mu_l, kl).1;
    let d2 = if kl == ml - 1 { full(ml) } else { optimize::disjoint_set_zplus(&mu_l, kl + 1).1 };
    let dl: Vec<bool> = d1.iter().zip(&d2).map(|(a, b)| *a && *b).collect();
    // the wrap x_{l+1} = m − 1 → 0 also carries, so D_{l+1} avoids D_{l+1} + 1 mod m
    let dtop = optimize::disjoint_set_cyclic(&mu_top, 1).1;
    let dtop_line = optimize::disjoint_set_zplus(&mu_top, 1).1;

    let mut masks: Vec<Vec<bool>> = radices[..l - 1].iter().map(|&m| full(m)).collect();
    masks.push(dl.clone());
    masks.push(dtop.clone());
    let view = ProductView::<S>::new(spec, l + 1)?;
    let mu_b = mask_measure(&mu_l, &dl) * mask_measure(&mu_top, &dtop);
    let zero = BigInt::zero();
    let overlap = view.boolean_measure(&[(zero.clone(), &masks), (k.clone(), &masks)], |b| b == 3)?;
    let mut line_masks = masks.clone();
    line_masks[l] = dtop_line.clone();
    let line_overlap = view.boolean_measure(&[(zero, &line_masks), (k.clone(), &line_masks)], |b| b == 3)?;

    let eps = S::from_rational(epsilon);
    let floor = S::one() - eps.clone();
    if mu_b < floor && !mu_b.ge_tol(&floor) {
        return Err(Error::HypothesisUnavailable(format!(
            "at top digit l = {l}: mu(B) = {} < 1 - eps; kappa is not yet close to 1",
            mu_b.render()
        )));
    }
    let mut checks = vec![
        Check::compare("mu(B) >= 1 - eps", &mu_b, Relation::Ge, &floor, Method::Exact),
        Check::compare("mu(B and o^-k B) = 0", &overlap, Relation::Eq, &S::zero(), Method::Exact),
    ];
    let total = cells(&radices);
    let kdig: Vec<u64> = digits.iter().copied().chain([0]).collect();
    let in_b = |x: &[u64]| dl[x[l - 1] as usize] && dtop[x[l] as usize];
    if total <= ladder.cap as u128 {
        let radix = Radix::new(radices.clone(), ladder.cap)?;
        let bad = (0..radix.cells())
            .map(|c| radix.decode(c))
            .filter(|x| in_b(x) && in_b(&add_digits(&radices, x, &kdig).0))
            .count() as u64;
        checks.push(Check::no_violations("x in B and o^k(x) in B", bad, Method::Exact));
    } else {
        let samplers: Vec<CoordinateSampler> =
            (1..=l + 1).map(|i| spec.weights::<S>(i).map(|mu| CoordinateSampler::new(&mu))).collect::<Result<_>>()?;
        let mut r = rng(ladder.seed);
        let (mut bad, mut first) = (0, None);
        for _ in 0..ladder.trials {
            let x: Vec<u64> = samplers.iter().map(|s| s.sample(&mut r)).collect();
            if in_b(&x) && in_b(&add_digits(&radices, &x, &kdig).0) {
                bad += 1;
                first.get_or_insert_with(|| digits_str(&x));
            }
        }
        let method = Method::Sampled { seed: ladder.seed, trials: ladder.trials, violations: bad, first_violation: first };
        checks.push(Check::no_violations("x in B and o^k(x) in B", bad, method));
    }
    let third = S::one() - eps / S::from_int(3);
    let params = json!({
        "k": k.to_string(),
        "digits": digits,
        "top_digit": l,
        "d_l": members_or_count(&dl),
        "d_next": members_or_count(&dtop),
        "mu_d_l": mask_measure(&mu_l, &dl).render(),
        "mu_d_next": mask_measure(&mu_top, &dtop).render(),
        "hypothesis": {
            "bound": third.render(),
            "mu_d_prime": mask_measure(&mu_l, &d1).render(),
            "mu_d_second": mask_measure(&mu_l, &d2).render(),
            "mu_d_next_line": mask_measure(&mu_top, &dtop_line).render(),
        },
        "line_choice_overlap": line_overlap.render(),
    });
    Ok(WitnessReport::new("mixing", params, checks))
}

// ---------------------------------------------------------------------------
// frequent hypercyclicity

#[derive(Debug, Clone)]
pub struct FhcOptions {
    pub epsilon: Rational,
    pub kappa: Rational,
    pub horizon: usize,
    /// seeded shifts k in addition to the endpoints 0 and ⌊κd⌋
    pub samples: u64,
    /// shifts for the function-level check (0 disables it)
    pub function_samples: u64,
    pub seed: u64,
}

impl Default for FhcOptions {
    fn default() -> Self {
        FhcOptions {
            epsilon: crate::scalar::rat(1, 20),
            kappa: crate::scalar::rat(1, 8),
            horizon: 200,
            samples: 1000,
            function_samples: 64,
            seed: LadderOptions::default().seed,
        }
    }
}

struct FhcLevel<S: Scalar> {
    n_index: usize,
    omega: S,
    gamma: GammaChoice<S>,
}

fn find_fhc_level<S: Scalar>(spec: &SystemSpec, o: &FhcOptions) -> Result<FhcLevel<S>> {
    let delta = S::from_rational(&o.epsilon) / S::from_int(2);
    let mut prev: Vec<S> = spec.weights(1)?;
    for n in 2..=o.horizon {
        let Ok(mu) = spec.weights::<S>(n) else { break };
        let omega = optimize::omega(&prev, mu.len() as u64, &o.kappa);
        if omega < delta {
            let gamma = optimize::gamma_odometer(&mu);
            if S::one() - gamma.value.clone() < delta {
                return Ok(FhcLevel { n_index: n, omega, gamma });
            }
        }
        prev = mu;
    }
    Err(Error::HypothesisUnavailable(format!("no N <= {} with omega_(N-1) < eps/2 and 1 - gamma_N < eps/2", o.horizon)))
}

/// (H_κ) for B = [Ω_1, …, Ω_{N−1}, D_N + j_N], n = j_N M_N, d = M_{N+1}.
pub fn fhc_witness<S: Scalar>(spec: &SystemSpec, o: &FhcOptions) -> Result<WitnessReport> {
    require_odometer(spec)?;
    let level = find_fhc_level::<S>(spec, o)?;
    let nn = level.n_index;
    let radices = spec.radices(nn)?;
    let mu: Vec<S> = spec.weights(nn)?;
    let dn = level.gamma.set.clone();
    let j = level.gamma.shift;
    let dj = shift_mask(&dn, j);
    let mut b: Vec<Vec<bool>> = radices[..nn - 1].iter().map(|&m| full(m)).collect();
    let mut b_prime = b.clone();
    b.push(dj.clone());
    b_prime.push(dn.clone());
    let big_m = place_value(&radices, nn);
    let n = &big_m * j;
    let d = &big_m * radices[nn - 1];
    let kd = (Rational::from_integer(d.clone()) * &o.kappa).floor().to_integer();
    let eps = S::from_rational(&o.epsilon);
    let one = S::one();
    let (mu_dj, mu_d) = (mask_measure(&mu, &dj), mask_measure(&mu, &dn));
    let upper = mu_dj.clone() + level.omega.clone();
    let lower = mu_d.clone() - level.omega.clone();
    let kappa_mn = S::from_rational(&o.kappa) * S::from_int(radices[nn - 1] as i64);

    let view = ProductView::<S>::new(spec, nn)?;
    let zero = BigInt::zero();
    let shifted_b = view.boolean_measure(&[(n.clone(), &b), (zero, &b_prime)], |x| x == 1 || x == 2)?;
    let mut checks = vec![
        Check::compare("kappa m_N < 1", &kappa_mn, Relation::Lt, &one, Method::Exact),
        Check::compare("mu_N(D_N + j_N) + omega_(N-1) <= eps", &upper, Relation::Le, &eps, Method::ProofBound),
        Check::compare("mu_N(D_N) - omega_(N-1) >= 1 - eps", &lower, Relation::Ge, &(one.clone() - eps.clone()), Method::ProofBound),
        Check::compare("mu(o^-n B symmetric difference B') = 0", &shifted_b, Relation::Eq, &S::zero(), Method::Exact),
    ];

    let mut r = rng(o.seed);
    let mut ks = vec![BigInt::zero(), kd.clone()];
    ks.extend((0..o.samples).map(|_| random_upto(&mut r, &kd)));
    let (mut worst_low, mut worst_high) = (S::zero(), one.clone());
    let (mut bad_low, mut bad_high, mut bad_bound) = (0u64, 0u64, 0u64);
    let (mut first_low, mut first_high, mut first_bound) = (None, None, None);
    for k in &ks {
        let low = view.preimage_measure(&b, k)?;
        let high = view.preimage_measure(&b, &(&n + k))?;
        if !low.le_tol(&eps) {
            bad_low += 1;
            first_low.get_or_insert_with(|| k.to_string());
        }
        if !high.ge_tol(&(one.clone() - eps.clone())) {
            bad_high += 1;
            first_high.get_or_insert_with(|| k.to_string());
        }
        if !low.le_tol(&upper) || !high.ge_tol(&lower) {
            bad_bound += 1;
            first_bound.get_or_insert_with(|| k.to_string());
        }
        worst_low = S::max_of(worst_low, low);
        worst_high = S::min_of(worst_high, high);
    }
    let trials = ks.len() as u64;
    let sampled = |violations, first| Method::Sampled { seed: o.seed, trials, violations, first_violation: first };
    checks.push(Check::compare("max_k mu(o^-k B) <= eps", &worst_low, Relation::Le, &eps, sampled(bad_low, first_low)));
    checks.push(Check::compare("min_k mu(o^-(n+k) B) >= 1 - eps", &worst_high, Relation::Ge, &(one.clone() - eps.clone()), sampled(bad_high, first_high)));
    checks.push(Check::no_violations("exact transport within the proof bound", bad_bound, sampled(bad_bound, first_bound)));

    let mut params = json!({
        "epsilon": o.epsilon.to_string(),
        "kappa": o.kappa.to_string(),
        "N": nn,
        "D_N": members_or_count(&dn),
        "j_N": j,
        "gamma_N": level.gamma.value.render(),
        "gamma_optimizer": level.gamma.optimizer.tag(),
        "omega_prev": level.omega.render(),
        "n": n.to_string(),
        "d": d.to_string(),
        "kappa_d": kd.to_string(),
    });
    if o.function_samples > 0 && nn > 3 {
        let (extra, info) = function_level::<S>(spec, &view, &b, &n, &d, o)?;
        checks.extend(extra);
        params["function_level"] = info;
    }
    Ok(WitnessReport::new("frequent-hypercyclicity", params, checks))
}

/// Lifts (H_κ) to functions: for f = 1_C with C a depth-3 cylinder and
/// g = 1_{B∩C}, ‖C^k g‖_1 and ‖C^{n'+k} g − C^k f‖_1 stay below ε for
/// k ≤ κd/2, where n' is the first multiple of per(f) above n.
fn function_level<S: Scalar>(
    spec: &SystemSpec,
    view: &ProductView<S>,
    b: &[Vec<bool>],
    n: &BigInt,
    d: &BigInt,
    o: &FhcOptions,
) -> Result<(Vec<Check>, serde_json::Value)> {
    let space = build_truncation::<S>(spec, 3, 1 << 20)?;
    let r3 = space.radix.radices().to_vec();
    let cyl = DepthSet::cylinder(&r3, &[0, 0, 0]);
    let f = SimpleFunction::indicator(&space, &cyl);
    let per = period_of(&space, &f);
    let m4 = place_value(&spec.radices(4)?, 4);
    let per_big = BigInt::from(per);
    let n2 = ((n + &per_big - BigInt::one()) / &per_big) * &per_big;
    let kappa2 = &o.kappa / Rational::from_integer(2.into());
    let kd2 = (Rational::from_integer(d.clone()) * &kappa2).floor().to_integer();
    let kd = (Rational::from_integer(d.clone()) * &o.kappa).floor().to_integer();
    let c: Vec<Vec<bool>> = r3.iter().map(|&m| (0..m).map(|x| x == 0).collect()).collect();
    let eps = S::from_rational(&o.epsilon);

    let mut checks = vec![
        Check::compare("per(f) = M_4", &S::from_int(per as i64), Relation::Eq, &S::from_int(m4.to_i64().unwrap_or(-1)), Method::Exact),
        Check::compare(
            "(n' - n) + kappa d / 2 <= kappa d",
            &S::from_rational(&Rational::from_integer(&n2 - n + &kd2)),
            Relation::Le,
            &S::from_rational(&Rational::from_integer(kd.clone())),
            Method::Exact,
        ),
    ];
    let mut r = rng(o.seed ^ 0xf00d);
    let mut ks = vec![BigInt::zero(), kd2.clone()];
    ks.extend((0..o.function_samples).map(|_| random_upto(&mut r, &kd2)));
    let (mut worst_g, mut worst_diff) = (S::zero(), S::zero());
    let (mut bad, mut first) = (0u64, None);
    for k in &ks {
        let g = view.boolean_measure(&[(k.clone(), b), (k.clone(), &c)], |x| x == 3)?;
        let shift = &n2 + k;
        let diff = view.boolean_measure(&[(k.clone(), &c), (shift.clone(), b), (shift, &c)], |x| (x & 1 == 1) != (x & 6 == 6))?;
        if !g.le_tol(&eps) || !diff.le_tol(&eps) {
            bad += 1;
            first.get_or_insert_with(|| k.to_string());
        }
        worst_g = S::max_of(worst_g, g);
        worst_diff = S::max_of(worst_diff, diff);
    }
    let method = |violations, first: Option<String>| Method::Sampled { seed: o.seed ^ 0xf00d, trials: ks.len() as u64, violations, first_violation: first };
    checks.push(Check::compare("max_k ||C^k g||_1 <= eps", &worst_g, Relation::Le, &eps, method(bad, first.clone())));
    checks.push(Check::compare("max_k ||C^(n'+k) g - C^k f||_1 <= eps", &worst_diff, Relation::Le, &eps, method(bad, first)));
    let info = json!({"cylinder": [0, 0, 0], "period": per, "n_prime": n2.to_string(), "kappa_prime": kappa2.to_string()});
    Ok((checks, info))
}

// ---------------------------------------------------------------------------
// 𝒰-frequent hypercyclicity

#[derive(Debug, Clone)]
pub struct UfhcOptions {
    pub epsilon: Rational,
    pub kappa: Rational,
    pub horizon: usize,
    /// largest counting range m that is transported exactly
    pub max_count: u64,
}

impl Default for UfhcOptions {
    fn default() -> Self {
        UfhcOptions { epsilon: crate::scalar::rat(1, 2), kappa: crate::scalar::rat(1, 5), horizon: 64, max_count: 1 << 16 }
    }
}

/// Entry k−1 says μ(Ω ∖ φ^{-k}B) ≤ ε, for k ∈ ⟦1, m⟧.
pub fn qualifying_shifts<S: Scalar>(view: &ProductView<S>, b: &[Vec<bool>], m: u64, eps: &S) -> Result<Vec<bool>> {
    (1..=m).map(|k| Ok((S::one() - view.preimage_measure(b, &BigInt::from(k))?).le_tol(eps))).collect()
}

/// B = [Ω_1, …, Ω_{N−1}, D_N + j_N] with μ(B) < ε; counts k ∈ ⟦1, m⟧ with
/// μ(Ω ∖ 𝔬^{-k}B) ≤ ε for m = ⌊(1+κ)n⌋ and compares with κ/(1+κ).
pub fn ufhc_count<S: Scalar>(spec: &SystemSpec, o: &UfhcOptions) -> Result<WitnessReport> {
    require_odometer(spec)?;
    let half = S::from_rational(&o.epsilon) / S::from_int(2);
    let mut prev: Vec<S> = spec.weights(1)?;
    let mut found = None;
    'levels: for nn in 2..=o.horizon {
        let Ok(mu) = spec.weights::<S>(nn) else { break };
        let mp = prev.len() as i64;
        for j in 1..mu.len() as u64 {
            // μ_{N−1}(⟦m − κ j m, m − 1⟧) grows with j
            let lo = Rational::from_integer(mp.into()) - &o.kappa * Rational::from_integer((j as i64 * mp).into());
            let tail = optimize::tail_weight(&prev, &lo);
            if tail >= half {
                break;
            }
            let g = optimize::gamma_for_shift(&mu, j);
            if S::one() - g.value.clone() < half {
                found = Some((nn, j, g, tail, mu.clone()));
                break 'levels;
            }
        }
        prev = mu;
    }
    let (nn, j, g, tail, mu) = found.ok_or_else(|| Error::NotFoundWithinHorizon(format!("no N <= {} meets the three smallness conditions", o.horizon)))?;
    let radices = spec.radices(nn)?;
    let n = place_value(&radices, nn) * j;
    let m_big = (Rational::from_integer(n.clone()) * (Rational::one() + &o.kappa)).floor().to_integer();
    let m = m_big.to_u64().filter(|&m| m <= o.max_count).ok_or_else(|| {
        Error::NotFoundWithinHorizon(format!("first level N = {nn} needs m = {m_big}, above the count limit {}", o.max_count))
    })?;
    let dj = shift_mask(&g.set, j);
    let mut b: Vec<Vec<bool>> = radices[..nn - 1].iter().map(|&r| full(r)).collect();
    b.push(dj.clone());
    let view = ProductView::<S>::new(spec, nn)?;
    let eps = S::from_rational(&o.epsilon);
    let n_u = n.to_u64().unwrap_or(u64::MAX);
    let kn = (Rational::from_integer(n.clone()) * &o.kappa).floor().to_integer().to_u64().unwrap_or(0);
    let good = qualifying_shifts(&view, &b, m, &eps)?;
    let count = good.iter().filter(|g| **g).count() as u64;
    let missed = (n_u..=n_u.saturating_add(kn)).filter(|&k| k >= 1 && k <= m && !good[k as usize - 1]).count() as u64;
    let alpha = S::from_rational(&o.kappa) / (S::one() + S::from_rational(&o.kappa));
    let achieved = S::from_int(count as i64) / S::from_int(m as i64);
    let checks = vec![
        Check::compare("mu(B) < eps", &mask_measure(&mu, &dj), Relation::Lt, &eps, Method::Exact),
        Check::compare("mu_(N-1)([m - kappa j m, m-1]) < eps/2", &tail, Relation::Lt, &half, Method::Exact),
        Check::compare("mu_N(D_N) > 1 - eps/2", &mask_measure(&mu, &g.set), Relation::Gt, &(S::one() - half.clone()), Method::Exact),
        Check::no_violations("every k in [n, n + kappa n] is counted", missed, Method::Exact),
        Check::compare("count / m >= kappa / (1 + kappa)", &achieved, Relation::Ge, &alpha, Method::Exact),
    ];
    let params = json!({
        "epsilon": o.epsilon.to_string(),
        "kappa": o.kappa.to_string(),
        "N": nn,
        "j_N": j,
        "D_N": members_or_count(&g.set),
        "n": n.to_string(),
        "m": m,
        "count": count,
        "alpha_predicted": alpha.render(),
        "alpha_achieved": achieved.render(),
    });
    Ok(WitnessReport::new("u-frequent-count", params, checks))
}
