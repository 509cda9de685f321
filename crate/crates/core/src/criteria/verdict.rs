//! Registered rules. Each turns a hypothesis on the criterion sequences into
//! a verdict: decided exactly over one period for eventually periodic specs,
//! over a finite horizon otherwise.
//!
//! Numeric tail test: the window is the second half of the computed range.
//! A limit statement is never reported as satisfied from numbers alone,
//! only as satisfied up to the horizon.

use num_integer::Integer;
use serde::Serialize;
use serde_json::{json, Value};

use super::optimize;
use super::strategy::{self, StrategyInput};
use crate::error::{Error, Result};
use crate::maps::{self, BoundVerdict};
use crate::scalar::{rat, rational_to_f64, Rational, Scalar};
use crate::spec::{AnySpec, IndexSet, MapKind, ShiftSpec, ShiftWeights, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Satisfied,
    SatisfiedUpToHorizon,
    Violated,
    Inconclusive,
}

impl Status {
    pub fn tag(self) -> &'static str {
        match self {
            Status::Satisfied => "satisfied",
            Status::SatisfiedUpToHorizon => "satisfied-up-to-horizon",
            Status::Violated => "violated",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn holds(self) -> bool {
        matches!(self, Status::Satisfied | Status::SatisfiedUpToHorizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ClosedForm,
    NumericHorizon,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub rule: String,
    pub statement: String,
    pub status: Status,
    pub mode: Mode,
    pub evidence: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Odometer,
    Translation,
    Shift,
}

impl Family {
    pub fn of(spec: &AnySpec) -> Family {
        match spec {
            AnySpec::Product(s) if s.kind == MapKind::Odometer => Family::Odometer,
            AnySpec::Product(_) => Family::Translation,
            AnySpec::Shift(_) => Family::Shift,
        }
    }
}

pub struct Rule {
    pub id: &'static str,
    pub families: &'static [Family],
    pub statement: &'static str,
}

use Family::{Odometer as O, Shift as W, Translation as T};

pub const RULES: &[Rule] = &[
    Rule { id: "bounded", families: &[O, T, W], statement: "C_φ is bounded on L_p" },
    Rule {
        id: "hc-spread",
        families: &[O],
        statement: "limsup (η_i − δ_i) > 0; C_𝔬 is then hypercyclic",
    },
    Rule {
        id: "hc-hoeffding",
        families: &[O],
        statement: "some increasing (i_s) has summable carry bands Σ_s ∏_{i_s<i<i_{s+1}} μ_i(m_i−1) and (Σ_{s≤n} θ_{i_s})²/n → ∞; C_𝔬 is then hypercyclic",
    },
    Rule { id: "hc-max-weight", families: &[O], statement: "limsup η_i = 1; C_𝔬 is then hypercyclic" },
    Rule {
        id: "mixing-max-weight",
        families: &[O],
        statement: "η_i → 1; C_𝔬 is then mixing, and conversely when (m_i) is bounded",
    },
    Rule { id: "mixing-kappa", families: &[O], statement: "κ_i → 1, which is equivalent to C_𝔬 being mixing" },
    Rule {
        id: "fhc-gamma-omega",
        families: &[O],
        statement: "limsup min(1 − ω_{i−1}(κ), γ_i) = 1; C_𝔬 is then frequently hypercyclic",
    },
    Rule {
        id: "fhc-max-weight-omega",
        families: &[O],
        statement: "limsup min(1 − ω_{i−1}(κ), η_i) = 1; C_𝔬 is then frequently hypercyclic",
    },
    Rule {
        id: "fhc-bounded-alphabet",
        families: &[O],
        statement: "(m_i) bounded and limsup min(1 − μ_{i−1}(m_{i−1}−1), η_i) = 1; C_𝔬 is then frequently hypercyclic",
    },
    Rule {
        id: "fhc-bounded-mixing",
        families: &[O],
        statement: "(m_i) bounded and η_i → 1; C_𝔬 is then frequently hypercyclic",
    },
    Rule {
        id: "ufhc-shift-interval",
        families: &[O],
        statement: "limsup_i max_j min(γ_i(j), 1 − μ_{i−1}(⟦m_{i−1} − κ j m_{i−1}, m_{i−1}−1⟧)) = 1; C_𝔬 is then U-frequently hypercyclic",
    },
    Rule {
        id: "ufhc-max-weight-interval",
        families: &[O],
        statement: "limsup min(1 − μ_{i−1}(⟦κ m_{i−1}, m_{i−1}−1⟧), η_i) = 1 for some κ < 1; C_𝔬 is then U-frequently hypercyclic",
    },
    Rule {
        id: "power-bounded",
        families: &[O],
        statement: "∏ η_i/δ_i converges; C_𝔬 is then not hypercyclic",
    },
    Rule {
        id: "hc-translation-disjoint",
        families: &[T],
        statement: "limsup β_i = 1 (equivalently limsup γ_n = 1); C_𝔱 is then hypercyclic",
    },
    Rule { id: "mixing-translation-disjoint", families: &[T], statement: "γ_n → 1; C_𝔱 is then mixing" },
    Rule {
        id: "hc-translation-hoeffding",
        families: &[T],
        statement: "limsup γ̃_n = ∞; C_𝔱 is then hypercyclic",
    },
    Rule {
        id: "hc-coprime",
        families: &[T],
        statement: "(m_i) pairwise coprime and sup_I (Σ_{i∈I} θ_i)²/#I = ∞; C_𝔱 is then hypercyclic",
    },
    Rule {
        id: "supercyclic-shift",
        families: &[W],
        statement: "for every i some n_k → ∞ has ν_{i+n_k} ν_{i−n_k} → 0, which is equivalent to C_σ being supercyclic",
    },
    Rule {
        id: "fhc-shift",
        families: &[W],
        statement: "finite total mass, bounded ratios ν_i/ν_{i+1} and no periodic points; C_σ is then frequently hypercyclic",
    },
];

pub fn rule(id: &str) -> Result<&'static Rule> {
    RULES.iter().find(|r| r.id == id).ok_or_else(|| Error::UnknownTheorem(id.to_string()))
}

pub fn rules_for(spec: &AnySpec) -> Vec<&'static Rule> {
    let f = Family::of(spec);
    RULES.iter().filter(|r| r.families.contains(&f)).collect()
}

#[derive(Debug, Clone)]
pub struct EvalParams {
    /// last index i examined
    pub horizon: usize,
    /// last translation shift n examined
    pub shifts: u64,
    pub kappa: Rational,
    pub epsilon: f64,
    /// distance to the limit accepted by the numeric tail test
    pub tol: f64,
    /// exact O(m²) optimizers only up to this alphabet size
    pub quadratic_limit: u64,
    pub gamma_limit: u64,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams {
            horizon: 200,
            shifts: 64,
            kappa: rat(1, 5),
            epsilon: 0.1,
            tol: 0.05,
            quadratic_limit: 4096,
            gamma_limit: 32,
        }
    }
}

pub fn evaluate<S: Scalar>(spec: &AnySpec, id: &str, params: &EvalParams) -> Result<Verdict> {
    let r = rule(id)?;
    let family = Family::of(spec);
    if !r.families.contains(&family) {
        return Err(Error::Domain(format!("rule `{id}` does not apply to this kind of system")));
    }
    let (status, mode, evidence) = match spec {
        AnySpec::Shift(s) => shift_rule(s, id, params),
        AnySpec::Product(s) => product_rule::<S>(s, id, params)?,
    };
    Ok(Verdict { rule: id.to_string(), statement: r.statement.to_string(), status, mode, evidence })
}

/// Every rule that applies to the system, `bounded` first.
pub fn classify<S: Scalar>(spec: &AnySpec, params: &EvalParams) -> Result<Vec<Verdict>> {
    rules_for(spec).into_iter().map(|r| evaluate::<S>(spec, r.id, params)).collect()
}

type Decision = (Status, Mode, Value);

// ---------------------------------------------------------------------------
// sequences

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    LimsupOne,
    LimOne,
    LimsupPositive,
}

/// One sequence value: exact, or only a lower bound for the true entry.
struct Point<S> {
    i: usize,
    value: S,
    exact: bool,
}

/// Streams μ_{i−1}, μ_i over the range; stops at the first index whose
/// weights cannot be produced.
fn run<S: Scalar>(
    spec: &SystemSpec,
    lo: usize,
    hi: usize,
    f: &mut dyn FnMut(usize, Option<&[S]>, &[S]) -> Option<(S, bool)>,
) -> (Vec<Point<S>>, Option<String>) {
    let mut out = Vec::new();
    let mut prev: Option<Vec<S>> = if lo > 1 { spec.weights(lo - 1).ok() } else { None };
    for i in lo..=hi {
        let mu: Vec<S> = match spec.weights(i) {
            Ok(mu) => mu,
            Err(e) => return (out, Some(format!("index {i}: {e}"))),
        };
        if let Some((value, exact)) = f(i, prev.as_deref(), &mu) {
            out.push(Point { i, value, exact });
        }
        prev = Some(mu);
    }
    (out, None)
}

fn holds_exactly<S: Scalar>(target: Target, values: &[S]) -> bool {
    let one = S::one();
    match target {
        Target::LimsupOne => values.iter().any(|v| v.ge_tol(&one)),
        Target::LimOne => values.iter().all(|v| v.ge_tol(&one)),
        Target::LimsupPositive => values.iter().any(|v| *v > S::tol()),
    }
}

fn max_point(points: &[(usize, f64)]) -> (usize, f64) {
    points.iter().cloned().fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
}

fn min_point(points: &[(usize, f64)]) -> (usize, f64) {
    points.iter().cloned().fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
}

/// Tail test over the second half of the computed indices.
fn decide_tail<S: Scalar>(target: Target, points: &[Point<S>], tol: f64) -> (Status, Value) {
    let Some(last) = points.last().map(|p| p.i) else {
        return (Status::Inconclusive, json!({"reason": "no computed values"}));
    };
    let cut = last.div_ceil(2);
    let tail: Vec<(usize, f64)> = points.iter().filter(|p| p.i >= cut).map(|p| (p.i, p.value.as_f64())).collect();
    let lower_bounds = points.iter().filter(|p| p.i >= cut && !p.exact).count();
    let q = last - (last - cut) / 2;
    let early: Vec<(usize, f64)> = tail.iter().cloned().filter(|p| p.0 < q).collect();
    let late: Vec<(usize, f64)> = tail.iter().cloned().filter(|p| p.0 >= q).collect();
    let (imax, vmax) = max_point(&tail);
    let (imin, vmin) = min_point(&tail);
    let rising = |pick: fn(&[(usize, f64)]) -> (usize, f64)| {
        !early.is_empty() && !late.is_empty() && pick(&late).1 > pick(&early).1 + 1e-12
    };
    let status = match target {
        Target::LimsupOne => {
            if vmax >= 1.0 - tol {
                Status::SatisfiedUpToHorizon
            } else if rising(max_point) || lower_bounds > 0 {
                Status::Inconclusive
            } else {
                Status::Violated
            }
        }
        Target::LimOne => {
            if vmin >= 1.0 - tol {
                Status::SatisfiedUpToHorizon
            } else if rising(min_point) || lower_bounds > 0 {
                Status::Inconclusive
            } else {
                Status::Violated
            }
        }
        Target::LimsupPositive => {
            if vmax >= tol {
                Status::SatisfiedUpToHorizon
            } else if lower_bounds > 0 {
                Status::Inconclusive
            } else {
                Status::Violated
            }
        }
    };
    let ev = json!({
        "computed_through": last,
        "tail_from": cut,
        "tail_max": vmax,
        "tail_max_index": imax,
        "tail_min": vmin,
        "tail_min_index": imin,
        "margin": vmin,
        "lower_bound_entries": lower_bounds,
        "tolerance": tol,
    });
    (status, ev)
}

/// Periodic specs: decide over one period past the start (the quantity may
/// look one index back); otherwise the numeric tail test.
fn limit_rule<S: Scalar>(
    spec: &SystemSpec,
    params: &EvalParams,
    target: Target,
    from: usize,
    f: &mut dyn FnMut(usize, Option<&[S]>, &[S]) -> Option<(S, bool)>,
) -> Decision {
    if let Some((start, period)) = spec.periodicity() {
        let lo = (start + 1).max(from);
        let (points, stopped) = run(spec, lo, lo + period - 1, f);
        if stopped.is_none() && points.len() == period && points.iter().all(|p| p.exact) {
            let values: Vec<S> = points.iter().map(|p| p.value.clone()).collect();
            let ok = holds_exactly(target, &values);
            let min = values.iter().cloned().reduce(S::min_of).unwrap();
            let ev = json!({
                "period_start": lo,
                "period": period,
                "period_values": values.iter().map(S::render).collect::<Vec<_>>(),
                "margin": min.as_f64(),
            });
            return (if ok { Status::Satisfied } else { Status::Violated }, Mode::ClosedForm, ev);
        }
    }
    let (points, stopped) = run(spec, from, params.horizon, f);
    let (status, mut ev) = decide_tail(target, &points, params.tol);
    if let Some(s) = stopped {
        ev["stopped"] = Value::String(s);
    }
    (status, Mode::NumericHorizon, ev)
}

// ---------------------------------------------------------------------------
// product systems

/// θ exactly, or the best of a few shifts above the quadratic limit.
fn theta_or_bound<S: Scalar>(mu: &[S], limit: u64) -> (S, bool) {
    let (v, _, exact) = optimize::theta_pick(mu, limit);
    (v, exact)
}

/// β exactly, or the best of a few shifts above the quadratic limit.
fn beta_or_bound<S: Scalar>(mu: &[S], limit: u64) -> (S, bool) {
    let m = mu.len() as u64;
    if m <= limit {
        return (optimize::beta(mu).0, true);
    }
    let candidates = [1, m / 2, m.div_ceil(2), m / 3, 2 * m / 3, m / 4, m / 5, 2 * m / 5, 3 * m / 5];
    let best = candidates.iter().filter(|&&n| n % m != 0).map(|&n| optimize::alpha(mu, n)).fold(S::zero(), S::max_of);
    (best, false)
}

fn one_minus<S: Scalar>(x: S) -> S {
    S::one() - x
}

fn product_rule<S: Scalar>(spec: &SystemSpec, id: &str, p: &EvalParams) -> Result<Decision> {
    let kappa = p.kappa.clone();
    Ok(match id {
        "bounded" => bounded_product::<S>(spec, p)?,
        "hc-spread" => limit_rule::<S>(spec, p, Target::LimsupPositive, 1, &mut |_, _, mu| {
            Some((optimize::eta(mu) - optimize::delta(mu), true))
        }),
        "hc-max-weight" => limit_rule::<S>(spec, p, Target::LimsupOne, 1, &mut |_, _, mu| Some((optimize::eta(mu), true))),
        "mixing-max-weight" => limit_rule::<S>(spec, p, Target::LimOne, 1, &mut |_, _, mu| Some((optimize::eta(mu), true))),
        "mixing-kappa" => {
            let limit = p.quadratic_limit;
            limit_rule::<S>(spec, p, Target::LimOne, 1, &mut |_, _, mu| {
                if mu.len() as u64 <= limit {
                    Some((optimize::kappa(mu).0, true))
                } else {
                    // κ ≥ η
                    Some((optimize::eta(mu), false))
                }
            })
        }
        "fhc-gamma-omega" => {
            let (limit, tol) = (p.gamma_limit, p.tol);
            limit_rule::<S>(spec, p, Target::LimsupOne, 2, &mut |i, prev, mu| {
                let m = spec.m(i).ok()?;
                let left = one_minus(optimize::omega(prev?, m, &kappa));
                if left.as_f64() < 1.0 - 2.0 * tol {
                    // the minimum is already far from 1 whatever γ_i is
                    return Some((left, true));
                }
                if m <= limit {
                    let g = optimize::gamma_odometer(mu);
                    let exact = g.optimizer != optimize::Optimizer::SearchLowerBound;
                    Some((S::min_of(left, g.value), exact))
                } else {
                    Some((S::min_of(left, optimize::eta(mu)), false))
                }
            })
        }
        "fhc-max-weight-omega" => limit_rule::<S>(spec, p, Target::LimsupOne, 2, &mut |i, prev, mu| {
            let m = spec.m(i).ok()?;
            Some((S::min_of(one_minus(optimize::omega(prev?, m, &kappa)), optimize::eta(mu)), true))
        }),
        "fhc-bounded-alphabet" | "fhc-bounded-mixing" if !spec.alphabet.is_bounded() => (
            Status::Violated,
            Mode::ClosedForm,
            json!({"bounded_alphabet": false, "reason": "the alphabet family grows without bound"}),
        ),
        "fhc-bounded-alphabet" => limit_rule::<S>(spec, p, Target::LimsupOne, 2, &mut |_, prev, mu| {
            let prev = prev?;
            Some((S::min_of(one_minus(prev[prev.len() - 1].clone()), optimize::eta(mu)), true))
        }),
        "fhc-bounded-mixing" => limit_rule::<S>(spec, p, Target::LimOne, 1, &mut |_, _, mu| Some((optimize::eta(mu), true))),
        "ufhc-shift-interval" => {
            let limit = p.gamma_limit;
            limit_rule::<S>(spec, p, Target::LimsupOne, 2, &mut |_, prev, mu| {
                let prev = prev?;
                let mp = prev.len() as i64;
                let m = mu.len() as u64;
                let mut best = S::zero();
                let mut exact = true;
                for j in 1..m {
                    let kj = &kappa * Rational::from_integer(j.into());
                    if kj >= Rational::from_integer(1.into()) {
                        break;
                    }
                    let lower = Rational::from_integer(mp.into()) - kj * Rational::from_integer(mp.into());
                    let left = one_minus(optimize::tail_weight(prev, &lower));
                    let g = if m <= limit {
                        let c = optimize::gamma_for_shift(mu, j);
                        exact &= c.optimizer != optimize::Optimizer::SearchLowerBound;
                        c.value
                    } else {
                        exact = false;
                        single_point_gamma(mu, j)
                    };
                    best = S::max_of(best, S::min_of(left, g));
                }
                Some((best, exact))
            })
        }
        "ufhc-max-weight-interval" => limit_rule::<S>(spec, p, Target::LimsupOne, 2, &mut |_, prev, mu| {
            let prev = prev?;
            let lower = &kappa * Rational::from_integer((prev.len() as i64).into());
            Some((S::min_of(one_minus(optimize::tail_weight(prev, &lower)), optimize::eta(mu)), true))
        }),
        "hc-hoeffding" => hoeffding_odometer::<S>(spec, p),
        "power-bounded" => power_bounded::<S>(spec, p),
        "hc-translation-disjoint" => {
            let limit = p.quadratic_limit;
            limit_rule::<S>(spec, p, Target::LimsupOne, 1, &mut |_, _, mu| Some(beta_or_bound(mu, limit)))
        }
        "mixing-translation-disjoint" => mixing_translation::<S>(spec, p),
        "hc-translation-hoeffding" => hoeffding_translation::<S>(spec, p),
        "hc-coprime" => coprime::<S>(spec, p)?,
        other => return Err(Error::UnknownTheorem(other.to_string())),
    })
}

/// min(μ(D), 1 − μ(D+j)) for D = {argmax}, a lower bound for γ(j).
fn single_point_gamma<S: Scalar>(mu: &[S], j: u64) -> S {
    let m = mu.len();
    let a = (0..m).fold(0, |a, x| if mu[x] > mu[a] { x } else { a });
    S::min_of(mu[a].clone(), one_minus(mu[(a + j as usize) % m].clone()))
}

fn bounded_product<S: Scalar>(spec: &SystemSpec, p: &EvalParams) -> Result<Decision> {
    let report = maps::boundedness::<S>(spec, p.horizon)?;
    let sup = report.sup();
    let (status, mode) = match report.verdict {
        BoundVerdict::BoundedClosedForm => (Status::Satisfied, Mode::ClosedForm),
        BoundVerdict::BoundedUpToHorizon => (Status::SatisfiedUpToHorizon, Mode::NumericHorizon),
        BoundVerdict::UnboundedWitness(_) if spec.periodicity().is_some() => (Status::Violated, Mode::ClosedForm),
        BoundVerdict::UnboundedWitness(_) => (Status::Violated, Mode::NumericHorizon),
    };
    let ev = json!({
        "computed_through": report.horizon,
        "sup": sup.render(),
        "norm_estimate_p1": report.norm_estimate(1.0),
        "norm_estimate_p2": report.norm_estimate(2.0),
        "verdict": report.verdict,
    });
    Ok((status, mode, ev))
}

/// Strategy search for the carry-band / Hoeffding hypothesis.
fn hoeffding_odometer<S: Scalar>(spec: &SystemSpec, p: &EvalParams) -> Decision {
    if let Some((start, period)) = spec.periodicity() {
        // some residue class with θ > 0 carries a sequence with widely spaced
        // indices: bands decay geometrically and (Σθ)²/n = nθ² grows
        let mut thetas = Vec::new();
        for i in start..start + period {
            match spec.weights::<S>(i) {
                Ok(mu) => thetas.push(optimize::theta(&mu).0),
                Err(_) => break,
            }
        }
        if thetas.len() == period {
            let ok = thetas.iter().any(|t| *t > S::tol());
            let ev = json!({
                "period_start": start,
                "period": period,
                "period_theta": thetas.iter().map(S::render).collect::<Vec<_>>(),
            });
            return (if ok { Status::Satisfied } else { Status::Violated }, Mode::ClosedForm, ev);
        }
    }
    let limit = p.quadratic_limit;
    let mut last = Vec::new();
    let mut theta = Vec::new();
    let (_, stopped) = run::<S>(spec, 1, p.horizon, &mut |_, _, mu| {
        last.push(mu[mu.len() - 1].as_f64());
        theta.push(theta_or_bound(mu, limit).0.as_f64());
        None
    });
    let input = StrategyInput::new(&last, &theta);
    let found = strategy::search(&input, p.epsilon);
    let mut ev = json!({
        "computed_through": theta.len(),
        "epsilon": p.epsilon,
        "threshold": strategy::hoeffding_threshold(p.epsilon),
        "strategy": found,
    });
    if let Some(s) = stopped {
        ev["stopped"] = Value::String(s);
    }
    let status = if found.is_some() { Status::SatisfiedUpToHorizon } else { Status::Inconclusive };
    (status, Mode::NumericHorizon, ev)
}

/// ∏ η_i/δ_i: exact for periodic specs (it converges iff every factor is 1),
/// otherwise judged by the log-increment over the second half of the horizon.
fn power_bounded<S: Scalar>(spec: &SystemSpec, p: &EvalParams) -> Decision {
    if let Some((start, period)) = spec.periodicity() {
        let mut all_one = true;
        for i in start..start + period {
            if let Ok(mu) = spec.weights::<S>(i) {
                all_one &= optimize::eta(&mu).eq_tol(&optimize::delta(&mu));
            }
        }
        let ev = json!({"period_start": start, "period": period, "all_factors_one": all_one});
        return (if all_one { Status::Satisfied } else { Status::Violated }, Mode::ClosedForm, ev);
    }
    let mut logs = Vec::new();
    let (_, stopped) = run::<S>(spec, 1, p.horizon, &mut |_, _, mu| {
        logs.push((optimize::eta(mu) / optimize::delta(mu)).as_f64().ln());
        None
    });
    let h = logs.len();
    if h < 2 {
        return (Status::Inconclusive, Mode::NumericHorizon, json!({"reason": "no computed values"}));
    }
    let total: f64 = logs.iter().sum();
    let tail: f64 = logs[h / 2..].iter().sum();
    let status = if tail <= p.tol {
        Status::SatisfiedUpToHorizon
    } else if tail >= 1.0 {
        Status::Violated
    } else {
        Status::Inconclusive
    };
    let mut ev = json!({
        "computed_through": h,
        "partial_product": total.exp(),
        "tail_log_increment": tail,
        "tail_from": h / 2 + 1,
        "tolerance": p.tol,
    });
    if let Some(s) = stopped {
        ev["stopped"] = Value::String(s);
    }
    (status, Mode::NumericHorizon, ev)
}

/// Periodic translations: 𝔱^N = Id for N = lcm of the period's alphabet sizes.
pub(crate) fn translation_order(spec: &SystemSpec) -> Option<(usize, usize, u64)> {
    let (start, period) = spec.periodicity()?;
    let mut order = 1u64;
    for i in 1..start + period {
        order = order.lcm(&spec.m(i).ok()?);
    }
    Some((start, period, order))
}

fn mixing_translation<S: Scalar>(spec: &SystemSpec, p: &EvalParams) -> Decision {
    if let Some((start, period, order)) = translation_order(spec) {
        let mut sup = S::zero();
        for i in start..start + period {
            if let Ok(mu) = spec.weights::<S>(i) {
                sup = S::max_of(sup, optimize::beta(&mu).0);
            }
        }
        let ev = json!({"translation_order": order, "sup_gamma": sup.render(), "identity_power": true});
        return (Status::Violated, Mode::ClosedForm, ev);
    }
    let limit = p.quadratic_limit;
    let mut weights: Vec<Vec<S>> = Vec::new();
    let (_, stopped) = run::<S>(spec, 1, p.horizon, &mut |_, _, mu| {
        if mu.len() as u64 <= limit {
            weights.push(mu.to_vec());
        }
        None
    });
    let points: Vec<Point<S>> = (1..=p.shifts)
        .map(|n| {
            let v = weights.iter().map(|mu| optimize::alpha(mu, n)).fold(S::zero(), S::max_of);
            Point { i: n as usize, value: v, exact: false }
        })
        .collect();
    let (status, mut ev) = decide_tail(Target::LimOne, &points, p.tol);
    ev["indices_used"] = json!(weights.len());
    if let Some(s) = stopped {
        ev["stopped"] = Value::String(s);
    }
    (status, Mode::NumericHorizon, ev)
}

fn shift_set(max_m: u64, shifts: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=shifts).collect();
    let mut pw = 1u64;
    while pw < max_m {
        if pw > shifts {
            out.push(pw);
        }
        pw *= 2;
    }
    out
}

fn some_nonuniform<S: Scalar>(spec: &SystemSpec, start: usize, period: usize) -> bool {
    (start..start + period).any(|i| {
        spec.weights::<S>(i).map_or(false, |mu| !optimize::eta(&mu).eq_tol(&optimize::delta(&mu)))
    })
}

fn hoeffding_translation<S: Scalar>(spec: &SystemSpec, p: &EvalParams) -> Decision {
    if let Some((start, period, order)) = translation_order(spec) {
        // θ_{i,n} is periodic in i; one positive entry repeated gives γ̃_n = ∞
        let ok = some_nonuniform::<S>(spec, start, period);
        let ev = json!({
            "translation_order": order,
            "non_uniform_coordinate": ok,
            "note": "non-uniform periodic coordinates make C_𝔱 unbounded",
        });
        return (if ok { Status::Satisfied } else { Status::Violated }, Mode::ClosedForm, ev);
    }
    let mut weights: Vec<Vec<S>> = Vec::new();
    let (_, stopped) = run::<S>(spec, 1, p.horizon, &mut |_, _, mu| {
        if mu.len() as u64 <= 1 << 16 {
            weights.push(mu.to_vec());
        }
        None
    });
    let max_m = weights.iter().map(|w| w.len() as u64).max().unwrap_or(2);
    let mut best = (S::zero(), 0u64, 0usize);
    for n in shift_set(max_m, p.shifts) {
        let thetas: Vec<S> = weights.iter().map(|mu| optimize::theta_shift(mu, n)).collect();
        let (v, set) = optimize::gamma_tilde(&thetas);
        if v > best.0 {
            best = (v, n, set.len());
        }
    }
    let threshold = strategy::hoeffding_threshold(p.epsilon);
    let status = if best.0.as_f64() > threshold { Status::SatisfiedUpToHorizon } else { Status::Inconclusive };
    let mut ev = json!({
        "indices_used": weights.len(),
        "best_shift": best.1,
        "gamma_tilde_lower_bound": best.0.as_f64(),
        "chosen_indices": best.2,
        "threshold": threshold,
        "epsilon": p.epsilon,
    });
    if let Some(s) = stopped {
        ev["stopped"] = Value::String(s);
    }
    (status, Mode::NumericHorizon, ev)
}

fn coprime<S: Scalar>(spec: &SystemSpec, p: &EvalParams) -> Result<Decision> {
    let mut sizes: Vec<u64> = Vec::new();
    for i in 1..=p.horizon {
        let Ok(m) = spec.m(i) else { break };
        if let Some(j) = sizes.iter().position(|&x| x.gcd(&m) > 1) {
            let ev = json!({"pair": [j + 1, i], "sizes": [sizes[j], m]});
            return Ok((Status::Violated, Mode::ClosedForm, ev));
        }
        sizes.push(m);
    }
    let limit = p.quadratic_limit;
    let mut thetas = Vec::new();
    let (_, stopped) = run::<S>(spec, 1, p.horizon, &mut |_, _, mu| {
        thetas.push(theta_or_bound(mu, limit).0);
        None
    });
    let (v, set) = optimize::gamma_tilde(&thetas);
    let threshold = strategy::hoeffding_threshold(p.epsilon);
    let status = if v.as_f64() > threshold { Status::SatisfiedUpToHorizon } else { Status::Inconclusive };
    let mut ev = json!({
        "pairwise_coprime_through": sizes.len(),
        "aggregate_lower_bound": v.as_f64(),
        "chosen_indices": set.len(),
        "threshold": threshold,
    });
    if let Some(s) = stopped {
        ev["stopped"] = Value::String(s);
    }
    Ok((status, Mode::NumericHorizon, ev))
}

// ---------------------------------------------------------------------------
// weighted shifts

fn shift_rule(s: &ShiftSpec, id: &str, p: &EvalParams) -> Decision {
    let base = match &s.weights {
        ShiftWeights::Geometric { base } => Some(rational_to_f64(base)),
        ShiftWeights::Polynomial { .. } => None,
    };
    match id {
        "bounded" => {
            // ν_i/ν_{i+1}: geometric b gives b^{|i|−|i+1|} ∈ {b, 1/b};
            // polynomial p gives ((2+|i|)/(1+|i|))^p ≤ 2^p
            let sup = crate::shift::ratio_bound(s);
            (Status::Satisfied, Mode::ClosedForm, json!({"sup_ratio": sup}))
        }
        "supercyclic-shift" => {
            let window = 3;
            let products = crate::shift::salas_products::<f64>(s, window, p.shifts);
            // beyond n ≥ |i| the geometric product is exactly b^{2n}
            let (ok, reason) = match (s.index, base) {
                (IndexSet::ZPlus, _) => (true, "ν_{i−n} = 0 once n > i"),
                (IndexSet::Z, Some(b)) if b < 1.0 => (true, "ν_{i+n}ν_{i−n} = b^{2n} → 0 for n ≥ |i|"),
                (IndexSet::Z, Some(_)) => (false, "ν_{i+n}ν_{i−n} = b^{2n} does not tend to 0"),
                (IndexSet::Z, None) => (true, "((1+|i+n|)(1+|i−n|))^{−p} → 0"),
            };
            let tail: Vec<Value> = products
                .iter()
                .filter(|(i, n, _)| *i == 0 && (*n == 1 || *n == p.shifts))
                .map(|(_, n, v)| json!({"n": n, "product": v}))
                .collect();
            let monotone = (-window..=window).all(|i| {
                let row: Vec<f64> = products.iter().filter(|(j, n, _)| *j == i && *n as i64 >= i.abs()).map(|t| t.2).collect();
                row.windows(2).all(|w| w[1] <= w[0])
            });
            let ev = json!({"reason": reason, "window": window, "at_zero": tail, "monotone_beyond_abs_i": monotone});
            (if ok { Status::Satisfied } else { Status::Violated }, Mode::ClosedForm, ev)
        }
        "fhc-shift" => {
            let finite = match &s.weights {
                ShiftWeights::Geometric { base } => rational_to_f64(base) < 1.0,
                ShiftWeights::Polynomial { power } => *power >= 2,
            };
            let ev = json!({"finite_mass": finite, "periodic_points": false, "bounded_ratios": true});
            (if finite { Status::Satisfied } else { Status::Violated }, Mode::ClosedForm, ev)
        }
        _ => (Status::Inconclusive, Mode::ClosedForm, json!({})),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{Alphabet, Measure, Repeat};

    fn product(kind: MapKind, alphabet: Alphabet, measure: Measure) -> AnySpec {
        AnySpec::Product(SystemSpec::new(kind, alphabet, measure))
    }

    #[test]
    fn uniform_same_measure_violates_spread_exactly() {
        let s = product(MapKind::Odometer, Alphabet::Constant(3), Measure::Uniform);
        let v = evaluate::<Rational>(&s, "hc-spread", &EvalParams::default()).unwrap();
        assert_eq!((v.status, v.mode), (Status::Violated, Mode::ClosedForm));
        let pb = evaluate::<Rational>(&s, "power-bounded", &EvalParams::default()).unwrap();
        assert_eq!(pb.status, Status::Satisfied);
    }

    #[test]
    fn non_uniform_same_measure_satisfies_spread_exactly() {
        let w = vec![rat(1, 2), rat(1, 4), rat(1, 4)];
        let s = product(MapKind::Odometer, Alphabet::Constant(3), Measure::List { weights: vec![w], repeat: Repeat::Cycle });
        let v = evaluate::<Rational>(&s, "hc-spread", &EvalParams::default()).unwrap();
        assert_eq!((v.status, v.mode), (Status::Satisfied, Mode::ClosedForm));
        let h = evaluate::<Rational>(&s, "hc-hoeffding", &EvalParams::default()).unwrap();
        assert_eq!(h.status, Status::Satisfied);
    }

    #[test]
    fn harmonic_binary_is_fhc_up_to_horizon() {
        let s = product(MapKind::Odometer, Alphabet::Constant(2), Measure::BinaryHarmonic);
        let p = EvalParams { horizon: 100, ..EvalParams::default() };
        for id in ["fhc-gamma-omega", "fhc-bounded-mixing", "mixing-kappa"] {
            let v = evaluate::<Rational>(&s, id, &p).unwrap();
            assert_eq!(v.status, Status::SatisfiedUpToHorizon, "{id}");
        }
    }

    #[test]
    fn growing_alphabet_fails_bounded_alphabet_rules() {
        let s = product(MapKind::Odometer, Alphabet::Linear { offset: 1 }, Measure::Ornstein);
        let v = evaluate::<Rational>(&s, "fhc-bounded-alphabet", &EvalParams::default()).unwrap();
        assert_eq!((v.status, v.mode), (Status::Violated, Mode::ClosedForm));
    }

    #[test]
    fn shift_rules_are_closed_form() {
        let s = AnySpec::Shift(ShiftSpec { index: IndexSet::Z, weights: ShiftWeights::Geometric { base: rat(1, 2) } });
        for v in classify::<f64>(&s, &EvalParams::default()).unwrap() {
            assert_eq!((v.status, v.mode), (Status::Satisfied, Mode::ClosedForm), "{}", v.rule);
        }
        let flat = AnySpec::Shift(ShiftSpec { index: IndexSet::Z, weights: ShiftWeights::Geometric { base: rat(1, 1) } });
        let v = evaluate::<f64>(&flat, "supercyclic-shift", &EvalParams::default()).unwrap();
        assert_eq!(v.status, Status::Violated);
    }

    #[test]
    fn periodic_translation_is_never_mixing() {
        let s = product(MapKind::Translation, Alphabet::List { list: vec![2, 3], repeat: Repeat::Cycle }, Measure::Uniform);
        let v = evaluate::<Rational>(&s, "mixing-translation-disjoint", &EvalParams::default()).unwrap();
        assert_eq!(v.evidence["translation_order"], json!(6));
        assert_eq!(v.status, Status::Violated);
        let c = evaluate::<Rational>(&s, "hc-coprime", &EvalParams::default()).unwrap();
        assert_eq!(c.status, Status::Violated);
    }

    #[test]
    fn unknown_and_misplaced_rules_are_errors() {
        let s = product(MapKind::Odometer, Alphabet::Constant(2), Measure::Uniform);
        assert!(matches!(evaluate::<f64>(&s, "nope", &EvalParams::default()), Err(Error::UnknownTheorem(_))));
        assert!(evaluate::<f64>(&s, "hc-coprime", &EvalParams::default()).is_err());
    }
}
