//! Prefixes of all criterion sequences with the optimizer used for each entry.

use serde::Serialize;

use super::optimize::{self, Optimizer};
use crate::error::Result;
use crate::maps::max_step_ratio;
use crate::scalar::{rat, Rational, Scalar};
use crate::spec::{MapKind, SystemSpec};

#[derive(Debug, Clone, Serialize)]
pub struct Entry<S: Scalar> {
    #[serde(skip)]
    pub value: S,
    /// maximizing (or minimizing) shift
    pub arg: u64,
    pub optimizer: Optimizer,
}

#[derive(Debug, Clone)]
pub struct TableOptions {
    /// κ for ω_i(κ)
    pub kappa: Rational,
    /// θ, κ and β cost O(m²); skipped above this alphabet size
    pub quadratic_limit: u64,
    /// γ (odometer) skipped above this alphabet size
    pub gamma_limit: u64,
    /// translation shifts n for γ_n, γ̃_n rows
    pub shifts: u64,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { kappa: rat(1, 5), quadratic_limit: 4096, gamma_limit: 32, shifts: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct IndexRow<S: Scalar> {
    pub i: usize,
    pub m: u64,
    pub eta: S,
    pub delta: S,
    pub theta: Option<Entry<S>>,
    /// odometer only
    pub kappa: Option<Entry<S>>,
    /// odometer only
    pub gamma: Option<Entry<S>>,
    /// odometer only; needs m_{i+1}
    pub omega: Option<S>,
    /// translation only
    pub beta: Option<Entry<S>>,
}

#[derive(Debug, Clone)]
pub struct ShiftRow<S: Scalar> {
    pub n: u64,
    /// max over indices in the table of α_{i,n}; a lower bound for γ_n
    pub gamma: S,
    pub gamma_index: usize,
    /// restricted to I within the table; a lower bound for γ̃_n
    pub tilde: S,
    pub tilde_set: Vec<usize>,
    /// K^n/(1+K^n) with K the largest one-step ratio sup_j μ_i(j−1)/μ_i(j) in the table
    pub bound: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CriteriaTable<S: Scalar> {
    pub kind: MapKind,
    pub kappa: Rational,
    pub rows: Vec<IndexRow<S>>,
    pub shift_rows: Vec<ShiftRow<S>>,
    /// why the table ends before the requested horizon, if it does
    pub stopped: Option<String>,
    weights: Vec<Vec<S>>,
}

fn entry<S: Scalar>((value, arg): (S, u64), optimizer: Optimizer) -> Entry<S> {
    Entry { value, arg, optimizer }
}

/// Computes rows for i = 1..=horizon. Indices whose weights cannot be
/// produced (overflowing alphabets, underflowing tails) end the table early.
pub fn build_table<S: Scalar>(spec: &SystemSpec, horizon: usize, opts: &TableOptions) -> Result<CriteriaTable<S>> {
    let mut weights: Vec<Vec<S>> = Vec::new();
    let mut stopped = None;
    for i in 1..=horizon {
        match spec.weights::<S>(i) {
            Ok(w) => weights.push(w),
            Err(e) => {
                stopped = Some(format!("index {i}: {e}"));
                break;
            }
        }
    }
    let odometer = spec.kind == MapKind::Odometer;
    let mut rows = Vec::with_capacity(weights.len());
    for (k, mu) in weights.iter().enumerate() {
        let i = k + 1;
        let m = mu.len() as u64;
        let small = m <= opts.quadratic_limit;
        let theta = small.then(|| entry(optimize::theta(mu), Optimizer::ClosedForm));
        let kappa = (odometer && small).then(|| entry(optimize::kappa(mu), Optimizer::Dp));
        let gamma = (odometer && m <= opts.gamma_limit).then(|| {
            let g = optimize::gamma_odometer(mu);
            Entry { value: g.value, arg: g.shift, optimizer: g.optimizer }
        });
        let omega = if odometer {
            spec.m(i + 1).ok().map(|next| optimize::omega(mu, next, &opts.kappa))
        } else {
            None
        };
        let beta = (!odometer && small).then(|| entry(optimize::beta(mu), Optimizer::Dp));
        rows.push(IndexRow {
            i,
            m,
            eta: optimize::eta(mu),
            delta: optimize::delta(mu),
            theta,
            kappa,
            gamma,
            omega,
            beta,
        });
    }
    let mut shift_rows = Vec::new();
    if !odometer && opts.shifts > 0 && !weights.is_empty() {
        // μ_i(D−1) ≤ K μ_i(D) with K the largest one-step ratio; the
        // boundedness product dominates it
        let k = weights.iter().map(|mu| max_step_ratio(mu).as_f64()).fold(0.0, f64::max);
        for n in 1..=opts.shifts {
            let mut gamma = S::zero();
            let mut gamma_index = 1;
            let mut thetas = Vec::with_capacity(weights.len());
            for (k, mu) in weights.iter().enumerate() {
                let a = optimize::alpha(mu, n);
                if a > gamma {
                    gamma = a;
                    gamma_index = k + 1;
                }
                thetas.push(optimize::theta_shift(mu, n));
            }
            let (tilde, chosen) = optimize::gamma_tilde(&thetas);
            let kn = k.powf(n as f64);
            let bound = Some(if kn.is_finite() { kn / (1.0 + kn) } else { 1.0 });
            shift_rows.push(ShiftRow { n, gamma, gamma_index, tilde, tilde_set: chosen.into_iter().map(|x| x + 1).collect(), bound });
        }
    }
    Ok(CriteriaTable { kind: spec.kind, kappa: opts.kappa.clone(), rows, shift_rows, stopped, weights })
}

fn cell<S: Scalar>(v: Option<&S>) -> String {
    v.map_or_else(|| "NA".to_string(), S::render)
}

impl<S: Scalar> CriteriaTable<S> {
    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    /// μ_i, 1-based.
    pub fn weights(&self, i: usize) -> &[S] {
        &self.weights[i - 1]
    }

    pub fn row(&self, i: usize) -> &IndexRow<S> {
        &self.rows[i - 1]
    }

    /// One row per index; `NA` where a quantity does not apply or was skipped.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "i\tm\teta\tdelta\ttheta\ttheta_shift\tkappa\tkappa_shift\tgamma\tgamma_shift\tomega\tbeta\tbeta_shift\toptimizers\n",
        );
        for r in &self.rows {
            let arg = |e: &Option<Entry<S>>| e.as_ref().map_or_else(|| "NA".to_string(), |e| e.arg.to_string());
            let mut tags = Vec::new();
            for (name, e) in [("theta", &r.theta), ("kappa", &r.kappa), ("gamma", &r.gamma), ("beta", &r.beta)] {
                if let Some(e) = e {
                    tags.push(format!("{name}:{}", e.optimizer.tag()));
                }
            }
            if r.omega.is_some() {
                tags.push("omega:closed-form".into());
            }
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                r.i,
                r.m,
                r.eta.render(),
                r.delta.render(),
                cell(r.theta.as_ref().map(|e| &e.value)),
                arg(&r.theta),
                cell(r.kappa.as_ref().map(|e| &e.value)),
                arg(&r.kappa),
                cell(r.gamma.as_ref().map(|e| &e.value)),
                arg(&r.gamma),
                cell(r.omega.as_ref()),
                cell(r.beta.as_ref().map(|e| &e.value)),
                arg(&r.beta),
                tags.join(","),
            ));
        }
        out
    }

    /// Translation rows: n, γ_n and γ̃_n lower bounds, and the boundedness cap.
    pub fn shifts_tsv(&self) -> String {
        let mut out = String::from("n\tgamma_n\tgamma_n_index\tgamma_tilde_n\ttilde_size\tbound\n");
        for r in &self.shift_rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                r.n,
                r.gamma.render(),
                r.gamma_index,
                r.tilde.render(),
                r.tilde_set.len(),
                r.bound.map_or_else(|| "NA".to_string(), crate::scalar::fmt_sig),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{Alphabet, Measure};

    #[test]
    fn binary_rows_match_the_two_symbol_forms() {
        let s = SystemSpec::new(MapKind::Odometer, Alphabet::Constant(2), Measure::BinaryHarmonic);
        let t = build_table::<Rational>(&s, 12, &TableOptions::default()).unwrap();
        for r in &t.rows {
            let mu = t.weights(r.i);
            let top = S::max_of(mu[0].clone(), mu[1].clone());
            assert_eq!(r.gamma.as_ref().unwrap().value, top);
            assert_eq!(r.omega.clone().unwrap(), mu[1].clone());
        }
        assert!(t.to_tsv().lines().count() == 13);
    }

    type S = Rational;

    #[test]
    fn translation_shift_rows_respect_the_cap() {
        let s = SystemSpec::new(
            MapKind::Translation,
            Alphabet::List { list: vec![4, 6, 5], repeat: crate::spec::Repeat::Cycle },
            Measure::Ornstein,
        );
        let opts = TableOptions { shifts: 12, ..TableOptions::default() };
        let t = build_table::<f64>(&s, 9, &opts).unwrap();
        for r in &t.shift_rows {
            assert!(r.gamma <= r.bound.unwrap() + 1e-12);
        }
    }
}
