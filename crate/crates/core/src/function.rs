//! Simple functions under C_φ: composition, L_p norms, periods, orbit visits.

use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::maps::InducedBijection;
use crate::scalar::{root_enclosure, Rational, Scalar};
use crate::space::{SimpleFunction, TruncatedSpace};

/// (C^n f)(c) = f(φ^n(c)).
pub fn apply_composition<S: Scalar>(space: &TruncatedSpace<S>, f: &SimpleFunction<S>, n: i128) -> SimpleFunction<S> {
    let bij = InducedBijection::of(space);
    let values = (0..space.cells()).map(|c| f.values[bij.apply(c, n) as usize].clone()).collect();
    SimpleFunction { depth: f.depth, values }
}

/// ‖f‖_p as an exact p-th power (integer p, any backend) and a decimal enclosure.
#[derive(Debug, Clone, PartialEq)]
pub struct NormValue<S: Scalar> {
    /// Σ |v|^p μ(cell); `None` when p is not an integer
    pub pth_power: Option<S>,
    pub value: f64,
    pub enclosure: (f64, f64),
}

fn integer_exponent(p: &Rational) -> Option<u32> {
    if p.is_integer() {
        p.to_integer().to_u32()
    } else {
        None
    }
}

pub fn lp_norm<S: Scalar>(space: &TruncatedSpace<S>, f: &SimpleFunction<S>, p: &Rational) -> Result<NormValue<S>> {
    if p < &Rational::from_integer(1.into()) {
        return Err(Error::Domain("p must be at least 1".into()));
    }
    match integer_exponent(p) {
        Some(k) => {
            let mut s = S::zero();
            for (v, w) in f.values.iter().zip(&space.cell_measure) {
                if !v.is_zero() {
                    s += v.abs().pow(k) * w.clone();
                }
            }
            let x = s.as_f64();
            let enclosure = root_enclosure(x, k as f64);
            Ok(NormValue { pth_power: Some(s), value: x.powf(1.0 / k as f64), enclosure })
        }
        None => {
            let pf = p.to_f64().unwrap_or(1.0);
            let x: f64 = f
                .values
                .iter()
                .zip(&space.cell_measure)
                .map(|(v, w)| v.as_f64().abs().powf(pf) * w.as_f64())
                .sum();
            let enclosure = root_enclosure(x, pf);
            Ok(NormValue { pth_power: None, value: x.powf(1.0 / pf), enclosure })
        }
    }
}

pub fn lp_distance<S: Scalar>(space: &TruncatedSpace<S>, f: &SimpleFunction<S>, g: &SimpleFunction<S>, p: &Rational) -> Result<NormValue<S>> {
    lp_norm(space, &f.linear(S::one(), g, -S::one()), p)
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn is_invariant<S: Scalar>(bij: &InducedBijection, f: &SimpleFunction<S>, d: u64) -> bool {
    (0..f.values.len() as u64).all(|c| f.values[bij.apply(c, d as i128) as usize] == f.values[c as usize])
}

/// Least d ≥ 1 with C^d f = f; it divides the order of the induced bijection.
pub fn period_of<S: Scalar>(space: &TruncatedSpace<S>, f: &SimpleFunction<S>) -> u64 {
    let bij = InducedBijection::of(space);
    divisors(bij.order()).into_iter().find(|&d| is_invariant(&bij, f, d)).unwrap_or(bij.order())
}

#[derive(Debug, Clone)]
pub struct OrbitTrace {
    pub epsilon: f64,
    pub p: Rational,
    pub horizon: u64,
    /// ‖C^n f − g‖_p for n = 0..=H
    pub distances: Vec<f64>,
    pub visited: Vec<bool>,
    /// #(visits ∩ ⟦1,n⟧)/n, 0 at n = 0
    pub running_density: Vec<f64>,
    pub period: u64,
    pub tail_lower_density: f64,
    pub tail_upper_density: f64,
}

impl OrbitTrace {
    pub fn visit_set(&self) -> Vec<u64> {
        self.visited.iter().enumerate().filter(|(_, v)| **v).map(|(n, _)| n as u64).collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n\tdistance\tvisited\trunning_density\n");
        for n in 0..self.distances.len() {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                n,
                crate::scalar::fmt_sig(self.distances[n]),
                self.visited[n] as u8,
                crate::scalar::fmt_sig(self.running_density[n])
            ));
        }
        out
    }
}

/// Visits {n ≤ H : ‖C^n f − g‖_p < ε}; strict inequality, decided on p-th powers.
pub fn orbit_trace<S: Scalar>(
    space: &TruncatedSpace<S>,
    f: &SimpleFunction<S>,
    g: &SimpleFunction<S>,
    epsilon: &Rational,
    p: &Rational,
    horizon: u64,
) -> Result<OrbitTrace> {
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    if !epsilon.is_positive() {
        return Err(Error::Domain("radius must be positive".into()));
    }
    let eps_s = S::from_rational(epsilon);
    let bij = InducedBijection::of(space);
    let k = integer_exponent(p);
    let eps_pow = k.map(|k| eps_s.pow(k));
    let mut distances = Vec::new();
    let mut visited = Vec::new();
    let mut running_density = Vec::new();
    let mut count = 0u64;
    for n in 0..=horizon {
        let moved = SimpleFunction {
            depth: f.depth,
            values: (0..space.cells()).map(|c| f.values[bij.apply(c, n as i128) as usize].clone()).collect(),
        };
        let d = lp_distance(space, &moved, g, p)?;
        let inside = match (&d.pth_power, &eps_pow) {
            (Some(x), Some(e)) => {
                if S::EXACT {
                    x < e
                } else {
                    x.as_f64() < e.as_f64() - crate::scalar::FLOAT_TOL
                }
            }
            _ => d.enclosure.1 < epsilon.to_f64().unwrap_or(0.0),
        };
        if inside && n > 0 {
            count += 1;
        }
        distances.push(d.value);
        visited.push(inside);
        running_density.push(if n == 0 { 0.0 } else { count as f64 / n as f64 });
    }
    let start = (horizon as usize).div_ceil(2).max(1);
    let tail = &running_density[start..];
    let tail_lower_density = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_upper_density = tail.iter().cloned().fold(0.0, f64::max);
    Ok(OrbitTrace {
        epsilon: epsilon.to_f64().unwrap_or(0.0),
        p: p.clone(),
        horizon,
        distances,
        visited,
        running_density,
        period: period_of(space, f),
        tail_lower_density,
        tail_upper_density,
    })
}

/// Least period of the visit pattern over the recorded horizon.
pub fn visit_period(trace: &OrbitTrace) -> Option<usize> {
    let v = &trace.visited;
    (1..v.len()).find(|&d| (d..v.len()).all(|n| v[n] == v[n - d]))
}

/// Young-type functions Ψ for Orlicz spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Young {
    /// Ψ(t) = t^p
    Power(f64),
    /// Ψ(t) = e^t − 1
    ExpMinusOne,
    /// Ψ(t) = t log(1 + t)
    TLogOnePlusT,
}

impl Young {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Young::Power(p) => t.powf(*p),
            Young::ExpMinusOne => t.exp_m1(),
            Young::TLogOnePlusT => t * t.ln_1p(),
        }
    }

    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("Ψ^-1 undefined at {s}")));
        }
        Ok(match self {
            Young::Power(p) => s.powf(1.0 / p),
            Young::ExpMinusOne => s.ln_1p(),
            Young::TLogOnePlusT => {
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                while self.eval(hi) < s {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if self.eval(mid) < s {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        })
    }
}

/// ‖1_E‖ = 1/Ψ^{-1}(1/μ(E)).
pub fn orlicz_indicator_norm(psi: Young, measure: f64) -> Result<f64> {
    if !(measure > 0.0 && measure <= 1.0) {
        return Err(Error::Domain("μ(E) must lie in (0, 1]".into()));
    }
    let inv = psi.inverse(1.0 / measure)?;
    if inv <= 0.0 {
        return Err(Error::Domain("Ψ^-1 vanishes".into()));
    }
    Ok(1.0 / inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::space::{build_truncation, DepthSet, DEFAULT_CAP};
    use crate::spec::{Alphabet, MapKind, Measure, Repeat, SystemSpec};

    fn uniform_binary() -> SystemSpec {
        SystemSpec::new(MapKind::Odometer, Alphabet::Constant(2), Measure::Uniform)
    }

    #[test]
    fn composition_moves_cylinders() {
        let sp = build_truncation::<Rational>(&uniform_binary(), 1, DEFAULT_CAP).unwrap();
        let f = SimpleFunction::indicator(&sp, &DepthSet::cylinder(&[2], &[0]));
        let g = apply_composition(&sp, &f, 1);
        assert_eq!(g, SimpleFunction::indicator(&sp, &DepthSet::cylinder(&[2], &[1])));
        assert_eq!(apply_composition(&sp, &f, 0), f);
        assert_eq!(apply_composition(&sp, &f, 2), f);
    }

    #[test]
    fn norm_examples() {
        let sp = build_truncation::<Rational>(&uniform_binary(), 2, DEFAULT_CAP).unwrap();
        let c = SimpleFunction::constant(&sp, rat(-3, 2));
        assert_eq!(lp_norm(&sp, &c, &rat(3, 1)).unwrap().pth_power, Some(rat(27, 8)));
        let a = SimpleFunction::indicator(&sp, &DepthSet::cylinder(&[2, 2], &[0, 0]));
        let b = SimpleFunction::indicator(&sp, &DepthSet::cylinder(&[2, 2], &[1, 1]));
        let d = lp_distance(&sp, &a, &b, &rat(2, 1)).unwrap();
        assert_eq!(d.pth_power, Some(rat(1, 2)));
        let r = 1.0 / 2f64.sqrt();
        assert!(d.enclosure.0 <= r && r <= d.enclosure.1);
        let half = lp_norm(&sp, &a, &rat(3, 2)).unwrap();
        assert!((half.value - 0.25f64.powf(2.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn periods() {
        let sp = build_truncation::<Rational>(&uniform_binary(), 1, DEFAULT_CAP).unwrap();
        assert_eq!(period_of(&sp, &SimpleFunction::constant(&sp, rat(1, 1))), 1);
        assert_eq!(period_of(&sp, &SimpleFunction::indicator(&sp, &DepthSet::cylinder(&[2], &[0]))), 2);
        let s23 = SystemSpec::new(MapKind::Odometer, Alphabet::List { list: vec![2, 3], repeat: Repeat::Last }, Measure::Uniform);
        let sp = build_truncation::<Rational>(&s23, 2, DEFAULT_CAP).unwrap();
        let f = SimpleFunction::indicator(&sp, &DepthSet::cylinder(&[2, 3], &[0, 0]));
        let p = period_of(&sp, &f);
        assert_eq!(6 % p, 0);
        let mut d = 1;
        while apply_composition(&sp, &f, d) != f {
            d += 1;
        }
        assert_eq!(p as i128, d);
    }

    #[test]
    fn orbit_alternates() {
        let sp = build_truncation::<Rational>(&uniform_binary(), 1, DEFAULT_CAP).unwrap();
        let f = SimpleFunction::indicator(&sp, &DepthSet::cylinder(&[2], &[0]));
        let g = SimpleFunction::indicator(&sp, &DepthSet::cylinder(&[2], &[1]));
        let t = orbit_trace(&sp, &f, &g, &rat(1, 10), &rat(1, 1), 10).unwrap();
        assert_eq!(t.visit_set(), vec![1, 3, 5, 7, 9]);
        assert_eq!(visit_period(&t), Some(2));
        let same = orbit_trace(&sp, &f, &f, &rat(1, 10), &rat(1, 1), 10).unwrap();
        assert_eq!(same.visit_set(), vec![0, 2, 4, 6, 8, 10]);
        let c = SimpleFunction::constant(&sp, rat(1, 1));
        let shifted = c.add_constant(rat(1, 5));
        let none = orbit_trace(&sp, &c, &shifted, &rat(1, 10), &rat(1, 1), 10).unwrap();
        assert!(none.visit_set().is_empty());
    }

    #[test]
    fn orlicz_examples() {
        let v = orlicz_indicator_norm(Young::Power(3.0), 0.125).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!((orlicz_indicator_norm(Young::Power(2.0), 1.0).unwrap() - 1.0).abs() < 1e-15);
        let mu = 1.0 / (std::f64::consts::E - 1.0);
        let v = orlicz_indicator_norm(Young::ExpMinusOne, mu).unwrap();
        assert!((v - 1.0 / (1.0 / mu + 1.0).ln()).abs() < 1e-15);
        let t = Young::TLogOnePlusT;
        assert!((t.eval(t.inverse(5.0).unwrap()) - 5.0).abs() < 1e-9);
        assert!(orlicz_indicator_norm(Young::ExpMinusOne, 0.0).is_err());
    }
}
