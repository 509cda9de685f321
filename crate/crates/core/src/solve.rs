//! Parameter solvers for families defined implicitly.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{rat, Rational};

/// Bracket width at which bisection stops.
pub const SOLVER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum SolverSpec {
    /// Σ_{j<m} c^j = (i+1)/i with m = m_i
    GeometricC { m: u64 },
    /// ε = 1/(#J_1 + (ρ^n − 1)/(ρ − 1))
    SumEpsilon { head: u64, rho: Rational, n: u32 },
}

pub fn solve_parameter(spec: &SolverSpec, i: usize) -> Result<Rational> {
    match spec {
        SolverSpec::GeometricC { m } => geometric_c(i, *m),
        SolverSpec::SumEpsilon { head, rho, n } => sum_epsilon(*head, rho, *n),
    }
}

fn geometric_sum(c: &Rational, m: u64) -> Rational {
    let mut s = Rational::zero();
    let mut p = Rational::one();
    for _ in 0..m {
        s += &p;
        p *= c;
    }
    s
}

/// Root of Σ_{j<m} c^j = (i+1)/i, returned as the upper end of a bisection
/// bracket of width ≤ 1e-12 inside (1/(i+1), 1/i].
pub fn geometric_c(i: usize, m: u64) -> Result<Rational> {
    if i < 2 {
        return Err(Error::BracketFailure("index must be at least 2".into()));
    }
    let ii = i as i64;
    let target = rat(ii + 1, ii);
    let mut lo = rat(1, ii + 1);
    let mut hi = rat(1, ii);
    if geometric_sum(&lo, m) > target || geometric_sum(&hi, m) < target {
        return Err(Error::BracketFailure(format!("no sign change on [1/{}, 1/{}]", ii + 1, ii)));
    }
    let tol = Rational::from_float(SOLVER_TOL).unwrap();
    let two = rat(2, 1);
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / &two;
        if geometric_sum(&mid, m) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

pub fn sum_epsilon(head: u64, rho: &Rational, n: u32) -> Result<Rational> {
    if rho <= &Rational::one() {
        return Err(Error::Domain("ρ must exceed 1".into()));
    }
    let geo = (num_traits::pow::pow(rho.clone(), n as usize) - Rational::one()) / (rho - Rational::one());
    Ok(Rational::one() / (Rational::from_integer(head.into()) + geo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational_to_f64;

    #[test]
    fn binary_alphabet_gives_reciprocal_exactly() {
        for i in 2..40 {
            assert_eq!(geometric_c(i, 2).unwrap(), rat(1, i as i64));
        }
    }

    #[test]
    fn roots_stay_in_bracket() {
        for i in 2..60 {
            for m in [3u64, 4, 7] {
                let c = geometric_c(i, m).unwrap();
                assert!(c > rat(1, i as i64 + 1) && c <= rat(1, i as i64));
                let f = rational_to_f64(&geometric_sum(&c, m)) - (i as f64 + 1.0) / i as f64;
                assert!(f.abs() < 1e-11);
            }
        }
    }

    #[test]
    fn sum_epsilon_closed_form() {
        assert_eq!(sum_epsilon(2, &rat(2, 1), 2).unwrap(), rat(1, 5));
        assert!(sum_epsilon(2, &rat(1, 1), 2).is_err());
    }
}
