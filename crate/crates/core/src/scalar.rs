//! Arithmetic backends: exact rationals and binary floats.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, NumAssign, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Tolerance used by the float backend for every comparison.
pub const FLOAT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Rational,
    Float,
}

impl std::str::FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Backend::Rational),
            "float" => Ok(Backend::Float),
            other => Err(Error::Parse(format!("unknown backend `{other}`"))),
        }
    }
}

pub trait Scalar: Clone + Debug + PartialOrd + Send + Sync + NumAssign + Signed + 'static {
    const EXACT: bool;
    const BACKEND: Backend;

    fn from_int(n: i64) -> Self;
    fn from_ratio(n: i64, d: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    /// Exact for the rational backend: every finite double is a dyadic rational.
    fn from_float(x: f64) -> Self;
    fn as_f64(&self) -> f64;
    /// `p/q` for rationals, 15 significant digits for floats.
    fn render(&self) -> String;
    fn tol() -> Self;

    fn pow(&self, e: u32) -> Self {
        num_traits::pow::pow(self.clone(), e as usize)
    }

    fn le_tol(&self, other: &Self) -> bool {
        *self <= other.clone() + Self::tol()
    }

    fn ge_tol(&self, other: &Self) -> bool {
        self.clone() + Self::tol() >= *other
    }

    fn eq_tol(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs() <= Self::tol()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const BACKEND: Backend = Backend::Rational;

    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_float(x: f64) -> Self {
        Rational::from_f64(x).unwrap_or_else(Rational::zero)
    }
    fn as_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn render(&self) -> String {
        render_rational(self)
    }
    fn tol() -> Self {
        Rational::zero()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const BACKEND: Backend = Backend::Float;

    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }
    fn from_float(x: f64) -> Self {
        x
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn render(&self) -> String {
        fmt_sig(*self)
    }
    fn tol() -> Self {
        FLOAT_TOL
    }
    fn pow(&self, e: u32) -> Self {
        self.powi(e as i32)
    }
}

/// Correctly handles huge numerators and denominators, where a plain
/// `to_f64` on each part would overflow.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    // scale so the quotient keeps ~64 significant bits
    let shift = nb - db - 64;
    let (n, d) = if shift > 0 {
        (r.numer().clone(), r.denom().clone() << (shift as usize))
    } else {
        (r.numer().clone() << ((-shift) as usize), r.denom().clone())
    };
    let q = (n / d).to_f64().unwrap_or(f64::NAN);
    q * 2f64.powi(shift as i32)
}

pub fn render_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal with 15 significant digits, shortest form.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{:.14e}", x).parse().unwrap_or(x);
    format!("{rounded}")
}

/// Parses `p/q`, `p`, or a decimal literal such as `0.15` exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().map_err(|_| Error::Parse(format!("bad decimal `{s}`")))?;
        let d = num_traits::pow::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| Error::Parse(format!("bad number `{s}`")))?;
    Ok(Rational::from_integer(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

/// Enclosure of x^(1/p) for x ≥ 0, widened by a few ulps each side.
pub fn root_enclosure(x: f64, p: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    let v = x.powf(1.0 / p);
    let w = v * 4.0 * f64::EPSILON;
    ((v - w).max(0.0), v + w)
}
