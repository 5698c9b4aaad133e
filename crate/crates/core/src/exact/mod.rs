//! Exact integers, rationals and λ-polynomials, together with the binomial
//! and falling-factorial primitives the rest of the crate is built on.

mod lpoly;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use lpoly::LPoly;

/// Arbitrary-precision signed integer.
pub type Int = BigInt;

/// Exact rational, always in lowest terms with a positive denominator.
pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("{dividend} is not divisible by {divisor} (remainder {remainder})")]
    NonDivisible {
        dividend: String,
        divisor: String,
        remainder: String,
    },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

pub fn rat_int(n: impl Into<Int>) -> Rat {
    Rat::from_integer(n.into())
}

pub fn factorial(n: u64) -> Int {
    (1..=n).fold(Int::one(), |acc, k| acc * k)
}

/// `a(a-1)...(a-b+1) / b!` for any integer `a`.
///
/// Product semantics throughout: `int_binomial(a, 0) = 1` for every `a`
/// (including negative ones) and `int_binomial(a, b) = 0` for `0 <= a < b`.
pub fn int_binomial(a: i64, b: u64) -> Int {
    let mut num = Int::one();
    let mut den = Int::one();
    for i in 0..b {
        num *= a - i as i64;
        den *= i + 1;
    }
    num / den
}

/// Pascal rows `binom(a, 0..=a)` for `0 <= a <= max_top`, with
/// [`int_binomial`] as the fallback outside that range.
#[derive(Clone, Debug, Default)]
pub struct BinomialTable {
    rows: Vec<Vec<Int>>,
}

impl BinomialTable {
    pub fn new(max_top: usize) -> Self {
        let mut t = BinomialTable::default();
        t.ensure(max_top);
        t
    }

    pub fn ensure(&mut self, max_top: usize) {
        if self.rows.is_empty() {
            self.rows.push(vec![Int::one()]);
        }
        for a in self.rows.len()..=max_top {
            let prev = &self.rows[a - 1];
            let mut row = Vec::with_capacity(a + 1);
            row.push(Int::one());
            for b in 1..a {
                row.push(&prev[b - 1] + &prev[b]);
            }
            row.push(Int::one());
            self.rows.push(row);
        }
    }

    pub fn get(&self, a: i64, b: u64) -> Int {
        if a >= 0 {
            if let Some(row) = self.rows.get(a as usize) {
                return row.get(b as usize).cloned().unwrap_or_else(Int::zero);
            }
        }
        int_binomial(a, b)
    }
}

/// Generalized binomial `x(x-1)...(x-k+1) / k!` at a rational point.
pub fn rat_binomial(x: &Rat, k: u64) -> Rat {
    let mut acc = Rat::one();
    for i in 0..k {
        acc = acc * (x - rat_int(i)) / rat_int(i + 1);
    }
    acc
}

/// Generalized binomial `p(p-1)...(p-n+1) / n!` with `p` a λ-polynomial.
///
/// Callers pass affine `p` (`λ`, `λ-1`, `m+n-λ`); the result then has degree
/// at most `n`.
pub fn lpoly_binomial(p: &LPoly, n: u64) -> LPoly {
    let mut acc = LPoly::one();
    for i in 0..n {
        let factor = p - &LPoly::constant(rat_int(i));
        acc = &acc * &factor;
    }
    acc.scale(&Rat::new(Int::one(), factorial(n)))
}

/// Degenerate falling factorial `x(x-λ)(x-2λ)...(x-(n-1)λ)`, empty product 1.
pub fn falling_factorial(x: &Rat, n: u64, lam: &Rat) -> Rat {
    (0..n).fold(Rat::one(), |acc, i| acc * (x - lam * rat_int(i)))
}

/// `p / q` when the polynomial division is exact.
pub fn lpoly_exact_div(p: &LPoly, q: &LPoly) -> Result<LPoly, ExactError> {
    p.exact_div(q)
}

/// `x^e` for an integer exponent; `x` must be nonzero when `e < 0`.
pub fn rat_pow(x: &Rat, e: i64) -> Rat {
    let mag = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        mag.recip()
    } else {
        mag
    }
}

/// Degenerate logarithm `(t^λ - 1) / λ` at a positive rational `t` and a
/// nonzero integer `λ`.
pub fn deg_log_rational(t: &Rat, lam: i64) -> Result<Rat, ExactError> {
    if lam == 0 {
        return Err(ExactError::Domain("lambda must be nonzero".into()));
    }
    if !t.is_positive() {
        return Err(ExactError::Domain(format!("argument {t} must be positive")));
    }
    Ok((rat_pow(t, lam) - Rat::one()) / rat_int(lam))
}

/// A computed exact value of one of the three shapes the crate produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactValue {
    Int(Int),
    Rat(Rat),
    Poly(LPoly),
}

impl ExactValue {
    /// Index of the first differing λ-coefficient when both sides are
    /// polynomials.
    pub fn first_difference(&self, other: &ExactValue) -> Option<usize> {
        match (self, other) {
            (ExactValue::Poly(a), ExactValue::Poly(b)) => a.first_difference(b),
            _ => None,
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::Int(v) => write!(f, "{v}"),
            ExactValue::Rat(v) => write!(f, "{v}"),
            ExactValue::Poly(v) => write!(f, "{v}"),
        }
    }
}

impl From<Int> for ExactValue {
    fn from(v: Int) -> Self {
        ExactValue::Int(v)
    }
}

impl From<Rat> for ExactValue {
    fn from(v: Rat) -> Self {
        ExactValue::Rat(v)
    }
}

impl From<LPoly> for ExactValue {
    fn from(v: LPoly) -> Self {
        ExactValue::Poly(v)
    }
}

/// `gcd(num, den) == 1` and `den >= 1`.
pub fn is_reduced(r: &Rat) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}
