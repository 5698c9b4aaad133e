//! Polynomials in the formal deformation parameter λ with exact rational
//! coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{One, Zero};

use super::{ExactError, Rat};

/// A polynomial `c0 + c1*λ + c2*λ^2 + ...` over the rationals.
///
/// The coefficient vector never carries trailing zeros, so the zero polynomial
/// is the empty vector and structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LPoly {
    coeffs: Vec<Rat>,
}

impl LPoly {
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        let mut p = LPoly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate λ itself.
    pub fn lambda() -> Self {
        Self::from_coeffs(vec![Rat::zero(), Rat::one()])
    }

    /// `c0 + c1*λ`.
    pub fn affine(c0: Rat, c1: Rat) -> Self {
        Self::from_coeffs(vec![c0, c1])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    /// Coefficient of λ^i (zero past the degree).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(0)
    }

    pub fn eval(&self, lam: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * lam + c)
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return LPoly::zero();
        }
        LPoly {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    /// Smallest index where the two polynomials disagree.
    pub fn first_difference(&self, other: &LPoly) -> Option<usize> {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len).find(|&i| self.coeff(i) != other.coeff(i))
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &LPoly) -> Result<(LPoly, LPoly), ExactError> {
        let dd = divisor.degree().ok_or(ExactError::DivisionByZero)?;
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let qlen = rem.len().saturating_sub(dd);
        let mut quot = vec![Rat::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = &rem[k + dd] / lead;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((LPoly::from_coeffs(quot), LPoly::from_coeffs(rem)))
    }

    /// Quotient of an exact division; a nonzero remainder is an error.
    pub fn exact_div(&self, divisor: &LPoly) -> Result<LPoly, ExactError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(ExactError::NonDivisible {
                dividend: self.to_string(),
                divisor: divisor.to_string(),
                remainder: r.to_string(),
            })
        }
    }
}

impl Zero for LPoly {
    fn zero() -> Self {
        LPoly { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for LPoly {
    fn one() -> Self {
        LPoly {
            coeffs: vec![Rat::one()],
        }
    }
}

impl From<Rat> for LPoly {
    fn from(c: Rat) -> Self {
        LPoly::constant(c)
    }
}

impl<'a> Add<&'a LPoly> for &'a LPoly {
    type Output = LPoly;

    fn add(self, rhs: &LPoly) -> LPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LPoly {
    type Output = LPoly;

    fn add(mut self, rhs: LPoly) -> LPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LPoly> for LPoly {
    fn add_assign(&mut self, rhs: &LPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rat::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.trim();
    }
}

impl AddAssign for LPoly {
    fn add_assign(&mut self, rhs: LPoly) {
        *self += &rhs;
    }
}

impl SubAssign<&LPoly> for LPoly {
    fn sub_assign(&mut self, rhs: &LPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rat::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self.trim();
    }
}

impl<'a> Sub<&'a LPoly> for &'a LPoly {
    type Output = LPoly;

    fn sub(self, rhs: &LPoly) -> LPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LPoly {
    type Output = LPoly;

    fn sub(mut self, rhs: LPoly) -> LPoly {
        self -= &rhs;
        self
    }
}

impl Neg for LPoly {
    type Output = LPoly;

    fn neg(self) -> LPoly {
        LPoly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for &LPoly {
    type Output = LPoly;

    fn neg(self) -> LPoly {
        -self.clone()
    }
}

impl<'a> Mul<&'a LPoly> for &'a LPoly {
    type Output = LPoly;

    fn mul(self, rhs: &LPoly) -> LPoly {
        if self.is_zero() || rhs.is_zero() {
            return LPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LPoly::from_coeffs(out)
    }
}

impl Mul for LPoly {
    type Output = LPoly;

    fn mul(self, rhs: LPoly) -> LPoly {
        &self * &rhs
    }
}

impl fmt::Display for LPoly {
    /// Ascending powers of λ written with the ASCII symbol `L`:
    /// `c0 + c1*L + c2*L^2`. Every coefficient up to the degree is printed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*L")?,
                _ => write!(f, "{c}*L^{i}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for LPoly {
    type Err = ExactError;

    /// Accepts the output of `Display`, plus bare `L` / `L^k` terms and terms
    /// in any order.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(format!("invalid polynomial `{s}`"));
        let mut coeffs: Vec<Rat> = Vec::new();
        for term in s.split('+') {
            let term = term.trim();
            if term.is_empty() {
                return Err(bad());
            }
            let (coef, power) = match term.find('L') {
                None => (term, "L^0"),
                Some(pos) => {
                    let head = term[..pos].trim();
                    let coef = if head.is_empty() {
                        "1"
                    } else {
                        head.strip_suffix('*').ok_or_else(bad)?.trim()
                    };
                    (coef, &term[pos..])
                }
            };
            let exp: usize = match power {
                "L" => 1,
                p => p
                    .strip_prefix("L^")
                    .and_then(|e| e.parse().ok())
                    .ok_or_else(bad)?,
            };
            let c: Rat = coef.parse().map_err(|_| bad())?;
            if coeffs.len() <= exp {
                coeffs.resize(exp + 1, Rat::zero());
            }
            coeffs[exp] += c;
        }
        Ok(LPoly::from_coeffs(coeffs))
    }
}
