//! Exact coefficient arithmetic: Laurent polynomials in the framing variable
//! `A` over arbitrary-precision integers, plus exact rationals.
//!
//! A [`LaurentPoly`] is stored sparsely as a map from exponent to nonzero
//! coefficient, so equality, hashing and ordering are all canonical for free.
//! Everything here is exact; nothing rounds until a caller explicitly asks
//! for floating point.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact rational numbers (arbitrary-precision numerator and denominator).
pub type Rational = BigRational;

/// Build a `Rational` from machine integers.
pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A Laurent polynomial in `A` with `BigInt` coefficients.
///
/// Invariant: no zero coefficients are stored, so two equal values always
/// have identical term maps.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::unit(0)
    }

    /// The monomial `A^exp`.
    pub fn unit(exp: i64) -> Self {
        Self::monomial(BigInt::one(), exp)
    }

    /// The monomial `coeff * A^exp`.
    pub fn monomial(coeff: impl Into<BigInt>, exp: i64) -> Self {
        let coeff = coeff.into();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    /// The Kauffman bracket value of a trivial loop, `-A^2 - A^-2`.
    pub fn loop_factor() -> Self {
        let mut p = Self::monomial(-1, 2);
        p.add_term(BigInt::from(-1), -2);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// If this polynomial is a unit of `Z[A^{±1}]` (i.e. `±A^k`), return
    /// `(sign, k)`.
    pub fn as_unit(&self) -> Option<(i8, i64)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&exp, coeff) = self.terms.iter().next().unwrap();
        if coeff.magnitude().is_one() {
            Some((if coeff.sign() == Sign::Minus { -1 } else { 1 }, exp))
        } else {
            None
        }
    }

    /// Iterate `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, coeff: BigInt, exp: i64) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &LaurentPoly) {
        for (e, c) in other.terms() {
            self.add_term(c.clone(), e);
        }
    }

    /// Multiply in place by `A^exp`.
    pub fn shift(&mut self, exp: i64) {
        if exp == 0 || self.terms.is_empty() {
            return;
        }
        let old = std::mem::take(&mut self.terms);
        for (e, c) in old {
            self.terms.insert(e + exp, c);
        }
    }

    /// The involution `A -> A^{-1}` (negates every exponent).
    pub fn invert_a(&self) -> Self {
        let mut out = LaurentPoly::zero();
        for (e, c) in self.terms() {
            out.terms.insert(-e, c.clone());
        }
        out
    }

    /// Serialization form: ascending `[exponent, coefficient-as-decimal-string]`.
    pub fn to_terms(&self) -> Vec<(i64, String)> {
        self.terms().map(|(e, c)| (e, c.to_string())).collect()
    }

    pub fn from_terms(terms: &[(i64, String)]) -> Option<Self> {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(c.parse().ok()?, *e);
        }
        Some(p)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(-c.clone(), e);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(c1 * c2, e1 + e2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e, c) in self.terms() {
            out.terms.insert(e, -c.clone());
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    /// Canonical rendering in ascending exponent order, e.g. `-A^-2 + 3 - A^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.magnitude();
            match e {
                0 => write!(f, "{}", mag)?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{}", mag)?;
                    }
                    if e == 1 {
                        write!(f, "A")?;
                    } else {
                        write!(f, "A^{}", e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (e, c) in self.terms() {
            seq.serialize_element(&(e, c.to_string()))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms: Vec<(i64, String)> = Vec::deserialize(d)?;
        LaurentPoly::from_terms(&terms)
            .ok_or_else(|| serde::de::Error::custom("bad coefficient string"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[(i64, i64)]) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for &(c, e) in terms {
            p.add_term(BigInt::from(c), e);
        }
        p
    }

    #[test]
    fn display_canonical() {
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(LaurentPoly::one().to_string(), "1");
        assert_eq!(LaurentPoly::unit(-3).to_string(), "A^-3");
        assert_eq!(poly(&[(-1, -2), (3, 0), (-1, 2)]).to_string(), "-A^-2 + 3 - A^2");
        assert_eq!(poly(&[(2, 1), (-5, 4)]).to_string(), "2A - 5A^4");
        assert_eq!(LaurentPoly::loop_factor().to_string(), "-A^-2 - A^2");
    }

    #[test]
    fn arithmetic_and_cancellation() {
        let a = poly(&[(1, 0), (1, 2)]);
        let b = poly(&[(1, 0), (-1, 2)]);
        assert_eq!(&a + &b, poly(&[(2, 0)]));
        assert_eq!(&a * &b, poly(&[(1, 0), (-1, 4)]));
        assert_eq!(&a - &a, LaurentPoly::zero());
        assert_eq!((&LaurentPoly::zero() * &a), LaurentPoly::zero());
    }

    #[test]
    fn ring_laws_spot_check() {
        let xs = [
            poly(&[(3, -1), (1, 0)]),
            poly(&[(-2, 2), (7, 5)]),
            poly(&[(1, -4), (1, 4)]),
        ];
        for a in &xs {
            for b in &xs {
                assert_eq!(&(a * b), &(b * a));
                for c in &xs {
                    assert_eq!(&(&(a * b) * c), &(a * &(b * c)));
                    assert_eq!(&(a * &(b + c)), &(&(a * b) + &(a * c)));
                }
            }
        }
    }

    #[test]
    fn units() {
        assert_eq!(LaurentPoly::unit(5).as_unit(), Some((1, 5)));
        assert_eq!(poly(&[(-1, -7)]).as_unit(), Some((-1, -7)));
        assert_eq!(poly(&[(2, 0)]).as_unit(), None);
        assert_eq!(poly(&[(1, 0), (1, 1)]).as_unit(), None);
        assert_eq!(LaurentPoly::zero().as_unit(), None);
    }

    #[test]
    fn involution_and_shift() {
        let p = poly(&[(1, -1), (2, 3)]);
        assert_eq!(p.invert_a(), poly(&[(1, 1), (2, -3)]));
        assert_eq!(p.invert_a().invert_a(), p);
        let mut q = p.clone();
        q.shift(2);
        assert_eq!(q, poly(&[(1, 1), (2, 5)]));
    }

    #[test]
    fn json_round_trip() {
        let p = poly(&[(-1, -2), (3, 0), (-1, 2)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[[-2,"-1"],[0,"3"],[2,"-1"]]"#);
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
