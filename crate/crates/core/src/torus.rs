//! The Kauffman bracket skein algebra of the torus in the curve basis.
//!
//! Basis elements are indexed by `(p, q)` in `Z^2` modulo the hyperelliptic
//! involution `(p, q) ~ (-p, -q)`: the class `(p, q)` with `d = gcd(p, q)`
//! stands for the `d`-th Chebyshev polynomial (first kind, normalized with
//! `T_0 = 2`) of the primitive `(p/d, q/d)` curve.  With that normalization
//! the product of two basis classes is the two-term sum
//!
//! ```text
//! (p,q) * (r,s) = A^(ps-qr) (p+r, q+s) + A^(qr-ps) (p-r, q-s)
//! ```
//!
//! which this module extends bilinearly.  The class `(0,0)` is kept as a
//! formal basis key; under the `T_0 = 2` convention it equals twice the
//! empty link, and the product rule above is consistent with exactly that
//! reading (e.g. `(0,0) * x = 2x` for every class `x`).

use crate::ring::LaurentPoly;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

/// A basis class of the torus algebra: `(p, q)` up to simultaneous negation.
///
/// Constructors canonicalize so that `p > 0`, or `p == 0` and `q >= 0`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TorusClass {
    p: i64,
    q: i64,
}

impl TorusClass {
    pub fn new(p: i64, q: i64) -> Self {
        if p < 0 || (p == 0 && q < 0) {
            TorusClass { p: -p, q: -q }
        } else {
            TorusClass { p, q }
        }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// `gcd(|p|, |q|)`; zero only for the `(0,0)` class.
    pub fn divisibility(&self) -> i64 {
        num::integer::gcd(self.p, self.q)
    }

    pub fn is_primitive(&self) -> bool {
        self.divisibility() == 1
    }
}

impl fmt::Debug for TorusClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// An element of the torus algebra: a finite `Z[A^{±1}]`-combination of
/// basis classes.
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorusSkein {
    terms: BTreeMap<TorusClass, LaurentPoly>,
}

impl TorusSkein {
    pub fn zero() -> Self {
        TorusSkein { terms: BTreeMap::new() }
    }

    pub fn class(c: TorusClass) -> Self {
        Self::term(c, LaurentPoly::one())
    }

    pub fn term(c: TorusClass, coeff: LaurentPoly) -> Self {
        let mut s = Self::zero();
        s.add_term(c, coeff);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, c: TorusClass) -> LaurentPoly {
        self.terms.get(&c).cloned().unwrap_or_default()
    }

    /// Iterate terms in lexicographic `(p, q)` key order.
    pub fn terms(&self) -> impl Iterator<Item = (TorusClass, &LaurentPoly)> {
        self.terms.iter().map(|(&c, f)| (c, f))
    }

    pub fn add_term(&mut self, c: TorusClass, coeff: LaurentPoly) {
        if coeff.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(c) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign(&coeff);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Apply `A -> A^{-1}` to every coefficient.
    pub fn invert_a(&self) -> Self {
        let mut out = Self::zero();
        for (c, f) in self.terms() {
            out.add_term(c, f.invert_a());
        }
        out
    }
}

impl Add for &TorusSkein {
    type Output = TorusSkein;
    fn add(self, rhs: &TorusSkein) -> TorusSkein {
        let mut out = self.clone();
        for (c, f) in rhs.terms() {
            out.add_term(c, f.clone());
        }
        out
    }
}

impl Mul for &TorusSkein {
    type Output = TorusSkein;
    fn mul(self, rhs: &TorusSkein) -> TorusSkein {
        ts_product(self, rhs)
    }
}

impl fmt::Debug for TorusSkein {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, coeff)) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{}]{:?}", coeff, c)?;
        }
        Ok(())
    }
}

/// Product of two basis classes by the two-term rule, as a `TorusSkein`.
pub fn class_product(a: TorusClass, b: TorusClass) -> TorusSkein {
    let (p, q, r, s) = (a.p(), a.q(), b.p(), b.q());
    let twist = p * s - q * r;
    let mut out = TorusSkein::zero();
    out.add_term(TorusClass::new(p + r, q + s), LaurentPoly::unit(twist));
    out.add_term(TorusClass::new(p - r, q - s), LaurentPoly::unit(-twist));
    out
}

/// Bilinear extension of [`class_product`] to arbitrary elements.
///
/// The algebra is associative but not commutative: swapping the factors
/// replaces `A` by `A^{-1}` in the two structure coefficients.
pub fn ts_product(x: &TorusSkein, y: &TorusSkein) -> TorusSkein {
    let mut out = TorusSkein::zero();
    for (a, f) in x.terms() {
        for (b, g) in y.terms() {
            let fg = f * g;
            for (c, u) in class_product(a, b).terms() {
                out.add_term(c, &fg * u);
            }
        }
    }
    out
}

/// Errors from [`ts_chebyshev`].
#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum ChebyshevError {
    #[error("base class {0:?} is not primitive")]
    NotPrimitive(TorusClass),
    #[error("degree must be at least 1")]
    ZeroDegree,
}

/// The image of the degree-`d` Chebyshev polynomial of a primitive class
/// `c`, computed through the recurrence `T_{d+1} = c * T_d - T_{d-1}` with
/// `T_0 = (0,0)` (the scalar 2) and `T_1 = c`.
///
/// For a primitive class the result always collapses to the single basis
/// class `(d*p, d*q)` with coefficient 1 — that collapse is precisely the
/// statement that basis classes are Chebyshev polynomials of primitive
/// curves.
pub fn ts_chebyshev(d: u32, c: TorusClass) -> Result<TorusSkein, ChebyshevError> {
    if d == 0 {
        return Err(ChebyshevError::ZeroDegree);
    }
    if !c.is_primitive() {
        return Err(ChebyshevError::NotPrimitive(c));
    }
    let x = TorusSkein::class(c);
    let mut prev = TorusSkein::class(TorusClass::new(0, 0)); // T_0 = 2
    let mut cur = x.clone(); // T_1
    for _ in 1..d {
        let mut next = ts_product(&x, &cur);
        for (cl, f) in prev.terms() {
            next.add_term(cl, -f);
        }
        prev = cur;
        cur = next;
    }
    debug_assert_eq!(
        cur.terms().collect::<Vec<_>>(),
        vec![(TorusClass::new(d as i64 * c.p(), d as i64 * c.q()), &LaurentPoly::one())]
    );
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cl(p: i64, q: i64) -> TorusClass {
        TorusClass::new(p, q)
    }

    #[test]
    fn canonical_representatives() {
        assert_eq!(cl(-1, 2), cl(1, -2));
        assert_eq!(cl(0, -3), cl(0, 3));
        assert_eq!(cl(0, 0).p(), 0);
        assert!(cl(2, 4).divisibility() == 2 && !cl(2, 4).is_primitive());
    }

    #[test]
    fn product_of_longitudes() {
        // (1,0)^2 = (2,0) + (0,0); with (0,0) = 2 this is the T_2 relation.
        let x = TorusSkein::class(cl(1, 0));
        let sq = ts_product(&x, &x);
        assert_eq!(sq.coeff(cl(2, 0)), LaurentPoly::one());
        assert_eq!(sq.coeff(cl(0, 0)), LaurentPoly::one());
        assert_eq!(sq.len(), 2);
    }

    #[test]
    fn product_with_twist() {
        // (1,0)*(0,1) = A(1,1) + A^-1 (1,-1)
        let prod = class_product(cl(1, 0), cl(0, 1));
        assert_eq!(prod.coeff(cl(1, 1)), LaurentPoly::unit(1));
        assert_eq!(prod.coeff(cl(1, -1)), LaurentPoly::unit(-1));
    }

    #[test]
    fn zero_class_acts_as_two() {
        let e = TorusSkein::class(cl(0, 0));
        for &c in &[cl(1, 0), cl(3, -2), cl(0, 0), cl(2, 4)] {
            let x = TorusSkein::class(c);
            let two_x = &x + &x;
            assert_eq!(ts_product(&e, &x), two_x);
            assert_eq!(ts_product(&x, &e), two_x);
        }
    }

    #[test]
    fn swap_conjugates_coefficients() {
        for &(a, b) in &[(cl(1, 0), cl(0, 1)), (cl(2, 1), cl(1, 3)), (cl(3, -2), cl(5, 4))] {
            let xy = class_product(a, b);
            let yx = class_product(b, a);
            assert_eq!(xy, yx.invert_a());
        }
    }

    #[test]
    fn associativity_small_sweep() {
        let classes: Vec<TorusClass> =
            (-2..=2).flat_map(|p| (-2..=2).map(move |q| cl(p, q))).collect();
        for &a in &classes {
            for &b in &classes {
                for &c in &classes {
                    let ab_c = ts_product(&class_product(a, b), &TorusSkein::class(c));
                    let a_bc = ts_product(&TorusSkein::class(a), &class_product(b, c));
                    assert_eq!(ab_c, a_bc, "associativity fails at {:?} {:?} {:?}", a, b, c);
                }
            }
        }
    }

    #[test]
    fn chebyshev_collapses() {
        // T_2 of (1,2) = (1,2)^2 - T_0 = (2,4).
        let t2 = ts_chebyshev(2, cl(1, 2)).unwrap();
        assert_eq!(t2, TorusSkein::class(cl(2, 4)));
        for d in 1..=8u32 {
            let td = ts_chebyshev(d, cl(2, -3)).unwrap();
            assert_eq!(td, TorusSkein::class(cl(2 * d as i64, -3 * d as i64)));
        }
        assert_eq!(ts_chebyshev(3, cl(2, 4)), Err(ChebyshevError::NotPrimitive(cl(2, 4))));
        assert_eq!(ts_chebyshev(0, cl(1, 0)), Err(ChebyshevError::ZeroDegree));
    }
}
