//! Seifert fibered spaces over small bases, given by unnormalized Seifert
//! invariants (filling slopes), and the fundamental-group presentation used
//! everywhere downstream.
//!
//! A [`SeifertData`] is a closed oriented Seifert fibered space over the
//! 2-sphere obtained from the product of a three-holed sphere with the
//! circle by filling the three boundary tori along slopes `p_i c_i + q_i h`.
//! Its fundamental group is
//!
//! ```text
//! < c1, c2, c3, h | [c_i, h],  c_i^{p_i} h^{q_i},  c1 c2 c3 >
//! ```
//!
//! [`GeneralSeifertData`] admits any number of fibers and an `RP^2` base;
//! it only supports the coarse character-variety finiteness classifier and
//! the unitary representation constructions.

use crate::ring::{rational, Rational};
use crate::Error;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// One filling slope `p c + q h`, with `p >= 1` and `gcd(p, |q|) = 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self, Error> {
        if p < 1 || num::integer::gcd(p, q.abs()) != 1 {
            return Err(Error::InvalidSlope { p, q });
        }
        Ok(Slope { p, q })
    }

    /// The slope as a rational number `q/p`.
    pub fn value(&self) -> Rational {
        rational(self.q, self.p)
    }
}

/// JSON form: a `[p, q]` pair, validated on the way back in.
impl Serialize for Slope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.p, self.q).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (p, q) = <(i64, i64)>::deserialize(d)?;
        Slope::new(p, q).map_err(serde::de::Error::custom)
    }
}

/// A Seifert fibered space over `S^2` with (at most) three exceptional fibers.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SeifertData {
    pub slopes: [Slope; 3],
}

/// Generators of the fundamental group, in presentation order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Gen {
    H,
    C1,
    C2,
    C3,
}

impl Gen {
    pub const ALL: [Gen; 4] = [Gen::H, Gen::C1, Gen::C2, Gen::C3];

    /// Position in [`Gen::ALL`].
    pub fn idx(self) -> usize {
        match self {
            Gen::H => 0,
            Gen::C1 => 1,
            Gen::C2 => 2,
            Gen::C3 => 3,
        }
    }

    pub fn c(i: usize) -> Gen {
        [Gen::C1, Gen::C2, Gen::C3][i]
    }
}

/// A group word in the generators, as `(generator, exponent)` factors.
pub type Word = Vec<(Gen, i64)>;

impl SeifertData {
    pub fn new(slopes: [(i64, i64); 3]) -> Result<Self, Error> {
        Ok(SeifertData {
            slopes: [
                Slope::new(slopes[0].0, slopes[0].1)?,
                Slope::new(slopes[1].0, slopes[1].1)?,
                Slope::new(slopes[2].0, slopes[2].1)?,
            ],
        })
    }

    pub fn p(&self, i: usize) -> i64 {
        self.slopes[i].p
    }

    pub fn q(&self, i: usize) -> i64 {
        self.slopes[i].q
    }

    /// The Euler number `e = q1/p1 + q2/p2 + q3/p3`.
    pub fn euler_number(&self) -> Rational {
        self.slopes.iter().map(|s| s.value()).sum()
    }

    /// Apply a permutation to the slopes.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        SeifertData {
            slopes: [self.slopes[perm[0]], self.slopes[perm[1]], self.slopes[perm[2]]],
        }
    }

    /// Re-coordinatize to the form required by the rewriting engine:
    /// `e > 0`, `0 < q1`, and `-p_i < q_i <= 0` for `i = 2, 3`.
    ///
    /// The manifold is unchanged except possibly for a reversal of
    /// orientation (applied when `e < 0`), and neither change affects any
    /// of the invariants computed by this crate.  Fails with
    /// [`Error::EulerZero`] when `e == 0`.
    pub fn normalize(&self) -> Result<SeifertData, Error> {
        let e = self.euler_number();
        if e.is_zero() {
            return Err(Error::EulerZero);
        }
        let mut s = self.slopes;
        if e.is_negative() {
            for sl in &mut s {
                sl.q = -sl.q;
            }
        }
        // Push the second and third slope values into (-1, 0], compensating
        // on the first so the total (the Euler number) is preserved.
        let c2 = ceil_div(s[1].q, s[1].p);
        let c3 = ceil_div(s[2].q, s[2].p);
        s[1].q -= c2 * s[1].p;
        s[2].q -= c3 * s[2].p;
        s[0].q += (c2 + c3) * s[0].p;
        let out = SeifertData { slopes: s };
        debug_assert!(out.is_normalized());
        assert!(
            out.window_inequality_holds(),
            "normalization postcondition failed for {:?}",
            self
        );
        Ok(out)
    }

    /// Whether this data is already in the normalized coordinate range.
    pub fn is_normalized(&self) -> bool {
        self.q(0) > 0
            && (-self.p(1) < self.q(1) && self.q(1) <= 0)
            && (-self.p(2) < self.q(2) && self.q(2) <= 0)
            && self.euler_number().is_positive()
    }

    /// The strict inequality `|e1| + 1 > max(|e2 - 1| + |e3|, |e2| + |e3 + 1|)`
    /// on slope values that the head rewriting rule needs.  It holds for every
    /// output of [`SeifertData::normalize`].
    pub fn window_inequality_holds(&self) -> bool {
        let one = rational(1, 1);
        let (e1, e2, e3) = (self.slopes[0].value(), self.slopes[1].value(), self.slopes[2].value());
        let lhs = e1.abs() + &one;
        let a = (e2.clone() - &one).abs() + e3.abs();
        let b = e2.abs() + (e3.clone() + &one).abs();
        lhs > a.max(b)
    }

    /// The seven defining relators: three fiber commutators, three filling
    /// relations, and the base product relation.
    pub fn presentation(&self) -> Vec<Word> {
        let mut rel: Vec<Word> = Vec::with_capacity(7);
        for i in 0..3 {
            rel.push(vec![(Gen::c(i), 1), (Gen::H, 1), (Gen::c(i), -1), (Gen::H, -1)]);
        }
        for i in 0..3 {
            rel.push(vec![(Gen::c(i), self.p(i)), (Gen::H, self.q(i))]);
        }
        rel.push(vec![(Gen::C1, 1), (Gen::C2, 1), (Gen::C3, 1)]);
        rel
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + if a.rem_euclid(b) != 0 { 1 } else { 0 }
}

/// Base surface of a [`GeneralSeifertData`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BaseSurface {
    S2,
    RP2,
}

/// Seifert data over `S^2` or `RP^2` with any number of fibers.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GeneralSeifertData {
    pub base: BaseSurface,
    pub slopes: Vec<Slope>,
}

impl GeneralSeifertData {
    pub fn new(base: BaseSurface, slopes: &[(i64, i64)]) -> Result<Self, Error> {
        Ok(GeneralSeifertData {
            base,
            slopes: slopes.iter().map(|&(p, q)| Slope::new(p, q)).collect::<Result<_, _>>()?,
        })
    }

    pub fn euler_number(&self) -> Rational {
        self.slopes.iter().map(|s| s.value()).sum()
    }

    /// Number of genuinely exceptional fibers (`p >= 2`).
    pub fn exceptional_fibers(&self) -> usize {
        self.slopes.iter().filter(|s| s.p >= 2).count()
    }
}

/// Verdict of [`classify_character_variety`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Finiteness {
    Finite,
    Infinite,
}

/// A finiteness verdict together with the case of the classification that
/// produced it.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Finiteness,
    pub case: &'static str,
}

/// Decide whether the SL(2,C) character variety of a Seifert fibered space
/// is finite, by the case analysis for Haken-or-reducible Seifert spaces:
/// the variety has positive dimension exactly when the manifold contains an
/// essential torus (at least four exceptional fibers over `S^2`, two over
/// `RP^2`), an essential horizontal surface (three exceptional fibers with
/// Euler number zero), or a reducing sphere (Euler number zero with at most
/// two exceptional fibers).
pub fn classify_character_variety(m: &GeneralSeifertData) -> Classification {
    let n = m.exceptional_fibers();
    match m.base {
        BaseSurface::S2 => {
            if n >= 4 {
                Classification {
                    verdict: Finiteness::Infinite,
                    case: "s2-at-least-four-exceptional-fibers",
                }
            } else if m.euler_number().is_zero() {
                if n == 3 {
                    Classification {
                        verdict: Finiteness::Infinite,
                        case: "s2-three-fibers-euler-zero-haken",
                    }
                } else {
                    Classification {
                        verdict: Finiteness::Infinite,
                        case: "s2-euler-zero-reducible",
                    }
                }
            } else if n == 3 {
                Classification {
                    verdict: Finiteness::Finite,
                    case: "s2-three-fibers-rational-homology-sphere",
                }
            } else {
                Classification { verdict: Finiteness::Finite, case: "s2-lens-space" }
            }
        }
        BaseSurface::RP2 => {
            if n >= 2 {
                Classification {
                    verdict: Finiteness::Infinite,
                    case: "rp2-at-least-two-exceptional-fibers",
                }
            } else {
                Classification {
                    verdict: Finiteness::Finite,
                    case: "rp2-at-most-one-exceptional-fiber",
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sd(s: [(i64, i64); 3]) -> SeifertData {
        SeifertData::new(s).unwrap()
    }

    #[test]
    fn slope_validation() {
        assert!(Slope::new(2, 1).is_ok());
        assert!(Slope::new(1, 0).is_ok());
        assert!(Slope::new(1, 7).is_ok());
        assert!(Slope::new(0, 1).is_err());
        assert!(Slope::new(-2, 1).is_err());
        assert!(Slope::new(2, 0).is_err());
        assert!(Slope::new(4, 2).is_err());
    }

    #[test]
    fn euler_number_poincare_sphere() {
        let m = sd([(2, 1), (3, -1), (5, -1)]);
        assert_eq!(m.euler_number(), rational(-1, 30));
    }

    #[test]
    fn normalize_poincare_sphere() {
        let m = sd([(2, 1), (3, -1), (5, -1)]);
        let n = m.normalize().unwrap();
        assert_eq!(n, sd([(2, 3), (3, -2), (5, -4)]));
        assert_eq!(n.euler_number(), rational(1, 30));
        assert!(n.is_normalized());
        // 5/2 on the left against max(37/15, 13/15) on the right.
        assert!(n.window_inequality_holds());
    }

    #[test]
    fn normalize_is_idempotent() {
        let n = sd([(2, 1), (3, -1), (5, -1)]).normalize().unwrap();
        assert_eq!(n.normalize().unwrap(), n);
        let r = sd([(3, 2), (4, 3), (5, 4)]).normalize().unwrap();
        assert_eq!(r.normalize().unwrap(), r);
        assert!(r.is_normalized());
    }

    #[test]
    fn normalize_rejects_euler_zero() {
        let m = sd([(2, 1), (2, -1), (1, 0)]);
        assert!(matches!(m.normalize(), Err(Error::EulerZero)));
    }

    #[test]
    fn presentation_words() {
        let m = sd([(2, 1), (3, -1), (5, -1)]);
        let rel = m.presentation();
        assert_eq!(rel.len(), 7);
        assert_eq!(rel[0], vec![(Gen::C1, 1), (Gen::H, 1), (Gen::C1, -1), (Gen::H, -1)]);
        assert_eq!(rel[3], vec![(Gen::C1, 2), (Gen::H, 1)]); // c1^2 h
        assert_eq!(rel[4], vec![(Gen::C2, 3), (Gen::H, -1)]);
        assert_eq!(rel[6], vec![(Gen::C1, 1), (Gen::C2, 1), (Gen::C3, 1)]);
        let trivial = sd([(1, 0), (1, 0), (1, 1)]);
        assert_eq!(trivial.presentation()[3], vec![(Gen::C1, 1), (Gen::H, 0)]);
    }

    fn gsd(base: BaseSurface, s: &[(i64, i64)]) -> GeneralSeifertData {
        GeneralSeifertData::new(base, s).unwrap()
    }

    #[test]
    fn classifier_cases() {
        use BaseSurface::*;
        use Finiteness::*;
        let cases: Vec<(GeneralSeifertData, Finiteness)> = vec![
            (gsd(S2, &[(2, 1), (3, -1), (5, -1)]), Finite),
            (gsd(S2, &[(2, 1), (2, 1), (2, 1), (2, -1)]), Infinite),
            (gsd(RP2, &[(3, 1), (5, 2)]), Infinite),
            (gsd(RP2, &[(3, 1)]), Finite),
            (gsd(RP2, &[]), Finite),
            // Three fibers, Euler number zero: contains a horizontal surface.
            (gsd(S2, &[(2, 1), (3, 1), (6, -5)]), Infinite),
            // Euler number zero with two exceptional fibers: reducible.
            (gsd(S2, &[(2, 1), (2, -1)]), Infinite),
            (gsd(S2, &[(7, 3)]), Finite),
            (gsd(S2, &[]), Infinite), // S^2 x S^1
        ];
        for (m, want) in cases {
            let got = classify_character_variety(&m);
            assert_eq!(got.verdict, want, "wrong verdict for {:?} (case {})", m, got.case);
        }
    }

    #[test]
    fn classifier_ignores_order_and_integer_fibers() {
        // Moving an integer fiber's slope onto another fiber is a
        // homeomorphism; dropping the now-trivial fiber must not change the
        // verdict.
        let with_integer = gsd(BaseSurface::S2, &[(1, 2), (2, 1), (3, -1), (6, -1)]);
        let absorbed = gsd(BaseSurface::S2, &[(2, 1 - 2 * 2), (3, -1), (6, -1)]);
        assert_eq!(
            classify_character_variety(&with_integer).verdict,
            classify_character_variety(&absorbed).verdict,
        );
        let a = gsd(BaseSurface::S2, &[(2, 1), (3, 1), (6, -5)]);
        let b = gsd(BaseSurface::S2, &[(6, -5), (2, 1), (3, 1)]);
        assert_eq!(classify_character_variety(&a), classify_character_variety(&b));
    }
}
