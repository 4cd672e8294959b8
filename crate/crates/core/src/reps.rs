//! Explicit SU(2) and SL(2,C) representations of the fundamental group,
//! with the twisted-cohomology dimension counts that certify which
//! characters are smooth points of the character scheme.
//!
//! SU(2) is modelled as the unit quaternions; rotation-angle bookkeeping
//! (the spherical triangle inequality and its constructive form) drives
//! the existence results, and every construction is verified numerically
//! against the group presentation with stated tolerances.  SL(2,C)
//! representations are 2x2 complex matrices; cocycle spaces are computed
//! by folding the presentation relators through the twisted Leibniz rule
//! and reading ranks off singular values, with an explicit spectral-gap
//! certificate instead of exact algebraic arithmetic.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2, Matrix3};
use num::complex::Complex64;
use serde::Serialize;

use crate::characters::{enumerate_characters, AngleIndex, CharacterKind};
use crate::homology::{smith_normal_form, AbelianGroupData, PresentationMatrix, DEFAULT_ENUMERATION_BOUND};
use crate::seifert::{BaseSurface, Gen, GeneralSeifertData, SeifertData, Word};
use crate::Error;

/// Residual bound for all verified presentation relations.
pub const REP_RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Singular values below this fraction of the largest count as zero.
const RANK_RELATIVE_TOLERANCE: f64 = 1e-8;
/// Required ratio across the singular-value cut for a trusted rank.
const RANK_GAP_FACTOR: f64 = 1e3;

fn clamp_cos(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// A quaternion `a + b i + c j + d k`; unit quaternions are SU(2).
#[derive(Clone, Copy, PartialEq, Debug, Serialize)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion { a: 1.0, b: 0.0, c: 0.0, d: 0.0 };
    pub const I: Quaternion = Quaternion { a: 0.0, b: 1.0, c: 0.0, d: 0.0 };
    pub const J: Quaternion = Quaternion { a: 0.0, b: 0.0, c: 1.0, d: 0.0 };
    pub const K: Quaternion = Quaternion { a: 0.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quaternion { a, b, c, d }
    }

    /// `cos(angle) + sin(angle) * (unit axis)`: the SU(2) element of the
    /// given rotation angle in `[0, pi]` about the given axis.
    pub fn rotation(angle: f64, axis: [f64; 3]) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        assert!(n > 0.0, "rotation axis must be nonzero");
        let s = angle.sin() / n;
        Quaternion::new(angle.cos(), s * axis[0], s * axis[1], s * axis[2])
    }

    pub fn norm(&self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn conjugate(&self) -> Self {
        Quaternion::new(self.a, -self.b, -self.c, -self.d)
    }

    /// Inverse of a unit quaternion.
    pub fn inverse(&self) -> Self {
        self.conjugate()
    }

    /// Rotation angle in `[0, pi]` (arccos of the scalar part).
    pub fn angle(&self) -> f64 {
        clamp_cos(self.a).acos()
    }

    /// Unit imaginary part, or the `i` axis for real quaternions.
    pub fn axis(&self) -> [f64; 3] {
        let n = (self.b * self.b + self.c * self.c + self.d * self.d).sqrt();
        if n < 1e-14 {
            [1.0, 0.0, 0.0]
        } else {
            [self.b / n, self.c / n, self.d / n]
        }
    }

    pub fn is_pure_imaginary_unit(&self) -> bool {
        self.a.abs() < 1e-9 && (self.norm() - 1.0).abs() < 1e-9
    }

    /// Half-angle square root of a unit quaternion, taking the `i` axis
    /// for the ambiguous case of real negative input.
    pub fn sqrt(&self) -> Self {
        Quaternion::rotation(self.angle() / 2.0, self.axis())
    }

    /// Euclidean distance to another quaternion, used as the residual of
    /// a relation brought to the form `q = 1`.
    pub fn dist(&self, other: &Quaternion) -> f64 {
        let e = [
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        ];
        e.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn powi(&self, n: i64) -> Self {
        let mut out = Quaternion::ONE;
        let base = if n >= 0 { *self } else { self.inverse() };
        for _ in 0..n.unsigned_abs() {
            out = out * base;
        }
        out
    }
}

impl std::ops::Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, r: Quaternion) -> Quaternion {
        Quaternion::new(
            self.a * r.a - self.b * r.b - self.c * r.c - self.d * r.d,
            self.a * r.b + self.b * r.a + self.c * r.d - self.d * r.c,
            self.a * r.c - self.b * r.d + self.c * r.a + self.d * r.b,
            self.a * r.d + self.b * r.c - self.c * r.b + self.d * r.a,
        )
    }
}

impl std::ops::Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// A unit quaternion that conjugates the first direction onto the second.
fn align(from: [f64; 3], to: [f64; 3]) -> Quaternion {
    let dot = from[0] * to[0] + from[1] * to[1] + from[2] * to[2];
    let cross = [
        from[1] * to[2] - from[2] * to[1],
        from[2] * to[0] - from[0] * to[2],
        from[0] * to[1] - from[1] * to[0],
    ];
    let cross_norm = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    if cross_norm < 1e-12 {
        if dot >= 0.0 {
            return Quaternion::ONE;
        }
        // Antiparallel: rotate by pi about any perpendicular direction.
        let perp = if from[0].abs() < 0.9 {
            [0.0, from[2], -from[1]]
        } else {
            [from[2], 0.0, -from[0]]
        };
        return Quaternion::rotation(PI / 2.0, perp);
    }
    // Conjugation by a rotation of half the geometric angle.
    let half = clamp_cos(dot).acos() / 2.0;
    Quaternion::rotation(half, cross)
}

/// The spherical triangle condition: rotations of angles `t1` and `t2`
/// compose to one of angle `t3` for some choice of axes exactly when
/// `|t1 - t2| <= t3 <= min(t1 + t2, 2 pi - t1 - t2)`.
pub fn sz_realizable(t1: f64, t2: f64, t3: f64) -> bool {
    let eps = 1e-12;
    (t1 - t2).abs() - eps <= t3 && t3 <= (t1 + t2).min(2.0 * PI - t1 - t2) + eps
}

/// Constructive form: `A` of angle `t1` about the `i` axis and `B` of
/// angle `t2` about an axis in the `i`-`j` plane with `angle(A B) = t3`.
pub fn sz_construct(t1: f64, t2: f64, t3: f64) -> Result<(Quaternion, Quaternion), Error> {
    if !sz_realizable(t1, t2, t3) {
        return Err(Error::NotRealizable(format!(
            "no axis placement composes angles {t1:.6} and {t2:.6} into {t3:.6}"
        )));
    }
    let a = Quaternion::rotation(t1, [1.0, 0.0, 0.0]);
    let (s1, s2) = (t1.sin(), t2.sin());
    let phi = if s1 * s2 < 1e-14 {
        0.0
    } else {
        // scalar(A B) = cos t1 cos t2 - sin t1 sin t2 cos(phi) = cos t3.
        clamp_cos((t1.cos() * t2.cos() - t3.cos()) / (s1 * s2)).acos()
    };
    let b = Quaternion::rotation(t2, [phi.cos(), phi.sin(), 0.0]);
    Ok((a, b))
}

/// Pick the rotation angle `pi k / p` for a fiber of order `p`: `k` must
/// match the parity of `q` so that the filling relation closes with the
/// central fiber image `-1`, and the angle must lie in `[pi/4, 2 pi/3]`;
/// among admissible `k` the one closest to a right angle wins.
fn fiber_angle(p: i64, q: i64) -> Result<f64, Error> {
    let mut best: Option<(f64, i64)> = None;
    for k in 1..p {
        if (k - q).rem_euclid(2) != 0 {
            continue;
        }
        let theta = PI * k as f64 / p as f64;
        if !(PI / 4.0 - 1e-12..=2.0 * PI / 3.0 + 1e-12).contains(&theta) {
            continue;
        }
        let score = (theta - PI / 2.0).abs();
        if best.map_or(true, |(s, _)| score < s - 1e-15) {
            best = Some((score, k));
        }
    }
    let (_, k) = best.ok_or(Error::NoAdmissibleAngle)?;
    Ok(PI * k as f64 / p as f64)
}

/// Representation of the fundamental group of a Seifert fibration over
/// `S^2` with `n >= 4` exceptional fibers, sending the regular fiber to
/// `-1` and realizing the prescribed angles of the partial products
/// `rho(c_1 ... c_i)` for `i = 2, ..., n-2`.  Returns the images of the
/// exceptional fibers `c_1, ..., c_n`; distinct prescribed angles yield
/// representations with distinct traces, witnessing an infinite character
/// variety.
pub fn build_su2_s2base(
    m: &GeneralSeifertData,
    partial_angles: &[f64],
) -> Result<Vec<Quaternion>, Error> {
    if m.base != BaseSurface::S2 {
        return Err(Error::InconsistentData("base surface must be S^2".into()));
    }
    let n = m.slopes.len();
    if n < 4 {
        return Err(Error::InconsistentData(format!(
            "need at least four exceptional fibers, got {n}"
        )));
    }
    if m.slopes.iter().any(|s| s.p < 2) {
        return Err(Error::InconsistentData("every fiber must have p >= 2".into()));
    }
    if partial_angles.len() != n - 3 {
        return Err(Error::InconsistentData(format!(
            "expected {} partial-product angles, got {}",
            n - 3,
            partial_angles.len()
        )));
    }
    if partial_angles
        .iter()
        .any(|&phi| !(5.0 * PI / 12.0 - 1e-12..=PI / 2.0 + 1e-12).contains(&phi))
    {
        return Err(Error::InconsistentData(
            "partial-product angles must lie in [5 pi / 12, pi / 2]".into(),
        ));
    }
    let thetas: Vec<f64> = m
        .slopes
        .iter()
        .map(|s| fiber_angle(s.p, s.q))
        .collect::<Result<_, _>>()?;

    // Extend a partial product to a prescribed angle: realize the
    // abstract angle triangle about the i axis, then conjugate the new
    // factor into the frame of the current product.
    let extend = |prod: Quaternion, theta: f64, target: f64| -> Result<Quaternion, Error> {
        let (_, b) = sz_construct(prod.angle(), theta, target)?;
        let g = align([1.0, 0.0, 0.0], prod.axis());
        Ok(g * b * g.inverse())
    };

    let mut images = vec![Quaternion::rotation(thetas[0], [1.0, 0.0, 0.0])];
    let mut prod = images[0];
    for i in 1..=n - 3 {
        let next = extend(prod, thetas[i], partial_angles[i - 1])?;
        prod = prod * next;
        images.push(next);
    }
    // Close up: give c_{n-1} an axis making the product have the angle of
    // c_n, then let c_n be the exact inverse of the product so far.
    let next = extend(prod, thetas[n - 2], thetas[n - 1])?;
    prod = prod * next;
    images.push(next);
    images.push(prod.inverse());
    Ok(images)
}

/// Largest relation residual of fiber images over `S^2` with the regular
/// fiber sent to `-1`: the filling relations `c_i^{p_i} h^{q_i}` and the
/// base relation `c_1 ... c_n` (commutators with the central fiber are
/// exact).
pub fn su2_residual(m: &GeneralSeifertData, images: &[Quaternion]) -> f64 {
    assert_eq!(images.len(), m.slopes.len());
    let mut worst: f64 = 0.0;
    let mut prod = Quaternion::ONE;
    for (s, rho) in m.slopes.iter().zip(images) {
        let filling = rho.powi(s.p) * Quaternion::ONE.powi(0) * (-Quaternion::ONE).powi(s.q);
        worst = worst.max(filling.dist(&Quaternion::ONE));
        prod = prod * *rho;
    }
    worst.max(prod.dist(&Quaternion::ONE))
}

/// SU(2) representation over `RP^2`: fiber images with prescribed
/// rotation axes, and the image of the cross-cap loop.
#[derive(Clone, Debug, Serialize)]
pub struct Rp2Rep {
    pub fibers: Vec<Quaternion>,
    pub crosscap: Quaternion,
}

impl Rp2Rep {
    /// Largest residual over the `RP^2` presentation relations with the
    /// regular fiber sent to `-1`: fillings `c_k^{p_k} h^{q_k}` and the
    /// base relation `c_1 ... c_n a^2` (the reflection relation
    /// `a h a^{-1} h` is exact for central fiber image).
    pub fn residual(&self, m: &GeneralSeifertData) -> f64 {
        let mut worst: f64 = 0.0;
        let mut prod = Quaternion::ONE;
        for (s, rho) in m.slopes.iter().zip(&self.fibers) {
            let filling = rho.powi(s.p) * (-Quaternion::ONE).powi(s.q);
            worst = worst.max(filling.dist(&Quaternion::ONE));
            prod = prod * *rho;
        }
        prod = prod * self.crosscap * self.crosscap;
        worst.max(prod.dist(&Quaternion::ONE))
    }
}

/// Representation over `RP^2` with `rho(c_k)` the rotation by
/// `q_k pi / p_k` about the given axis and the cross-cap loop sent to a
/// square root of the inverse of the fiber product.
pub fn build_rp2_rep(m: &GeneralSeifertData, axes: &[Quaternion]) -> Result<Rp2Rep, Error> {
    if m.base != BaseSurface::RP2 {
        return Err(Error::InconsistentData("base surface must be RP^2".into()));
    }
    if m.slopes.len() < 2 || m.slopes.iter().any(|s| s.p < 2) {
        return Err(Error::InconsistentData(
            "need at least two fibers, every p >= 2".into(),
        ));
    }
    if axes.len() != m.slopes.len() {
        return Err(Error::InconsistentData(format!(
            "expected {} rotation axes, got {}",
            m.slopes.len(),
            axes.len()
        )));
    }
    if let Some(bad) = axes.iter().find(|v| !v.is_pure_imaginary_unit()) {
        return Err(Error::InconsistentData(format!(
            "rotation axis {bad:?} is not a purely imaginary unit quaternion"
        )));
    }
    let mut fibers = Vec::with_capacity(axes.len());
    let mut prod = Quaternion::ONE;
    for (s, v) in m.slopes.iter().zip(axes) {
        let alpha = s.q as f64 * PI / s.p as f64;
        let rho = Quaternion::new(
            alpha.cos(),
            alpha.sin() * v.b,
            alpha.sin() * v.c,
            alpha.sin() * v.d,
        );
        prod = prod * rho;
        fibers.push(rho);
    }
    Ok(Rp2Rep { fibers, crosscap: prod.inverse().sqrt() })
}

/// Closed interval `[alpha - beta, alpha + beta]` swept by
/// `Tr rho(c_1 c_2)` as the relative axis angle of the first two fibers
/// varies, for fixed rotation angles `q_k pi / p_k`.
pub fn rp2_trace_interval(m: &GeneralSeifertData) -> (f64, f64) {
    let a1 = m.slopes[0].q as f64 * PI / m.slopes[0].p as f64;
    let a2 = m.slopes[1].q as f64 * PI / m.slopes[1].p as f64;
    (2.0 * a1.cos() * a2.cos(), (2.0 * a1.sin() * a2.sin()).abs())
}

// ---------------------------------------------------------------------
// SL(2,C) representations and twisted cohomology.
// ---------------------------------------------------------------------

type M2 = Matrix2<Complex64>;
type M3 = Matrix3<Complex64>;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit_phase(turns: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * turns)
}

/// Exact inverse of a determinant-one matrix via the adjugate.
fn sl2_inverse(g: &M2) -> M2 {
    M2::new(g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)])
}

fn m2_power(g: &M2, e: i64) -> M2 {
    let base = if e >= 0 { *g } else { sl2_inverse(g) };
    let mut out = M2::identity();
    for _ in 0..e.unsigned_abs() {
        out *= base;
    }
    out
}

/// An SL(2,C) representation of the three-fiber presentation, stored as
/// the images of `h, c_1, c_2, c_3`.
#[derive(Clone, Debug)]
pub struct Sl2Rep {
    pub h: M2,
    pub c: [M2; 3],
}

impl Sl2Rep {
    pub fn image(&self, g: Gen) -> M2 {
        match g {
            Gen::H => self.h,
            Gen::C1 => self.c[0],
            Gen::C2 => self.c[1],
            Gen::C3 => self.c[2],
        }
    }

    pub fn word_image(&self, word: &Word) -> M2 {
        let mut out = M2::identity();
        for &(g, e) in word {
            out *= m2_power(&self.image(g), e);
        }
        out
    }

    /// Largest deviation of a presentation relator from the identity.
    pub fn relation_residual(&self, m: &SeifertData) -> f64 {
        m.presentation()
            .iter()
            .map(|w| (self.word_image(w) - M2::identity()).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self, g: Gen) -> Complex64 {
        self.image(g).trace()
    }
}

/// Which representation to build on a three-fiber presentation.
#[derive(Clone, Debug)]
pub enum RepSpec {
    /// All generators to `±I`; the sign is the image of the fiber.
    Central { h_negative: bool },
    /// The n-th character of `H_1` (dual-group enumeration order) as a
    /// diagonal representation.
    Diagonal { index: usize },
    /// The n-th character of `H_1` that is exceptional: fiber image
    /// `±I`, some `c_i` image non-central.
    Exceptional { index: usize },
    /// Irreducible with fiber image `±I` and the given exact traces of
    /// `c_1, c_2, c_3`.
    Irreducible { h_negative: bool, c_traces: [AngleIndex; 3] },
}

impl RepSpec {
    /// Parse the textual form used by front ends: `central`, `central:-`,
    /// `diagonal:IDX`, `exceptional:IDX`, or `irreducible:N` (the `N`-th
    /// irreducible character in enumeration order on `m`).
    pub fn parse(m: &SeifertData, text: &str) -> Result<RepSpec, Error> {
        let (head, arg) = match text.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (text, None),
        };
        let index = |a: Option<&str>| -> Result<usize, Error> {
            a.ok_or_else(|| {
                Error::InconsistentData(format!("`{head}` needs an index, e.g. {head}:0"))
            })?
            .parse()
            .map_err(|e| Error::InconsistentData(format!("bad index in `{text}`: {e}")))
        };
        match head {
            "central" => {
                let h_negative = match arg {
                    None | Some("+") | Some("pos") => false,
                    Some("-") | Some("neg") => true,
                    Some(other) => {
                        return Err(Error::InconsistentData(format!(
                            "bad central sign `{other}` (use + or -)"
                        )))
                    }
                };
                Ok(RepSpec::Central { h_negative })
            }
            "diagonal" => Ok(RepSpec::Diagonal { index: index(arg)? }),
            "exceptional" => Ok(RepSpec::Exceptional { index: index(arg)? }),
            "irreducible" => {
                let n = index(arg)?;
                let table = enumerate_characters(m, DEFAULT_ENUMERATION_BOUND)?;
                let record = table
                    .records
                    .iter()
                    .filter(|r| r.kind == CharacterKind::Irreducible)
                    .nth(n)
                    .ok_or_else(|| {
                        Error::InconsistentData(format!(
                            "fewer than {} irreducible characters",
                            n + 1
                        ))
                    })?;
                Ok(RepSpec::Irreducible {
                    h_negative: record.h_trace.is_minus_two(),
                    c_traces: record.c_traces,
                })
            }
            other => Err(Error::InconsistentData(format!(
                "unknown representation spec `{other}` \
                 (use central[:sign] | diagonal:IDX | exceptional:IDX | irreducible:N)"
            ))),
        }
    }
}

/// The character kind a dual-group element induces (never
/// `Irreducible`).
pub fn dual_character_kind(data: &AbelianGroupData, t: [i128; 3]) -> CharacterKind {
    let d = data.snf_diagonal[2];
    let central = |i: usize| 2 * data.pairing(t, data.generator_images[i]) % d == 0;
    let h_central = central(0);
    let central_c = (1..4).filter(|&i| central(i)).count();
    if h_central && central_c == 3 {
        CharacterKind::Central
    } else if h_central && central_c == 0 {
        CharacterKind::ExceptionalAbelian
    } else {
        CharacterKind::Abelian
    }
}

fn diagonal_rep(data: &AbelianGroupData, t: [i128; 3]) -> Sl2Rep {
    let d = data.snf_diagonal[2] as f64;
    let lambda = |i: usize| {
        let val = data.pairing(t, data.generator_images[i]);
        unit_phase(val as f64 / d)
    };
    let diag = |l: Complex64| M2::new(l, c64(0.0, 0.0), c64(0.0, 0.0), 1.0 / l);
    Sl2Rep {
        h: diag(lambda(0)),
        c: [diag(lambda(1)), diag(lambda(2)), diag(lambda(3))],
    }
}

fn nth_dual_character(
    data: &AbelianGroupData,
    index: usize,
    want: Option<CharacterKind>,
) -> Result<[i128; 3], Error> {
    let mut found = None;
    let mut seen = 0usize;
    data.for_each_character(|t| {
        if found.is_some() {
            return;
        }
        if let Some(kind) = want {
            if dual_character_kind(data, t) != kind {
                return;
            }
        }
        if seen == index {
            found = Some(t);
        }
        seen += 1;
    });
    found.ok_or_else(|| {
        Error::InconsistentData(format!(
            "character index {index} out of range ({seen} available)"
        ))
    })
}

/// Build the requested representation and verify every presentation
/// relation to [`REP_RESIDUAL_TOLERANCE`].
pub fn construct_sl2_rep(m: &SeifertData, spec: &RepSpec) -> Result<Sl2Rep, Error> {
    let rep = match spec {
        RepSpec::Central { h_negative } => central_rep(m, *h_negative)?,
        RepSpec::Diagonal { index } => {
            let data = smith_normal_form(&PresentationMatrix::of(m));
            if data.order().is_none() {
                return Err(Error::EulerZero);
            }
            diagonal_rep(&data, nth_dual_character(&data, *index, None)?)
        }
        RepSpec::Exceptional { index } => {
            let data = smith_normal_form(&PresentationMatrix::of(m));
            if data.order().is_none() {
                return Err(Error::EulerZero);
            }
            diagonal_rep(
                &data,
                nth_dual_character(&data, *index, Some(CharacterKind::ExceptionalAbelian))?,
            )
        }
        RepSpec::Irreducible { h_negative, c_traces } => irreducible_rep(*h_negative, c_traces)?,
    };
    let residual = rep.relation_residual(m);
    if residual > REP_RESIDUAL_TOLERANCE {
        return Err(Error::InconsistentData(format!(
            "constructed representation misses the relations by {residual:.3e}"
        )));
    }
    Ok(rep)
}

fn central_rep(m: &SeifertData, h_negative: bool) -> Result<Sl2Rep, Error> {
    let sigma: i64 = if h_negative { -1 } else { 1 };
    let sign_pow = |s: i64, e: i64| if e % 2 == 0 { 1 } else { s };
    for mask in 0..8u8 {
        let eps = [0, 1, 2].map(|i| if mask & (1 << i) != 0 { -1i64 } else { 1 });
        let filling_ok =
            (0..3).all(|i| sign_pow(eps[i], m.p(i)) * sign_pow(sigma, m.q(i)) == 1);
        if filling_ok && eps[0] * eps[1] * eps[2] == 1 {
            let scal = |s: i64| M2::identity() * c64(s as f64, 0.0);
            return Ok(Sl2Rep {
                h: scal(sigma),
                c: [scal(eps[0]), scal(eps[1]), scal(eps[2])],
            });
        }
    }
    Err(Error::InconsistentData(format!(
        "no central representation sends the fiber to {}I",
        if h_negative { "-" } else { "+" },
    )))
}

fn irreducible_rep(h_negative: bool, c_traces: &[AngleIndex; 3]) -> Result<Sl2Rep, Error> {
    if c_traces[0].is_central() {
        return Err(Error::InconsistentData(
            "irreducible construction needs a non-central first trace".into(),
        ));
    }
    let zeta = unit_phase(c_traces[0].k() as f64 / (2 * c_traces[0].n()) as f64);
    let tau2 = c64(c_traces[1].trace(), 0.0);
    let tau3 = c64(c_traces[2].trace(), 0.0);
    // Solve a + d = tau2, zeta a + zeta^{-1} d = tau3.
    let a = (tau3 - tau2 / zeta) / (zeta - 1.0 / zeta);
    let d = tau2 - a;
    let b = c64(1.0, 0.0);
    let c = a * d - 1.0;
    let rho1 = M2::new(zeta, c64(0.0, 0.0), c64(0.0, 0.0), 1.0 / zeta);
    let rho2 = M2::new(a, b, c, d);
    let rho3 = sl2_inverse(&(rho1 * rho2));
    let sigma = c64(if h_negative { -1.0 } else { 1.0 }, 0.0);
    Ok(Sl2Rep { h: M2::identity() * sigma, c: [rho1, rho2, rho3] })
}

/// Dimensions of the twisted cocycle and coboundary spaces at a
/// representation, with the smallest spectral gap met at the rank cuts.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CocycleReport {
    pub dim_z1: usize,
    pub dim_b1: usize,
    pub dim_h1: usize,
    pub singular_gap: f64,
}

/// Coordinates of a traceless matrix `[[x, y], [z, -x]]` as `(x, y, z)`.
fn ad(g: &M2) -> M3 {
    let ginv = sl2_inverse(g);
    let basis = [
        M2::new(c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)),
        M2::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)),
        M2::new(c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)),
    ];
    let mut out = M3::zeros();
    for (j, x) in basis.iter().enumerate() {
        let y = g * x * ginv;
        out[(0, j)] = y[(0, 0)];
        out[(1, j)] = y[(0, 1)];
        out[(2, j)] = y[(1, 0)];
    }
    out
}

fn geometric_sum(a: &M3, n: u64) -> M3 {
    let mut sum = M3::zeros();
    let mut pow = M3::identity();
    for _ in 0..n {
        sum += pow;
        pow *= a;
    }
    sum
}

/// Coefficient matrices of `eps(word)` as a linear map of the generator
/// cocycle values `(eps(h), eps(c1), eps(c2), eps(c3))`, folded with
/// `eps(x y) = eps(x) + Ad rho(x) eps(y)` and the power and inverse rules
/// it implies.
fn word_cocycle_coefficients(rho: &Sl2Rep, word: &Word) -> [M3; 4] {
    let mut coeffs = [M3::zeros(); 4];
    let mut prefix = M3::identity();
    for &(g, e) in word {
        let adg = ad(&rho.image(g));
        let block = if e >= 0 {
            geometric_sum(&adg, e as u64)
        } else {
            -ad(&m2_power(&rho.image(g), e)) * geometric_sum(&adg, (-e) as u64)
        };
        coeffs[g.idx()] += prefix * block;
        prefix *= ad(&m2_power(&rho.image(g), e));
    }
    coeffs
}

/// Numerical rank with a spectral-gap certificate: singular values below
/// `RANK_RELATIVE_TOLERANCE` times the largest are zero, and the ratio
/// across the cut must be at least `RANK_GAP_FACTOR`.
fn rank_with_gap(mat: &DMatrix<Complex64>) -> Result<(usize, f64), Error> {
    let mut sv: Vec<f64> = mat.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok((0, f64::INFINITY));
    }
    let rank = sv.iter().take_while(|&&s| s > RANK_RELATIVE_TOLERANCE * top).count();
    let gap = if rank == sv.len() || sv[rank] == 0.0 {
        f64::INFINITY
    } else if rank == 0 {
        f64::INFINITY
    } else {
        sv[rank - 1] / sv[rank]
    };
    if gap < RANK_GAP_FACTOR {
        return Err(Error::IllConditioned(format!(
            "singular values {:.3e} and {:.3e} straddle the rank cut with ratio {:.1}",
            sv[rank - 1],
            sv[rank],
            gap
        )));
    }
    Ok((rank, gap))
}

/// Twisted cocycle dimensions at a representation: `Z^1` from folding
/// the seven presentation relators, `B^1` from the principal cocycles
/// `A - Ad rho(g) A`, both as singular-value ranks.
pub fn cocycle_dims(rho: &Sl2Rep, m: &SeifertData) -> Result<CocycleReport, Error> {
    let residual = rho.relation_residual(m);
    if residual > REP_RESIDUAL_TOLERANCE {
        return Err(Error::InconsistentData(format!(
            "representation misses the relations by {residual:.3e}"
        )));
    }
    let relators = m.presentation();
    let mut z = DMatrix::<Complex64>::zeros(3 * relators.len(), 12);
    for (r, word) in relators.iter().enumerate() {
        let coeffs = word_cocycle_coefficients(rho, word);
        for (g, block) in coeffs.iter().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    z[(3 * r + i, 3 * g + j)] = block[(i, j)];
                }
            }
        }
    }
    let (z_rank, z_gap) = rank_with_gap(&z)?;

    let mut b = DMatrix::<Complex64>::zeros(12, 3);
    for (g, gen) in Gen::ALL.iter().enumerate() {
        let block = M3::identity() - ad(&rho.image(*gen));
        for i in 0..3 {
            for j in 0..3 {
                b[(3 * g + i, j)] = block[(i, j)];
            }
        }
    }
    let (b_rank, b_gap) = rank_with_gap(&b)?;

    let dim_z1 = 12 - z_rank;
    let dim_b1 = b_rank;
    assert!(dim_z1 >= dim_b1, "coboundaries exceed cocycles");
    Ok(CocycleReport {
        dim_z1,
        dim_b1,
        dim_h1: dim_z1 - dim_b1,
        singular_gap: z_gap.min(b_gap),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sd(slopes: [(i64, i64); 3]) -> SeifertData {
        SeifertData::new(slopes).unwrap()
    }

    fn gsd(base: BaseSurface, slopes: &[(i64, i64)]) -> GeneralSeifertData {
        GeneralSeifertData::new(base, slopes).unwrap()
    }

    #[test]
    fn quaternion_algebra() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * i, -Quaternion::ONE);
        assert_eq!(j * j, -Quaternion::ONE);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        // Square root of -1 picks the i axis.
        assert!((-Quaternion::ONE).sqrt().dist(&i) < 1e-12);
        // Square roots halve the rotation angle.
        let q = Quaternion::rotation(1.3, [1.0, 2.0, -1.0]);
        let r = q.sqrt();
        assert!((r * r).dist(&q) < 1e-12);
        assert!((r.angle() - 0.65).abs() < 1e-12);
        // powi matches repeated multiplication and inverses.
        assert!(q.powi(3).dist(&(q * q * q)) < 1e-12);
        assert!((q.powi(-2) * q.powi(2)).dist(&Quaternion::ONE) < 1e-12);
    }

    #[test]
    fn align_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let axis = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            if axis.iter().map(|x| x * x).sum::<f64>() < 1e-3 {
                continue;
            }
            let target = Quaternion::rotation(1.1, axis);
            let g = align([1.0, 0.0, 0.0], target.axis());
            let moved = g * Quaternion::rotation(1.1, [1.0, 0.0, 0.0]) * g.inverse();
            assert!(moved.dist(&target) < 1e-10);
        }
        // Antiparallel case.
        let g = align([1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]);
        let moved = g * Quaternion::I * g.inverse();
        assert!(moved.dist(&-Quaternion::I) < 1e-12);
    }

    #[test]
    fn sz_condition_examples() {
        assert!(sz_realizable(PI / 2.0, PI / 2.0, PI / 2.0));
        assert!(!sz_realizable(PI / 4.0, PI / 4.0, PI));
        for theta in [0.0, 0.3, PI / 2.0, 2.9, PI] {
            assert!(sz_realizable(theta, theta, 0.0));
        }
    }

    #[test]
    fn sz_construct_examples() {
        let (a, b) = sz_construct(PI / 2.0, PI / 2.0, PI / 2.0).unwrap();
        assert!(a.dist(&Quaternion::I) < 1e-12);
        assert!(b.dist(&Quaternion::J) < 1e-12);
        assert!(((a * b).angle() - PI / 2.0).abs() < 1e-12);

        // cos(phi) = (cos(pi/3)^2 - cos(2 pi/3)) / sin(pi/3)^2 = 1.
        let (a, b) = sz_construct(PI / 3.0, PI / 3.0, 2.0 * PI / 3.0).unwrap();
        assert!(a.dist(&b) < 1e-12);
        assert!(((a * b).angle() - 2.0 * PI / 3.0).abs() < 1e-12);

        assert!(matches!(
            sz_construct(PI / 4.0, PI / 4.0, PI),
            Err(Error::NotRealizable(_))
        ));
    }

    #[test]
    fn sz_construct_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = 0;
        while seen < 10_000 {
            let t1 = rng.gen_range(0.0..PI);
            let t2 = rng.gen_range(0.0..PI);
            let t3 = rng.gen_range(0.0..PI);
            if !sz_realizable(t1, t2, t3) {
                continue;
            }
            seen += 1;
            let (a, b) = sz_construct(t1, t2, t3).unwrap();
            assert!(((a * b).angle() - t3).abs() < 1e-10, "({t1},{t2},{t3})");
        }
    }

    #[test]
    fn s2base_construction() {
        let m = gsd(BaseSurface::S2, &[(2, 1), (2, 1), (2, 1), (2, -1)]);
        let phi = 5.0 * PI / 12.0;
        let images = build_su2_s2base(&m, &[phi]).unwrap();
        assert_eq!(images.len(), 4);
        assert!(su2_residual(&m, &images) < 1e-9);
        // The prescribed partial product angle is realized, and distinct
        // prescriptions give distinct traces of rho(c1 c2).
        let p2 = images[0] * images[1];
        assert!((p2.angle() - phi).abs() < 1e-10);
        let other = build_su2_s2base(&m, &[PI / 2.0]).unwrap();
        let q2 = other[0] * other[1];
        assert!((2.0 * p2.a - 2.0 * q2.a).abs() > 1e-3);

        // Five fibers, two prescribed angles.
        let m = gsd(BaseSurface::S2, &[(2, 1), (3, 1), (3, 2), (5, 2), (2, -1)]);
        let images = build_su2_s2base(&m, &[5.0 * PI / 12.0, PI / 2.0]).unwrap();
        assert!(su2_residual(&m, &images) < 1e-9);

        // Too few fibers.
        let m = gsd(BaseSurface::S2, &[(2, 1), (3, 1), (5, 1)]);
        assert!(build_su2_s2base(&m, &[]).is_err());
    }

    #[test]
    fn rp2_construction() {
        let m = gsd(BaseSurface::RP2, &[(3, 1), (5, 2)]);
        let rep = build_rp2_rep(&m, &[Quaternion::I, Quaternion::J]).unwrap();
        assert!(rep.residual(&m) < 1e-9);

        // Same-axis fibers compose like plane rotations.
        let rep = build_rp2_rep(&m, &[Quaternion::I, Quaternion::I]).unwrap();
        let tr = 2.0 * (rep.fibers[0] * rep.fibers[1]).a;
        assert!((tr - 2.0 * (PI / 3.0 + 2.0 * PI / 5.0).cos()).abs() < 1e-12);

        // The trace of rho(c1 c2) sweeps the full interval as the second
        // axis rotates.
        let (alpha, beta) = rp2_trace_interval(&m);
        let mut values = Vec::new();
        for s in 0..100 {
            let t = PI * s as f64 / 99.0;
            let axis = Quaternion::new(0.0, t.cos(), t.sin(), 0.0);
            let rep = build_rp2_rep(&m, &[Quaternion::I, axis]).unwrap();
            assert!(rep.residual(&m) < 1e-9);
            let tr = 2.0 * (rep.fibers[0] * rep.fibers[1]).a;
            assert!(tr >= alpha - beta - 1e-12 && tr <= alpha + beta + 1e-12);
            values.push(tr);
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        assert!(values.len() >= 100, "only {} distinct traces", values.len());
        assert!((values[0] - (alpha - beta)).abs() < 1e-9);
        assert!((values[values.len() - 1] - (alpha + beta)).abs() < 1e-9);
    }

    #[test]
    fn central_reps() {
        let m = sd([(2, 1), (3, 1), (5, 1)]);
        let rep = construct_sl2_rep(&m, &RepSpec::Central { h_negative: false }).unwrap();
        assert_eq!(rep.h, M2::identity());
        let report = cocycle_dims(&rep, &m).unwrap();
        assert_eq!((report.dim_z1, report.dim_b1, report.dim_h1), (0, 0, 0));

        // With an even p the fiber cannot go to -I ...
        assert!(construct_sl2_rep(&m, &RepSpec::Central { h_negative: true }).is_err());
        // ... but all-odd data with compatible signs admits it.
        let m = sd([(3, 1), (3, 2), (3, 1)]);
        let rep = construct_sl2_rep(&m, &RepSpec::Central { h_negative: true }).unwrap();
        assert!(rep.relation_residual(&m) < 1e-12);
        let report = cocycle_dims(&rep, &m).unwrap();
        assert_eq!(report.dim_h1, 0);
    }

    #[test]
    fn diagonal_rep_cocycles() {
        // H_1 of ((3,1),(3,1),(3,1)) has exceptional characters; such a
        // character sends each c_i to a cube root of unity and h to I.
        let m = sd([(3, 1), (3, 1), (3, 1)]);
        let data = smith_normal_form(&PresentationMatrix::of(&m));
        let mut kinds = std::collections::BTreeMap::new();
        let mut exceptional_example = None;
        data.for_each_character(|t| {
            let kind = dual_character_kind(&data, t);
            *kinds.entry(format!("{kind:?}")).or_insert(0usize) += 1;
            if kind == CharacterKind::ExceptionalAbelian && exceptional_example.is_none() {
                exceptional_example = Some(t);
            }
        });
        let t = exceptional_example.expect("no exceptional character found");
        let rep = diagonal_rep(&data, t);
        assert!(rep.relation_residual(&m) < 1e-9);
        let report = cocycle_dims(&rep, &m).unwrap();
        assert_eq!((report.dim_z1, report.dim_b1, report.dim_h1), (4, 2, 2));

        // Exceptional selection by index agrees with the enumeration.
        let rep2 = construct_sl2_rep(&m, &RepSpec::Exceptional { index: 0 }).unwrap();
        assert!(rep2.relation_residual(&m) < 1e-9);

        // A diagonal representation with non-central fiber image.
        let m = sd([(2, 1), (3, 1), (5, 1)]);
        let data = smith_normal_form(&PresentationMatrix::of(&m));
        let mut checked = 0;
        data.for_each_character(|t| {
            let kind = dual_character_kind(&data, t);
            if kind == CharacterKind::Central {
                return;
            }
            let rep = diagonal_rep(&data, t);
            assert!(rep.relation_residual(&m) < 1e-9);
            let report = cocycle_dims(&rep, &m).unwrap();
            assert_eq!(report.dim_h1, 0, "character {t:?}");
            assert_eq!((report.dim_z1, report.dim_b1), (2, 2));
            checked += 1;
        });
        // |H_1| = 31 for this instance: 30 non-central characters.
        assert_eq!(checked, 30);
    }

    #[test]
    fn irreducible_rep_cocycles() {
        use crate::characters::enumerate_characters;
        let m = sd([(2, 1), (3, -1), (5, -1)]);
        let table = enumerate_characters(&m, 1 << 20).unwrap();
        let irreducibles: Vec<_> = table
            .records
            .iter()
            .filter(|r| r.kind == CharacterKind::Irreducible)
            .collect();
        assert_eq!(irreducibles.len(), 2);
        for rec in irreducibles {
            let spec = RepSpec::Irreducible {
                h_negative: rec.h_trace == AngleIndex::minus_two(),
                c_traces: rec.c_traces,
            };
            let rep = construct_sl2_rep(&m, &spec).unwrap();
            assert!(rep.relation_residual(&m) < 1e-9);
            for (i, g) in [Gen::C1, Gen::C2, Gen::C3].into_iter().enumerate() {
                assert!((rep.trace(g).re - rec.c_traces[i].trace()).abs() < 1e-10);
                assert!(rep.trace(g).im.abs() < 1e-10);
            }
            let report = cocycle_dims(&rep, &m).unwrap();
            assert_eq!((report.dim_z1, report.dim_b1, report.dim_h1), (3, 3, 0));
        }
    }

    /// Fiber angle selection: parity matches q, angle in the window,
    /// nearest to a right angle.
    #[test]
    fn fiber_angle_selection() {
        assert!((fiber_angle(2, 1).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!((fiber_angle(3, 2).unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((fiber_angle(3, 1).unwrap() - PI / 3.0).abs() < 1e-12);
        assert!((fiber_angle(5, 2).unwrap() - 2.0 * PI / 5.0).abs() < 1e-12);
        assert!((fiber_angle(5, 1).unwrap() - 3.0 * PI / 5.0).abs() < 1e-12);
        for p in 2..30 {
            for q in 1..p {
                if num::integer::gcd(p, q) == 1 {
                    let theta = fiber_angle(p, q).unwrap();
                    assert!((PI / 4.0 - 1e-12..=2.0 * PI / 3.0 + 1e-12).contains(&theta));
                }
            }
        }
    }
}
