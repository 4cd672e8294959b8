//! The SL(2,C) character variety of a small Seifert fibered space with
//! nonzero Euler number: exact enumeration of its (finitely many) points,
//! the skein-dimension prediction, and explicit trace-function bases of its
//! coordinate ring together with the evaluation matrix certifying their
//! linear independence.
//!
//! Characters come in two families.  Abelian ones are orbits of characters
//! `lambda` of `H_1` under inversion; their trace data is computed exactly
//! from the Smith form of the relation matrix.  Irreducible ones send the
//! central fiber class `h` to `±I` and are classified by the triple of
//! traces of `c_1, c_2, c_3`, each ranging over an explicit set of values
//! `2 cos(pi j / p_i)`.  All trace values are represented exactly as
//! rational angles ([`AngleIndex`]); floating point appears only in the
//! final evaluation matrix and its singular values.

use crate::homology::{
    self, abelian_count, exceptional_count, h1_order, smith_normal_form, PresentationMatrix,
    DEFAULT_ENUMERATION_BOUND,
};
use crate::seifert::SeifertData;
use crate::Error;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// The exact real number `2 cos(pi k / n)`, canonicalized so that distinct
/// `(k, n)` represent distinct values: `0 <= k <= n`, `gcd(k, n) = 1` (with
/// `0/1` and `1/1` for the endpoints ±2).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct AngleIndex {
    k: i64,
    n: i64,
}

impl AngleIndex {
    pub fn new(k: i64, n: i64) -> Self {
        assert!(n >= 1, "angle denominator must be positive");
        let mut k = k.rem_euclid(2 * n);
        if k > n {
            k = 2 * n - k;
        }
        let g = num::integer::gcd(k, n).max(1);
        AngleIndex { k: k / g, n: n / g }
    }

    pub fn two() -> Self {
        AngleIndex { k: 0, n: 1 }
    }

    pub fn minus_two() -> Self {
        AngleIndex { k: 1, n: 1 }
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// The trace value `2 cos(pi k / n)` as a float.
    pub fn trace(&self) -> f64 {
        2.0 * (std::f64::consts::PI * self.k as f64 / self.n as f64).cos()
    }

    /// Whether the trace is `+2` or `-2` (the underlying eigenvalue is `±1`).
    pub fn is_central(&self) -> bool {
        self.k == 0 || self.k == self.n
    }

    pub fn is_two(&self) -> bool {
        self.k == 0
    }

    pub fn is_minus_two(&self) -> bool {
        self.k == self.n && self.n == 1
    }
}

impl PartialOrd for AngleIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for AngleIndex {
    /// Order by angle, i.e. by decreasing trace value, but exactly.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.k as i128 * other.n as i128).cmp(&(other.k as i128 * self.n as i128))
    }
}

impl fmt::Display for AngleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.k, self.n) {
            (0, _) => write!(f, "2"),
            (1, 1) => write!(f, "-2"),
            (k, n) => write!(f, "2cos({}pi/{})", k, n),
        }
    }
}

/// `ceil(p/2) - 1`: the number of admissible traces for a fiber generator
/// when its image must be a non-central `p`-th root of the identity.
pub fn p_plus(p: i64) -> i64 {
    (p + 1) / 2 - 1
}

/// `floor(p/2)`: the count when the `p`-th power must be `-I` instead.
pub fn p_minus(p: i64) -> i64 {
    p / 2
}

/// The trace sets: values `zeta + 1/zeta` over non-central `zeta` with
/// `zeta^p = 1` (first set) and `zeta^p = -1` (second set).
pub fn trace_sets(p: i64) -> (Vec<AngleIndex>, Vec<AngleIndex>) {
    assert!(p >= 1);
    let plus = (1..p).filter(|j| j % 2 == 0).map(|j| AngleIndex::new(j, p)).collect::<Vec<_>>();
    let minus = (1..p).filter(|j| j % 2 == 1).map(|j| AngleIndex::new(j, p)).collect::<Vec<_>>();
    debug_assert_eq!(plus.len() as i64, p_plus(p));
    debug_assert_eq!(minus.len() as i64, p_minus(p));
    (plus, minus)
}

/// `|X^irr|` by the closed formula: products of admissible trace-set sizes
/// for the two central values of `h`, minus the trace triples already taken
/// by exceptional abelian characters.
pub fn irreducible_count(m: &SeifertData) -> Result<u128, Error> {
    if h1_order(m) == 0 {
        return Err(Error::EulerZero);
    }
    let plus: u128 = (0..3).map(|i| p_plus(m.p(i)) as u128).product();
    let minus: u128 = (0..3).map(|i| p_minus(m.p(i)) as u128).product();
    Ok(plus + minus - exceptional_count(m)?)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CharacterKind {
    /// Abelian with every generator sent to `±I`.
    Central,
    /// Abelian, not exceptional.
    Abelian,
    /// Abelian with `rho(h) = ±I` but no `rho(c_i)` central — the
    /// non-reduced points of the character scheme.
    ExceptionalAbelian,
    Irreducible,
}

/// One point of the character variety, described by exact trace data on the
/// four generators.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CharacterRecord {
    pub kind: CharacterKind,
    pub h_trace: AngleIndex,
    pub c_traces: [AngleIndex; 3],
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CharacterTable {
    pub records: Vec<CharacterRecord>,
}

impl CharacterTable {
    pub fn count(&self, kind: CharacterKind) -> usize {
        self.records.iter().filter(|r| r.kind == kind).count()
    }

    pub fn abelian_total(&self) -> usize {
        self.records.iter().filter(|r| r.kind != CharacterKind::Irreducible).count()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// List every character exactly: abelian ones from the dual of `H_1`,
/// irreducible ones from the admissible trace triples minus those of the
/// exceptional abelian characters.
pub fn enumerate_characters(m: &SeifertData, bound: u128) -> Result<CharacterTable, Error> {
    let order = h1_order(m);
    if order == 0 {
        return Err(Error::EulerZero);
    }
    if order > bound {
        return Err(Error::GroupTooLarge { order, bound });
    }
    let data = smith_normal_form(&PresentationMatrix::of(m));
    let d = data.snf_diagonal;
    let big = d[2];
    let images = data.generator_images;

    let mut records = Vec::new();
    // Orbits of characters of H_1 under inversion.
    data.for_each_character(|t| {
        let neg = [0, 1, 2].map(|j| (-t[j]).rem_euclid(d[j]));
        if t > neg {
            return;
        }
        let vals = [0, 1, 2, 3].map(|g| data.pairing(t, images[g]));
        // The group order is at most the enumeration bound, so i64 is safe.
        let traces = vals.map(|v| AngleIndex::new(2 * v as i64, big as i64));
        let central = traces.iter().all(|t| t.is_central());
        let exceptional =
            traces[0].is_central() && traces[1..].iter().all(|t| !t.is_central());
        let kind = if central {
            CharacterKind::Central
        } else if exceptional {
            CharacterKind::ExceptionalAbelian
        } else {
            CharacterKind::Abelian
        };
        records.push(CharacterRecord {
            kind,
            h_trace: traces[0],
            c_traces: [traces[1], traces[2], traces[3]],
        });
    });

    // Trace triples of irreducible characters, for each central value of h.
    for h_sign in [1i64, -1] {
        let h_trace = if h_sign == 1 { AngleIndex::two() } else { AngleIndex::minus_two() };
        let sets: Vec<Vec<AngleIndex>> = (0..3)
            .map(|i| {
                let (plus, minus) = trace_sets(m.p(i));
                // rho(c_i)^{p_i} = rho(h)^{-q_i}.
                if h_sign == 1 || m.q(i) % 2 == 0 {
                    plus
                } else {
                    minus
                }
            })
            .collect();
        let taken: Vec<[AngleIndex; 3]> = records
            .iter()
            .filter(|r| r.kind == CharacterKind::ExceptionalAbelian && r.h_trace == h_trace)
            .map(|r| r.c_traces)
            .collect();
        for &t1 in &sets[0] {
            for &t2 in &sets[1] {
                for &t3 in &sets[2] {
                    let triple = [t1, t2, t3];
                    if taken.contains(&triple) {
                        continue;
                    }
                    records.push(CharacterRecord {
                        kind: CharacterKind::Irreducible,
                        h_trace,
                        c_traces: triple,
                    });
                }
            }
        }
    }
    Ok(CharacterTable { records })
}

/// Reducedness of the character scheme.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum Reducedness {
    Reduced,
    /// The scheme has this many points with 2-dimensional twisted cohomology.
    NotReducedAtExceptional { count: u128 },
}

/// The scheme is reduced exactly when there are no exceptional abelian
/// characters.
pub fn is_reduced(m: &SeifertData) -> Result<Reducedness, Error> {
    let x = exceptional_count(m)?;
    Ok(if x == 0 { Reducedness::Reduced } else { Reducedness::NotReducedAtExceptional { count: x } })
}

/// A dimension that is exact in the reduced case and otherwise only a lower
/// bound.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SkeinDimension {
    pub value: u128,
    pub exact: bool,
}

/// Dimension of the Kauffman bracket skein module over `Q(A)`: the number
/// of points of the character variety, exact when the scheme is reduced.
pub fn skein_dimension(m: &SeifertData) -> Result<SkeinDimension, Error> {
    let total = abelian_count(m)? + irreducible_count(m)?;
    Ok(SkeinDimension { value: total, exact: is_reduced(m)? == Reducedness::Reduced })
}

/// The `h`-dependent factor of a basis function.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum HPart {
    /// `t_h + 2`
    PlusTwo,
    /// `t_h - 2`
    MinusTwo,
    /// `t_h^i`
    Pow(u32),
}

/// A product `f(t_h) * t_{c1}^{k1} t_{c2}^{k2} t_{c3}^{k3}` of trace
/// functions on the character variety.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BasisDescriptor {
    pub h: HPart,
    pub k: [u32; 3],
}

impl BasisDescriptor {
    pub fn eval(&self, record: &CharacterRecord) -> f64 {
        let th = record.h_trace.trace();
        let hval = match self.h {
            HPart::PlusTwo => th + 2.0,
            HPart::MinusTwo => th - 2.0,
            HPart::Pow(i) => th.powi(i as i32),
        };
        (0..3).fold(hval, |acc, j| acc * record.c_traces[j].trace().powi(self.k[j] as i32))
    }
}

impl fmt::Display for BasisDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.h {
            HPart::PlusTwo => write!(f, "(th+2)")?,
            HPart::MinusTwo => write!(f, "(th-2)")?,
            HPart::Pow(i) => {
                write!(f, "th^{}", i)?;
                if self.k == [0, 0, 0] {
                    return Ok(());
                }
            }
        }
        write!(f, "*tc1^{}*tc2^{}*tc3^{}", self.k[0], self.k[1], self.k[2])
    }
}

fn require_weakly_coprime(m: &SeifertData, rule: &'static str) -> Result<(), Error> {
    if !homology::weakly_coprime(m.p(0), m.p(1), m.p(2)) {
        return Err(Error::HypothesisNotMet {
            rule,
            detail: format!(
                "multiplicities ({},{},{}) are not weakly coprime",
                m.p(0),
                m.p(1),
                m.p(2)
            ),
        });
    }
    Ok(())
}

fn abelian_count_checked(m: &SeifertData) -> Result<u64, Error> {
    let y = abelian_count(m)?;
    if y > DEFAULT_ENUMERATION_BOUND {
        return Err(Error::GroupTooLarge { order: y, bound: DEFAULT_ENUMERATION_BOUND });
    }
    Ok(y as u64)
}

/// The candidate basis of the coordinate ring for weakly coprime
/// multiplicities: products `(t_h ± 2) * (c-monomials)` below the trace-set
/// sizes, two boundary elements in the `c_1` direction, and powers of `t_h`
/// matching the remaining abelian characters.
pub fn basis(m: &SeifertData) -> Result<Vec<BasisDescriptor>, Error> {
    if h1_order(m) == 0 {
        return Err(Error::EulerZero);
    }
    require_weakly_coprime(m, "basis")?;
    let y = abelian_count_checked(m)?;
    let delta = y % 2;
    let pp: Vec<u32> = (0..3).map(|i| p_plus(m.p(i)) as u32).collect();
    let pm: Vec<u32> = (0..3).map(|i| p_minus(m.p(i)) as u32).collect();

    let mut out = Vec::new();
    for_monomials(&pp, |k| out.push(BasisDescriptor { h: HPart::PlusTwo, k }));
    out.push(BasisDescriptor { h: HPart::PlusTwo, k: [pp[0], 0, 0] });
    for_monomials(&pm, |k| out.push(BasisDescriptor { h: HPart::MinusTwo, k }));
    if y % 2 == 0 {
        out.push(BasisDescriptor { h: HPart::MinusTwo, k: [pm[0], 0, 0] });
    }
    for i in 2..y + delta {
        out.push(BasisDescriptor { h: HPart::Pow(i as u32), k: [0, 0, 0] });
    }

    let expected = abelian_count(m)? + irreducible_count(m)? + exceptional_count(m)?;
    assert_eq!(out.len() as u128, expected, "basis cardinality defect for {:?}", m);
    Ok(out)
}

/// Alternative basis of pure trace monomials, available when all
/// multiplicities are odd and the abelian character count is even.
pub fn basis_alt(m: &SeifertData) -> Result<Vec<BasisDescriptor>, Error> {
    if h1_order(m) == 0 {
        return Err(Error::EulerZero);
    }
    require_weakly_coprime(m, "basis_alt")?;
    if (0..3).any(|i| m.p(i) % 2 == 0) {
        return Err(Error::HypothesisNotMet {
            rule: "basis_alt",
            detail: "all multiplicities must be odd".into(),
        });
    }
    let y = abelian_count_checked(m)?;
    if y % 2 != 0 {
        return Err(Error::HypothesisNotMet {
            rule: "basis_alt",
            detail: format!("needs an even number of abelian characters, got {}", y),
        });
    }
    let pp: Vec<u32> = (0..3).map(|i| p_plus(m.p(i)) as u32).collect();
    let mut out = Vec::new();
    for i in 0..2u32 {
        for_monomials(&pp, |k| out.push(BasisDescriptor { h: HPart::Pow(i), k }));
        out.push(BasisDescriptor { h: HPart::Pow(i), k: [pp[0], 0, 0] });
    }
    for i in 2..y {
        out.push(BasisDescriptor { h: HPart::Pow(i as u32), k: [0, 0, 0] });
    }
    assert_eq!(out.len(), basis(m)?.len(), "alternative basis cardinality defect for {:?}", m);
    Ok(out)
}

fn for_monomials(limits: &[u32], mut f: impl FnMut([u32; 3])) {
    for k1 in 0..limits[0] {
        for k2 in 0..limits[1] {
            for k3 in 0..limits[2] {
                f([k1, k2, k3]);
            }
        }
    }
}

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_RELATIVE_TOLERANCE: f64 = 1e-8;

/// The basis functions evaluated at every character.
#[derive(Clone, Debug)]
pub struct EvaluationReport {
    pub descriptors: Vec<BasisDescriptor>,
    pub records: Vec<CharacterRecord>,
    /// Rows indexed by characters, columns by basis functions.
    pub matrix: DMatrix<f64>,
    pub min_singular_value: f64,
    pub max_singular_value: f64,
    /// Smallest/largest singular value of the column-equilibrated matrix —
    /// a rank-equivalent rescaling that removes the exponential spread of
    /// the `th^i` columns, so it measures distance to singularity rather
    /// than the spread of entry magnitudes.
    pub equilibrated_min_ratio: f64,
    /// Nonsingularity certifies that the functions are linearly independent,
    /// hence really form a basis at this instance.
    pub full_rank: bool,
}

impl EvaluationReport {
    /// Indices of a pair of characters on which every basis function agrees
    /// (equal matrix rows) — an exact witness that the candidate set cannot
    /// be a basis, with no numerics involved beyond row comparison.
    pub fn indistinguishable_pair(&self) -> Option<(usize, usize)> {
        let n = self.matrix.nrows();
        for i in 0..n {
            for j in i + 1..n {
                let close = (0..n).all(|c| {
                    let (a, b) = (self.matrix[(i, c)], self.matrix[(j, c)]);
                    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
                });
                if close {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

pub fn evaluation_matrix(m: &SeifertData, bound: u128) -> Result<EvaluationReport, Error> {
    let descriptors = basis(m)?;
    let records = enumerate_characters(m, bound)?.records;
    assert_eq!(descriptors.len(), records.len(), "non-square evaluation matrix for {:?}", m);
    let n = records.len();
    let matrix =
        DMatrix::from_fn(n, n, |row, col| descriptors[col].eval(&records[row]));
    let (min_sv, max_sv) = extreme_singular_values(&matrix);

    // Dividing each column by its largest entry is an invertible diagonal
    // transformation: the rank is unchanged, but the singular-value ratio
    // stops being dominated by the 2^i growth of the power columns.
    let mut scaled = matrix.clone();
    for mut col in scaled.column_iter_mut() {
        let m = col.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if m > 0.0 {
            col /= m;
        }
    }
    let (eq_min, eq_max) = extreme_singular_values(&scaled);
    let equilibrated_min_ratio = if eq_max > 0.0 { eq_min / eq_max } else { 0.0 };

    Ok(EvaluationReport {
        descriptors,
        records,
        matrix,
        min_singular_value: min_sv,
        max_singular_value: max_sv,
        equilibrated_min_ratio,
        full_rank: equilibrated_min_ratio > RANK_RELATIVE_TOLERANCE,
    })
}

fn extreme_singular_values(m: &DMatrix<f64>) -> (f64, f64) {
    let svd = m.clone().svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let min = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    (min, max)
}
