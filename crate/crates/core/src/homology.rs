//! First homology of a small Seifert fibered space and the character counts
//! that only depend on it.
//!
//! Abelianizing the fundamental group and eliminating `c3 = (c1 c2)^{-1}`
//! leaves generators `h, c1, c2` with relation matrix rows `(q1, p1, 0)`,
//! `(q2, 0, p2)`, `(q3, -p3, -p3)`.  Everything here is exact integer linear
//! algebra on that matrix and small augmentations of it: Smith normal form
//! with a tracked change of basis (so characters of `H_1` can be evaluated on
//! the original generators), gcds of maximal minors as an independent route
//! to the same invariant factors, and closed-form counts of abelian
//! characters and of characters `rho` with `rho(h) = ±I` but no `rho(c_i)`
//! central.  Each closed formula is paired with a brute-force enumeration
//! over the dual group `Hom(H_1, C^*)` for cross-checking.

use crate::seifert::SeifertData;
use crate::Error;
use num::integer::gcd;
use serde::{Deserialize, Serialize};

/// Integer relation matrix over the ordered generators `(h, c1, c2)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PresentationMatrix {
    pub rows: Vec<[i64; 3]>,
}

impl PresentationMatrix {
    pub fn new(rows: Vec<[i64; 3]>) -> Self {
        PresentationMatrix { rows }
    }

    /// The relation matrix of `H_1` for the given Seifert data.
    pub fn of(m: &SeifertData) -> Self {
        PresentationMatrix {
            rows: vec![
                [m.q(0), m.p(0), 0],
                [m.q(1), 0, m.p(1)],
                [m.q(2), -m.p(2), -m.p(2)],
            ],
        }
    }

    /// Copy with extra relation rows appended (used to kill `h`, `h^2`,
    /// or `c_1^2` when counting quotient sizes).
    pub fn augmented(&self, extra: &[[i64; 3]]) -> Self {
        let mut rows = self.rows.clone();
        rows.extend_from_slice(extra);
        PresentationMatrix { rows }
    }
}

/// `H_1` as `Z/d1 + Z/d2 + Z/d3` (a diagonal entry 0 means a `Z` factor),
/// with the images of the group generators recorded.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AbelianGroupData {
    /// Invariant factors `d1 | d2 | d3`, non-negative.
    pub snf_diagonal: [i128; 3],
    /// Images of `h, c1, c2, c3`; coordinate `j` lives in `Z/d_j`.
    pub generator_images: [[i128; 3]; 4],
}

impl AbelianGroupData {
    /// Order of the group, or `None` when some factor is infinite.
    pub fn order(&self) -> Option<u128> {
        if self.snf_diagonal.iter().any(|&d| d == 0) {
            None
        } else {
            Some(self.snf_diagonal.iter().map(|&d| d as u128).product())
        }
    }

    /// Evaluate the character indexed by `t` (with `0 <= t_j < d_j`) on the
    /// group element with the given image, producing an element of `Z/D`
    /// where `D` is the largest invariant factor.  Requires a finite group.
    pub fn pairing(&self, t: [i128; 3], image: [i128; 3]) -> i128 {
        let d = self.snf_diagonal[2];
        debug_assert!(self.snf_diagonal.iter().all(|&dj| dj > 0));
        let mut val = 0i128;
        for j in 0..3 {
            val = (val + t[j] * image[j] * (d / self.snf_diagonal[j])).rem_euclid(d);
        }
        val
    }

    /// Visit every character of a finite group as its index vector `t`.
    pub fn for_each_character(&self, mut f: impl FnMut([i128; 3])) {
        let d = self.snf_diagonal;
        assert!(d.iter().all(|&dj| dj > 0), "dual group is infinite");
        let mut t = [0i128; 3];
        loop {
            f(t);
            let mut j = 0;
            loop {
                t[j] += 1;
                if t[j] < d[j] {
                    break;
                }
                t[j] = 0;
                j += 1;
                if j == 3 {
                    return;
                }
            }
        }
    }
}

/// Smith normal form of the relation matrix, with the column operations
/// accumulated so that an element written in generator coordinates `x` maps
/// to `x V` reduced modulo the diagonal.
pub fn smith_normal_form(p: &PresentationMatrix) -> AbelianGroupData {
    let mut a: Vec<[i128; 3]> = p.rows.iter().map(|r| [r[0] as i128, r[1] as i128, r[2] as i128]).collect();
    let mut v: [[i128; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    while a.len() < 3 {
        a.push([0, 0, 0]);
    }

    let rank = {
        let mut t = 0;
        while t < 3 && reduce_pivot(&mut a, &mut v, t) {
            t += 1;
        }
        t
    };

    // Enforce the divisibility chain among the nonzero diagonal entries.
    'fix: loop {
        for j in 0..rank.saturating_sub(1) {
            if a[j + 1][j + 1] % a[j][j] != 0 {
                for r in 0..a.len() {
                    a[r][j] += a[r][j + 1];
                }
                for r in 0..3 {
                    v[r][j] += v[r][j + 1];
                }
                reduce_pivot(&mut a, &mut v, j);
                reduce_pivot(&mut a, &mut v, j + 1);
                continue 'fix;
            }
        }
        break;
    }

    for j in 0..3 {
        if a[j][j] < 0 {
            for row in a.iter_mut() {
                row[j] = -row[j];
            }
            for row in v.iter_mut() {
                row[j] = -row[j];
            }
        }
    }

    let diag = [a[0][0], a[1][1], a[2][2]];
    let reduce = |x: [i128; 3]| -> [i128; 3] {
        let mut y = x;
        for j in 0..3 {
            if diag[j] != 0 {
                y[j] = y[j].rem_euclid(diag[j]);
            }
        }
        y
    };
    let h = reduce(v[0]);
    let c1 = reduce(v[1]);
    let c2 = reduce(v[2]);
    let c3 = reduce([-v[1][0] - v[2][0], -v[1][1] - v[2][1], -v[1][2] - v[2][2]]);
    AbelianGroupData { snf_diagonal: diag, generator_images: [h, c1, c2, c3] }
}

/// Clear row and column `t` down to a single pivot at `(t, t)`, returning
/// false when the trailing submatrix is zero.
fn reduce_pivot(a: &mut [[i128; 3]], v: &mut [[i128; 3]; 3], t: usize) -> bool {
    let n = a.len();
    let pivot = (t..n)
        .flat_map(|r| (t..3).map(move |c| (r, c)))
        .filter(|&(r, c)| a[r][c] != 0)
        .min_by_key(|&(r, c)| a[r][c].unsigned_abs());
    let Some((pr, pc)) = pivot else { return false };
    a.swap(t, pr);
    swap_columns(a, v, t, pc);

    loop {
        let mut clean = true;
        for r in 0..n {
            if r != t && a[r][t] != 0 {
                let q = a[r][t].div_euclid(a[t][t]);
                for c in 0..3 {
                    a[r][c] -= q * a[t][c];
                }
                if a[r][t] != 0 {
                    a.swap(r, t);
                    clean = false;
                }
            }
        }
        for c in 0..3 {
            if c != t && a[t][c] != 0 {
                let q = a[t][c].div_euclid(a[t][t]);
                for r in 0..n {
                    a[r][c] -= q * a[r][t];
                }
                for r in 0..3 {
                    v[r][c] -= q * v[r][t];
                }
                if a[t][c] != 0 {
                    swap_columns(a, v, t, c);
                    clean = false;
                }
            }
        }
        if clean {
            return true;
        }
    }
}

fn swap_columns(a: &mut [[i128; 3]], v: &mut [[i128; 3]; 3], i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut() {
        row.swap(i, j);
    }
    for row in v.iter_mut() {
        row.swap(i, j);
    }
}

/// Gcd of all `3 x 3` minors — the order of the quotient group when finite,
/// computed without any Smith reduction.
pub fn gcd_of_maximal_minors(p: &PresentationMatrix) -> u128 {
    let n = p.rows.len();
    let mut g: i128 = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                g = gcd(g, det3(&p.rows[i], &p.rows[j], &p.rows[k]));
            }
        }
    }
    g.unsigned_abs()
}

fn det3(a: &[i64; 3], b: &[i64; 3], c: &[i64; 3]) -> i128 {
    let (a, b, c) = (
        [a[0] as i128, a[1] as i128, a[2] as i128],
        [b[0] as i128, b[1] as i128, b[2] as i128],
        [c[0] as i128, c[1] as i128, c[2] as i128],
    );
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// `|H_1|`, via `|p1 p2 q3 + p1 q2 p3 + q1 p2 p3| = p1 p2 p3 |e|`;
/// returns 0 when the Euler number vanishes and `H_1` is infinite.
pub fn h1_order(m: &SeifertData) -> u128 {
    let p: Vec<i128> = (0..3).map(|i| m.p(i) as i128).collect();
    let q: Vec<i128> = (0..3).map(|i| m.q(i) as i128).collect();
    (p[0] * p[1] * q[2] + p[0] * q[1] * p[2] + q[0] * p[1] * p[2]).unsigned_abs()
}

/// `|H_1 tensor Z/2|`: 4 when every `p_i` is even, else 2 when `|H_1|` is
/// even, else 1.
pub fn h1_mod2_order(m: &SeifertData) -> Result<u128, Error> {
    let order = h1_order(m);
    if order == 0 {
        return Err(Error::EulerZero);
    }
    if (0..3).all(|i| m.p(i) % 2 == 0) {
        Ok(4)
    } else if order % 2 == 0 {
        Ok(2)
    } else {
        Ok(1)
    }
}

/// Independent mod-2 count: `2^(3 - rank)` of the relation matrix over `F_2`.
pub fn h1_mod2_order_oracle(m: &SeifertData) -> u128 {
    let mut rows: Vec<[u8; 3]> =
        PresentationMatrix::of(m).rows.iter().map(|r| [(r[0] & 1) as u8, (r[1] & 1) as u8, (r[2] & 1) as u8]).collect();
    let mut rank = 0;
    for c in 0..3 {
        if let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) {
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r][c] == 1 {
                    for k in 0..3 {
                        rows[r][k] ^= rows[rank][k];
                    }
                }
            }
            rank += 1;
        }
    }
    1u128 << (3 - rank)
}

/// Number of abelian SL(2,C) characters: `(|H_1| + |H_1 tensor Z/2|) / 2`.
pub fn abelian_count(m: &SeifertData) -> Result<u128, Error> {
    Ok((h1_order(m) + h1_mod2_order(m)?) / 2)
}

/// Default cap on dual-group enumeration, chosen to keep exhaustive test
/// sweeps fast.
pub const DEFAULT_ENUMERATION_BOUND: u128 = 1_000_000;

/// Count abelian characters by enumerating `Hom(H_1, C^*)` and counting
/// orbits of `t <-> -t` directly.
pub fn abelian_count_oracle(m: &SeifertData, bound: u128) -> Result<u128, Error> {
    let data = enumerable_dual(m, bound)?;
    let mut orbits = 0u128;
    data.for_each_character(|t| {
        let neg = [0, 1, 2].map(|j| (-t[j]).rem_euclid(data.snf_diagonal[j]));
        if t <= neg {
            orbits += 1;
        }
    });
    Ok(orbits)
}

/// The gcds `m, m1, m2, m3` feeding the closed count of characters with
/// `rho(h)` central but no `rho(c_i)` central.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExceptionalGcds {
    pub m: u128,
    pub m_i: [u128; 3],
}

pub fn exceptional_gcds(m: &SeifertData) -> ExceptionalGcds {
    let p: Vec<i128> = (0..3).map(|i| m.p(i) as i128).collect();
    let q: Vec<i128> = (0..3).map(|i| m.q(i) as i128).collect();
    let g = gcd(
        gcd(h1_order(m) as i128, 2 * p[0] * p[1]),
        gcd(2 * p[0] * p[2], 2 * p[1] * p[2]),
    );
    let gi = |i: usize| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let mut x = gcd(g, 4 * p[j]);
        x = gcd(x, 4 * p[k]);
        x = gcd(x, 2 * q[i] * p[j]);
        x = gcd(x, 2 * q[i] * p[k]);
        x = gcd(x, 2 * (q[j] * p[k] + p[j] * q[k]));
        x as u128
    };
    ExceptionalGcds { m: g as u128, m_i: [gi(0), gi(1), gi(2)] }
}

/// Closed-form count of characters of representations with `rho(h) = ±I`
/// and every `rho(c_i)` non-central.
pub fn exceptional_count(m: &SeifertData) -> Result<u128, Error> {
    if h1_order(m) == 0 {
        return Err(Error::EulerZero);
    }
    let g = exceptional_gcds(m);
    let signed = (g.m as i128 - g.m_i.iter().map(|&x| x as i128).sum::<i128>()) / 2
        + h1_mod2_order(m)? as i128;
    debug_assert!(signed >= 0, "negative exceptional count for {:?}", m);
    Ok(signed as u128)
}

/// Count the same characters by brute force over the dual group: half the
/// number of `phi` with `2 phi(h) = 0` and every `phi(c_i)` of order > 2.
pub fn exceptional_count_oracle(m: &SeifertData, bound: u128) -> Result<u128, Error> {
    let data = enumerable_dual(m, bound)?;
    let d = data.snf_diagonal[2];
    let images = data.generator_images;
    let mut qualifying = 0u128;
    data.for_each_character(|t| {
        let val_h = data.pairing(t, images[0]);
        if (2 * val_h) % d != 0 {
            return;
        }
        for i in 1..4 {
            let val = data.pairing(t, images[i]);
            if val == 0 || 2 * val == d {
                return;
            }
        }
        qualifying += 1;
    });
    debug_assert!(qualifying % 2 == 0);
    Ok(qualifying / 2)
}

fn enumerable_dual(m: &SeifertData, bound: u128) -> Result<AbelianGroupData, Error> {
    let order = h1_order(m);
    if order == 0 {
        return Err(Error::EulerZero);
    }
    if order > bound {
        return Err(Error::GroupTooLarge { order, bound });
    }
    let data = smith_normal_form(&PresentationMatrix::of(m));
    debug_assert_eq!(data.order(), Some(order));
    Ok(data)
}

/// Whether one of the three multiplicities is coprime to the other two.
pub fn weakly_coprime(p1: i64, p2: i64, p3: i64) -> bool {
    let p = [p1, p2, p3];
    (0..3).any(|i| gcd(p[i], p[(i + 1) % 3]) == 1 && gcd(p[i], p[(i + 2) % 3]) == 1)
}

/// Look for an index `k` and pair `(d, s)` with `d = gcd(p_i, p_j) > 2`,
/// `s = gcd(p_i p_j / d, p_k) > 2`, and not both equal to 4 — a certificate
/// that the character scheme has a non-reduced point.
pub fn nonreduced_witness(p1: i64, p2: i64, p3: i64) -> Option<(usize, i64, i64)> {
    let p = [p1, p2, p3];
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let d = gcd(p[i], p[j]);
        if d <= 2 {
            continue;
        }
        let s = gcd(p[i] * p[j] / d, p[k]);
        if s > 2 && !(d == 4 && s == 4) {
            return Some((k, d, s));
        }
    }
    None
}

/// Whether the class of the regular fiber generates all of `H_1`,
/// decided by the quotient `H_1 / <h>` being trivial.
pub fn h_generates_h1(m: &SeifertData) -> bool {
    gcd_of_maximal_minors(&PresentationMatrix::of(m).augmented(&[[1, 0, 0]])) == 1
}

/// All character counts determined by `H_1` alone.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CharacterCounts {
    pub h1_order: u128,
    pub h1_mod2_order: u128,
    /// `y`: abelian characters.
    pub abelian_count: u128,
    /// `x`: characters with `rho(h) = ±I` and no `rho(c_i)` central.
    pub exceptional_count: u128,
    pub gcds: ExceptionalGcds,
    /// Parity of `abelian_count`.
    pub delta: u8,
}

pub fn character_counts(m: &SeifertData) -> Result<CharacterCounts, Error> {
    let y = abelian_count(m)?;
    Ok(CharacterCounts {
        h1_order: h1_order(m),
        h1_mod2_order: h1_mod2_order(m)?,
        abelian_count: y,
        exceptional_count: exceptional_count(m)?,
        gcds: exceptional_gcds(m),
        delta: (y % 2) as u8,
    })
}
