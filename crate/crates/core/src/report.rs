//! Assembled invariant reports, the known-values table, and the batch
//! census harness with its formula-versus-oracle cross-checks.
//!
//! A report is a plain serde structure: every number in it is
//! reproducible from the input slopes through the corresponding library
//! operation, and the JSON round-trips to equal values.  Census output
//! is deterministic (stable instance order, no timings) so re-runs are
//! byte-identical and diffable.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::characters::{
    basis, evaluation_matrix, irreducible_count, is_reduced, skein_dimension, Reducedness,
};
use crate::homology::{
    abelian_count_oracle, character_counts, exceptional_count_oracle, h1_mod2_order_oracle,
    h1_order, h_generates_h1, smith_normal_form, weakly_coprime, CharacterCounts,
    PresentationMatrix,
};
use crate::reduction::{generating_set_count, head_threshold};
use crate::seifert::{
    classify_character_variety, BaseSurface, Finiteness, GeneralSeifertData, SeifertData, Slope,
};
use crate::Error;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest dual group the oracle cross-checks will enumerate.
const CENSUS_ORACLE_BOUND: u128 = 1 << 24;
/// Guard on the census size (the sweep is cubic in the slope count).
pub const CENSUS_PMAX_GUARD: i64 = 12;

// ---------------------------------------------------------------------
// Slope parsing and formatting (CLI syntax `q/p`, e.g. `1/2,-1/3,-1/5`).
// ---------------------------------------------------------------------

/// Parse one slope `q/p` (or a bare integer `q`, meaning `q/1`).
pub fn parse_slope(text: &str) -> Result<(i64, i64), Error> {
    let bad = |_| Error::InvalidSlope { p: 0, q: 0 };
    match text.split_once('/') {
        Some((q, p)) => {
            let q: i64 = q.trim().parse().map_err(bad)?;
            let p: i64 = p.trim().parse().map_err(bad)?;
            Ok((p, q))
        }
        None => {
            let q: i64 = text.trim().parse().map_err(bad)?;
            Ok((1, q))
        }
    }
}

/// Parse a comma-separated slope list into `(p, q)` pairs.
pub fn parse_slope_list(text: &str) -> Result<Vec<(i64, i64)>, Error> {
    text.split(',').map(parse_slope).collect()
}

pub fn slope_string(s: &Slope) -> String {
    format!("{}/{}", s.q, s.p)
}

pub fn slope_strings(slopes: &[Slope]) -> Vec<String> {
    slopes.iter().map(slope_string).collect()
}

// ---------------------------------------------------------------------
// Report blocks.
// ---------------------------------------------------------------------

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct HomologyBlock {
    pub h1_order: u128,
    #[serde(rename = "h1_mod2")]
    pub h1_mod2_order: u128,
    /// `y`: number of abelian characters.
    pub abelian_count: u128,
    /// Exceptional abelian characters (the non-reduced points).
    #[serde(rename = "x_M")]
    pub exceptional_count: u128,
    /// The gcd `m` and the triple `m_i` feeding the closed count.
    pub m: u128,
    pub m_i: [u128; 3],
    pub delta: u8,
    pub weakly_coprime: bool,
    #[serde(rename = "h_generates")]
    pub h_generates_h1: bool,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CharactersBlock {
    /// Irreducible characters.
    #[serde(rename = "x_irr")]
    pub irreducible_count: u128,
    /// `|X(M)|` = abelian + irreducible.
    #[serde(rename = "x_total")]
    pub total: u128,
    pub reduced: bool,
    #[serde(rename = "skein_dim")]
    pub skein_dimension: u128,
    /// Whether the dimension is exact or only a lower bound.
    #[serde(rename = "skein_dim_exact")]
    pub skein_dimension_exact: bool,
    /// Basis function descriptors; omitted in census lines for size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    /// Smallest singular value of the evaluation matrix, when the
    /// independence check was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_singular_value: Option<f64>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ReductionBlock {
    pub generating_set_count: u128,
    /// Strict window bound on `c₁`: `2|q₁| + 2p₁` of the normalized data.
    pub c1_bound_exclusive: i64,
    /// Inclusive window bounds on `c₂`, `c₃`.
    pub c2_bound_inclusive: i64,
    pub c3_bound_inclusive: i64,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct KnownValue {
    pub label: String,
    pub dimension: u32,
    pub citation: String,
}

/// Owned mirror of [`crate::seifert::Classification`] so reports can be
/// deserialized (the original carries `&'static str` case labels).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ClassificationBlock {
    pub verdict: Finiteness,
    pub case: String,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct InvariantReport {
    pub tool_version: String,
    /// Slopes as given, `q/p`.
    pub input_slopes: Vec<String>,
    /// Same manifold in normalized coordinates.
    pub normalized_slopes: Vec<String>,
    /// Euler number of the input data, canonical `n/d`.
    pub euler: String,
    pub classification: ClassificationBlock,
    pub homology: HomologyBlock,
    pub characters: CharactersBlock,
    pub reduction: ReductionBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_value: Option<KnownValue>,
    /// Wall-clock milliseconds per stage; omitted in census lines so
    /// output is deterministic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

/// What optional work [`build_report`] performs.
#[derive(Clone, Copy, Default)]
pub struct ReportOptions {
    /// Embed the basis descriptor strings.
    pub basis: bool,
    /// Record per-stage wall-clock timings (excluded from census output).
    pub timings: bool,
    /// Run the evaluation-matrix independence check with this dual-group
    /// enumeration bound and record the smallest singular value.
    pub independence_bound: Option<u128>,
}

/// Build the full report for one manifold.
pub fn build_report(m: &SeifertData, options: ReportOptions) -> Result<InvariantReport, Error> {
    let mut timings: BTreeMap<String, f64> = BTreeMap::new();
    let clock = Instant::now();
    let normalized = m.normalize()?;
    let counts = character_counts(m)?;
    let h_generates = h_generates_h1(m);
    let wc = weakly_coprime(m.p(0), m.p(1), m.p(2));
    timings.insert("homology".into(), clock.elapsed().as_secs_f64() * 1e3);

    let clock = Instant::now();
    let x_irr = irreducible_count(m)?;
    let reduced = is_reduced(m)? == Reducedness::Reduced;
    let dim = skein_dimension(m)?;
    let basis_strings = if options.basis {
        Some(basis(m)?.iter().map(|b| b.to_string()).collect())
    } else {
        None
    };
    let min_singular_value = match options.independence_bound {
        Some(bound) => Some(evaluation_matrix(m, bound)?.min_singular_value),
        None => None,
    };
    timings.insert("characters".into(), clock.elapsed().as_secs_f64() * 1e3);

    let clock = Instant::now();
    let reduction = ReductionBlock {
        generating_set_count: generating_set_count(&normalized)?,
        c1_bound_exclusive: head_threshold(&normalized),
        c2_bound_inclusive: normalized.p(1),
        c3_bound_inclusive: normalized.p(2),
    };
    timings.insert("reduction".into(), clock.elapsed().as_secs_f64() * 1e3);

    let general = GeneralSeifertData {
        base: BaseSurface::S2,
        slopes: m.slopes.to_vec(),
    };
    let classification = classify_character_variety(&general);

    Ok(InvariantReport {
        tool_version: TOOL_VERSION.to_string(),
        input_slopes: slope_strings(&m.slopes),
        normalized_slopes: slope_strings(&normalized.slopes),
        euler: m.euler_number().to_string(),
        classification: ClassificationBlock {
            verdict: classification.verdict,
            case: classification.case.to_string(),
        },
        homology: HomologyBlock {
            h1_order: counts.h1_order,
            h1_mod2_order: counts.h1_mod2_order,
            abelian_count: counts.abelian_count,
            exceptional_count: counts.exceptional_count,
            m: counts.gcds.m,
            m_i: counts.gcds.m_i,
            delta: counts.delta,
            weakly_coprime: wc,
            h_generates_h1: h_generates,
        },
        characters: CharactersBlock {
            irreducible_count: x_irr,
            total: counts.abelian_count + x_irr,
            reduced,
            skein_dimension: dim.value,
            skein_dimension_exact: dim.exact,
            basis: basis_strings,
            min_singular_value,
        },
        reduction,
        known_value: detect_known(&normalized),
        timings_ms: options.timings.then_some(timings),
    })
}

// ---------------------------------------------------------------------
// Known values.
// ---------------------------------------------------------------------

const KNOWN_TABLE: [(&str, u32, &str); 3] = [
    (
        "S2xS1",
        1,
        "J. Hoste, J. H. Przytycki, \"The Kauffman bracket skein module of S^1 x S^2\", \
         Math. Z. 220 (1995), 65-73: free part of rank one plus torsion, so dimension 1 \
         over Q(A).",
    ),
    (
        "RP3",
        2,
        "J. Hoste, J. H. Przytycki, \"The (2,infinity)-skein module of lens spaces; a \
         generalization of the Jones polynomial\", J. Knot Theory Ramifications 2 (1993), \
         321-333: S(L(p,q)) is free of rank floor(p/2)+1; RP^3 = L(2,1) gives 2.",
    ),
    (
        "RP3#RP3",
        4,
        "M. Mroczkowski, \"Kauffman bracket skein module of the connected sum of two \
         projective spaces\", J. Knot Theory Ramifications 20 (2011), 651-675: the module \
         is free of rank 4.",
    ),
];

/// Look a manifold label up in the static table of known module dimensions.
pub fn lookup_known(label: &str) -> Result<KnownValue, Error> {
    KNOWN_TABLE
        .iter()
        .find(|(l, _, _)| l.eq_ignore_ascii_case(label))
        .map(|&(l, d, c)| KnownValue {
            label: l.to_string(),
            dimension: d,
            citation: c.to_string(),
        })
        .ok_or_else(|| Error::UnknownManifold(label.to_string()))
}

/// List of labels the table knows.
pub fn known_labels() -> Vec<&'static str> {
    KNOWN_TABLE.iter().map(|&(l, _, _)| l).collect()
}

/// Recognize normalized data naming a manifold from the table.  Only the
/// Euler-number-2 circle bundle (real projective space) is reachable
/// here: the other table entries have zero Euler number and are rejected
/// by normalization before a report is built.
fn detect_known(normalized: &SeifertData) -> Option<KnownValue> {
    let raw: Vec<(i64, i64)> = normalized.slopes.iter().map(|s| (s.p, s.q)).collect();
    if raw == [(1, 2), (1, 0), (1, 0)] {
        return lookup_known("RP3").ok();
    }
    None
}

// ---------------------------------------------------------------------
// Census.
// ---------------------------------------------------------------------

/// Which `q` ranges the census sweeps.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QPolicy {
    /// All coprime `|q| ≤ p` (plus `q = 0` for `p = 1`), `e ≠ 0`.
    Full,
    /// Only instances already in normalized coordinates.
    Normalized,
}

impl std::str::FromStr for QPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(QPolicy::Full),
            "normalized" => Ok(QPolicy::Normalized),
            other => Err(format!("unknown q policy `{other}` (expected full|normalized)")),
        }
    }
}

/// All valid slope values for one torus: coprime pairs with `|q| ≤ p`.
fn slope_values(pmax: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for p in 1..=pmax {
        for q in -p..=p {
            if num::integer::gcd(p, q.abs()) == 1 || (p == 1 && q == 0) {
                out.push((p, q));
            }
        }
    }
    out
}

/// Deterministically ordered census instances.
pub fn census_instances(pmax: i64, policy: QPolicy) -> Result<Vec<SeifertData>, Error> {
    if !(1..=CENSUS_PMAX_GUARD).contains(&pmax) {
        return Err(Error::InconsistentData(format!(
            "census pmax must lie in 1..={CENSUS_PMAX_GUARD}, got {pmax}"
        )));
    }
    let values = slope_values(pmax);
    let mut out = Vec::new();
    for &s1 in &values {
        for &s2 in &values {
            for &s3 in &values {
                let Ok(m) = SeifertData::new([s1, s2, s3]) else {
                    continue;
                };
                if h1_order(&m) == 0 {
                    continue; // e = 0 excluded
                }
                if policy == QPolicy::Normalized && !m.is_normalized() {
                    continue;
                }
                out.push(m);
            }
        }
    }
    Ok(out)
}

/// Formula-versus-oracle discrepancies for one instance (expected: none).
pub fn cross_check(m: &SeifertData) -> Result<Vec<String>, Error> {
    let mut bad = Vec::new();
    let counts: CharacterCounts = character_counts(m)?;

    let snf = smith_normal_form(&PresentationMatrix::of(m));
    let snf_order = snf.order().unwrap_or(0);
    if counts.h1_order != snf_order {
        bad.push(format!(
            "{m:?}: h1_order formula {} != SNF product {snf_order}",
            counts.h1_order
        ));
    }
    let ab = abelian_count_oracle(m, CENSUS_ORACLE_BOUND)?;
    if counts.abelian_count != ab {
        bad.push(format!(
            "{m:?}: abelian_count formula {} != enumeration {ab}",
            counts.abelian_count
        ));
    }
    let ex = exceptional_count_oracle(m, CENSUS_ORACLE_BOUND)?;
    if counts.exceptional_count != ex {
        bad.push(format!(
            "{m:?}: exceptional_count formula {} != enumeration {ex}",
            counts.exceptional_count
        ));
    }
    let m2 = h1_mod2_order_oracle(m);
    if counts.h1_mod2_order != m2 {
        bad.push(format!(
            "{m:?}: h1_mod2 formula {} != mod-2 rank oracle {m2}",
            counts.h1_mod2_order
        ));
    }
    if weakly_coprime(m.p(0), m.p(1), m.p(2)) && counts.exceptional_count != 0 {
        bad.push(format!(
            "{m:?}: weakly coprime but x_M = {} != 0",
            counts.exceptional_count
        ));
    }
    Ok(bad)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CensusSummary {
    pub pmax: i64,
    pub q_policy: QPolicy,
    pub instances: usize,
    /// Formula-vs-oracle mismatches (expected empty).
    pub discrepancies: Vec<String>,
}

/// Stream one report per instance as a JSON line and run every
/// cross-check.  Instances are processed in parallel chunk by chunk but
/// written in the fixed instance order with no timings, so the output is
/// byte-deterministic regardless of thread count.
pub fn run_census(
    pmax: i64,
    policy: QPolicy,
    out: &mut dyn Write,
) -> Result<CensusSummary, Error> {
    use rayon::prelude::*;
    const CHUNK: usize = 1024;

    let instances = census_instances(pmax, policy)?;
    let mut discrepancies = Vec::new();
    for chunk in instances.chunks(CHUNK) {
        let lines: Vec<(String, Vec<String>)> = chunk
            .par_iter()
            .map(|m| -> Result<(String, Vec<String>), Error> {
                let bad = cross_check(m)?;
                let report = build_report(m, ReportOptions::default())?;
                let line = serde_json::to_string(&report)
                    .map_err(|e| Error::InconsistentData(format!("census serialization: {e}")))?;
                Ok((line, bad))
            })
            .collect::<Result<_, _>>()?;
        for (line, bad) in lines {
            discrepancies.extend(bad);
            out.write_all(line.as_bytes())
                .and_then(|_| out.write_all(b"\n"))
                .map_err(|e| Error::InconsistentData(format!("census I/O: {e}")))?;
        }
    }
    Ok(CensusSummary {
        pmax,
        q_policy: policy,
        instances: instances.len(),
        discrepancies,
    })
}
