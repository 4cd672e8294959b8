//! `seifert-skein`: invariants of Seifert fibered spaces over `S^2` with at
//! most three exceptional fibers, from the command line.
//!
//! Exit codes: 0 on success, 1 on usage errors (unparseable arguments,
//! unknown labels), 2 when a mathematical precondition fails (zero Euler
//! number, enumeration bound exceeded, unrealizable representation data).

use std::collections::BTreeSet;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use skein_core::characters::{enumerate_characters, evaluation_matrix, CharacterKind};
use skein_core::homology::DEFAULT_ENUMERATION_BOUND;
use skein_core::reduction::{generating_set, reduce, GeneratorIndex, R5CoefficientTable};
use skein_core::report::{
    build_report, known_labels, lookup_known, parse_slope_list, run_census, QPolicy,
    ReportOptions,
};
use skein_core::reps::{
    build_rp2_rep, build_su2_s2base, cocycle_dims, construct_sl2_rep, rp2_trace_interval,
    su2_residual, Quaternion, RepSpec, REP_RESIDUAL_TOLERANCE,
};
use skein_core::seifert::{BaseSurface, GeneralSeifertData};
use skein_core::{Error, SeifertData, SkeinElement};

#[derive(Parser)]
#[command(
    name = "seifert-skein",
    version,
    about = "Kauffman bracket skein module and SL(2,C) character variety invariants \
             of Seifert fibered spaces over the 2-sphere with three exceptional fibers"
)]
struct Cli {
    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Seed for randomized sampling (su2 verify)
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Override the numerical tolerance of the pass/fail checks
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct SlopesArg {
    /// Filling slopes `q1/p1,q2/p2,q3/p3`, e.g. `1/2,-1/3,-1/5`
    #[arg(long)]
    slopes: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full invariant report for one manifold
    Invariants {
        #[command(flatten)]
        slopes: SlopesArg,
        /// Embed the basis descriptor strings in the report
        #[arg(long)]
        basis: bool,
    },
    /// Enumerate every SL(2,C) character by exact trace data
    Characters {
        #[command(flatten)]
        slopes: SlopesArg,
        /// Largest permitted order of H_1 for the enumeration
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BOUND)]
        bound: u128,
    },
    /// Print the candidate basis of trace functions
    Basis {
        #[command(flatten)]
        slopes: SlopesArg,
        /// Evaluate all functions on all characters and certify linear
        /// independence numerically
        #[arg(long)]
        check_independence: bool,
    },
    /// Rewrite one spanning-set element to the terminal generating set
    Reduce {
        #[command(flatten)]
        slopes: SlopesArg,
        /// Index `k1,l1,k2,l2,k3,l3` of the starting generator
        #[arg(long, allow_hyphen_values = true)]
        index: String,
        /// Include the full applied-rule trace
        #[arg(long)]
        trace: bool,
    },
    /// List the terminal generating set of the rewriting system
    GeneratingSet {
        #[command(flatten)]
        slopes: SlopesArg,
        /// Print only the cardinality
        #[arg(long)]
        count_only: bool,
    },
    /// Twisted cohomology dimensions at a chosen representation
    Cohomology {
        #[command(flatten)]
        slopes: SlopesArg,
        /// One of: central, central:-, diagonal:IDX, exceptional:IDX,
        /// irreducible:N
        #[arg(long)]
        rep: String,
    },
    /// SU(2) representation constructions with residual verification
    Su2 {
        #[command(subcommand)]
        action: Su2Cmd,
    },
    /// Sweep all small instances and cross-check formulas against oracles
    Census {
        /// Largest multiplicity p of an exceptional fiber
        #[arg(long, default_value_t = 5)]
        pmax: i64,
        /// Which q values to sweep
        #[arg(long, value_enum, default_value_t = QPolicyArg::Full)]
        qpolicy: QPolicyArg,
        /// Write the JSON-lines stream here instead of stdout
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Known skein-module dimensions of classical manifolds
    Known {
        /// Manifold label (S2xS1, RP3, RP3#RP3)
        label: String,
    },
}

#[derive(Subcommand)]
enum Su2Cmd {
    /// Build sample representations and verify all relations numerically
    Verify {
        /// Base surface of the fibration
        #[arg(long, value_enum, default_value_t = BaseArg::S2)]
        base: BaseArg,
        /// Filling slopes `q1/p1,...` (any number of fibers)
        #[arg(long)]
        slopes: String,
        /// Number of random samples
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaseArg {
    S2,
    Rp2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QPolicyArg {
    Full,
    Normalized,
}

/// Errors split by exit code: usage problems (1) versus failed
/// mathematical preconditions (2).
enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSlope { .. } | Error::UnknownManifold(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Domain(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            _ => {
                let _ = e.print();
                return ExitCode::from(1);
            }
        },
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn three_fiber_data(text: &str) -> Result<SeifertData, CliError> {
    let slopes = parse_slope_list(text)?;
    let [s1, s2, s3] = slopes[..] else {
        return Err(CliError::Usage(format!(
            "expected exactly three slopes, got {}",
            slopes.len()
        )));
    };
    Ok(SeifertData::new([s1, s2, s3])?)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable report"));
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Invariants { slopes, basis } => cmd_invariants(&slopes.slopes, basis, cli.json),
        Cmd::Characters { slopes, bound } => cmd_characters(&slopes.slopes, bound, cli.json),
        Cmd::Basis { slopes, check_independence } => {
            cmd_basis(&slopes.slopes, check_independence, cli.tolerance, cli.json)
        }
        Cmd::Reduce { slopes, index, trace } => {
            cmd_reduce(&slopes.slopes, &index, trace, cli.json)
        }
        Cmd::GeneratingSet { slopes, count_only } => {
            cmd_generating_set(&slopes.slopes, count_only, cli.json)
        }
        Cmd::Cohomology { slopes, rep } => cmd_cohomology(&slopes.slopes, &rep, cli.json),
        Cmd::Su2 { action } => match action {
            Su2Cmd::Verify { base, slopes, samples } => cmd_su2_verify(
                base,
                &slopes,
                samples,
                cli.seed,
                cli.tolerance.unwrap_or(REP_RESIDUAL_TOLERANCE),
                cli.json,
            ),
        },
        Cmd::Census { pmax, qpolicy, out } => cmd_census(pmax, qpolicy, out, cli.json),
        Cmd::Known { label } => cmd_known(&label, cli.json),
    }
}

// ---------------------------------------------------------------------
// invariants
// ---------------------------------------------------------------------

fn cmd_invariants(slopes: &str, basis: bool, json: bool) -> Result<(), CliError> {
    let m = three_fiber_data(slopes)?;
    let report = build_report(
        &m,
        ReportOptions { basis, timings: true, ..Default::default() },
    )?;
    if json {
        print_json(&report);
        return Ok(());
    }
    println!("slopes              {}", report.input_slopes.join(", "));
    println!("normalized          {}", report.normalized_slopes.join(", "));
    println!("euler number        {}", report.euler);
    println!(
        "character variety   {} ({})",
        match report.classification.verdict {
            skein_core::Finiteness::Finite => "finite",
            skein_core::Finiteness::Infinite => "infinite",
        },
        report.classification.case
    );
    println!("|H_1|               {}", report.homology.h1_order);
    println!("abelian characters  {}", report.homology.abelian_count);
    println!("exceptional (x_M)   {}", report.homology.exceptional_count);
    println!("irreducible (x_irr) {}", report.characters.irreducible_count);
    println!("|X(M)|              {}", report.characters.total);
    println!("reduced             {}", report.characters.reduced);
    println!(
        "skein dimension     {}{}",
        report.characters.skein_dimension,
        if report.characters.skein_dimension_exact { "" } else { " (lower bound)" }
    );
    println!("generating set      {}", report.reduction.generating_set_count);
    if let Some(ref known) = report.known_value {
        println!("known value         {} = {}", known.label, known.dimension);
    }
    if let Some(b) = &report.characters.basis {
        println!("basis               {}", b.join(", "));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// characters
// ---------------------------------------------------------------------

fn cmd_characters(slopes: &str, bound: u128, json: bool) -> Result<(), CliError> {
    let m = three_fiber_data(slopes)?;
    let table = enumerate_characters(&m, bound)?;
    if json {
        print_json(&table);
        return Ok(());
    }
    println!(
        "{} characters: {} central, {} abelian, {} exceptional, {} irreducible",
        table.len(),
        table.count(CharacterKind::Central),
        table.count(CharacterKind::Abelian),
        table.count(CharacterKind::ExceptionalAbelian),
        table.count(CharacterKind::Irreducible),
    );
    for r in &table.records {
        println!(
            "{:22} tr h = {:<10} tr c = {:.6}, {:.6}, {:.6}",
            format!("{:?}", r.kind),
            format!("{:.6}", r.h_trace.trace()),
            r.c_traces[0].trace(),
            r.c_traces[1].trace(),
            r.c_traces[2].trace(),
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------
// basis
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct BasisOutput {
    slopes: Vec<String>,
    count: usize,
    descriptors: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_singular_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_singular_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    equilibrated_min_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    independent: Option<bool>,
}

fn cmd_basis(
    slopes: &str,
    check: bool,
    tolerance: Option<f64>,
    json: bool,
) -> Result<(), CliError> {
    let m = three_fiber_data(slopes)?;
    let descriptors = skein_core::characters::basis(&m)?;
    let mut out = BasisOutput {
        slopes: parse_slope_list(slopes)?
            .iter()
            .map(|&(p, q)| format!("{q}/{p}"))
            .collect(),
        count: descriptors.len(),
        descriptors: descriptors.iter().map(|d| d.to_string()).collect(),
        min_singular_value: None,
        max_singular_value: None,
        equilibrated_min_ratio: None,
        independent: None,
    };
    if check {
        let eval = evaluation_matrix(&m, DEFAULT_ENUMERATION_BOUND)?;
        out.min_singular_value = Some(eval.min_singular_value);
        out.max_singular_value = Some(eval.max_singular_value);
        out.equilibrated_min_ratio = Some(eval.equilibrated_min_ratio);
        out.independent = Some(match tolerance {
            Some(tol) => eval.min_singular_value > tol * eval.max_singular_value,
            None => eval.full_rank,
        });
    }
    if json {
        print_json(&out);
        return Ok(());
    }
    println!("{} basis functions", out.count);
    for d in &out.descriptors {
        println!("  {d}");
    }
    if let Some(ok) = out.independent {
        println!(
            "independence        {} (min sv {:.3e}, max sv {:.3e}, equilibrated ratio {:.3e})",
            if ok { "certified" } else { "NOT certified" },
            out.min_singular_value.unwrap(),
            out.max_singular_value.unwrap(),
            out.equilibrated_min_ratio.unwrap(),
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------
// reduce / generating-set
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct ReduceOutput {
    slopes: Vec<String>,
    index: GeneratorIndex,
    canonical_index: GeneratorIndex,
    terminal: SkeinElement,
    terminal_terms: usize,
    steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    framing_note: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<skein_core::reduction::TraceStep>>,
}

fn parse_index(text: &str) -> Result<GeneratorIndex, CliError> {
    let parts: Vec<i64> = text
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad index `{text}`: {e}")))?;
    let entries: [i64; 6] = parts.try_into().map_err(|_| {
        CliError::Usage("index must have six entries k1,l1,k2,l2,k3,l3".to_string())
    })?;
    Ok(GeneratorIndex(entries))
}

fn cmd_reduce(slopes: &str, index: &str, trace: bool, json: bool) -> Result<(), CliError> {
    let m = three_fiber_data(slopes)?.normalize()?;
    let v = parse_index(index)?;
    let x = SkeinElement::generator(v, &m);
    let table = R5CoefficientTable::default();
    let (terminal, applied) = reduce(&x, &m, &table)?;
    let out = ReduceOutput {
        slopes: parse_slope_list(slopes)?
            .iter()
            .map(|&(p, q)| format!("{q}/{p}"))
            .collect(),
        index: v,
        canonical_index: v.canonical(&m),
        terminal_terms: terminal.len(),
        steps: applied.steps.len(),
        framing_note: applied.framing_note(),
        trace: trace.then_some(applied.steps.clone()),
        terminal,
    };
    if json {
        print_json(&out);
        return Ok(());
    }
    println!(
        "reduced {} in {} steps to {} terminal terms",
        out.canonical_index, out.steps, out.terminal_terms
    );
    if let Some(note) = out.framing_note {
        println!("note: {note}");
    }
    println!("{}", out.terminal);
    if let Some(steps) = &out.trace {
        for s in steps {
            println!(
                "  {} @ {} -> {} outputs",
                s.rule,
                s.head,
                s.outputs.len()
            );
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GeneratingSetOutput {
    slopes: Vec<String>,
    count: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    indices: Option<Vec<GeneratorIndex>>,
}

fn cmd_generating_set(slopes: &str, count_only: bool, json: bool) -> Result<(), CliError> {
    let m = three_fiber_data(slopes)?.normalize()?;
    let count = skein_core::reduction::generating_set_count(&m)?;
    let indices = if count_only { None } else { Some(generating_set(&m)?) };
    if let Some(list) = &indices {
        assert_eq!(list.len() as u128, count);
    }
    let out = GeneratingSetOutput {
        slopes: m.slopes.iter().map(|s| format!("{}/{}", s.q, s.p)).collect(),
        count,
        indices,
    };
    if json {
        print_json(&out);
        return Ok(());
    }
    println!("{} terminal generators (normalized slopes {})", out.count, out.slopes.join(", "));
    if let Some(list) = &out.indices {
        for v in list {
            println!("  {v}");
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------
// cohomology
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct CohomologyOutput {
    slopes: Vec<String>,
    rep: String,
    traces: Traces,
    relation_residual: f64,
    dim_z1: usize,
    dim_b1: usize,
    dim_h1: usize,
    singular_gap: f64,
}

#[derive(Serialize)]
struct Traces {
    h: [f64; 2],
    c: [[f64; 2]; 3],
}

fn cmd_cohomology(slopes: &str, rep: &str, json: bool) -> Result<(), CliError> {
    let m = three_fiber_data(slopes)?;
    let spec = RepSpec::parse(&m, rep).map_err(|e| match e {
        // Malformed spec text is a usage problem, not a math failure.
        Error::InconsistentData(msg) => CliError::Usage(msg),
        other => CliError::from(other),
    })?;
    let rho = construct_sl2_rep(&m, &spec)?;
    let report = cocycle_dims(&rho, &m)?;
    let c2 = |z: num::complex::Complex64| [z.re, z.im];
    let out = CohomologyOutput {
        slopes: m.slopes.iter().map(|s| format!("{}/{}", s.q, s.p)).collect(),
        rep: rep.to_string(),
        traces: Traces {
            h: c2(rho.trace(skein_core::seifert::Gen::H)),
            c: [
                c2(rho.trace(skein_core::seifert::Gen::C1)),
                c2(rho.trace(skein_core::seifert::Gen::C2)),
                c2(rho.trace(skein_core::seifert::Gen::C3)),
            ],
        },
        relation_residual: rho.relation_residual(&m),
        dim_z1: report.dim_z1,
        dim_b1: report.dim_b1,
        dim_h1: report.dim_h1,
        singular_gap: report.singular_gap,
    };
    if json {
        print_json(&out);
        return Ok(());
    }
    println!("representation      {}", out.rep);
    println!(
        "traces              h: {:.6}{:+.6}i, c: {:.6}{:+.6}i, {:.6}{:+.6}i, {:.6}{:+.6}i",
        out.traces.h[0],
        out.traces.h[1],
        out.traces.c[0][0],
        out.traces.c[0][1],
        out.traces.c[1][0],
        out.traces.c[1][1],
        out.traces.c[2][0],
        out.traces.c[2][1],
    );
    println!("relation residual   {:.3e}", out.relation_residual);
    println!("dim Z^1             {}", out.dim_z1);
    println!("dim B^1             {}", out.dim_b1);
    println!("dim H^1             {}", out.dim_h1);
    println!("singular gap        {:.3e}", out.singular_gap);
    Ok(())
}

// ---------------------------------------------------------------------
// su2 verify
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct Su2Output {
    base: &'static str,
    slopes: Vec<String>,
    samples: usize,
    built: usize,
    skipped_unrealizable: usize,
    max_residual: f64,
    residual_tolerance: f64,
    pass: bool,
    distinct_traces: usize,
    /// Center and radius of the predicted trace interval (two-fiber
    /// products over RP^2 only).
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_interval: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    traces_in_interval: Option<bool>,
}

fn random_axis(rng: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let v: [f64; 3] = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if (1e-3..=1.0).contains(&n) {
            return Quaternion::new(0.0, v[0] / n, v[1] / n, v[2] / n);
        }
    }
}

fn trace_of_product(a: &Quaternion, b: &Quaternion) -> f64 {
    2.0 * (*a * *b).a
}

fn distinct_count(traces: &[f64]) -> usize {
    traces
        .iter()
        .map(|t| (t / 1e-9).round() as i64)
        .collect::<BTreeSet<i64>>()
        .len()
}

fn cmd_su2_verify(
    base: BaseArg,
    slopes: &str,
    samples: usize,
    seed: u64,
    tolerance: f64,
    json: bool,
) -> Result<(), CliError> {
    let pairs = parse_slope_list(slopes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traces = Vec::new();
    let mut max_residual: f64 = 0.0;
    let mut built = 0usize;
    let mut skipped = 0usize;
    let mut interval = None;

    match base {
        BaseArg::Rp2 => {
            let m = GeneralSeifertData::new(BaseSurface::RP2, &pairs)?;
            let (center, radius) = rp2_trace_interval(&m);
            interval = Some([center, radius]);
            for _ in 0..samples {
                let axes: Vec<Quaternion> =
                    (0..m.slopes.len()).map(|_| random_axis(&mut rng)).collect();
                let rep = build_rp2_rep(&m, &axes)?;
                max_residual = max_residual.max(rep.residual(&m));
                traces.push(trace_of_product(&rep.fibers[0], &rep.fibers[1]));
                built += 1;
            }
        }
        BaseArg::S2 => {
            let m = GeneralSeifertData::new(BaseSurface::S2, &pairs)?;
            let free = m.slopes.len().saturating_sub(3);
            let (lo, hi) = (5.0 * std::f64::consts::PI / 12.0, std::f64::consts::PI / 2.0);
            for _ in 0..samples {
                let angles: Vec<f64> = (0..free).map(|_| rng.gen_range(lo..=hi)).collect();
                match build_su2_s2base(&m, &angles) {
                    Ok(images) => {
                        max_residual = max_residual.max(su2_residual(&m, &images));
                        traces.push(trace_of_product(&images[0], &images[1]));
                        built += 1;
                    }
                    Err(Error::NotRealizable(_)) => skipped += 1,
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }

    let traces_in_interval = interval.map(|[center, radius]| {
        traces
            .iter()
            .all(|t| (t - center).abs() <= radius + 1e-9)
    });
    let out = Su2Output {
        base: match base {
            BaseArg::S2 => "s2",
            BaseArg::Rp2 => "rp2",
        },
        slopes: pairs.iter().map(|&(p, q)| format!("{q}/{p}")).collect(),
        samples,
        built,
        skipped_unrealizable: skipped,
        max_residual,
        residual_tolerance: tolerance,
        pass: built > 0 && max_residual < tolerance,
        distinct_traces: distinct_count(&traces),
        trace_interval: interval,
        traces_in_interval,
    };
    if json {
        print_json(&out);
        return Ok(());
    }
    println!(
        "built {} / {} samples ({} unrealizable), max residual {:.3e} (tolerance {:.1e}): {}",
        out.built,
        out.samples,
        out.skipped_unrealizable,
        out.max_residual,
        out.residual_tolerance,
        if out.pass { "pass" } else { "FAIL" },
    );
    println!("distinct traces of c1 c2: {}", out.distinct_traces);
    if let Some([center, radius]) = out.trace_interval {
        println!(
            "predicted interval [{:.6}, {:.6}] respected: {}",
            center - radius,
            center + radius,
            out.traces_in_interval.unwrap(),
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------
// census / known
// ---------------------------------------------------------------------

fn cmd_census(
    pmax: i64,
    qpolicy: QPolicyArg,
    out_path: Option<std::path::PathBuf>,
    json: bool,
) -> Result<(), CliError> {
    let policy = match qpolicy {
        QPolicyArg::Full => QPolicy::Full,
        QPolicyArg::Normalized => QPolicy::Normalized,
    };
    let lines_on_stdout = out_path.is_none();
    let summary = match out_path {
        Some(path) => {
            let file = std::fs::File::create(&path)
                .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            let summary = run_census(pmax, policy, &mut w)?;
            w.flush()
                .map_err(|e| CliError::Usage(format!("writing {}: {e}", path.display())))?;
            summary
        }
        None => {
            let stdout = std::io::stdout();
            let mut w = std::io::BufWriter::new(stdout.lock());
            let summary = run_census(pmax, policy, &mut w)?;
            w.flush().map_err(|e| CliError::Usage(format!("writing census: {e}")))?;
            summary
        }
    };
    let text = if json {
        serde_json::to_string_pretty(&summary).expect("serializable summary")
    } else {
        format!(
            "census: {} instances at pmax {}, {} discrepancies{}",
            summary.instances,
            summary.pmax,
            summary.discrepancies.len(),
            if summary.discrepancies.is_empty() {
                String::new()
            } else {
                format!("\n{}", summary.discrepancies.join("\n"))
            }
        )
    };
    // The summary must not interleave with the JSON lines on stdout.
    if lines_on_stdout {
        eprintln!("{text}");
    } else {
        println!("{text}");
    }
    Ok(())
}

fn cmd_known(label: &str, json: bool) -> Result<(), CliError> {
    let entry = lookup_known(label).map_err(|_| {
        CliError::Usage(format!(
            "unknown manifold `{label}` (known: {})",
            known_labels().join(", ")
        ))
    })?;
    if json {
        print_json(&entry);
        return Ok(());
    }
    println!("{}: dimension {} over Q(A)", entry.label, entry.dimension);
    println!("  {}", entry.citation);
    Ok(())
}
