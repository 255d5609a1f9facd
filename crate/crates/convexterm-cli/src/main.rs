//! Command-line front end for the exact convex-algebra toolkit: law
//! certification, one-point extension construction and classification,
//! polytope geometry queries, and belief-state simulation.
//!
//! Reports are JSON on standard output; human summaries go to standard
//! error. Exit codes: 0 success, 1 property violation (the report carries
//! the counterexample), 2 invalid input.

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use convexterm::algebra::{check_axioms_with_pairs, AxiomReport};
use convexterm::automata::{parse_pa, run_word, PaSpec};
use convexterm::dist::{free_algebra, Dist};
use convexterm::error::Error;
use convexterm::extension::{
    build_css_extension, build_css_extension_unchecked, build_free_extension,
    build_free_extension_unchecked, css_algebra, eligible_case4, is_extremal_in_kd_simplex,
    probe_extension, CssExtensionSpec, ExtElem, FreeExtensionSpec,
};
use convexterm::geometry::{
    decompose_2d, homothety_normalize, standard_simplex, FlaggedPolygon, Polytope,
};
use convexterm::rational::{format_rational, parse_rational, Rational};
use convexterm::sample::{
    assoc_pairs, random_dist, random_simplex_polytope, resolve_grid, rng, state_labels, ChaCha8Rng,
};
use convexterm::semilattice::{semilattice_algebra, Semilattice};

#[derive(Parser)]
#[command(
    name = "convexterm",
    version,
    about = "Exact certification of convex algebras, one-point extensions, and belief-state automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the convex-algebra laws on a chosen algebra
    CheckAxioms(CheckAxiomsArgs),
    /// Build an extension oracle, validating (or forcing) its parameters,
    /// then certify its laws
    BuildExtension(BuildExtensionArgs),
    /// Classify a one-point extension of a free algebra by probing its table
    ProbeExtension(ProbeExtensionArgs),
    /// Decide whether a body anchors the prime-ideal extension of a simplex
    /// algebra
    EligibleCase4(BodyArgs),
    /// Decide extremality of a body inside the compact-convex-subsets
    /// algebra over a simplex
    ExtremalKd(BodyArgs),
    /// Visibility hull of a flagged plane polygon
    Vih(InputArgs),
    /// Convex Minkowski combination p·A + (1-p)·B of two polytopes
    Minkowski(MinkowskiArgs),
    /// Split a plane polytope into Minkowski summands when possible
    Decompose(InputArgs),
    /// Homothety normal form of a non-singleton polytope
    Normalize(InputArgs),
    /// Run an action word through an automaton's belief-state transformer
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgebraKind {
    /// Polytopes inside a standard simplex under Minkowski combination
    Css,
    /// Finitely supported distributions over a label set
    Free,
    /// A finite meet-semilattice with the p-independent meet operation
    Semilattice,
    /// A one-point extension oracle (see build-extension for parameters)
    Extension,
}

#[derive(Args)]
struct CheckAxiomsArgs {
    /// Which algebra to certify
    #[arg(long, value_enum)]
    alg: AlgebraKind,
    /// Simplex size n for css carriers (belief states over n labels)
    #[arg(long, default_value_t = 3)]
    simplex: usize,
    /// Comma-separated generator labels for free carriers
    #[arg(long)]
    labels: Option<String>,
    /// Semilattice JSON file ({"elements": [...], "order": [[a,b], ...]})
    #[arg(long)]
    input: Option<String>,
    /// Extension spec: file path, or blackhole | imitate:LABEL | mixed:LABEL
    #[arg(long)]
    ext: Option<String>,
    /// Number of random sample elements
    #[arg(long, default_value_t = 6)]
    samples: usize,
    /// Seed for all randomness
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip parameter validation when building an extension
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct BuildExtensionArgs {
    /// Extension spec: file path, or blackhole | imitate:LABEL | mixed:LABEL
    #[arg(long)]
    ext: String,
    /// Comma-separated generator labels (selects the free carrier)
    #[arg(long)]
    labels: Option<String>,
    /// Simplex size n (selects the polytope carrier)
    #[arg(long)]
    simplex: Option<usize>,
    /// Number of random sample elements for the law check
    #[arg(long, default_value_t = 6)]
    samples: usize,
    /// Seed for all randomness
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip parameter validation (rejected parameters then surface as law
    /// violations)
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct ProbeExtensionArgs {
    /// Extension spec: file path, or blackhole | imitate:LABEL | mixed:LABEL
    #[arg(long)]
    ext: String,
    /// Comma-separated generator labels of the free carrier
    #[arg(long)]
    labels: Option<String>,
    /// Number of random sample distributions to probe with
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Seed for all randomness
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip parameter validation when building the probed oracle
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct BodyArgs {
    /// Simplex size n (the domain is the standard simplex over n labels)
    #[arg(long)]
    simplex: usize,
    /// Polytope JSON file ({"dim": n, "vertices": [["num/den", ...], ...]})
    #[arg(long)]
    body: String,
}

#[derive(Args)]
struct InputArgs {
    /// Input JSON file
    #[arg(long)]
    input: String,
}

#[derive(Args)]
struct MinkowskiArgs {
    /// Coefficient in the open interval (0,1), e.g. 1/3
    #[arg(long)]
    p: String,
    /// Left polytope JSON file
    #[arg(long)]
    a: String,
    /// Right polytope JSON file
    #[arg(long)]
    b: String,
}

#[derive(Args)]
struct SimulateArgs {
    /// Automaton JSON file
    #[arg(long)]
    pa: String,
    /// Extension spec: file path, or blackhole | imitate:STATE | mixed:STATE
    #[arg(long)]
    ext: String,
    /// Initial belief state: dirac:STATE or a distribution JSON file
    #[arg(long)]
    init: String,
    /// Comma-separated action word (may be empty)
    #[arg(long, default_value = "")]
    word: String,
}

/// What a certification run actually used, echoed so violations replay.
#[derive(Serialize)]
struct Echo {
    seed: u64,
    samples: usize,
    p_grid: Vec<String>,
}

fn echo(seed: u64, samples: usize, grid: &[Rational]) -> Echo {
    Echo { seed, samples, p_grid: grid.iter().map(format_rational).collect() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::CheckAxioms(args) => run_check_axioms(args),
        Command::BuildExtension(args) => run_build_extension(args),
        Command::ProbeExtension(args) => run_probe_extension(args),
        Command::EligibleCase4(args) => run_eligible_case4(args),
        Command::ExtremalKd(args) => run_extremal_kd(args),
        Command::Vih(args) => run_vih(args),
        Command::Minkowski(args) => run_minkowski(args),
        Command::Decompose(args) => run_decompose(args),
        Command::Normalize(args) => run_normalize(args),
        Command::Simulate(args) => run_simulate(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let code = exit_for(&err);
            if code == 1 {
                emit(&serde_json::json!({ "violation": err.to_string() }));
            } else {
                emit(&serde_json::json!({ "error": err.to_string() }));
            }
            eprintln!("convexterm: {err}");
            ExitCode::from(code)
        }
    }
}

/// Property violations exit 1; everything else is an input error.
fn exit_for(err: &Error) -> u8 {
    match err {
        Error::InconsistentOracle(_)
        | Error::NotPrime(_)
        | Error::GlueCompatibility(_)
        | Error::InnerAdherence(_)
        | Error::NotADistribution(_) => 1,
        _ => 2,
    }
}

fn emit<T: Serialize>(report: &T) {
    println!("{}", serde_json::to_string(report).expect("report serializes"));
}

fn read_file(path: &str) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidPolytope(format!("cannot read {path:?}: {e}")))
}

fn parse_labels(flag: &Option<String>) -> Option<Vec<String>> {
    flag.as_ref().map(|s| {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::to_string)
            .collect()
    })
}

/// Resolve a free extension spec from a shorthand or a JSON file, together
/// with the generator labels (priority: --labels, the file's "labels" field,
/// the support of w, the default pair s1, s2).
fn resolve_free_spec(
    ext: &str,
    labels_flag: &Option<String>,
) -> Result<(Vec<String>, FreeExtensionSpec), Error> {
    let mut file_labels: Option<Vec<String>> = None;
    let spec = match parse_shorthand(ext) {
        Some(("blackhole", _)) => FreeExtensionSpec::BlackHole,
        Some(("imitate", label)) => FreeExtensionSpec::Imitate(Dist::dirac(label)),
        Some(("mixed", label)) => FreeExtensionSpec::Mixed(Dist::dirac(label)),
        Some(_) => unreachable!("parse_shorthand yields only the three kinds"),
        None => {
            let text = read_file(ext)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            if let Some(ls) = value.get("labels") {
                file_labels = Some(serde_json::from_value(ls.clone())?);
            }
            serde_json::from_str(&text)?
        }
    };
    let labels = parse_labels(labels_flag)
        .or(file_labels)
        .or_else(|| match &spec {
            FreeExtensionSpec::Imitate(w) | FreeExtensionSpec::Mixed(w) => {
                Some(w.support().map(str::to_string).collect())
            }
            FreeExtensionSpec::BlackHole => None,
        })
        .unwrap_or_else(|| state_labels(2));
    Ok((labels, spec))
}

/// Split shorthand extension names: blackhole, imitate:LABEL, mixed:LABEL.
/// Anything else (in particular paths) returns None.
fn parse_shorthand(ext: &str) -> Option<(&'static str, &str)> {
    match ext {
        "blackhole" | "black-hole" | "black_hole" => return Some(("blackhole", "")),
        _ => {}
    }
    for kind in ["imitate", "mixed"] {
        if let Some(rest) = ext.strip_prefix(&format!("{kind}:")) {
            if !rest.is_empty() && !Path::new(ext).exists() {
                return Some((kind, rest));
            }
        }
    }
    None
}

/// Resolve a CSS extension spec over the belief simplex of `states`:
/// shorthands place a singleton at the named state's corner.
fn resolve_css_spec(ext: &str, states: &[String]) -> Result<CssExtensionSpec, Error> {
    match parse_shorthand(ext) {
        Some(("blackhole", _)) => Ok(CssExtensionSpec::BlackHole),
        Some((kind, label)) => {
            let corner = Polytope::singleton(Dist::dirac(label).to_point(states)?)?;
            Ok(match kind {
                "imitate" => CssExtensionSpec::Imitate(corner),
                _ => CssExtensionSpec::Mixed(corner),
            })
        }
        None => Ok(serde_json::from_str(&read_file(ext)?)?),
    }
}

fn spec_kind_free(spec: &FreeExtensionSpec) -> &'static str {
    match spec {
        FreeExtensionSpec::BlackHole => "black_hole",
        FreeExtensionSpec::Imitate(_) => "imitate",
        FreeExtensionSpec::Mixed(_) => "mixed",
    }
}

fn spec_kind_css(spec: &CssExtensionSpec) -> &'static str {
    match spec {
        CssExtensionSpec::BlackHole => "black_hole",
        CssExtensionSpec::Imitate(_) | CssExtensionSpec::ImitateOuter(_) => "imitate",
        CssExtensionSpec::Mixed(_) => "mixed",
        CssExtensionSpec::Case4(_) => "case4",
    }
}

#[derive(Serialize)]
struct AxiomRunReport<E> {
    algebra: String,
    pass: bool,
    #[serde(flatten)]
    report: AxiomReport<E>,
    echo: Echo,
}

fn finish_axioms<E: Serialize>(
    algebra: String,
    report: AxiomReport<E>,
    seed: u64,
    samples: usize,
    grid: &[Rational],
) -> u8 {
    let pass = report.pass();
    let out = AxiomRunReport { algebra, pass, report, echo: echo(seed, samples, grid) };
    emit(&out);
    if pass {
        eprintln!("axioms hold ({} instances checked)", out.report.checked);
        0
    } else {
        eprintln!("axiom violation found after {} instances", out.report.checked);
        1
    }
}

fn run_check_axioms(args: &CheckAxiomsArgs) -> Result<u8, Error> {
    let grid = resolve_grid(args.seed)?;
    let pairs = assoc_pairs(&grid);
    let mut r = rng(args.seed);
    match args.alg {
        AlgebraKind::Css => {
            let domain = standard_simplex(args.simplex)?;
            let alg = css_algebra(&domain);
            let mut samples = vec![domain.clone()];
            for _ in 0..args.samples {
                samples.push(random_simplex_polytope(&mut r, args.simplex, 6));
            }
            samples.dedup();
            let report = check_axioms_with_pairs(&alg, &grid, &pairs, &samples)?;
            Ok(finish_axioms(
                format!("polytopes in the {}-label belief simplex", args.simplex),
                report,
                args.seed,
                samples.len(),
                &grid,
            ))
        }
        AlgebraKind::Free => {
            let labels = parse_labels(&args.labels).unwrap_or_else(|| state_labels(2));
            if labels.is_empty() {
                return Err(Error::EmptyInput("generator label list"));
            }
            let alg = free_algebra(&labels);
            let mut samples: Vec<Dist> = labels.iter().map(|l| Dist::dirac(l)).collect();
            for _ in 0..args.samples {
                samples.push(random_dist(&mut r, &labels));
            }
            samples.dedup();
            let report = check_axioms_with_pairs(&alg, &grid, &pairs, &samples)?;
            Ok(finish_axioms(
                format!("free algebra over {} labels", labels.len()),
                report,
                args.seed,
                samples.len(),
                &grid,
            ))
        }
        AlgebraKind::Semilattice => {
            let path = args.input.as_ref().ok_or(Error::EmptyInput(
                "--input is required for --alg semilattice",
            ))?;
            let sl: Semilattice = serde_json::from_str(&read_file(path)?)?;
            let alg = semilattice_algebra(&sl);
            let samples: Vec<String> = sl.labels().to_vec();
            let report = check_axioms_with_pairs(&alg, &grid, &pairs, &samples)?;
            Ok(finish_axioms(
                format!("meet-semilattice with {} elements", sl.len()),
                report,
                args.seed,
                samples.len(),
                &grid,
            ))
        }
        AlgebraKind::Extension => {
            let ext = args.ext.as_ref().ok_or(Error::EmptyInput(
                "--ext is required for --alg extension",
            ))?;
            let (labels, spec) = resolve_free_spec(ext, &args.labels)?;
            let oracle = if args.force {
                build_free_extension_unchecked(&labels, &spec)?
            } else {
                build_free_extension(&labels, &spec)?
            };
            let samples = free_ext_samples(&mut r, &labels, &spec, args.samples);
            let report = check_axioms_with_pairs(&oracle, &grid, &pairs, &samples)?;
            Ok(finish_axioms(
                format!("{} extension of the free algebra over {} labels",
                    spec_kind_free(&spec), labels.len()),
                report,
                args.seed,
                samples.len(),
                &grid,
            ))
        }
    }
}

/// Sample pool for extension law checks: the generators, the parameter, a
/// few random distributions, and the adjoined point.
fn free_ext_samples(
    r: &mut ChaCha8Rng,
    labels: &[String],
    spec: &FreeExtensionSpec,
    extra: usize,
) -> Vec<ExtElem<Dist>> {
    let mut inner: Vec<Dist> = labels.iter().map(|l| Dist::dirac(l)).collect();
    if let FreeExtensionSpec::Imitate(w) | FreeExtensionSpec::Mixed(w) = spec {
        inner.push(w.clone());
    }
    for _ in 0..extra {
        inner.push(random_dist(r, labels));
    }
    inner.dedup();
    let mut samples: Vec<ExtElem<Dist>> = inner.into_iter().map(ExtElem::Inner).collect();
    samples.push(ExtElem::Star);
    samples
}

fn run_build_extension(args: &BuildExtensionArgs) -> Result<u8, Error> {
    let grid = resolve_grid(args.seed)?;
    let pairs = assoc_pairs(&grid);
    let mut r = rng(args.seed);
    if let Some(n) = args.simplex {
        let domain = standard_simplex(n)?;
        let states = state_labels(n);
        let spec = resolve_css_spec(&args.ext, &states)?;
        let oracle = if args.force {
            build_css_extension_unchecked(&domain, &spec)?
        } else {
            build_css_extension(&domain, &spec)?
        };
        let mut inner = vec![domain.clone()];
        if let CssExtensionSpec::Imitate(c)
        | CssExtensionSpec::ImitateOuter(c)
        | CssExtensionSpec::Mixed(c)
        | CssExtensionSpec::Case4(c) = &spec
        {
            inner.push(c.clone());
        }
        for _ in 0..args.samples {
            inner.push(random_simplex_polytope(&mut r, n, 4));
        }
        inner.dedup();
        let mut samples: Vec<ExtElem<Polytope>> =
            inner.into_iter().map(ExtElem::Inner).collect();
        samples.push(ExtElem::Star);
        let report = check_axioms_with_pairs(&oracle, &grid, &pairs, &samples)?;
        Ok(finish_axioms(
            format!("{} extension over the {n}-label belief simplex", spec_kind_css(&spec)),
            report,
            args.seed,
            samples.len(),
            &grid,
        ))
    } else {
        let (labels, spec) = resolve_free_spec(&args.ext, &args.labels)?;
        let oracle = if args.force {
            build_free_extension_unchecked(&labels, &spec)?
        } else {
            build_free_extension(&labels, &spec)?
        };
        let samples = free_ext_samples(&mut r, &labels, &spec, args.samples);
        let report = check_axioms_with_pairs(&oracle, &grid, &pairs, &samples)?;
        Ok(finish_axioms(
            format!("{} extension of the free algebra over {} labels",
                spec_kind_free(&spec), labels.len()),
            report,
            args.seed,
            samples.len(),
            &grid,
        ))
    }
}

fn run_probe_extension(args: &ProbeExtensionArgs) -> Result<u8, Error> {
    let grid = resolve_grid(args.seed)?;
    let mut r = rng(args.seed);
    let (labels, spec) = resolve_free_spec(&args.ext, &args.labels)?;
    let oracle = if args.force {
        build_free_extension_unchecked(&labels, &spec)?
    } else {
        build_free_extension(&labels, &spec)?
    };
    let mut samples: Vec<Dist> = labels.iter().map(|l| Dist::dirac(l)).collect();
    if let FreeExtensionSpec::Imitate(w) | FreeExtensionSpec::Mixed(w) = &spec {
        samples.push(w.clone());
    }
    for _ in 0..args.samples {
        samples.push(random_dist(&mut r, &labels));
    }
    samples.dedup();
    let count = samples.len();
    let report = probe_extension(&oracle, &samples, &grid)?;

    #[derive(Serialize)]
    struct ProbeRunReport {
        #[serde(flatten)]
        report: convexterm::extension::ExtensionReport,
        echo: Echo,
    }
    let case = report.case;
    emit(&ProbeRunReport { report, echo: echo(args.seed, count, &grid) });
    eprintln!("extension classified as case {case}");
    Ok(0)
}

fn run_eligible_case4(args: &BodyArgs) -> Result<u8, Error> {
    let domain = standard_simplex(args.simplex)?;
    let body: Polytope = serde_json::from_str(&read_file(&args.body)?)?;
    let report = eligible_case4(&body, &domain)?;
    let verdict = report.eligible;
    emit(&report);
    eprintln!(
        "body {} anchor the prime-ideal construction",
        if verdict { "can" } else { "cannot" }
    );
    Ok(0)
}

fn run_extremal_kd(args: &BodyArgs) -> Result<u8, Error> {
    let body: Polytope = serde_json::from_str(&read_file(&args.body)?)?;
    let extremal = is_extremal_in_kd_simplex(&body, args.simplex)?;
    emit(&serde_json::json!({ "extremal": extremal }));
    eprintln!(
        "body is {}extremal in the compact-convex-subsets algebra",
        if extremal { "" } else { "not " }
    );
    Ok(0)
}

fn run_vih(args: &InputArgs) -> Result<u8, Error> {
    let fp: FlaggedPolygon = serde_json::from_str(&read_file(&args.input)?)?;
    let hull = fp.vih();
    let fixed = hull == fp;
    emit(&hull);
    eprintln!(
        "visibility hull computed{}",
        if fixed { " (input is visibility closed)" } else { "" }
    );
    Ok(0)
}

fn run_minkowski(args: &MinkowskiArgs) -> Result<u8, Error> {
    let p = parse_rational(&args.p)?;
    let a: Polytope = serde_json::from_str(&read_file(&args.a)?)?;
    let b: Polytope = serde_json::from_str(&read_file(&args.b)?)?;
    let c = Polytope::combine(&p, &a, &b)?;
    emit(&c);
    eprintln!("combination has {} vertices", c.vertices().len());
    Ok(0)
}

fn run_decompose(args: &InputArgs) -> Result<u8, Error> {
    let p: Polytope = serde_json::from_str(&read_file(&args.input)?)?;
    let split = decompose_2d(&p)?;

    #[derive(Serialize)]
    struct DecomposeReport {
        decomposable: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        summands: Option<(Polytope, Polytope)>,
    }
    let report = DecomposeReport { decomposable: split.is_some(), summands: split };
    let decomposable = report.decomposable;
    emit(&report);
    eprintln!(
        "polytope is {}a nontrivial Minkowski sum",
        if decomposable { "" } else { "not " }
    );
    Ok(0)
}

fn run_normalize(args: &InputArgs) -> Result<u8, Error> {
    let p: Polytope = serde_json::from_str(&read_file(&args.input)?)?;
    let normalized = homothety_normalize(&p)?;
    emit(&normalized);
    eprintln!("homothety normal form computed");
    Ok(0)
}

fn run_simulate(args: &SimulateArgs) -> Result<u8, Error> {
    let pa: PaSpec = parse_pa(&read_file(&args.pa)?)?;
    let ext = resolve_css_spec(&args.ext, pa.states())?;
    let init = parse_init(&args.init)?;
    let word: Vec<String> = args
        .word
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::to_string)
        .collect();
    let trajectory = run_word(&pa, &ext, &init, &word)?;
    for step in &trajectory {
        emit(step);
    }
    let terminated = trajectory.iter().filter(|s| s.is_star()).count();
    eprintln!(
        "initial state {}; {} steps, {} at the adjoined point",
        describe_dist(&init),
        trajectory.len(),
        terminated
    );
    Ok(0)
}

fn parse_init(init: &str) -> Result<Dist, Error> {
    if let Some(label) = init.strip_prefix("dirac:") {
        if !label.is_empty() && !Path::new(init).exists() {
            return Ok(Dist::dirac(label));
        }
    }
    Ok(serde_json::from_str(&read_file(init)?)?)
}

fn describe_dist(d: &Dist) -> String {
    let parts: Vec<String> = d
        .iter()
        .map(|(l, w)| format!("{}·{l}", format_rational(w)))
        .collect();
    parts.join(" + ")
}
