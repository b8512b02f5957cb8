//! `prodsys`: command-line front end for the product-system toolkit.
//!
//! Subcommands cover relation emission, the truncated-Fock invariant
//! suite, join/sigma queries, brute-force oracle cross-checks, and the
//! faithfulness criterion. Reports go to stdout; the exit code is 0
//! exactly when every check passed.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use prodsys::crossed::{
    check_expectation_diagram, monomial_product, monomial_to_fock, pair_interior, sum_to_fock,
    Monomial, MonomialSum,
};
use prodsys::fock::{build_truncation, max_deviation, to_triplets, Truncation};
use prodsys::monoid::{Join, Monoid, MonoidElement};
use prodsys::oracle::{join_brute, leq_brute, sigma_brute};
use prodsys::report::{CheckRecord, Report};
use prodsys::reps::{
    check_covariance, check_faithfulness_criterion, check_representation, criterion_string,
    gen_cov_relations, gen_mult_relations, GeneratorAssignment, RelationSet,
};
use prodsys::system::{random_element, Multiplier, ProductSystem};

#[derive(Parser)]
#[command(name = "prodsys", version, about = "Product systems over quasi-lattice ordered monoids: relations, Fock truncations, and crossed-product checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit the multiplication and covariance relations for a system.
    Relations {
        /// Path to the JSON system spec.
        #[arg(long)]
        spec: PathBuf,
        /// Directory to write text and JSON relation files into.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Build a Fock truncation and run the full invariant suite.
    Fock {
        #[arg(long)]
        spec: PathBuf,
        /// Write the report as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Export the generator images as sparse triplets to this path.
        #[arg(long)]
        triplets: Option<PathBuf>,
    },
    /// Compute joins, sigma, and theta images of the given elements.
    Join {
        #[arg(long)]
        spec: PathBuf,
        /// Elements: `(a,b,...)` for N^k, words like `x2 y1` or `e` for free products.
        #[arg(required = true)]
        elements: Vec<String>,
    },
    /// Cross-validate the order algorithms and the monomial algebra
    /// against brute-force search.
    Oracle {
        #[arg(long)]
        spec: PathBuf,
        /// Number of random join/leq pairs.
        #[arg(long, default_value_t = 1000)]
        pairs: usize,
        /// Number of random monomial pairs.
        #[arg(long, default_value_t = 200)]
        monomials: usize,
    },
    /// Evaluate the faithfulness product for a finite set of elements.
    Faithful {
        #[arg(long)]
        spec: PathBuf,
        /// Use the Fock assignment on the spec's truncation.
        #[arg(long)]
        fock: bool,
        /// Path to a JSON generator assignment (alternative to --fock).
        #[arg(long)]
        assignment: Option<PathBuf>,
        /// Elements of the set S; repeatable.
        #[arg(short = 'S', long = "set", required = true)]
        set: Vec<String>,
    },
}

const DEFAULT_LEVEL: u64 = 2;
const DEFAULT_TOL: f64 = 1e-9;

fn default_level() -> u64 {
    DEFAULT_LEVEL
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum MonoidSpec {
    FreeAbelian { rank: usize },
    FreeProduct { components: usize },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MultiplierSpec {
    Named(String),
    Bicharacter(BicharacterSpec),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BicharacterSpec {
    #[serde(rename = "type")]
    kind: String,
    /// Phases as fractions of a full turn: entry t means e^{2 pi i t}.
    phases: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    monoid: MonoidSpec,
    dims: Vec<u64>,
    #[serde(default)]
    multiplier: Option<MultiplierSpec>,
    #[serde(rename = "L", default = "default_level")]
    level: u64,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default)]
    seed: u64,
}

impl SpecFile {
    fn load(path: &PathBuf) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read spec file {}", path.display()))?;
        serde_json::from_str(&text).context("invalid system spec")
    }

    fn build(&self) -> Result<ProductSystem> {
        let monoid = match self.monoid {
            MonoidSpec::FreeAbelian { rank } => Monoid::FreeAbelian { rank },
            MonoidSpec::FreeProduct { components } => Monoid::FreeProduct { components },
        };
        let system = ProductSystem::new(monoid, self.dims.clone())?;
        match &self.multiplier {
            None => Ok(system),
            Some(MultiplierSpec::Named(name)) if name == "trivial" => Ok(system),
            Some(MultiplierSpec::Named(name)) => bail!("unknown multiplier {name:?}"),
            Some(MultiplierSpec::Bicharacter(b)) => {
                if b.kind != "bicharacter" {
                    bail!("unknown multiplier type {:?}", b.kind);
                }
                Ok(system.with_twist(Multiplier::bicharacter_from_turns(&b.phases)?)?)
            }
        }
    }
}

fn parse_element(monoid: &Monoid, text: &str) -> Result<MonoidElement> {
    let text = text.trim();
    match monoid {
        Monoid::FreeAbelian { rank } => {
            let inner = text
                .strip_prefix('(')
                .and_then(|s| s.strip_suffix(')'))
                .with_context(|| format!("expected `(a,b,...)`, got {text:?}"))?;
            let entries: Vec<u64> = if inner.trim().is_empty() {
                vec![]
            } else {
                inner
                    .split(',')
                    .map(|p| p.trim().parse().with_context(|| format!("bad exponent {p:?}")))
                    .collect::<Result<_>>()?
            };
            if entries.len() != *rank {
                bail!("expected {rank} exponents, got {}", entries.len());
            }
            Ok(MonoidElement::Exponents(entries))
        }
        Monoid::FreeProduct { components } => {
            if text == "e" {
                return Ok(monoid.identity());
            }
            let mut out = monoid.identity();
            for token in text.split_whitespace() {
                let letters: String = token.chars().take_while(|c| c.is_alphabetic()).collect();
                let digits = &token[letters.len()..];
                let component = match letters.as_str() {
                    "x" => 0,
                    "y" => 1,
                    "z" => 2,
                    g => g
                        .strip_prefix('g')
                        .and_then(|n| n.parse().ok())
                        .with_context(|| format!("bad generator letter {letters:?}"))?,
                };
                if component >= *components {
                    bail!("component {component} out of range (monoid has {components})");
                }
                let exponent: u64 = if digits.is_empty() {
                    1
                } else {
                    digits.parse().with_context(|| format!("bad exponent in {token:?}"))?
                };
                for _ in 0..exponent {
                    out = monoid.multiply(&out, &monoid.generator(component))?;
                }
            }
            Ok(out)
        }
    }
}

fn relation_set_json(set: &RelationSet) -> serde_json::Value {
    let rels: Vec<_> = set
        .relations
        .iter()
        .map(|r| {
            json!({
                "lhs": r.lhs.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "rhs": r.rhs.iter().map(|(c, w)| json!({
                    "re": c.re,
                    "im": c.im,
                    "word": w.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "relations": rels })
}

fn cmd_relations(spec_path: &PathBuf, out_dir: &Option<PathBuf>) -> Result<bool> {
    let spec = SpecFile::load(spec_path)?;
    let system = spec.build()?;
    let mult = gen_mult_relations(&system)?;
    let cov = gen_cov_relations(&system)?;

    println!("# multiplication relations ({})", mult.relations.len());
    for line in mult.lines() {
        println!("{line}");
    }
    println!("# covariance relations ({})", cov.relations.len());
    for line in cov.lines() {
        println!("{line}");
    }

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
        for (name, set) in [("mult", &mult), ("cov", &cov)] {
            fs::write(dir.join(format!("relations_{name}.txt")), set.lines().join("\n") + "\n")?;
            fs::write(
                dir.join(format!("relations_{name}.json")),
                serde_json::to_string_pretty(&relation_set_json(set))?,
            )?;
        }
    }
    Ok(true)
}

fn record_json(r: &CheckRecord) -> serde_json::Value {
    json!({
        "name": r.name,
        "identity": r.identity,
        "subspace_dim": r.subspace_dim,
        "max_deviation": r.max_deviation,
        "pass": r.pass,
        "witness": r.witness,
    })
}

/// A monomial whose three parts have word length at most one.
fn small_monomial<R: Rng>(system: &ProductSystem, rng: &mut R) -> Result<Monomial> {
    let mut pick = |rng: &mut R| {
        let n = system.monoid().generator_count();
        match rng.gen_range(0..=n) {
            0 => system.monoid().identity(),
            g => system.monoid().generator(g - 1),
        }
    };
    let (pu, s, pv) = (pick(rng), pick(rng), pick(rng));
    Ok(Monomial::new(
        system.random_fibre(&pu, rng)?,
        s,
        system.random_fibre(&pv, rng)?,
    ))
}

fn small_sum<R: Rng>(system: &ProductSystem, terms: usize, rng: &mut R) -> Result<MonomialSum> {
    let terms = (0..terms)
        .map(|_| {
            Ok((
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                small_monomial(system, rng)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonomialSum::from_terms(system, terms)?)
}

fn fock_suite(spec: &SpecFile, trunc: &Truncation) -> Result<Report> {
    let system = trunc.system();
    let monoid = *system.monoid();
    let tol = spec.tol;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let assignment = GeneratorAssignment::fock(trunc)?;
    let mut report = check_representation(&assignment, system, tol)?;
    for r in check_covariance(&assignment, system, tol)?.records {
        report.push(r);
    }

    // alpha_I covariance over every member pair.
    let mut worst = 0.0f64;
    for s in trunc.members() {
        for t in trunc.members() {
            let lhs = trunc.alpha_i(s)? * trunc.alpha_i(t)?;
            let rhs = match monoid.join(s, t)? {
                Join::Element(j) if trunc.contains(&j) => trunc.alpha_i(&j)?,
                Join::Element(_) | Join::Infinity => trunc.zero(),
            };
            worst = worst.max(max_deviation(&lhs, &rhs).0);
        }
    }
    report.push(CheckRecord::new(
        "alpha_covariance",
        "alpha_I(s) alpha_I(t) = alpha_I(s v t)",
        trunc.total_dim(),
        worst,
        0.0,
        None,
    ));

    // Q_A partitions for random finite sets F.
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let size = rng.gen_range(1..=4usize.min(trunc.members().len()));
        let f: Vec<MonoidElement> =
            trunc.members().choose_multiple(&mut rng, size).cloned().collect();
        let qs: Vec<_> = (0..1u32 << f.len())
            .map(|mask| {
                let a: Vec<MonoidElement> = f
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, t)| t.clone())
                    .collect();
                trunc.q_a(&f, &a)
            })
            .collect::<prodsys::error::Result<_>>()?;
        let total = qs.iter().fold(trunc.zero(), |acc, q| acc + q);
        worst = worst.max(max_deviation(&total, &trunc.identity_op()).0);
        for i in 0..qs.len() {
            for j in 0..qs.len() {
                if i != j {
                    worst = worst.max(max_deviation(&(&qs[i] * &qs[j]), &trunc.zero()).0);
                }
            }
        }
    }
    report.push(CheckRecord::new(
        "q_a_partition",
        "{Q_A : A subset of F} partitions the identity",
        trunc.total_dim(),
        worst,
        0.0,
        None,
    ));

    // Expectation diagram on sampled monomial sums.
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let ms = small_sum(system, 6, &mut rng)?;
        worst = worst.max(check_expectation_diagram(trunc, &ms, tol)?.max_deviation);
    }
    report.push(CheckRecord::new(
        "expectation_diagram",
        "Phi_l(fock(X)) = fock(Phi_delta(X))",
        trunc.total_dim(),
        worst,
        tol,
        None,
    ));

    Ok(report)
}

fn cmd_fock(
    spec_path: &PathBuf,
    json_out: &Option<PathBuf>,
    triplets_out: &Option<PathBuf>,
) -> Result<bool> {
    let spec = SpecFile::load(spec_path)?;
    let system = spec.build()?;
    let trunc = build_truncation(&system, spec.level)?;
    println!(
        "truncation: L={}, {} members, total dimension {}",
        spec.level,
        trunc.members().len(),
        trunc.total_dim()
    );
    let report = fock_suite(&spec, &trunc)?;
    println!("{report}");

    if let Some(path) = json_out {
        let records: Vec<_> = report.records.iter().map(record_json).collect();
        fs::write(path, serde_json::to_string_pretty(&json!({ "records": records }))?)?;
    }
    if let Some(path) = triplets_out {
        let monoid = system.monoid();
        let mut images = serde_json::Map::new();
        for g in 0..monoid.generator_count() {
            let s = monoid.generator(g);
            for (i, u) in system.basis(&s)?.iter().enumerate() {
                let entries: Vec<_> = to_triplets(&trunc.l_op(u)?)
                    .into_iter()
                    .map(|(r, c, re, im)| json!([r, c, re, im]))
                    .collect();
                images.insert(format!("S[{},{}]", g + 1, i + 1), json!(entries));
            }
        }
        fs::write(path, serde_json::to_string_pretty(&serde_json::Value::Object(images))?)?;
    }
    Ok(report.pass_all())
}

fn cmd_join(spec_path: &PathBuf, elements: &[String]) -> Result<bool> {
    let spec = SpecFile::load(spec_path)?;
    let monoid = match spec.monoid {
        MonoidSpec::FreeAbelian { rank } => Monoid::FreeAbelian { rank },
        MonoidSpec::FreeProduct { components } => Monoid::FreeProduct { components },
    };
    let parsed: Vec<MonoidElement> = elements
        .iter()
        .map(|e| parse_element(&monoid, e))
        .collect::<Result<_>>()?;

    for i in 0..parsed.len() {
        for j in i + 1..parsed.len() {
            println!(
                "join({}, {}) = {}",
                parsed[i],
                parsed[j],
                monoid.join(&parsed[i], &parsed[j])?
            );
        }
    }
    if parsed.len() != 2 {
        println!("sigma = {}", monoid.sigma(parsed.iter())?);
    }
    if matches!(monoid, Monoid::FreeProduct { .. }) {
        let target = monoid.theta_target()?;
        for e in &parsed {
            println!("theta({}) = {}", e, monoid.theta(e)?);
        }
        if let Join::Element(s) = monoid.sigma(parsed.iter())? {
            println!("theta(sigma) = {}", monoid.theta(&s)?);
        }
        let _ = target;
    }
    Ok(true)
}

fn cmd_oracle(spec_path: &PathBuf, pairs: usize, monomials: usize) -> Result<bool> {
    let spec = SpecFile::load(spec_path)?;
    let system = spec.build()?;
    let monoid = *system.monoid();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut report = Report::default();

    // Random join/sigma pairs against exhaustive search.
    let mut mismatches = 0usize;
    for _ in 0..pairs {
        let a = random_element(&monoid, 3, &mut rng);
        let b = random_element(&monoid, 3, &mut rng);
        if monoid.join(&a, &b)? != join_brute(&monoid, &a, &b) {
            mismatches += 1;
        }
        if monoid.sigma([&a, &b].into_iter())? != sigma_brute(&monoid, &[a.clone(), b.clone()]) {
            mismatches += 1;
        }
    }
    report.push(CheckRecord::new(
        "join_random",
        "join/sigma agree with exhaustive search",
        pairs,
        mismatches as f64,
        0.0,
        None,
    ));

    // Exhaustive leq on all short pairs.
    let elems = monoid.elements_up_to(match monoid {
        Monoid::FreeProduct { .. } => 5,
        Monoid::FreeAbelian { .. } => 4,
    });
    let mut mismatches = 0usize;
    let mut tested = 0usize;
    for a in &elems {
        for b in &elems {
            if monoid.leq(a, b)? != leq_brute(&monoid, a, b) {
                mismatches += 1;
            }
            tested += 1;
        }
    }
    report.push(CheckRecord::new(
        "leq_exhaustive",
        "leq agrees with existential search on all short pairs",
        tested,
        mismatches as f64,
        0.0,
        None,
    ));

    // Monomial products against Fock-image multiplication.
    let trunc = build_truncation(&system, spec.level)?;
    let mut worst = 0.0f64;
    for _ in 0..monomials {
        let m1 = small_monomial(&system, &mut rng)?;
        let m2 = small_monomial(&system, &mut rng)?;
        let p = pair_interior(&trunc, &m1, &m2)?;
        let symbolic = sum_to_fock(&trunc, &monomial_product(&system, &m1, &m2)?)?;
        let direct = monomial_to_fock(&trunc, &m1)? * monomial_to_fock(&trunc, &m2)?;
        worst = worst.max(max_deviation(&(symbolic * &p), &(direct * &p)).0);
    }
    report.push(CheckRecord::new(
        "monomial_vs_fock",
        "monomial product matches Fock-image product on the interior",
        monomials,
        worst,
        spec.tol,
        None,
    ));

    println!("{report}");
    Ok(report.pass_all())
}

fn load_assignment(path: &PathBuf, system: &ProductSystem) -> Result<GeneratorAssignment> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct AssignmentFile {
        /// images[g][i] is a square matrix of [re, im] entries, row-major.
        images: Vec<Vec<Vec<Vec<[f64; 2]>>>>,
    }
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read assignment file {}", path.display()))?;
    let file: AssignmentFile = serde_json::from_str(&text).context("invalid assignment file")?;
    let images = file
        .images
        .into_iter()
        .map(|per_gen| {
            per_gen
                .into_iter()
                .map(|rows| {
                    let n = rows.len();
                    if rows.iter().any(|r| r.len() != n) {
                        bail!("assignment matrices must be square");
                    }
                    Ok(DMatrix::from_fn(n, n, |r, c| {
                        Complex64::new(rows[r][c][0], rows[r][c][1])
                    }))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorAssignment::from_matrices(system, images)?)
}

fn cmd_faithful(
    spec_path: &PathBuf,
    fock: bool,
    assignment_path: &Option<PathBuf>,
    set: &[String],
) -> Result<bool> {
    let spec = SpecFile::load(spec_path)?;
    let system = spec.build()?;
    let assignment = match (fock, assignment_path) {
        (true, None) => GeneratorAssignment::fock(&build_truncation(&system, spec.level)?)?,
        (false, Some(path)) => load_assignment(path, &system)?,
        _ => bail!("pass exactly one of --fock or --assignment"),
    };
    let elements: Vec<MonoidElement> = set
        .iter()
        .map(|e| parse_element(system.monoid(), e))
        .collect::<Result<_>>()?;

    println!("criterion: {}", criterion_string(&system)?);
    let outcome = check_faithfulness_criterion(&assignment, &system, &elements, spec.tol)?;
    println!(
        "product norm {:.6e}: {}",
        outcome.norm,
        if outcome.nonzero { "NONZERO" } else { "ZERO" }
    );
    if let Some(idx) = outcome.witness_index {
        println!("witness: basis vector {idx}");
    }
    Ok(outcome.nonzero)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.cmd {
        Cmd::Relations { spec, out_dir } => cmd_relations(spec, out_dir),
        Cmd::Fock { spec, json, triplets } => cmd_fock(spec, json, triplets),
        Cmd::Join { spec, elements } => cmd_join(spec, elements),
        Cmd::Oracle { spec, pairs, monomials } => cmd_oracle(spec, *pairs, *monomials),
        Cmd::Faithful { spec, fock, assignment, set } => {
            cmd_faithful(spec, *fock, assignment, set)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
