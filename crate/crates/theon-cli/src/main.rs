//! `theon`: command-line access to theories, finite models, densities,
//! flag algebras, interpretations, theons and lineons.

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::path::Path;
use std::process::ExitCode;
use theon::densities::{density, mobius, multi_density, DensityKind};
use theon::flag_algebra::{format_flagvec, parse_flagvec, pi_map, product, FlagVector};
use theon::interpret::{
    amalgamate, apply_model, format_interp, named_interpretation, parse_interp, verify, verify_interpretation,
    Interpretation, Verdict,
};
use theon::lineons::{
    blowup, format_subset, parse_pattern, parse_subset, pattern_density, pattern_tind, triangle_mono_density, Density,
    LinSubset, Mode, Pattern,
};
use theon::logic::{builtin_theory, canonicalize, Language, Theory};
use theon::models::{enumerate_models, format_model, named_model, parse_model, Structure};
use theon::rational::{self, Rational};
use theon::theons::{
    bad_pair_measure, builtin_theon, coordinate_index, exact_density, format_planar, format_poseton, mask_label,
    off_to_rational, parse_theon, permuton_extract, poseton_extract, sample_model, sample_point, strengthen_horn,
    strengthen_linorder, strong_check_sampled, weak_check, Coord, HornMode, StrongVerdict, Theon, TheonOracle,
};

#[derive(Parser)]
#[command(name = "theon", version, about = "Universal theories, densities, flag algebras and theons")]
struct Cli {
    /// Emit JSON instead of tab-separated text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Models of a theory on n vertices up to isomorphism.
    Enumerate {
        #[arg(long)]
        theory: String,
        #[arg(long)]
        n: usize,
        /// Print only the number of classes.
        #[arg(long)]
        count: bool,
    },
    /// p, t_ind or t_inj of M in N.
    Density {
        #[arg(long, default_value = "p")]
        kind: DensityKind,
        m: String,
        n: String,
    },
    /// p(M1, ..., Mt; N) over pairwise disjoint vertex sets.
    MultiDensity {
        #[arg(long)]
        host: String,
        #[arg(required = true)]
        ms: Vec<String>,
    },
    /// Möbius function between two labeled models on the same vertex set.
    Mobius {
        #[arg(long)]
        theory: String,
        m: String,
        m2: String,
    },
    /// Re-expresses a flag vector at a higher level.
    Lift {
        #[arg(long)]
        level: usize,
        vector: String,
    },
    /// Flag product at a given level.
    Product {
        #[arg(long)]
        level: usize,
        u: String,
        v: String,
    },
    /// Evaluates a flag vector on a finite model.
    Evaluate { vector: String, n: String },
    /// Pushes a flag vector along a verified interpretation.
    Pi {
        #[arg(long)]
        interp: String,
        vector: String,
    },
    #[command(subcommand)]
    Interpret(InterpretCmd),
    /// Amalgamated sum of two interpretations from a common theory.
    Amalgamate { i1: String, i2: String },
    /// A canonical theory isomorphic to the input.
    Canonicalize {
        #[arg(long)]
        theory: String,
    },
    /// Samples finite models from a theon.
    Sample {
        #[arg(long)]
        theon: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Exact density of a model in a theon.
    Exact {
        #[arg(long)]
        theon: String,
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "ind")]
        kind: DensityKind,
    },
    #[command(subcommand)]
    Check(CheckCmd),
    #[command(subcommand)]
    Strengthen(StrengthenCmd),
    #[command(subcommand)]
    Permuton(PermutonCmd),
    #[command(subcommand)]
    Poseton(PosetonCmd),
    #[command(subcommand)]
    Lineon(LineonCmd),
}

#[derive(Subcommand)]
enum InterpretCmd {
    /// Verifies that every translated axiom is entailed.
    Check { interp: String },
    /// Applies the interpretation to a model of the target theory.
    Apply { interp: String, model: String },
    /// Same as the top-level `pi`.
    Pi { interp: String, vector: String },
}

#[derive(Args)]
struct Sampling {
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Truth measure of every axiom.
    Weak {
        #[arg(long)]
        theon: String,
        #[arg(long)]
        theory: Option<String>,
    },
    /// Sampled pointwise falsification.
    Strong {
        #[arg(long)]
        theon: String,
        #[arg(long)]
        theory: Option<String>,
        #[command(flatten)]
        sampling: Sampling,
    },
}

#[derive(Subcommand)]
enum StrengthenCmd {
    /// Density-point strengthening of a step theon.
    Horn {
        #[arg(long)]
        theon: String,
        #[arg(long)]
        theory: Option<String>,
        /// Strengthen the complements (positive theories).
        #[arg(long)]
        positive: bool,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Witness strengthening of a weak linear order.
    Linorder {
        #[arg(long)]
        theon: String,
        #[command(flatten)]
        sampling: Sampling,
    },
}

#[derive(Subcommand)]
enum PermutonCmd {
    /// Recovers the planar measure of a permutation theon.
    Extract {
        #[arg(long)]
        theon: String,
    },
}

#[derive(Subcommand)]
enum PosetonCmd {
    /// Recovers the step function W of an extended-order theon.
    Extract {
        #[arg(long)]
        theon: String,
    },
}

#[derive(Subcommand)]
enum LineonCmd {
    /// p(f, A), exactly or by sampling.
    Density {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        subset: String,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Also report t_ind(N_f, M_A).
        #[arg(long)]
        tind: bool,
    },
    /// Density of monochromatic triangles (x, y, x + y).
    Triangle {
        #[arg(long)]
        subset: String,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// A × F_2^t.
    Blowup {
        #[arg(long)]
        subset: String,
        #[arg(long)]
        t: usize,
    },
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<theon::Error> for Failure {
    fn from(e: theon::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Out = Result<(String, Value), Failure>;

fn read_arg(arg: &str) -> Result<Option<String>, Failure> {
    let path = arg.strip_prefix('@').unwrap_or(arg);
    if Path::new(path).is_file() {
        return std::fs::read_to_string(path).map(Some).map_err(|e| Failure::Compute(format!("{path}: {e}")));
    }
    if arg.starts_with('@') {
        return Err(Failure::Usage(format!("no such file {path}")));
    }
    Ok(None)
}

fn load_theory(arg: &str) -> theon::Result<Theory> {
    if Path::new(arg).is_file() {
        return Theory::parse(&std::fs::read_to_string(arg)?);
    }
    builtin_theory(arg)
}

fn load_model(arg: &str, lang: Option<&Language>) -> Result<(Language, Structure), Failure> {
    if let Some(src) = read_arg(arg)? {
        return Ok(parse_model(&src, lang)?);
    }
    let name = arg.strip_prefix("named:").unwrap_or(arg);
    let (l, m) =
        named_model(name).map_err(|_| Failure::Usage(format!("{arg} is neither a model file nor a named model")))?;
    if let Some(want) = lang {
        if *want != l {
            return Err(Failure::Compute(format!("model {name} does not match the expected language {want}")));
        }
    }
    Ok((l, m))
}

fn load_interp(arg: &str) -> Result<Interpretation, Failure> {
    if let Some(src) = read_arg(arg)? {
        return Ok(parse_interp(&src, &load_theory)?);
    }
    if arg.trim_start().starts_with("interp") {
        return Ok(parse_interp(arg, &load_theory)?);
    }
    Ok(named_interpretation(arg.strip_prefix("named:").unwrap_or(arg))?)
}

fn load_vector(arg: &str) -> Result<FlagVector, Failure> {
    let src = match read_arg(arg)? {
        Some(s) => s,
        None if arg.trim_start().starts_with("flagvec") => arg.to_string(),
        None => return Err(Failure::Usage(format!("{arg} is neither a flag vector file nor flagvec text"))),
    };
    Ok(parse_flagvec(&src, &load_theory)?)
}

/// `builtin:name[:param]` (a parameter `@file` is read from disk) or a
/// theon file.
fn load_theon(arg: &str) -> Result<Theon, Failure> {
    if let Some(rest) = arg.strip_prefix("builtin:") {
        let (name, param) = match rest.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (rest, None),
        };
        let param = match param {
            Some(p) if p.starts_with('@') => Some(read_arg(p)?.unwrap_or_default()),
            Some(p) => Some(p.to_string()),
            None => None,
        };
        return Ok(builtin_theon(name, param.as_deref())?);
    }
    match read_arg(arg)? {
        Some(src) => Ok(parse_theon(&src)?),
        None if arg.trim_start().starts_with("steptheon") || arg.trim_start().starts_with("cmptheon") => {
            Ok(parse_theon(arg)?)
        }
        None => Err(Failure::Usage(format!("{arg} is neither builtin:<name> nor a theon file"))),
    }
}

fn load_subset(arg: &str) -> Result<LinSubset, Failure> {
    Ok(parse_subset(&read_arg(arg)?.unwrap_or_else(|| arg.to_string()))?)
}

fn load_pattern(arg: &str) -> Result<Pattern, Failure> {
    Ok(parse_pattern(&read_arg(arg)?.unwrap_or_else(|| arg.to_string()))?)
}

fn need_seed(seed: Option<u64>) -> Result<u64, Failure> {
    seed.ok_or_else(|| Failure::Usage("sampled modes need --seed".into()))
}

fn value(q: &Rational) -> Out {
    Ok((rational::fmt(q), json!({ "value": rational::fmt(q) })))
}

fn vector_out(v: &FlagVector) -> Out {
    let terms: Vec<Value> = v
        .terms
        .values()
        .map(|(m, c)| json!({ "model": format_model(m, &v.theory.language), "coeff": rational::fmt(c) }))
        .collect();
    Ok((format_flagvec(v), json!({ "theory": v.theory.name, "level": v.level, "terms": terms })))
}

fn density_out(d: &Density) -> (String, Value) {
    match d {
        Density::Exact(q) => (rational::fmt(q), json!({ "mode": "exact", "value": rational::fmt(q) })),
        Density::Sampled(e) => (
            format!("{}/{}", e.hits, e.samples),
            json!({ "mode": "sampled", "hits": e.hits, "samples": e.samples, "estimate": e.value() }),
        ),
    }
}

fn fmt_coord(c: &Coord, dims: usize) -> String {
    let offs: Vec<String> = (0..dims).map(|a| format!("{:.6}", rational::to_f64(&off_to_rational(c.off[a])))).collect();
    format!("c{}@{}", c.cell, offs.join(","))
}

fn strong_out(v: &StrongVerdict, dims: usize) -> (String, Value) {
    match v {
        StrongVerdict::Pass { points } => (format!("PASS\t{points}"), json!({ "verdict": "PASS", "points": points })),
        StrongVerdict::Fail { axiom, point } => {
            let pts: Vec<String> =
                point.iter().map(|(m, c)| format!("x{}={}", mask_label(*m), fmt_coord(c, dims))).collect();
            (
                format!("FAIL\t{axiom}\t{}", pts.join(" ")),
                json!({ "verdict": "FAIL", "axiom": axiom.to_string(), "point": pts }),
            )
        }
    }
}

/// Number of sampled points at which the strengthening agrees with the
/// original theon on every predicate.
fn horn_agreement(t: &Theon, h: &dyn TheonOracle, trials: u64, seed: u64) -> u64 {
    let arities = t.theory.language.arities();
    let max = arities.iter().copied().max().unwrap_or(0);
    (0..trials)
        .filter(|&i| {
            let point = sample_point(&t.grid, max, seed, i);
            arities.iter().enumerate().all(|(p, &k)| {
                let x: Vec<Coord> = coordinate_index(k).iter().map(|&m| point[m as usize]).collect();
                h.member(p, &x) == t.member(p, &x)
            })
        })
        .count() as u64
}

fn theory_or(theon: &Theon, theory: &Option<String>) -> theon::Result<Theory> {
    match theory {
        Some(t) => load_theory(t),
        None => Ok(theon.theory.clone()),
    }
}

fn lineon_mode(samples: Option<u64>, seed: Option<u64>) -> Result<Mode, Failure> {
    Ok(match samples {
        Some(samples) => Mode::Sampled { samples, seed: need_seed(seed)? },
        None => Mode::Exact,
    })
}

fn run(cmd: Command) -> Out {
    match cmd {
        Command::Enumerate { theory, n, count } => {
            let t = load_theory(&theory)?;
            let classes = enumerate_models(&t, n)?;
            if count {
                return Ok((classes.len().to_string(), json!({ "count": classes.len() })));
            }
            let mut lines = Vec::new();
            let mut items = Vec::new();
            for (i, c) in classes.iter().enumerate() {
                let text = format_model(&c.canonical, &t.language);
                lines.push(format!("{}\t{}\t{}\t{}", i + 1, c.code.hex(), c.aut_count, text));
                items.push(json!({ "code": c.code.hex(), "aut": c.aut_count, "model": text }));
            }
            Ok((lines.join("\n"), json!({ "theory": t.name, "n": n, "count": classes.len(), "models": items })))
        }
        Command::Density { kind, m, n } => {
            let (lang, m) = load_model(&m, None)?;
            let (_, n) = load_model(&n, Some(&lang))?;
            value(&density(kind, &m, &n)?)
        }
        Command::MultiDensity { host, ms } => {
            let mut models = Vec::new();
            let mut lang: Option<Language> = None;
            for a in &ms {
                let (l, m) = load_model(a, lang.as_ref())?;
                lang.get_or_insert(l);
                models.push(m);
            }
            let (_, n) = load_model(&host, lang.as_ref())?;
            value(&multi_density(&models, &n)?)
        }
        Command::Mobius { theory, m, m2 } => {
            let t = load_theory(&theory)?;
            let (_, a) = load_model(&m, Some(&t.language))?;
            let (_, b) = load_model(&m2, Some(&t.language))?;
            value(&mobius(&t, &a, &b)?)
        }
        Command::Lift { level, vector } => vector_out(&load_vector(&vector)?.lift(level)?),
        Command::Product { level, u, v } => vector_out(&product(&load_vector(&u)?, &load_vector(&v)?, level)?),
        Command::Evaluate { vector, n } => {
            let v = load_vector(&vector)?;
            let (_, n) = load_model(&n, Some(&v.theory.language))?;
            value(&v.evaluate(&n)?)
        }
        Command::Pi { interp, vector } | Command::Interpret(InterpretCmd::Pi { interp, vector }) => {
            let i = verify(load_interp(&interp)?)?;
            vector_out(&pi_map(&i, &load_vector(&vector)?)?)
        }
        Command::Interpret(InterpretCmd::Check { interp }) => {
            let i = load_interp(&interp)?;
            match verify_interpretation(&i)? {
                Verdict::Pass(_) => Ok(("PASS".into(), json!({ "verdict": "PASS" }))),
                Verdict::Fail { axiom, translated, counterexample } => {
                    let ce = counterexample.describe(&i.target.language);
                    Ok((
                        format!("FAIL\t{axiom}\t{translated}\t{ce}"),
                        json!({
                            "verdict": "FAIL",
                            "axiom": axiom.to_string(),
                            "translated": translated.to_string(),
                            "counterexample": ce,
                            "size": counterexample.model.n(),
                        }),
                    ))
                }
            }
        }
        Command::Interpret(InterpretCmd::Apply { interp, model }) => {
            let i = load_interp(&interp)?;
            let (_, m) = load_model(&model, Some(&i.target.language))?;
            let out = apply_model(&i.map, &m)?;
            let text = format_model(&out, &i.source.language);
            Ok((text.clone(), json!({ "model": text })))
        }
        Command::Amalgamate { i1, i2 } => {
            let a = amalgamate(&load_interp(&i1)?, &load_interp(&i2)?)?;
            let text = format!("{}\n{}\n{}", a.theory, format_interp(&a.hat1), format_interp(&a.hat2));
            Ok((
                text,
                json!({
                    "theory": a.theory.to_string(),
                    "hat1": format_interp(&a.hat1),
                    "hat2": format_interp(&a.hat2),
                    "renamed": a.renamed,
                }),
            ))
        }
        Command::Canonicalize { theory } => {
            let c = canonicalize(&load_theory(&theory)?)?;
            let text = format!("{}\n{}\n{}", c.theory, c.to_canonical, c.from_canonical);
            Ok((
                text,
                json!({
                    "theory": c.theory.to_string(),
                    "to_canonical": c.to_canonical.to_string(),
                    "from_canonical": c.from_canonical.to_string(),
                }),
            ))
        }
        Command::Sample { theon, n, seed, count } => {
            let seed = need_seed(seed)?;
            let t = load_theon(&theon)?;
            let mut lines = Vec::new();
            let mut items = Vec::new();
            for i in 0..count {
                let text = format_model(&sample_model(&t, n, seed, i), &t.theory.language);
                lines.push(text.clone());
                items.push(Value::String(text));
            }
            Ok((lines.join("\n"), json!({ "seed": seed, "models": items })))
        }
        Command::Exact { theon, model, kind } => {
            let t = load_theon(&theon)?;
            let (_, m) = load_model(&model, Some(&t.theory.language))?;
            value(&exact_density(&t, &m, kind)?)
        }
        Command::Check(CheckCmd::Weak { theon, theory }) => {
            let t = load_theon(&theon)?;
            let th = theory_or(&t, &theory)?;
            let reports = weak_check(&t, &th)?;
            let pass = reports.iter().all(|r| r.pass());
            let mut lines: Vec<String> = reports
                .iter()
                .map(|r| {
                    format!("{}\t{}\t{}", r.axiom, rational::fmt(&r.measure), if r.pass() { "PASS" } else { "FAIL" })
                })
                .collect();
            lines.push(if pass { "PASS".into() } else { "FAIL".into() });
            let items: Vec<Value> = reports
                .iter()
                .map(
                    |r| json!({ "axiom": r.axiom.to_string(), "measure": rational::fmt(&r.measure), "pass": r.pass() }),
                )
                .collect();
            Ok((lines.join("\n"), json!({ "verdict": if pass { "PASS" } else { "FAIL" }, "axioms": items })))
        }
        Command::Check(CheckCmd::Strong { theon, theory, sampling }) => {
            let seed = need_seed(sampling.seed)?;
            let t = load_theon(&theon)?;
            let th = theory_or(&t, &theory)?;
            let v = strong_check_sampled(&t, &th, sampling.trials, seed)?;
            Ok(strong_out(&v, t.grid.dims))
        }
        Command::Strengthen(StrengthenCmd::Horn { theon, theory, positive, sampling }) => {
            let seed = need_seed(sampling.seed)?;
            let t = load_theon(&theon)?;
            let th = theory_or(&t, &theory)?;
            let mode = if positive { HornMode::Positive } else { HornMode::Negative };
            let h = strengthen_horn(&t, mode)?;
            let agree = horn_agreement(&t, &h, sampling.trials, seed);
            let v = strong_check_sampled(&h, &th, sampling.trials, seed)?;
            let (s, j) = strong_out(&v, t.grid.dims);
            Ok((
                format!("agreement\t{agree}/{}\n{s}", sampling.trials),
                json!({ "agreement": agree, "trials": sampling.trials, "strong": j }),
            ))
        }
        Command::Strengthen(StrengthenCmd::Linorder { theon, sampling }) => {
            let seed = need_seed(sampling.seed)?;
            let t = load_theon(&theon)?;
            let bad = bad_pair_measure(&t)?;
            let o = strengthen_linorder(&t)?;
            let good: Vec<usize> = (0..t.grid.len()).filter(|&c| o.is_good(c)).collect();
            let v = strong_check_sampled(&o, &builtin_theory("LinOrder")?, sampling.trials, seed)?;
            let (s, j) = strong_out(&v, t.grid.dims);
            let cells: Vec<String> = good.iter().map(|c| c.to_string()).collect();
            Ok((
                format!("bad_pairs\t{}\ngood_cells\t{}\n{s}", rational::fmt(&bad), cells.join(",")),
                json!({ "bad_pairs": rational::fmt(&bad), "good_cells": good, "strong": j }),
            ))
        }
        Command::Permuton(PermutonCmd::Extract { theon }) => {
            let mu = permuton_extract(&load_theon(&theon)?)?;
            let text = format_planar(&mu);
            Ok((text.clone(), json!({ "planar": text })))
        }
        Command::Poseton(PosetonCmd::Extract { theon }) => {
            let w = poseton_extract(&load_theon(&theon)?)?;
            let text = format_poseton(&w);
            Ok((text.clone(), json!({ "poseton": text })))
        }
        Command::Lineon(LineonCmd::Density { pattern, subset, samples, seed, tind }) => {
            let f = load_pattern(&pattern)?;
            let a = load_subset(&subset)?;
            let (mut s, mut j) = density_out(&pattern_density(&f, &a, lineon_mode(samples, seed)?)?);
            if tind {
                let q = pattern_tind(&f, &a)?;
                s.push_str(&format!("\nt_ind\t{}", rational::fmt(&q)));
                j["t_ind"] = Value::String(rational::fmt(&q));
            }
            Ok((s, j))
        }
        Command::Lineon(LineonCmd::Triangle { subset, samples, seed }) => {
            let a = load_subset(&subset)?;
            Ok(density_out(&triangle_mono_density(&a, lineon_mode(samples, seed)?)?))
        }
        Command::Lineon(LineonCmd::Blowup { subset, t }) => {
            let b = blowup(&load_subset(&subset)?, t)?;
            let text = format_subset(&b);
            Ok((text.clone(), json!({ "subset": text, "size": b.len() })))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok((text, v)) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            } else {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
