//! Command-line front end: loads a presentation, dispatches to the library,
//! and prints one deterministic JSON report per invocation.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num::complex::Complex64;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use hopfwb::algebra::Element;
use hopfwb::congruence::{ClassId, ClassTable, NzClassId, DEFAULT_MAX_WORDS_PER_LEVEL};
use hopfwb::error::{Error, Result};
use hopfwb::fock::{evaluate, left_regular, operator_norm, SemigroupSpace};
use hopfwb::hopf::{hopf_ideal_test, presentation_ideal_generators, semigroup_like_scan};
use hopfwb::predual::{
    character_convolution_check, convolve, point_functional_value, BallPoint, Functional,
};
use hopfwb::presentation::Presentation;
use hopfwb::scalar::{format_rational, parse_rational, Rc};
use hopfwb::schur::{
    factorization_verify, geometric_factorization, multiplier_norm_estimate, MultiplierSymbol,
};
use hopfwb::verify::verify_all;
use hopfwb::word::{Word, WordRepr};

const WORD_GUARD_ENV: &str = "HOPFWB_MAX_WORDS";

#[derive(Parser)]
#[command(
    name = "hopfwb",
    version,
    about = "Graded semigroup quotients and their Hopf structure"
)]
struct Cli {
    /// Presentation file (JSON). Defaults to the commutator presentation on
    /// two generators.
    #[arg(long, global = true)]
    pres: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized checks and sampling.
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,

    /// Lift the per-level word-count guard.
    #[arg(long, global = true, default_value_t = false)]
    force: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct LevelArg {
    /// Truncation level N.
    #[arg(long)]
    level: usize,
}

#[derive(Subcommand)]
enum Command {
    /// List congruence classes per level.
    Classes {
        #[command(flatten)]
        level: LevelArg,
        /// Include member word lists.
        #[arg(long, default_value_t = false)]
        verbose: bool,
    },
    /// Multiply two classes given by member words.
    Multiply {
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
        /// Table truncation; defaults to |s| + |t|.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Emit the truncated matrix of the weighted shift at a class.
    Matrix {
        #[arg(long)]
        class: String,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Operator norm of a series read from a JSON element file.
    Norm {
        #[arg(long)]
        element: PathBuf,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Compare the union-find closure against the saturation oracle.
    CheckOracle {
        #[command(flatten)]
        level: LevelArg,
    },
    /// Exhaustively scan 0/1 series for semigroup-like elements.
    SpectrumScan {
        #[arg(long)]
        max_degree: usize,
    },
    /// Indicator-basis test for a degree slice of an ideal.
    HopfTest {
        /// JSON file of homogeneous generators; defaults to the generators
        /// induced by the presentation.
        #[arg(long)]
        ideal: Option<PathBuf>,
        #[arg(long)]
        degree: usize,
    },
    /// Enumerate generator permutations preserving the congruence.
    Autos {
        #[arg(long)]
        check_level: Option<usize>,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Apply the order-k partial-sum map to an element file.
    Cesaro {
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Sampled lower bound and certificates for a diagonal multiplier.
    Schur {
        /// Symbol: "one", "geometric:<re>[,<im>]", or "indicator:<word>".
        #[arg(long)]
        phi: String,
        #[command(flatten)]
        level: LevelArg,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Truncated point-functional value at a ball point.
    Char {
        /// Comma-separated coordinates, each "re" or "re+imi".
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        op: String,
        #[command(flatten)]
        level: LevelArg,
        /// Also report the convolution identity residual against this second
        /// point.
        #[arg(long)]
        mu: Option<String>,
    },
    /// Convolve two coefficient functionals exactly.
    Convolve {
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: String,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Multinomial size report for the commutator quotient.
    Drury {
        #[arg(long)]
        d: u32,
        #[command(flatten)]
        level: LevelArg,
    },
    /// Run the full invariant suite.
    VerifyAll {
        #[command(flatten)]
        level: LevelArg,
    },
}

fn word_guard(force: bool) -> u64 {
    if force {
        return u64::MAX;
    }
    std::env::var(WORD_GUARD_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_WORDS_PER_LEVEL)
}

fn load_presentation(path: &Option<PathBuf>) -> Result<Presentation> {
    match path {
        Some(p) => Presentation::from_json(&std::fs::read_to_string(p)?),
        None => Ok(Presentation::commutator(2)),
    }
}

fn parse_word(text: &str, d: u32) -> Result<Word> {
    if text == "0" {
        return Ok(Word::Zero);
    }
    let trimmed = text.trim();
    let repr = if trimmed.starts_with('[') {
        WordRepr::Array(serde_json::from_str(trimmed)?)
    } else if trimmed == "@" || trimmed.is_empty() {
        WordRepr::Text(String::new())
    } else {
        WordRepr::Text(trimmed.to_string())
    };
    repr.parse(d)
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim();
    let err = || Error::Invalid(format!("cannot parse complex number {t:?}"));
    if let Some(stripped) = t.strip_suffix('i') {
        // Forms like "0.5+0.25i" or "-0.1i".
        for split in (1..stripped.len()).rev() {
            let (re, im) = stripped.split_at(split);
            if im.starts_with('+') || im.starts_with('-') {
                if let (Ok(re), Ok(im)) = (re.parse::<f64>(), im.parse::<f64>()) {
                    return Ok(Complex64::new(re, im));
                }
            }
        }
        let im: f64 = stripped.parse().map_err(|_| err())?;
        return Ok(Complex64::new(0.0, im));
    }
    let re: f64 = t.parse().map_err(|_| err())?;
    Ok(Complex64::new(re, 0.0))
}

fn parse_ball_point(text: &str) -> Result<BallPoint> {
    let coords = text
        .split(',')
        .map(parse_complex)
        .collect::<Result<Vec<_>>>()?;
    BallPoint::new(coords)
}

fn parse_symbol(table: &Arc<ClassTable>, spec: &str) -> Result<MultiplierSymbol> {
    if spec == "one" {
        return Ok(MultiplierSymbol::one(table));
    }
    if let Some(rest) = spec.strip_prefix("geometric:") {
        let (re, im) = match rest.split_once(',') {
            Some((re, im)) => (parse_rational(re)?, parse_rational(im)?),
            None => (
                parse_rational(rest)?,
                num::BigRational::from_integer(0.into()),
            ),
        };
        return Ok(MultiplierSymbol::geometric(
            table,
            num::Complex::new(re, im),
        ));
    }
    if let Some(word) = spec.strip_prefix("indicator:") {
        let id = nonzero_class(table, &parse_word(word, table.d())?)?;
        return Ok(MultiplierSymbol::indicator(table, id));
    }
    Err(Error::Invalid(format!(
        "unknown symbol {spec:?}; expected one, geometric:<q>[,<q>], or indicator:<word>"
    )))
}

fn nonzero_class(table: &ClassTable, word: &Word) -> Result<NzClassId> {
    match table.class_of(word)? {
        ClassId::Zero => Err(Error::Invalid(format!(
            "word {word} lies in the zero class"
        ))),
        ClassId::Nonzero(id) => Ok(id),
    }
}

fn rc_json(value: &Rc) -> Value {
    json!({ "re": format_rational(&value.re), "im": format_rational(&value.im) })
}

fn class_json(table: &ClassTable, id: NzClassId, verbose: bool) -> Result<Value> {
    let mut obj = json!({
        "id": id.to_string(),
        "rep": table.representative(id)?.to_string(),
        "size": table.class_size(id)?,
        "zero": false,
    });
    if verbose {
        obj["members"] = Value::Array(
            table
                .members(id)?
                .iter()
                .map(|m| Value::String(m.to_string()))
                .collect(),
        );
    }
    Ok(obj)
}

fn meta(presentation: &Presentation, level: usize, seed: u64, command: &str) -> Value {
    let hash = Sha256::digest(presentation.to_json().as_bytes());
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    json!({
        "command": command,
        "presentation_sha256": hex,
        "d": presentation.d(),
        "level": level,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

struct Report {
    body: Value,
    failed: bool,
}

fn run(cli: &Cli) -> Result<Report> {
    let presentation = load_presentation(&cli.pres)?;
    let guard = word_guard(cli.force);
    let table_at = |level: usize| ClassTable::close_with_limit(&presentation, level, guard);

    let report = match &cli.command {
        Command::Classes { level, verbose } => {
            let table = table_at(level.level)?;
            let mut levels = Vec::new();
            for n in 0..=level.level {
                let mut entries = Vec::new();
                for id in table.classes_at(n) {
                    entries.push(class_json(&table, id, *verbose)?);
                }
                let nonzero: u64 = table
                    .classes_at(n)
                    .map(|id| table.class_size(id).unwrap_or(0))
                    .sum();
                let total = hopfwb::word::words_at_level(table.d(), n);
                if total > nonzero {
                    entries.push(json!({
                        "id": "zero",
                        "rep": Value::Null,
                        "size": total - nonzero,
                        "zero": true,
                    }));
                }
                levels.push(json!({ "level": n, "classes": entries }));
            }
            Report {
                body: json!({
                    "meta": meta(&presentation, level.level, cli.seed, "classes"),
                    "levels": levels,
                }),
                failed: false,
            }
        }

        Command::Multiply { s, t, level } => {
            let ws = parse_word(s, presentation.d())?;
            let wt = parse_word(t, presentation.d())?;
            let needed = ws.len().unwrap_or(0) + wt.len().unwrap_or(0);
            let level = level.unwrap_or(needed).max(needed);
            let table = table_at(level)?;
            let product = table.multiply(table.class_of(&ws)?, table.class_of(&wt)?)?;
            let product_json = match product {
                ClassId::Zero => json!({ "zero": true }),
                ClassId::Nonzero(id) => class_json(&table, id, false)?,
            };
            Report {
                body: json!({
                    "meta": meta(&presentation, level, cli.seed, "multiply"),
                    "s": ws.to_string(),
                    "t": wt.to_string(),
                    "product": product_json,
                }),
                failed: false,
            }
        }

        Command::Matrix { class, level } => {
            let table = table_at(level.level)?;
            let id = nonzero_class(&table, &parse_word(class, table.d())?)?;
            let space = SemigroupSpace::new(&table, level.level)?;
            let op = left_regular(&space, id)?;
            let rows: Vec<Value> = (0..op.dim())
                .map(|r| {
                    Value::Array(
                        (0..op.dim())
                            .map(|c| {
                                let z = op.matrix[(r, c)];
                                json!([z.re, z.im])
                            })
                            .collect(),
                    )
                })
                .collect();
            Report {
                body: json!({
                    "meta": meta(&presentation, level.level, cli.seed, "matrix"),
                    "class": table.representative(id)?.to_string(),
                    "dim": op.dim(),
                    "rows": rows,
                }),
                failed: false,
            }
        }

        Command::Norm { element, level } => {
            let table = table_at(level.level)?;
            let text = std::fs::read_to_string(element)?;
            let e = Element::from_json(&table, &text)?;
            let space = SemigroupSpace::new(&table, level.level)?;
            let norm = operator_norm(&evaluate(&e, &space)?)?;
            Report {
                body: json!({
                    "meta": meta(&presentation, level.level, cli.seed, "norm"),
                    "norm": norm,
                }),
                failed: false,
            }
        }

        Command::CheckOracle { level } => {
            let fast = table_at(level.level)?;
            let slow = ClassTable::oracle_close(&presentation, level.level)?;
            let agree = fast.same_partition(&slow, level.level);
            Report {
                body: json!({
                    "meta": meta(&presentation, level.level, cli.seed, "check-oracle"),
                    "agree": agree,
                }),
                failed: !agree,
            }
        }

        Command::SpectrumScan { max_degree } => {
            let table = table_at(*max_degree)?;
            let found = semigroup_like_scan(&table, *max_degree)?;
            let classes = table.classes_up_to(*max_degree);
            let matches = found.len() == classes.len() + 1
                && found.contains(&Vec::new())
                && classes.iter().all(|id| found.contains(&vec![*id]));
            let found_json: Vec<Value> = found
                .iter()
                .map(|support| {
                    Value::Array(
                        support
                            .iter()
                            .map(|id| {
                                Value::String(
                                    table
                                        .representative(*id)
                                        .map(|w| w.to_string())
                                        .unwrap_or_default(),
                                )
                            })
                            .collect(),
                    )
                })
                .collect();
            Report {
                body: json!({
                    "meta": meta(&presentation, *max_degree, cli.seed, "spectrum-scan"),
                    "semigroup_like_supports": found_json,
                    "matches_class_list": matches,
                }),
                failed: !matches,
            }
        }

        Command::HopfTest { ideal, degree } => {
            let generators = match ideal {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    let file: Value = serde_json::from_str(&text)?;
                    let list = file
                        .get("generators")
                        .and_then(Value::as_array)
                        .ok_or_else(|| Error::Invalid("missing generators array".into()))?;
                    list.iter()
                        .map(|g| {
                            hopfwb::algebra::FreeElement::from_json(
                                presentation.d(),
                                &g.to_string(),
                            )
                        })
                        .collect::<Result<Vec<_>>>()?
                }
                None => presentation_ideal_generators(&presentation)?,
            };
            let report = hopf_ideal_test(&generators, presentation.d(), *degree, guard)?;
            Report {
                body: json!({
                    "meta": meta(&presentation, *degree, cli.seed, "hopf-test"),
                    "degree": report.degree,
                    "coideal": report.coideal_in_degree,
                    "slice_dim": report.slice_dim,
                    "annihilator_dim": report.annihilator_dim,
                    "indicator_sets": report
                        .indicator_sets
                        .iter()
                        .map(|set| {
                            Value::Array(
                                set.iter().map(|w| Value::String(w.to_string())).collect(),
                            )
                        })
                        .collect::<Vec<_>>(),
                    "killed_words": report
                        .killed_words
                        .iter()
                        .map(|w| Value::String(w.to_string()))
                        .collect::<Vec<_>>(),
                }),
                failed: false,
            }
        }

        Command::Autos { check_level, level } => {
            let table = table_at(level.level)?;
            let check = check_level
                .unwrap_or_else(|| hopfwb::aut::default_check_level(&table))
                .min(level.level);
            let autos = hopfwb::aut::enumerate_automorphisms(&table, check)?;
            let group_table: Vec<Vec<usize>> = autos
                .iter()
                .map(|a| {
                    autos
                        .iter()
                        .map(|b| {
                            let c = a.compose(b);
                            autos.iter().position(|x| *x == c).unwrap_or(usize::MAX)
                        })
                        .collect()
                })
                .collect();
            Report {
                body: json!({
                    "meta": meta(&presentation, level.level, cli.seed, "autos"),
                    "check_level": check,
                    "count": autos.len(),
                    "permutations": autos.iter().map(|a| a.as_slice().to_vec()).collect::<Vec<_>>(),
                    "group_table": group_table,
                }),
                failed: false,
            }
        }

        Command::Cesaro { element, k, level } => {
            let table = table_at(level.level)?;
            let text = std::fs::read_to_string(element)?;
            let e = Element::from_json(&table, &text)?;
            let result = e.cesaro(*k);
            let terms: Vec<Value> = result
                .terms()
                .map(|(id, c)| {
                    let mut v = rc_json(c);
                    v["class"] = Value::String(
                        table
                            .representative(*id)
                            .map(|w| w.to_string())
                            .unwrap_or_default(),
                    );
                    v
                })
                .collect();
            Report {
                body: json!({
                    "meta": meta(&presentation, level.level, cli.seed, "cesaro"),
                    "k": k,
                    "terms": terms,
                }),
                failed: false,
            }
        }

        Command::Schur {
            phi,
            level,
            samples,
        } => {
            let table = table_at(level.level)?;
            let symbol = parse_symbol(&table, phi)?;
            let estimate = multiplier_norm_estimate(&symbol, level.level, *samples, cli.seed)?;
            // Certified upper bounds where an explicit factorization exists.
            let certified = if phi == "one" {
                let classes = table.classes_up_to(level.level);
                let unit: BTreeMap<_, _> = classes
                    .iter()
                    .map(|&id| {
                        (
                            id,
                            nalgebra::DVector::from_element(1, Complex64::new(1.0, 0.0)),
                        )
                    })
                    .collect();
                factorization_verify(&unit, &unit, &symbol, level.level, 1e-12)?.bound
            } else if let Some(rest) = phi.strip_prefix("geometric:") {
                let (re, im) = match rest.split_once(',') {
                    Some((re, im)) => (parse_rational(re)?, parse_rational(im)?),
                    None => (
                        parse_rational(rest)?,
                        num::BigRational::from_integer(0.into()),
                    ),
                };
                let lambda = Complex64::new(
                    num::ToPrimitive::to_f64(&re).unwrap_or(f64::NAN),
                    num::ToPrimitive::to_f64(&im).unwrap_or(f64::NAN),
                );
                if lambda.norm() < 1.0 {
                    let (f, g) = geometric_factorization(&table, lambda, level.level);
                    factorization_verify(&f, &g, &symbol, level.level, 1e-12)?.bound
                } else {
                    None
                }
            } else {
                None
            };
            Report {
                body: json!({
                    "meta": meta(&presentation, level.level, cli.seed, "schur"),
                    "phi": phi,
                    "samples": samples,
                    "lower_bound": estimate.lower_bound,
                    "certified_upper": certified,
                }),
                failed: false,
            }
        }

        Command::Char {
            lambda,
            op,
            level,
            mu,
        } => {
            let point = parse_ball_point(lambda)?;
            let space = hopfwb::fock::FockSpace::new(point.d(), level.level);
            let word = parse_word(op, point.d())?;
            let (value, bound) = point_functional_value(&point, &word, &space)?;
            let mut body = json!({
                "meta": meta(&presentation, level.level, cli.seed, "char"),
                "lambda": lambda,
                "op": word.to_string(),
                "value": { "re": value.re, "im": value.im },
                "bound": bound,
            });
            if let Some(mu_text) = mu {
                let mu_point = parse_ball_point(mu_text)?;
                let report = character_convolution_check(&point, &mu_point, &space)?;
                body["convolution_residual"] = json!(report.residual);
                body["convolution_bound"] = json!(report.bound);
            }
            Report {
                body,
                failed: false,
            }
        }

        Command::Convolve { s, t, level } => {
            let table = table_at(level.level)?;
            let cs = nonzero_class(&table, &parse_word(s, table.d())?)?;
            let ct = nonzero_class(&table, &parse_word(t, table.d())?)?;
            let result = convolve(
                &Functional::coefficient(&table, cs),
                &Functional::coefficient(&table, ct),
            )?;
            let terms: Vec<Value> = result
                .exact_terms()?
                .iter()
                .map(|(id, c)| {
                    let mut v = rc_json(c);
                    v["class"] = Value::String(
                        table
                            .representative(*id)
                            .map(|w| w.to_string())
                            .unwrap_or_default(),
                    );
                    v
                })
                .collect();
            Report {
                body: json!({
                    "meta": meta(&presentation, level.level, cli.seed, "convolve"),
                    "s": s,
                    "t": t,
                    "terms": terms,
                }),
                failed: false,
            }
        }

        Command::Drury { d, level } => {
            let commutator = Presentation::commutator(*d);
            let table = ClassTable::close_with_limit(&commutator, level.level, guard)?;
            let report = hopfwb::congruence::abelianization_check(&table)?;
            let rows: Vec<Value> = report
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "rep": row.representative.to_string(),
                        "multidegree": row.multidegree,
                        "size": row.class_size,
                        "multinomial": row.multinomial.to_string(),
                        "inner_product": format_rational(&row.inner_product),
                        "ok": row.ok,
                    })
                })
                .collect();
            Report {
                body: json!({
                    "meta": meta(&commutator, level.level, cli.seed, "drury"),
                    "d": d,
                    "all_ok": report.all_ok,
                    "rows": rows,
                }),
                failed: !report.all_ok,
            }
        }

        Command::VerifyAll { level } => {
            let report = verify_all(&presentation, level.level, cli.seed)?;
            Report {
                body: json!({
                    "meta": meta(&presentation, level.level, cli.seed, "verify-all"),
                    "checks": serde_json::to_value(&report.checks)?,
                    "all_pass": report.all_pass,
                }),
                failed: !report.all_pass,
            }
        }
    };
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report.body).expect("report serializes");
            match &cli.out {
                Some(path) => {
                    if let Err(err) = std::fs::write(path, text + "\n") {
                        eprintln!("error: {err}");
                        return ExitCode::from(2);
                    }
                }
                None => println!("{text}"),
            }
            if report.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
