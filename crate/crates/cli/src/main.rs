//! `mzspace`: JSON front end for the library.
//!
//! Exit codes: 0 affirmative verdict, 1 negative verdict (with witness),
//! 2 error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mzspace::census::{debondt_sample, ms_census, oracle_compare, oracle_compare_sampled, SCHEMA_VERSION};
use mzspace::classify2::{base_change_demo, predicted_maximal};
use mzspace::constructions::{block_triangular, chain_extension, corner_family, TwoBlockFamily};
use mzspace::literal::{field_from_value, field_to_value, matrix_from_value, scalar_from_literal, subspace_from_value};
use mzspace::maximality::{certify_maximal, maximality_witness, CertificationMode};
use mzspace::mscore::{ms_by_definition, ms_by_idempotent_criterion, MsStatus, DEFAULT_BUDGET};
use mzspace::{ExactMatrix, Field, Scalar};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "mzspace", version, about = "Mathieu-Zhao subspaces of matrix algebras over exact fields")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Upper bound on elements or subspaces any single scan may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CertifyMethod {
    /// Scan for a nonzero idempotent.
    Criterion,
    /// Check the definition directly (small cases only).
    Definition,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyName {
    /// Block-triangular construction from ranks and sigmas.
    Ex22,
    /// Chain extension of a block-triangular construction.
    Ex23,
    /// Two-block family with block sizes n1, n2, n3.
    Ex24,
    /// Corner family (n, r).
    Cor26,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether a subspace literal is an MS.
    Certify {
        /// Subspace literal file, or `-` for stdin.
        #[arg(long)]
        subspace: String,
        #[arg(long, value_enum, default_value_t = CertifyMethod::Criterion)]
        method: CertifyMethod,
    },
    /// Build a named construction with its structural certificate.
    Construct {
        #[arg(long, value_enum)]
        family: FamilyName,
        /// JSON object, or `@file`.
        #[arg(long)]
        params: String,
    },
    /// Witness maximality of a two-block family member.
    Maximal {
        /// JSON object (ex24 or cor26 keys), or `@file`.
        #[arg(long)]
        family_params: String,
        /// Single direction as a matrix literal (JSON or `@file`).
        #[arg(long, conflicts_with = "exhaustive")]
        direction: Option<String>,
        /// Every extension direction (finite fields). Without this or
        /// `--direction`, a spot check is run.
        #[arg(long)]
        exhaustive: bool,
    },
    /// MS census of every subspace of M_n(F_q).
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        compare_classification: bool,
    },
    /// Compare the definition checker with the idempotent criterion.
    OracleCompare {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Check this many seeded random subspaces instead of all of them.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Predicted maximal MSs of M_2(F_q) against the census.
    Classify2 {
        #[arg(long = "field")]
        q: u64,
    },
    /// Base change of an MS from F_p (or Q with p = 0) to a quadratic extension.
    DemoBasechange {
        #[arg(long)]
        p: u64,
        /// Integer or `num/den`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Random codimension-(n-1) subspaces outside the trace-zero hyperplane.
    DebondtSample {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        q: u64,
    },
}

struct Report {
    body: Value,
    affirmative: bool,
}

fn read_source(arg: &str) -> Result<String> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))
    }
}

/// Inline JSON or `@path`.
fn json_arg(arg: &str) -> Result<Value> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read_source(path)?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).with_context(|| format!("parsing JSON {arg:?}"))
}

fn finite_field(q: u64) -> Result<Field> {
    Field::prime(q).map_err(|e| anyhow!("--q {q}: {e} (only prime orders are enumerated)"))
}

struct Params<'a> {
    v: &'a Value,
    field: Field,
}

impl<'a> Params<'a> {
    fn new(v: &'a Value) -> Result<Self> {
        if !v.is_object() {
            bail!("parameters must be a JSON object");
        }
        let field = field_from_value(v).context("field keys p/k/modulus")?;
        Ok(Params { v, field })
    }

    fn get(&self, key: &str) -> Result<&'a Value> {
        self.v.get(key).ok_or_else(|| anyhow!("missing parameter {key:?}"))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        self.get(key)?
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| anyhow!("{key:?} must be a non-negative integer"))
    }

    fn usizes(&self, key: &str) -> Result<Vec<usize>> {
        self.get(key)?
            .as_array()
            .ok_or_else(|| anyhow!("{key:?} must be an array"))?
            .iter()
            .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| anyhow!("{key:?} entries must be integers")))
            .collect()
    }

    fn scalar(&self, key: &str) -> Result<Scalar> {
        Ok(scalar_from_literal(&self.field, self.get(key)?)?)
    }

    fn scalars(&self, key: &str) -> Result<Vec<Scalar>> {
        self.get(key)?
            .as_array()
            .ok_or_else(|| anyhow!("{key:?} must be an array"))?
            .iter()
            .map(|x| Ok(scalar_from_literal(&self.field, x)?))
            .collect()
    }

    fn matrix(&self, key: &str) -> Result<ExactMatrix> {
        let v = self.get(key)?;
        let v = if v.is_array() { json!({ "rows": v }) } else { v.clone() };
        Ok(matrix_from_value(&v, Some(&self.field))?)
    }

    fn two_block(&self) -> Result<TwoBlockFamily> {
        let (s1, s2) = (self.scalar("s1")?, self.scalar("s2")?);
        if self.v.get("n1").is_some() {
            Ok(TwoBlockFamily::standard(
                self.usize("n1")?,
                self.usize("n2")?,
                self.usize("n3")?,
                s1,
                s2,
                &self.field,
            )?)
        } else {
            Ok(corner_family(self.usize("n")?, self.usize("r")?, s1, s2, &self.field)?)
        }
    }
}

fn envelope(field: &Field, mut body: Value) -> Value {
    let obj = body.as_object_mut().expect("reports are objects");
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("field".into(), field_to_value(field));
    body
}

fn run(cli: &Cli) -> Result<Report> {
    let budget = cli.budget;
    Ok(match &cli.command {
        Command::Certify { subspace, method } => {
            let v: Value = serde_json::from_str(&read_source(subspace)?).context("parsing subspace literal")?;
            let s = subspace_from_value(&v)?;
            let verdict = match method {
                CertifyMethod::Criterion => ms_by_idempotent_criterion(&s, budget)?,
                CertifyMethod::Definition => ms_by_definition(&s, budget)?,
            };
            Report {
                affirmative: verdict.status.is_ms(),
                body: envelope(s.field(), json!({ "subspace": s, "verdict": verdict })),
            }
        }
        Command::Construct { family, params } => {
            let raw = json_arg(params)?;
            let p = Params::new(&raw)?;
            let body = match family {
                FamilyName::Ex22 => {
                    let c = block_triangular(&p.usizes("ranks")?, &p.scalars("sigmas")?, &p.field)?;
                    json!({ "family": "ex22", "construction": c, "verdict": c.certificate.verdict(&c.subspace) })
                }
                FamilyName::Ex23 => {
                    let base = block_triangular(&p.usizes("ranks")?, &p.scalars("sigmas")?, &p.field)?;
                    let ext = chain_extension(&base, &p.matrix("u")?, &p.matrix("w")?)?;
                    json!({ "family": "ex23", "base": base, "extension": ext })
                }
                FamilyName::Ex24 | FamilyName::Cor26 => {
                    let fam = p.two_block()?;
                    let cert = fam.certify()?;
                    json!({
                        "family": if matches!(family, FamilyName::Ex24) { "ex24" } else { "cor26" },
                        "subspace": fam.subspace,
                        "lambda": fam.lambda,
                        "ranks": fam.ranks,
                        "certificate": cert,
                        "verdict": cert.verdict(&fam.subspace),
                    })
                }
            };
            Report {
                affirmative: true,
                body: envelope(&p.field, body),
            }
        }
        Command::Maximal {
            family_params,
            direction,
            exhaustive,
        } => {
            let raw = json_arg(family_params)?;
            let p = Params::new(&raw)?;
            let fam = p.two_block()?;
            let body = match direction {
                Some(d) => {
                    let w = matrix_from_value(&json_arg(d)?, Some(&p.field))?;
                    json!({ "subspace": fam.subspace, "witness": maximality_witness(&fam, &w)? })
                }
                None => {
                    let mode = if *exhaustive {
                        CertificationMode::Exhaustive
                    } else {
                        CertificationMode::SpotCheck
                    };
                    let cert = certify_maximal(&fam, mode, budget)?;
                    json!({ "subspace": fam.subspace, "certificate": cert })
                }
            };
            Report {
                affirmative: true,
                body: envelope(&p.field, body),
            }
        }
        Command::Census {
            n,
            q,
            compare_classification,
        } => {
            let field = finite_field(*q)?;
            let r = ms_census(*n, &field, *compare_classification, budget)?;
            let exact = r.classification.as_ref().is_none_or(|c| c.exact);
            Report {
                affirmative: r.counts_match_gaussian && r.heredity_holds && exact,
                body: serde_json::to_value(&r)?,
            }
        }
        Command::OracleCompare { n, q, samples, seed } => {
            let field = finite_field(*q)?;
            let r = match samples {
                Some(k) => oracle_compare_sampled(*n, &field, *k, *seed, budget)?,
                None => oracle_compare(*n, &field, budget)?,
            };
            Report {
                affirmative: r.agreement,
                body: serde_json::to_value(&r)?,
            }
        }
        Command::Classify2 { q } => {
            let field = finite_field(*q)?;
            let predicted = predicted_maximal(&field)?;
            let census = ms_census(2, &field, true, budget)?;
            let comparison = census.classification.expect("requested");
            Report {
                affirmative: comparison.exact,
                body: envelope(&field, json!({ "predicted": predicted, "comparison": comparison })),
            }
        }
        Command::DemoBasechange { p, s } => {
            let field = if *p == 0 { Field::rationals() } else { Field::prime(*p)? };
            let s = scalar_from_literal(&field, &Value::String(s.clone()))?;
            let demo = base_change_demo(&field, &s, budget)?;
            Report {
                affirmative: demo.base_verdict.status == MsStatus::MsProper
                    && demo.extension_verdict.status == MsStatus::NotMs,
                body: envelope(&field, demo.to_json()),
            }
        }
        Command::DebondtSample { samples, seed, n, q } => {
            let field = finite_field(*q)?;
            let r = debondt_sample(&field, *n, *samples, *seed, budget)?;
            Report {
                affirmative: r.counterexamples.is_empty(),
                body: serde_json::to_value(&r)?,
            }
        }
    })
}

fn emit(cli: &Cli, body: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(body)?;
    text.push('\n');
    match &cli.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|r| emit(&cli, &r.body).map(|_| r.affirmative)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
