//! Batch front end: enumeration, evaluation, named verification suites, and
//! the descent derivations, with deterministic text or JSON reports.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use torelli_core::bcj::{self, GeneratorWord};
use torelli_core::cyclecomplex::{self, HMultiset};
use torelli_core::descent::{self, FLinearForm, SystemKind};
use torelli_core::homlattice::HClass;
use torelli_core::stabrep::{self, CommSqDecomposition};
use torelli_core::suites;

#[derive(Parser)]
#[command(
    name = "torelli",
    about = "Exact enumeration, evaluation, and verification for the genus-3 Torelli cell complex",
    version
)]
struct Cli {
    /// Output format for reports
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for every randomized check
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate cell-class families over a vertex class
    Enumerate {
        #[command(subcommand)]
        what: EnumerateCmd,
    },
    /// Evaluate a homomorphism on symbolic input
    Eval {
        #[command(subcommand)]
        what: EvalCmd,
    },
    /// Run a named verification suite, or all of them
    Verify {
        /// Suite name, or "all"
        suite: String,
        /// For d1-identities: a JSON file of instances to check instead of
        /// the built-in ones
        #[arg(long)]
        instances: Option<std::path::PathBuf>,
    },
    /// Weight-descent derivations and the bounded kernel check
    Descent {
        #[command(subcommand)]
        what: DescentCmd,
    },
    /// Machine-readable report over every suite
    Report,
}

#[derive(Args)]
struct XArg {
    /// The fixed primitive class x as a JSON array of 6 integers
    #[arg(long = "x", default_value = "[1,1,1,0,0,0]")]
    x: String,
}

#[derive(Subcommand)]
enum EnumerateCmd {
    /// The 102 maximal multisets over a three-element vertex class
    Supersets {
        /// The vertex class A as a JSON array of three classes
        #[arg(long = "A")]
        a: String,
        #[command(flatten)]
        x: XArg,
    },
    /// The five-element H2' classes containing A (or a larger class C)
    H2prime {
        #[arg(long = "A", conflicts_with = "c")]
        a: Option<String>,
        /// A certified cell class C as a JSON array of classes
        #[arg(long = "C")]
        c: Option<String>,
        #[command(flatten)]
        x: XArg,
    },
}

#[derive(Subcommand)]
enum EvalCmd {
    /// The BCJ value of a generator word (JSON file)
    Sigma {
        #[arg(long)]
        word: std::path::PathBuf,
    },
    /// psi of a commutator/square decomposition (JSON file)
    Psi {
        #[arg(long)]
        decomposition: std::path::PathBuf,
    },
    /// nu_gamma of a tagged generator word (JSON file)
    Nu {
        #[arg(long)]
        word: std::path::PathBuf,
        /// The class gamma as a JSON array of 6 integers
        #[arg(long)]
        gamma: String,
    },
}

#[derive(Subcommand)]
enum DescentCmd {
    /// Replay the sigma-descent step at a vertex class
    Sigma {
        #[arg(long = "A0")]
        a0: String,
        #[command(flatten)]
        x: XArg,
    },
    /// Replay the lambda-descent step at a vertex class
    Lambda {
        #[arg(long = "A0")]
        a0: String,
        /// Linear form as a JSON file {"rows": [[..6 ints..] x5]}; the
        /// canonical form for x when omitted
        #[arg(long = "f")]
        f: Option<std::path::PathBuf>,
        #[command(flatten)]
        x: XArg,
    },
    /// Assemble and solve the bounded linear system
    Kernel {
        #[arg(long, value_enum)]
        system: KernelSystem,
        #[arg(long, default_value_t = 8)]
        bound: u64,
        #[arg(
            long = "A0",
            default_value = "[[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0]]"
        )]
        a0: String,
        #[command(flatten)]
        x: XArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelSystem {
    Sigma,
    Lambda,
}

fn parse_class(s: &str) -> Result<HClass> {
    serde_json::from_str(s).with_context(|| format!("bad class {s:?}"))
}

fn parse_classes(s: &str) -> Result<Vec<HClass>> {
    serde_json::from_str(s).with_context(|| format!("bad class list {s:?}"))
}

fn parse_multiset(s: &str) -> Result<HMultiset> {
    let classes = parse_classes(s)?;
    HMultiset::new(classes).map_err(|e| anyhow!(e))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T> {
    let data =
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&data).with_context(|| format!("cannot parse {}", path.display()))
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Format::Text => println!("{}", text()),
    }
    Ok(())
}

fn multiset_text(m: &HMultiset) -> String {
    format!("{m:?}")
}

fn print_suite(format: Format, results: &[suites::SuiteResult]) -> Result<bool> {
    let all_pass = results.iter().all(|r| r.pass);
    match format {
        Format::Json => {
            let doc = json!({ "suites": results, "pass": all_pass });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Text => {
            for r in results {
                for c in &r.checks {
                    let mark = if c.pass { "pass" } else { "FAIL" };
                    if c.detail.is_empty() {
                        println!("[{mark}] {}: {}", r.suite, c.name);
                    } else {
                        println!("[{mark}] {}: {} ({})", r.suite, c.name, c.detail);
                    }
                }
            }
            println!(
                "{}",
                if all_pass {
                    "all suites passed"
                } else {
                    "FAILURES"
                }
            );
        }
    }
    Ok(all_pass)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Enumerate { what } => {
            match what {
                EnumerateCmd::Supersets { a, x } => {
                    let a = parse_classes(&a)?;
                    let x = parse_class(&x.x)?;
                    let list = cyclecomplex::supersets_in_h(&a, &x)?;
                    emit(
                        cli.format,
                        &json!({ "count": list.len(), "supersets": list }),
                        || {
                            let mut out = String::new();
                            for m in &list {
                                out.push_str(&multiset_text(m));
                                out.push('\n');
                            }
                            out.push_str(&format!("{} multisets", list.len()));
                            out
                        },
                    )?;
                }
                EnumerateCmd::H2prime { a, c, x } => {
                    let x = parse_class(&x.x)?;
                    let list = match (a, c) {
                        (Some(a), None) => {
                            cyclecomplex::h2prime_containing_a(&parse_classes(&a)?, &x)?
                        }
                        (None, Some(c)) => {
                            cyclecomplex::h2prime_containing(&parse_multiset(&c)?, &x)?
                        }
                        _ => bail!("exactly one of --A and --C is required"),
                    };
                    emit(
                        cli.format,
                        &json!({ "count": list.len(), "classes": list }),
                        || {
                            let mut out = String::new();
                            for m in &list {
                                out.push_str(&multiset_text(m));
                                out.push('\n');
                            }
                            out.push_str(&format!("{} classes", list.len()));
                            out
                        },
                    )?;
                }
            }
            Ok(0)
        }
        Command::Eval { what } => {
            match what {
                EvalCmd::Sigma { word } => {
                    let word: GeneratorWord = read_json(&word)?;
                    let value = bcj::sigma_word(&word)?;
                    emit(
                        cli.format,
                        &json!({ "sigma": value, "in_kernel": value.is_zero() }),
                        || format!("sigma = {}", value.hex()),
                    )?;
                }
                EvalCmd::Psi { decomposition } => {
                    let d: CommSqDecomposition = read_json(&decomposition)?;
                    let value = stabrep::psi_m(&d)?;
                    emit(cli.format, &json!({ "psi": u8::from(value) }), || {
                        format!("psi = {}", u8::from(value))
                    })?;
                }
                EvalCmd::Nu { word, gamma } => {
                    let word: GeneratorWord = read_json(&word)?;
                    let gamma = parse_class(&gamma)?;
                    let value = stabrep::nu_on_word(&word, &gamma)?;
                    emit(cli.format, &json!({ "nu": value }), || {
                        format!("nu = {value}")
                    })?;
                }
            }
            Ok(0)
        }
        Command::Verify { suite, instances } => {
            let results = match instances {
                Some(path) => {
                    if suite != "d1-identities" {
                        bail!("--instances applies to the d1-identities suite only");
                    }
                    let instances: Vec<suites::IdentityInstance> = read_json(&path)?;
                    vec![suites::run_d1_identities_with(&instances, cli.seed)?]
                }
                None if suite == "all" => suites::run_all(cli.seed)?,
                None => vec![suites::run_suite(&suite, cli.seed)?],
            };
            let ok = print_suite(cli.format, &results)?;
            Ok(if ok { 0 } else { 1 })
        }
        Command::Descent { what } => match what {
            DescentCmd::Sigma { a0, x } => {
                let a0 = parse_classes(&a0)?;
                let x = parse_class(&x.x)?;
                let report = descent::verify_sigma_descent(&a0, &x)?;
                let ok = report.ok;
                emit(cli.format, &report, || render_derivation(&report))?;
                Ok(if ok { 0 } else { 1 })
            }
            DescentCmd::Lambda { a0, f, x } => {
                let a0 = parse_classes(&a0)?;
                let x = parse_class(&x.x)?;
                let f = match f {
                    Some(path) => {
                        #[derive(serde::Deserialize)]
                        struct Rows {
                            rows: [[i64; 6]; 5],
                        }
                        let rows: Rows = read_json(&path)?;
                        FLinearForm::new(rows.rows, &x)?
                    }
                    None => FLinearForm::canonical(&x)?,
                };
                let report = descent::verify_lambda_descent_case1(&a0, &f, &x)?;
                let ok = report.ok;
                emit(cli.format, &report, || render_derivation(&report))?;
                Ok(if ok { 0 } else { 1 })
            }
            DescentCmd::Kernel {
                system,
                bound,
                a0,
                x,
            } => {
                let a0 = parse_classes(&a0)?;
                let x = parse_class(&x.x)?;
                let system = match system {
                    KernelSystem::Sigma => SystemKind::Sigma,
                    KernelSystem::Lambda => SystemKind::Lambda,
                };
                let report = descent::bounded_kernel_check(system, bound, &a0, &x)?;
                let ok = report.ok;
                emit(cli.format, &report, || {
                    format!(
                        "system {:?} bound {}: {} variables, {} equations, rank {}, \
                         kernel {}, covered {}, forced {} -> {}",
                        report.system,
                        report.bound,
                        report.variables,
                        report.equations_used,
                        report.rank,
                        report.kernel_dim,
                        report.covered,
                        report.forced,
                        if ok { "ok" } else { "NOT FORCED" }
                    )
                })?;
                Ok(if ok { 0 } else { 1 })
            }
        },
        Command::Report => {
            let results = suites::run_all(cli.seed)?;
            let ok = print_suite(Format::Json, &results)?;
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn render_derivation(report: &descent::DerivationReport) -> String {
    let mut out = String::new();
    for s in &report.steps {
        out.push_str(s);
        out.push('\n');
    }
    for t in &report.forced {
        out.push_str(&format!("forced zero: {t:?}\n"));
    }
    for t in &report.unforced {
        out.push_str(&format!("NOT FORCED: {t:?}\n"));
    }
    out.push_str(if report.ok {
        "derivation complete"
    } else {
        "derivation INCOMPLETE"
    });
    out
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
