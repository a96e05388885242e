//! Command-line front end. Exit codes: 0 on success, 1 when the requested
//! artifact is refused (invalid certificate, satisfiable input to
//! extraction, engine disagreement, fuzz discrepancies), 2 on usage or
//! input errors.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};

use crate::category::{Category, RuleMask, UniverseConfig};
use crate::certificate::{
    check_certificate, extract_certificate, guided_category, missing_replays, Certificate,
};
use crate::error::{Error, Result};
use crate::harness::{budget_secs, run_diff, GenConfig};
use crate::interp::find_model;
use crate::syntax::{parse_concept, Concept, Ontology};
use crate::tableau::{decide_sat_with, entails_with, TableauConfig};

#[derive(Parser)]
#[command(
    name = "alcat",
    version,
    about = "ALC reasoning by tableau and by arrow saturation, cross-checked"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Tableau,
    Category,
    Both,
}

#[derive(Subcommand)]
pub enum Command {
    /// Decide satisfiability of a concept under an ontology
    Check {
        /// Concept expression, e.g. "(and A (not A))"
        #[arg(long)]
        concept: String,
        /// Ontology file (concepts:/roles: header, one axiom per line)
        #[arg(long)]
        onto: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        /// Let a certificate assemble the categorical universe when the
        /// tableau refutes the concept
        #[arg(long)]
        guided: bool,
        /// Print one line per tableau rule application
        #[arg(long)]
        trace: bool,
    },
    /// Decide whether the ontology entails a subsumption between two concepts
    Entail {
        x: String,
        y: String,
        #[arg(long)]
        onto: PathBuf,
    },
    /// Refute a concept and write the derivation as a JSON certificate
    ExtractCert {
        #[arg(long)]
        concept: String,
        #[arg(long)]
        onto: PathBuf,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file step by step
    VerifyCert {
        cert: PathBuf,
        /// Validate axiom steps and the hash against this ontology
        #[arg(long)]
        onto: Option<PathBuf>,
        /// Also replay every step in the certificate-guided universe
        #[arg(long)]
        replay: bool,
    },
    /// Render the saturated universe of a concept as GraphViz DOT
    ExportDot {
        #[arg(long)]
        concept: String,
        #[arg(long)]
        onto: PathBuf,
        /// Rule mask: "full", "weak-conjunction", "weak-negation", or a
        /// comma-separated rule list
        #[arg(long, default_value = "full")]
        sublogic: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate seeded instances and cross-check every engine
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        names: usize,
        #[arg(long, default_value_t = 2)]
        roles: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        axioms: usize,
        /// Emit the full report as JSON instead of the summary table
        #[arg(long)]
        json: bool,
    },
    /// Search for a bounded model of a concept
    Model {
        #[arg(long)]
        concept: String,
        #[arg(long)]
        onto: PathBuf,
        /// Largest domain size to try
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Print the witness interpretation as JSON
        #[arg(long)]
        emit_model: bool,
    },
}

fn load_ontology(path: &PathBuf) -> Result<Ontology> {
    Ontology::parse(&std::fs::read_to_string(path)?)
}

fn deadline_config() -> TableauConfig {
    TableauConfig {
        deadline: Some(Instant::now() + Duration::from_secs(budget_secs())),
        ..TableauConfig::default()
    }
}

fn verdict_word(unsat: bool) -> &'static str {
    if unsat {
        "unsat"
    } else {
        "sat"
    }
}

/// Print to stdout, treating a closed pipe as a normal early exit.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
    }
}

fn emitln(text: &str) {
    emit(text);
    emit("\n");
}

fn write_or_print(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => emitln(text),
    }
    Ok(())
}

/// Execute a parsed invocation and return the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Check { concept, onto, mode, guided, trace } => {
            let onto = load_ontology(&onto)?;
            let c0 = parse_concept(&concept, onto.signature())?;
            let tcfg = deadline_config();
            let tableau_unsat = if mode != Mode::Category {
                let verdict = decide_sat_with(&c0, &onto, &tcfg)?;
                if trace {
                    emit(&verdict.meta.render_trace());
                }
                Some(!verdict.satisfiable)
            } else {
                None
            };
            let cat_unsat = if mode != Mode::Tableau {
                let u = if guided && tableau_unsat == Some(true) {
                    let cert = extract_certificate(&c0, &onto, &tcfg)?;
                    guided_category(&cert, &onto)?.has_arrow(&c0, &Concept::Bot)?
                } else {
                    let mut cat =
                        Category::build_universe(&c0, &onto, &UniverseConfig::default())?;
                    cat.saturate();
                    cat.has_arrow(&c0, &Concept::Bot)?
                };
                Some(u)
            } else {
                None
            };
            match (tableau_unsat, cat_unsat) {
                (Some(t), Some(c)) => {
                    emitln(&format!("{} / {}", verdict_word(t), verdict_word(c)));
                    // The unguided universe staying silent on a refuted
                    // concept is the documented incompleteness gap; an
                    // arrow to bottom for a satisfiable one never is.
                    if c && !t {
                        eprintln!("disagreement: saturation refutes a satisfiable concept");
                        return Ok(1);
                    }
                    if t && !c && guided {
                        eprintln!("disagreement: guided universe misses the refutation");
                        return Ok(1);
                    }
                }
                (Some(t), None) => emitln(verdict_word(t)),
                (None, Some(c)) => emitln(verdict_word(c)),
                (None, None) => unreachable!("some engine always runs"),
            }
            Ok(0)
        }
        Command::Entail { x, y, onto } => {
            let onto = load_ontology(&onto)?;
            let cx = parse_concept(&x, onto.signature())?;
            let cy = parse_concept(&y, onto.signature())?;
            let holds = entails_with(&onto, &cx, &cy, &deadline_config())?;
            emitln(if holds { "yes" } else { "no" });
            Ok(0)
        }
        Command::ExtractCert { concept, onto, out } => {
            let onto = load_ontology(&onto)?;
            let c0 = parse_concept(&concept, onto.signature())?;
            match extract_certificate(&c0, &onto, &deadline_config()) {
                Ok(cert) => {
                    write_or_print(out.as_ref(), &cert.to_json())?;
                    Ok(0)
                }
                Err(Error::Satisfiable(msg)) => {
                    eprintln!("{msg}");
                    Ok(1)
                }
                Err(e) => Err(e),
            }
        }
        Command::VerifyCert { cert, onto, replay } => {
            let cert = Certificate::from_json(&std::fs::read_to_string(&cert)?)?;
            let onto = onto.as_ref().map(load_ontology).transpose()?;
            if let Err(e) = check_certificate(&cert, onto.as_ref()) {
                eprintln!("invalid certificate: {e}");
                return Ok(1);
            }
            if replay {
                let Some(onto) = onto.as_ref() else {
                    return Err(Error::Malformed(
                        "--replay needs --onto to build the universe".into(),
                    ));
                };
                let cat = guided_category(&cert, onto)?;
                let missing = missing_replays(&cert, &cat)?;
                if !missing.is_empty() {
                    eprintln!("saturation cannot replay steps {missing:?}");
                    return Ok(1);
                }
                if !cat.has_arrow(&cert.concept, &Concept::Bot)? {
                    eprintln!("saturation misses the final arrow");
                    return Ok(1);
                }
                emitln(&format!("certificate ok ({} steps, replay complete)", cert.steps.len()));
            } else {
                emitln(&format!("certificate ok ({} steps)", cert.steps.len()));
            }
            Ok(0)
        }
        Command::ExportDot { concept, onto, sublogic, out } => {
            let onto = load_ontology(&onto)?;
            let c0 = parse_concept(&concept, onto.signature())?;
            let cfg = UniverseConfig { mask: RuleMask::parse(&sublogic)?, ..Default::default() };
            let mut cat = Category::build_universe(&c0, &onto, &cfg)?;
            cat.saturate();
            write_or_print(out.as_ref(), &cat.export_dot())?;
            Ok(0)
        }
        Command::Fuzz { seed, count, names, roles, depth, axioms, json } => {
            let cfg = GenConfig { seed, count, names, roles, depth, axioms, ..Default::default() };
            let report = run_diff(&cfg);
            if json {
                emitln(&report.to_json());
            } else {
                emit(&report.render_table());
            }
            Ok(if report.has_discrepancies() { 1 } else { 0 })
        }
        Command::Model { concept, onto, max_size, emit_model } => {
            let onto = load_ontology(&onto)?;
            let c0 = parse_concept(&concept, onto.signature())?;
            match find_model(&c0, &onto, max_size)? {
                Some(m) => {
                    emitln(&format!("model with {} elements", m.domain_size()));
                    if emit_model {
                        emitln(&m.to_json());
                    }
                }
                None => emitln(&format!("no model within {max_size} elements")),
            }
            Ok(0)
        }
    }
}
