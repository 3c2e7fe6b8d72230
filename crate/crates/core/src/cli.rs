//! Command-line front end.
//!
//! `check` exits with 0 when the formula holds, 1 when it does not and 2 on
//! any error. Other commands exit with 0 on success and 2 on error; the
//! translation-equivalence experiment exits with 1 if any sample disagrees.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::cegm::{load_model, save_model, Cegm, ModelError};
use crate::formula::{parse_formula, Formula, FormulaError};
use crate::mcheck::{find_witness, label, CheckError, CheckOptions, StrategyMode, SuccessScope};
use crate::sample::{FormulaParams, ModelParams};
use crate::scenarios::{
    gen_referendum_double, gen_referendum_single, gen_threeballot_with, threeballot_infosets, CoercerView,
    DoubleVariant,
};
use crate::succinct::{gen_mn, gen_nnj, run_succinctness, succinctness_csv, SuccinctError, SuccinctnessConfig};
use crate::translate::{check_translation_equivalence, h_to_k, k_to_h, EquivalenceConfig, TranslateError, TranslateOptions, Verdict};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("model: {0}")]
    Model(#[from] ModelError),
    #[error("formula: {0}")]
    Formula(#[from] FormulaError),
    #[error("{0}")]
    Check(#[from] CheckError),
    #[error("translation: {0}")]
    Translate(#[from] TranslateError),
    #[error("{0}")]
    Succinct(#[from] SuccinctError),
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "atlh", version, about = "Model checker for strategic, epistemic and uncertainty properties")]
pub struct Cli {
    /// `ir` (uniform) or `Ir` (perfect recall of the current state only).
    #[arg(long, global = true, default_value = "ir")]
    pub strategy_mode: StrategyMode,
    /// `objective` or `subjective` success of strategies.
    #[arg(long, global = true, default_value = "objective")]
    pub scope: SuccessScope,
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Cap on enumerated strategies and on the length of translated formulas.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap_nodes: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    H2k,
    K2h,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Fig1,
    M1,
    M2,
    Threeballot,
    #[value(name = "Mn")]
    Mn,
    #[value(name = "Nnj")]
    Nnj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum View {
    ReceiptBoard,
    Full,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Succinctness,
    TranslationEquivalence,
    ThreeballotTable,
}

#[derive(Debug, clap::Args)]
pub struct FormulaArgs {
    /// Formula text.
    #[arg(long)]
    pub formula: Option<String>,
    /// File holding the formula.
    #[arg(long)]
    pub formula_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula on a model.
    Check {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        formula: FormulaArgs,
        /// State to evaluate at; defaults to the initial state.
        #[arg(long)]
        state: Option<String>,
        /// Report every state instead of a single one.
        #[arg(long, conflicts_with = "state")]
        all_states: bool,
        /// Print the truth set of every subformula.
        #[arg(long)]
        dump_labels: bool,
        /// Enumerate strategies even where the game can be solved directly.
        #[arg(long)]
        force_enumeration: bool,
    },
    /// Translate between uncertainty and knowledge operators.
    Translate {
        #[arg(long, value_enum)]
        dir: Direction,
        #[command(flatten)]
        formula: FormulaArgs,
    },
    /// Write a generated model.
    Gen {
        #[arg(value_enum)]
        generator: Generator,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        j: Option<usize>,
        /// Coercer view for the ThreeBallot model.
        #[arg(long, value_enum, default_value_t = View::ReceiptBoard)]
        view: View,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment.
    Experiment {
        #[arg(value_enum)]
        experiment: Experiment,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        /// Run the formula size game up to this `n` (0 skips it).
        #[arg(long, default_value_t = 0)]
        fsg_up_to: usize,
        /// Run the minimal formula search up to this `n` (0 skips it).
        #[arg(long, default_value_t = 0)]
        mel_up_to: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status. Diagnostics go to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}{e}", error_prefix());
            2
        }
    }
}

fn error_prefix() -> &'static str {
    match std::env::var("ATLH_MC_COLOR").as_deref() {
        Ok("1") => "\x1b[31merror:\x1b[0m ",
        _ => "error: ",
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn read_formula(args: &FormulaArgs) -> Result<Formula, CliError> {
    let text = match (&args.formula, &args.formula_file) {
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give the formula either inline (--formula) or from a file (--formula-file), not both".into(),
            ))
        }
        (Some(t), None) => t.clone(),
        (None, Some(p)) => read(p)?,
        (None, None) => return Err(CliError::Usage("missing --formula or --formula-file".into())),
    };
    Ok(parse_formula(text.trim())?)
}

fn check_options(cli: &Cli, force_enumeration: bool) -> CheckOptions {
    let mut opts = CheckOptions {
        strategy_mode: cli.strategy_mode,
        success_scope: cli.scope,
        threads: cli.threads.max(1),
        force_enumeration,
        ..CheckOptions::default()
    };
    if let Some(cap) = cli.cap_nodes {
        opts.strategy_cap = cap as u128;
    }
    opts
}

fn translate_options(cli: &Cli) -> TranslateOptions {
    let mut opts = TranslateOptions::default();
    if let Some(cap) = cli.cap_nodes {
        opts.max_length = cap as usize;
    }
    opts
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Check {
            model,
            formula,
            state,
            all_states,
            dump_labels,
            force_enumeration,
        } => {
            let m = load_model(&read(model)?)?;
            let f = read_formula(formula)?;
            let states: Vec<usize> = match (state, all_states) {
                (_, true) => (0..m.num_states()).collect(),
                (Some(s), false) => vec![m
                    .state_index(s)
                    .ok_or_else(|| CheckError::UnknownState(s.clone()))?],
                (None, false) => vec![m.initial()],
            };
            cmd_check(cli, &m, &f, &states, *dump_labels, *force_enumeration, out)
        }
        Command::Translate { dir, formula } => {
            let f = read_formula(formula)?;
            let g = match dir {
                Direction::H2k => h_to_k(&f, &translate_options(cli))?,
                Direction::K2h => k_to_h(&f),
            };
            match cli.format {
                OutputFormat::Text => {
                    writeln!(out, "{g}")?;
                    writeln!(out, "length: {} -> {}", f.length(), g.length())?;
                }
                OutputFormat::Csv => {
                    writeln!(out, "input_length,output_length,output")?;
                    writeln!(out, "{},{},\"{}\"", f.length(), g.length(), g.to_string().replace('"', "\"\""))?;
                }
                OutputFormat::Json => {
                    let line = json!({
                        "input": f.to_string(),
                        "output": g.to_string(),
                        "input_length": f.length(),
                        "output_length": g.length(),
                    });
                    writeln!(out, "{line}")?;
                }
            }
            Ok(0)
        }
        Command::Gen {
            generator,
            n,
            j,
            view,
            out: path,
        } => {
            let need = |v: Option<usize>, flag: &str| {
                v.ok_or_else(|| CliError::Usage(format!("generator needs --{flag}")))
            };
            let m = match generator {
                Generator::Fig1 => gen_referendum_single(),
                Generator::M1 => gen_referendum_double(DoubleVariant::M1),
                Generator::M2 => gen_referendum_double(DoubleVariant::M2),
                Generator::Threeballot => gen_threeballot_with(match view {
                    View::ReceiptBoard => CoercerView::ReceiptBoard,
                    View::Full => CoercerView::FullTerminal,
                    View::Identity => CoercerView::Identity,
                }),
                Generator::Mn => gen_mn(need(*n, "n")?)?,
                Generator::Nnj => gen_nnj(need(*n, "n")?, need(*j, "j")?)?,
            };
            let text = save_model(&m);
            match path {
                Some(p) => fs::write(p, text).map_err(|e| CliError::Io {
                    path: p.display().to_string(),
                    message: e.to_string(),
                })?,
                None => write!(out, "{text}")?,
            }
            Ok(0)
        }
        Command::Experiment {
            experiment,
            nmax,
            fsg_up_to,
            mel_up_to,
            samples,
        } => match experiment {
            Experiment::Succinctness => {
                let cfg = SuccinctnessConfig {
                    n_max: *nmax,
                    fsg_up_to: *fsg_up_to,
                    mel_up_to: *mel_up_to,
                    translate: translate_options(cli),
                    ..SuccinctnessConfig::default()
                };
                let rows = run_succinctness(&cfg)?;
                match cli.format {
                    OutputFormat::Json => {
                        for r in &rows {
                            let line = json!({
                                "n": r.n,
                                "len_phi_n": r.len_phi_n,
                                "len_translated": r.len_translated,
                                "fsg_min": r.fsg_min,
                                "mel_min": r.mel_min,
                                "wallclock_ms": r.wallclock_ms as u64,
                            });
                            writeln!(out, "{line}")?;
                        }
                    }
                    _ => write!(out, "{}", succinctness_csv(&rows))?,
                }
                Ok(0)
            }
            Experiment::TranslationEquivalence => {
                let cfg = EquivalenceConfig {
                    samples: *samples,
                    root_seed: cli.seed,
                    model: ModelParams::default(),
                    formula: FormulaParams::default(),
                    check: check_options(cli, false),
                    translate: translate_options(cli),
                };
                let reports = check_translation_equivalence(&cfg);
                let bad = reports.iter().filter(|r| !r.is_ok()).count();
                match cli.format {
                    OutputFormat::Text => {
                        for r in &reports {
                            writeln!(out, "{r}")?;
                        }
                        writeln!(out, "samples={} failures={bad}", reports.len())?;
                    }
                    OutputFormat::Csv => {
                        writeln!(out, "seed,states,formula,verdict")?;
                        for r in &reports {
                            let verdict = r.to_string();
                            let verdict = verdict.rsplit_once("verdict=").map(|x| x.1).unwrap_or("");
                            writeln!(
                                out,
                                "{},{},\"{}\",{}",
                                r.seed,
                                r.states,
                                r.formula.replace('"', "\"\""),
                                verdict
                            )?;
                        }
                    }
                    OutputFormat::Json => {
                        for r in &reports {
                            let (verdict, detail) = match &r.verdict {
                                Verdict::Ok => ("ok", None),
                                Verdict::Mismatch { state, direction } => {
                                    ("mismatch", Some(format!("{direction}@{state}")))
                                }
                                Verdict::Error(e) => ("error", Some(e.clone())),
                            };
                            let line = json!({
                                "seed": r.seed,
                                "states": r.states,
                                "formula": r.formula,
                                "verdict": verdict,
                                "detail": detail,
                            });
                            writeln!(out, "{line}")?;
                        }
                    }
                }
                Ok(if bad == 0 { 0 } else { 1 })
            }
            Experiment::ThreeballotTable => {
                let table = threeballot_infosets();
                match cli.format {
                    OutputFormat::Text => writeln!(out, "{table}")?,
                    OutputFormat::Csv => write!(out, "{}", table.csv())?,
                    OutputFormat::Json => {
                        for r in &table.rows {
                            let sets: Vec<Vec<&str>> = r
                                .sorted_infosets()
                                .into_iter()
                                .map(|s| s.iter().map(|v| v.code()).collect())
                                .collect();
                            let ballots: Vec<String> = r.ballots.ballots().iter().map(|b| b.to_string()).collect();
                            let line = json!({
                                "vote": r.vote.code(),
                                "ballot_set": ballots,
                                "receipt": r.receipt.to_string(),
                                "infosets": sets,
                            });
                            writeln!(out, "{line}")?;
                        }
                    }
                }
                Ok(0)
            }
        },
    }
}

fn cmd_check(
    cli: &Cli,
    m: &Cegm,
    f: &Formula,
    states: &[usize],
    dump_labels: bool,
    force_enumeration: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let opts = check_options(cli, force_enumeration);
    let labeling = label(m, f, &opts)?;
    let root = labeling.root();
    let mut all = true;
    if cli.format == OutputFormat::Csv {
        writeln!(out, "state,holds")?;
    }
    for &q in states {
        let holds = root.contains(q);
        all &= holds;
        let witness = if holds {
            find_witness(m, q, f, &labeling, &opts)?.map(|s| {
                s.describe(m)
                    .into_iter()
                    .filter(|(agent, state, _)| {
                        let a = m.agent_index(agent).expect("agent of the model");
                        let q = m.state_index(state).expect("state of the model");
                        m.avail(a, q).len() > 1
                    })
                    .collect::<Vec<_>>()
            })
        } else {
            None
        };
        let name = &m.states()[q];
        match cli.format {
            OutputFormat::Text => {
                writeln!(out, "{name}: {holds}")?;
                if let Some(w) = &witness {
                    writeln!(out, "witness:")?;
                    for (agent, state, action) in w {
                        writeln!(out, "  {agent} @ {state} -> {action}")?;
                    }
                }
            }
            OutputFormat::Csv => writeln!(out, "{name},{holds}")?,
            OutputFormat::Json => {
                let w = witness.map(|w| {
                    w.into_iter()
                        .map(|(agent, state, action)| json!({"agent": agent, "state": state, "action": action}))
                        .collect::<Vec<_>>()
                });
                let line = json!({"state": name, "formula": f.to_string(), "holds": holds, "witness": w});
                writeln!(out, "{line}")?;
            }
        }
    }
    if dump_labels {
        for (g, set) in labeling.iter() {
            let names = m.state_names(set);
            match cli.format {
                OutputFormat::Json => writeln!(out, "{}", json!({"subformula": g.to_string(), "states": names}))?,
                OutputFormat::Csv => writeln!(out, "\"{}\",{}", g.to_string().replace('"', "\"\""), names.join(" "))?,
                OutputFormat::Text => writeln!(out, "{g}: {{{}}}", names.join(", "))?,
            }
        }
    }
    Ok(if all { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("atlh").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn translate_k2h() {
        let (code, out, _) = run_str(&["translate", "--dir", "k2h", "--formula", "K[a] p"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().next(), Some("p & H[a] = log(1) {p}"));
    }

    #[test]
    fn bad_generator_parameter() {
        let (code, _, err) = run_str(&["gen", "Nnj", "--n", "2", "--j", "0"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error: "));
    }

    #[test]
    fn both_formula_sources_rejected() {
        let (code, _, err) = run_str(&[
            "translate",
            "--dir",
            "k2h",
            "--formula",
            "p",
            "--formula-file",
            "/nonexistent",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("not both"));
    }
}
