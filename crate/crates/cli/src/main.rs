//! Command-line harness for the step checker and mistake diagnoser.
//!
//! Four subcommands: `check` one step from flags, `batch` a line-delimited
//! corpus file, `generate` labeled mistake corpora, and an interactive
//! `repl`. Reports are printed as readable text by default and as
//! line-delimited JSON with `--json`; exit codes partition the outcome
//! (0 verified, 3 diagnosed, 4 unknown, 1 input error).

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use misstep_core::corpus::{generate_corpus, record_seed, StepRecord};
use misstep_core::pipeline::{diagnose_step, ExerciseConfig, StepOutcome, StepReport};
use misstep_core::sound_atp::{Step, VerifiedBy};
use misstep_core::syntax::{parse_formula, Position};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "misstep", version, about = "Check proof steps and diagnose mistakes")]
struct Cli {
    /// Exercise configuration file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Emit machine-readable JSON instead of readable text.
    #[arg(long, global = true)]
    json: bool,

    /// Override the evaluation seed from the configuration.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one proof step.
    Check {
        /// A premise formula; repeat the flag for several premises.
        #[arg(long = "premise", value_name = "FORMULA")]
        premises: Vec<String>,

        /// The claimed formula to check against the premises.
        #[arg(long, value_name = "FORMULA")]
        claim: String,

        /// Record id echoed into the report.
        #[arg(long, default_value = "step")]
        id: String,
    },

    /// Check every record of a line-delimited corpus file.
    Batch {
        /// Corpus file: one JSON record per line.
        corpus: PathBuf,
    },

    /// Generate a labeled single-fault corpus for one mistake index.
    Generate {
        /// Rule index name (a fallacy, manipulation, or type rule).
        rule: String,

        /// Number of records.
        count: usize,

        /// Output path; standard output when omitted.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },

    /// Read steps interactively and print feedback.
    Repl,
}

/// One report line; field order is fixed for byte-stable JSON output.
#[derive(Serialize)]
struct ReportRecord {
    id: String,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule_index: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    position: Option<Position>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bindings: Option<BTreeMap<String, String>>,
    message: String,
    caveats: Vec<String>,
    alternatives: Vec<Alternative>,
}

#[derive(Serialize)]
struct Alternative {
    rule_index: String,
    position: Position,
    bindings: BTreeMap<String, String>,
    message: String,
}

#[derive(Serialize)]
struct BatchSummary {
    records: usize,
    malformed: usize,
    verified: usize,
    diagnosed: usize,
    unknown: usize,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    accuracy: BTreeMap<String, RuleAccuracy>,
}

#[derive(Default, Serialize)]
struct RuleAccuracy {
    total: usize,
    primary: usize,
    among_alternatives: usize,
    missed: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            ExerciseConfig::from_toml_str(&text)
                .with_context(|| format!("loading config {}", path.display()))?
        }
        None => ExerciseConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.eval.seed = seed;
    }

    match cli.command {
        Command::Check {
            premises,
            claim,
            id,
        } => cmd_check(&premises, &claim, &id, &config, cli.json),
        Command::Batch { corpus } => cmd_batch(&corpus, &config, cli.json),
        Command::Generate { rule, count, out } => {
            cmd_generate(&rule, count, config.eval.seed, out.as_deref())
        }
        Command::Repl => cmd_repl(&config, cli.json),
    }
}

fn parse_step(premises: &[String], claim: &str) -> Result<Step> {
    Ok(Step {
        premises: premises
            .iter()
            .map(|p| parse_formula(p).with_context(|| format!("parsing premise {p:?}")))
            .collect::<Result<_>>()?,
        claim: parse_formula(claim).with_context(|| format!("parsing claim {claim:?}"))?,
    })
}

fn cmd_check(
    premises: &[String],
    claim: &str,
    id: &str,
    config: &ExerciseConfig,
    json: bool,
) -> Result<ExitCode> {
    let step = parse_step(premises, claim)?;
    let report = diagnose_step(&step, config);
    let record = report_record(id, &report);
    let mut stdout = std::io::stdout().lock();
    emit(&mut stdout, &record, json)?;
    Ok(exit_code(&report))
}

fn cmd_batch(corpus: &Path, config: &ExerciseConfig, json: bool) -> Result<ExitCode> {
    let file = std::fs::File::open(corpus)
        .with_context(|| format!("opening corpus {}", corpus.display()))?;
    let reader = std::io::BufReader::new(file);
    let mut stdout = BufWriter::new(std::io::stdout().lock());

    let mut summary = BatchSummary {
        records: 0,
        malformed: 0,
        verified: 0,
        diagnosed: 0,
        unknown: 0,
        accuracy: BTreeMap::new(),
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line.with_context(|| format!("reading corpus line {}", lineno + 1))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<(StepRecord, Step)> = serde_json::from_str::<StepRecord>(&line)
            .map_err(|e| anyhow!("{e}"))
            .and_then(|record| {
                let step = record.to_step().map_err(|e| anyhow!("{e}"))?;
                Ok((record, step))
            });
        let (record, step) = match parsed {
            Ok(pair) => pair,
            Err(err) => {
                eprintln!("line {}: skipped malformed record: {err}", lineno + 1);
                summary.malformed += 1;
                continue;
            }
        };

        let mut record_config = config.clone();
        record_config.eval.seed = record_seed(config.eval.seed, &record.id);
        let report = diagnose_step(&step, &record_config);
        let out = report_record(&record.id, &report);
        emit(&mut stdout, &out, json)?;

        summary.records += 1;
        match report.outcome {
            StepOutcome::Verified { .. } => summary.verified += 1,
            StepOutcome::Diagnosed { .. } => summary.diagnosed += 1,
            StepOutcome::Unknown => summary.unknown += 1,
        }
        if let Some(expected) = &record.expected_index {
            let entry = summary.accuracy.entry(expected.clone()).or_default();
            entry.total += 1;
            if out.rule_index.as_deref() == Some(expected.as_str())
                && out.verdict == "diagnosed"
            {
                entry.primary += 1;
            } else if out.alternatives.iter().any(|a| &a.rule_index == expected) {
                entry.among_alternatives += 1;
            } else {
                entry.missed += 1;
            }
        }
    }

    if json {
        let mut wrapper = BTreeMap::new();
        wrapper.insert("summary", &summary);
        writeln!(stdout, "{}", serde_json::to_string(&wrapper)?)?;
    } else {
        writeln!(
            stdout,
            "records: {} (verified {}, diagnosed {}, unknown {}, malformed {})",
            summary.records,
            summary.verified,
            summary.diagnosed,
            summary.unknown,
            summary.malformed
        )?;
        if !summary.accuracy.is_empty() {
            writeln!(stdout, "accuracy by expected index:")?;
            for (rule, acc) in &summary.accuracy {
                writeln!(
                    stdout,
                    "  {rule}: {}/{} primary, {} among alternatives, {} missed",
                    acc.primary, acc.total, acc.among_alternatives, acc.missed
                )?;
            }
        }
    }
    stdout.flush()?;

    Ok(if summary.malformed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_generate(rule: &str, count: usize, seed: u64, out: Option<&Path>) -> Result<ExitCode> {
    let records = generate_corpus(rule, count, seed)?;
    let mut lines = String::new();
    for record in &records {
        lines.push_str(&serde_json::to_string(record)?);
        lines.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, lines)
            .with_context(|| format!("writing corpus {}", path.display()))?,
        None => print!("{lines}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_repl(config: &ExerciseConfig, json: bool) -> Result<ExitCode> {
    let stdin = std::io::stdin().lock();
    let mut stdout = std::io::stdout().lock();
    let mut counter = 0usize;

    write!(stdout, "> ")?;
    stdout.flush()?;
    for line in stdin.lines() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed == ":quit" {
            break;
        }
        if !trimmed.is_empty() {
            match parse_repl_step(trimmed) {
                Ok(step) => {
                    counter += 1;
                    let report = diagnose_step(&step, config);
                    let record = report_record(&format!("repl-{counter}"), &report);
                    emit(&mut stdout, &record, json)?;
                }
                Err(err) => writeln!(stdout, "parse error: {err:#}")?,
            }
        }
        write!(stdout, "> ")?;
        stdout.flush()?;
    }
    writeln!(stdout)?;
    Ok(ExitCode::SUCCESS)
}

/// A REPL line is either `premise ; premise |- claim` or a bare claim.
fn parse_repl_step(line: &str) -> Result<Step> {
    match line.split_once("|-") {
        Some((premises, claim)) => {
            let premises: Vec<String> = premises
                .split(';')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(String::from)
                .collect();
            parse_step(&premises, claim.trim())
        }
        None => parse_step(&[], line),
    }
}

fn report_record(id: &str, report: &StepReport) -> ReportRecord {
    match &report.outcome {
        StepOutcome::Verified { by, .. } => ReportRecord {
            id: id.to_string(),
            verdict: "verified",
            rule_index: Some(
                match by {
                    VerifiedBy::Rule(rule) => rule.name(),
                    VerifiedBy::Reiteration => "reiteration",
                    VerifiedBy::Semantic => "semantic",
                }
                .to_string(),
            ),
            position: None,
            bindings: None,
            message: report.message.clone(),
            caveats: report.caveats.clone(),
            alternatives: Vec::new(),
        },
        StepOutcome::Diagnosed {
            primary,
            alternatives,
        } => ReportRecord {
            id: id.to_string(),
            verdict: "diagnosed",
            rule_index: Some(primary.index.name().to_string()),
            position: Some(primary.position.clone()),
            bindings: Some(primary.bindings.printed()),
            message: report.message.clone(),
            caveats: report.caveats.clone(),
            alternatives: alternatives
                .iter()
                .map(|d| Alternative {
                    rule_index: d.index.name().to_string(),
                    position: d.position.clone(),
                    bindings: d.bindings.printed(),
                    message: d.message.clone(),
                })
                .collect(),
        },
        StepOutcome::Unknown => ReportRecord {
            id: id.to_string(),
            verdict: "unknown",
            rule_index: None,
            position: None,
            bindings: None,
            message: report.message.clone(),
            caveats: report.caveats.clone(),
            alternatives: Vec::new(),
        },
    }
}

fn emit(out: &mut impl Write, record: &ReportRecord, json: bool) -> Result<()> {
    if json {
        writeln!(out, "{}", serde_json::to_string(record)?)?;
        return Ok(());
    }
    write!(out, "{}: {}", record.id, record.verdict)?;
    if let Some(rule) = &record.rule_index {
        write!(out, " ({rule}")?;
        if let Some(position) = &record.position {
            write!(out, " at {}", position_display(position))?;
        }
        write!(out, ")")?;
    }
    writeln!(out)?;
    writeln!(out, "  {}", record.message)?;
    for alt in &record.alternatives {
        writeln!(
            out,
            "  also possible ({} at {}): {}",
            alt.rule_index,
            position_display(&alt.position),
            alt.message
        )?;
    }
    for caveat in &record.caveats {
        writeln!(out, "  note: {caveat}")?;
    }
    Ok(())
}

fn position_display(position: &Position) -> String {
    if position.is_empty() {
        "root".to_string()
    } else {
        position
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(".")
    }
}

fn exit_code(report: &StepReport) -> ExitCode {
    match report.outcome {
        StepOutcome::Verified { .. } => ExitCode::SUCCESS,
        StepOutcome::Diagnosed { .. } => ExitCode::from(3),
        StepOutcome::Unknown => ExitCode::from(4),
    }
}
