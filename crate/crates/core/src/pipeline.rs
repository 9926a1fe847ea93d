//! Orchestration: sound verification first, mistake diagnosis on failure.
//!
//! The control flow is deliberately rigid. A step is first given to the
//! sound checker under the exercise's admissible rules (with an optional
//! truth-table fallback); a verified step is *never* diagnosed. Only when
//! verification fails do the diagnosis passes run, in fixed order:
//! logical fallacies, then false manipulations on each failing equality
//! link, then (if enabled) the generic type rules, then (if enabled) the
//! operator-analogy search. The first finding is the primary diagnosis,
//! the rest become alternatives, and every diagnosed report carries the
//! caveat that the step might still be correct — a too-weak checker
//! misattributing a correct step is an accepted consequence of keeping
//! the checker honest, and the remedy offered to the student is always
//! the same: provide more intermediate steps.
//!
//! The [`ExerciseConfig`] gathers everything an exercise can vary: the
//! admissible sound rules, the enabled mistake indices, engine
//! tolerances, and message-template overrides.

use crate::anti_atp::{
    all_fallacies, diagnose_logical, render_template, Diagnosis, LogicalFallacy,
};
use crate::antiterms::{
    all_manipulations, analogy_diagnosis, diagnose_by_analogy, diagnose_by_type,
    diagnose_manipulation, ManipulationId, TypeCheckInput, TypeRuleId, ANALOGY_MESSAGE_TEMPLATE,
};
use crate::eval::{compare_terms, Comparison, EvalConfig};
use crate::sound_atp::{
    all_rules, verify_semantically, verify_step, SoundRuleId, Step, Verdict, VerifiedBy,
};
use crate::syntax::{extract_chain, BinaryOp, RelOp};
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Everything an exercise can configure.
#[derive(Debug, Clone, PartialEq)]
pub struct ExerciseConfig {
    pub admissible_sound_rules: BTreeSet<SoundRuleId>,
    pub enabled_logical: BTreeSet<LogicalFallacy>,
    pub enabled_manipulations: BTreeSet<ManipulationId>,
    pub enabled_type_rules: BTreeSet<TypeRuleId>,
    /// Gate for the generic type rules (off by default).
    pub enable_type_rules: bool,
    /// Gate for the operator-analogy search (on by default).
    pub enable_analogy: bool,
    /// Accept steps that follow propositionally by truth table.
    pub semantic_propositional: bool,
    pub eval: EvalConfig,
    /// Message-template overrides, keyed by rule index name.
    pub messages: BTreeMap<String, String>,
    /// Operations the commutation type rule treats as non-commutative.
    pub noncommutative_ops: BTreeSet<BinaryOp>,
    /// How many alternative diagnoses a report shows at most.
    pub max_alternatives: usize,
}

impl Default for ExerciseConfig {
    fn default() -> ExerciseConfig {
        ExerciseConfig {
            admissible_sound_rules: all_rules(),
            enabled_logical: all_fallacies(),
            enabled_manipulations: all_manipulations(),
            enabled_type_rules: TypeRuleId::ALL.into_iter().collect(),
            enable_type_rules: false,
            enable_analogy: true,
            semantic_propositional: false,
            eval: EvalConfig::default(),
            messages: BTreeMap::new(),
            noncommutative_ops: [BinaryOp::Sub, BinaryOp::Div, BinaryOp::Exp].into(),
            max_alternatives: 2,
        }
    }
}

/// Configuration file errors.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid config syntax: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unknown sound rule name: {0:?}")]
    UnknownSoundRule(String),
    #[error("unknown fallacy index name: {0:?}")]
    UnknownFallacy(String),
    #[error("unknown operator name: {0:?}")]
    UnknownOperator(String),
}

/// The on-disk TOML shape; every key optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    admissible_sound_rules: Option<Vec<String>>,
    enabled_fallacies: Option<Vec<String>>,
    enable_type_rules: Option<bool>,
    enable_analogy: Option<bool>,
    semantic_propositional: Option<bool>,
    noncommutative_ops: Option<Vec<String>>,
    max_alternatives: Option<usize>,
    eval: Option<EvalConfig>,
    messages: Option<BTreeMap<String, String>>,
}

impl ExerciseConfig {
    /// Parse a TOML exercise configuration. Absent keys keep their
    /// defaults; the keyword `all` selects a whole inventory; the
    /// `enabled_fallacies` list mixes logical, manipulation, and type
    /// indices in one namespace.
    pub fn from_toml_str(text: &str) -> Result<ExerciseConfig, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        let mut config = ExerciseConfig::default();

        if let Some(names) = raw.admissible_sound_rules {
            let mut set = BTreeSet::new();
            let mut take_all = false;
            for name in &names {
                if name == "all" {
                    take_all = true;
                } else {
                    set.insert(
                        SoundRuleId::from_name(name)
                            .ok_or_else(|| ConfigError::UnknownSoundRule(name.clone()))?,
                    );
                }
            }
            config.admissible_sound_rules = if take_all { all_rules() } else { set };
        }

        if let Some(names) = raw.enabled_fallacies {
            let mut logical = BTreeSet::new();
            let mut manipulations = BTreeSet::new();
            let mut types = BTreeSet::new();
            let mut take_all = false;
            for name in &names {
                if name == "all" {
                    take_all = true;
                } else if let Some(f) = LogicalFallacy::from_name(name) {
                    logical.insert(f);
                } else if let Some(m) = ManipulationId::from_name(name) {
                    manipulations.insert(m);
                } else if let Some(t) = TypeRuleId::from_name(name) {
                    types.insert(t);
                } else {
                    return Err(ConfigError::UnknownFallacy(name.clone()));
                }
            }
            if !take_all {
                config.enabled_logical = logical;
                config.enabled_manipulations = manipulations;
                config.enabled_type_rules = types;
            }
        }

        if let Some(flag) = raw.enable_type_rules {
            config.enable_type_rules = flag;
        }
        if let Some(flag) = raw.enable_analogy {
            config.enable_analogy = flag;
        }
        if let Some(flag) = raw.semantic_propositional {
            config.semantic_propositional = flag;
        }
        if let Some(names) = raw.noncommutative_ops {
            let mut set = BTreeSet::new();
            for name in &names {
                set.insert(
                    BinaryOp::from_name(name)
                        .ok_or_else(|| ConfigError::UnknownOperator(name.clone()))?,
                );
            }
            config.noncommutative_ops = set;
        }
        if let Some(n) = raw.max_alternatives {
            config.max_alternatives = n;
        }
        if let Some(eval) = raw.eval {
            config.eval = eval;
        }
        if let Some(messages) = raw.messages {
            config.messages = messages;
        }
        Ok(config)
    }
}

/// Outcome of running one step through the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Verified {
        by: VerifiedBy,
        sampled: bool,
    },
    Diagnosed {
        primary: Diagnosis,
        alternatives: Vec<Diagnosis>,
    },
    Unknown,
}

/// One step's full report: outcome, headline message, and caveats.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub outcome: StepOutcome,
    pub message: String,
    pub caveats: Vec<String>,
}

/// Caveat attached to every diagnosed step: the checker is deliberately
/// weak, so a diagnosis is an explanation offer, not a proof of error.
pub const CAVEAT_MAYBE_CORRECT: &str =
    "The step may still be correct but too large for the admissible elementary rules; \
     if you are sure of it, provide more intermediate steps.";

/// Caveat attached whenever a verdict rests on randomized substitution.
pub const CAVEAT_SAMPLED: &str =
    "Equalities involving variables were checked at randomly sampled values, \
     not proved symbolically.";

/// Message for steps that neither verify nor match any mistake pattern.
pub const UNKNOWN_MESSAGE: &str =
    "The step could not be verified, and no known mistake pattern explains it. \
     Try providing more intermediate steps.";

/// Run one step through the whole pipeline: verification, then — only on
/// failure — the diagnosis passes in fixed order.
pub fn diagnose_step(step: &Step, config: &ExerciseConfig) -> StepReport {
    let verdict = match verify_step(step, &config.admissible_sound_rules, &config.eval) {
        Verdict::NotVerified if config.semantic_propositional => verify_semantically(step),
        v => v,
    };
    if let Verdict::Verified { by, sampled, .. } = verdict {
        let message = match &by {
            VerifiedBy::Rule(rule) => format!("Step verified by {rule}."),
            VerifiedBy::Reiteration => "Step verified: the claim repeats a premise.".to_string(),
            VerifiedBy::Semantic => "Step verified by propositional truth table.".to_string(),
        };
        let caveats = if sampled {
            vec![CAVEAT_SAMPLED.to_string()]
        } else {
            Vec::new()
        };
        return StepReport {
            outcome: StepOutcome::Verified { by, sampled },
            message,
            caveats,
        };
    }

    let mut diagnoses = Vec::new();
    let mut sampled_anywhere = false;

    diagnoses.extend(diagnose_logical(
        &step.premises,
        &step.claim,
        &config.enabled_logical,
    ));

    // Term-level passes run per failing link of an equality/inequality
    // chain claim; links that hold are not at fault.
    let failing_links: Vec<(crate::syntax::Term, RelOp, crate::syntax::Term)> =
        match extract_chain(&step.claim) {
            Some(chain) => chain
                .links()
                .filter(|(l, rel, r)| {
                    match compare_terms(*rel, l, r, &config.eval) {
                        Comparison::Holds { sampled } => {
                            sampled_anywhere |= sampled;
                            false
                        }
                        Comparison::Fails { .. } | Comparison::Unknown => {
                            sampled_anywhere |=
                                !l.free_vars().is_empty() || !r.free_vars().is_empty();
                            true
                        }
                    }
                })
                .map(|(l, rel, r)| (l.clone(), rel, r.clone()))
                .collect(),
            None => Vec::new(),
        };

    for (l, rel, r) in &failing_links {
        if *rel == RelOp::Eq {
            diagnoses.extend(diagnose_manipulation(
                l,
                r,
                &config.enabled_manipulations,
                &config.eval,
            ));
        }
    }

    if config.enable_type_rules {
        let mut type_diagnoses = Vec::new();
        for (l, rel, r) in &failing_links {
            type_diagnoses.extend(diagnose_by_type(
                TypeCheckInput::TermLink {
                    lhs: l,
                    rel: *rel,
                    rhs: r,
                },
                &step.premises,
                &config.noncommutative_ops,
                &config.eval,
            ));
        }
        for premise in &step.premises {
            type_diagnoses.extend(diagnose_by_type(
                TypeCheckInput::Formulas {
                    lhs: premise,
                    rhs: &step.claim,
                },
                &step.premises,
                &config.noncommutative_ops,
                &config.eval,
            ));
        }
        type_diagnoses.retain(|d| match d.index {
            crate::anti_atp::RuleIndex::TypeRule(t) => config.enabled_type_rules.contains(&t),
            _ => true,
        });
        diagnoses.extend(type_diagnoses);
    }

    if config.enable_analogy {
        let template = config
            .messages
            .get("false_analogy")
            .map(String::as_str)
            .unwrap_or(ANALOGY_MESSAGE_TEMPLATE);
        for (l, rel, r) in &failing_links {
            if *rel == RelOp::Eq {
                for a in diagnose_by_analogy(l, r, &config.eval) {
                    diagnoses.push(analogy_diagnosis(&a, template));
                }
            }
        }
    }

    // Message overrides from the exercise configuration.
    for d in &mut diagnoses {
        if d.kind != crate::anti_atp::DiagnosisKind::Analogy {
            if let Some(template) = config.messages.get(d.index.name()) {
                d.message = render_template(template, &d.bindings);
            }
        }
    }

    match diagnoses.split_first() {
        Some((primary, rest)) => {
            let mut caveats = Vec::new();
            if sampled_anywhere {
                caveats.push(CAVEAT_SAMPLED.to_string());
            }
            caveats.push(CAVEAT_MAYBE_CORRECT.to_string());
            StepReport {
                message: primary.message.clone(),
                outcome: StepOutcome::Diagnosed {
                    primary: primary.clone(),
                    alternatives: rest.iter().take(config.max_alternatives).cloned().collect(),
                },
                caveats,
            }
        }
        None => StepReport {
            outcome: StepOutcome::Unknown,
            message: UNKNOWN_MESSAGE.to_string(),
            caveats: Vec::new(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anti_atp::RuleIndex;
    use crate::syntax::parse_formula;

    fn step(premises: &[&str], claim: &str) -> Step {
        Step {
            premises: premises.iter().map(|s| parse_formula(s).unwrap()).collect(),
            claim: parse_formula(claim).unwrap(),
        }
    }

    fn run(premises: &[&str], claim: &str) -> StepReport {
        diagnose_step(&step(premises, claim), &ExerciseConfig::default())
    }

    fn primary_name(report: &StepReport) -> Option<&'static str> {
        match &report.outcome {
            StepOutcome::Diagnosed { primary, .. } => Some(primary.index.name()),
            _ => None,
        }
    }

    #[test]
    fn verified_steps_are_never_diagnosed() {
        let report = run(&["p", "p | q", "p -> ~q"], "~q");
        assert!(matches!(
            report.outcome,
            StepOutcome::Verified {
                by: VerifiedBy::Rule(SoundRuleId::ModusPonens),
                ..
            }
        ));
        assert_eq!(report.message, "Step verified by modus_ponens.");
        assert!(report.caveats.is_empty());
    }

    #[test]
    fn removing_the_needed_rule_turns_the_same_step_into_a_diagnosis() {
        let mut config = ExerciseConfig::default();
        config.admissible_sound_rules.remove(&SoundRuleId::ModusPonens);
        let report = diagnose_step(&step(&["p", "p | q", "p -> ~q"], "~q"), &config);
        assert_eq!(primary_name(&report), Some("exclusive_or"));
        assert!(report.caveats.contains(&CAVEAT_MAYBE_CORRECT.to_string()));
    }

    #[test]
    fn ground_chain_diagnosis_has_no_sampling_caveat() {
        let report = run(&[], "1/2 + 1/2 = 2/4");
        assert_eq!(primary_name(&report), Some("fraction_componentwise_add"));
        assert!(!report.caveats.contains(&CAVEAT_SAMPLED.to_string()));
        assert!(report.caveats.contains(&CAVEAT_MAYBE_CORRECT.to_string()));
    }

    #[test]
    fn symbolic_diagnosis_carries_the_sampling_caveat_and_alternatives() {
        let report = run(&[], "(a + b)^2 = a^2 + b^2");
        assert_eq!(primary_name(&report), Some("distributive_exponentiation"));
        assert!(report.caveats.contains(&CAVEAT_SAMPLED.to_string()));
        match &report.outcome {
            StepOutcome::Diagnosed { alternatives, .. } => {
                assert_eq!(alternatives.len(), 2, "capped by max_alternatives");
                assert!(matches!(
                    alternatives[0].index,
                    RuleIndex::Analogy {
                        confused: BinaryOp::Exp,
                        intended: BinaryOp::Mul,
                    }
                ));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn unrecognized_steps_come_back_unknown() {
        let report = run(&[], "p -> (q -> p)");
        assert_eq!(report.outcome, StepOutcome::Unknown);
        assert_eq!(report.message, UNKNOWN_MESSAGE);
    }

    #[test]
    fn semantic_fallback_is_opt_in() {
        let s = step(&["p", "p -> q", "q -> r"], "r");
        let default_report = diagnose_step(&s, &ExerciseConfig::default());
        assert_eq!(default_report.outcome, StepOutcome::Unknown);

        let mut config = ExerciseConfig::default();
        config.semantic_propositional = true;
        let semantic_report = diagnose_step(&s, &config);
        assert!(matches!(
            semantic_report.outcome,
            StepOutcome::Verified {
                by: VerifiedBy::Semantic,
                ..
            }
        ));
    }

    #[test]
    fn type_rules_are_gated() {
        let s = step(&[], "(a + b)^2 = a^2 + b^2");
        let default_names: Vec<_> = match diagnose_step(&s, &ExerciseConfig::default()).outcome {
            StepOutcome::Diagnosed {
                primary,
                alternatives,
            } => std::iter::once(primary.index.name())
                .chain(alternatives.iter().map(|d| d.index.name()))
                .collect(),
            _ => Vec::new(),
        };
        assert!(!default_names.contains(&"gen_distr"), "type rules default off");

        let mut config = ExerciseConfig::default();
        config.enable_type_rules = true;
        config.max_alternatives = 10;
        match diagnose_step(&s, &config).outcome {
            StepOutcome::Diagnosed {
                primary,
                alternatives,
            } => {
                let names: Vec<_> = std::iter::once(primary.index.name())
                    .chain(alternatives.iter().map(|d| d.index.name()))
                    .collect();
                assert_eq!(
                    names,
                    vec![
                        "distributive_exponentiation",
                        "gen_distr",
                        "false_analogy",
                        "false_analogy",
                        "false_analogy",
                        "false_analogy",
                    ],
                    "pass order: manipulations, type rules, analogies"
                );
            }
            _ => panic!("expected a diagnosis"),
        }
    }

    #[test]
    fn message_overrides_rerender_with_bindings() {
        let mut config = ExerciseConfig::default();
        config.messages.insert(
            "fraction_componentwise_add".into(),
            "custom: numerators {a} and {c}".into(),
        );
        let report = diagnose_step(&step(&[], "1/2 + 1/2 = 2/4"), &config);
        assert_eq!(report.message, "custom: numerators 1 and 1");
    }

    #[test]
    fn config_parses_and_rejects() {
        let config = ExerciseConfig::from_toml_str(
            r#"
            admissible_sound_rules = ["modus_ponens", "equality_chain"]
            enabled_fallacies = ["denying_antecedent", "fraction_componentwise_add", "gen_comm"]
            enable_type_rules = true
            semantic_propositional = true
            noncommutative_ops = ["-", "div"]
            max_alternatives = 5

            [eval]
            sample_count = 7
            seed = 99

            [messages]
            denying_antecedent = "careful with {A}"
            "#,
        )
        .unwrap();
        assert_eq!(config.admissible_sound_rules.len(), 2);
        assert_eq!(
            config.enabled_logical,
            [LogicalFallacy::DenyingAntecedent].into()
        );
        assert_eq!(
            config.enabled_manipulations,
            [ManipulationId::FractionComponentwiseAdd].into()
        );
        assert_eq!(config.enabled_type_rules, [TypeRuleId::GenComm].into());
        assert!(config.enable_type_rules);
        assert_eq!(
            config.noncommutative_ops,
            [BinaryOp::Sub, BinaryOp::Div].into()
        );
        assert_eq!(config.max_alternatives, 5);
        assert_eq!(config.eval.sample_count, 7);
        assert_eq!(config.eval.seed, 99);
        assert_eq!(config.eval.sample_range, 100, "unset eval keys keep defaults");

        assert_eq!(
            ExerciseConfig::from_toml_str("").unwrap(),
            ExerciseConfig::default()
        );
        assert!(ExerciseConfig::from_toml_str("admissible_sound_rules = [\"nope\"]").is_err());
        assert!(ExerciseConfig::from_toml_str("enabled_fallacies = [\"nope\"]").is_err());
        assert!(ExerciseConfig::from_toml_str("surprise = 1").is_err());
        let all = ExerciseConfig::from_toml_str(
            "admissible_sound_rules = [\"all\"]\nenabled_fallacies = [\"all\"]",
        )
        .unwrap();
        assert_eq!(all.admissible_sound_rules, all_rules());
        assert_eq!(all.enabled_logical, all_fallacies());
    }

    #[test]
    fn disabling_fallacies_silences_the_diagnosis() {
        let mut config = ExerciseConfig::default();
        config.enabled_logical.clear();
        let report = diagnose_step(&step(&["~p", "p -> q"], "~q"), &config);
        assert_eq!(report.outcome, StepOutcome::Unknown);
    }

    #[test]
    fn reports_are_deterministic() {
        let s = step(&[], "(a + b)^2 = a^2 + b^2");
        let r1 = diagnose_step(&s, &ExerciseConfig::default());
        let r2 = diagnose_step(&s, &ExerciseConfig::default());
        assert_eq!(r1, r2);
    }
}
