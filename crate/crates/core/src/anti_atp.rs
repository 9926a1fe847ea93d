//! The logical-fallacy prover.
//!
//! Where the sound checker asks "does this follow?", this module asks
//! "does this follow *by a classic mistake*?". Each catalog entry is a
//! formally fallacious inference schema; a step that failed sound
//! verification is matched against every enabled schema exactly like a
//! sound rule application — one application, no chaining — and each match
//! names the mistake, its metavariable bindings, and a rendered message
//! for the student.
//!
//! The catalog is deliberately closed and ordered; diagnosis results come
//! back in catalog order, then premise order, and the pipeline treats the
//! first as primary. Every entry is genuinely unsound: the test suite
//! refutes each one with a truth-table assignment, a finite model, or an
//! assignment of small sets (see [`crate::semantics`]).

use crate::antiterms::{ManipulationId, TypeRuleId};
use crate::pattern::{match_rule, Bindings, FormulaPattern};
use crate::syntax::{BinaryOp, Formula, Position, SetExpr, Term};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

/// The closed catalog of logical fallacies, in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalFallacy {
    InverseContraposition,
    DenyingAntecedent,
    InverseImplication,
    ExclusiveOr,
    MisreadImplication,
    FalseNegDistribution,
    QuantifierSwitch,
    FalseQuantifierNegationForall,
    FalseQuantifierNegationExists,
    SubsetElementConfusion,
    ElementSubsetConfusion,
    TransitiveElement,
}

impl LogicalFallacy {
    pub const ALL: [LogicalFallacy; 12] = [
        LogicalFallacy::InverseContraposition,
        LogicalFallacy::DenyingAntecedent,
        LogicalFallacy::InverseImplication,
        LogicalFallacy::ExclusiveOr,
        LogicalFallacy::MisreadImplication,
        LogicalFallacy::FalseNegDistribution,
        LogicalFallacy::QuantifierSwitch,
        LogicalFallacy::FalseQuantifierNegationForall,
        LogicalFallacy::FalseQuantifierNegationExists,
        LogicalFallacy::SubsetElementConfusion,
        LogicalFallacy::ElementSubsetConfusion,
        LogicalFallacy::TransitiveElement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LogicalFallacy::InverseContraposition => "inverse_contraposition",
            LogicalFallacy::DenyingAntecedent => "denying_antecedent",
            LogicalFallacy::InverseImplication => "inverse_implication",
            LogicalFallacy::ExclusiveOr => "exclusive_or",
            LogicalFallacy::MisreadImplication => "misread_implication",
            LogicalFallacy::FalseNegDistribution => "false_neg_distribution",
            LogicalFallacy::QuantifierSwitch => "quantifier_switch",
            LogicalFallacy::FalseQuantifierNegationForall => "false_quantifier_negation_forall",
            LogicalFallacy::FalseQuantifierNegationExists => "false_quantifier_negation_exists",
            LogicalFallacy::SubsetElementConfusion => "subset_element_confusion",
            LogicalFallacy::ElementSubsetConfusion => "element_subset_confusion",
            LogicalFallacy::TransitiveElement => "transitive_element",
        }
    }

    pub fn from_name(name: &str) -> Option<LogicalFallacy> {
        LogicalFallacy::ALL.into_iter().find(|f| f.name() == name)
    }
}

impl fmt::Display for LogicalFallacy {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(self.name())
    }
}

/// One fallacious inference schema with its student-facing message.
#[derive(Debug, Clone)]
pub struct FallacyRule {
    pub id: LogicalFallacy,
    pub pattern: FormulaPattern,
    pub message_template: &'static str,
}

/// The fallacy catalog: twelve schemas, fixed order, built once.
pub fn catalog() -> &'static [FallacyRule] {
    static CATALOG: OnceLock<Vec<FallacyRule>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let prop = |id, premises: &[&str], conclusion: &str, message| FallacyRule {
            id,
            pattern: FormulaPattern::new(premises, conclusion, &["A", "B"], &[], &[]),
            message_template: message,
        };
        let quant = |id, premises: &[&str], conclusion: &str, message| FallacyRule {
            id,
            pattern: FormulaPattern::new(premises, conclusion, &["phi"], &["x", "y"], &[]),
            message_template: message,
        };
        let sets = |id, premises: &[&str], conclusion: &str, message| FallacyRule {
            id,
            pattern: FormulaPattern::new(premises, conclusion, &[], &[], &["A", "B", "C"]),
            message_template: message,
        };
        vec![
            prop(
                LogicalFallacy::InverseContraposition,
                &["A -> B"],
                "~A -> ~B",
                "Contraposition swaps the sides as it negates them: from {A} -> {B} you may \
                 conclude ~{B} -> ~{A}, but not ~{A} -> ~{B}.",
            ),
            prop(
                LogicalFallacy::DenyingAntecedent,
                &["~A", "A -> B"],
                "~B",
                "From ~{A} and {A} -> {B} nothing follows about {B}: the implication only \
                 speaks about what happens when {A} holds.",
            ),
            prop(
                LogicalFallacy::InverseImplication,
                &["A -> B"],
                "B -> A",
                "An implication cannot be turned around: {A} -> {B} does not yield {B} -> {A}.",
            ),
            prop(
                LogicalFallacy::ExclusiveOr,
                &["A", "A | B"],
                "~B",
                "The 'or' here is inclusive: {A} | {B} together with {A} says nothing \
                 against {B}.",
            ),
            prop(
                LogicalFallacy::MisreadImplication,
                &["~A"],
                "~(A -> B)",
                "To refute {A} -> {B} you would need {A} true and {B} false; ~{A} alone \
                 does not refute it — it makes the implication vacuously true.",
            ),
            prop(
                LogicalFallacy::FalseNegDistribution,
                &["~(A & B)"],
                "~A & ~B",
                "Negation does not distribute over 'and': ~({A} & {B}) means at least one \
                 of {A} and {B} fails, not necessarily both.",
            ),
            quant(
                LogicalFallacy::QuantifierSwitch,
                &["forall x. exists y. phi"],
                "exists y. forall x. phi",
                "Swapping the quantifiers strengthens the statement: one fixed {y} would \
                 now have to work for every {x}, while the premise allows {y} to depend \
                 on {x}.",
            ),
            quant(
                LogicalFallacy::FalseQuantifierNegationForall,
                &["~(forall x. phi)"],
                "forall x. ~phi",
                "The negation of 'for all {x}' is 'there exists an {x}' with the negated \
                 body, not 'for all {x}' with the negated body.",
            ),
            quant(
                LogicalFallacy::FalseQuantifierNegationExists,
                &["~(exists x. phi)"],
                "exists x. ~phi",
                "The negation of 'there exists an {x}' is 'for all {x}' with the negated \
                 body, not 'there exists an {x}' with the negated body.",
            ),
            sets(
                LogicalFallacy::SubsetElementConfusion,
                &["A subseteq B"],
                "A in B",
                "{A} subseteq {B} says every element of {A} lies in {B}; it does not make \
                 {A} itself an element of {B}.",
            ),
            sets(
                LogicalFallacy::ElementSubsetConfusion,
                &["A in B"],
                "A subseteq B",
                "{A} in {B} makes {A} one element of {B}; it does not put the elements of \
                 {A} into {B}.",
            ),
            sets(
                LogicalFallacy::TransitiveElement,
                &["A in B", "B in C"],
                "A in C",
                "Membership is not transitive: {A} in {B} and {B} in {C} do not yield \
                 {A} in {C}.",
            ),
        ]
    })
}

// ---------------------------------------------------------------------------
// Diagnosis types shared by all diagnosis kinds
// ---------------------------------------------------------------------------

/// Which family a diagnosis belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosisKind {
    Logical,
    Manipulation,
    TypeRule,
    Analogy,
}

impl DiagnosisKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosisKind::Logical => "logical",
            DiagnosisKind::Manipulation => "manipulation",
            DiagnosisKind::TypeRule => "type_rule",
            DiagnosisKind::Analogy => "analogy",
        }
    }
}

/// The internal index of the rule that explained a mistake.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleIndex {
    Logical(LogicalFallacy),
    Manipulation(ManipulationId),
    TypeRule(TypeRuleId),
    Analogy {
        confused: BinaryOp,
        intended: BinaryOp,
    },
}

impl RuleIndex {
    pub fn name(&self) -> &'static str {
        match self {
            RuleIndex::Logical(f) => f.name(),
            RuleIndex::Manipulation(m) => m.name(),
            RuleIndex::TypeRule(t) => t.name(),
            RuleIndex::Analogy { .. } => "false_analogy",
        }
    }

    pub fn kind(&self) -> DiagnosisKind {
        match self {
            RuleIndex::Logical(_) => DiagnosisKind::Logical,
            RuleIndex::Manipulation(_) => DiagnosisKind::Manipulation,
            RuleIndex::TypeRule(_) => DiagnosisKind::TypeRule,
            RuleIndex::Analogy { .. } => DiagnosisKind::Analogy,
        }
    }
}

impl fmt::Display for RuleIndex {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(self.name())
    }
}

impl Serialize for RuleIndex {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(self.name())
    }
}

/// One diagnosed mistake: which rule, where, under which bindings, and
/// the message rendered for the student.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosis {
    pub index: RuleIndex,
    pub kind: DiagnosisKind,
    pub bindings: Bindings,
    /// Position of the faulty subterm; root (empty) for logical fallacies.
    pub position: Position,
    pub message: String,
}

/// Render a message template, splicing printed bindings into `{name}`
/// slots. Compound formulas and terms are parenthesized on the way in so
/// the surrounding text reads unambiguously; unknown slots are left
/// verbatim.
pub fn render_template(template: &str, bindings: &Bindings) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        rest = &rest[open..];
        let Some(close) = rest.find('}') else {
            break;
        };
        let key = &rest[1..close];
        match splice(bindings, key) {
            Some(value) => out.push_str(&value),
            None => out.push_str(&rest[..=close]),
        }
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    out
}

fn splice(bindings: &Bindings, key: &str) -> Option<String> {
    if let Some(f) = bindings.formulas.get(key) {
        let printed = crate::syntax::print_formula(f);
        return Some(match f {
            Formula::Atom(..)
            | Formula::Relation(..)
            | Formula::ElementOf(..)
            | Formula::SubsetOf(..) => printed,
            _ => format!("({printed})"),
        });
    }
    if let Some(t) = bindings.terms.get(key) {
        let printed = crate::syntax::print_term(t);
        return Some(match t {
            Term::Var(_) => printed,
            Term::Int(n) if n.sign() != num_bigint::Sign::Minus => printed,
            _ => format!("({printed})"),
        });
    }
    if let Some(v) = bindings.vars.get(key) {
        return Some(v.clone());
    }
    if let Some(s) = bindings.sets.get(key) {
        let printed = crate::syntax::print_set(s);
        return Some(match s {
            SetExpr::Name(_) | SetExpr::Term(Term::Var(_) | Term::Int(_)) => printed,
            SetExpr::Term(_) => format!("({printed})"),
        });
    }
    bindings.ops.get(key).cloned()
}

/// Match every enabled fallacy schema against the step and report each
/// instantiation, in catalog order then premise order.
pub fn diagnose_logical(
    premises: &[Formula],
    claim: &Formula,
    enabled: &BTreeSet<LogicalFallacy>,
) -> Vec<Diagnosis> {
    let mut out = Vec::new();
    for rule in catalog() {
        if !enabled.contains(&rule.id) {
            continue;
        }
        // One diagnosis per rule: further bindings of the same schema
        // (symmetric schemas produce A/B-swapped twins) tell the student
        // nothing new.
        if let Some(bindings) = match_rule(&rule.pattern, premises, claim).into_iter().next() {
            let message = render_template(rule.message_template, &bindings);
            out.push(Diagnosis {
                index: RuleIndex::Logical(rule.id),
                kind: DiagnosisKind::Logical,
                bindings,
                position: Position::new(),
                message,
            });
        }
    }
    out
}

/// Convenience: every fallacy index enabled.
pub fn all_fallacies() -> BTreeSet<LogicalFallacy> {
    LogicalFallacy::ALL.into_iter().collect()
}
