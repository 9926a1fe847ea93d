//! The deliberately weak sound checker.
//!
//! A step is verified only when its claim follows from the available
//! premises by a *single* application of one admissible elementary rule —
//! there is no proof search and no rule chaining. Keeping the checker
//! this small is the point: every accepted step is one a beginner could
//! legitimately call elementary, and anything else is handed to the
//! diagnosis machinery instead of being silently closed by a clever
//! prover.
//!
//! Two extra verification paths sit beside the rule inventory: repeating
//! an available premise verbatim is always accepted, and equality or
//! inequality chains between terms are checked numerically via [`crate::eval`].

use crate::eval::{compare_terms, Comparison, EvalConfig};
use crate::pattern::{match_rule, match_substitution, Bindings, FormulaPattern};
use crate::semantics::entails_propositionally;
use crate::syntax::{equiv_mod_ac, extract_chain, Chain, Formula, Term};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

/// The closed inventory of sound elementary rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SoundRuleId {
    ModusPonens,
    AndIntro,
    AndElimL,
    AndElimR,
    OrIntroL,
    OrIntroR,
    Contraposition,
    DoubleNegationIntro,
    DoubleNegationElim,
    DeMorganAnd,
    DeMorganOr,
    IffToImplications,
    ImplicationChain,
    ForallInstantiation,
    ExistsGeneralization,
    SubsetTransitivity,
    EqualityChain,
}

impl SoundRuleId {
    pub const ALL: [SoundRuleId; 17] = [
        SoundRuleId::ModusPonens,
        SoundRuleId::AndIntro,
        SoundRuleId::AndElimL,
        SoundRuleId::AndElimR,
        SoundRuleId::OrIntroL,
        SoundRuleId::OrIntroR,
        SoundRuleId::Contraposition,
        SoundRuleId::DoubleNegationIntro,
        SoundRuleId::DoubleNegationElim,
        SoundRuleId::DeMorganAnd,
        SoundRuleId::DeMorganOr,
        SoundRuleId::IffToImplications,
        SoundRuleId::ImplicationChain,
        SoundRuleId::ForallInstantiation,
        SoundRuleId::ExistsGeneralization,
        SoundRuleId::SubsetTransitivity,
        SoundRuleId::EqualityChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SoundRuleId::ModusPonens => "modus_ponens",
            SoundRuleId::AndIntro => "and_intro",
            SoundRuleId::AndElimL => "and_elim_l",
            SoundRuleId::AndElimR => "and_elim_r",
            SoundRuleId::OrIntroL => "or_intro_l",
            SoundRuleId::OrIntroR => "or_intro_r",
            SoundRuleId::Contraposition => "contraposition",
            SoundRuleId::DoubleNegationIntro => "double_negation_intro",
            SoundRuleId::DoubleNegationElim => "double_negation_elim",
            SoundRuleId::DeMorganAnd => "de_morgan_and",
            SoundRuleId::DeMorganOr => "de_morgan_or",
            SoundRuleId::IffToImplications => "iff_to_implications",
            SoundRuleId::ImplicationChain => "implication_chain",
            SoundRuleId::ForallInstantiation => "forall_instantiation",
            SoundRuleId::ExistsGeneralization => "exists_generalization",
            SoundRuleId::SubsetTransitivity => "subset_transitivity",
            SoundRuleId::EqualityChain => "equality_chain",
        }
    }

    pub fn from_name(name: &str) -> Option<SoundRuleId> {
        SoundRuleId::ALL.into_iter().find(|r| r.name() == name)
    }
}

impl fmt::Display for SoundRuleId {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(self.name())
    }
}

/// One proof step as submitted: what is available, and what is claimed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub premises: Vec<Formula>,
    pub claim: Formula,
}

/// What justified a verified step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifiedBy {
    /// One application of the named admissible rule.
    Rule(SoundRuleId),
    /// The claim repeats an available premise.
    Reiteration,
    /// Propositional consequence by truth table (opt-in).
    Semantic,
}

/// Outcome of the sound checker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Verified {
        by: VerifiedBy,
        bindings: Bindings,
        /// Whether the justification relied on randomized substitution
        /// (possible only for chains with free variables).
        sampled: bool,
    },
    NotVerified,
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }

    fn by_rule(rule: SoundRuleId, bindings: Bindings) -> Verdict {
        Verdict::Verified {
            by: VerifiedBy::Rule(rule),
            bindings,
            sampled: false,
        }
    }
}

/// The schema-based rules, as (rule, pattern) pairs; rules with several
/// sound forms appear once per form.
fn schema_rules() -> &'static [(SoundRuleId, FormulaPattern)] {
    static RULES: OnceLock<Vec<(SoundRuleId, FormulaPattern)>> = OnceLock::new();
    RULES.get_or_init(|| {
        let prop = |premises: &[&str], conclusion: &str| {
            FormulaPattern::new(premises, conclusion, &["A", "B", "C"], &[], &[])
        };
        vec![
            (SoundRuleId::ModusPonens, prop(&["A -> B", "A"], "B")),
            (SoundRuleId::AndIntro, prop(&["A", "B"], "A & B")),
            (SoundRuleId::Contraposition, prop(&["A -> B"], "~B -> ~A")),
            (SoundRuleId::Contraposition, prop(&["~A -> ~B"], "B -> A")),
            (SoundRuleId::DoubleNegationIntro, prop(&["A"], "~~A")),
            (SoundRuleId::DoubleNegationElim, prop(&["~~A"], "A")),
            (SoundRuleId::DeMorganAnd, prop(&["~(A & B)"], "~A | ~B")),
            (SoundRuleId::DeMorganAnd, prop(&["~A | ~B"], "~(A & B)")),
            (SoundRuleId::DeMorganOr, prop(&["~(A | B)"], "~A & ~B")),
            (SoundRuleId::DeMorganOr, prop(&["~A & ~B"], "~(A | B)")),
            (SoundRuleId::IffToImplications, prop(&["A <-> B"], "A -> B")),
            (SoundRuleId::IffToImplications, prop(&["A <-> B"], "B -> A")),
            (
                SoundRuleId::IffToImplications,
                prop(&["A <-> B"], "(A -> B) & (B -> A)"),
            ),
            (
                SoundRuleId::ImplicationChain,
                prop(&["A -> B", "B -> C"], "A -> C"),
            ),
            (
                SoundRuleId::SubsetTransitivity,
                FormulaPattern::new(
                    &["A subseteq B", "B subseteq C"],
                    "A subseteq C",
                    &[],
                    &[],
                    &["A", "B", "C"],
                ),
            ),
        ]
    })
}

/// Verify one step against the admissible rule set: reiteration first,
/// then each rule in inventory order, first success wins.
pub fn verify_step(step: &Step, admissible: &BTreeSet<SoundRuleId>, cfg: &EvalConfig) -> Verdict {
    if step
        .premises
        .iter()
        .any(|p| equiv_mod_ac(p, &step.claim))
    {
        return Verdict::Verified {
            by: VerifiedBy::Reiteration,
            bindings: Bindings::default(),
            sampled: false,
        };
    }
    for rule in SoundRuleId::ALL {
        if !admissible.contains(&rule) {
            continue;
        }
        let verdict = match rule {
            SoundRuleId::AndElimL | SoundRuleId::AndElimR => try_and_elim(rule, step),
            SoundRuleId::OrIntroL | SoundRuleId::OrIntroR => try_or_intro(rule, step),
            SoundRuleId::ForallInstantiation => try_forall_instantiation(step),
            SoundRuleId::ExistsGeneralization => try_exists_generalization(step),
            SoundRuleId::EqualityChain => try_equality_chain(step, cfg),
            _ => try_schemas(rule, step),
        };
        if verdict.is_verified() {
            return verdict;
        }
    }
    Verdict::NotVerified
}

fn try_schemas(rule: SoundRuleId, step: &Step) -> Verdict {
    for (id, pattern) in schema_rules() {
        if *id != rule {
            continue;
        }
        if let Some(b) = match_rule(pattern, &step.premises, &step.claim).into_iter().next() {
            return Verdict::by_rule(rule, b);
        }
    }
    Verdict::NotVerified
}

/// Conjunction elimination is deliberately direction-strict: the left
/// variant accepts exactly the left conjunct, so the two indices stay
/// distinguishable in reports and in per-exercise rule sets.
fn try_and_elim(rule: SoundRuleId, step: &Step) -> Verdict {
    for premise in &step.premises {
        if let Formula::And(l, r) = premise {
            let picked = if rule == SoundRuleId::AndElimL { l } else { r };
            if equiv_mod_ac(picked, &step.claim) {
                let mut b = Bindings::default();
                b.formulas.insert("A".into(), (**l).clone());
                b.formulas.insert("B".into(), (**r).clone());
                return Verdict::by_rule(rule, b);
            }
        }
    }
    Verdict::NotVerified
}

/// Disjunction introduction, direction-strict like conjunction
/// elimination: the left variant requires the premise to be the left
/// disjunct of the claim.
fn try_or_intro(rule: SoundRuleId, step: &Step) -> Verdict {
    if let Formula::Or(l, r) = &step.claim {
        let picked = if rule == SoundRuleId::OrIntroL { l } else { r };
        for premise in &step.premises {
            if equiv_mod_ac(premise, picked) {
                let mut b = Bindings::default();
                b.formulas.insert("A".into(), (**l).clone());
                b.formulas.insert("B".into(), (**r).clone());
                return Verdict::by_rule(rule, b);
            }
        }
    }
    Verdict::NotVerified
}

fn try_forall_instantiation(step: &Step) -> Verdict {
    for premise in &step.premises {
        if let Formula::Forall(x, body) = premise {
            if let Some(witness) = match_substitution(body, &step.claim, x) {
                return Verdict::by_rule(
                    SoundRuleId::ForallInstantiation,
                    instantiation_bindings(x, witness),
                );
            }
        }
    }
    Verdict::NotVerified
}

fn try_exists_generalization(step: &Step) -> Verdict {
    if let Formula::Exists(x, body) = &step.claim {
        for premise in &step.premises {
            if let Some(witness) = match_substitution(body, premise, x) {
                return Verdict::by_rule(
                    SoundRuleId::ExistsGeneralization,
                    instantiation_bindings(x, witness),
                );
            }
        }
    }
    Verdict::NotVerified
}

fn instantiation_bindings(var: &str, witness: Term) -> Bindings {
    let mut b = Bindings::default();
    b.vars.insert("x".into(), var.to_string());
    b.terms.insert("t".into(), witness);
    b
}

fn try_equality_chain(step: &Step, cfg: &EvalConfig) -> Verdict {
    match extract_chain(&step.claim) {
        Some(chain) => verify_chain(&chain, cfg),
        None => Verdict::NotVerified,
    }
}

/// Check an equality/inequality chain link by link with [`compare_terms`].
/// Verified iff every adjacent link holds; `sampled` reports whether any
/// link needed randomized substitution.
pub fn verify_chain(chain: &Chain, cfg: &EvalConfig) -> Verdict {
    let mut sampled = false;
    for (l, rel, r) in chain.links() {
        match compare_terms(rel, l, r, cfg) {
            Comparison::Holds { sampled: s } => sampled |= s,
            Comparison::Fails { .. } | Comparison::Unknown => return Verdict::NotVerified,
        }
    }
    Verdict::Verified {
        by: VerifiedBy::Rule(SoundRuleId::EqualityChain),
        bindings: Bindings::default(),
        sampled,
    }
}

/// Truth-table fallback (opt-in via config): the claim follows from the
/// premises propositionally, treating atomic formulas as opaque letters.
pub fn verify_semantically(step: &Step) -> Verdict {
    if entails_propositionally(&step.premises, &step.claim) == Some(true) {
        Verdict::Verified {
            by: VerifiedBy::Semantic,
            bindings: Bindings::default(),
            sampled: false,
        }
    } else {
        Verdict::NotVerified
    }
}

/// Convenience: the full rule inventory as a set.
pub fn all_rules() -> BTreeSet<SoundRuleId> {
    SoundRuleId::ALL.into_iter().collect()
}

/// Parse a rule-set description: the keyword `all`, or rule names.
pub fn parse_rule_names(names: &[String]) -> Result<BTreeSet<SoundRuleId>, String> {
    let mut set = BTreeSet::new();
    for name in names {
        if name == "all" {
            return Ok(all_rules());
        }
        match SoundRuleId::from_name(name) {
            Some(rule) => {
                set.insert(rule);
            }
            None => return Err(format!("unknown sound rule name: {name:?}")),
        }
    }
    Ok(set)
}

/// Printed bindings of a verdict, for reports; empty for non-schema
/// justifications.
pub fn verdict_bindings(verdict: &Verdict) -> BTreeMap<String, String> {
    match verdict {
        Verdict::Verified { bindings, .. } => bindings.printed(),
        Verdict::NotVerified => BTreeMap::new(),
    }
}
