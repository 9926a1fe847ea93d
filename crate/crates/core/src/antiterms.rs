//! Diagnosis of false term manipulations, type-level mistake shapes, and
//! false operator analogies.
//!
//! The manipulation catalog plays the same role for calculations that the
//! fallacy catalog plays for logic: each entry is a *wrong* rewriting
//! students actually produce. The left side of a rule is matched
//! syntactically at some subterm position; the right side is matched
//! *modulo sound equality*, so a wrong move that was afterwards continued
//! correctly (say `2/4` rewritten to `(1^2 + 1^3)/(sqrt(4) + (3 - 1))`)
//! is still recognized. Exactly one position may be at fault, and the
//! context around it must be untouched — two independent mistakes in one
//! step are deliberately not explained.
//!
//! Beyond the concrete catalog there are three generic mistake shapes
//! (distributing an operation over another, swapping a non-commutative
//! operation, trusting monotonicity), disabled by default, and the
//! analogy search: replace one binary operator by another in *both* sides
//! and see whether the step becomes correct.

use crate::anti_atp::{render_template, Diagnosis, DiagnosisKind, RuleIndex};
use crate::eval::{equal_terms, EvalConfig};
use crate::pattern::{match_term, subst_term, Bindings};
use crate::syntax::{
    contexts_equal, enumerate_positions, equiv_mod_ac, formula_node_at, formula_positions,
    parse_term, replace_formula_at, subterm_at, BinaryOp, Formula, NodeOwned, NodeRef, Position,
    RelOp, Term,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

/// The closed catalog of false manipulation rules, in catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ManipulationId {
    FractionComponentwiseAdd,
    AdditiveCancellation,
    BaseCancellation,
    ExponentCancellation,
    DistributiveExponentiation,
    MultiplyIntoFraction,
}

impl ManipulationId {
    pub const ALL: [ManipulationId; 6] = [
        ManipulationId::FractionComponentwiseAdd,
        ManipulationId::AdditiveCancellation,
        ManipulationId::BaseCancellation,
        ManipulationId::ExponentCancellation,
        ManipulationId::DistributiveExponentiation,
        ManipulationId::MultiplyIntoFraction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ManipulationId::FractionComponentwiseAdd => "fraction_componentwise_add",
            ManipulationId::AdditiveCancellation => "additive_cancellation",
            ManipulationId::BaseCancellation => "base_cancellation",
            ManipulationId::ExponentCancellation => "exponent_cancellation",
            ManipulationId::DistributiveExponentiation => "distributive_exponentiation",
            ManipulationId::MultiplyIntoFraction => "multiply_into_fraction",
        }
    }

    pub fn from_name(name: &str) -> Option<ManipulationId> {
        ManipulationId::ALL.into_iter().find(|m| m.name() == name)
    }
}

impl fmt::Display for ManipulationId {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(self.name())
    }
}

/// One false manipulation: a left pattern matched syntactically, a right
/// template matched modulo sound equality, and the student-facing
/// message.
#[derive(Debug, Clone)]
pub struct ManipulationRule {
    pub id: ManipulationId,
    pub lhs_pattern: Term,
    pub rhs_template: Term,
    pub message_template: &'static str,
}

/// The six manipulation rules, fixed order, built once.
pub fn catalog_manipulations() -> &'static [ManipulationRule] {
    static CATALOG: OnceLock<Vec<ManipulationRule>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let rule = |id, lhs: &str, rhs: &str, message| ManipulationRule {
            id,
            lhs_pattern: parse_term(lhs).expect("valid rule pattern"),
            rhs_template: parse_term(rhs).expect("valid rule template"),
            message_template: message,
        };
        vec![
            rule(
                ManipulationId::FractionComponentwiseAdd,
                "a/b + c/d",
                "(a + c)/(b + d)",
                "Fractions are not added component-wise: {a}/{b} + {c}/{d} is not \
                 ({a} + {c})/({b} + {d}). Bring both fractions to a common denominator \
                 first.",
            ),
            rule(
                ManipulationId::AdditiveCancellation,
                "(a + b)/(b + d)",
                "a/d",
                "A shared summand cannot be cancelled from a fraction: \
                 ({a} + {b})/({b} + {d}) is not {a}/{d}. Cancelling works for shared \
                 factors, not summands.",
            ),
            rule(
                ManipulationId::BaseCancellation,
                "a^m / a^n",
                "m/n",
                "Cancelling the base does not leave the exponents: {a}^{m} / {a}^{n} \
                 equals {a}^({m} - {n}), not {m}/{n}.",
            ),
            rule(
                ManipulationId::ExponentCancellation,
                "a^(m*n) / a^m",
                "a^n",
                "Exponents are subtracted under division, not divided: \
                 {a}^({m}*{n}) / {a}^{m} equals {a}^({m}*{n} - {m}), not {a}^{n}.",
            ),
            rule(
                ManipulationId::DistributiveExponentiation,
                "(a + b)^n",
                "a^n + b^n",
                "A power of a sum is not the sum of the powers: ({a} + {b})^{n} is not \
                 {a}^{n} + {b}^{n}.",
            ),
            rule(
                ManipulationId::MultiplyIntoFraction,
                "a*(b/c)",
                "(a*b)/(a*c)",
                "Multiplying a fraction by {a} multiplies only its numerator: \
                 {a}*({b}/{c}) is ({a}*{b})/{c}, not ({a}*{b})/({a}*{c}).",
            ),
        ]
    })
}

/// Convenience: every manipulation index enabled.
pub fn all_manipulations() -> BTreeSet<ManipulationId> {
    ManipulationId::ALL.into_iter().collect()
}

/// Match the manipulation catalog against one (already refuted) equation.
///
/// A diagnosis is emitted for a position `p` when both sides have exactly
/// the same shape outside `p`, the left subterm at `p` matches a rule's
/// left pattern syntactically, and the right subterm at `p` equals the
/// instantiated right template up to sound equality. Positions are walked
/// outside-in; within one position rules apply in catalog order.
pub fn diagnose_manipulation(
    lhs: &Term,
    rhs: &Term,
    enabled: &BTreeSet<ManipulationId>,
    cfg: &EvalConfig,
) -> Vec<Diagnosis> {
    let mut out = Vec::new();
    for pos in enumerate_positions(lhs) {
        let Ok(sub_r) = subterm_at(rhs, &pos) else {
            continue;
        };
        if !contexts_equal(lhs, rhs, &pos) {
            continue;
        }
        let sub_l = subterm_at(lhs, &pos).expect("position enumerated from lhs");
        for rule in catalog_manipulations() {
            if !enabled.contains(&rule.id) {
                continue;
            }
            let mut binding = BTreeMap::new();
            if !match_term(&rule.lhs_pattern, sub_l, &mut binding) {
                continue;
            }
            let expected = subst_term(&rule.rhs_template, &binding);
            if equal_terms(sub_r, &expected, cfg).holds() {
                let bindings = Bindings {
                    terms: binding,
                    ..Bindings::default()
                };
                out.push(Diagnosis {
                    index: RuleIndex::Manipulation(rule.id),
                    kind: DiagnosisKind::Manipulation,
                    message: render_template(rule.message_template, &bindings),
                    bindings,
                    position: pos.clone(),
                });
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Generic type rules
// ---------------------------------------------------------------------------

/// The three generic mistake shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeRuleId {
    GenDistr,
    GenComm,
    GenMono,
}

impl TypeRuleId {
    pub const ALL: [TypeRuleId; 3] = [TypeRuleId::GenDistr, TypeRuleId::GenComm, TypeRuleId::GenMono];

    pub fn name(self) -> &'static str {
        match self {
            TypeRuleId::GenDistr => "gen_distr",
            TypeRuleId::GenComm => "gen_comm",
            TypeRuleId::GenMono => "gen_mono",
        }
    }

    pub fn from_name(name: &str) -> Option<TypeRuleId> {
        TypeRuleId::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl fmt::Display for TypeRuleId {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(self.name())
    }
}

/// A generic mistake shape, described rather than patterned: the matching
/// is structural and lives in [`diagnose_by_type`].
#[derive(Debug, Clone)]
pub struct TypeRule {
    pub id: TypeRuleId,
    pub description: &'static str,
    pub message_template: &'static str,
}

pub fn catalog_types() -> &'static [TypeRule] {
    static CATALOG: OnceLock<Vec<TypeRule>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        vec![
            TypeRule {
                id: TypeRuleId::GenDistr,
                description: "A op0 (B op1 C) rewritten to (A op0 B) op1 (A op0 C), \
                              for distinct operations, mirrored shapes and unary \
                              operations included",
                message_template: "This step distributes {op0} over {op1}, but {op0} \
                                   does not distribute over {op1}.",
            },
            TypeRule {
                id: TypeRuleId::GenComm,
                description: "X op Y rewritten to Y op X for an operation declared \
                              non-commutative",
                message_template: "The operation {op} is not commutative: swapping its \
                                   arguments changes the result.",
            },
            TypeRule {
                id: TypeRuleId::GenMono,
                description: "from B > C concluding A op B > A op C for op in \
                              {-, ^, /}",
                message_template: "From {b} > {c} alone the comparison of {a} {op} {b} \
                                   with {a} {op} {c} does not follow; {op} is not \
                                   monotone in that argument.",
            },
        ]
    })
}

/// What the type rules are asked to look at: one link of a term chain, or
/// a premise/claim formula pair.
#[derive(Debug, Clone, Copy)]
pub enum TypeCheckInput<'a> {
    TermLink {
        lhs: &'a Term,
        rel: RelOp,
        rhs: &'a Term,
    },
    Formulas {
        lhs: &'a Formula,
        rhs: &'a Formula,
    },
}

/// Match the generic mistake shapes. Equality links are searched for
/// distribution and commutation faults position by position; `>` links
/// are checked against the three monotonicity patterns at the root;
/// formula pairs are searched for connective distribution.
pub fn diagnose_by_type(
    input: TypeCheckInput<'_>,
    premises: &[Formula],
    noncommutative: &BTreeSet<BinaryOp>,
    cfg: &EvalConfig,
) -> Vec<Diagnosis> {
    match input {
        TypeCheckInput::TermLink {
            lhs,
            rel: RelOp::Eq,
            rhs,
        } => diagnose_type_terms(lhs, rhs, noncommutative, cfg),
        TypeCheckInput::TermLink {
            lhs,
            rel: RelOp::Gt,
            rhs,
        } => diagnose_mono(lhs, rhs, premises),
        TypeCheckInput::TermLink { .. } => Vec::new(),
        TypeCheckInput::Formulas { lhs, rhs } => diagnose_type_formulas(lhs, rhs),
    }
}

fn type_diagnosis(id: TypeRuleId, bindings: Bindings, position: Position) -> Diagnosis {
    let template = catalog_types()
        .iter()
        .find(|r| r.id == id)
        .expect("closed catalog")
        .message_template;
    Diagnosis {
        index: RuleIndex::TypeRule(id),
        kind: DiagnosisKind::TypeRule,
        message: render_template(template, &bindings),
        bindings,
        position,
    }
}

fn distr_term_bindings(op0: &str, op1: &str, a: &Term, b: &Term, c: &Term) -> Bindings {
    let mut bindings = Bindings::default();
    bindings.ops.insert("op0".into(), op0.to_string());
    bindings.ops.insert("op1".into(), op1.to_string());
    bindings.terms.insert("A".into(), a.clone());
    bindings.terms.insert("B".into(), b.clone());
    bindings.terms.insert("C".into(), c.clone());
    bindings
}

fn diagnose_type_terms(
    lhs: &Term,
    rhs: &Term,
    noncommutative: &BTreeSet<BinaryOp>,
    cfg: &EvalConfig,
) -> Vec<Diagnosis> {
    let mut out = Vec::new();
    for pos in enumerate_positions(lhs) {
        let Ok(sub_r) = subterm_at(rhs, &pos) else {
            continue;
        };
        if !contexts_equal(lhs, rhs, &pos) {
            continue;
        }
        let sub_l = subterm_at(lhs, &pos).expect("position enumerated from lhs");
        // A position where both sides already agree carries no fault.
        if equal_terms(sub_l, sub_r, cfg).holds() {
            continue;
        }
        // Distribution, direct shape: A op0 (B op1 C).
        if let Term::Binary(op0, a, inner) = sub_l {
            if let Term::Binary(op1, b, c) = &**inner {
                if op0 != op1 {
                    let expected = Term::Binary(
                        *op1,
                        Box::new(Term::Binary(*op0, a.clone(), b.clone())),
                        Box::new(Term::Binary(*op0, a.clone(), c.clone())),
                    );
                    if equal_terms(sub_r, &expected, cfg).holds() {
                        out.push(type_diagnosis(
                            TypeRuleId::GenDistr,
                            distr_term_bindings(op0.symbol(), op1.symbol(), a, b, c),
                            pos.clone(),
                        ));
                    }
                }
            }
        }
        // Distribution, mirrored shape: (B op1 C) op0 A.
        if let Term::Binary(op0, inner, a) = sub_l {
            if let Term::Binary(op1, b, c) = &**inner {
                if op0 != op1 {
                    let expected = Term::Binary(
                        *op1,
                        Box::new(Term::Binary(*op0, b.clone(), a.clone())),
                        Box::new(Term::Binary(*op0, c.clone(), a.clone())),
                    );
                    if equal_terms(sub_r, &expected, cfg).holds() {
                        out.push(type_diagnosis(
                            TypeRuleId::GenDistr,
                            distr_term_bindings(op0.symbol(), op1.symbol(), a, b, c),
                            pos.clone(),
                        ));
                    }
                }
            }
        }
        // Distribution of a unary operation: u(B op1 C).
        if let Term::Unary(u, inner) = sub_l {
            if let Term::Binary(op1, b, c) = &**inner {
                let expected = Term::Binary(
                    *op1,
                    Box::new(Term::Unary(*u, b.clone())),
                    Box::new(Term::Unary(*u, c.clone())),
                );
                if equal_terms(sub_r, &expected, cfg).holds() {
                    let mut bindings = Bindings::default();
                    bindings.ops.insert("op0".into(), u.symbol().to_string());
                    bindings.ops.insert("op1".into(), op1.symbol().to_string());
                    bindings.terms.insert("B".into(), (**b).clone());
                    bindings.terms.insert("C".into(), (**c).clone());
                    out.push(type_diagnosis(TypeRuleId::GenDistr, bindings, pos.clone()));
                }
            }
        }
        // Commutation of a non-commutative operation: X op Y vs Y op X.
        if let Term::Binary(op, x, y) = sub_l {
            if noncommutative.contains(op) {
                let expected = Term::Binary(*op, y.clone(), x.clone());
                if equal_terms(sub_r, &expected, cfg).holds() {
                    let mut bindings = Bindings::default();
                    bindings.ops.insert("op".into(), op.symbol().to_string());
                    bindings.terms.insert("A".into(), (**x).clone());
                    bindings.terms.insert("B".into(), (**y).clone());
                    out.push(type_diagnosis(TypeRuleId::GenComm, bindings, pos.clone()));
                }
            }
        }
    }
    out
}

/// The three monotonicity shapes `a - b > a - c`, `a^b > a^c`,
/// `a/b > a/c`, justified by a premise `b > c` (or `c < b`): plausible
/// but wrong transfers of the premise through a non-monotone position.
fn diagnose_mono(lhs: &Term, rhs: &Term, premises: &[Formula]) -> Vec<Diagnosis> {
    const MONO_OPS: [BinaryOp; 3] = [BinaryOp::Sub, BinaryOp::Exp, BinaryOp::Div];
    let (Term::Binary(op_l, a_l, b), Term::Binary(op_r, a_r, c)) = (lhs, rhs) else {
        return Vec::new();
    };
    if op_l != op_r || !MONO_OPS.contains(op_l) || a_l != a_r || b == c {
        return Vec::new();
    }
    let justified = premises.iter().any(|p| match p {
        Formula::Relation(RelOp::Gt, pl, pr) => pl == &**b && pr == &**c,
        Formula::Relation(RelOp::Lt, pl, pr) => pl == &**c && pr == &**b,
        _ => false,
    });
    if !justified {
        return Vec::new();
    }
    let mut bindings = Bindings::default();
    bindings.ops.insert("op".into(), op_l.symbol().to_string());
    bindings.terms.insert("a".into(), (**a_l).clone());
    bindings.terms.insert("b".into(), (**b).clone());
    bindings.terms.insert("c".into(), (**c).clone());
    vec![type_diagnosis(TypeRuleId::GenMono, bindings, Position::new())]
}

fn formula_binary(f: &Formula) -> Option<(&'static str, &Formula, &Formula)> {
    match f {
        Formula::And(l, r) => Some(("&", l, r)),
        Formula::Or(l, r) => Some(("|", l, r)),
        Formula::Implies(l, r) => Some(("->", l, r)),
        Formula::Iff(l, r) => Some(("<->", l, r)),
        _ => None,
    }
}

fn formula_conn(symbol: &str, l: Formula, r: Formula) -> Formula {
    match symbol {
        "&" => Formula::and(l, r),
        "|" => Formula::or(l, r),
        "->" => Formula::implies(l, r),
        "<->" => Formula::iff(l, r),
        _ => unreachable!("connective symbols are closed"),
    }
}

fn distr_formula_bindings(op0: &str, op1: &str, parts: &[(&str, &Formula)]) -> Bindings {
    let mut bindings = Bindings::default();
    bindings.ops.insert("op0".into(), op0.to_string());
    bindings.ops.insert("op1".into(), op1.to_string());
    for (key, f) in parts {
        bindings.formulas.insert((*key).to_string(), (*f).clone());
    }
    bindings
}

/// Connective distribution inside formulas: `~` or a binary connective
/// pushed through another binary connective at some shared position.
fn diagnose_type_formulas(lhs: &Formula, rhs: &Formula) -> Vec<Diagnosis> {
    let mut out = Vec::new();
    for (pos, node) in formula_positions(lhs) {
        let NodeRef::Formula(sub_l) = node else {
            continue;
        };
        let Ok(NodeRef::Formula(sub_r)) = formula_node_at(rhs, &pos) else {
            continue;
        };
        // Context check: grafting the right node into the left tree must
        // reproduce the right tree exactly.
        match replace_formula_at(lhs, &pos, NodeOwned::Formula(sub_r.clone())) {
            Ok(grafted) if &grafted == rhs => {}
            _ => continue,
        }
        if equiv_mod_ac(sub_l, sub_r) {
            continue;
        }
        // ~(B op1 C) rewritten to ~B op1 ~C.
        if let Formula::Not(inner) = sub_l {
            if let Some((op1, b, c)) = formula_binary(inner) {
                let expected = formula_conn(
                    op1,
                    Formula::not(b.clone()),
                    Formula::not(c.clone()),
                );
                if equiv_mod_ac(sub_r, &expected) {
                    out.push(type_diagnosis(
                        TypeRuleId::GenDistr,
                        distr_formula_bindings("~", op1, &[("B", b), ("C", c)]),
                        pos.clone(),
                    ));
                }
            }
        }
        // A op0 (B op1 C) and its mirror, for distinct connectives.
        if let Some((op0, left, right)) = formula_binary(sub_l) {
            if let Some((op1, b, c)) = formula_binary(right) {
                if op0 != op1 {
                    let expected = formula_conn(
                        op1,
                        formula_conn(op0, left.clone(), b.clone()),
                        formula_conn(op0, left.clone(), c.clone()),
                    );
                    if equiv_mod_ac(sub_r, &expected) {
                        out.push(type_diagnosis(
                            TypeRuleId::GenDistr,
                            distr_formula_bindings(op0, op1, &[("A", left), ("B", b), ("C", c)]),
                            pos.clone(),
                        ));
                    }
                }
            }
            if let Some((op1, b, c)) = formula_binary(left) {
                if op0 != op1 {
                    let expected = formula_conn(
                        op1,
                        formula_conn(op0, b.clone(), right.clone()),
                        formula_conn(op0, c.clone(), right.clone()),
                    );
                    if equiv_mod_ac(sub_r, &expected) {
                        out.push(type_diagnosis(
                            TypeRuleId::GenDistr,
                            distr_formula_bindings(op0, op1, &[("A", right), ("B", b), ("C", c)]),
                            pos.clone(),
                        ));
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// False analogies
// ---------------------------------------------------------------------------

/// A step explained by systematically confusing one operator with
/// another: replacing `op_confused` by `op_intended` in both sides makes
/// them equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyDiagnosis {
    pub op_confused: BinaryOp,
    pub op_intended: BinaryOp,
    pub corrected_lhs: Term,
    pub corrected_rhs: Term,
}

/// Replace every binary node carrying `from_op` by `to_op`; everything
/// else is untouched.
pub fn replace_operators(t: &Term, from_op: BinaryOp, to_op: BinaryOp) -> Term {
    match t {
        Term::Int(_) | Term::Var(_) => t.clone(),
        Term::Unary(op, a) => Term::Unary(*op, Box::new(replace_operators(a, from_op, to_op))),
        Term::Binary(op, l, r) => Term::Binary(
            if *op == from_op { to_op } else { *op },
            Box::new(replace_operators(l, from_op, to_op)),
            Box::new(replace_operators(r, from_op, to_op)),
        ),
    }
}

/// The candidate operator pairs, in fixed enumeration order.
const ANALOGY_CONFUSED: [BinaryOp; 5] = [
    BinaryOp::Exp,
    BinaryOp::Sub,
    BinaryOp::Add,
    BinaryOp::Div,
    BinaryOp::Mul,
];
const ANALOGY_INTENDED: [BinaryOp; 5] = [
    BinaryOp::Add,
    BinaryOp::Exp,
    BinaryOp::Mul,
    BinaryOp::Div,
    BinaryOp::Sub,
];

/// Try every ordered pair of distinct operators: replace the first by the
/// second in both sides and keep the pairs under which the sides become
/// equal. Only one operator is ever replaced per diagnosis; results keep
/// the enumeration order.
pub fn diagnose_by_analogy(lhs: &Term, rhs: &Term, cfg: &EvalConfig) -> Vec<AnalogyDiagnosis> {
    let mut out = Vec::new();
    for op0 in ANALOGY_CONFUSED {
        for op1 in ANALOGY_INTENDED {
            if op0 == op1 {
                continue;
            }
            let corrected_lhs = replace_operators(lhs, op0, op1);
            let corrected_rhs = replace_operators(rhs, op0, op1);
            if equal_terms(&corrected_lhs, &corrected_rhs, cfg).holds() {
                out.push(AnalogyDiagnosis {
                    op_confused: op0,
                    op_intended: op1,
                    corrected_lhs,
                    corrected_rhs,
                });
            }
        }
    }
    out
}

/// Message template for rendered analogy diagnoses.
pub const ANALOGY_MESSAGE_TEMPLATE: &str =
    "This looks like a false analogy: the step treats {op0} like {op1}. With {op1} \
     instead it would be correct: {clhs} = {crhs}.";

/// Wrap an analogy result in the common diagnosis shape.
pub fn analogy_diagnosis(a: &AnalogyDiagnosis, template: &str) -> Diagnosis {
    let mut bindings = Bindings::default();
    bindings
        .ops
        .insert("op0".into(), a.op_confused.symbol().to_string());
    bindings
        .ops
        .insert("op1".into(), a.op_intended.symbol().to_string());
    bindings.terms.insert("clhs".into(), a.corrected_lhs.clone());
    bindings.terms.insert("crhs".into(), a.corrected_rhs.clone());
    Diagnosis {
        index: RuleIndex::Analogy {
            confused: a.op_confused,
            intended: a.op_intended,
        },
        kind: DiagnosisKind::Analogy,
        message: render_template(template, &bindings),
        bindings,
        position: Position::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn manip(lhs: &str, rhs: &str) -> Vec<Diagnosis> {
        diagnose_manipulation(&t(lhs), &t(rhs), &all_manipulations(), &cfg())
    }

    fn names(ds: &[Diagnosis]) -> Vec<&'static str> {
        ds.iter().map(|d| d.index.name()).collect()
    }

    #[test]
    fn catalog_has_six_distinct_rules() {
        let ids: BTreeSet<ManipulationId> =
            catalog_manipulations().iter().map(|r| r.id).collect();
        assert_eq!(catalog_manipulations().len(), 6);
        assert_eq!(ids.len(), 6);
    }

    #[test]
    fn componentwise_addition_at_the_root() {
        let ds = manip("1/2 + 1/2", "2/4");
        assert_eq!(names(&ds), vec!["fraction_componentwise_add"]);
        assert!(ds[0].position.is_empty());
        assert_eq!(ds[0].bindings.terms["a"], t("1"));
        assert_eq!(ds[0].bindings.terms["b"], t("2"));
    }

    #[test]
    fn disguised_results_are_still_recognized() {
        // The right side is a heavily disguised 2/4.
        let ds = manip("1/2 + 1/2", "(1^2 + 1^3)/(sqrt(4) + (3 - 1))");
        assert_eq!(names(&ds), vec!["fraction_componentwise_add"]);
    }

    #[test]
    fn faults_are_found_under_identical_contexts() {
        let ds = manip("(3*(1/2 + 1/2))^2", "(3*(2/4))^2");
        assert_eq!(names(&ds), vec!["fraction_componentwise_add"]);
        assert_eq!(ds[0].position, vec![0, 1]);

        let ds = manip("5*(1/2 + 1/2)^2", "5*(2/4)^2");
        assert_eq!(names(&ds), vec!["fraction_componentwise_add"]);
        assert_eq!(ds[0].position, vec![1, 0]);
    }

    #[test]
    fn two_faults_yield_no_diagnosis() {
        let ds = manip("(1/2 + 1/2) + (1/3 + 1/3)", "2/4 + 2/6");
        assert!(ds.is_empty(), "single-fault restriction, got {:?}", names(&ds));
    }

    #[test]
    fn remaining_rules_match_their_shapes() {
        assert_eq!(names(&manip("(5 + 2)/(2 + 3)", "5/3")), vec!["additive_cancellation"]);
        assert_eq!(names(&manip("2^5 / 2^3", "5/3")), vec!["base_cancellation"]);
        assert_eq!(names(&manip("2^(3*4) / 2^3", "2^4")), vec!["exponent_cancellation"]);
        assert_eq!(names(&manip("(1 + 2)^2", "1^2 + 2^2")), vec!["distributive_exponentiation"]);
        assert_eq!(names(&manip("3*(1/2)", "(3*1)/(3*2)")), vec!["multiply_into_fraction"]);
        // ... and the faulty result may itself be written differently.
        assert_eq!(names(&manip("3*(1/2)", "3/6")), vec!["multiply_into_fraction"]);
    }

    #[test]
    fn symbolic_instances_match_by_sampling() {
        let ds = manip("x/2 + y/3", "(x + y)/5");
        assert_eq!(names(&ds), vec!["fraction_componentwise_add"]);
    }

    #[test]
    fn disabled_rules_stay_silent() {
        let ds = diagnose_manipulation(&t("1/2 + 1/2"), &t("2/4"), &BTreeSet::new(), &cfg());
        assert!(ds.is_empty());
    }

    #[test]
    fn replace_operators_matches_its_contract() {
        assert_eq!(replace_operators(&t("(a + b)^2"), BinaryOp::Exp, BinaryOp::Mul), t("(a + b)*2"));
        assert_eq!(replace_operators(&t("a + b"), BinaryOp::Mul, BinaryOp::Add), t("a + b"));
        assert_eq!(replace_operators(&t("a^(b^c)"), BinaryOp::Exp, BinaryOp::Add), t("a + (b + c)"));
    }

    #[test]
    fn square_of_sum_has_four_analogies_in_order() {
        let ds = diagnose_by_analogy(&t("(a + b)^2"), &t("a^2 + b^2"), &cfg());
        let pairs: Vec<(BinaryOp, BinaryOp)> =
            ds.iter().map(|d| (d.op_confused, d.op_intended)).collect();
        assert_eq!(
            pairs,
            vec![
                (BinaryOp::Exp, BinaryOp::Mul),
                (BinaryOp::Exp, BinaryOp::Div),
                (BinaryOp::Add, BinaryOp::Mul),
                (BinaryOp::Add, BinaryOp::Div),
            ]
        );
        assert_eq!(ds[0].corrected_lhs, t("(a + b)*2"));
        assert_eq!(ds[0].corrected_rhs, t("a*2 + b*2"));
        for d in &ds {
            assert!(
                equal_terms(&d.corrected_lhs, &d.corrected_rhs, &cfg()).holds(),
                "analogy corrections are equalities by construction"
            );
        }
    }

    #[test]
    fn sqrt_of_sum_has_no_operator_analogy() {
        let ds = diagnose_by_analogy(&t("sqrt(a + b)"), &t("sqrt(a) + sqrt(b)"), &cfg());
        assert!(ds.is_empty(), "no binary replacement repairs the square root");
    }

    #[test]
    fn distribution_shape_covers_the_square_of_a_sum() {
        let input = TypeCheckInput::TermLink {
            lhs: &t("(a + b)^2"),
            rel: RelOp::Eq,
            rhs: &t("a^2 + b^2"),
        };
        let ds = diagnose_by_type(input, &[], &default_noncommutative(), &cfg());
        assert_eq!(names(&ds), vec!["gen_distr"]);
        assert_eq!(ds[0].bindings.ops["op0"], "^");
        assert_eq!(ds[0].bindings.ops["op1"], "+");
    }

    #[test]
    fn distribution_shape_covers_sqrt_and_negation() {
        let input = TypeCheckInput::TermLink {
            lhs: &t("sqrt(x + y)"),
            rel: RelOp::Eq,
            rhs: &t("sqrt(x) + sqrt(y)"),
        };
        let ds = diagnose_by_type(input, &[], &default_noncommutative(), &cfg());
        assert_eq!(names(&ds), vec!["gen_distr"]);
        assert_eq!(ds[0].bindings.ops["op0"], "sqrt");

        let lhs = crate::syntax::parse_formula("~(p & q)").unwrap();
        let rhs = crate::syntax::parse_formula("~p & ~q").unwrap();
        let ds = diagnose_by_type(
            TypeCheckInput::Formulas {
                lhs: &lhs,
                rhs: &rhs,
            },
            &[],
            &default_noncommutative(),
            &cfg(),
        );
        assert_eq!(names(&ds), vec!["gen_distr"]);
        assert_eq!(ds[0].bindings.ops["op0"], "~");
        assert_eq!(ds[0].bindings.ops["op1"], "&");
    }

    #[test]
    fn commutation_flags_only_declared_operations() {
        let input = TypeCheckInput::TermLink {
            lhs: &t("2 - 3"),
            rel: RelOp::Eq,
            rhs: &t("3 - 2"),
        };
        let ds = diagnose_by_type(input, &[], &default_noncommutative(), &cfg());
        assert_eq!(names(&ds), vec!["gen_comm"]);
        assert_eq!(ds[0].bindings.ops["op"], "-");

        // Add is commutative: the sides agree, so nothing is at fault.
        let input = TypeCheckInput::TermLink {
            lhs: &t("a + b"),
            rel: RelOp::Eq,
            rhs: &t("b + a"),
        };
        let ds = diagnose_by_type(input, &[], &default_noncommutative(), &cfg());
        assert!(ds.is_empty());
    }

    #[test]
    fn monotonicity_needs_shape_and_premise() {
        let premises = [crate::syntax::parse_formula("b > c").unwrap()];
        let input = TypeCheckInput::TermLink {
            lhs: &t("a - b"),
            rel: RelOp::Gt,
            rhs: &t("a - c"),
        };
        let ds = diagnose_by_type(input, &premises, &default_noncommutative(), &cfg());
        assert_eq!(names(&ds), vec!["gen_mono"]);

        // The flipped premise form also justifies the shape.
        let premises = [crate::syntax::parse_formula("c < b").unwrap()];
        let ds = diagnose_by_type(input, &premises, &default_noncommutative(), &cfg());
        assert_eq!(names(&ds), vec!["gen_mono"]);

        // Without the premise the shape alone is not diagnosed.
        let ds = diagnose_by_type(input, &[], &default_noncommutative(), &cfg());
        assert!(ds.is_empty());

        // Addition is not one of the three patterns.
        let input = TypeCheckInput::TermLink {
            lhs: &t("a + b"),
            rel: RelOp::Gt,
            rhs: &t("a + c"),
        };
        let premises = [crate::syntax::parse_formula("b > c").unwrap()];
        let ds = diagnose_by_type(input, &premises, &default_noncommutative(), &cfg());
        assert!(ds.is_empty());
    }

    fn default_noncommutative() -> BTreeSet<BinaryOp> {
        [BinaryOp::Sub, BinaryOp::Div, BinaryOp::Exp].into()
    }
}
