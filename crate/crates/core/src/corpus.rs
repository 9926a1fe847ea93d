//! Labeled mistake corpora: random instantiation of the catalogued rules.
//!
//! Every record is produced by instantiating one mistake rule's schema
//! with concrete content, so the label is ground truth by construction.
//! Instances that happen to be sound (a cancellation that accidentally
//! comes out right, say) are filtered out and resampled. Term records
//! are optionally *disguised*: the faulty right-hand side is rewritten
//! by sound steps (`x → x*1`, `x → x+0`, constant folding) and both
//! sides may be wrapped in a shared surrounding context, which moves the
//! fault away from the root without changing what it is.
//!
//! Generation is deterministic: each record draws from an RNG stream
//! derived from the corpus seed and the record id, so corpora can be
//! regenerated — or generated in parallel — record by record.

use crate::anti_atp::{catalog, LogicalFallacy};
use crate::antiterms::{catalog_manipulations, ManipulationId, TypeRuleId};
use crate::eval::{compare_terms, Comparison, EvalConfig};
use crate::pattern::{instantiate, subst_term, Bindings};
use crate::sound_atp::{all_rules, verify_semantically, verify_step, Step};
use crate::syntax::{
    enumerate_positions, parse_formula, replace_at, subterm_at, BinaryOp, Formula, RelOp, SetExpr,
    SyntaxError, Term,
};
use num_bigint::BigInt;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// One corpus line: a step and, for generated corpora, its label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub id: String,
    pub premises: Vec<String>,
    pub claim: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_index: Option<String>,
}

impl StepRecord {
    /// Parse the record's formula strings into a checkable step.
    pub fn to_step(&self) -> Result<Step, SyntaxError> {
        Ok(Step {
            premises: self
                .premises
                .iter()
                .map(|s| parse_formula(s))
                .collect::<Result<_, _>>()?,
            claim: parse_formula(&self.claim)?,
        })
    }
}

/// Per-record RNG stream: FNV-1a over the corpus seed and the record id.
pub fn record_seed(seed: u64, id: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in seed.to_le_bytes().iter().chain(id.as_bytes()) {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Corpus generation errors.
#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("unknown rule index: {0:?}")]
    UnknownIndex(String),
    #[error("corpus generation is not supported for index {0:?}")]
    Unsupported(String),
}

/// Generate `count` labeled single-fault records for one rule index.
/// Supported indices: the twelve logical fallacies, the six false
/// manipulations, and the three generic type rules.
pub fn generate_corpus(
    index_name: &str,
    count: usize,
    seed: u64,
) -> Result<Vec<StepRecord>, GenerateError> {
    enum Kind {
        Logical(LogicalFallacy),
        Manipulation(ManipulationId),
        TypeRule(TypeRuleId),
    }
    let kind = if let Some(f) = LogicalFallacy::from_name(index_name) {
        Kind::Logical(f)
    } else if let Some(m) = ManipulationId::from_name(index_name) {
        Kind::Manipulation(m)
    } else if let Some(t) = TypeRuleId::from_name(index_name) {
        Kind::TypeRule(t)
    } else if index_name == "false_analogy" {
        return Err(GenerateError::Unsupported(index_name.to_string()));
    } else {
        return Err(GenerateError::UnknownIndex(index_name.to_string()));
    };

    let mut records = Vec::with_capacity(count);
    for i in 0..count {
        let id = format!("{index_name}-{i:04}");
        let mut rng = ChaCha8Rng::seed_from_u64(record_seed(seed, &id));
        let (premises, claim) = match &kind {
            Kind::Logical(f) => gen_logical(*f, &mut rng),
            Kind::Manipulation(m) => {
                let (lhs, rhs) = gen_manipulation(*m, &mut rng, true);
                (Vec::new(), Formula::relation(RelOp::Eq, lhs, rhs))
            }
            Kind::TypeRule(t) => gen_type_rule(*t, &mut rng),
        };
        records.push(StepRecord {
            id,
            premises: premises.iter().map(|p| p.to_string()).collect(),
            claim: claim.to_string(),
            expected_index: Some(index_name.to_string()),
        });
    }
    Ok(records)
}

/// Generate unlabeled double-fault equalities: two independently faulty
/// rewrites combined under one addition, so no single position explains
/// the whole step. The two instances are never both division-rooted,
/// which rules out the one root shape (a sum of two fractions) that a
/// single manipulation rule could even try to match.
pub fn generate_double_faults(count: usize, seed: u64) -> Vec<StepRecord> {
    const DIV_ROOTED: [ManipulationId; 3] = [
        ManipulationId::AdditiveCancellation,
        ManipulationId::BaseCancellation,
        ManipulationId::ExponentCancellation,
    ];
    let cfg = ground_config();
    let mut records = Vec::with_capacity(count);
    for i in 0..count {
        let id = format!("double-{i:04}");
        let mut rng = ChaCha8Rng::seed_from_u64(record_seed(seed, &id));
        let (lhs, rhs) = loop {
            let r1 = *ManipulationId::ALL.choose(&mut rng).expect("nonempty");
            let r2 = *ManipulationId::ALL.choose(&mut rng).expect("nonempty");
            if DIV_ROOTED.contains(&r1) && DIV_ROOTED.contains(&r2) {
                continue;
            }
            let (l1, h1) = gen_manipulation(r1, &mut rng, false);
            let (l2, h2) = gen_manipulation(r2, &mut rng, false);
            let lhs = Term::binary(BinaryOp::Add, l1, l2);
            let rhs = Term::binary(BinaryOp::Add, h1, h2);
            if matches!(
                compare_terms(RelOp::Eq, &lhs, &rhs, &cfg),
                Comparison::Fails { .. }
            ) {
                break (lhs, rhs);
            }
        };
        records.push(StepRecord {
            id,
            premises: Vec::new(),
            claim: Formula::relation(RelOp::Eq, lhs, rhs).to_string(),
            expected_index: None,
        });
    }
    records
}

/// Cheap exact-evaluation configuration for ground filtering.
fn ground_config() -> EvalConfig {
    EvalConfig {
        sample_count: 1,
        ..EvalConfig::default()
    }
}

const MAX_ATTEMPTS: usize = 1000;

// ---------------------------------------------------------------------------
// Logical fallacy instances
// ---------------------------------------------------------------------------

const ATOM_POOL: [&str; 6] = ["p", "q", "r", "s", "u", "w"];
const VAR_POOL: [&str; 6] = ["x", "y", "z", "u", "v", "w"];
const SET_POOL: [&str; 6] = ["A", "B", "C", "D", "E", "F"];
const PRED_POOL: [&str; 3] = ["P", "Q", "R"];

/// Instantiate one fallacy schema with random concrete content, skipping
/// the rare draws that happen to be sound steps.
fn gen_logical(fallacy: LogicalFallacy, rng: &mut ChaCha8Rng) -> (Vec<Formula>, Formula) {
    let rule = catalog()
        .iter()
        .find(|r| r.id == fallacy)
        .expect("closed catalog");
    for _ in 0..MAX_ATTEMPTS {
        let mut bindings = Bindings::default();

        let mut vars: Vec<&str> = VAR_POOL.to_vec();
        vars.shuffle(rng);
        for meta in &rule.pattern.var_metas {
            bindings
                .vars
                .insert(meta.clone(), vars.pop().expect("pool is large enough").into());
        }

        let mut sets: Vec<&str> = SET_POOL.to_vec();
        sets.shuffle(rng);
        for meta in &rule.pattern.set_metas {
            bindings.sets.insert(
                meta.clone(),
                SetExpr::Name(sets.pop().expect("pool is large enough").into()),
            );
        }

        let mut atoms: Vec<&str> = ATOM_POOL.to_vec();
        atoms.shuffle(rng);
        for meta in &rule.pattern.formula_metas {
            let body = if rule.pattern.var_metas.is_empty() {
                // Propositional content: a fresh atom, sometimes negated.
                let atom = Formula::atom(*atoms.last().expect("pool is large enough"));
                atoms.pop();
                if rng.gen_bool(0.25) {
                    Formula::not(atom)
                } else {
                    atom
                }
            } else {
                // Quantified content: a predicate over the bound variables.
                let args = bindings
                    .vars
                    .values()
                    .map(|v| Term::var(v.clone()))
                    .collect();
                Formula::Atom((*PRED_POOL.choose(rng).expect("nonempty")).into(), args)
            };
            bindings.formulas.insert(meta.clone(), body);
        }

        let premises: Vec<Formula> = rule
            .pattern
            .premises
            .iter()
            .map(|p| instantiate(p, &bindings))
            .collect();
        let claim = instantiate(&rule.pattern.conclusion, &bindings);

        let step = Step {
            premises: premises.clone(),
            claim: claim.clone(),
        };
        let sound = verify_step(&step, &all_rules(), &ground_config()).is_verified()
            || verify_semantically(&step).is_verified();
        if !sound {
            return (premises, claim);
        }
    }
    unreachable!("every fallacy schema has unsound instances")
}

// ---------------------------------------------------------------------------
// Manipulation instances
// ---------------------------------------------------------------------------

/// Instantiate one manipulation rule with random small integers; with
/// `disguise`, additionally rewrite the faulty side by sound steps and
/// wrap both sides in a shared context.
fn gen_manipulation(id: ManipulationId, rng: &mut ChaCha8Rng, disguise: bool) -> (Term, Term) {
    let rule = catalog_manipulations()
        .iter()
        .find(|r| r.id == id)
        .expect("closed catalog");
    let cfg = ground_config();
    for _ in 0..MAX_ATTEMPTS {
        let binding = sample_manipulation_binding(id, rng);
        let lhs = subst_term(&rule.lhs_pattern, &binding);
        let rhs = subst_term(&rule.rhs_template, &binding);
        if !matches!(
            compare_terms(RelOp::Eq, &lhs, &rhs, &cfg),
            Comparison::Fails { .. }
        ) {
            continue;
        }
        if !disguise {
            return (lhs, rhs);
        }
        let mut rhs_d = rhs;
        for _ in 0..rng.gen_range(0..=2) {
            rhs_d = disguise_once(&rhs_d, rng);
        }
        let (lhs_w, rhs_w) = wrap_shared(lhs, rhs_d, rng);
        if matches!(
            compare_terms(RelOp::Eq, &lhs_w, &rhs_w, &cfg),
            Comparison::Fails { .. }
        ) {
            return (lhs_w, rhs_w);
        }
    }
    unreachable!("every manipulation rule has unequal ground instances")
}

/// Random small-integer bindings, shaped so that every division in the
/// rule's patterns is by a nonzero value.
fn sample_manipulation_binding(id: ManipulationId, rng: &mut ChaCha8Rng) -> BTreeMap<String, Term> {
    let mut binding = BTreeMap::new();
    {
        let mut put = |key: &str, lo: i64, hi: i64| {
            binding.insert(key.to_string(), Term::int(rng.gen_range(lo..=hi)));
        };
        match id {
            ManipulationId::FractionComponentwiseAdd => {
                put("a", 1, 9);
                put("b", 1, 9);
                put("c", 1, 9);
                put("d", 1, 9);
            }
            ManipulationId::AdditiveCancellation => {
                put("a", 1, 9);
                put("b", 1, 9);
                put("d", 1, 9);
            }
            ManipulationId::BaseCancellation => {
                put("a", 2, 9);
                put("m", 1, 4);
                put("n", 1, 4);
            }
            ManipulationId::ExponentCancellation => {
                put("a", 2, 5);
                put("m", 1, 3);
                put("n", 1, 3);
            }
            ManipulationId::DistributiveExponentiation => {
                put("a", 1, 9);
                put("b", 1, 9);
                put("n", 2, 4);
            }
            ManipulationId::MultiplyIntoFraction => {
                put("a", 2, 9);
                put("b", 1, 9);
                put("c", 1, 9);
            }
        }
    }
    binding
}

/// One sound rewrite at a random position: `s → s*1`, `s → s+0`, or
/// folding a constant subterm to its exact value.
fn disguise_once(t: &Term, rng: &mut ChaCha8Rng) -> Term {
    let wrap = |t: &Term, rng: &mut ChaCha8Rng, op: BinaryOp, unit: i64| {
        let positions = enumerate_positions(t);
        let pos = positions.choose(rng).expect("at least the root");
        let sub = subterm_at(t, pos).expect("enumerated position").clone();
        let wrapped = if rng.gen_bool(0.5) {
            Term::binary(op, sub, Term::int(unit))
        } else {
            Term::binary(op, Term::int(unit), sub)
        };
        replace_at(t, pos, wrapped).expect("enumerated position")
    };
    match rng.gen_range(0..3) {
        0 => wrap(t, rng, BinaryOp::Mul, 1),
        1 => wrap(t, rng, BinaryOp::Add, 0),
        _ => fold_random_constant(t, rng).unwrap_or_else(|| wrap(t, rng, BinaryOp::Mul, 1)),
    }
}

/// Fold one randomly chosen constant-on-constant operation to its exact
/// integer value, if the term has any.
fn fold_random_constant(t: &Term, rng: &mut ChaCha8Rng) -> Option<Term> {
    let candidates: Vec<_> = enumerate_positions(t)
        .into_iter()
        .filter_map(|pos| {
            let value = fold_value(subterm_at(t, &pos).ok()?)?;
            Some((pos, value))
        })
        .collect();
    let (pos, value) = candidates.choose(rng)?.clone();
    Some(replace_at(t, &pos, Term::Int(value)).expect("enumerated position"))
}

/// The exact integer value of a constant binary operation, when it has
/// one (division only when it divides evenly, exponents kept small).
fn fold_value(t: &Term) -> Option<BigInt> {
    use num_integer::Integer;
    use num_traits::{ToPrimitive, Zero};
    let Term::Binary(op, l, r) = t else {
        return None;
    };
    let (Term::Int(a), Term::Int(b)) = (&**l, &**r) else {
        return None;
    };
    match op {
        BinaryOp::Add => Some(a + b),
        BinaryOp::Sub => Some(a - b),
        BinaryOp::Mul => Some(a * b),
        BinaryOp::Div => (!b.is_zero() && a.is_multiple_of(b)).then(|| a / b),
        BinaryOp::Exp => {
            let exp = b.to_u32().filter(|e| *e <= 6)?;
            (a.magnitude().to_u32()? <= 99).then(|| a.pow(exp))
        }
    }
}

/// Wrap both sides of an equality in the same random context (zero, one,
/// or two layers), moving the fault to an inner position.
fn wrap_shared(mut lhs: Term, mut rhs: Term, rng: &mut ChaCha8Rng) -> (Term, Term) {
    for _ in 0..rng.gen_range(0..=2) {
        let k = rng.gen_range(1..=9);
        let layer = rng.gen_range(0..5);
        let apply = |t: Term| match layer {
            0 => Term::binary(BinaryOp::Add, t, Term::int(k)),
            1 => Term::binary(BinaryOp::Add, Term::int(k), t),
            2 => Term::binary(BinaryOp::Mul, t, Term::int(k)),
            3 => Term::binary(BinaryOp::Sub, Term::int(k), t),
            _ => Term::binary(BinaryOp::Exp, t, Term::int(2)),
        };
        lhs = apply(lhs);
        rhs = apply(rhs);
    }
    (lhs, rhs)
}

// ---------------------------------------------------------------------------
// Type rule instances
// ---------------------------------------------------------------------------

/// Instantiate one generic type rule as a concrete wrong step.
fn gen_type_rule(id: TypeRuleId, rng: &mut ChaCha8Rng) -> (Vec<Formula>, Formula) {
    let cfg = ground_config();
    for _ in 0..MAX_ATTEMPTS {
        match id {
            TypeRuleId::GenDistr => {
                let op0 = *BinaryOp::ALL.choose(rng).expect("nonempty");
                let op1 = *BinaryOp::ALL.choose(rng).expect("nonempty");
                if op0 == op1 {
                    continue;
                }
                let hi = if op0 == BinaryOp::Exp || op1 == BinaryOp::Exp {
                    3
                } else {
                    6
                };
                let a = Term::int(rng.gen_range(1..=hi));
                let b = Term::int(rng.gen_range(1..=hi));
                let c = Term::int(rng.gen_range(1..=hi));
                let lhs = Term::binary(op0, a.clone(), Term::binary(op1, b.clone(), c.clone()));
                let rhs = Term::binary(
                    op1,
                    Term::binary(op0, a.clone(), b),
                    Term::binary(op0, a, c),
                );
                if matches!(
                    compare_terms(RelOp::Eq, &lhs, &rhs, &cfg),
                    Comparison::Fails { .. }
                ) {
                    return (Vec::new(), Formula::relation(RelOp::Eq, lhs, rhs));
                }
            }
            TypeRuleId::GenComm => {
                let op = *[BinaryOp::Sub, BinaryOp::Div, BinaryOp::Exp]
                    .choose(rng)
                    .expect("nonempty");
                let a = Term::int(rng.gen_range(1..=9));
                let b = Term::int(rng.gen_range(1..=9));
                let lhs = Term::binary(op, a.clone(), b.clone());
                let rhs = Term::binary(op, b, a);
                if matches!(
                    compare_terms(RelOp::Eq, &lhs, &rhs, &cfg),
                    Comparison::Fails { .. }
                ) {
                    return (Vec::new(), Formula::relation(RelOp::Eq, lhs, rhs));
                }
            }
            TypeRuleId::GenMono => {
                let op = *[BinaryOp::Sub, BinaryOp::Div, BinaryOp::Exp]
                    .choose(rng)
                    .expect("nonempty");
                let c = rng.gen_range(1..=8);
                let b = rng.gen_range(c + 1..=9);
                // Pick the fixed operand so the claimed inequality is
                // genuinely false: subtracting more, dividing a positive
                // by more, or raising a base below one to a higher power
                // all make the result smaller.
                let a = if op == BinaryOp::Exp {
                    Term::binary(BinaryOp::Div, Term::int(1), Term::int(rng.gen_range(2..=5)))
                } else {
                    Term::int(rng.gen_range(1..=9))
                };
                let lhs = Term::binary(op, a.clone(), Term::int(b));
                let rhs = Term::binary(op, a, Term::int(c));
                if matches!(
                    compare_terms(RelOp::Gt, &lhs, &rhs, &cfg),
                    Comparison::Fails { .. }
                ) {
                    let premise = Formula::relation(RelOp::Gt, Term::int(b), Term::int(c));
                    return (vec![premise], Formula::relation(RelOp::Gt, lhs, rhs));
                }
            }
        }
    }
    unreachable!("every type rule has falsifiable ground instances")
}
