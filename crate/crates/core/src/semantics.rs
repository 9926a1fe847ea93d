//! Semantic checks: truth tables, small first-order models, and a tiny
//! set-theoretic universe.
//!
//! These back two features. First, a step can be *verified* semantically
//! when its claim follows from the premises by truth-table reasoning
//! alone, treating each atomic formula as an opaque propositional letter
//! (sound by uniform substitution, deliberately incomplete). Second,
//! every unsound rule in the catalogs is *refutable*: the propositional
//! ones by a small truth-table counterexample, the quantifier ones by a
//! finite model — the search includes the empty domain, which several
//! quantifier confusions need — and the set-theoretic ones by an
//! assignment of small hereditarily finite sets.

use crate::syntax::{print_formula, Formula, SetExpr, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Truth-table checks are skipped beyond this many distinct atoms.
pub const MAX_TRUTH_TABLE_ATOMS: usize = 12;

// ---------------------------------------------------------------------------
// Propositional abstraction
// ---------------------------------------------------------------------------

/// Collect the atomic constituents of a quantifier-free formula, keyed by
/// their printed form. `None` if the formula contains a quantifier.
pub fn propositional_atoms(f: &Formula) -> Option<BTreeSet<String>> {
    let mut atoms = BTreeSet::new();
    fn walk(f: &Formula, atoms: &mut BTreeSet<String>) -> bool {
        match f {
            Formula::Atom(..)
            | Formula::Relation(..)
            | Formula::ElementOf(..)
            | Formula::SubsetOf(..) => {
                atoms.insert(print_formula(f));
                true
            }
            Formula::Not(g) => walk(g, atoms),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => walk(l, atoms) && walk(r, atoms),
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }
    walk(f, &mut atoms).then_some(atoms)
}

fn eval_prop(f: &Formula, assignment: &BTreeMap<String, bool>) -> bool {
    match f {
        Formula::Atom(..)
        | Formula::Relation(..)
        | Formula::ElementOf(..)
        | Formula::SubsetOf(..) => assignment[&print_formula(f)],
        Formula::Not(g) => !eval_prop(g, assignment),
        Formula::And(l, r) => eval_prop(l, assignment) && eval_prop(r, assignment),
        Formula::Or(l, r) => eval_prop(l, assignment) || eval_prop(r, assignment),
        Formula::Implies(l, r) => !eval_prop(l, assignment) || eval_prop(r, assignment),
        Formula::Iff(l, r) => eval_prop(l, assignment) == eval_prop(r, assignment),
        Formula::Forall(..) | Formula::Exists(..) => {
            unreachable!("quantifiers rejected by propositional_atoms")
        }
    }
}

fn collect_atoms(premises: &[Formula], conclusion: &Formula) -> Option<Vec<String>> {
    let mut atoms = propositional_atoms(conclusion)?;
    for p in premises {
        atoms.extend(propositional_atoms(p)?);
    }
    if atoms.len() > MAX_TRUTH_TABLE_ATOMS {
        return None;
    }
    Some(atoms.into_iter().collect())
}

/// Does the conclusion follow from the premises under every truth-value
/// assignment to their atomic constituents? `None` when any formula is
/// quantified or there are too many distinct atoms.
pub fn entails_propositionally(premises: &[Formula], conclusion: &Formula) -> Option<bool> {
    Some(propositional_counterexample_impl(premises, conclusion)?.is_none())
}

/// The first assignment (in enumeration order) making every premise true
/// and the conclusion false, if the formulas are propositional and one
/// exists.
pub fn propositional_counterexample(
    premises: &[Formula],
    conclusion: &Formula,
) -> Option<BTreeMap<String, bool>> {
    propositional_counterexample_impl(premises, conclusion).flatten()
}

fn propositional_counterexample_impl(
    premises: &[Formula],
    conclusion: &Formula,
) -> Option<Option<BTreeMap<String, bool>>> {
    let atoms = collect_atoms(premises, conclusion)?;
    for mask in 0u32..(1u32 << atoms.len()) {
        let assignment: BTreeMap<String, bool> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), mask >> i & 1 == 1))
            .collect();
        if premises.iter().all(|p| eval_prop(p, &assignment))
            && !eval_prop(conclusion, &assignment)
        {
            return Some(Some(assignment));
        }
    }
    Some(None)
}

// ---------------------------------------------------------------------------
// Finite first-order models
// ---------------------------------------------------------------------------

/// A finite model: a domain `{0, .., domain_size - 1}` and, for each
/// predicate symbol (keyed by name and arity), the set of tuples it holds
/// of.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModel {
    pub domain_size: usize,
    pub predicates: BTreeMap<(String, usize), BTreeSet<Vec<usize>>>,
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "domain of size {}", self.domain_size)?;
        for ((name, _), tuples) in &self.predicates {
            let rows: Vec<String> = tuples
                .iter()
                .map(|t| {
                    let items: Vec<String> = t.iter().map(|d| d.to_string()).collect();
                    format!("({})", items.join(", "))
                })
                .collect();
            write!(out, "; {} holds of {{{}}}", name, rows.join(", "))?;
        }
        Ok(())
    }
}

/// Collect the predicate signature of a closed formula whose atoms apply
/// predicates to plain variables. `None` for anything else (arithmetic,
/// set relations, free variables).
fn signature(f: &Formula) -> Option<BTreeSet<(String, usize)>> {
    let mut sig = BTreeSet::new();
    fn walk(
        f: &Formula,
        bound: &mut Vec<String>,
        sig: &mut BTreeSet<(String, usize)>,
    ) -> bool {
        match f {
            Formula::Atom(name, args) => {
                for a in args {
                    match a {
                        Term::Var(v) if bound.contains(v) => {}
                        _ => return false,
                    }
                }
                sig.insert((name.clone(), args.len()));
                true
            }
            Formula::Not(g) => walk(g, bound, sig),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => walk(l, bound, sig) && walk(r, bound, sig),
            Formula::Forall(v, b) | Formula::Exists(v, b) => {
                bound.push(v.clone());
                let ok = walk(b, bound, sig);
                bound.pop();
                ok
            }
            Formula::ElementOf(..) | Formula::SubsetOf(..) | Formula::Relation(..) => false,
        }
    }
    walk(f, &mut Vec::new(), &mut sig).then_some(sig)
}

fn eval_fo(f: &Formula, model: &FiniteModel, env: &mut Vec<(String, usize)>) -> bool {
    match f {
        Formula::Atom(name, args) => {
            let tuple: Vec<usize> = args
                .iter()
                .map(|a| match a {
                    Term::Var(v) => env
                        .iter()
                        .rev()
                        .find(|(name, _)| name == v)
                        .expect("signature check admits only bound variables")
                        .1,
                    _ => unreachable!("signature check admits only variables"),
                })
                .collect();
            model.predicates[&(name.clone(), args.len())].contains(&tuple)
        }
        Formula::Not(g) => !eval_fo(g, model, env),
        Formula::And(l, r) => eval_fo(l, model, env) && eval_fo(r, model, env),
        Formula::Or(l, r) => eval_fo(l, model, env) || eval_fo(r, model, env),
        Formula::Implies(l, r) => !eval_fo(l, model, env) || eval_fo(r, model, env),
        Formula::Iff(l, r) => eval_fo(l, model, env) == eval_fo(r, model, env),
        Formula::Forall(v, b) => (0..model.domain_size).all(|d| {
            env.push((v.clone(), d));
            let ok = eval_fo(b, model, env);
            env.pop();
            ok
        }),
        Formula::Exists(v, b) => (0..model.domain_size).any(|d| {
            env.push((v.clone(), d));
            let ok = eval_fo(b, model, env);
            env.pop();
            ok
        }),
        Formula::ElementOf(..) | Formula::SubsetOf(..) | Formula::Relation(..) => {
            unreachable!("signature check rejects set and arithmetic atoms")
        }
    }
}

fn all_tuples(domain_size: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut tuples = vec![Vec::new()];
    for _ in 0..arity {
        tuples = tuples
            .iter()
            .flat_map(|t| {
                (0..domain_size).map(move |d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    tuples
}

/// Search domains of size `0..=max_domain` for a model of all premises in
/// which the conclusion fails. The empty domain is searched first; within
/// a domain size, predicate interpretations are enumerated smallest-first,
/// so the result is deterministic.
pub fn finite_counterexample(
    premises: &[Formula],
    conclusion: &Formula,
    max_domain: usize,
) -> Option<FiniteModel> {
    let mut sig = signature(conclusion)?;
    for p in premises {
        sig.extend(signature(p)?);
    }
    let sig: Vec<(String, usize)> = sig.into_iter().collect();
    for domain_size in 0..=max_domain {
        let tuple_space: Vec<Vec<Vec<usize>>> = sig
            .iter()
            .map(|(_, arity)| all_tuples(domain_size, *arity))
            .collect();
        // Mixed-radix counter over the per-predicate subsets.
        let radices: Vec<u64> = tuple_space
            .iter()
            .map(|ts| 1u64 << ts.len().min(20))
            .collect();
        let total: u64 = radices.iter().product();
        for mut combo in 0..total {
            let mut predicates = BTreeMap::new();
            for ((key, tuples), radix) in sig.iter().zip(&tuple_space).zip(&radices) {
                let mask = combo % radix;
                combo /= radix;
                let chosen: BTreeSet<Vec<usize>> = tuples
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, t)| t.clone())
                    .collect();
                predicates.insert(key.clone(), chosen);
            }
            let model = FiniteModel {
                domain_size,
                predicates,
            };
            let mut env = Vec::new();
            if premises.iter().all(|p| eval_fo(p, &model, &mut env))
                && !eval_fo(conclusion, &model, &mut env)
            {
                return Some(model);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Hereditarily finite sets
// ---------------------------------------------------------------------------

/// A hereditarily finite set, used as a countermodel universe for the
/// membership and inclusion rules.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HfSet(pub BTreeSet<HfSet>);

impl HfSet {
    pub fn empty() -> HfSet {
        HfSet(BTreeSet::new())
    }

    pub fn singleton(x: HfSet) -> HfSet {
        HfSet(BTreeSet::from([x]))
    }

    /// The four smallest distinct sets: {}, {{}}, {{{}}}, {{}, {{}}}.
    /// Enough to separate membership from inclusion and to refute the
    /// transitivity of membership.
    pub fn universe() -> Vec<HfSet> {
        let empty = HfSet::empty();
        let one = HfSet::singleton(empty.clone());
        let two = HfSet::singleton(one.clone());
        let pair = HfSet(BTreeSet::from([empty.clone(), one.clone()]));
        vec![empty, one, two, pair]
    }

    pub fn has_element(&self, x: &HfSet) -> bool {
        self.0.contains(x)
    }

    pub fn subset_of(&self, other: &HfSet) -> bool {
        self.0.iter().all(|e| other.has_element(e))
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(out, "{{{}}}", items.join(", "))
    }
}

fn set_names(f: &Formula) -> Option<BTreeSet<String>> {
    let mut names = BTreeSet::new();
    fn operand(s: &SetExpr, names: &mut BTreeSet<String>) -> bool {
        match s {
            SetExpr::Name(n) => {
                names.insert(n.clone());
                true
            }
            SetExpr::Term(_) => false,
        }
    }
    fn walk(f: &Formula, names: &mut BTreeSet<String>) -> bool {
        match f {
            Formula::ElementOf(l, r) | Formula::SubsetOf(l, r) => {
                operand(l, names) && operand(r, names)
            }
            Formula::Not(g) => walk(g, names),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => walk(l, names) && walk(r, names),
            Formula::Atom(..)
            | Formula::Relation(..)
            | Formula::Forall(..)
            | Formula::Exists(..) => false,
        }
    }
    walk(f, &mut names).then_some(names)
}

fn eval_sets(f: &Formula, assignment: &BTreeMap<String, HfSet>) -> bool {
    let lookup = |s: &SetExpr| match s {
        SetExpr::Name(n) => assignment[n].clone(),
        SetExpr::Term(_) => unreachable!("set_names rejects term operands"),
    };
    match f {
        Formula::ElementOf(l, r) => lookup(r).has_element(&lookup(l)),
        Formula::SubsetOf(l, r) => lookup(l).subset_of(&lookup(r)),
        Formula::Not(g) => !eval_sets(g, assignment),
        Formula::And(l, r) => eval_sets(l, assignment) && eval_sets(r, assignment),
        Formula::Or(l, r) => eval_sets(l, assignment) || eval_sets(r, assignment),
        Formula::Implies(l, r) => !eval_sets(l, assignment) || eval_sets(r, assignment),
        Formula::Iff(l, r) => eval_sets(l, assignment) == eval_sets(r, assignment),
        _ => unreachable!("set_names admits only set literals and connectives"),
    }
}

/// Search assignments of small hereditarily finite sets to the set names
/// for one making every premise true and the conclusion false. Formulas
/// must be built from `in`/`subseteq` over plain set names and
/// connectives.
pub fn set_counterexample(
    premises: &[Formula],
    conclusion: &Formula,
) -> Option<BTreeMap<String, HfSet>> {
    let mut names = set_names(conclusion)?;
    for p in premises {
        names.extend(set_names(p)?);
    }
    let names: Vec<String> = names.into_iter().collect();
    let universe = HfSet::universe();
    let total = universe.len().pow(names.len() as u32);
    for mut combo in 0..total {
        let mut assignment = BTreeMap::new();
        for name in &names {
            assignment.insert(name.clone(), universe[combo % universe.len()].clone());
            combo /= universe.len();
        }
        if premises.iter().all(|p| eval_sets(p, &assignment))
            && !eval_sets(conclusion, &assignment)
        {
            return Some(assignment);
        }
    }
    None
}
