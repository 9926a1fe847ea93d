//! Metavariable patterns and matching for rule schemas.
//!
//! Inference-rule schemas are ordinary formulas in which some atom names
//! stand for whole formulas, some quantified variables stand for arbitrary
//! variables, and some set names stand for arbitrary set expressions; a
//! [`FormulaPattern`] pairs the schema formulas with those declarations.
//! Matching is conclusion-first: the conclusion schema is matched against
//! the claim (binding its metavariables), then each premise schema is
//! matched against the available premises with backtracking, in premise
//! order. Formula matching is modulo renaming of bound variables and
//! commutativity of `&` and `|`; nothing else is normalized.
//!
//! Term patterns for manipulation rules are simpler: every variable of the
//! pattern is a metavariable binding a whole subterm, matching is strictly
//! syntactic, and repeated metavariables must bind identical subterms.

use crate::syntax::{equiv_mod_ac, Formula, SetExpr, Term};
use std::collections::{BTreeMap, BTreeSet};

/// Instantiation of a rule schema, keyed by metavariable name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    /// Formula metavariables (e.g. `A`, `B`).
    pub formulas: BTreeMap<String, Formula>,
    /// Term metavariables (e.g. `a`, `m`), used by manipulation rules.
    pub terms: BTreeMap<String, Term>,
    /// Bound-variable metavariables of quantifier schemas.
    pub vars: BTreeMap<String, String>,
    /// Set metavariables of the `in`/`subseteq` schemas.
    pub sets: BTreeMap<String, SetExpr>,
    /// Operator slots (analogy and type-rule diagnoses), as symbols.
    pub ops: BTreeMap<String, String>,
}

impl Bindings {
    /// All bindings rendered to display strings, for reports.
    pub fn printed(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for (k, f) in &self.formulas {
            out.insert(k.clone(), crate::syntax::print_formula(f));
        }
        for (k, t) in &self.terms {
            out.insert(k.clone(), crate::syntax::print_term(t));
        }
        for (k, v) in &self.vars {
            out.insert(k.clone(), v.clone());
        }
        for (k, s) in &self.sets {
            out.insert(k.clone(), crate::syntax::print_set(s));
        }
        for (k, o) in &self.ops {
            out.insert(k.clone(), o.clone());
        }
        out
    }
}

/// A rule schema: premises and conclusion over declared metavariables.
#[derive(Debug, Clone)]
pub struct FormulaPattern {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub formula_metas: BTreeSet<String>,
    pub var_metas: BTreeSet<String>,
    pub set_metas: BTreeSet<String>,
}

impl FormulaPattern {
    /// Build a pattern from schema source text. Panics on unparsable
    /// schemas, which are programming errors in a rule catalog.
    pub fn new(
        premises: &[&str],
        conclusion: &str,
        formula_metas: &[&str],
        var_metas: &[&str],
        set_metas: &[&str],
    ) -> FormulaPattern {
        let parse = |s: &str| {
            crate::syntax::parse_formula(s)
                .unwrap_or_else(|e| panic!("invalid rule schema {s:?}: {e}"))
        };
        FormulaPattern {
            premises: premises.iter().map(|s| parse(s)).collect(),
            conclusion: parse(conclusion),
            formula_metas: formula_metas.iter().map(|s| s.to_string()).collect(),
            var_metas: var_metas.iter().map(|s| s.to_string()).collect(),
            set_metas: set_metas.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Match a whole rule against a step: the conclusion schema against the
/// claim, then every premise schema against some available premise
/// (backtracking, premises may be reused). Returns every distinct
/// instantiation, in conclusion-match then premise order.
pub fn match_rule(rule: &FormulaPattern, premises: &[Formula], claim: &Formula) -> Vec<Bindings> {
    let mut out: Vec<Bindings> = Vec::new();
    for st in match_formula(&rule.conclusion, claim, rule, MatchState::default()) {
        complete_premises(rule, 0, premises, st, &mut out);
    }
    out
}

fn complete_premises(
    rule: &FormulaPattern,
    idx: usize,
    premises: &[Formula],
    st: MatchState,
    out: &mut Vec<Bindings>,
) {
    let Some(schema) = rule.premises.get(idx) else {
        let b = st.into_bindings();
        if !out.contains(&b) {
            out.push(b);
        }
        return;
    };
    for premise in premises {
        for st2 in match_formula(schema, premise, rule, st.clone()) {
            complete_premises(rule, idx + 1, premises, st2, out);
        }
    }
}

/// Internal match state. Formula captures are stored *canonically*: every
/// variable bound by a metavariable binder on the path to the capture is
/// renamed to an internal marker derived from the metavariable, so that
/// alpha-variant occurrences of the same schema body unify across premises
/// and conclusion.
#[derive(Debug, Clone, Default)]
struct MatchState {
    formulas: BTreeMap<String, Formula>,
    sets: BTreeMap<String, SetExpr>,
    /// First concrete name seen for each variable metavariable.
    var_display: BTreeMap<String, String>,
    /// Binder stack: (metavariable, concrete variable) pairs, outermost
    /// first.
    env: Vec<(String, String)>,
}

fn marker(meta: &str) -> String {
    format!("\u{1}{meta}")
}

impl MatchState {
    fn into_bindings(self) -> Bindings {
        let mut formulas = BTreeMap::new();
        for (meta, canon) in self.formulas {
            let mut f = canon;
            for (var_meta, display) in &self.var_display {
                f = rename_var(&f, &marker(var_meta), display);
            }
            formulas.insert(meta, f);
        }
        Bindings {
            formulas,
            terms: BTreeMap::new(),
            vars: self.var_display,
            sets: self.sets,
            ops: BTreeMap::new(),
        }
    }

    fn canonicalize(&self, f: &Formula) -> Formula {
        let mut out = f.clone();
        // Innermost binders last in env; renaming in reverse order makes
        // an inner binding win when two metavariables matched the same
        // concrete name.
        for (meta, concrete) in self.env.iter().rev() {
            out = rename_var(&out, concrete, &marker(meta));
        }
        out
    }

    /// The concrete variable a schema variable refers to here: a binder
    /// match for variable metavariables, the literal name otherwise.
    fn resolve_var<'a>(&'a self, schema_var: &'a str) -> &'a str {
        for (meta, concrete) in self.env.iter().rev() {
            if meta == schema_var {
                return concrete;
            }
        }
        schema_var
    }
}

fn match_formula(
    pat: &Formula,
    tgt: &Formula,
    rule: &FormulaPattern,
    st: MatchState,
) -> Vec<MatchState> {
    match (pat, tgt) {
        (Formula::Atom(name, args), _) if args.is_empty() && rule.formula_metas.contains(name) => {
            let canon = st.canonicalize(tgt);
            match st.formulas.get(name) {
                Some(prev) if equiv_mod_ac(prev, &canon) => vec![st],
                Some(_) => vec![],
                None => {
                    let mut st = st;
                    st.formulas.insert(name.clone(), canon);
                    vec![st]
                }
            }
        }
        (Formula::Atom(pn, pa), Formula::Atom(tn, ta)) => {
            if pn == tn && pa.len() == ta.len() && pa
                .iter()
                .zip(ta)
                .all(|(p, t)| term_matches(p, t, &st))
            {
                vec![st]
            } else {
                vec![]
            }
        }
        (Formula::Not(p), Formula::Not(t)) => match_formula(p, t, rule, st),
        (Formula::And(p1, p2), Formula::And(t1, t2))
        | (Formula::Or(p1, p2), Formula::Or(t1, t2)) => {
            let mut out = match_pair(p1, t1, p2, t2, rule, st.clone());
            out.extend(match_pair(p1, t2, p2, t1, rule, st));
            out
        }
        (Formula::Implies(p1, p2), Formula::Implies(t1, t2))
        | (Formula::Iff(p1, p2), Formula::Iff(t1, t2)) => match_pair(p1, t1, p2, t2, rule, st),
        (Formula::Forall(pv, pb), Formula::Forall(tv, tb))
        | (Formula::Exists(pv, pb), Formula::Exists(tv, tb))
            if matches!(pat, Formula::Forall(..)) == matches!(tgt, Formula::Forall(..)) =>
        {
            if rule.var_metas.contains(pv) {
                let mut st2 = st;
                st2.var_display
                    .entry(pv.clone())
                    .or_insert_with(|| tv.clone());
                st2.env.push((pv.clone(), tv.clone()));
                let depth = st2.env.len();
                match_formula(pb, tb, rule, st2)
                    .into_iter()
                    .map(|mut s| {
                        s.env.truncate(depth - 1);
                        s
                    })
                    .collect()
            } else if pv == tv {
                match_formula(pb, tb, rule, st)
            } else {
                vec![]
            }
        }
        (Formula::ElementOf(p1, p2), Formula::ElementOf(t1, t2))
        | (Formula::SubsetOf(p1, p2), Formula::SubsetOf(t1, t2)) => {
            match_set(p1, t1, rule, st)
                .into_iter()
                .flat_map(|s| match_set(p2, t2, rule, s))
                .collect()
        }
        (Formula::Relation(po, pl, pr), Formula::Relation(to, tl, tr)) => {
            if po == to && term_matches(pl, tl, &st) && term_matches(pr, tr, &st) {
                vec![st]
            } else {
                vec![]
            }
        }
        _ => vec![],
    }
}

fn match_pair(
    p1: &Formula,
    t1: &Formula,
    p2: &Formula,
    t2: &Formula,
    rule: &FormulaPattern,
    st: MatchState,
) -> Vec<MatchState> {
    match_formula(p1, t1, rule, st)
        .into_iter()
        .flat_map(|s| match_formula(p2, t2, rule, s))
        .collect()
}

fn match_set(pat: &SetExpr, tgt: &SetExpr, rule: &FormulaPattern, st: MatchState) -> Vec<MatchState> {
    if let SetExpr::Name(n) = pat {
        if rule.set_metas.contains(n) {
            return match st.sets.get(n) {
                Some(prev) if sets_equal(prev, tgt) => vec![st],
                Some(_) => vec![],
                None => {
                    let mut st = st;
                    st.sets.insert(n.clone(), tgt.clone());
                    vec![st]
                }
            };
        }
    }
    if sets_equal(pat, tgt) {
        vec![st]
    } else {
        vec![]
    }
}

fn sets_equal(a: &SetExpr, b: &SetExpr) -> bool {
    match (a, b) {
        (SetExpr::Name(x), SetExpr::Name(y)) => x == y,
        (SetExpr::Name(x), SetExpr::Term(Term::Var(y)))
        | (SetExpr::Term(Term::Var(y)), SetExpr::Name(x)) => x == y,
        (SetExpr::Term(s), SetExpr::Term(t)) => s == t,
        _ => false,
    }
}

/// Schema terms contain no term metavariables, but their variables may be
/// bound by variable-metavariable binders; compare after resolving those.
fn term_matches(pat: &Term, tgt: &Term, st: &MatchState) -> bool {
    match (pat, tgt) {
        (Term::Var(pv), Term::Var(tv)) => st.resolve_var(pv) == tv,
        (Term::Int(a), Term::Int(b)) => a == b,
        (Term::Unary(po, pa), Term::Unary(to, ta)) => po == to && term_matches(pa, ta, st),
        (Term::Binary(po, pl, pr), Term::Binary(to, tl, tr)) => {
            po == to && term_matches(pl, tl, st) && term_matches(pr, tr, st)
        }
        _ => false,
    }
}

/// Rename free occurrences of variable `from` to `to` (in quantifier
/// binders and in terms); binders that rebind `from` shadow it.
pub fn rename_var(f: &Formula, from: &str, to: &str) -> Formula {
    fn term(t: &Term, from: &str, to: &str) -> Term {
        match t {
            Term::Var(v) if v == from => Term::var(to),
            Term::Int(_) | Term::Var(_) => t.clone(),
            Term::Unary(op, a) => Term::Unary(*op, Box::new(term(a, from, to))),
            Term::Binary(op, l, r) => {
                Term::Binary(*op, Box::new(term(l, from, to)), Box::new(term(r, from, to)))
            }
        }
    }
    fn set(s: &SetExpr, from: &str, to: &str) -> SetExpr {
        match s {
            SetExpr::Name(n) if n == from => SetExpr::Name(to.to_string()),
            SetExpr::Name(_) => s.clone(),
            SetExpr::Term(t) => SetExpr::term(term(t, from, to)),
        }
    }
    match f {
        Formula::Atom(n, args) => {
            Formula::Atom(n.clone(), args.iter().map(|a| term(a, from, to)).collect())
        }
        Formula::Not(g) => Formula::not(rename_var(g, from, to)),
        Formula::And(l, r) => Formula::and(rename_var(l, from, to), rename_var(r, from, to)),
        Formula::Or(l, r) => Formula::or(rename_var(l, from, to), rename_var(r, from, to)),
        Formula::Implies(l, r) => {
            Formula::implies(rename_var(l, from, to), rename_var(r, from, to))
        }
        Formula::Iff(l, r) => Formula::iff(rename_var(l, from, to), rename_var(r, from, to)),
        Formula::Forall(v, _) if v == from => f.clone(),
        Formula::Forall(v, b) => Formula::forall(v.clone(), rename_var(b, from, to)),
        Formula::Exists(v, _) if v == from => f.clone(),
        Formula::Exists(v, b) => Formula::exists(v.clone(), rename_var(b, from, to)),
        Formula::ElementOf(l, r) => Formula::ElementOf(set(l, from, to), set(r, from, to)),
        Formula::SubsetOf(l, r) => Formula::SubsetOf(set(l, from, to), set(r, from, to)),
        Formula::Relation(op, l, r) => {
            Formula::Relation(*op, term(l, from, to), term(r, from, to))
        }
    }
}

/// Instantiate a schema formula under `b`: formula metavariables splice in
/// their bound formulas, variable metavariables rename binders and their
/// occurrences, set metavariables substitute set expressions, and term
/// metavariables substitute subterms.
pub fn instantiate(schema: &Formula, b: &Bindings) -> Formula {
    fn term(t: &Term, b: &Bindings) -> Term {
        match t {
            Term::Var(v) => {
                if let Some(bound) = b.terms.get(v) {
                    bound.clone()
                } else if let Some(name) = b.vars.get(v) {
                    Term::var(name)
                } else {
                    t.clone()
                }
            }
            Term::Int(_) => t.clone(),
            Term::Unary(op, a) => Term::Unary(*op, Box::new(term(a, b))),
            Term::Binary(op, l, r) => {
                Term::Binary(*op, Box::new(term(l, b)), Box::new(term(r, b)))
            }
        }
    }
    fn set(s: &SetExpr, b: &Bindings) -> SetExpr {
        match s {
            SetExpr::Name(n) => b.sets.get(n).cloned().unwrap_or_else(|| s.clone()),
            SetExpr::Term(t) => SetExpr::term(term(t, b)),
        }
    }
    match schema {
        Formula::Atom(name, args) if args.is_empty() => b
            .formulas
            .get(name)
            .cloned()
            .unwrap_or_else(|| schema.clone()),
        Formula::Atom(name, args) => {
            Formula::Atom(name.clone(), args.iter().map(|a| term(a, b)).collect())
        }
        Formula::Not(g) => Formula::not(instantiate(g, b)),
        Formula::And(l, r) => Formula::and(instantiate(l, b), instantiate(r, b)),
        Formula::Or(l, r) => Formula::or(instantiate(l, b), instantiate(r, b)),
        Formula::Implies(l, r) => Formula::implies(instantiate(l, b), instantiate(r, b)),
        Formula::Iff(l, r) => Formula::iff(instantiate(l, b), instantiate(r, b)),
        Formula::Forall(v, body) => {
            let name = b.vars.get(v).cloned().unwrap_or_else(|| v.clone());
            Formula::forall(name, instantiate(body, b))
        }
        Formula::Exists(v, body) => {
            let name = b.vars.get(v).cloned().unwrap_or_else(|| v.clone());
            Formula::exists(name, instantiate(body, b))
        }
        Formula::ElementOf(l, r) => Formula::ElementOf(set(l, b), set(r, b)),
        Formula::SubsetOf(l, r) => Formula::SubsetOf(set(l, b), set(r, b)),
        Formula::Relation(op, l, r) => Formula::Relation(*op, term(l, b), term(r, b)),
    }
}

/// Syntactic term-pattern matching: every pattern variable binds a whole
/// subterm; repeated variables must bind syntactically identical subterms.
pub fn match_term(pattern: &Term, target: &Term, binding: &mut BTreeMap<String, Term>) -> bool {
    match (pattern, target) {
        (Term::Var(v), _) => match binding.get(v) {
            Some(prev) => prev == target,
            None => {
                binding.insert(v.clone(), target.clone());
                true
            }
        },
        (Term::Int(a), Term::Int(b)) => a == b,
        (Term::Unary(po, pa), Term::Unary(to, ta)) => po == to && match_term(pa, ta, binding),
        (Term::Binary(po, pl, pr), Term::Binary(to, tl, tr)) => {
            po == to && match_term(pl, tl, binding) && match_term(pr, tr, binding)
        }
        _ => false,
    }
}

/// Substitute a term-pattern's variables from `binding`; unbound
/// variables stay.
pub fn subst_term(pattern: &Term, binding: &BTreeMap<String, Term>) -> Term {
    match pattern {
        Term::Var(v) => binding.get(v).cloned().unwrap_or_else(|| pattern.clone()),
        Term::Int(_) => pattern.clone(),
        Term::Unary(op, a) => Term::Unary(*op, Box::new(subst_term(a, binding))),
        Term::Binary(op, l, r) => Term::Binary(
            *op,
            Box::new(subst_term(l, binding)),
            Box::new(subst_term(r, binding)),
        ),
    }
}

/// Find the term `t` with `target = body[var := t]`, if one exists: the
/// two formulas must agree everywhere except that free occurrences of
/// `var` in `body` correspond to `t` in `target`, the same `t` at every
/// occurrence, and `t` must not mention variables bound at an occurrence.
/// When `var` does not occur free, the formulas must be identical and the
/// variable itself is returned as the (vacuous) instantiation.
pub fn match_substitution(body: &Formula, target: &Formula, var: &str) -> Option<Term> {
    let mut found: Option<Term> = None;
    let mut bound = Vec::new();
    if walk_subst(body, target, var, &mut bound, &mut found) {
        Some(found.unwrap_or_else(|| Term::var(var)))
    } else {
        None
    }
}

fn walk_subst(
    body: &Formula,
    target: &Formula,
    var: &str,
    bound: &mut Vec<String>,
    found: &mut Option<Term>,
) -> bool {
    match (body, target) {
        (Formula::Atom(bn, ba), Formula::Atom(tn, ta)) => {
            bn == tn
                && ba.len() == ta.len()
                && ba
                    .iter()
                    .zip(ta)
                    .all(|(b, t)| walk_subst_term(b, t, var, bound, found))
        }
        (Formula::Not(b), Formula::Not(t)) => walk_subst(b, t, var, bound, found),
        (Formula::And(b1, b2), Formula::And(t1, t2))
        | (Formula::Or(b1, b2), Formula::Or(t1, t2))
        | (Formula::Implies(b1, b2), Formula::Implies(t1, t2))
        | (Formula::Iff(b1, b2), Formula::Iff(t1, t2)) => {
            walk_subst(b1, t1, var, bound, found) && walk_subst(b2, t2, var, bound, found)
        }
        (Formula::Forall(bv, bb), Formula::Forall(tv, tb))
        | (Formula::Exists(bv, bb), Formula::Exists(tv, tb))
            if matches!(body, Formula::Forall(..)) == matches!(target, Formula::Forall(..)) =>
        {
            if bv != tv {
                return false;
            }
            if bv == var {
                // Shadowed: no substitution happens below.
                return bb == tb;
            }
            bound.push(bv.clone());
            let ok = walk_subst(bb, tb, var, bound, found);
            bound.pop();
            ok
        }
        (Formula::ElementOf(b1, b2), Formula::ElementOf(t1, t2))
        | (Formula::SubsetOf(b1, b2), Formula::SubsetOf(t1, t2)) => {
            walk_subst_set(b1, t1, var, bound, found) && walk_subst_set(b2, t2, var, bound, found)
        }
        (Formula::Relation(bo, bl, br), Formula::Relation(to, tl, tr)) => {
            bo == to
                && walk_subst_term(bl, tl, var, bound, found)
                && walk_subst_term(br, tr, var, bound, found)
        }
        _ => false,
    }
}

fn walk_subst_set(
    body: &SetExpr,
    target: &SetExpr,
    var: &str,
    bound: &mut Vec<String>,
    found: &mut Option<Term>,
) -> bool {
    match (body, target) {
        (SetExpr::Term(b), SetExpr::Term(t)) => walk_subst_term(b, t, var, bound, found),
        // A set name that is the variable being instantiated would be a
        // sort confusion; names only match themselves.
        _ => sets_equal(body, target),
    }
}

fn walk_subst_term(
    body: &Term,
    target: &Term,
    var: &str,
    bound: &mut Vec<String>,
    found: &mut Option<Term>,
) -> bool {
    match body {
        Term::Var(v) if v == var => {
            if target.free_vars().iter().any(|fv| bound.contains(fv)) {
                return false; // instantiating term would be captured
            }
            match found {
                Some(prev) => prev == target,
                None => {
                    *found = Some(target.clone());
                    true
                }
            }
        }
        _ => match (body, target) {
            (Term::Int(a), Term::Int(b)) => a == b,
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Unary(bo, ba), Term::Unary(to, ta)) => {
                bo == to && walk_subst_term(ba, ta, var, bound, found)
            }
            (Term::Binary(bo, bl, br), Term::Binary(to, tl, tr)) => {
                bo == to
                    && walk_subst_term(bl, tl, var, bound, found)
                    && walk_subst_term(br, tr, var, bound, found)
            }
            _ => false,
        },
    }
}
