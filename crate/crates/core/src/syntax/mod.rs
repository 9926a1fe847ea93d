//! Abstract syntax for arithmetic terms and first-order formulas, together
//! with a parser, a printer and position-based subterm access.
//!
//! Terms are the arithmetic expressions that appear in exercise steps:
//! integer constants, variables, negation, square roots and the binary
//! operators `+ - * / ^`. Formulas layer propositional connectives,
//! quantifiers, set relations (`in`, `subseteq`) and relation chains
//! (`a = b < c`) on top of terms.

mod lexer;
mod parser;
mod position;
mod printer;

pub use lexer::SyntaxError;
pub use parser::{parse_formula, parse_term};
pub use position::{
    contexts_equal, enumerate_positions, formula_node_at, formula_positions, node_kind,
    replace_at, replace_formula_at, subterm_at, InvalidPosition, NodeOwned, NodeRef, Position,
};
pub use printer::{print_formula, print_set, print_term};

use num_bigint::BigInt;
use std::collections::BTreeSet;
use std::fmt;

/// Unary term operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnaryOp {
    Neg,
    Sqrt,
}

/// Binary term operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Exp,
}

impl BinaryOp {
    /// The surface symbol of the operator.
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Exp => "^",
        }
    }

    /// All binary operators, in the order they are enumerated elsewhere.
    pub const ALL: [BinaryOp; 5] = [
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Exp,
    ];

    /// Parse an operator from its surface symbol or spelled-out name.
    pub fn from_name(s: &str) -> Option<BinaryOp> {
        match s {
            "+" | "add" => Some(BinaryOp::Add),
            "-" | "sub" => Some(BinaryOp::Sub),
            "*" | "mul" => Some(BinaryOp::Mul),
            "/" | "div" => Some(BinaryOp::Div),
            "^" | "exp" => Some(BinaryOp::Exp),
            _ => None,
        }
    }
}

impl fmt::Display for BinaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl UnaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sqrt => "sqrt",
        }
    }
}

impl fmt::Display for UnaryOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Comparison operators usable in relation chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelOp {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Lt => "<",
            RelOp::Gt => ">",
            RelOp::Le => "<=",
            RelOp::Ge => ">=",
        }
    }
}

impl fmt::Display for RelOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// An arithmetic term.
///
/// Integer constants are kept non-negative by every constructor in this
/// crate; negative numbers are represented as `Neg` applied to a constant,
/// mirroring the surface grammar (the lexer has no negative literals).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Int(BigInt),
    Var(String),
    Unary(UnaryOp, Box<Term>),
    Binary(BinaryOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn int(n: i64) -> Term {
        if n < 0 {
            Term::neg(Term::Int(BigInt::from(-n)))
        } else {
            Term::Int(BigInt::from(n))
        }
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn neg(t: Term) -> Term {
        Term::Unary(UnaryOp::Neg, Box::new(t))
    }

    pub fn sqrt(t: Term) -> Term {
        Term::Unary(UnaryOp::Sqrt, Box::new(t))
    }

    pub fn binary(op: BinaryOp, l: Term, r: Term) -> Term {
        Term::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn add(l: Term, r: Term) -> Term {
        Term::binary(BinaryOp::Add, l, r)
    }

    pub fn sub(l: Term, r: Term) -> Term {
        Term::binary(BinaryOp::Sub, l, r)
    }

    pub fn mul(l: Term, r: Term) -> Term {
        Term::binary(BinaryOp::Mul, l, r)
    }

    pub fn div(l: Term, r: Term) -> Term {
        Term::binary(BinaryOp::Div, l, r)
    }

    pub fn exp(l: Term, r: Term) -> Term {
        Term::binary(BinaryOp::Exp, l, r)
    }

    /// Free variables of the term, sorted by name.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Int(_) => {}
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Unary(_, t) => t.collect_vars(out),
            Term::Binary(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    /// Variables that occur somewhere below a `sqrt`. The sampler prefers
    /// non-negative values for these so that radicands stay defined.
    pub fn radicand_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Int(_) | Term::Var(_) => {}
            Term::Unary(op, t) => {
                if *op == UnaryOp::Sqrt {
                    t.collect_vars(out);
                }
                t.radicand_vars(out);
            }
            Term::Binary(_, l, r) => {
                l.radicand_vars(out);
                r.radicand_vars(out);
            }
        }
    }

    /// Number of nodes, used to keep generated terms small.
    pub fn size(&self) -> usize {
        match self {
            Term::Int(_) | Term::Var(_) => 1,
            Term::Unary(_, t) => 1 + t.size(),
            Term::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

/// A set operand of `in` / `subseteq`: either a named set or an arithmetic
/// term acting as an element. A bare identifier always parses as `Name`,
/// so matching over set operands stays deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetExpr {
    Name(String),
    Term(Term),
}

impl SetExpr {
    /// Canonicalizing constructor: a bare variable becomes a `Name`.
    pub fn term(t: Term) -> SetExpr {
        match t {
            Term::Var(v) => SetExpr::Name(v),
            other => SetExpr::Term(other),
        }
    }

    pub fn name(n: impl Into<String>) -> SetExpr {
        SetExpr::Name(n.into())
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_set(self))
    }
}

/// A first-order formula over terms and named sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// Predicate atom, e.g. `P` or `P(x, y)`.
    Atom(String, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    ElementOf(SetExpr, SetExpr),
    SubsetOf(SetExpr, SetExpr),
    Relation(RelOp, Term, Term),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into(), Vec::new())
    }

    pub fn pred(name: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(name.into(), args)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn relation(rel: RelOp, l: Term, r: Term) -> Formula {
        Formula::Relation(rel, l, r)
    }

    pub fn equals(l: Term, r: Term) -> Formula {
        Formula::Relation(RelOp::Eq, l, r)
    }

    /// Free (term) variables of the formula, sorted by name.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let term_vars = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<String>| {
            for v in t.free_vars() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Atom(_, args) => {
                for a in args {
                    term_vars(a, bound, out);
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Formula::ElementOf(a, b) | Formula::SubsetOf(a, b) => {
                for s in [a, b] {
                    match s {
                        SetExpr::Name(n) => {
                            if !bound.contains(n) {
                                out.insert(n.clone());
                            }
                        }
                        SetExpr::Term(t) => term_vars(t, bound, out),
                    }
                }
            }
            Formula::Relation(_, l, r) => {
                term_vars(l, bound, out);
                term_vars(r, bound, out);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

/// Structural equality of formulas up to renaming of bound variables.
pub fn alpha_eq(f: &Formula, g: &Formula) -> bool {
    cmp_formula(f, g, &mut Vec::new(), false)
}

/// Equality up to renaming of bound variables and commutativity of the
/// binary connectives `&` and `|`. This is the relation used when matching
/// inference-rule schemas against concrete premises.
pub fn equiv_mod_ac(f: &Formula, g: &Formula) -> bool {
    cmp_formula(f, g, &mut Vec::new(), true)
}

fn cmp_var(a: &str, b: &str, env: &[(String, String)]) -> bool {
    // Walk binders from the innermost outwards; the first binder that
    // captures either name must capture both.
    for (l, r) in env.iter().rev() {
        let lhit = l == a;
        let rhit = r == b;
        if lhit || rhit {
            return lhit && rhit;
        }
    }
    a == b
}

fn cmp_term(s: &Term, t: &Term, env: &[(String, String)]) -> bool {
    match (s, t) {
        (Term::Int(a), Term::Int(b)) => a == b,
        (Term::Var(a), Term::Var(b)) => cmp_var(a, b, env),
        (Term::Unary(o1, a), Term::Unary(o2, b)) => o1 == o2 && cmp_term(a, b, env),
        (Term::Binary(o1, a1, b1), Term::Binary(o2, a2, b2)) => {
            o1 == o2 && cmp_term(a1, a2, env) && cmp_term(b1, b2, env)
        }
        _ => false,
    }
}

fn cmp_set(s: &SetExpr, t: &SetExpr, env: &[(String, String)]) -> bool {
    match (s, t) {
        (SetExpr::Name(a), SetExpr::Name(b)) => cmp_var(a, b, env),
        (SetExpr::Term(a), SetExpr::Term(b)) => cmp_term(a, b, env),
        // Tolerate non-canonical `Term(Var)` operands built programmatically.
        (SetExpr::Name(a), SetExpr::Term(Term::Var(b)))
        | (SetExpr::Term(Term::Var(a)), SetExpr::Name(b)) => cmp_var(a, b, env),
        _ => false,
    }
}

fn cmp_formula(f: &Formula, g: &Formula, env: &mut Vec<(String, String)>, ac: bool) -> bool {
    match (f, g) {
        (Formula::Atom(n1, a1), Formula::Atom(n2, a2)) => {
            n1 == n2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| cmp_term(x, y, env))
        }
        (Formula::Not(a), Formula::Not(b)) => cmp_formula(a, b, env, ac),
        (Formula::And(a1, b1), Formula::And(a2, b2))
        | (Formula::Or(a1, b1), Formula::Or(a2, b2)) => {
            (cmp_formula(a1, a2, env, ac) && cmp_formula(b1, b2, env, ac))
                || (ac && cmp_formula(a1, b2, env, ac) && cmp_formula(b1, a2, env, ac))
        }
        (Formula::Implies(a1, b1), Formula::Implies(a2, b2))
        | (Formula::Iff(a1, b1), Formula::Iff(a2, b2)) => {
            cmp_formula(a1, a2, env, ac) && cmp_formula(b1, b2, env, ac)
        }
        (Formula::Forall(v1, b1), Formula::Forall(v2, b2))
        | (Formula::Exists(v1, b1), Formula::Exists(v2, b2)) => {
            env.push((v1.clone(), v2.clone()));
            let r = cmp_formula(b1, b2, env, ac);
            env.pop();
            r
        }
        (Formula::ElementOf(a1, b1), Formula::ElementOf(a2, b2))
        | (Formula::SubsetOf(a1, b1), Formula::SubsetOf(a2, b2)) => {
            cmp_set(a1, a2, env) && cmp_set(b1, b2, env)
        }
        (Formula::Relation(r1, a1, b1), Formula::Relation(r2, a2, b2)) => {
            r1 == r2 && cmp_term(a1, a2, env) && cmp_term(b1, b2, env)
        }
        _ => false,
    }
}

/// A relation chain `t0 r0 t1 r1 t2 ...` extracted from a claim formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub terms: Vec<Term>,
    pub rels: Vec<RelOp>,
}

impl Chain {
    /// The links of the chain as `(lhs, rel, rhs)` triples.
    pub fn links(&self) -> impl Iterator<Item = (&Term, RelOp, &Term)> {
        self.rels
            .iter()
            .enumerate()
            .map(move |(i, r)| (&self.terms[i], *r, &self.terms[i + 1]))
    }

    /// The composite relation of the whole chain, if the link relations
    /// compose: `=` is neutral, `<`/`<=` compose with each other (strict if
    /// any link is strict), likewise `>`/`>=`. Mixed directions do not
    /// compose.
    pub fn overall(&self) -> Option<RelOp> {
        let mut acc = RelOp::Eq;
        for r in &self.rels {
            acc = match (acc, r) {
                (a, RelOp::Eq) => a,
                (RelOp::Eq, b) => *b,
                (RelOp::Lt, RelOp::Lt | RelOp::Le) | (RelOp::Le, RelOp::Lt) => RelOp::Lt,
                (RelOp::Le, RelOp::Le) => RelOp::Le,
                (RelOp::Gt, RelOp::Gt | RelOp::Ge) | (RelOp::Ge, RelOp::Gt) => RelOp::Gt,
                (RelOp::Ge, RelOp::Ge) => RelOp::Ge,
                _ => return None,
            };
        }
        Some(acc)
    }
}

/// Recognize a claim of chain shape: either a single relation or a
/// conjunction of relations whose adjacent endpoints coincide syntactically
/// (which is what a chain like `a = b = c` parses to).
pub fn extract_chain(f: &Formula) -> Option<Chain> {
    let mut rels = Vec::new();
    if !flatten_relations(f, &mut rels) {
        return None;
    }
    let mut terms: Vec<Term> = vec![rels[0].1.clone()];
    let mut ops = Vec::new();
    for (op, l, r) in rels {
        if terms.last().unwrap() != &l {
            return None;
        }
        ops.push(op);
        terms.push(r);
    }
    Some(Chain { terms, rels: ops })
}

fn flatten_relations(f: &Formula, out: &mut Vec<(RelOp, Term, Term)>) -> bool {
    match f {
        Formula::And(l, r) => flatten_relations(l, out) && flatten_relations(r, out),
        Formula::Relation(op, l, r) => {
            out.push((*op, l.clone(), r.clone()));
            true
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_matches_printer() {
        let t = Term::add(Term::div(Term::int(1), Term::int(2)), Term::var("x"));
        assert_eq!(t.to_string(), "1/2 + x");
    }

    #[test]
    fn free_vars_respect_binders() {
        let f = parse_formula("forall x. P(x, y) & x in A").unwrap();
        let fv = f.free_vars();
        assert!(fv.contains("y"));
        assert!(fv.contains("A"));
        assert!(!fv.contains("x"));
    }

    #[test]
    fn alpha_equivalence_renames_bound_variables() {
        let f = parse_formula("forall x. exists y. P(x, y)").unwrap();
        let g = parse_formula("forall u. exists v. P(u, v)").unwrap();
        let h = parse_formula("forall u. exists v. P(v, u)").unwrap();
        assert!(alpha_eq(&f, &g));
        assert!(!alpha_eq(&f, &h));
    }

    #[test]
    fn alpha_distinguishes_free_variables() {
        let f = parse_formula("P(x)").unwrap();
        let g = parse_formula("P(y)").unwrap();
        assert!(!alpha_eq(&f, &g));
    }

    #[test]
    fn ac_equivalence_commutes_conjunction() {
        let f = parse_formula("p & (q | r)").unwrap();
        let g = parse_formula("(r | q) & p").unwrap();
        assert!(equiv_mod_ac(&f, &g));
        assert!(!alpha_eq(&f, &g));
    }

    #[test]
    fn chains_flatten_to_linked_relations() {
        let f = parse_formula("a = b = c").unwrap();
        let chain = extract_chain(&f).expect("chain");
        assert_eq!(chain.terms.len(), 3);
        assert_eq!(chain.rels, vec![RelOp::Eq, RelOp::Eq]);
        assert_eq!(chain.overall(), Some(RelOp::Eq));

        let mixed = parse_formula("a = b < c").unwrap();
        assert_eq!(extract_chain(&mixed).unwrap().overall(), Some(RelOp::Lt));

        let broken = parse_formula("a = b & c = d").unwrap();
        assert!(extract_chain(&broken).is_none());
    }

    #[test]
    fn chain_with_opposite_directions_has_no_overall_relation() {
        let f = parse_formula("a < b > c").unwrap();
        assert_eq!(extract_chain(&f).unwrap().overall(), None);
    }
}
