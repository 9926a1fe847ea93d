//! Positions: paths of 0-based child indices addressing subexpressions.
//!
//! The empty path addresses the root. For terms the children of a binary
//! node are its left (0) and right (1) operands; a unary node has the
//! single child 0. Formulas extend the same scheme across connectives,
//! quantifier bodies, predicate arguments, relation sides and set
//! operands, so one path type addresses every node of a parsed statement.

use super::{Formula, SetExpr, Term};

/// Path of 0-based child indices from the root; `[]` is the root itself.
pub type Position = Vec<usize>;

/// Error for a path that does not address a node of the given expression.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("position [{}] does not exist in the expression", fmt_path(.0))]
pub struct InvalidPosition(pub Position);

fn fmt_path(p: &Position) -> String {
    p.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Borrowed view of a node in the unified formula tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRef<'a> {
    Formula(&'a Formula),
    Term(&'a Term),
    Set(&'a SetExpr),
}

/// Owned replacement for a node addressed in the unified formula tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeOwned {
    Formula(Formula),
    Term(Term),
}

/// Coarse classification of a [`NodeRef`], mostly for reporting.
pub fn node_kind(node: NodeRef<'_>) -> &'static str {
    match node {
        NodeRef::Formula(_) => "formula",
        NodeRef::Term(_) => "term",
        NodeRef::Set(_) => "set",
    }
}

// ----- terms -------------------------------------------------------------

/// All positions of `t` in pre-order (root first, children left to right).
pub fn enumerate_positions(t: &Term) -> Vec<Position> {
    let mut out = Vec::with_capacity(t.size());
    walk_term(t, &mut Vec::new(), &mut out);
    out
}

fn walk_term(t: &Term, path: &mut Position, out: &mut Vec<Position>) {
    out.push(path.clone());
    let children: &[&Term] = match t {
        Term::Int(_) | Term::Var(_) => &[],
        Term::Unary(_, a) => &[a],
        Term::Binary(_, l, r) => &[l, r],
    };
    for (i, child) in children.iter().enumerate() {
        path.push(i);
        walk_term(child, path, out);
        path.pop();
    }
}

/// The subterm of `t` at `pos`.
pub fn subterm_at<'a>(t: &'a Term, pos: &Position) -> Result<&'a Term, InvalidPosition> {
    let mut node = t;
    for (depth, &i) in pos.iter().enumerate() {
        node = match (node, i) {
            (Term::Unary(_, a), 0) => a,
            (Term::Binary(_, l, _), 0) => l,
            (Term::Binary(_, _, r), 1) => r,
            _ => return Err(InvalidPosition(pos[..=depth].to_vec())),
        };
    }
    Ok(node)
}

/// `t` with the subterm at `pos` replaced by `new`.
pub fn replace_at(t: &Term, pos: &Position, new: Term) -> Result<Term, InvalidPosition> {
    fn go(t: &Term, rest: &[usize], full: &Position, new: Term) -> Result<Term, InvalidPosition> {
        let Some((&i, tail)) = rest.split_first() else {
            return Ok(new);
        };
        let invalid = || {
            let depth = full.len() - rest.len();
            InvalidPosition(full[..=depth].to_vec())
        };
        match (t, i) {
            (Term::Unary(op, a), 0) => Ok(Term::Unary(*op, Box::new(go(a, tail, full, new)?))),
            (Term::Binary(op, l, r), 0) => Ok(Term::Binary(
                *op,
                Box::new(go(l, tail, full, new)?),
                r.clone(),
            )),
            (Term::Binary(op, l, r), 1) => Ok(Term::Binary(
                *op,
                l.clone(),
                Box::new(go(r, tail, full, new)?),
            )),
            _ => Err(invalid()),
        }
    }
    go(t, pos, pos, new)
}

/// Whether `l` and `r` agree everywhere outside the subtrees at `pos`:
/// same shape and content along and around the path, with the two subterms
/// at `pos` themselves ignored.
pub fn contexts_equal(l: &Term, r: &Term, pos: &Position) -> bool {
    let Some((&i, tail)) = pos.split_first() else {
        return true;
    };
    let rest = tail.to_vec();
    match (l, r) {
        (Term::Unary(lo, la), Term::Unary(ro, ra)) if lo == ro && i == 0 => {
            contexts_equal(la, ra, &rest)
        }
        (Term::Binary(lo, ll, lr), Term::Binary(ro, rl, rr)) if lo == ro => match i {
            0 => lr == rr && contexts_equal(ll, rl, &rest),
            1 => ll == rl && contexts_equal(lr, rr, &rest),
            _ => false,
        },
        _ => false,
    }
}

// ----- formulas ----------------------------------------------------------

/// All positions of `f` in pre-order, paired with the node each addresses.
pub fn formula_positions(f: &Formula) -> Vec<(Position, NodeRef<'_>)> {
    let mut out = Vec::new();
    walk_formula(NodeRef::Formula(f), &mut Vec::new(), &mut out);
    out
}

fn children_of<'a>(node: NodeRef<'a>) -> Vec<NodeRef<'a>> {
    match node {
        NodeRef::Formula(f) => match f {
            Formula::Atom(_, args) => args.iter().map(NodeRef::Term).collect(),
            Formula::Not(g) => vec![NodeRef::Formula(g)],
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                vec![NodeRef::Formula(l), NodeRef::Formula(r)]
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => {
                vec![NodeRef::Formula(body)]
            }
            Formula::ElementOf(l, r) | Formula::SubsetOf(l, r) => {
                vec![NodeRef::Set(l), NodeRef::Set(r)]
            }
            Formula::Relation(_, l, r) => vec![NodeRef::Term(l), NodeRef::Term(r)],
        },
        NodeRef::Term(t) => match t {
            Term::Int(_) | Term::Var(_) => Vec::new(),
            Term::Unary(_, a) => vec![NodeRef::Term(a)],
            Term::Binary(_, l, r) => vec![NodeRef::Term(l), NodeRef::Term(r)],
        },
        NodeRef::Set(s) => match s {
            SetExpr::Name(_) => Vec::new(),
            SetExpr::Term(t) => vec![NodeRef::Term(t)],
        },
    }
}

fn walk_formula<'a>(
    node: NodeRef<'a>,
    path: &mut Position,
    out: &mut Vec<(Position, NodeRef<'a>)>,
) {
    out.push((path.clone(), node));
    for (i, child) in children_of(node).into_iter().enumerate() {
        path.push(i);
        walk_formula(child, path, out);
        path.pop();
    }
}

/// The node of `f` addressed by `pos` in the unified tree.
pub fn formula_node_at<'a>(f: &'a Formula, pos: &Position) -> Result<NodeRef<'a>, InvalidPosition> {
    let mut node = NodeRef::Formula(f);
    for (depth, &i) in pos.iter().enumerate() {
        node = children_of(node)
            .into_iter()
            .nth(i)
            .ok_or_else(|| InvalidPosition(pos[..=depth].to_vec()))?;
    }
    Ok(node)
}

/// `f` with the node at `pos` replaced. The replacement must match the
/// kind of node addressed (a formula for a formula node, a term for a term
/// node); set nodes cannot be replaced wholesale.
pub fn replace_formula_at(
    f: &Formula,
    pos: &Position,
    new: NodeOwned,
) -> Result<Formula, InvalidPosition> {
    match go_formula(f, pos, 0, new)? {
        NodeOwned::Formula(g) => Ok(g),
        NodeOwned::Term(_) => Err(InvalidPosition(pos.clone())),
    }
}

fn invalid_at(pos: &Position, depth: usize) -> InvalidPosition {
    InvalidPosition(pos[..=depth.min(pos.len().saturating_sub(1))].to_vec())
}

fn go_formula(
    f: &Formula,
    pos: &Position,
    depth: usize,
    new: NodeOwned,
) -> Result<NodeOwned, InvalidPosition> {
    if depth == pos.len() {
        return match new {
            NodeOwned::Formula(_) => Ok(new),
            NodeOwned::Term(_) => Err(invalid_at(pos, depth)),
        };
    }
    let i = pos[depth];
    let bad = || invalid_at(pos, depth);
    let wrap = |g: Formula| Ok(NodeOwned::Formula(g));
    match (f, i) {
        (Formula::Atom(name, args), _) if i < args.len() => {
            let mut args = args.clone();
            args[i] = go_term(&args[i], pos, depth + 1, new)?;
            wrap(Formula::Atom(name.clone(), args))
        }
        (Formula::Not(g), 0) => wrap(Formula::not(unwrap_formula(
            go_formula(g, pos, depth + 1, new)?,
            pos,
            depth,
        )?)),
        (Formula::And(l, r), 0) => wrap(Formula::and(
            unwrap_formula(go_formula(l, pos, depth + 1, new)?, pos, depth)?,
            (**r).clone(),
        )),
        (Formula::And(l, r), 1) => wrap(Formula::and(
            (**l).clone(),
            unwrap_formula(go_formula(r, pos, depth + 1, new)?, pos, depth)?,
        )),
        (Formula::Or(l, r), 0) => wrap(Formula::or(
            unwrap_formula(go_formula(l, pos, depth + 1, new)?, pos, depth)?,
            (**r).clone(),
        )),
        (Formula::Or(l, r), 1) => wrap(Formula::or(
            (**l).clone(),
            unwrap_formula(go_formula(r, pos, depth + 1, new)?, pos, depth)?,
        )),
        (Formula::Implies(l, r), 0) => wrap(Formula::implies(
            unwrap_formula(go_formula(l, pos, depth + 1, new)?, pos, depth)?,
            (**r).clone(),
        )),
        (Formula::Implies(l, r), 1) => wrap(Formula::implies(
            (**l).clone(),
            unwrap_formula(go_formula(r, pos, depth + 1, new)?, pos, depth)?,
        )),
        (Formula::Iff(l, r), 0) => wrap(Formula::iff(
            unwrap_formula(go_formula(l, pos, depth + 1, new)?, pos, depth)?,
            (**r).clone(),
        )),
        (Formula::Iff(l, r), 1) => wrap(Formula::iff(
            (**l).clone(),
            unwrap_formula(go_formula(r, pos, depth + 1, new)?, pos, depth)?,
        )),
        (Formula::Forall(v, body), 0) => wrap(Formula::forall(
            v.clone(),
            unwrap_formula(go_formula(body, pos, depth + 1, new)?, pos, depth)?,
        )),
        (Formula::Exists(v, body), 0) => wrap(Formula::exists(
            v.clone(),
            unwrap_formula(go_formula(body, pos, depth + 1, new)?, pos, depth)?,
        )),
        (Formula::ElementOf(l, r), 0) => wrap(Formula::ElementOf(
            go_set(l, pos, depth + 1, new)?,
            r.clone(),
        )),
        (Formula::ElementOf(l, r), 1) => wrap(Formula::ElementOf(
            l.clone(),
            go_set(r, pos, depth + 1, new)?,
        )),
        (Formula::SubsetOf(l, r), 0) => wrap(Formula::SubsetOf(
            go_set(l, pos, depth + 1, new)?,
            r.clone(),
        )),
        (Formula::SubsetOf(l, r), 1) => wrap(Formula::SubsetOf(
            l.clone(),
            go_set(r, pos, depth + 1, new)?,
        )),
        (Formula::Relation(op, l, r), 0) => wrap(Formula::Relation(
            *op,
            go_term(l, pos, depth + 1, new)?,
            r.clone(),
        )),
        (Formula::Relation(op, l, r), 1) => wrap(Formula::Relation(
            *op,
            l.clone(),
            go_term(r, pos, depth + 1, new)?,
        )),
        _ => Err(bad()),
    }
}

fn unwrap_formula(node: NodeOwned, pos: &Position, depth: usize) -> Result<Formula, InvalidPosition> {
    match node {
        NodeOwned::Formula(g) => Ok(g),
        NodeOwned::Term(_) => Err(invalid_at(pos, depth)),
    }
}

fn go_term(
    t: &Term,
    pos: &Position,
    depth: usize,
    new: NodeOwned,
) -> Result<Term, InvalidPosition> {
    let rest = pos[depth..].to_vec();
    match new {
        NodeOwned::Term(nt) => {
            replace_at(t, &rest, nt).map_err(|_| invalid_at(pos, depth.max(1) - 1))
        }
        NodeOwned::Formula(_) => Err(invalid_at(pos, depth.max(1) - 1)),
    }
}

fn go_set(
    s: &SetExpr,
    pos: &Position,
    depth: usize,
    new: NodeOwned,
) -> Result<SetExpr, InvalidPosition> {
    if depth == pos.len() {
        // Whole set expressions are not replaceable through this interface.
        return Err(invalid_at(pos, depth));
    }
    match (s, pos[depth]) {
        (SetExpr::Term(t), 0) => Ok(SetExpr::Term(go_term(t, pos, depth + 1, new)?)),
        _ => Err(invalid_at(pos, depth)),
    }
}
