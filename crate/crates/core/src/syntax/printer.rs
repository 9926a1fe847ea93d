//! Canonical text rendering for terms, formulas and set expressions.
//!
//! The printers emit exactly the surface syntax the parsers accept, with
//! parentheses only where precedence demands them, so `parse(print(x))`
//! reproduces `x` for every tree the parsers can produce.

use super::{BinaryOp, Formula, SetExpr, Term, UnaryOp};
use num_traits::Signed;

/// Render a term.
pub fn print_term(t: &Term) -> String {
    let mut buf = String::new();
    fmt_term(&mut buf, t, 1);
    buf
}

/// Render a formula.
pub fn print_formula(f: &Formula) -> String {
    let mut buf = String::new();
    fmt_formula(&mut buf, f, 0);
    buf
}

/// Render a set expression.
pub fn print_set(s: &SetExpr) -> String {
    match s {
        SetExpr::Name(name) => name.clone(),
        SetExpr::Term(t) => print_term(t),
    }
}

// Term precedence levels, loosest binding first.
const P_SUM: u8 = 1;
const P_PROD: u8 = 2;
const P_NEG: u8 = 3;
const P_EXP: u8 = 4;
const P_ATOM: u8 = 5;

fn term_prec(t: &Term) -> u8 {
    match t {
        // A negative literal prints with a leading minus, so it binds like
        // negation. (The parser itself only ever produces non-negative
        // literals under an explicit negation node.)
        Term::Int(n) if n.is_negative() => P_NEG,
        Term::Int(_) | Term::Var(_) => P_ATOM,
        Term::Unary(UnaryOp::Neg, _) => P_NEG,
        Term::Unary(UnaryOp::Sqrt, _) => P_EXP,
        Term::Binary(op, _, _) => match op {
            BinaryOp::Add | BinaryOp::Sub => P_SUM,
            BinaryOp::Mul | BinaryOp::Div => P_PROD,
            BinaryOp::Exp => P_EXP,
        },
    }
}

fn fmt_term(buf: &mut String, t: &Term, min_prec: u8) {
    let prec = term_prec(t);
    let parens = prec < min_prec;
    if parens {
        buf.push('(');
    }
    match t {
        Term::Int(n) => buf.push_str(&n.to_string()),
        Term::Var(v) => buf.push_str(v),
        Term::Unary(UnaryOp::Neg, a) => {
            buf.push('-');
            fmt_term(buf, a, P_NEG);
        }
        Term::Unary(UnaryOp::Sqrt, a) => {
            buf.push_str("sqrt(");
            fmt_term(buf, a, 1);
            buf.push(')');
        }
        Term::Binary(op, l, r) => match op {
            BinaryOp::Add | BinaryOp::Sub => {
                fmt_term(buf, l, P_SUM);
                buf.push(' ');
                buf.push_str(op.symbol());
                buf.push(' ');
                fmt_term(buf, r, P_SUM + 1);
            }
            BinaryOp::Mul | BinaryOp::Div => {
                fmt_term(buf, l, P_PROD);
                buf.push_str(op.symbol());
                fmt_term(buf, r, P_PROD + 1);
            }
            BinaryOp::Exp => {
                // `^` associates to the right and its base must be atomic,
                // so `(a^b)^c` and `(-a)^b` keep their parentheses while
                // `a^b^c` and `a^-b` do not.
                fmt_term(buf, l, P_ATOM);
                buf.push('^');
                fmt_term(buf, r, P_NEG);
            }
        },
    }
    if parens {
        buf.push(')');
    }
}

// Formula precedence levels, loosest binding first. Quantifiers take the
// whole rest of the formula, so they only print bare at the top of an
// operand when nothing follows them.
const F_QUANT: u8 = 0;
const F_IFF: u8 = 1;
const F_IMPLIES: u8 = 2;
const F_OR: u8 = 3;
const F_AND: u8 = 4;
const F_NOT: u8 = 5;
const F_ATOM: u8 = 6;

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Forall(_, _) | Formula::Exists(_, _) => F_QUANT,
        Formula::Iff(_, _) => F_IFF,
        Formula::Implies(_, _) => F_IMPLIES,
        Formula::Or(_, _) => F_OR,
        Formula::And(_, _) => F_AND,
        Formula::Not(_) => F_NOT,
        Formula::Atom(_, _)
        | Formula::ElementOf(_, _)
        | Formula::SubsetOf(_, _)
        | Formula::Relation(_, _, _) => F_ATOM,
    }
}

fn fmt_formula(buf: &mut String, f: &Formula, min_prec: u8) {
    let prec = formula_prec(f);
    let parens = prec < min_prec;
    if parens {
        buf.push('(');
    }
    match f {
        Formula::Atom(name, args) => {
            buf.push_str(name);
            if !args.is_empty() {
                buf.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        buf.push_str(", ");
                    }
                    fmt_term(buf, a, 1);
                }
                buf.push(')');
            }
        }
        Formula::Not(g) => {
            buf.push('~');
            // `~` accepts a negation or quantifier directly, but a bare
            // quantifier swallows everything to the end of the group, so
            // it only prints unparenthesized when this formula already
            // extends that far.
            match **g {
                Formula::Not(_) => fmt_formula(buf, g, min_prec.min(F_NOT)),
                Formula::Forall(_, _) | Formula::Exists(_, _) if min_prec == F_QUANT => {
                    fmt_formula(buf, g, F_QUANT)
                }
                _ => fmt_formula(buf, g, F_NOT),
            }
        }
        Formula::And(l, r) => {
            fmt_formula(buf, l, F_AND);
            buf.push_str(" & ");
            fmt_formula(buf, r, F_AND + 1);
        }
        Formula::Or(l, r) => {
            fmt_formula(buf, l, F_OR);
            buf.push_str(" | ");
            fmt_formula(buf, r, F_OR + 1);
        }
        Formula::Implies(l, r) => {
            fmt_formula(buf, l, F_IMPLIES + 1);
            buf.push_str(" -> ");
            fmt_formula(buf, r, F_IMPLIES);
        }
        Formula::Iff(l, r) => {
            fmt_formula(buf, l, F_IFF + 1);
            buf.push_str(" <-> ");
            fmt_formula(buf, r, F_IFF);
        }
        Formula::Forall(v, body) => {
            buf.push_str("forall ");
            buf.push_str(v);
            buf.push_str(". ");
            fmt_formula(buf, body, F_QUANT);
        }
        Formula::Exists(v, body) => {
            buf.push_str("exists ");
            buf.push_str(v);
            buf.push_str(". ");
            fmt_formula(buf, body, F_QUANT);
        }
        Formula::ElementOf(l, r) => {
            buf.push_str(&print_set(l));
            buf.push_str(" in ");
            buf.push_str(&print_set(r));
        }
        Formula::SubsetOf(l, r) => {
            buf.push_str(&print_set(l));
            buf.push_str(" subseteq ");
            buf.push_str(&print_set(r));
        }
        Formula::Relation(op, l, r) => {
            fmt_term(buf, l, 1);
            buf.push(' ');
            buf.push_str(op.symbol());
            buf.push(' ');
            fmt_term(buf, r, 1);
        }
    }
    if parens {
        buf.push(')');
    }
}
