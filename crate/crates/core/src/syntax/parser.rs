//! Recursive-descent parsers for terms and formulas.
//!
//! Term grammar (operators tightest to loosest: `^`, unary `-`, `* /`,
//! `+ -`; `^` associates to the right, the others to the left):
//!
//! ```text
//! term  := sum
//! sum   := prod (("+" | "-") prod)*
//! prod  := unary (("*" | "/") unary)*
//! unary := "-" unary | "sqrt" "(" term ")" | power
//! power := atom ("^" unary)?
//! atom  := integer | identifier | "(" term ")"
//! ```
//!
//! Formulas use `~ & | -> <->` with precedence in that order (`->` and
//! `<->` associate to the right), quantifier bodies extend as far right as
//! possible, and `=`, `<`, `>`, `<=`, `>=` may be chained: `a = b < c`
//! abbreviates the conjunction of the adjacent relations.

use super::lexer::{tokenize, Spanned, SyntaxError, Tok};
use super::{Formula, RelOp, SetExpr, Term};

/// Parse a standalone arithmetic term.
pub fn parse_term(input: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(input)?;
    let t = p.sum()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parse a formula (which includes bare relation chains such as
/// `1/2 + 1/2 = 1`).
pub fn parse_formula(input: &str) -> Result<Formula, SyntaxError> {
    let mut p = Parser::new(input)?;
    let f = p.iff()?;
    p.expect_eof()?;
    Ok(f)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(input: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser {
            toks: tokenize(input)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        let i = (self.pos + 1).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].offset
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        SyntaxError::new(self.offset(), expected, self.peek().describe())
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn expect_eof(&self) -> Result<(), SyntaxError> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    // ----- terms ---------------------------------------------------------

    fn sum(&mut self) -> Result<Term, SyntaxError> {
        let mut t = self.prod()?;
        loop {
            if self.eat(&Tok::Plus) {
                t = Term::add(t, self.prod()?);
            } else if self.eat(&Tok::Minus) {
                t = Term::sub(t, self.prod()?);
            } else {
                return Ok(t);
            }
        }
    }

    fn prod(&mut self) -> Result<Term, SyntaxError> {
        let mut t = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                t = Term::mul(t, self.unary()?);
            } else if self.eat(&Tok::Slash) {
                t = Term::div(t, self.unary()?);
            } else {
                return Ok(t);
            }
        }
    }

    fn unary(&mut self) -> Result<Term, SyntaxError> {
        if self.eat(&Tok::Minus) {
            return Ok(Term::neg(self.unary()?));
        }
        if self.eat(&Tok::Sqrt) {
            self.expect(Tok::LParen, "`(`")?;
            let t = self.sum()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(Term::sqrt(t));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Term, SyntaxError> {
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            let exponent = self.unary()?;
            return Ok(Term::exp(base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Term::Int(n))
            }
            Tok::Ident(name) => {
                let offset = self.offset();
                if !valid_var_name(&name) {
                    return Err(SyntaxError::new(
                        offset,
                        &["a variable (lowercase letter followed by lowercase letters, digits or `_`)"],
                        format!("identifier `{name}`"),
                    ));
                }
                self.bump();
                Ok(Term::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let t = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.error(&["an integer", "a variable", "`(`"])),
        }
    }

    // ----- formulas ------------------------------------------------------

    fn iff(&mut self) -> Result<Formula, SyntaxError> {
        let l = self.implication()?;
        if self.eat(&Tok::IffArrow) {
            let r = self.iff()?;
            return Ok(Formula::iff(l, r));
        }
        Ok(l)
    }

    fn implication(&mut self) -> Result<Formula, SyntaxError> {
        let l = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let r = self.implication()?;
            return Ok(Formula::implies(l, r));
        }
        Ok(l)
    }

    fn disjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, SyntaxError> {
        let mut f = self.funary()?;
        while self.eat(&Tok::Amp) {
            f = Formula::and(f, self.funary()?);
        }
        Ok(f)
    }

    fn funary(&mut self) -> Result<Formula, SyntaxError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.funary()?))
            }
            Tok::Forall | Tok::Exists => self.quantified(),
            _ => self.fatomic(),
        }
    }

    fn quantified(&mut self) -> Result<Formula, SyntaxError> {
        let universal = matches!(self.bump(), Tok::Forall);
        let var = match self.peek().clone() {
            Tok::Ident(name) if valid_var_name(&name) => {
                self.bump();
                name
            }
            _ => return Err(self.error(&["a quantified variable (lowercase)"])),
        };
        self.expect(Tok::Dot, "`.`")?;
        // The body extends as far right as possible.
        let body = self.iff()?;
        Ok(if universal {
            Formula::forall(var, body)
        } else {
            Formula::exists(var, body)
        })
    }

    fn fatomic(&mut self) -> Result<Formula, SyntaxError> {
        // Set relation with a bare identifier on the left: `x in A`,
        // `A subseteq B`. Handled up front because set names need not be
        // valid term variables.
        if let Tok::Ident(name) = self.peek().clone() {
            if matches!(self.peek2(), Tok::In | Tok::Subseteq) {
                self.bump();
                return self.set_relation(SetExpr::Name(name));
            }
        }

        // Try to read a term followed by a relation symbol; fall back to a
        // formula-level atom or group when that fails before consuming a
        // compound term.
        let snapshot = self.pos;
        match self.relational() {
            Ok(f) => return Ok(f),
            Err(Fallback::Fatal(e)) => return Err(e),
            Err(Fallback::Soft) => self.pos = snapshot,
        }

        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.iff()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat(&Tok::LParen) {
                    let mut args = vec![self.sum()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.sum()?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Formula::Atom(name, args))
                } else {
                    Ok(Formula::Atom(name, Vec::new()))
                }
            }
            _ => Err(self.error(&["a formula"])),
        }
    }

    /// A term followed by a chain of relations, or a set relation whose
    /// left side is a compound term.
    fn relational(&mut self) -> Result<Formula, Fallback> {
        let first = self.sum().map_err(|_| Fallback::Soft)?;
        let compound = !matches!(first, Term::Var(_) | Term::Int(_));
        match self.peek() {
            Tok::Eq | Tok::Lt | Tok::Gt | Tok::Le | Tok::Ge => {
                let mut formula: Option<Formula> = None;
                let mut prev = first;
                while let Some(rel) = self.rel_op() {
                    let next = self.sum().map_err(Fallback::Fatal)?;
                    let link = Formula::relation(rel, prev.clone(), next.clone());
                    formula = Some(match formula {
                        None => link,
                        Some(acc) => Formula::and(acc, link),
                    });
                    prev = next;
                }
                Ok(formula.expect("at least one relation parsed"))
            }
            Tok::In => {
                self.bump();
                self.set_relation_rhs(SetExpr::term(first), false)
                    .map_err(Fallback::Fatal)
            }
            Tok::Subseteq => Err(Fallback::Fatal(SyntaxError::new(
                self.offset(),
                &["`subseteq` between set names"],
                "a compound term on its left side".to_string(),
            ))),
            _ if compound => {
                // A compound term can only continue as a relation; report
                // this as the real error instead of re-parsing the input as
                // a formula.
                Err(Fallback::Fatal(self.error(&[
                    "`=`", "`<`", "`>`", "`<=`", "`>=`", "`in`",
                ])))
            }
            _ => Err(Fallback::Soft),
        }
    }

    fn rel_op(&mut self) -> Option<RelOp> {
        let rel = match self.peek() {
            Tok::Eq => RelOp::Eq,
            Tok::Lt => RelOp::Lt,
            Tok::Gt => RelOp::Gt,
            Tok::Le => RelOp::Le,
            Tok::Ge => RelOp::Ge,
            _ => return None,
        };
        self.bump();
        Some(rel)
    }

    fn set_relation(&mut self, lhs: SetExpr) -> Result<Formula, SyntaxError> {
        let subset = matches!(self.bump(), Tok::Subseteq);
        self.set_relation_rhs(lhs, subset)
    }

    fn set_relation_rhs(&mut self, lhs: SetExpr, subset: bool) -> Result<Formula, SyntaxError> {
        let rhs = self.set_operand(subset)?;
        if subset {
            if let SetExpr::Term(_) = lhs {
                return Err(self.error(&["a set name on the left of `subseteq`"]));
            }
            Ok(Formula::SubsetOf(lhs, rhs))
        } else {
            Ok(Formula::ElementOf(lhs, rhs))
        }
    }

    fn set_operand(&mut self, require_name: bool) -> Result<SetExpr, SyntaxError> {
        if require_name {
            return match self.peek().clone() {
                Tok::Ident(name) => {
                    self.bump();
                    Ok(SetExpr::Name(name))
                }
                _ => Err(self.error(&["a set name"])),
            };
        }
        // Prefer a term when one parses (a bare variable canonicalizes to a
        // name); otherwise accept any identifier as a set name.
        let snapshot = self.pos;
        if let Ok(t) = self.sum() {
            return Ok(SetExpr::term(t));
        }
        self.pos = snapshot;
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(SetExpr::Name(name))
            }
            _ => Err(self.error(&["a set name or term"])),
        }
    }
}

enum Fallback {
    /// Rewind and try another production.
    Soft,
    /// Report this error as-is.
    Fatal(SyntaxError),
}

fn valid_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::super::{print_formula, print_term};
    use super::*;
    use crate::syntax::BinaryOp;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(t("a + b*c"), Term::add(t("a"), Term::mul(t("b"), t("c"))));
        assert_eq!(t("a - b - c"), Term::sub(Term::sub(t("a"), t("b")), t("c")));
        assert_eq!(t("a/b/c"), Term::div(Term::div(t("a"), t("b")), t("c")));
        assert_eq!(t("a^b^c"), Term::exp(t("a"), Term::exp(t("b"), t("c"))));
        assert_eq!(t("-a^2"), Term::neg(Term::exp(t("a"), t("2"))));
        assert_eq!(t("a^-b"), Term::exp(t("a"), Term::neg(t("b"))));
        assert_eq!(t("--a"), Term::neg(Term::neg(t("a"))));
    }

    #[test]
    fn sqrt_is_a_keyword_function() {
        assert_eq!(t("sqrt(4) + 1"), Term::add(Term::sqrt(t("4")), t("1")));
        assert!(parse_term("sqrt + 1").is_err());
    }

    #[test]
    fn uppercase_identifiers_are_not_term_variables() {
        assert!(parse_term("X + 1").is_err());
        assert!(parse_term("aX").is_err());
    }

    #[test]
    fn formula_precedence() {
        assert_eq!(
            f("~p & q | r -> s <-> t"),
            Formula::iff(
                Formula::implies(
                    Formula::or(
                        Formula::and(Formula::not(Formula::atom("p")), Formula::atom("q")),
                        Formula::atom("r")
                    ),
                    Formula::atom("s")
                ),
                Formula::atom("t")
            )
        );
        // `->` associates to the right.
        assert_eq!(
            f("p -> q -> r"),
            Formula::implies(
                Formula::atom("p"),
                Formula::implies(Formula::atom("q"), Formula::atom("r"))
            )
        );
    }

    #[test]
    fn quantifier_body_extends_right() {
        assert_eq!(
            f("forall x. P(x) -> Q(x)"),
            Formula::forall(
                "x",
                Formula::implies(
                    Formula::pred("P", vec![t("x")]),
                    Formula::pred("Q", vec![t("x")])
                )
            )
        );
        assert_eq!(
            f("~forall x. p(x)"),
            Formula::not(Formula::forall("x", Formula::pred("p", vec![t("x")])))
        );
    }

    #[test]
    fn relation_chains_become_conjunctions() {
        assert_eq!(
            f("a = b = c"),
            Formula::and(
                Formula::equals(t("a"), t("b")),
                Formula::equals(t("b"), t("c"))
            )
        );
        assert_eq!(f("1/2 + 1/2 = 1"), Formula::equals(t("1/2 + 1/2"), t("1")));
    }

    #[test]
    fn set_relations() {
        assert_eq!(
            f("A subseteq B"),
            Formula::SubsetOf(SetExpr::name("A"), SetExpr::name("B"))
        );
        assert_eq!(
            f("x in A"),
            Formula::ElementOf(SetExpr::name("x"), SetExpr::name("A"))
        );
        assert_eq!(
            f("x + 1 in A"),
            Formula::ElementOf(SetExpr::Term(t("x + 1")), SetExpr::name("A"))
        );
        assert!(parse_formula("x + 1 subseteq A").is_err());
    }

    #[test]
    fn parenthesized_term_versus_formula_group() {
        assert_eq!(f("(a + b) = c"), Formula::equals(t("a + b"), t("c")));
        assert_eq!(
            f("(p -> q) & p"),
            Formula::and(
                Formula::implies(Formula::atom("p"), Formula::atom("q")),
                Formula::atom("p")
            )
        );
        assert_eq!(f("(p)"), Formula::atom("p"));
    }

    #[test]
    fn predicate_atoms_take_term_arguments() {
        assert_eq!(f("P(x, y + 1)"), Formula::pred("P", vec![t("x"), t("y + 1")]));
        assert_eq!(f("p"), Formula::atom("p"));
    }

    #[test]
    fn error_positions_point_at_the_problem() {
        let e = parse_term("1 + ").unwrap_err();
        assert_eq!(e.offset, 4);
        let e = parse_formula("x + 1").unwrap_err();
        assert_eq!(e.offset, 5, "compound term without relation: {e}");
        let e = parse_formula("forall X. p").unwrap_err();
        assert_eq!(e.offset, 7);
    }

    #[test]
    fn keyword_collision_in_operator_namespace() {
        assert_eq!(
            BinaryOp::from_name("^"),
            Some(BinaryOp::Exp),
            "operator names resolve"
        );
        assert!(parse_formula("p & in").is_err());
    }

    #[test]
    fn printer_round_trips_through_parser() {
        for src in [
            "1/2 + 1/2",
            "(a + b)^2",
            "a - (b - c)",
            "(a^b)^c",
            "3*(1/2 + 1/2)",
            "-a^2 + -b",
            "sqrt(a + b)",
        ] {
            let term = t(src);
            assert_eq!(parse_term(&print_term(&term)).unwrap(), term, "term {src}");
        }
        for src in [
            "~(p & q)",
            "p -> q -> r",
            "forall x. exists y. P(x, y)",
            "(forall x. P(x)) & q",
            "a = b = c",
            "x in A & A subseteq B",
            "~p <-> (q | r)",
        ] {
            let formula = f(src);
            assert_eq!(
                parse_formula(&print_formula(&formula)).unwrap(),
                formula,
                "formula {src}"
            );
        }
    }
}
