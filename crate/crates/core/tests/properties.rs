//! Randomized invariants over the public interface.
//!
//! These properties complement the frozen golden tests: printing and
//! parsing invert each other on the whole expression space, the position
//! algebra is self-consistent, comparison is deterministic, generated
//! fallacy instances never leak through the sound checker, generated
//! manipulation instances survive their disguises, and disabling an
//! index removes exactly that index's diagnoses.

use misstep_core::anti_atp::{LogicalFallacy, RuleIndex};
use misstep_core::antiterms::{diagnose_manipulation, all_manipulations, ManipulationId};
use misstep_core::corpus::{generate_corpus, generate_double_faults};
use misstep_core::eval::{equal_terms, EvalConfig};
use misstep_core::pipeline::{diagnose_step, ExerciseConfig, StepOutcome};
use misstep_core::sound_atp::{all_rules, verify_semantically, verify_step};
use misstep_core::syntax::{
    enumerate_positions, extract_chain, parse_formula, parse_term, print_formula, print_term,
    replace_at, subterm_at, BinaryOp, Formula, RelOp, SetExpr, Term,
};
use proptest::prelude::*;

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

fn arb_binary_op() -> impl Strategy<Value = BinaryOp> {
    proptest::sample::select(BinaryOp::ALL.to_vec())
}

fn arb_rel_op() -> impl Strategy<Value = RelOp> {
    proptest::sample::select(vec![RelOp::Eq, RelOp::Lt, RelOp::Gt, RelOp::Le, RelOp::Ge])
}

fn arb_var() -> impl Strategy<Value = String> {
    proptest::sample::select(vec!["a", "b", "x", "y", "z"]).prop_map(String::from)
}

/// Terms as the parser produces them: integer leaves are nonnegative,
/// negation is always an explicit unary node.
fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0i64..=9).prop_map(Term::int),
        arb_var().prop_map(Term::var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (arb_binary_op(), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Term::binary(op, l, r)),
            inner.clone().prop_map(Term::neg),
            inner.prop_map(Term::sqrt),
        ]
    })
}

fn arb_set_name() -> impl Strategy<Value = SetExpr> {
    proptest::sample::select(vec!["A", "B", "C"]).prop_map(SetExpr::name)
}

/// Set operands as the grammar admits them for `in`: a set name or a
/// term, with bare variables canonicalized to names.
fn arb_set_expr() -> impl Strategy<Value = SetExpr> {
    prop_oneof![arb_set_name(), arb_term().prop_map(SetExpr::term)]
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        proptest::sample::select(vec!["p", "q", "r"]).prop_map(Formula::atom),
        (
            proptest::sample::select(vec!["P", "Q"]),
            proptest::collection::vec(arb_term(), 1..=2)
        )
            .prop_map(|(name, args)| Formula::Atom(name.into(), args)),
        (arb_rel_op(), arb_term(), arb_term())
            .prop_map(|(rel, l, r)| Formula::relation(rel, l, r)),
        (arb_set_expr(), arb_set_expr())
            .prop_map(|(l, r)| Formula::ElementOf(l, r)),
        // `subseteq` is only grammatical between set names.
        (arb_set_name(), arb_set_name())
            .prop_map(|(l, r)| Formula::SubsetOf(l, r)),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::iff(l, r)),
            (arb_var(), inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)),
            (arb_var(), inner).prop_map(|(v, f)| Formula::exists(v, f)),
        ]
    })
}

fn fallacy_names() -> Vec<&'static str> {
    LogicalFallacy::ALL.into_iter().map(|f| f.name()).collect()
}

fn manipulation_names() -> Vec<&'static str> {
    ManipulationId::ALL.into_iter().map(|m| m.name()).collect()
}

// ---------------------------------------------------------------------------
// Syntax and positions
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn printing_and_parsing_terms_invert(t in arb_term()) {
        let printed = print_term(&t);
        let parsed = parse_term(&printed);
        prop_assert_eq!(parsed.as_ref(), Ok(&t), "printed form: {}", printed);
    }

    #[test]
    fn printing_and_parsing_formulas_invert(f in arb_formula()) {
        let printed = print_formula(&f);
        let parsed = parse_formula(&printed);
        prop_assert_eq!(parsed.as_ref(), Ok(&f), "printed form: {}", printed);
    }

    #[test]
    fn subterm_and_replace_are_inverse(
        t in arb_term(),
        s in arb_term(),
        index in any::<prop::sample::Index>(),
    ) {
        let positions = enumerate_positions(&t);
        let pos = &positions[index.index(positions.len())];

        let sub = subterm_at(&t, pos).expect("enumerated positions resolve").clone();
        prop_assert_eq!(
            replace_at(&t, pos, sub).expect("enumerated positions replace"),
            t.clone(),
            "replacing a subterm by itself is the identity"
        );

        let replaced = replace_at(&t, pos, s.clone()).expect("enumerated positions replace");
        prop_assert_eq!(
            subterm_at(&replaced, pos).expect("position survives replacement"),
            &s,
            "reading back a replacement returns it"
        );
    }

    #[test]
    fn chains_round_trip_through_their_conjunction(
        t0 in arb_term(),
        t1 in arb_term(),
        t2 in arb_term(),
        r0 in arb_rel_op(),
        r1 in arb_rel_op(),
    ) {
        let formula = Formula::and(
            Formula::relation(r0, t0.clone(), t1.clone()),
            Formula::relation(r1, t1.clone(), t2.clone()),
        );
        let chain = extract_chain(&formula).expect("adjacent relations form a chain");
        let links: Vec<_> = chain.links().collect();
        prop_assert_eq!(links.len(), 2);
        prop_assert_eq!(links[0], (&t0, r0, &t1));
        prop_assert_eq!(links[1], (&t1, r1, &t2));
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn comparison_is_deterministic(l in arb_term(), r in arb_term()) {
        let cfg = EvalConfig::default();
        prop_assert_eq!(
            equal_terms(&l, &r, &cfg),
            equal_terms(&l, &r, &cfg),
            "same seed, same verdict"
        );
    }

    #[test]
    fn every_term_equals_itself_or_is_undefined(t in arb_term()) {
        let cfg = EvalConfig::default();
        let verdict = equal_terms(&t, &t, &cfg);
        prop_assert!(
            !verdict.fails(),
            "a term never compares unequal to itself, got {:?} for {}",
            verdict,
            print_term(&t)
        );
    }
}

// ---------------------------------------------------------------------------
// Generated instances against the checker
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// No instance of a fallacy schema is accepted by the sound checker,
    /// and the anti-checker names the instantiated schema.
    #[test]
    fn fallacy_instances_never_leak(
        name in proptest::sample::select(fallacy_names()),
        seed in any::<u64>(),
    ) {
        let record = generate_corpus(name, 1, seed).unwrap().remove(0);
        let step = record.to_step().expect("generated records parse");
        prop_assert!(
            !verify_step(&step, &all_rules(), &EvalConfig::default()).is_verified(),
            "record {} must not verify",
            record.id
        );
        prop_assert!(
            !verify_semantically(&step).is_verified(),
            "record {} must not verify semantically",
            record.id
        );
        let report = diagnose_step(&step, &ExerciseConfig::default());
        let primary = match &report.outcome {
            StepOutcome::Diagnosed { primary, .. } => primary.index.name(),
            other => return Err(TestCaseError::fail(format!(
                "record {} not diagnosed: {other:?}", record.id
            ))),
        };
        prop_assert_eq!(primary, name);
    }

    /// Disguises never hide a single fault: the injected manipulation is
    /// reported no matter which sound rewrites dress it up.
    #[test]
    fn disguised_manipulations_are_still_found(
        name in proptest::sample::select(manipulation_names()),
        seed in any::<u64>(),
    ) {
        let record = generate_corpus(name, 1, seed).unwrap().remove(0);
        let step = record.to_step().expect("generated records parse");
        let mut config = ExerciseConfig::default();
        config.max_alternatives = 8;
        let report = diagnose_step(&step, &config);
        let names: Vec<&str> = match &report.outcome {
            StepOutcome::Diagnosed { primary, alternatives } => {
                std::iter::once(primary.index.name())
                    .chain(alternatives.iter().map(|d| d.index.name()))
                    .collect()
            }
            _ => Vec::new(),
        };
        prop_assert!(
            names.contains(&name),
            "record {}: label missing from {names:?}",
            record.id
        );
    }

    /// A second independent fault destroys every single-rule explanation.
    #[test]
    fn double_faults_defeat_single_rule_matching(seed in any::<u64>()) {
        let record = generate_double_faults(1, seed).remove(0);
        let step = record.to_step().expect("generated records parse");
        let chain = extract_chain(&step.claim).expect("double faults are equalities");
        let cfg = EvalConfig::default();
        for (l, _, r) in chain.links() {
            prop_assert!(
                diagnose_manipulation(l, r, &all_manipulations(), &cfg).is_empty(),
                "record {}: a single rule explained a double fault",
                record.id
            );
        }
    }

    /// Disabling the primary index removes exactly its diagnoses and
    /// leaves every other diagnosis untouched.
    #[test]
    fn disabling_an_index_removes_only_that_index(
        name in proptest::sample::select(
            fallacy_names().into_iter().chain(manipulation_names()).collect::<Vec<_>>()
        ),
        seed in any::<u64>(),
    ) {
        let record = generate_corpus(name, 1, seed).unwrap().remove(0);
        let step = record.to_step().expect("generated records parse");
        let mut config = ExerciseConfig::default();
        config.max_alternatives = 32;
        let before = diagnose_step(&step, &config);
        let names = |report: &misstep_core::pipeline::StepReport| -> Vec<String> {
            match &report.outcome {
                StepOutcome::Diagnosed { primary, alternatives } => {
                    std::iter::once(primary)
                        .chain(alternatives.iter())
                        .map(|d| d.index.name().to_string())
                        .collect()
                }
                _ => Vec::new(),
            }
        };
        let before_names = names(&before);
        let Some(first) = before_names.first().cloned() else {
            return Err(TestCaseError::fail(format!("record {} not diagnosed", record.id)));
        };

        let mut narrowed = config.clone();
        let removed: Vec<String> = match diagnosed_index(&before) {
            RuleIndex::Logical(f) => {
                narrowed.enabled_logical.remove(&f);
                vec![first.clone()]
            }
            RuleIndex::Manipulation(m) => {
                narrowed.enabled_manipulations.remove(&m);
                vec![first.clone()]
            }
            RuleIndex::TypeRule(t) => {
                narrowed.enabled_type_rules.remove(&t);
                vec![first.clone()]
            }
            RuleIndex::Analogy { .. } => {
                narrowed.enable_analogy = false;
                vec!["false_analogy".to_string()]
            }
        };

        let after_names = names(&diagnose_step(&step, &narrowed));
        let expected: Vec<String> = before_names
            .iter()
            .filter(|n| !removed.contains(n))
            .cloned()
            .collect();
        prop_assert_eq!(
            after_names,
            expected,
            "record {}: disabling {} must remove exactly its diagnoses",
            record.id,
            first
        );
    }
}

fn diagnosed_index(report: &misstep_core::pipeline::StepReport) -> RuleIndex {
    match &report.outcome {
        StepOutcome::Diagnosed { primary, .. } => primary.index.clone(),
        _ => unreachable!("caller checked the outcome"),
    }
}
