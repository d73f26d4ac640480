use super::*;
use crate::surface::{CurveId, GenusModel};

fn run(id: &str, g: usize) -> RunReport {
    let script = builtin_script(id, g).unwrap();
    let ctx = RunContext::for_script(&script).unwrap();
    run_script(&script, &ctx).unwrap()
}

#[test]
fn every_builtin_parses() {
    for id in builtin_ids() {
        let src = builtin_source(id).unwrap();
        assert_eq!(src.id, id);
    }
}

#[test]
fn out_of_range_is_refused() {
    let err = builtin_script("t29", 25).unwrap_err();
    assert!(matches!(err, ScriptError::OutOfRange { g: 25, .. }), "{err}");
    assert!(builtin_script("t42", 43).is_err());
    assert!(matches!(builtin_script("nope", 9), Err(ScriptError::Unknown(_))));
}

#[test]
fn labels_must_be_defined_first() {
    let text = "script x\nrequires g >= 5\nbound g >= 5\nlayout rotation\nassert_eq $Q == A1\n";
    let err = parse_script(text).unwrap().instantiate(9).unwrap_err();
    assert!(matches!(err, ScriptError::Syntax { line: 5, .. }), "{err}");
}

#[test]
fn templates_and_guards() {
    let text = "script x\nrequires g >= 5\nbound g >= 5\nlayout rotation\n\
                def P = T^{r} * A1\nwhen g % 2 == 0: def Q = B{r}\nwhen g % 2 == 1: def Q = C{r-1}\n";
    let s = parse_script(text).unwrap().instantiate(9).unwrap();
    assert_eq!(s.steps[0].text, "def P = T^4 * A1");
    assert_eq!(s.steps[1].text, "def Q = C3");
    assert_eq!(s.variants, vec![(7, "g % 2 == 1".to_string())]);
}

#[test]
fn small_script_passes() {
    let r = run("t9odd", 9);
    assert!(r.passed(), "{}", r.to_text());
    assert_eq!(r.deferred, 0);
}

#[test]
fn dependents_follow_labels() {
    let text = "script x\nrequires g >= 5\nbound g >= 5\nlayout rotation\n\
                def P = A1 * A2\ndef Q = $P * B1\nassert_eq $P == $P\nassert_eq A1 == A1\nassert_eq $Q == $Q\n";
    let s = parse_script(text).unwrap().instantiate(9).unwrap();
    assert_eq!(s.dependents("P"), vec![2, 4]);
    assert_eq!(s.dependents("Q"), vec![4]);
}

#[test]
fn omori_list_shape() {
    let odd = omori_words(GenusModel::new(9).unwrap());
    assert_eq!(odd.len(), 2 + 4 + 3 + 1);
    let even = omori_words(GenusModel::new(10).unwrap());
    assert_eq!(even.len(), 2 + 4 + 3 + 1 + 1);
    assert_eq!(even[even.len() - 2].to_string(), "D9");
}

#[test]
fn rotation_commutator_exponent_at_12() {
    let s = builtin_script("prop41", 12).unwrap();
    assert!(s.steps.iter().any(|st| st.text.contains("T^6 * R1 * T^-6")));
}

#[test]
fn commutator_script_selection() {
    for (g, id) in [(44, "com_t42"), (29, "com_t29"), (30, "com_t4k2"), (43, "com_t4k3")] {
        assert_eq!(commutator_scripts(g).unwrap().id, id);
    }
    for (g, id) in [(8, "com_t8even"), (9, "com_t9odd"), (10, "com_t4k2_10"), (7, "com_t4k3_7")] {
        assert_eq!(commutator_scripts(g).unwrap().id, id);
    }
}

#[test]
fn reports_are_deterministic() {
    let a = run("com_t9odd", 9);
    let b = run("com_t9odd", 9);
    let strip = |r: &RunReport| {
        r.steps
            .iter()
            .map(|s| (s.status, s.detail.clone(), s.witness.clone()))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn tampered_assertion_fails_alone() {
    let s = builtin_script("t29", 29).unwrap();
    let i = s.steps.iter().position(|st| st.text.starts_with("assert_eq $G2 ==")).unwrap();
    let (t, predicted) = s.tamper(i, CurveId::a(1), CurveId::b(3)).unwrap();
    assert_eq!(predicted, vec![i]);
    let ctx = RunContext::for_script(&t).unwrap();
    let r = run_script(&t, &ctx).unwrap();
    assert_eq!(r.failures(), predicted);
    assert!(!r.passed());
}

#[test]
fn tampered_definition_fails_downstream() {
    let s = builtin_script("t29", 29).unwrap();
    let i = s.steps.iter().position(|st| st.step.binds() == Some("G1")).unwrap();
    let (t, predicted) = s.tamper(i, CurveId::c(2), CurveId::a(1)).unwrap();
    assert!(predicted.len() > 1);
    let ctx = RunContext::for_script(&t).unwrap();
    assert_eq!(run_script(&t, &ctx).unwrap().failures(), predicted);
}

#[test]
fn tamper_needs_the_curve() {
    let s = builtin_script("t29", 29).unwrap();
    assert!(s.tamper(0, CurveId::b(9), CurveId::a(1)).is_err());
    assert!(s.tamper(s.steps.len(), CurveId::a(1), CurveId::a(2)).is_err());
    let last = s.steps.len() - 1;
    assert!(s.tamper(last, CurveId::a(1), CurveId::a(2)).is_err());
}

#[test]
fn generation_above_cap_is_deferred() {
    let r = run("t29", 29);
    let last = r.steps.last().unwrap();
    assert_eq!(last.kind, "assert_gen");
    assert_eq!(last.status, StepStatus::Deferred);
    assert!(r.passed());
}

#[test]
fn signed_level_rejects_twists() {
    let s = builtin_script("t9odd", 9).unwrap();
    let ctx = RunContext::for_script(&s).unwrap().level(Level::Signed);
    let r = run_script(&s, &ctx).unwrap();
    assert!(!r.passed());
    let s = builtin_script("prop41", 9).unwrap();
    let ctx = RunContext::for_script(&s).unwrap().level(Level::Signed);
    assert!(run_script(&s, &ctx).unwrap().passed());
}

#[test]
fn report_header_states_semantics() {
    let r = run("prop41", 8);
    assert!(r.to_text().starts_with(&format!("# {SEMANTICS}")));
}

mod conjugation_law {
    use super::*;
    use crate::f2linalg::transvection_matrix;
    use crate::words::{Environment, Evaluator};
    use proptest::prelude::*;

    fn context(g: usize) -> RunContext {
        let s = builtin_script("t9odd", g).unwrap();
        RunContext::for_script(&s).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn passing_image_implies_conjugated_twist(
            g in prop::sample::select(vec![9usize, 11, 13]),
            picks in prop::collection::vec((0usize..1000, -3i64..=3), 0..8),
            target in 0usize..1000,
        ) {
            let ctx = context(g);
            let cat = &ctx.catalog;
            let entries = cat.entries();
            let mut atoms = Vec::new();
            for (i, e) in picks {
                let e = if e == 0 { 1 } else { e };
                atoms.push(if i % 5 == 0 {
                    crate::words::Atom::new(crate::words::AtomKind::Rot, e)
                } else {
                    crate::words::Atom::new(crate::words::AtomKind::Twist(entries[i % entries.len()]), e)
                });
            }
            let w = Word::from_atoms(atoms);
            let a = entries[target % entries.len()];
            let ev = Evaluator::new(Environment::new(cat.genus()), cat, &ctx.spec).unwrap();
            let m = ev.evaluate_mod2(&w).unwrap();
            let image = m.apply(&cat.class(&a).unwrap()).unwrap();
            let conj = Word::atom(crate::words::Atom::twist(a)).conjugate(&w);
            prop_assert_eq!(ev.evaluate_mod2(&conj).unwrap(), transvection_matrix(&image).unwrap());
            if let Some(b) = entries.iter().find(|b| cat.class(b).unwrap() == image) {
                let step = Step::AssertClassImage { word: w.clone(), pairs: vec![(a, *b)] };
                let script = Script {
                    id: "law".into(),
                    title: String::new(),
                    bound: String::new(),
                    genus: cat.genus(),
                    layout: cat.layout(),
                    profile: cat.profile(),
                    variants: Vec::new(),
                    steps: vec![
                        ScriptStep { line: 1, text: String::new(), step },
                        ScriptStep {
                            line: 2,
                            text: String::new(),
                            step: Step::AssertRepEqual {
                                lhs: conj,
                                rhs: Word::atom(crate::words::Atom::twist(*b)),
                            },
                        },
                    ],
                };
                let r = run_script(&script, &ctx).unwrap();
                prop_assert!(r.passed());
            }
        }
    }
}
