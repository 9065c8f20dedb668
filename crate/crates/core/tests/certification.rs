//! The certification gate must reject doctored verdicts.

mod common;

use kiwi::domains::{Bound, DomainKind};
use kiwi::engine::{self, recertify, Config, Verdict};

use common::corpus_program;

#[test]
fn tightened_invariant_is_rejected() {
    let p = corpus_program("counting_loop.c");
    let o = engine::run(&p, &Config::default()).unwrap();
    let Verdict::Safe { k, invariant, text } = o.verdict else { panic!("{}", o.verdict) };
    assert!(recertify(&p, &Verdict::Safe { k, invariant: invariant.clone(), text: text.clone() }, DomainKind::Intervals).unwrap());

    // x <= 9 at the head is not preserved by the body
    let mut tight = invariant.clone();
    let r = tight.iter().position(|&b| b == Bound::Le(10)).unwrap();
    tight[r] = Bound::Le(9);
    let forged = Verdict::Safe { k, invariant: tight, text: text.clone() };
    assert!(!recertify(&p, &forged, DomainKind::Intervals).unwrap());

    // top everywhere is inductive but does not imply the assertion
    let forged = Verdict::Safe { k, invariant: vec![Bound::Top; invariant.len()], text };
    assert!(!recertify(&p, &forged, DomainKind::Intervals).unwrap());
}

#[test]
fn safe_verdict_for_an_unsafe_program_is_rejected() {
    let p = corpus_program("exit_count.c");
    let forged = Verdict::Safe { k: 1, invariant: vec![Bound::Top; 2], text: String::new() };
    assert!(!recertify(&p, &forged, DomainKind::Intervals).unwrap());
}

#[test]
fn altered_counterexample_does_not_replay() {
    let p = corpus_program("doubling.c");
    let o = engine::run(&p, &Config::default()).unwrap();
    let Verdict::Unsafe { k, trace } = o.verdict else { panic!("{}", o.verdict) };
    assert!(engine::replay(&p, &trace));
    assert!(!trace.choices.is_empty());

    let mut t = trace.clone();
    t.choices[0].value ^= 1;
    assert!(!recertify(&p, &Verdict::Unsafe { k, trace: t }, DomainKind::Intervals).unwrap());

    let mut t = trace;
    t.steps.pop();
    assert!(!engine::replay(&p, &t));
}
