//! The bit-blaster agrees with direct evaluation on random terms.

use kiwi::solver::eval::eval;
use kiwi::solver::expr::{ExprId, ExprPool, Op, SsaName};
use kiwi::solver::{SolveResult, Solver};
use kiwi::types::BvType;
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum T {
    Var(usize),
    Const(u128),
    Un(u8, Box<T>),
    Bin(u8, Box<T>, Box<T>),
    Ite(Box<T>, Box<T>, Box<T>, Box<T>),
}

fn term() -> impl Strategy<Value = T> {
    let leaf = prop_oneof![(0..3usize).prop_map(T::Var), any::<u8>().prop_map(|c| T::Const(c as u128))];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (0..2u8, inner.clone()).prop_map(|(o, a)| T::Un(o, Box::new(a))),
            (0..13u8, inner.clone(), inner.clone()).prop_map(|(o, a, b)| T::Bin(o, Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone(), inner.clone(), inner)
                .prop_map(|(a, b, c, d)| T::Ite(Box::new(a), Box::new(b), Box::new(c), Box::new(d))),
        ]
    })
}

fn build(p: &mut ExprPool, t: &T, ty: BvType) -> ExprId {
    match t {
        T::Var(i) => p.var(SsaName::def(format!("v{i}"), 0, &[]), ty),
        T::Const(c) => p.constant(*c, ty),
        T::Un(o, a) => {
            let a = build(p, a, ty);
            p.unary(if *o == 0 { Op::Not } else { Op::Neg }, a)
        }
        T::Bin(o, a, b) => {
            let a = build(p, a, ty);
            let b = build(p, b, ty);
            let op = [
                Op::And,
                Op::Or,
                Op::Xor,
                Op::Add,
                Op::Sub,
                Op::Mul,
                Op::UDiv,
                Op::URem,
                Op::SDiv,
                Op::SRem,
                Op::Shl,
                Op::LShr,
                Op::AShr,
            ][*o as usize];
            p.binary(op, a, b)
        }
        T::Ite(a, b, c, d) => {
            let a = build(p, a, ty);
            let b = build(p, b, ty);
            let cond = p.slt(a, b);
            let c = build(p, c, ty);
            let d = build(p, d, ty);
            p.ite(cond, c, d)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn blaster_matches_evaluator(t in term(), vals in proptest::array::uniform3(any::<u8>()), signed in any::<bool>()) {
        let ty = if signed { BvType::I8 } else { BvType::U8 };
        let mut p = ExprPool::new();
        let e = build(&mut p, &t, ty);
        let mut s = Solver::builtin();
        for (i, &v) in vals.iter().enumerate() {
            let x = p.var(SsaName::def(format!("v{i}"), 0, &[]), ty);
            let c = p.constant(v as u128, ty);
            let eq = p.eq(x, c);
            s.assert(&p, eq);
        }
        let expected = eval(&p, e, &|v| Some(vals[p.var_name(v).base[1..].parse::<usize>().unwrap()] as u128)).unwrap();
        let r = p.var(SsaName::def("r", 0, &[]), ty);
        let eq = p.eq(r, e);
        s.assert(&p, eq);
        prop_assert_eq!(s.solve(&p, &[]).unwrap(), SolveResult::Sat);
        prop_assert_eq!(s.value(&p, r), expected);
        // and the negation is unsatisfiable
        let c = p.constant(expected, ty);
        let ne = p.ne(r, c);
        prop_assert_eq!(s.solve(&p, &[ne]).unwrap(), SolveResult::Unsat);
    }

    #[test]
    fn comparisons_match(a in any::<u8>(), b in any::<u8>()) {
        let mut p = ExprPool::new();
        let x = p.var(SsaName::def("x", 0, &[]), BvType::U8);
        let y = p.var(SsaName::def("y", 0, &[]), BvType::U8);
        let preds = [p.ult(x, y), p.ule(x, y), p.slt(x, y), p.sle(x, y), p.eq(x, y)];
        let mut s = Solver::builtin();
        let ca = p.constant(a as u128, BvType::U8);
        let cb = p.constant(b as u128, BvType::U8);
        let e1 = p.eq(x, ca);
        let e2 = p.eq(y, cb);
        s.assert(&p, e1);
        s.assert(&p, e2);
        prop_assert_eq!(s.solve(&p, &[]).unwrap(), SolveResult::Sat);
        let got: Vec<bool> = preds.iter().map(|&q| s.bool_value(&p, q)).collect();
        let sa = a as i8;
        let sb = b as i8;
        prop_assert_eq!(got, vec![a < b, a <= b, sa < sb, sa <= sb, a == b]);
        // the solver-side literal agrees with the evaluator
        for (i, &q) in preds.iter().enumerate() {
            let want = [a < b, a <= b, sa < sb, sa <= sb, a == b][i];
            let nq = if want { p.not(q) } else { q };
            prop_assert_eq!(s.solve(&p, &[nq]).unwrap(), SolveResult::Unsat);
        }
    }
}

/// Incremental use: adding clauses between calls never revives a model that
/// violates them.
#[test]
fn incremental_assertions_accumulate() {
    let mut p = ExprPool::new();
    let x = p.var(SsaName::def("x", 0, &[]), BvType::U8);
    let mut s = Solver::builtin();
    for bound in (0..200u128).rev().step_by(7) {
        let c = p.constant(bound, BvType::U8);
        let le = p.ule(x, c);
        s.assert(&p, le);
        assert_eq!(s.solve(&p, &[]).unwrap(), SolveResult::Sat);
        assert!(s.value(&p, x) <= bound);
    }
    let c = p.constant(200, BvType::U8);
    let gt = p.ult(c, x);
    assert_eq!(s.solve(&p, &[gt]).unwrap(), SolveResult::Unsat);
    assert_eq!(s.solve(&p, &[]).unwrap(), SolveResult::Sat);
}
