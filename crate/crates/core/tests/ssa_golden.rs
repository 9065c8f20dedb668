//! SSA listings against a reference counting-loop listing and the rotating-bounds
//! loop, compared after renaming SSA indices by first appearance.

use std::collections::HashMap;

use kiwi::frontend::load;
use kiwi::solver::expr::ExprId;
use kiwi::solver::{SolveResult, Solver};
use kiwi::ssa::SsaSystem;

const COUNTING: &str = include_str!("../../../corpus/counting_loop.c");
const ROTATING: &str = include_str!("../../../corpus/rotating_bounds.c");

/// Reference SSA listing of the counting loop, written by hand.
const COUNTING_LISTING: &str = "\
guard#0 == TRUE
x#0 == 0u
guard#1 == guard#0
x#phi1 == (guard#ls0 ? x#lb1 : x#0)
guard#2 == (x#phi1 < 10) && guard#1
x#2 == 1u + x#phi1
guard#3 == !(x#phi1 < 10) && guard#1
x#phi1 == 10u || !guard#3";

fn system(src: &str) -> SsaSystem {
    SsaSystem::new(load(src).unwrap())
}

/// Rename every `name#index` to `name#n` where `n` counts distinct indices
/// of that name in order of appearance, and drop unsigned literal suffixes.
fn normalize(text: &str) -> Vec<String> {
    let mut seen: HashMap<String, HashMap<String, usize>> = HashMap::new();
    let mut out = Vec::new();
    for line in text.lines() {
        let mut s = String::new();
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if i < chars.len() && chars[i] == '#' {
                    let istart = i + 1;
                    let mut j = istart;
                    while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '%' || chars[j] == '.') {
                        j += 1;
                    }
                    let idx: String = chars[istart..j].iter().collect();
                    // `phi`, `lb` and `ls` prefixes are part of the role, not the index
                    let role: String = idx.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
                    let key = format!("{word}#{role}");
                    let m = seen.entry(key).or_default();
                    let n = m.len();
                    let id = *m.entry(idx.clone()).or_insert(n);
                    s.push_str(&format!("{word}#{role}{id}"));
                    i = j;
                } else if word.chars().all(|c| c.is_ascii_digit() || c == 'u') && word.ends_with('u') {
                    s.push_str(&word[..word.len() - 1]);
                } else {
                    s.push_str(&word);
                }
            } else {
                s.push(c);
                i += 1;
            }
        }
        out.push(s);
    }
    out
}

/// Substitute loop-exit aliases (`enable ==> a == b`) and rewrite
/// `g ==> p  // assertion` as `p || !g`.
fn resolve_exits(dump: &str) -> String {
    let mut alias: Vec<(String, String)> = Vec::new();
    let mut lines = Vec::new();
    for line in dump.lines() {
        if let Some(body) = line.strip_suffix("  // loop exit") {
            let rhs = body.split_once(" ==> ").unwrap().1;
            let (a, b) = rhs.split_once(" == ").unwrap();
            alias.push((a.to_string(), b.to_string()));
        } else if line.starts_with("$err") {
            continue;
        } else {
            lines.push(line.to_string());
        }
    }
    lines
        .into_iter()
        .map(|l| {
            let mut l = l;
            for (a, b) in &alias {
                l = l.replace(a.as_str(), b);
            }
            match l.strip_suffix("  // assertion") {
                Some(body) => {
                    let (g, p) = body.split_once(" ==> ").unwrap();
                    format!("{p} || !{g}")
                }
                None => l,
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parenthesization differs only around comparisons joined by `&&`.
fn loosen(line: &str) -> String {
    line.replace(['(', ')'], "")
}

#[test]
fn counting_loop_listing_matches_reference_ssa_up_to_naming() {
    let sys = system(COUNTING);
    let ours: Vec<String> = normalize(&resolve_exits(&sys.dump())).iter().map(|l| loosen(l)).collect();
    let reference: Vec<String> = normalize(COUNTING_LISTING).iter().map(|l| loosen(l)).collect();
    assert_eq!(ours, reference);
}

#[test]
fn counting_loop_golden_file() {
    let sys = system(COUNTING);
    assert_eq!(sys.dump(), include_str!("golden/counting_loop.ssa"));
}

#[test]
fn counting_loop_second_copy_golden_file() {
    let mut sys = system(COUNTING);
    sys.unwind();
    assert_eq!(sys.dump(), include_str!("golden/counting_loop_k2.ssa"));
}

#[test]
fn second_copy_is_stitched_to_the_first() {
    let mut sys = system(COUNTING);
    let before = sys.dump();
    sys.unwind();
    let after = sys.dump();
    // constraints are only ever appended
    let kept: Vec<&str> = before.lines().filter(|l| !l.starts_with("$err")).collect();
    for l in &kept {
        assert!(after.lines().any(|m| m == *l), "lost `{l}`");
    }
    assert!(after.contains("guard#1%1 == guard#2"), "{after}");
    assert!(after.contains("x#phi1%1 == x#2"), "{after}");
}

#[test]
fn rotating_bounds_loop_head_and_assertion() {
    let sys = system(ROTATING);
    let dump = sys.dump();
    let norm = normalize(&dump);
    let reference = normalize(
        "guard#1 == guard#0\nw#phi1 == (guard#ls5 ? w#lb5 : w#0)\nx#phi1 == (guard#ls5 ? x#lb5 : x#0)\n\
         y#phi1 == (guard#ls5 ? y#lb5 : y#0)\nz#phi1 == (guard#ls5 ? z#lb5 : z#0)",
    );
    let start = norm.iter().position(|l| l.starts_with("w#phi0")).unwrap();
    assert_eq!(norm[start..start + 4], reference[1..5]);

    // one assertion, guarded by the body guard, meaning 3 + z >= x
    assert_eq!(sys.assertions.len(), 1);
    let (guard, prop) = (sys.assertions[0].guard, sys.assertions[0].prop);
    assert!(dump.contains(&format!("{} ==> ", sys.pool.display(guard))));
    assert!(dump.contains("guard#3 == 1 != 0 && guard#2"));
    let mut sys = sys;
    let vars = sys.pool.collect_vars(&[prop]);
    let mut find = |base: &str| -> ExprId {
        let v = *vars.iter().find(|&&v| sys.pool.var_name(v).to_string().starts_with(base)).unwrap();
        sys.pool.var_expr(v)
    };
    let (x, z) = (find("x#"), find("z#"));
    let ty = sys.pool.ty(x);
    let three = sys.pool.int(3, ty);
    let lhs = sys.pool.add(three, z);
    let reference = sys.pool.sle(x, lhs);
    let differ = sys.pool.ne(reference, prop);
    let mut s = Solver::builtin();
    s.assert(&sys.pool, differ);
    assert_eq!(s.solve(&sys.pool, &[]).unwrap(), SolveResult::Unsat);
}
