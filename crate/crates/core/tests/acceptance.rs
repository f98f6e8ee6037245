//! End-to-end acceptance run: one line per criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use tbisim::axioms::{check_law, schema_set, soundness_suite, strong_laws, SampleConfig, Which};
use tbisim::bisim::{
    brb_check, brb_x_check, cbrb_check, check, gbrb_check, revalidate, tb_check, tob_check, Entry,
    RelationStore, Witness,
};
use tbisim::encode::encode;
use tbisim::modal::{distinguish, enumerate_lb, enumerate_lbr, Evaluator, Fragment, Target};
use tbisim::parser::parse_term;
use tbisim::sampler::{plug, Sampler};
use tbisim::semantics::build_lts;
use tbisim::{ActionSet, Alphabet, Lts, Relation};

use common::{axiom_pair, build, sigma3};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lts(src: &str) -> Lts {
    build_lts(&parse_term(src).unwrap(), Default::default()).unwrap()
}

fn rel(r: Relation, l1: &Lts, l2: &Lts) -> bool {
    check(r, l1, l1.initial(), l2, l2.initial(), None).unwrap().equivalent
}

fn golden() -> Outcome {
    let cases = [
        (Relation::Brb, "a.t.b.0", "a.t.t.b.0", true),
        (Relation::Brb, "a.t.b.0", "a.t.tau.t.b.0", true),
        (Relation::BrbRooted, "tau.a.0 + t.b.0", "tau.a.0", true),
        (Relation::Brb, "a.0", "tau.a.0", true),
        (Relation::BrbRooted, "a.0", "tau.a.0", false),
        (Relation::Brb, "a.0 + b.0", "tau.a.0 + b.0", false),
    ];
    let mut slowest = Duration::ZERO;
    for (r, p, q, expected) in cases {
        let t = Instant::now();
        let got = rel(r, &lts(p), &lts(q));
        let dt = t.elapsed();
        slowest = slowest.max(dt);
        ensure!(got == expected, "{r}({p}, {q}) = {got}");
        ensure!(dt < Duration::from_secs(1), "{r}({p}, {q}) took {dt:?}");
    }
    Ok(format!("{} cases, slowest {slowest:?}", cases.len()))
}

const CONTEXT_PAIR: &str = "des (0, 11, 7)
(0,\"a\",6)
(0,\"tau\",1)
(0,\"tau\",2)
(1,\"t\",4)
(1,\"a\",4)
(2,\"tau\",3)
(2,\"a\",6)
(3,\"a\",4)
(4,\"b\",6)
(5,\"tau\",1)
(5,\"tau\",2)
";

const THREE_WAY: &str = "des (0, 12, 13)
(0,\"a\",1)
(0,\"t\",2)
(2,\"a\",3)
(4,\"a\",5)
(4,\"t\",6)
(6,\"tau\",7)
(7,\"tau\",6)
(7,\"a\",8)
(9,\"a\",10)
(9,\"t\",11)
(11,\"tau\",12)
(12,\"tau\",11)
";

fn fixtures() -> Outcome {
    let pair = Lts::from_aut(CONTEXT_PAIR).unwrap();
    let with_a = "a.0 + tau.(t.b.0 + a.b.0) + tau.(tau.a.b.0 + a.0)";
    let without = "tau.(t.b.0 + a.b.0) + tau.(tau.a.b.0 + a.0)";
    ensure!(rel(Relation::Strong, &pair, &lts(with_a)), "context pair left does not match its term");
    let right = pair.with_initial(5);
    ensure!(rel(Relation::Strong, &right, &lts(without)), "context pair right does not match its term");
    ensure!(!check(Relation::Brb, &pair, 0, &pair, 5, None).unwrap().equivalent, "context pair related");
    let ctx = |p: &str| lts(&format!("({p}) ||{{a}} (tau.0 + a.0)"));
    ensure!(!rel(Relation::Brb, &ctx(with_a), &ctx(without)), "context pair in context related");

    let three = Lts::from_aut(THREE_WAY).unwrap();
    let (p0, q0, r0) = (0, 4, 9);
    ensure!(!check(Relation::Brb, &three, p0, &three, q0, None).unwrap().equivalent, "P0 ~ Q0");
    ensure!(check(Relation::Brb, &three, q0, &three, r0, None).unwrap().equivalent, "Q0 !~ R0");

    let envs = three.alphabet().num_envs();
    let none = three.alphabet().mask(&ActionSet::new());
    let mut store = RelationStore::empty(three.num_states(), envs);
    store.insert(Entry::Pair(4, 9));
    store.insert(Entry::Pair(5, 10));
    store.insert(Entry::Triple(6, none, 11));
    store.insert(Entry::Triple(7, none, 12));
    for x in 0..envs as u64 {
        store.insert(Entry::Triple(4, x as _, 9));
        store.insert(Entry::Triple(5, x as _, 10));
    }
    let w = Witness::manual(Relation::Brb, &three, store.clone()).unwrap();
    ensure!(revalidate(&w), "the listed relation is rejected");
    let mut broken = store;
    broken.remove(Entry::Triple(7, none, 12));
    let w = Witness::manual(Relation::Brb, &three, broken).unwrap();
    ensure!(!revalidate(&w), "a relation missing (Q2', {{}}, R2') is accepted");
    Ok("context pair plain and in context, three-way verdicts and witness".into())
}

fn verdicts(l1: &Lts, l2: &Lts, rooted: bool) -> [bool; 4] {
    let (p, q) = (l1.initial(), l2.initial());
    let brb = brb_check(l1, p, l2, q, rooted).unwrap().equivalent;
    let gbrb = gbrb_check(l1, p, l2, q, rooted).unwrap().equivalent;
    let tob = tob_check(l1, p, l2, q, rooted).unwrap().equivalent;
    let (e1, e2) = (encode(l1, rooted).unwrap(), encode(l2, rooted).unwrap());
    let tb = tb_check(&e1, e1.initial(), &e2, e2.initial(), rooted).unwrap().equivalent;
    [brb, gbrb, tob, tb]
}

fn agreement() -> Outcome {
    let alpha = Alphabet::new(&sigma3()).unwrap();
    let mut s = Sampler::new(500, &sigma3());
    let mut equal = [0, 0];
    let n = 500;
    for i in 0..n {
        let (p, q) = if i % 5 == 0 { axiom_pair(&mut s, i / 5) } else { s.pair() };
        let (l1, l2) = (build(&p, &alpha), build(&q, &alpha));
        for rooted in [false, true] {
            let v = verdicts(&l1, &l2, rooted);
            ensure!(v.iter().all(|b| *b == v[0]), "pair {i} rooted={rooted}: {v:?}\n  {p}\n  {q}");
            equal[rooted as usize] += v[0] as usize;
        }
    }
    Ok(format!("{n} pairs, {} / {} equivalent plain / rooted", equal[0], equal[1]))
}

fn equivalence_and_congruence() -> Outcome {
    let alpha = Alphabet::new(&sigma3()).unwrap();
    let mut s = Sampler::new(4, &sigma3());
    let mut chained = 0;
    for i in 0..200 {
        let (p, q) = if i % 2 == 0 { axiom_pair(&mut s, i) } else { s.pair() };
        let r = if i % 3 == 0 { s.mutate(&q) } else { tbisim::axioms::head_normal_form(&q).unwrap() };
        let l = [build(&p, &alpha), build(&q, &alpha), build(&r, &alpha)];
        for relation in [Relation::Brb, Relation::BrbRooted] {
            let v = |a: usize, b: usize| rel(relation, &l[a], &l[b]);
            for k in 0..3 {
                ensure!(v(k, k), "{relation} not reflexive on sample {i}");
            }
            ensure!(v(0, 1) == v(1, 0), "{relation} not symmetric on sample {i}");
            if v(0, 1) && v(1, 2) {
                chained += 1;
                ensure!(v(0, 2), "{relation} not transitive on sample {i}\n  {p}\n  {q}\n  {r}");
            }
        }
    }
    let mut contexts = 0;
    for i in 0..200 {
        let (p, q) = axiom_pair(&mut s, i);
        let c = s.context();
        let (cp, cq) = (plug(&c, &p), plug(&c, &q));
        ensure!(
            rel(Relation::BrbRooted, &build(&cp, &alpha), &build(&cq, &alpha)),
            "context breaks rooted brb\n  C = {c}\n  p = {p}\n  q = {q}"
        );
        contexts += 1;
    }
    Ok(format!("200 triples ({chained} transitive chains), {contexts} contexts"))
}

fn soundness() -> Outcome {
    let mut counted = 0;
    for which in [Which::Axr, Which::Ax] {
        for r in soundness_suite(which, 50, 23) {
            ensure!(r.sound(), "{} under {}: {:?}", r.axiom, r.relation, r.failures.first());
            ensure!(r.passes >= 50, "{} under {}: only {} instances", r.axiom, r.relation, r.passes);
            counted += 1;
        }
    }
    for law in strong_laws() {
        let r = check_law(&law, 50, 23, &SampleConfig::default());
        ensure!(r.sound() && r.passes >= 50, "law {}: {} passes, {:?}", r.axiom, r.passes, r.failures.first());
        counted += 1;
    }
    let schemas = schema_set(Which::Ax).len() + schema_set(Which::Axr).len();
    Ok(format!("{counted} reports ({schemas} schema entries, Lτ and {} laws), 50 instances each", strong_laws().len()))
}

fn agree_on(formulas: &[std::rc::Rc<tbisim::modal::Formula>], l1: &Lts, l2: &Lts) -> Option<String> {
    let (mut e1, mut e2) = (Evaluator::new(l1), Evaluator::new(l2));
    formulas
        .iter()
        .find(|f| e1.holds(l1.initial(), f, None) != e2.holds(l2.initial(), f, None))
        .map(|f| tbisim::parser::render_formula(f))
}

fn modal() -> Outcome {
    let sigma = sigma3();
    let alpha = Alphabet::new(&sigma).unwrap();
    let lb = enumerate_lb(&sigma, 5);
    let lbr = enumerate_lbr(&sigma, 5);
    let mut s = Sampler::new(6, &sigma);
    let (mut equal, mut unequal, mut tries) = (0, 0, 0);
    while (equal < 100 || unequal < 100) && tries < 5000 {
        tries += 1;
        let (p, q) = if equal < 100 && tries % 2 == 0 { axiom_pair(&mut s, tries) } else { s.pair() };
        let (l1, l2) = (build(&p, &alpha), build(&q, &alpha));
        let v = brb_check(&l1, l1.initial(), &l2, l2.initial(), false).unwrap().equivalent;
        if v && equal < 100 {
            if let Some(f) = agree_on(&lb, &l1, &l2) {
                return Err(format!("{f} separates brb-equivalent\n  {p}\n  {q}"));
            }
            if brb_check(&l1, l1.initial(), &l2, l2.initial(), true).unwrap().equivalent {
                if let Some(f) = agree_on(&lbr, &l1, &l2) {
                    return Err(format!("{f} separates rooted-equivalent\n  {p}\n  {q}"));
                }
            }
            equal += 1;
        } else if !v && unequal < 100 {
            let f = distinguish(&l1, l1.initial(), &l2, l2.initial(), Fragment::Lb, &Target::Triggered)
                .map_err(|e| format!("{e}\n  {p}\n  {q}"))?
                .ok_or_else(|| format!("no formula for inequivalent\n  {p}\n  {q}"))?;
            ensure!(f.in_fragment(Fragment::Lb), "formula outside Lb");
            let (mut e1, mut e2) = (Evaluator::new(&l1), Evaluator::new(&l2));
            ensure!(
                e1.holds(l1.initial(), &f, None) && !e2.holds(l2.initial(), &f, None),
                "formula does not distinguish\n  {p}\n  {q}"
            );
            unequal += 1;
        }
    }
    ensure!(equal >= 100 && unequal >= 100, "only {equal} / {unequal} pairs");
    Ok(format!(
        "{equal} equivalent pairs x {} Lb + {} Lbr formulas, {unequal} distinguished",
        lb.len(),
        lbr.len()
    ))
}

fn x_canonical() -> Outcome {
    let sigma = sigma3();
    let wide = Alphabet::new(&sigma.union(&["f"].into_iter().collect())).unwrap();
    let narrow = Alphabet::new(&sigma).unwrap();
    let mut s = Sampler::new(7, &sigma);
    let mut changed = 0;
    for i in 0..100 {
        let (p, q) = if i % 3 == 0 { axiom_pair(&mut s, i) } else { s.pair() };
        let mut x = s.action_set();
        if i % 2 == 0 {
            x.insert("f");
        }
        let trimmed = x.intersection(&sigma);
        changed += (trimmed != x) as usize;
        let (w1, w2) = (build(&p, &wide), build(&q, &wide));
        let (n1, n2) = (build(&p, &narrow), build(&q, &narrow));
        let a = brb_x_check(&w1, w1.initial(), &w2, w2.initial(), &x).unwrap().equivalent;
        let b = brb_x_check(&w1, w1.initial(), &w2, w2.initial(), &trimmed).unwrap().equivalent;
        let c = brb_x_check(&n1, n1.initial(), &n2, n2.initial(), &x).unwrap().equivalent;
        ensure!(a == b && b == c, "sample {i}, X = {{{x}}}: {a} {b} {c}\n  {p}\n  {q}");
    }
    Ok(format!("100 samples, {changed} with the fresh action in X"))
}

fn concrete() -> Outcome {
    let (l1, l2) = (lts("a.t.b.0"), lts("a.t.t.b.0"));
    let (p, q) = (l1.initial(), l2.initial());
    ensure!(brb_check(&l1, p, &l2, q, false).unwrap().equivalent, "brb separates");
    // After a, t.b.0 --t--> b.0 must be met by t.t.b.0 ==> --t--> t.b.0 with
    // b.0 and t.b.0 related under every X; under {b} only b.0 can do b.
    let expected = false;
    let got = cbrb_check(&l1, p, &l2, q, false).unwrap().equivalent;
    ensure!(got == expected, "cbrb verdict {got}");
    ensure!(!cbrb_check(&l1, p, &l2, q, true).unwrap().equivalent, "rooted cbrb relates");
    Ok("brb relates, cbrb separates".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("golden equivalences", golden),
        ("hand-drawn fixtures", fixtures),
        ("cross-characterisation agreement", agreement),
        ("equivalence and congruence", equivalence_and_congruence),
        ("axiom soundness", soundness),
        ("modal coherence", modal),
        ("X-canonicalization", x_canonical),
        ("concrete-variant separation", concrete),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
