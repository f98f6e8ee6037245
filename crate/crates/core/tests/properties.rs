mod common;

use proptest::prelude::*;

use tbisim::axioms::head_normal_form;
use tbisim::bisim::{brb_check, check, strong_bisim, Entry};
use tbisim::encode::encode;
use tbisim::lts::{ExtLabel, Mode, StateTag};
use tbisim::modal::{distinguish, enumerate_lb, sat, sat_env, Fragment, Target};
use tbisim::parser::{parse_source, parse_term, render_source};
use tbisim::sampler::{plug, Sampler, HOLE};
use tbisim::semantics::{step, weak_reach};
use tbisim::term::Substitution;
use tbisim::{ActionLabel, Alphabet, Lts, Name, Relation, Term};

use common::{axiom_pair, build, sigma3};

fn sampler(seed: u64) -> Sampler {
    Sampler::new(seed, &sigma3())
}

fn alpha() -> Alphabet {
    Alphabet::new(&sigma3()).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

#[test]
fn precedence() {
    let t = parse_term("a.b.0 + c.0 ||{} d.0").unwrap();
    let a = |n: &str| ActionLabel::visible(n);
    let expected = Term::choice(
        Term::prefix(a("a"), Term::prefix(a("b"), Term::Nil)),
        Term::par(Default::default(), Term::prefix(a("c"), Term::Nil), Term::prefix(a("d"), Term::Nil)),
    );
    assert_eq!(t, expected);
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn render_parse_round_trip(seed in any::<u64>()) {
        let mut s = sampler(seed);
        let t = s.term();
        let text = render_source(&t, None);
        let back = parse_source(&text).unwrap();
        prop_assert_eq!(back.root, t, "{}", text);
    }

    #[test]
    fn reachable_states_stay_valid(seed in any::<u64>()) {
        let t = sampler(seed).term();
        let own = t.alphabet();
        let l = build(&t, &alpha());
        for s in 0..l.num_states() {
            if let StateTag::Term(u) = l.tag(s) {
                prop_assert!(u.is_closed() && u.is_valid(), "{}", u);
            }
            for &(lab, _) in l.successors(s) {
                if let ExtLabel::Visible(i) = lab {
                    prop_assert!(own.contains(l.alphabet().name(i as usize)), "{} leaves {}", t, own);
                }
            }
        }
    }

    #[test]
    fn substitution_composes(seed in any::<u64>()) {
        let mut s = sampler(seed);
        let (e, c, p) = (s.context(), s.context(), s.term());
        let rho: Substitution = [(Name::from(HOLE), c.clone())].into_iter().collect();
        let nu: Substitution = [(Name::from(HOLE), p.clone())].into_iter().collect();
        let stepwise = e.substitute(&rho).unwrap().substitute(&nu).unwrap();
        let both: Substitution = [(Name::from(HOLE), plug(&c, &p))].into_iter().collect();
        let direct = e.substitute(&both).unwrap();
        let (l1, l2) = (build(&stepwise, &alpha()), build(&direct, &alpha()));
        prop_assert!(strong_bisim(&l1, 0, &l2, 0).unwrap().equivalent);
    }

    #[test]
    fn theta_keeps_tau_steps(seed in any::<u64>()) {
        let mut s = sampler(seed);
        let (p, x) = (s.term(), s.action_set());
        let inner: Vec<Term> = step(&p).unwrap().into_iter()
            .filter(|(a, _)| *a == ActionLabel::Tau)
            .map(|(_, q)| Term::theta_x(x.clone(), q))
            .collect();
        let outer: Vec<Term> = step(&Term::theta_x(x.clone(), p)).unwrap().into_iter()
            .filter(|(a, _)| *a == ActionLabel::Tau)
            .map(|(_, q)| q)
            .collect();
        prop_assert_eq!(inner.len(), outer.len());
        for q in &inner {
            prop_assert!(outer.contains(q));
        }
    }

    #[test]
    fn renaming_is_finite(seed in any::<u64>()) {
        let mut s = sampler(seed);
        let (p, r) = (s.term(), s.renaming());
        let widest = ["a", "b", "c"].iter().map(|a| r.image(a).count()).max().unwrap_or(0).max(1);
        let n = step(&p).unwrap().len();
        prop_assert!(step(&Term::rename(r, p)).unwrap().len() <= n * widest);
    }

    #[test]
    fn encoding_shape(seed in any::<u64>()) {
        let t = sampler(seed).term();
        let l = build(&t, &alpha());
        let bound = l.num_states() * (2 * l.alphabet().num_envs() + 2);
        for rooted in [false, true] {
            let e = encode(&l, rooted).unwrap();
            prop_assert!(e.num_states() <= bound);
            for s in 0..e.num_states() {
                for &(lab, _) in e.successors(s) {
                    prop_assert!(rooted || !matches!(lab, ExtLabel::TSet(_)));
                    if lab == ExtLabel::Timeout {
                        if let StateTag::Encoded { mode: Mode::Env(x) | Mode::EnvRooted(x), base } = e.tag(s) {
                            prop_assert!(l.is_idle(*base, *x));
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn strong_implies_rooted_implies_plain(seed in any::<u64>()) {
        let mut s = sampler(seed);
        let (p, q) = if seed % 3 == 0 { let p = s.term(); let h = head_normal_form(&p).unwrap(); (p, h) } else { s.pair() };
        let (l1, l2) = (build(&p, &alpha()), build(&q, &alpha()));
        let strong = strong_bisim(&l1, 0, &l2, 0).unwrap().equivalent;
        let rooted = brb_check(&l1, 0, &l2, 0, true).unwrap().equivalent;
        let plain = brb_check(&l1, 0, &l2, 0, false).unwrap().equivalent;
        prop_assert!(!strong || rooted);
        prop_assert!(!rooted || plain);
    }

    #[test]
    fn equivalence_laws(seed in any::<u64>()) {
        let mut s = sampler(seed);
        let (p, q) = s.pair();
        let r = s.mutate(&q);
        let l = [build(&p, &alpha()), build(&q, &alpha()), build(&r, &alpha())];
        for rel in [Relation::Brb, Relation::BrbRooted, Relation::Cbrb] {
            let v = |a: usize, b: usize| check(rel, &l[a], 0, &l[b], 0, None).unwrap().equivalent;
            prop_assert!(v(0, 0));
            prop_assert_eq!(v(0, 1), v(1, 0));
            if v(0, 1) && v(1, 2) {
                prop_assert!(v(0, 2));
            }
        }
    }

    #[test]
    fn stuttering_and_stable_initials(seed in any::<u64>()) {
        let t = sampler(seed).term();
        let l = build(&t, &alpha());
        let v = check(Relation::Brb, &l, 0, &l, 0, None).unwrap();
        let store = &v.witness.as_ref().unwrap().store;
        let weak = weak_reach(&l);
        let n = l.num_states();
        for p in 0..n {
            for q in 0..n {
                if !store.contains(Entry::Pair(p, q)) {
                    continue;
                }
                if !l.has_tau(p) && !l.has_tau(q) {
                    prop_assert_eq!(l.visible_initials(p), l.visible_initials(q));
                }
            }
        }
        for q in 0..n {
            for p in 0..n {
                for &p1 in &weak[p] {
                    for &p2 in &weak[p1] {
                        if store.contains(Entry::Pair(p, q)) && store.contains(Entry::Pair(p2, q)) {
                            prop_assert!(store.contains(Entry::Pair(p1, q)), "{} {} {} / {}", p, p1, p2, q);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn deletion_is_monotone(seed in any::<u64>()) {
        let (p, q) = sampler(seed).pair();
        let (l1, l2) = (build(&p, &alpha()), build(&q, &alpha()));
        let n = l1.num_states() + l2.num_states();
        let entries = (n * n * (1 + l1.alphabet().num_envs())) as u64;
        for rel in [Relation::Brb, Relation::Gbrb, Relation::Tob] {
            let v = check(rel, &l1, 0, &l2, 0, None).unwrap();
            prop_assert!((v.iterations as u64) <= entries.max(1));
        }
    }

    #[test]
    fn rooted_brb_is_a_congruence(seed in any::<u64>()) {
        let mut s = sampler(seed);
        let (p, q) = axiom_pair(&mut s, seed as usize);
        let c = s.context();
        let (l1, l2) = (build(&plug(&c, &p), &alpha()), build(&plug(&c, &q), &alpha()));
        prop_assert!(brb_check(&l1, 0, &l2, 0, true).unwrap().equivalent, "C = {}\n{}\n{}", c, p, q);
    }

    #[test]
    fn idle_states_ignore_the_environment(seed in any::<u64>()) {
        let mut s = sampler(seed);
        let t = s.term();
        let y = s.action_set();
        let l = build(&t, &alpha());
        let mask = l.alphabet().mask(&y);
        let formulas = enumerate_lb(&sigma3(), 4);
        for st in (0..l.num_states()).filter(|&st| l.is_idle(st, mask)) {
            for f in &formulas {
                prop_assert_eq!(sat_env(&l, st, &y, f), sat(&l, st, f));
            }
        }
    }

    #[test]
    fn rooted_distinguishers_are_valid(seed in any::<u64>()) {
        let (p, q) = sampler(seed).pair();
        let (l1, l2) = (build(&p, &alpha()), build(&q, &alpha()));
        if let Some(f) = distinguish(&l1, 0, &l2, 0, Fragment::Lbr, &Target::Triggered).unwrap() {
            prop_assert!(f.in_fragment(Fragment::Lbr));
            prop_assert!(sat(&l1, 0, &f) && !sat(&l2, 0, &f));
            prop_assert!(!brb_check(&l1, 0, &l2, 0, true).unwrap().equivalent);
        } else {
            prop_assert!(brb_check(&l1, 0, &l2, 0, true).unwrap().equivalent);
        }
    }

    #[test]
    fn head_normal_form_is_strongly_bisimilar(seed in any::<u64>()) {
        let p = sampler(seed).term();
        let h = head_normal_form(&p).unwrap();
        let (l1, l2) = (build(&p, &alpha()), build(&h, &alpha()));
        prop_assert!(strong_bisim(&l1, 0, &l2, 0).unwrap().equivalent);
    }
}

#[test]
fn sat_terminates_on_tau_cycles() {
    let l = Lts::from_aut("des (0, 5, 3)\n(0,\"tau\",1)\n(1,\"tau\",0)\n(1,\"a\",2)\n(2,\"t\",2)\n(2,\"tau\",2)\n").unwrap();
    let sigma = l.alphabet().to_set();
    for f in enumerate_lb(&sigma, 5) {
        let _ = sat(&l, 0, &f);
        let _ = sat_env(&l, 2, &sigma, &f);
    }
}
