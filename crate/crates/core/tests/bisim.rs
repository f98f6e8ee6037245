use tbisim::bisim::{
    brb_check, brb_x_check, cbrb_check, check, gbrb_check, revalidate, strong_bisim, tb_check,
    tob_check, Relation,
};
use tbisim::encode::encode;
use tbisim::parser::parse_term;
use tbisim::semantics::build_lts;
use tbisim::{ActionSet, Lts};

fn lts(src: &str) -> Lts {
    build_lts(&parse_term(src).unwrap(), Default::default()).unwrap()
}

fn rel(r: Relation, a: &str, b: &str) -> bool {
    let (l1, l2) = (lts(a), lts(b));
    check(r, &l1, l1.initial(), &l2, l2.initial(), None).unwrap().equivalent
}

fn all_agree(a: &str, b: &str, rooted: bool) -> bool {
    let (l1, l2) = (lts(a), lts(b));
    let (p, q) = (l1.initial(), l2.initial());
    let v = brb_check(&l1, p, &l2, q, rooted).unwrap().equivalent;
    assert_eq!(gbrb_check(&l1, p, &l2, q, rooted).unwrap().equivalent, v, "gbrb {a} / {b}");
    assert_eq!(tob_check(&l1, p, &l2, q, rooted).unwrap().equivalent, v, "tob {a} / {b}");
    let (e1, e2) = (encode(&l1, rooted).unwrap(), encode(&l2, rooted).unwrap());
    let sigma = l1.alphabet().union(l2.alphabet()).unwrap();
    let (e1, e2) = if e1.alphabet() == e2.alphabet() {
        (e1, e2)
    } else {
        (
            encode(&l1.remap(&sigma).unwrap(), rooted).unwrap(),
            encode(&l2.remap(&sigma).unwrap(), rooted).unwrap(),
        )
    };
    assert_eq!(
        tb_check(&e1, e1.initial(), &e2, e2.initial(), rooted).unwrap().equivalent,
        v,
        "tb {a} / {b}"
    );
    v
}

#[test]
fn strong_examples() {
    assert!(rel(Relation::Strong, "0", "0"));
    assert!(rel(Relation::Strong, "a.0", "a.0 + a.0"));
    assert!(!rel(Relation::Strong, "a.0", "tau.a.0"));
}

#[test]
fn golden_brb() {
    assert!(all_agree("a.t.b.0", "a.t.t.b.0", false));
    assert!(all_agree("a.t.b.0", "a.t.tau.t.b.0", false));
    assert!(all_agree("tau.a.0 + t.b.0", "tau.a.0", true));
    assert!(all_agree("a.0", "tau.a.0", false));
    assert!(!all_agree("a.0", "tau.a.0", true));
    assert!(!all_agree("a.0 + b.0", "tau.a.0 + b.0", false));
    assert!(all_agree("0", "0", false));
}

#[test]
fn env_variant() {
    let (l1, l2) = (lts("t.b.0 + a.b.0"), lts("tau.a.b.0 + a.0"));
    let v = brb_x_check(&l1, l1.initial(), &l2, l2.initial(), &ActionSet::new()).unwrap();
    assert!(!v.equivalent);
    assert!(!v.refutation.is_empty());
}

#[test]
fn concrete_variant() {
    let (l1, l2) = (lts("a.t.b.0"), lts("a.t.t.b.0"));
    assert!(!cbrb_check(&l1, l1.initial(), &l2, l2.initial(), false).unwrap().equivalent);
    let (l1, l2) = (lts("tau.a.0 + t.b.0"), lts("tau.a.0"));
    assert!(cbrb_check(&l1, l1.initial(), &l2, l2.initial(), true).unwrap().equivalent);
}

#[test]
fn witnesses_revalidate() {
    for r in Relation::ALL {
        let (l1, l2) = (lts("a.t.b.0"), lts("a.t.t.b.0"));
        let v = check(r, &l1, l1.initial(), &l2, l2.initial(), None);
        if matches!(r, Relation::Tb | Relation::TbRooted) {
            continue;
        }
        let v = v.unwrap();
        if let Some(w) = &v.witness {
            assert!(revalidate(w), "{r}");
        }
    }
    let l = lts("a.0");
    let v = strong_bisim(&l, 0, &l, 0).unwrap();
    assert!(revalidate(v.witness.as_ref().unwrap()));
}
