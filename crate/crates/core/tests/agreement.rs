use tbisim::bisim::{brb_check, gbrb_check, tb_check, tob_check};
use tbisim::encode::encode;
use tbisim::sampler::Sampler;
use tbisim::semantics::build_lts_over;
use tbisim::{Alphabet, Lts};

fn verdicts(l1: &Lts, l2: &Lts, rooted: bool) -> [bool; 4] {
    let (p, q) = (l1.initial(), l2.initial());
    let brb = brb_check(l1, p, l2, q, rooted).unwrap().equivalent;
    let gbrb = gbrb_check(l1, p, l2, q, rooted).unwrap().equivalent;
    let tob = tob_check(l1, p, l2, q, rooted).unwrap().equivalent;
    let (e1, e2) = (encode(l1, rooted).unwrap(), encode(l2, rooted).unwrap());
    let tb = tb_check(&e1, e1.initial(), &e2, e2.initial(), rooted).unwrap().equivalent;
    [brb, gbrb, tob, tb]
}

#[test]
fn characterisations_agree_on_samples() {
    let sigma = Sampler::alphabet(3);
    let alpha = Alphabet::new(&sigma).unwrap();
    let mut s = Sampler::new(2024, &sigma);
    let mut equal = 0;
    for i in 0..1500 {
        let (p, q) = s.pair();
        let l1 = build_lts_over(&p, &alpha, Default::default()).unwrap();
        let l2 = build_lts_over(&q, &alpha, Default::default()).unwrap();
        for rooted in [false, true] {
            let v = verdicts(&l1, &l2, rooted);
            assert!(v.iter().all(|b| *b == v[0]), "sample {i} rooted={rooted}: {v:?}\n{p}\n{q}");
            equal += v[0] as usize;
        }
    }
    assert!(equal > 20, "too few equivalent samples: {equal}");
}
