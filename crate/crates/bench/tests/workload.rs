use tbisim::bisim::{brb_check, strong_bisim};
use tbisim_bench::stutter_pair;

#[test]
fn workloads_are_equivalent() {
    for n in 1..=3 {
        let (l, r) = stutter_pair(n);
        assert!(brb_check(&l, 0, &r, 0, false).unwrap().equivalent, "n = {n}");
        assert!(!strong_bisim(&l, 0, &r, 0).unwrap().equivalent, "n = {n}");
    }
}
