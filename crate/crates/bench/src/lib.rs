//! Workloads shared by the benchmarks in `benches/`.

use tbisim::parser::parse_term;
use tbisim::semantics::build_lts_over;
use tbisim::{Alphabet, Lts};

/// `n` interleaved copies of `a.t.b.0` against `n` copies of `a.t.t.b.0`,
/// both over `{a, b}`. The pair is branching reactive bisimilar.
pub fn stutter_pair(n: usize) -> (Lts, Lts) {
    let alpha = Alphabet::new(&["a", "b"].into_iter().collect()).expect("two names");
    let family = |unit: &str| {
        let text = vec![format!("({unit})"); n.max(1)].join(" ||{} ");
        let t = parse_term(&text).expect("well-formed");
        build_lts_over(&t, &alpha, Default::default()).expect("finite")
    };
    (family("a.t.b.0"), family("a.t.t.b.0"))
}
