#![allow(dead_code)]

use tbisim::axioms::{instantiate, sample_bindings, schema_set, SampleConfig, Which};
use tbisim::sampler::Sampler;
use tbisim::semantics::{build_lts_over, ExplorationLimits};
use tbisim::{ActionSet, Alphabet, Lts, Term};

pub fn sigma3() -> ActionSet {
    Sampler::alphabet(3)
}

pub fn build(p: &Term, alpha: &Alphabet) -> Lts {
    let lim = ExplorationLimits {
        max_states: 20_000,
        ..ExplorationLimits::default()
    };
    build_lts_over(p, alpha, lim).unwrap_or_else(|e| panic!("{p}: {e}"))
}

/// A ground instance of the `k`-th schema of the reactive axiomatisation,
/// so a pair that is rooted branching reactive bisimilar.
pub fn axiom_pair(s: &mut Sampler, k: usize) -> (Term, Term) {
    let schemas = schema_set(Which::Axr);
    let schema = &schemas[k % schemas.len()];
    let b = sample_bindings(schema, s, &SampleConfig::default()).expect("satisfiable side condition");
    instantiate(schema, &b).unwrap()
}
