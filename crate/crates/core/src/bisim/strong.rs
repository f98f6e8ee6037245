//! Strong bisimilarity by signature refinement.

use std::collections::BTreeSet;
use std::collections::HashMap;

use crate::lts::{ExtLabel, Lts};

/// Block index of every state in the coarsest strong bisimulation.
pub fn partition(l: &Lts) -> (Vec<usize>, usize) {
    let n = l.num_states();
    let mut block = vec![0usize; n];
    let mut count = if n == 0 { 0 } else { 1 };
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut ids: HashMap<(usize, BTreeSet<(ExtLabel, usize)>), usize> = HashMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let sig: BTreeSet<(ExtLabel, usize)> =
                l.successors(s).iter().map(|&(a, d)| (a, block[d])).collect();
            let k = ids.len();
            next[s] = *ids.entry((block[s], sig)).or_insert(k);
        }
        let new_count = ids.len();
        block = next;
        if new_count == count {
            return (block, rounds);
        }
        count = new_count;
    }
}
