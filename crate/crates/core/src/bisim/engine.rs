//! Deletion-based greatest-fixpoint computation shared by all checkers.

use std::collections::HashMap;

use super::store::{Entry, RelationStore};
use crate::lts::{EnvSet, ExtLabel, Lts};
use crate::semantics::{stable_reachable, weak_reach};

/// Why an entry was removed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: &'static str,
    /// The transition of the left state that could not be matched.
    pub step: Option<(ExtLabel, usize)>,
    /// Environment quantified by the clause, when it is not the entry's own.
    pub env: Option<EnvSet>,
    /// A single missing entry the clause required.
    pub cause: Option<Entry>,
}

impl Violation {
    pub fn new(clause: &'static str) -> Self {
        Violation {
            clause,
            step: None,
            env: None,
            cause: None,
        }
    }

    pub fn step(clause: &'static str, l: ExtLabel, target: usize) -> Self {
        Violation {
            step: Some((l, target)),
            ..Violation::new(clause)
        }
    }

    pub fn with_env(mut self, x: EnvSet) -> Self {
        self.env = Some(x);
        self
    }

    pub fn caused_by(mut self, e: Entry) -> Self {
        self.cause = Some(e);
        self
    }
}

/// Transition structure precomputed once per check.
pub struct Graph<'a> {
    pub lts: &'a Lts,
    pub n: usize,
    pub envs: usize,
    pub tau: Vec<Vec<usize>>,
    pub tout: Vec<Vec<usize>>,
    pub weak: Vec<Vec<usize>>,
    pub init: Vec<EnvSet>,
    pub has_tau: Vec<bool>,
    pub stable_reach: Vec<bool>,
}

impl<'a> Graph<'a> {
    pub fn new(lts: &'a Lts) -> Self {
        let n = lts.num_states();
        let mut tau = vec![Vec::new(); n];
        let mut tout = vec![Vec::new(); n];
        for (s, l, d) in lts.transitions() {
            match l {
                ExtLabel::Tau => tau[s].push(d),
                ExtLabel::Timeout => tout[s].push(d),
                _ => {}
            }
        }
        Graph {
            lts,
            n,
            envs: lts.alphabet().num_envs(),
            has_tau: (0..n).map(|s| !tau[s].is_empty()).collect(),
            init: (0..n).map(|s| lts.visible_initials(s)).collect(),
            stable_reach: (0..n).map(|s| stable_reachable(lts, s)).collect(),
            weak: weak_reach(lts),
            tau,
            tout,
        }
    }

    #[inline]
    pub fn idle(&self, s: usize, x: EnvSet) -> bool {
        !self.has_tau[s] && self.init[s] & x == 0
    }

    pub fn succ(&self, s: usize) -> &[(ExtLabel, usize)] {
        self.lts.successors(s)
    }

    /// Targets of `s --l-->`.
    pub fn targets(&self, s: usize, l: ExtLabel) -> impl Iterator<Item = usize> + '_ {
        self.succ(s).iter().filter(move |(m, _)| *m == l).map(|&(_, d)| d)
    }

    /// `Q ⟹ Q₁ --(α)--> Q₂` with `before(Q₁)` and `after(Q₂)`; the
    /// optional step is only allowed for τ.
    pub fn weak_match(
        &self,
        q: usize,
        l: ExtLabel,
        before: impl Fn(usize) -> bool,
        after: impl Fn(usize) -> bool,
    ) -> bool {
        self.weak[q].iter().any(|&q1| {
            before(q1) && ((l == ExtLabel::Tau && after(q1)) || self.targets(q1, l).any(&after))
        })
    }

    /// Searches `Q = Q₀ ⟹ Q₁ --t--> Q₂ ⟹ … ⟹ Q₂ᵣ₋₁ --(t)--> Q₂ᵣ`, r > 0.
    /// Odd positions must satisfy `first` (for Q₁) or `later`; an odd state
    /// accepted by `accept` ends the path with an empty final step, a
    /// t-successor accepted by `accept` ends it with a real one, and a
    /// t-successor satisfying `cont` becomes the next even position.
    pub fn t_path(
        &self,
        q: usize,
        first: impl Fn(usize) -> bool,
        later: impl Fn(usize) -> bool,
        accept: impl Fn(usize) -> bool,
        cont: impl Fn(usize) -> bool,
    ) -> bool {
        // seen[s]: bit 0 = odd via first layer, bit 1 = odd via later
        // layers, bit 2 = queued as a later even position.
        let mut seen: HashMap<usize, u8> = HashMap::new();
        let mut stack: Vec<(usize, bool)> = vec![(q, true)];
        while let Some((even, is_first)) = stack.pop() {
            let bit = if is_first { 1 } else { 2 };
            for &u in &self.weak[even] {
                let mark = seen.entry(u).or_insert(0);
                if *mark & bit != 0 {
                    continue;
                }
                *mark |= bit;
                let ok = if is_first { first(u) } else { later(u) };
                if !ok {
                    continue;
                }
                if accept(u) {
                    return true;
                }
                for &v in &self.tout[u] {
                    if accept(v) {
                        return true;
                    }
                    if cont(v) {
                        let m = seen.entry(v).or_insert(0);
                        if *m & 4 == 0 {
                            *m |= 4;
                            stack.push((v, false));
                        }
                    }
                }
            }
        }
        false
    }
}

/// Clause checks of one definition.
pub trait Rules {
    fn pair(&self, st: &RelationStore, p: usize, q: usize) -> Option<Violation>;

    fn triple(&self, _st: &RelationStore, _p: usize, _x: EnvSet, _q: usize) -> Option<Violation> {
        None
    }
}

#[derive(Clone, Debug, Default)]
pub struct Run {
    pub iterations: usize,
    pub checked: u64,
    /// Deleted entries with their deletion time and reason. The mirrored
    /// orientation is logged with the same time and a `sym` clause.
    pub log: HashMap<Entry, (u32, Violation)>,
}

impl Run {
    pub fn deleted_before(&self, e: Entry, time: u32) -> bool {
        self.log.get(&e).is_some_and(|(t, _)| *t < time)
    }
}

/// Removes violating entries until none is left. Entries are scanned in
/// (state, state) then (mask, state, state) order; removals take effect
/// immediately.
pub fn greatest_fixpoint<R: Rules>(rules: &R, st: &mut RelationStore) -> Run {
    let n = st.num_states();
    let envs = st.num_envs();
    let mut run = Run::default();
    let mut clock: u32 = 0;
    loop {
        run.iterations += 1;
        let mut changed = false;
        let mut kill = |st: &mut RelationStore, run: &mut Run, e: Entry, v: Violation| {
            st.remove(e);
            run.log.insert(e, (clock, v));
            if e.flipped() != e {
                run.log
                    .insert(e.flipped(), (clock, Violation::new("sym").caused_by(e)));
            }
            clock += 1;
        };
        for p in 0..n {
            for q in 0..n {
                if st.pair(p, q) {
                    run.checked += 1;
                    if let Some(v) = rules.pair(st, p, q) {
                        kill(st, &mut run, Entry::Pair(p, q), v);
                        changed = true;
                    }
                }
            }
        }
        for x in 0..envs as EnvSet {
            for p in 0..n {
                for q in 0..n {
                    if st.triple(p, x, q) {
                        run.checked += 1;
                        if let Some(v) = rules.triple(st, p, x, q) {
                            kill(st, &mut run, Entry::Triple(p, x, q), v);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return run;
        }
    }
}

/// One pass over every present entry; the first violation found, if any.
pub fn first_violation<R: Rules>(rules: &R, st: &RelationStore) -> Option<(Entry, Violation)> {
    st.entries().find_map(|e| {
        let v = match e {
            Entry::Pair(p, q) => rules.pair(st, p, q),
            Entry::Triple(p, x, q) => rules.triple(st, p, x, q),
        };
        v.map(|v| (e, v))
    })
}
