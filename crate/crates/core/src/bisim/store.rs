use crate::lts::EnvSet;

/// An entry of a relation: a pair `(p, q)` or a triple `(p, X, q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    Pair(usize, usize),
    Triple(usize, EnvSet, usize),
}

impl Entry {
    pub fn flipped(self) -> Entry {
        match self {
            Entry::Pair(p, q) => Entry::Pair(q, p),
            Entry::Triple(p, x, q) => Entry::Triple(q, x, p),
        }
    }

    pub fn lhs(self) -> usize {
        match self {
            Entry::Pair(p, _) | Entry::Triple(p, _, _) => p,
        }
    }

    pub fn rhs(self) -> usize {
        match self {
            Entry::Pair(_, q) | Entry::Triple(_, _, q) => q,
        }
    }

    pub fn env(self) -> Option<EnvSet> {
        match self {
            Entry::Pair(..) => None,
            Entry::Triple(_, x, _) => Some(x),
        }
    }
}

/// Symmetric boolean tables of pairs and triples over `n` states and
/// `envs` environment masks. Every update keeps both orientations in sync.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationStore {
    n: usize,
    envs: usize,
    pairs: Vec<bool>,
    triples: Vec<bool>,
}

impl RelationStore {
    /// All entries present. `envs = 0` gives a pairs-only store.
    pub fn full(n: usize, envs: usize) -> Self {
        RelationStore {
            n,
            envs,
            pairs: vec![true; n * n],
            triples: vec![true; n * n * envs],
        }
    }

    pub fn empty(n: usize, envs: usize) -> Self {
        RelationStore {
            n,
            envs,
            pairs: vec![false; n * n],
            triples: vec![false; n * n * envs],
        }
    }

    pub fn num_states(&self) -> usize {
        self.n
    }

    pub fn num_envs(&self) -> usize {
        self.envs
    }

    #[inline]
    pub fn pair(&self, p: usize, q: usize) -> bool {
        self.pairs[p * self.n + q]
    }

    #[inline]
    pub fn triple(&self, p: usize, x: EnvSet, q: usize) -> bool {
        self.triples[(x as usize * self.n + p) * self.n + q]
    }

    pub fn contains(&self, e: Entry) -> bool {
        match e {
            Entry::Pair(p, q) => self.pair(p, q),
            Entry::Triple(p, x, q) => self.triple(p, x, q),
        }
    }

    pub fn set(&mut self, e: Entry, value: bool) {
        let n = self.n;
        match e {
            Entry::Pair(p, q) => {
                self.pairs[p * n + q] = value;
                self.pairs[q * n + p] = value;
            }
            Entry::Triple(p, x, q) => {
                let base = x as usize * n * n;
                self.triples[base + p * n + q] = value;
                self.triples[base + q * n + p] = value;
            }
        }
    }

    pub fn insert(&mut self, e: Entry) {
        self.set(e, true);
    }

    pub fn remove(&mut self, e: Entry) {
        self.set(e, false);
    }

    /// Present entries in (state, state) then (mask, state, state) order.
    pub fn entries(&self) -> impl Iterator<Item = Entry> + '_ {
        let n = self.n;
        let pairs = (0..n * n)
            .filter(|&i| self.pairs[i])
            .map(move |i| Entry::Pair(i / n, i % n));
        let triples = (0..n * n * self.envs)
            .filter(|&i| self.triples[i])
            .map(move |i| Entry::Triple((i / n) % n, (i / (n * n)) as EnvSet, i % n));
        pairs.chain(triples)
    }

    pub fn len(&self) -> usize {
        self.pairs.iter().filter(|b| **b).count() + self.triples.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries().all(|e| self.contains(e.flipped()))
    }
}
