//! Generalised branching reactive bisimilarity: triples are consulted only
//! after a time-out.

use super::engine::{Graph, Rules, Violation};
use super::store::RelationStore;
use crate::lts::{EnvSet, ExtLabel};

pub(crate) struct Gbrb<'g, 'a> {
    pub g: &'g Graph<'a>,
}

impl Gbrb<'_, '_> {
    /// Time-out of `p` into `p1` matched from `q` under environment `y`.
    fn t_match(&self, st: &RelationStore, p: usize, p1: usize, y: EnvSet, q: usize) -> bool {
        let g = self.g;
        g.t_path(
            q,
            |u| !g.has_tau[u],
            |u| g.idle(u, y),
            |u| st.triple(p1, y, u),
            |v| st.triple(p, y, v),
        )
    }
}

impl Rules for Gbrb<'_, '_> {
    fn pair(&self, st: &RelationStore, p: usize, q: usize) -> Option<Violation> {
        let g = self.g;
        if !g.has_tau[p] && !g.stable_reach[q] {
            return Some(Violation::new("1.c"));
        }
        for &(l, p1) in g.succ(p) {
            if l == ExtLabel::Timeout {
                continue;
            }
            if !g.weak_match(q, l, |q1| st.pair(p, q1), |q2| st.pair(p1, q2)) {
                return Some(Violation::step("1.a", l, p1));
            }
        }
        for x in 0..g.envs as EnvSet {
            if !g.idle(p, x) {
                continue;
            }
            for &p1 in &g.tout[p] {
                if !self.t_match(st, p, p1, x, q) {
                    return Some(Violation::step("1.b", ExtLabel::Timeout, p1).with_env(x));
                }
            }
        }
        None
    }

    fn triple(&self, st: &RelationStore, p: usize, x: EnvSet, q: usize) -> Option<Violation> {
        let g = self.g;
        if !g.has_tau[p] && !g.stable_reach[q] {
            return Some(Violation::new("2.d"));
        }
        let idle = g.idle(p, x);
        for &(l, p1) in g.succ(p) {
            let ok = match l {
                ExtLabel::Tau => g.weak_match(
                    q,
                    l,
                    |q1| st.triple(p, x, q1),
                    |q2| st.triple(p1, x, q2),
                ),
                ExtLabel::Visible(a) if idle || x >> a & 1 == 1 => g.weak_match(
                    q,
                    l,
                    |q1| st.triple(p, x, q1),
                    |q2| st.pair(p1, q2),
                ),
                _ => true,
            };
            if !ok {
                let clause = if l == ExtLabel::Tau { "2.a" } else { "2.b" };
                return Some(Violation::step(clause, l, p1));
            }
        }
        if g.has_tau[p] || g.tout[p].is_empty() {
            return None;
        }
        for y in 0..g.envs as EnvSet {
            if !g.idle(p, x | y) {
                continue;
            }
            for &p1 in &g.tout[p] {
                if !self.t_match(st, p, p1, y, q) {
                    return Some(Violation::step("2.c", ExtLabel::Timeout, p1).with_env(y));
                }
            }
        }
        None
    }
}

/// Strong first steps answered by a plain generalised relation.
pub(crate) struct GbrbRooted<'g, 'a> {
    pub g: &'g Graph<'a>,
    pub base: &'g RelationStore,
}

impl Rules for GbrbRooted<'_, '_> {
    fn pair(&self, _st: &RelationStore, p: usize, q: usize) -> Option<Violation> {
        let g = self.g;
        for &(l, p1) in g.succ(p) {
            if l != ExtLabel::Timeout && !g.targets(q, l).any(|q1| self.base.pair(p1, q1)) {
                return Some(Violation::step("1.a", l, p1));
            }
        }
        for x in 0..g.envs as EnvSet {
            if !g.idle(p, x) {
                continue;
            }
            for &p1 in &g.tout[p] {
                if !g.tout[q].iter().any(|&q1| self.base.triple(p1, x, q1)) {
                    return Some(Violation::step("1.b", ExtLabel::Timeout, p1).with_env(x));
                }
            }
        }
        None
    }

    fn triple(&self, _st: &RelationStore, p: usize, x: EnvSet, q: usize) -> Option<Violation> {
        let g = self.g;
        let idle = g.idle(p, x);
        for &(l, p1) in g.succ(p) {
            let (clause, ok) = match l {
                ExtLabel::Tau => ("2.a", g.targets(q, l).any(|q1| self.base.triple(p1, x, q1))),
                ExtLabel::Visible(a) if idle || x >> a & 1 == 1 => {
                    ("2.b", g.targets(q, l).any(|q1| self.base.pair(p1, q1)))
                }
                _ => continue,
            };
            if !ok {
                return Some(Violation::step(clause, l, p1));
            }
        }
        if g.has_tau[p] {
            return None;
        }
        for y in 0..g.envs as EnvSet {
            if !g.idle(p, x | y) {
                continue;
            }
            for &p1 in &g.tout[p] {
                if !g.tout[q].iter().any(|&q1| self.base.triple(p1, y, q1)) {
                    return Some(Violation::step("2.c", ExtLabel::Timeout, p1).with_env(y));
                }
            }
        }
        None
    }
}
