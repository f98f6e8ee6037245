//! Branching reactive bisimilarity, its concrete variant and the rooted layer.

use super::engine::{Graph, Rules, Violation};
use super::store::{Entry, RelationStore};
use crate::lts::{EnvSet, ExtLabel};

pub(crate) struct Brb<'g, 'a> {
    pub g: &'g Graph<'a>,
    /// Match time-outs one-for-one instead of eliding them.
    pub concrete: bool,
}

impl Rules for Brb<'_, '_> {
    fn pair(&self, st: &RelationStore, p: usize, q: usize) -> Option<Violation> {
        let g = self.g;
        for y in 0..g.envs as EnvSet {
            if !st.triple(p, y, q) {
                return Some(Violation::new("1.b").caused_by(Entry::Triple(p, y, q)));
            }
        }
        for &(l, p1) in g.succ(p) {
            if l == ExtLabel::Timeout {
                continue;
            }
            if !g.weak_match(q, l, |q1| st.pair(p, q1), |q2| st.pair(p1, q2)) {
                return Some(Violation::step("1.a", l, p1));
            }
        }
        None
    }

    fn triple(&self, st: &RelationStore, p: usize, x: EnvSet, q: usize) -> Option<Violation> {
        let g = self.g;
        if !g.has_tau[p] && !g.stable_reach[q] {
            return Some(Violation::new("2.e"));
        }
        let idle = g.idle(p, x);
        if idle && !g.weak[q].iter().any(|&q0| st.pair(p, q0)) {
            return Some(Violation::new("2.c").caused_by(Entry::Pair(p, q)));
        }
        for &(l, p1) in g.succ(p) {
            let ok = match l {
                ExtLabel::Tau => g.weak_match(
                    q,
                    l,
                    |q1| st.triple(p, x, q1),
                    |q2| st.triple(p1, x, q2),
                ),
                ExtLabel::Visible(a) if x >> a & 1 == 1 => g.weak_match(
                    q,
                    l,
                    |q1| st.triple(p, x, q1),
                    |q2| st.pair(p1, q2),
                ),
                ExtLabel::Timeout if idle => {
                    if self.concrete {
                        g.weak[q].iter().any(|&q1| {
                            g.tout[q1].iter().any(|&q2| st.triple(p1, x, q2))
                        })
                    } else {
                        g.t_path(
                            q,
                            |u| g.idle(u, x),
                            |u| g.idle(u, x),
                            |u| st.triple(p1, x, u),
                            |v| st.triple(p, x, v),
                        )
                    }
                }
                _ => true,
            };
            if !ok {
                let clause = match l {
                    ExtLabel::Tau => "2.a",
                    ExtLabel::Timeout => "2.d",
                    _ => "2.b",
                };
                return Some(Violation::step(clause, l, p1));
            }
        }
        None
    }
}

/// Strong first steps answered by a plain relation.
pub(crate) struct BrbRooted<'g, 'a> {
    pub g: &'g Graph<'a>,
    pub base: &'g RelationStore,
}

impl Rules for BrbRooted<'_, '_> {
    fn pair(&self, st: &RelationStore, p: usize, q: usize) -> Option<Violation> {
        let g = self.g;
        for y in 0..g.envs as EnvSet {
            if !st.triple(p, y, q) {
                return Some(Violation::new("1.b").caused_by(Entry::Triple(p, y, q)));
            }
        }
        for &(l, p1) in g.succ(p) {
            if l != ExtLabel::Timeout && !g.targets(q, l).any(|q1| self.base.pair(p1, q1)) {
                return Some(Violation::step("1.a", l, p1));
            }
        }
        None
    }

    fn triple(&self, st: &RelationStore, p: usize, x: EnvSet, q: usize) -> Option<Violation> {
        let g = self.g;
        let idle = g.idle(p, x);
        if idle && !st.pair(p, q) {
            return Some(Violation::new("2.c").caused_by(Entry::Pair(p, q)));
        }
        for &(l, p1) in g.succ(p) {
            let (clause, ok) = match l {
                ExtLabel::Tau => ("2.a", g.targets(q, l).any(|q1| self.base.triple(p1, x, q1))),
                ExtLabel::Visible(a) if x >> a & 1 == 1 => {
                    ("2.b", g.targets(q, l).any(|q1| self.base.pair(p1, q1)))
                }
                ExtLabel::Timeout if idle => {
                    ("2.d", g.targets(q, l).any(|q1| self.base.triple(p1, x, q1)))
                }
                _ => continue,
            };
            if !ok {
                return Some(Violation::step(clause, l, p1));
            }
        }
        None
    }
}
