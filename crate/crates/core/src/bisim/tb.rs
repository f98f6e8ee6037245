//! t-branching bisimilarity on systems with encoding labels.

use super::engine::{Graph, Rules, Violation};
use super::store::RelationStore;
use crate::lts::ExtLabel;

pub(crate) struct Tb<'g, 'a> {
    pub g: &'g Graph<'a>,
}

impl Rules for Tb<'_, '_> {
    fn pair(&self, st: &RelationStore, p: usize, q: usize) -> Option<Violation> {
        let g = self.g;
        if !g.has_tau[p] && !g.stable_reach[q] {
            return Some(Violation::new("3"));
        }
        for &(l, p1) in g.succ(p) {
            match l {
                ExtLabel::TSet(_) => {}
                ExtLabel::Timeout => {
                    let ok = g.t_path(
                        q,
                        |u| st.pair(p, u),
                        |u| st.pair(p, u),
                        |u| st.pair(p1, u),
                        |v| st.pair(p, v),
                    );
                    if !ok {
                        return Some(Violation::step("2", l, p1));
                    }
                }
                _ => {
                    if !g.weak_match(q, l, |q1| st.pair(p, q1), |q2| st.pair(p1, q2)) {
                        return Some(Violation::step("1", l, p1));
                    }
                }
            }
        }
        None
    }
}

pub(crate) struct TbRooted<'g, 'a> {
    pub g: &'g Graph<'a>,
    pub base: &'g RelationStore,
}

impl Rules for TbRooted<'_, '_> {
    fn pair(&self, _st: &RelationStore, p: usize, q: usize) -> Option<Violation> {
        let g = self.g;
        for &(l, p1) in g.succ(p) {
            if !g.targets(q, l).any(|q1| self.base.pair(p1, q1)) {
                return Some(Violation::step("1", l, p1));
            }
        }
        None
    }
}
