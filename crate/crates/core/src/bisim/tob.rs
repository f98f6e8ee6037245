//! Time-out bisimulation over a state space extended with `θ_X` states.

use super::engine::{Graph, Rules, Violation};
use super::store::RelationStore;
use crate::lts::{EnvSet, ExtLabel, Lts, LtsBuilder, StateTag};

const NONE: usize = usize::MAX;

/// `lts` holds the original states first, then one state `θ_X(s)` for
/// every mask `X` and every state `s` that is not idle under `X`. Idle
/// states stand for their own `θ_X` image.
#[derive(Clone, Debug)]
pub struct ThetaSpace {
    pub lts: Lts,
    base: usize,
    ids: Vec<usize>,
    origin: Vec<(EnvSet, usize)>,
}

impl ThetaSpace {
    pub fn build(l: &Lts) -> ThetaSpace {
        let n = l.num_states();
        let envs = l.alphabet().num_envs();
        let mut b = LtsBuilder::new(l.alphabet().clone());
        for s in 0..n {
            b.add_state(l.tag(s).clone());
        }
        let mut ids = vec![NONE; envs * n];
        let mut origin = Vec::new();
        for x in 0..envs as EnvSet {
            for s in 0..n {
                if !l.is_idle(s, x) {
                    let name = format!("theta_{{{}}}({})", l.alphabet().render_set(x), l.state_text(s));
                    ids[x as usize * n + s] = b.add_state(StateTag::Named(name));
                    origin.push((x, s));
                }
            }
        }
        for (s, lab, d) in l.transitions() {
            b.add_transition(s, lab, d);
        }
        for x in 0..envs as EnvSet {
            for s in 0..n {
                let me = ids[x as usize * n + s];
                if me == NONE {
                    continue;
                }
                for &(lab, d) in l.successors(s) {
                    match lab {
                        ExtLabel::Tau => {
                            let d2 = if l.is_idle(d, x) { d } else { ids[x as usize * n + d] };
                            b.add_transition(me, lab, d2);
                        }
                        ExtLabel::Visible(a) if x >> a & 1 == 1 => b.add_transition(me, lab, d),
                        _ => {}
                    }
                }
            }
        }
        ThetaSpace {
            lts: b.finish(l.initial()),
            base: n,
            ids,
            origin,
        }
    }

    pub fn num_base(&self) -> usize {
        self.base
    }

    /// The state standing for `θ_X(s)`, if the space has one.
    pub fn theta(&self, x: EnvSet, s: usize) -> Option<usize> {
        if self.lts.is_idle(s, x) {
            return Some(s);
        }
        if s < self.base {
            return Some(self.ids[x as usize * self.base + s]);
        }
        let (y, inner) = self.origin[s - self.base];
        if y == x {
            Some(s)
        } else if !self.lts.has_tau(inner) {
            // a stable θ_Y(s) offers exactly the actions of s in Y
            self.theta(x & y, inner)
        } else {
            None
        }
    }
}

pub(crate) struct Tob<'g, 'a> {
    pub g: &'g Graph<'a>,
    pub space: &'g ThetaSpace,
}

impl Tob<'_, '_> {
    fn rel(&self, st: &RelationStore, x: EnvSet, p: usize, q: usize) -> bool {
        match (self.space.theta(x, p), self.space.theta(x, q)) {
            (Some(a), Some(b)) => st.pair(a, b),
            _ => false,
        }
    }
}

impl Rules for Tob<'_, '_> {
    fn pair(&self, st: &RelationStore, p: usize, q: usize) -> Option<Violation> {
        let g = self.g;
        if !g.has_tau[p] && !g.stable_reach[q] {
            return Some(Violation::new("3"));
        }
        for &(l, p1) in g.succ(p) {
            if l == ExtLabel::Timeout {
                continue;
            }
            if !g.weak_match(q, l, |q1| st.pair(p, q1), |q2| st.pair(p1, q2)) {
                return Some(Violation::step("1", l, p1));
            }
        }
        if g.tout[p].is_empty() || g.has_tau[p] {
            return None;
        }
        for x in 0..g.envs as EnvSet {
            if !g.idle(p, x) {
                continue;
            }
            for &p1 in &g.tout[p] {
                let ok = g.t_path(
                    q,
                    |u| !g.has_tau[u],
                    |u| g.idle(u, x),
                    |u| self.rel(st, x, p1, u),
                    |v| self.rel(st, x, p, v),
                );
                if !ok {
                    return Some(Violation::step("2", ExtLabel::Timeout, p1).with_env(x));
                }
            }
        }
        None
    }
}

pub(crate) struct TobRooted<'g, 'a> {
    pub g: &'g Graph<'a>,
    pub space: &'g ThetaSpace,
    pub base: &'g RelationStore,
}

impl Rules for TobRooted<'_, '_> {
    fn pair(&self, _st: &RelationStore, p: usize, q: usize) -> Option<Violation> {
        let g = self.g;
        for &(l, p1) in g.succ(p) {
            if l != ExtLabel::Timeout && !g.targets(q, l).any(|q1| self.base.pair(p1, q1)) {
                return Some(Violation::step("1", l, p1));
            }
        }
        if g.has_tau[p] {
            return None;
        }
        let tob = Tob {
            g,
            space: self.space,
        };
        for x in 0..g.envs as EnvSet {
            if !g.idle(p, x) {
                continue;
            }
            for &p1 in &g.tout[p] {
                if !g.tout[q].iter().any(|&q1| tob.rel(self.base, x, p1, q1)) {
                    return Some(Violation::step("2", ExtLabel::Timeout, p1).with_env(x));
                }
            }
        }
        None
    }
}
