use std::collections::HashMap;
use std::rc::Rc;

use super::Formula;
use crate::action::{ActionLabel, ActionSet};
use crate::lts::{EnvSet, ExtLabel, Lts};
use crate::semantics::weak_reach;

/// `None` is the triggered environment, `Some(Y)` the one allowing `Y`.
type Env = Option<EnvSet>;

/// Bulk evaluator: computes the satisfying states of each subformula once
/// per environment.
pub struct Evaluator<'a> {
    lts: &'a Lts,
    weak: Vec<Vec<usize>>,
    memo: HashMap<(usize, Env), Rc<Vec<bool>>>,
    // Keeps memoised formulas alive so their addresses stay unique.
    pinned: Vec<Rc<Formula>>,
}

impl<'a> Evaluator<'a> {
    pub fn new(lts: &'a Lts) -> Self {
        Evaluator {
            weak: weak_reach(lts),
            lts,
            memo: HashMap::new(),
            pinned: Vec::new(),
        }
    }

    pub fn lts(&self) -> &Lts {
        self.lts
    }

    pub fn holds(&mut self, s: usize, f: &Rc<Formula>, env: Option<&ActionSet>) -> bool {
        let env = env.map(|y| self.lts.alphabet().mask(y));
        self.vector(f, env)[s]
    }

    /// Satisfaction of `f` in every state.
    pub fn vector(&mut self, f: &Rc<Formula>, env: Env) -> Rc<Vec<bool>> {
        let key = (Rc::as_ptr(f) as usize, env);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let v = Rc::new(self.compute(f, env));
        self.pinned.push(f.clone());
        self.memo.insert(key, v.clone());
        v
    }

    fn n(&self) -> usize {
        self.lts.num_states()
    }

    fn mask(&self, x: &ActionSet) -> EnvSet {
        self.lts.alphabet().mask(x)
    }

    fn idle(&self, s: usize, x: EnvSet) -> bool {
        self.lts.is_idle(s, x)
    }

    fn label(&self, a: &ActionLabel) -> Option<ExtLabel> {
        Some(match a {
            ActionLabel::Tau => ExtLabel::Tau,
            ActionLabel::Timeout => ExtLabel::Timeout,
            ActionLabel::Visible(n) => ExtLabel::Visible(self.lts.alphabet().index(n)? as u32),
        })
    }

    fn exists_succ(&self, s: usize, l: ExtLabel, target: &[bool]) -> bool {
        self.lts
            .successors(s)
            .iter()
            .any(|&(m, d)| m == l && target[d])
    }

    fn diamond(&mut self, a: &ActionLabel, g: &Rc<Formula>, env: Env) -> Vec<bool> {
        let n = self.n();
        let Some(l) = self.label(a) else {
            return vec![false; n];
        };
        match (a, env) {
            (ActionLabel::Visible(_), Some(y)) => {
                let inner = self.vector(g, None);
                let ExtLabel::Visible(i) = l else { unreachable!() };
                let allowed = y & (1 << i) != 0;
                (0..n)
                    .map(|s| (allowed || self.idle(s, y)) && self.exists_succ(s, l, &inner))
                    .collect()
            }
            _ => {
                let inner = self.vector(g, env);
                (0..n).map(|s| self.exists_succ(s, l, &inner)).collect()
            }
        }
    }

    fn eps(&self, inner: &[bool]) -> Vec<bool> {
        self.weak.iter().map(|w| w.iter().any(|&u| inner[u])).collect()
    }

    fn compute(&mut self, f: &Rc<Formula>, env: Env) -> Vec<bool> {
        let n = self.n();
        match &**f {
            Formula::Top => vec![true; n],
            Formula::And(items) => {
                let mut acc = vec![true; n];
                for g in items {
                    let v = self.vector(g, env);
                    for (a, b) in acc.iter_mut().zip(v.iter()) {
                        *a &= *b;
                    }
                }
                acc
            }
            Formula::Not(g) => self.vector(g, env).iter().map(|b| !b).collect(),
            Formula::Diamond(a, g) => self.diamond(a, g, env),
            Formula::HatDiamond(a, g) => {
                let mut v = self.diamond(a, g, env);
                if *a == ActionLabel::Tau {
                    let here = self.vector(g, env);
                    for (x, h) in v.iter_mut().zip(here.iter()) {
                        *x |= *h;
                    }
                }
                v
            }
            Formula::EnvBox(x, g) => {
                let xm = self.mask(x);
                let inner = self.vector(g, Some(xm));
                let block = xm | env.unwrap_or(0);
                (0..n).map(|s| self.idle(s, block) && inner[s]).collect()
            }
            Formula::TimeoutDiamond(x, g) => {
                let xm = self.mask(x);
                let inner = self.vector(g, Some(xm));
                let block = xm | env.unwrap_or(0);
                (0..n)
                    .map(|s| self.idle(s, block) && self.exists_succ(s, ExtLabel::Timeout, &inner))
                    .collect()
            }
            Formula::Eps(g) => {
                let inner = self.vector(g, env);
                self.eps(&inner)
            }
            Formula::EpsStep(g, a, h) => {
                let left = self.vector(g, env);
                let hat = Rc::new(Formula::HatDiamond(a.clone(), h.clone()));
                let step = self.compute(&hat, env);
                let both: Vec<bool> = left.iter().zip(step.iter()).map(|(x, y)| *x && *y).collect();
                self.eps(&both)
            }
            Formula::Stable => {
                let unstable: Vec<bool> = (0..n).map(|s| !self.lts.has_tau(s)).collect();
                self.eps(&unstable)
            }
            Formula::EpsX(g, x, h) => {
                let xm = self.mask(x);
                let a = self.vector(g, Some(xm));
                let b = self.vector(h, Some(xm));
                let w = self.odd_positions(&a, &b, xm);
                let first_block = env.map_or(xm, |y| xm | y);
                let start: Vec<bool> = (0..n).map(|u| w[u] && self.idle(u, first_block)).collect();
                self.eps(&start)
            }
        }
    }

    /// Least set of states usable at an odd position of an `ε_X` path.
    fn odd_positions(&self, a: &[bool], b: &[bool], x: EnvSet) -> Vec<bool> {
        let n = self.n();
        let cand: Vec<bool> = (0..n).map(|u| a[u] && self.idle(u, x)).collect();
        let mut w = vec![false; n];
        loop {
            let mut changed = false;
            for u in 0..n {
                if w[u] || !cand[u] {
                    continue;
                }
                let ok = b[u]
                    || self.lts.successors(u).iter().any(|&(l, v)| {
                        l == ExtLabel::Timeout
                            && (b[v] || (a[v] && self.weak[v].iter().any(|&u2| w[u2])))
                    });
                if ok {
                    w[u] = true;
                    changed = true;
                }
            }
            if !changed {
                return w;
            }
        }
    }
}

/// `s ⊨ φ`.
pub fn sat(lts: &Lts, s: usize, f: &Rc<Formula>) -> bool {
    Evaluator::new(lts).holds(s, f, None)
}

/// `s ⊨_Y φ`.
pub fn sat_env(lts: &Lts, s: usize, y: &ActionSet, f: &Rc<Formula>) -> bool {
    Evaluator::new(lts).holds(s, f, Some(y))
}
