//! Seeded random generation of closed, guarded terms, term pairs and
//! one-hole contexts.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{ActionLabel, ActionSet, Name, RenamingMap};
use crate::term::{RecSpec, Substitution, Term};

/// Name of the hole variable in contexts.
pub const HOLE: &str = "hole";

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
    sigma: Vec<Name>,
    pool: Vec<Arc<RecSpec>>,
    pub max_depth: usize,
    /// Probability that a leaf is a recursive process from the pool.
    pub rec_prob: f64,
}

impl Sampler {
    /// A sampler over `sigma`, which should be small and non-empty.
    pub fn new(seed: u64, sigma: &ActionSet) -> Sampler {
        let mut s = Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sigma: sigma.iter().map(Name::from).collect(),
            pool: Vec::new(),
            max_depth: 4,
            rec_prob: 0.2,
        };
        s.pool = (0..4).map(|i| Arc::new(s.spec(i))).collect();
        s
    }

    /// The default alphabet `{a, b}` or `{a, b, c}`.
    pub fn alphabet(size: usize) -> ActionSet {
        ["a", "b", "c"].into_iter().take(size.clamp(1, 3)).collect()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn sigma(&self) -> ActionSet {
        self.sigma.iter().map(|n| &**n).collect()
    }

    pub fn pool(&self) -> &[Arc<RecSpec>] {
        &self.pool
    }

    pub fn visible(&mut self) -> ActionLabel {
        ActionLabel::Visible(self.sigma.choose(&mut self.rng).expect("non-empty alphabet").clone())
    }

    pub fn action(&mut self) -> ActionLabel {
        match self.rng.gen_range(0..10) {
            0..=1 => ActionLabel::Tau,
            2..=3 => ActionLabel::Timeout,
            _ => self.visible(),
        }
    }

    pub fn action_set(&mut self) -> ActionSet {
        let mut x = ActionSet::new();
        for n in &self.sigma {
            if self.rng.gen_bool(0.5) {
                x.insert(n);
            }
        }
        x
    }

    pub fn renaming(&mut self) -> RenamingMap {
        let mut r = RenamingMap::new();
        for a in self.sigma.clone() {
            let k = self.rng.gen_range(0..=2);
            for _ in 0..k {
                let b = self.sigma.choose(&mut self.rng).unwrap().clone();
                r.insert(&a, &b);
            }
        }
        r
    }

    /// A well-guarded specification: every recursive call sits under a
    /// visible prefix.
    fn spec(&mut self, i: usize) -> RecSpec {
        let vars = ["x", "y"];
        let k = self.rng.gen_range(1..=2);
        let eqs: Vec<(&str, Term)> = (0..k)
            .map(|j| {
                let call = Term::var(vars[self.rng.gen_range(0..k)]);
                let a = self.visible();
                let guarded = Term::prefix(a, self.maybe_prefixed(call));
                let other = self.closed(1, false);
                let body = if self.rng.gen_bool(0.5) {
                    Term::choice(guarded, other)
                } else {
                    self.wrap_prefix(guarded)
                };
                (vars[j], body)
            })
            .collect();
        RecSpec::new(&format!("S{i}"), eqs).expect("distinct variables")
    }

    fn maybe_prefixed(&mut self, t: Term) -> Term {
        if self.rng.gen_bool(0.4) {
            let a = self.action();
            Term::prefix(a, t)
        } else {
            t
        }
    }

    fn wrap_prefix(&mut self, t: Term) -> Term {
        let a = self.action();
        Term::prefix(a, t)
    }

    /// A closed, valid term of depth at most `max_depth`, recursion only
    /// through the well-guarded pool.
    pub fn term(&mut self) -> Term {
        self.closed(self.max_depth, true)
    }

    /// As [`Sampler::term`] with an explicit depth bound.
    pub fn term_of_depth(&mut self, depth: usize) -> Term {
        self.closed(depth, true)
    }

    fn leaf(&mut self, rec: bool) -> Term {
        if rec && !self.pool.is_empty() && self.rng.gen_bool(self.rec_prob) {
            let spec = self.pool.choose(&mut self.rng).unwrap().clone();
            let x = spec.vars().next().unwrap().to_string();
            Term::rec(&x, spec).expect("bound variable")
        } else {
            Term::Nil
        }
    }

    fn closed(&mut self, depth: usize, rec: bool) -> Term {
        if depth == 0 {
            return self.leaf(rec);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..100) {
            0..=9 => self.leaf(rec),
            10..=49 => {
                let a = self.action();
                Term::prefix(a, self.closed(d, rec))
            }
            50..=69 => Term::choice(self.closed(d, rec), self.closed(d, rec)),
            70..=75 => {
                let s = self.action_set();
                let (l, r) = (self.closed(d.min(2), rec), self.closed(d.min(2), rec));
                Term::par(s, l, r)
            }
            76..=81 => {
                let i = self.action_set();
                Term::hide(i, self.closed(d, rec))
            }
            82..=87 => {
                let r = self.renaming();
                Term::rename(r, self.closed(d, rec))
            }
            88..=93 => {
                let u = self.action_set();
                let l: ActionSet = u.iter().filter(|_| self.rng.gen_bool(0.5)).collect();
                Term::theta(l, u, self.closed(d, rec)).expect("L ⊆ U")
            }
            _ => {
                let x = self.action_set();
                Term::psi(x, self.closed(d, rec))
            }
        }
    }

    /// Two terms that are often, but not always, equivalent: the second is
    /// the first with one subterm rewritten.
    pub fn pair(&mut self) -> (Term, Term) {
        let p = self.term();
        let q = self.mutate(&p);
        (p, q)
    }

    /// `p` with one randomly chosen subterm rewritten.
    pub fn mutate(&mut self, p: &Term) -> Term {
        let n = p.size();
        let target = self.rng.gen_range(0..n);
        let mut counter = 0;
        self.rewrite_at(p, target, &mut counter)
    }

    fn rewrite_at(&mut self, t: &Term, target: usize, counter: &mut usize) -> Term {
        let here = *counter;
        *counter += 1;
        if here == target {
            return self.rewrite(t);
        }
        let mut sub = |s: &mut Self, e: &Arc<Term>| Arc::new(s.rewrite_at(e, target, counter));
        match t {
            Term::Prefix(a, e) => Term::Prefix(a.clone(), sub(self, e)),
            Term::Choice(l, r) => {
                let l = sub(self, l);
                Term::Choice(l, sub(self, r))
            }
            Term::Par(s, l, r) => {
                let l = sub(self, l);
                Term::Par(s.clone(), l, sub(self, r))
            }
            Term::Hide(i, e) => Term::Hide(i.clone(), sub(self, e)),
            Term::Rename(r, e) => Term::Rename(r.clone(), sub(self, e)),
            Term::Theta(l, u, e) => Term::Theta(l.clone(), u.clone(), sub(self, e)),
            Term::Psi(x, e) => Term::Psi(x.clone(), sub(self, e)),
            Term::Nil | Term::Var(_) | Term::Rec(..) => t.clone(),
        }
    }

    fn rewrite(&mut self, t: &Term) -> Term {
        match self.rng.gen_range(0..8) {
            0 => Term::prefix(ActionLabel::Tau, t.clone()),
            1 => Term::choice(t.clone(), t.clone()),
            2 => Term::choice(t.clone(), Term::Nil),
            3 => match t {
                Term::Prefix(a, e) if *a != ActionLabel::Tau => {
                    Term::prefix(a.clone(), Term::prefix(ActionLabel::Tau, (**e).clone()))
                }
                _ => Term::prefix(ActionLabel::Timeout, t.clone()),
            },
            4 => match t {
                Term::Prefix(ActionLabel::Timeout, _) => Term::prefix(ActionLabel::Timeout, t.clone()),
                _ => {
                    let e = self.closed(1, false);
                    Term::choice(t.clone(), Term::prefix(ActionLabel::Timeout, e))
                }
            },
            5 => {
                let x = self.action_set();
                Term::theta_x(x, t.clone())
            }
            _ => self.closed(2, true),
        }
    }

    /// A one-hole context of depth at most 2; the hole is the free variable
    /// [`HOLE`].
    pub fn context(&mut self) -> Term {
        let depth = self.rng.gen_range(1..=2);
        let mut c = Term::var(HOLE);
        for _ in 0..depth {
            c = self.context_layer(c);
        }
        c
    }

    fn context_layer(&mut self, c: Term) -> Term {
        let other = self.closed(2, false);
        match self.rng.gen_range(0..10) {
            0 => Term::prefix(self.action(), c),
            1 => Term::choice(c, other),
            2 => Term::choice(other, c),
            3 => {
                let s = self.action_set();
                Term::par(s, c, other)
            }
            4 => {
                let s = self.action_set();
                Term::par(s, other, c)
            }
            5 => Term::hide(self.action_set(), c),
            6 => Term::rename(self.renaming(), c),
            7 => {
                let u = self.action_set();
                let l: ActionSet = u.iter().filter(|_| self.rng.gen_bool(0.5)).collect();
                Term::theta(l, u, c).expect("L ⊆ U")
            }
            8 => Term::psi(self.action_set(), c),
            _ => {
                // ⟨z|{z = a.z + C}⟩ with the hole outside every θ and ψ
                let a = self.visible();
                let body = Term::choice(Term::prefix(a, Term::var("z")), c);
                let spec = RecSpec::new("C", [("z", body)]).expect("one equation");
                Term::rec("z", Arc::new(spec)).expect("bound variable")
            }
        }
    }
}

/// `C[p]`.
pub fn plug(context: &Term, p: &Term) -> Term {
    let rho: Substitution = [(Name::from(HOLE), p.clone())].into_iter().collect();
    context
        .substitute(&rho)
        .expect("closed processes keep contexts valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_closed_valid_guarded() {
        let mut s = Sampler::new(7, &Sampler::alphabet(3));
        for _ in 0..200 {
            let t = s.term();
            assert!(t.is_closed() && t.is_valid() && t.is_guarded(), "{t}");
            let (p, q) = s.pair();
            assert!(q.is_closed() && q.is_valid() && q.is_guarded(), "{p} / {q}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let mut a = Sampler::new(3, &Sampler::alphabet(2));
        let mut b = Sampler::new(3, &Sampler::alphabet(2));
        for _ in 0..20 {
            assert_eq!(a.term(), b.term());
        }
    }

    #[test]
    fn contexts_have_one_free_hole() {
        let mut s = Sampler::new(11, &Sampler::alphabet(2));
        for _ in 0..100 {
            let c = s.context();
            assert!(c.free_vars().iter().all(|v| &**v == HOLE));
            let filled = plug(&c, &Term::prefix(ActionLabel::visible("a"), Term::Nil));
            assert!(filled.is_closed() && filled.is_valid());
        }
    }
}
