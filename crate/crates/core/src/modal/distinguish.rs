//! Distinguishing formulas read off the deletion log of the generalised
//! checker: every removed entry gets a formula its left state satisfies and
//! its right state does not, built from formulas of entries removed earlier.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use super::{Evaluator, Formula};
use crate::action::{ActionLabel, ActionSet};
use crate::bisim::engine::{Graph, Run};
use crate::bisim::{joint_space, solve, Entry, Relation};
use crate::error::{Error, Result};
use crate::lts::{EnvSet, ExtLabel, Lts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    Lb,
    Lbr,
}

/// Satisfaction relation the formula is meant for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Triggered,
    Env(ActionSet),
}

/// A formula of `fragment` telling `p` and `q` apart under `target`, or
/// `None` when they are equivalent.
pub fn distinguish(
    l1: &Lts,
    p: usize,
    l2: &Lts,
    q: usize,
    fragment: Fragment,
    target: &Target,
) -> Result<Option<Rc<Formula>>> {
    let (joint, off) = joint_space(l1, l2)?;
    if joint.has_encoded_labels() {
        return Err(Error::FragmentUnsupported("systems with encoding labels".into()));
    }
    let q = q + off;
    let env = match target {
        Target::Triggered => None,
        Target::Env(x) => Some(joint.alphabet().mask(x)),
    };
    let entry = match env {
        None => Entry::Pair(p, q),
        Some(x) => Entry::Triple(p, x, q),
    };
    let rooted = fragment == Fragment::Lbr;
    let rel = if rooted {
        Relation::GbrbRooted
    } else {
        Relation::Gbrb
    };
    let (store, run, base, _, _) = solve(rel, &joint, None)?;
    if store.contains(entry) {
        return Ok(None);
    }
    // For the rooted layer the plain log comes from a separate run.
    let plain_run = if rooted {
        let (plain, run, _, _, _) = solve(Relation::Gbrb, &joint, None)?;
        debug_assert_eq!(Some(&plain), base.as_ref());
        Some(run)
    } else {
        None
    };
    let (plain_log, rooted_log) = match &plain_run {
        Some(pr) => (pr, Some(&run)),
        None => (&run, None),
    };
    let mut x = Extractor::new(&joint, plain_log);
    let f = match rooted_log {
        Some(rl) => x.rooted(rl, entry),
        None => x.formula(entry),
    };
    let mut ev = Evaluator::new(&joint);
    let target_env = env.map(|m| joint.alphabet().set_of(m));
    let ok = f.in_fragment(fragment)
        && ev.holds(p, &f, target_env.as_ref())
        && !ev.holds(q, &f, target_env.as_ref());
    if !ok {
        return Err(Error::Validity(
            "extracted formula does not distinguish the states".into(),
        ));
    }
    Ok(Some(f))
}

struct Extractor<'a> {
    lts: &'a Lts,
    g: Graph<'a>,
    run: &'a Run,
    memo: HashMap<Entry, Rc<Formula>>,
    reach: HashMap<usize, Rc<Vec<usize>>>,
}

impl<'a> Extractor<'a> {
    fn new(lts: &'a Lts, run: &'a Run) -> Self {
        Extractor {
            lts,
            g: Graph::new(lts),
            run,
            memo: HashMap::new(),
            reach: HashMap::new(),
        }
    }

    fn set(&self, x: EnvSet) -> ActionSet {
        self.lts.alphabet().set_of(x)
    }

    fn action(&self, l: ExtLabel) -> ActionLabel {
        match l {
            ExtLabel::Tau => ActionLabel::Tau,
            ExtLabel::Timeout => ActionLabel::Timeout,
            ExtLabel::Visible(i) => ActionLabel::visible(self.lts.alphabet().name(i as usize)),
            _ => unreachable!("encoding labels are rejected up front"),
        }
    }

    /// States reachable by τ and time-out steps.
    fn reach(&mut self, q: usize) -> Rc<Vec<usize>> {
        if let Some(r) = self.reach.get(&q) {
            return r.clone();
        }
        let mut seen = vec![false; self.g.n];
        let mut queue = VecDeque::from([q]);
        seen[q] = true;
        while let Some(s) = queue.pop_front() {
            for &d in self.g.tau[s].iter().chain(&self.g.tout[s]) {
                if !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            }
        }
        let r: Rc<Vec<usize>> = Rc::new((0..self.g.n).filter(|&s| seen[s]).collect());
        self.reach.insert(q, r.clone());
        r
    }

    /// The formula of a removed plain entry; dependencies are resolved with
    /// an explicit stack.
    fn formula(&mut self, e: Entry) -> Rc<Formula> {
        let mut stack = vec![e];
        while let Some(&top) = stack.last() {
            if self.memo.contains_key(&top) {
                stack.pop();
                continue;
            }
            let mut missing = Vec::new();
            let f = self.build(top, &mut missing);
            if missing.is_empty() {
                self.memo.insert(top, f);
                stack.pop();
            } else {
                stack.extend(missing);
            }
        }
        self.memo[&e].clone()
    }

    /// Conjunction of the formulas of `deps`, recording those not built yet.
    fn conj(&self, deps: impl IntoIterator<Item = Entry>, missing: &mut Vec<Entry>) -> Rc<Formula> {
        let mut parts = Vec::new();
        for d in deps {
            match self.memo.get(&d) {
                Some(f) => parts.push(f.clone()),
                None => missing.push(d),
            }
        }
        Formula::and(parts)
    }

    fn build(&mut self, e: Entry, missing: &mut Vec<Entry>) -> Rc<Formula> {
        let (time, v) = *self
            .run
            .log
            .get(&e)
            .expect("only removed entries have formulas");
        if v.clause == "sym" {
            let c = v.cause.expect("mirrored entry");
            return match self.memo.get(&c) {
                Some(f) => Formula::not(f.clone()),
                None => {
                    missing.push(c);
                    Formula::top()
                }
            };
        }
        let (p, q) = (e.lhs(), e.rhs());
        let reach = matches!(v.clause, "1.b" | "2.c").then(|| self.reach(q));
        let run = self.run;
        let dead = |x: Entry| run.deleted_before(x, time);
        let g = &self.g;
        match (v.clause, e) {
            ("1.c" | "2.d", _) => Formula::stable(),
            ("1.a" | "2.a" | "2.b", _) => {
                let (l, p1) = v.step.expect("step clause");
                let x = e.env();
                let at = |a: usize, b: usize| match x {
                    Some(x) => Entry::Triple(a, x, b),
                    None => Entry::Pair(a, b),
                };
                // the continuation of a visible step is always a pair
                let after = |a: usize, b: usize| match l {
                    ExtLabel::Visible(_) => Entry::Pair(a, b),
                    _ => at(a, b),
                };
                let mut before_deps = Vec::new();
                let mut after_deps = Vec::new();
                for &q1 in &g.weak[q] {
                    if dead(at(p, q1)) {
                        before_deps.push(at(p, q1));
                        continue;
                    }
                    if l == ExtLabel::Tau {
                        after_deps.push(after(p1, q1));
                    }
                    after_deps.extend(g.targets(q1, l).map(|q2| after(p1, q2)));
                }
                after_deps.sort();
                after_deps.dedup();
                debug_assert!(after_deps.iter().all(|&d| dead(d)));
                let f1 = self.conj(before_deps, missing);
                let f2 = self.conj(after_deps, missing);
                Formula::eps_step(f1, self.action(l), f2)
            }
            ("1.b" | "2.c", _) => {
                let (_, p1) = v.step.expect("step clause");
                let y = v.env.expect("quantified environment");
                let reach = reach.expect("computed above");
                let before = reach
                    .iter()
                    .map(|&s| Entry::Triple(p, y, s))
                    .filter(|&d| dead(d))
                    .collect::<Vec<_>>();
                let after = reach
                    .iter()
                    .map(|&s| Entry::Triple(p1, y, s))
                    .filter(|&d| dead(d))
                    .collect::<Vec<_>>();
                let f1 = self.conj(before, missing);
                let f2 = self.conj(after, missing);
                Formula::eps_x(f1, self.set(y), f2)
            }
            (clause, _) => unreachable!("clause {clause} does not occur in the generalised checker"),
        }
    }

    /// Formula of an entry removed by the rooted layer, which only refers to
    /// the final plain relation.
    fn rooted(&mut self, log: &Run, e: Entry) -> Rc<Formula> {
        let (_, v) = log.log[&e];
        if v.clause == "sym" {
            return Formula::not(self.rooted(log, v.cause.expect("mirrored entry")));
        }
        let (l, p1) = v.step.expect("rooted clauses are step clauses");
        let q = e.rhs();
        let (deps, x): (Vec<Entry>, Option<EnvSet>) = match (v.clause, l) {
            ("2.a", _) => {
                let x = e.env().expect("triple");
                (self.g.targets(q, l).map(|q1| Entry::Triple(p1, x, q1)).collect(), None)
            }
            (_, ExtLabel::Timeout) => {
                let y = v.env.expect("quantified environment");
                (self.g.targets(q, l).map(|q1| Entry::Triple(p1, y, q1)).collect(), Some(y))
            }
            _ => (self.g.targets(q, l).map(|q1| Entry::Pair(p1, q1)).collect(), None),
        };
        let parts: Vec<Rc<Formula>> = deps.into_iter().map(|d| self.formula(d)).collect();
        let body = Formula::and(parts);
        match x {
            Some(y) => Formula::timeout(self.set(y), body),
            None => Formula::diamond(self.action(l), body),
        }
    }
}
