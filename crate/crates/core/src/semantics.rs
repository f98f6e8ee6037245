//! Structural operational semantics and LTS construction.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::action::{ActionLabel, ActionSet};
use crate::error::{Error, Result};
use crate::lts::{Alphabet, ExtLabel, Lts, LtsBuilder, StateTag};
use crate::term::Term;

pub const DEFAULT_MAX_STATES: usize = 50_000;
pub const DEFAULT_MAX_DEPTH: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExplorationLimits {
    pub max_states: usize,
    /// Recursion unfolding fuse for a single `step` call.
    pub max_depth: usize,
}

impl Default for ExplorationLimits {
    fn default() -> Self {
        ExplorationLimits {
            max_states: DEFAULT_MAX_STATES,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

pub type Step = (ActionLabel, Term);

/// All transitions derivable for a closed term.
pub fn step(p: &Term) -> Result<Vec<Step>> {
    step_with(p, DEFAULT_MAX_DEPTH)
}

pub fn step_with(p: &Term, max_depth: usize) -> Result<Vec<Step>> {
    let mut cx = Unfold {
        fuel: max_depth,
        active: Vec::new(),
    };
    let mut out = steps(p, &mut cx)?;
    dedup(&mut out);
    Ok(out)
}

/// `I(P)`: the labels in `A ∪ {τ}` of outgoing transitions.
pub fn initials(p: &Term) -> Result<(ActionSet, bool)> {
    Ok(split_initials(&step(p)?))
}

fn split_initials(st: &[Step]) -> (ActionSet, bool) {
    let mut vis = ActionSet::new();
    let mut tau = false;
    for (a, _) in st {
        match a {
            ActionLabel::Visible(n) => {
                vis.insert(n);
            }
            ActionLabel::Tau => tau = true,
            ActionLabel::Timeout => {}
        }
    }
    (vis, tau)
}

fn idle(st: &[Step], x: &ActionSet) -> bool {
    let (vis, tau) = split_initials(st);
    !tau && vis.intersection(x).is_empty()
}

fn dedup(v: &mut Vec<Step>) {
    let mut seen = HashSet::new();
    v.retain(|s| seen.insert(s.clone()));
}

/// Unfolding bookkeeping for one `step` evaluation.
struct Unfold {
    fuel: usize,
    active: Vec<(usize, crate::action::Name)>,
}

fn steps(p: &Term, cx: &mut Unfold) -> Result<Vec<Step>> {
    Ok(match p {
        Term::Nil => vec![],
        Term::Var(x) => return Err(Error::OpenTerm(x.to_string())),
        Term::Prefix(a, e) => vec![(a.clone(), (**e).clone())],
        Term::Choice(l, r) => {
            let mut v = steps(l, cx)?;
            v.extend(steps(r, cx)?);
            v
        }
        Term::Par(s, l, r) => {
            let sl = steps(l, cx)?;
            let sr = steps(r, cx)?;
            let mut v = Vec::new();
            let synced = |a: &ActionLabel| a.name().is_some_and(|n| s.contains(n));
            for (a, l2) in &sl {
                if !synced(a) {
                    v.push((a.clone(), Term::Par(s.clone(), Arc::new(l2.clone()), r.clone())));
                }
            }
            for (a, r2) in &sr {
                if !synced(a) {
                    v.push((a.clone(), Term::Par(s.clone(), l.clone(), Arc::new(r2.clone()))));
                }
            }
            for (a, l2) in sl.iter().filter(|(a, _)| synced(a)) {
                for (_, r2) in sr.iter().filter(|(b, _)| b == a) {
                    v.push((
                        a.clone(),
                        Term::Par(s.clone(), Arc::new(l2.clone()), Arc::new(r2.clone())),
                    ));
                }
            }
            v
        }
        Term::Hide(i, e) => steps(e, cx)?
            .into_iter()
            .map(|(a, e2)| {
                let a = match &a {
                    ActionLabel::Visible(n) if i.contains(n) => ActionLabel::Tau,
                    _ => a,
                };
                (a, Term::Hide(i.clone(), Arc::new(e2)))
            })
            .collect(),
        Term::Rename(r, e) => {
            let mut v = Vec::new();
            for (a, e2) in steps(e, cx)? {
                let tgt = Arc::new(e2);
                match &a {
                    ActionLabel::Visible(n) => {
                        for b in r.image(n) {
                            v.push((ActionLabel::Visible(b.clone()), Term::Rename(r.clone(), tgt.clone())));
                        }
                    }
                    _ => v.push((a, Term::Rename(r.clone(), tgt))),
                }
            }
            v
        }
        Term::Theta(l, u, e) => {
            let inner = steps(e, cx)?;
            let all_exit = idle(&inner, l);
            let mut v = Vec::new();
            for (a, e2) in inner {
                match &a {
                    ActionLabel::Tau => {
                        v.push((a.clone(), Term::Theta(l.clone(), u.clone(), Arc::new(e2.clone()))))
                    }
                    ActionLabel::Visible(n) if u.contains(n) => v.push((a.clone(), e2.clone())),
                    _ => {}
                }
                if all_exit {
                    v.push((a, e2));
                }
            }
            v
        }
        Term::Psi(x, e) => {
            let inner = steps(e, cx)?;
            let can_wait = idle(&inner, x);
            let mut v = Vec::new();
            for (a, e2) in inner {
                if a == ActionLabel::Timeout {
                    if can_wait {
                        v.push((a, Term::theta_x(x.clone(), e2)));
                    }
                } else {
                    v.push((a, e2));
                }
            }
            v
        }
        Term::Rec(y, spec) => {
            // Re-entering the same call within one evaluation can never
            // produce a guard.
            let key = (Arc::as_ptr(spec) as usize, y.clone());
            if cx.fuel == 0 || cx.active.contains(&key) {
                return Err(Error::UnfoldingDiverged(format!("<{y}|{}>", spec.name())));
            }
            cx.fuel -= 1;
            cx.active.push(key);
            let body = spec.body(y).expect("recursion call to a bound variable");
            let unfolded = body.close_with(spec);
            let out = steps(&unfolded, cx);
            cx.active.pop();
            cx.fuel += 1;
            out?
        }
    })
}

/// Breadth-first closure of `step` from `p` over the term's own alphabet.
pub fn build_lts(p: &Term, lim: ExplorationLimits) -> Result<Lts> {
    build_lts_over(p, &Alphabet::new(&p.alphabet())?, lim)
}

/// As [`build_lts`] with an explicit label universe (must cover the term).
pub fn build_lts_over(p: &Term, sigma: &Alphabet, lim: ExplorationLimits) -> Result<Lts> {
    if let Some(x) = p.free_vars().into_iter().next() {
        return Err(Error::OpenTerm(x.to_string()));
    }
    if !p.is_valid() {
        return Err(Error::Validity(format!("{p}")));
    }
    let mut b = LtsBuilder::new(sigma.clone());
    let mut index: HashMap<Term, usize> = HashMap::new();
    let root = b.add_state(StateTag::Term(p.clone()));
    index.insert(p.clone(), root);
    let mut queue = vec![p.clone()];
    let mut head = 0;
    while head < queue.len() {
        let src = index[&queue[head]];
        let out = step_with(&queue[head], lim.max_depth)?;
        head += 1;
        for (a, q) in out {
            let dst = match index.get(&q) {
                Some(&d) => d,
                None => {
                    if b.num_states() >= lim.max_states {
                        return Err(Error::StateBudgetExceeded(b.num_states() + 1));
                    }
                    let d = b.add_state(StateTag::Term(q.clone()));
                    index.insert(q.clone(), d);
                    queue.push(q);
                    d
                }
            };
            b.add_action(src, &a, dst)?;
        }
    }
    Ok(b.finish(root))
}

/// Reflexive-transitive closure of τ, as sorted successor lists.
pub fn weak_reach(lts: &Lts) -> Vec<Vec<usize>> {
    let n = lts.num_states();
    let mut out = Vec::with_capacity(n);
    let mut mark = vec![usize::MAX; n];
    for s in 0..n {
        let mut seen = vec![s];
        mark[s] = s;
        let mut i = 0;
        while i < seen.len() {
            let u = seen[i];
            i += 1;
            for &(l, v) in lts.successors(u) {
                if l == ExtLabel::Tau && mark[v] != s {
                    mark[v] = s;
                    seen.push(v);
                }
            }
        }
        seen.sort_unstable();
        out.push(seen);
    }
    out
}

/// Some `s ⟹ s'` with `s' ↛τ`.
pub fn stable_reachable(lts: &Lts, s: usize) -> bool {
    let mut seen = HashSet::from([s]);
    let mut stack = vec![s];
    while let Some(u) = stack.pop() {
        if !lts.has_tau(u) {
            return true;
        }
        for &(l, v) in lts.successors(u) {
            if l == ExtLabel::Tau && seen.insert(v) {
                stack.push(v);
            }
        }
    }
    false
}

/// No cycle made of τ and t transitions.
pub fn is_strongly_guarded(lts: &Lts) -> bool {
    let n = lts.num_states();
    let mut indeg = vec![0usize; n];
    let edge = |l: ExtLabel| matches!(l, ExtLabel::Tau | ExtLabel::Timeout);
    for (_, l, d) in lts.transitions() {
        if edge(l) {
            indeg[d] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&s| indeg[s] == 0).collect();
    let mut removed = 0;
    while let Some(u) = stack.pop() {
        removed += 1;
        for &(l, v) in lts.successors(u) {
            if edge(l) {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
    }
    removed == n
}
