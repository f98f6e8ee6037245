//! Greatest-fixpoint checkers for strong, branching reactive, generalised,
//! time-out and t-branching bisimilarity.

mod brb;
pub(crate) mod engine;
mod gbrb;
mod store;
mod strong;
mod tb;
mod tob;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::action::ActionSet;
use crate::error::{Error, Result};
use crate::lts::{EnvSet, Lts};

use engine::{first_violation, greatest_fixpoint, Graph, Rules, Run, Violation};

pub use store::{Entry, RelationStore};
pub use strong::partition;
pub use tob::ThetaSpace;

/// Largest relation table a check may allocate.
pub const MAX_TABLE: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    Strong,
    Brb,
    BrbRooted,
    Cbrb,
    CbrbRooted,
    Gbrb,
    GbrbRooted,
    Tob,
    TobRooted,
    Tb,
    TbRooted,
}

impl Relation {
    pub const ALL: [Relation; 11] = [
        Relation::Strong,
        Relation::Brb,
        Relation::BrbRooted,
        Relation::Cbrb,
        Relation::CbrbRooted,
        Relation::Gbrb,
        Relation::GbrbRooted,
        Relation::Tob,
        Relation::TobRooted,
        Relation::Tb,
        Relation::TbRooted,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Relation::Strong => "strong",
            Relation::Brb => "brb",
            Relation::BrbRooted => "brb-rooted",
            Relation::Cbrb => "cbrb",
            Relation::CbrbRooted => "cbrb-rooted",
            Relation::Gbrb => "gbrb",
            Relation::GbrbRooted => "gbrb-rooted",
            Relation::Tob => "tob",
            Relation::TobRooted => "tob-rooted",
            Relation::Tb => "tb",
            Relation::TbRooted => "tb-rooted",
        }
    }

    pub fn from_id(id: &str) -> Option<Relation> {
        Relation::ALL.into_iter().find(|r| r.id() == id)
    }

    pub fn is_rooted(self) -> bool {
        matches!(
            self,
            Relation::BrbRooted
                | Relation::CbrbRooted
                | Relation::GbrbRooted
                | Relation::TobRooted
                | Relation::TbRooted
        )
    }

    /// The relation a rooted one is layered on; plain relations map to themselves.
    pub fn plain(self) -> Relation {
        match self {
            Relation::BrbRooted => Relation::Brb,
            Relation::CbrbRooted => Relation::Cbrb,
            Relation::GbrbRooted => Relation::Gbrb,
            Relation::TobRooted => Relation::Tob,
            Relation::TbRooted => Relation::Tb,
            r => r,
        }
    }

    pub fn rooted(self) -> Relation {
        match self {
            Relation::Brb => Relation::BrbRooted,
            Relation::Cbrb => Relation::CbrbRooted,
            Relation::Gbrb => Relation::GbrbRooted,
            Relation::Tob => Relation::TobRooted,
            Relation::Tb => Relation::TbRooted,
            r => r,
        }
    }

    /// Whether the relation stores triples `(p, X, q)`.
    pub fn has_triples(self) -> bool {
        matches!(self.plain(), Relation::Brb | Relation::Cbrb | Relation::Gbrb)
    }

    /// Whether `X`-variants can be queried.
    pub fn has_env(self) -> bool {
        self.has_triples() || self.plain() == Relation::Tob
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One step of an explanation why an entry is not in the relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub lhs: String,
    pub rhs: String,
    pub env: Option<String>,
    pub clause: String,
    pub detail: String,
}

/// The final relation of an equivalent check, together with the space it
/// ranges over.
#[derive(Clone, Debug)]
pub struct Witness {
    pub relation: Relation,
    pub lts: Lts,
    pub theta: Option<ThetaSpace>,
    pub store: RelationStore,
    /// The plain relation a rooted witness refers to.
    pub base: Option<RelationStore>,
}

impl Witness {
    /// A hand-made relation over `lts`, e.g. one printed in a proof. Rooted
    /// relations are checked against the computed plain bisimilarity.
    pub fn manual(relation: Relation, lts: &Lts, store: RelationStore) -> Result<Witness> {
        let theta = (relation.plain() == Relation::Tob).then(|| ThetaSpace::build(lts));
        let space = theta.as_ref().map_or(lts, |t| &t.lts).clone();
        let base = if relation.is_rooted() {
            let g = Graph::new(&space);
            Some(plain_fixpoint(relation.plain(), &g, theta.as_ref())?.0)
        } else {
            None
        };
        Ok(Witness {
            relation,
            lts: space,
            theta,
            store,
            base,
        })
    }

    pub fn size(&self) -> usize {
        self.store.len()
    }
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub relation: Relation,
    pub equivalent: bool,
    pub sigma: ActionSet,
    /// The queried environment, intersected with `sigma`.
    pub env: Option<ActionSet>,
    pub entries_checked: u64,
    pub iterations: usize,
    pub refutation: Vec<Refutation>,
    pub witness: Option<Witness>,
}

/// Serializable summary of a [`Verdict`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub relation: String,
    pub equivalent: bool,
    pub sigma: Vec<String>,
    pub entries_checked: u64,
    pub iterations: usize,
    pub refutation: Vec<Refutation>,
    pub witness_size: Option<usize>,
}

impl Verdict {
    pub fn report(&self) -> Report {
        Report {
            relation: self.relation.id().to_string(),
            equivalent: self.equivalent,
            sigma: self.sigma.iter().map(String::from).collect(),
            entries_checked: self.entries_checked,
            iterations: self.iterations,
            refutation: self.refutation.clone(),
            witness_size: self.witness.as_ref().map(Witness::size),
        }
    }
}

/// Puts both systems over their joint alphabet. Passing the same system
/// twice compares two of its states.
pub fn joint_space(l1: &Lts, l2: &Lts) -> Result<(Lts, usize)> {
    if std::ptr::eq(l1, l2) {
        return Ok((l1.clone(), 0));
    }
    if l1.alphabet() != l2.alphabet() && (l1.has_encoded_labels() || l2.has_encoded_labels()) {
        return Err(Error::LabelUniverseMismatch(
            "encoded systems must share one alphabet".into(),
        ));
    }
    let sigma = l1.alphabet().union(l2.alphabet())?;
    l1.remap(&sigma)?.disjoint_union(&l2.remap(&sigma)?)
}

fn check_budget(rel: Relation, n: usize, envs: usize) -> Result<()> {
    let cells = n.saturating_mul(n);
    let cells = if rel.has_triples() {
        cells.saturating_mul(envs.max(1))
    } else {
        cells
    };
    if cells > MAX_TABLE {
        return Err(Error::StateBudgetExceeded(n));
    }
    Ok(())
}

fn rules_for<'g, 'a>(
    rel: Relation,
    g: &'g Graph<'a>,
    theta: Option<&'g ThetaSpace>,
    base: Option<&'g RelationStore>,
) -> Box<dyn Rules + 'g> {
    let theta = || theta.expect("time-out bisimulation needs a θ space");
    let base = || base.expect("rooted relation needs its plain layer");
    match rel {
        Relation::Strong => Box::new(StrongRules { g }),
        Relation::Brb => Box::new(brb::Brb { g, concrete: false }),
        Relation::Cbrb => Box::new(brb::Brb { g, concrete: true }),
        Relation::BrbRooted | Relation::CbrbRooted => Box::new(brb::BrbRooted { g, base: base() }),
        Relation::Gbrb => Box::new(gbrb::Gbrb { g }),
        Relation::GbrbRooted => Box::new(gbrb::GbrbRooted { g, base: base() }),
        Relation::Tob => Box::new(tob::Tob { g, space: theta() }),
        Relation::TobRooted => Box::new(tob::TobRooted {
            g,
            space: theta(),
            base: base(),
        }),
        Relation::Tb => Box::new(tb::Tb { g }),
        Relation::TbRooted => Box::new(tb::TbRooted { g, base: base() }),
    }
}

impl<R: Rules + ?Sized> Rules for Box<R> {
    fn pair(&self, st: &RelationStore, p: usize, q: usize) -> Option<Violation> {
        (**self).pair(st, p, q)
    }

    fn triple(&self, st: &RelationStore, p: usize, x: EnvSet, q: usize) -> Option<Violation> {
        (**self).triple(st, p, x, q)
    }
}

struct StrongRules<'g, 'a> {
    g: &'g Graph<'a>,
}

impl Rules for StrongRules<'_, '_> {
    fn pair(&self, st: &RelationStore, p: usize, q: usize) -> Option<Violation> {
        let g = self.g;
        g.succ(p)
            .iter()
            .find(|&&(l, p1)| !g.targets(q, l).any(|q1| st.pair(p1, q1)))
            .map(|&(l, p1)| Violation::step("transfer", l, p1))
    }
}

fn plain_fixpoint(
    rel: Relation,
    g: &Graph<'_>,
    theta: Option<&ThetaSpace>,
) -> Result<(RelationStore, Run)> {
    let envs = if rel.has_triples() { g.envs } else { 0 };
    check_budget(rel, g.n, g.envs)?;
    if rel == Relation::Strong {
        let (block, rounds) = partition(g.lts);
        let mut st = RelationStore::empty(g.n, 0);
        for p in 0..g.n {
            for q in p..g.n {
                if block[p] == block[q] {
                    st.insert(Entry::Pair(p, q));
                }
            }
        }
        let run = Run {
            iterations: rounds,
            checked: g.n as u64 * rounds as u64,
            ..Run::default()
        };
        return Ok((st, run));
    }
    let mut st = RelationStore::full(g.n, envs);
    let rules = rules_for(rel, g, theta, None);
    let run = greatest_fixpoint(&rules, &mut st);
    Ok((st, run))
}

/// The greatest relation of kind `rel` on one system, with its plain layer
/// when `rel` is rooted.
pub(crate) fn solve(
    rel: Relation,
    lts: &Lts,
    theta: Option<&ThetaSpace>,
) -> Result<(RelationStore, Run, Option<RelationStore>, u64, usize)> {
    let g = Graph::new(lts);
    let (plain, run) = plain_fixpoint(rel.plain(), &g, theta)?;
    if !rel.is_rooted() {
        return Ok((plain, run, None, 0, 0));
    }
    let envs = if rel.has_triples() { g.envs } else { 0 };
    let mut st = RelationStore::full(g.n, envs);
    let rooted = {
        let rules = rules_for(rel, &g, theta, Some(&plain));
        greatest_fixpoint(&rules, &mut st)
    };
    let (c, i) = (run.checked, run.iterations);
    Ok((st, rooted, Some(plain), c, i))
}

/// Decides whether state `p` of `l1` and state `q` of `l2` are related by
/// `rel`. With `env = Some(X)` the `X`-variant is decided instead, reading
/// `X ∩ Σ`.
pub fn check(
    rel: Relation,
    l1: &Lts,
    p: usize,
    l2: &Lts,
    q: usize,
    env: Option<&ActionSet>,
) -> Result<Verdict> {
    if env.is_some() && !rel.has_env() {
        return Err(Error::Validity(format!("relation `{rel}` has no environment variant")));
    }
    if p >= l1.num_states() || q >= l2.num_states() {
        return Err(Error::Validity("state index out of range".into()));
    }
    let (joint, off) = joint_space(l1, l2)?;
    let q = q + off;
    let sigma = joint.alphabet().to_set();
    let mask = env.map(|x| joint.alphabet().mask(x));
    let theta = (rel.plain() == Relation::Tob).then(|| ThetaSpace::build(&joint));
    let space = theta.as_ref().map_or(&joint, |t| &t.lts);
    if theta.is_some() {
        check_budget(rel, space.num_states(), 0)?;
    }
    let (store, run, base, c0, i0) = solve(rel, space, theta.as_ref())?;
    let entry = match (mask, &theta) {
        (None, _) => Entry::Pair(p, q),
        (Some(x), Some(t)) => Entry::Pair(
            t.theta(x, p).expect("θ image of an original state"),
            t.theta(x, q).expect("θ image of an original state"),
        ),
        (Some(x), None) => Entry::Triple(p, x, q),
    };
    let equivalent = store.contains(entry);
    let refutation = if equivalent {
        Vec::new()
    } else {
        explain(space, &run, entry)
    };
    let witness = equivalent.then(|| Witness {
        relation: rel,
        lts: space.clone(),
        theta: theta.clone(),
        store,
        base,
    });
    Ok(Verdict {
        relation: rel,
        equivalent,
        sigma,
        env: mask.map(|x| joint.alphabet().set_of(x)),
        entries_checked: run.checked + c0,
        iterations: run.iterations + i0,
        refutation,
        witness,
    })
}

const MAX_EXPLANATION: usize = 16;

fn entry_text(l: &Lts, e: Entry) -> (String, String, Option<String>) {
    (
        l.state_text(e.lhs()),
        l.state_text(e.rhs()),
        e.env().map(|x| l.alphabet().render_set(x)),
    )
}

fn explain(l: &Lts, run: &Run, mut e: Entry) -> Vec<Refutation> {
    let mut out = Vec::new();
    if run.log.is_empty() {
        let (lhs, rhs, env) = entry_text(l, e);
        out.push(Refutation {
            lhs,
            rhs,
            env,
            clause: "transfer".into(),
            detail: "the states fall into different classes".into(),
        });
        return out;
    }
    let mut guard = 0;
    while let Some(&(_, v)) = run.log.get(&e) {
        guard += 1;
        if guard > 2 * MAX_EXPLANATION || out.len() >= MAX_EXPLANATION {
            break;
        }
        if v.clause == "sym" {
            e = v.cause.expect("mirrored entry");
            continue;
        }
        let (lhs, rhs, env) = entry_text(l, e);
        let quantified = v.env.map(|x| format!(" in environment {{{}}}", l.alphabet().render_set(x)));
        let detail = match (v.step, v.cause) {
            (Some((lab, d)), _) => format!(
                "{} --{}--> {} is not matched by {}{}",
                lhs,
                l.label_text(lab),
                l.state_text(d),
                rhs,
                quantified.unwrap_or_default()
            ),
            (None, Some(c)) => {
                let (a, b, x) = entry_text(l, c);
                match x {
                    Some(x) => format!("needs ({a}, {{{x}}}, {b})"),
                    None => format!("needs ({a}, {b})"),
                }
            }
            (None, None) => format!("{rhs} cannot reach a stable state"),
        };
        out.push(Refutation {
            lhs,
            rhs,
            env,
            clause: v.clause.to_string(),
            detail,
        });
        match v.cause {
            Some(c) if c != e => e = c,
            _ => break,
        }
    }
    out
}

/// Re-checks every clause on every entry of the witness once.
pub fn revalidate(w: &Witness) -> bool {
    violation(w).is_none()
}

/// The first entry of the witness that breaks a clause.
pub fn violation(w: &Witness) -> Option<(Entry, String)> {
    if !w.store.is_symmetric() {
        let e = w.store.entries().find(|e| !w.store.contains(e.flipped()))?;
        return Some((e, "symmetry".into()));
    }
    let g = Graph::new(&w.lts);
    if let Some(base) = &w.base {
        let plain = rules_for(w.relation.plain(), &g, w.theta.as_ref(), None);
        if let Some((e, v)) = first_violation(&plain, base) {
            return Some((e, v.clause.to_string()));
        }
    }
    let rules = rules_for(w.relation, &g, w.theta.as_ref(), w.base.as_ref());
    first_violation(&rules, &w.store).map(|(e, v)| (e, v.clause.to_string()))
}

pub fn strong_bisim(l1: &Lts, p: usize, l2: &Lts, q: usize) -> Result<Verdict> {
    check(Relation::Strong, l1, p, l2, q, None)
}

fn pick(rooted: bool, plain: Relation) -> Relation {
    if rooted {
        plain.rooted()
    } else {
        plain
    }
}

pub fn brb_check(l1: &Lts, p: usize, l2: &Lts, q: usize, rooted: bool) -> Result<Verdict> {
    check(pick(rooted, Relation::Brb), l1, p, l2, q, None)
}

pub fn brb_x_check(l1: &Lts, p: usize, l2: &Lts, q: usize, x: &ActionSet) -> Result<Verdict> {
    check(Relation::Brb, l1, p, l2, q, Some(x))
}

pub fn gbrb_check(l1: &Lts, p: usize, l2: &Lts, q: usize, rooted: bool) -> Result<Verdict> {
    check(pick(rooted, Relation::Gbrb), l1, p, l2, q, None)
}

pub fn tob_check(l1: &Lts, p: usize, l2: &Lts, q: usize, rooted: bool) -> Result<Verdict> {
    check(pick(rooted, Relation::Tob), l1, p, l2, q, None)
}

pub fn cbrb_check(l1: &Lts, p: usize, l2: &Lts, q: usize, rooted: bool) -> Result<Verdict> {
    check(pick(rooted, Relation::Cbrb), l1, p, l2, q, None)
}

pub fn tb_check(l1: &Lts, p: usize, l2: &Lts, q: usize, rooted: bool) -> Result<Verdict> {
    check(pick(rooted, Relation::Tb), l1, p, l2, q, None)
}
