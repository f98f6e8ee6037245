//! Axiom schemas as data, head normal forms, and a randomized soundness
//! harness that instantiates each schema and runs the matching checker.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::action::{ActionLabel, ActionSet, Name, RenamingMap};
use crate::bisim::{brb_check, strong_bisim, tb_check};
use crate::encode::encode;
use crate::error::{Error, Result};
use crate::lts::Alphabet;
use crate::sampler::Sampler;
use crate::semantics::{build_lts_over, initials, step, ExplorationLimits};
use crate::term::{RecSpec, Term};

/// Which axiomatisation a schema belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sort {
    Ax,
    Axr,
    Both,
}

/// One of the two axiomatisations: `Ax` for rooted t-branching
/// bisimilarity, `Axr` for rooted branching reactive bisimilarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Which {
    Ax,
    Axr,
}

impl Which {
    pub fn from_id(s: &str) -> Option<Which> {
        match s.to_ascii_lowercase().as_str() {
            "ax" => Some(Which::Ax),
            "axr" => Some(Which::Axr),
            _ => None,
        }
    }
}

impl Sort {
    pub fn includes(self, w: Which) -> bool {
        matches!(
            (self, w),
            (Sort::Both, _) | (Sort::Ax, Which::Ax) | (Sort::Axr, Which::Axr)
        )
    }
}

/// An action position in a pattern. `Meta("a")` ranges over visible
/// actions only; any other meta name ranges over `A ∪ {τ, t}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Act {
    Tau,
    T,
    Meta(&'static str),
}

/// Terms over metavariables. Inside `Sum(i, ..)` every metavariable and
/// meta action is indexed by `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pat {
    Nil,
    Var(&'static str),
    Prefix(Act, Box<Pat>),
    Choice(Box<Pat>, Box<Pat>),
    Par(&'static str, Box<Pat>, Box<Pat>),
    Hide(&'static str, Box<Pat>),
    Rename(Box<Pat>),
    Theta(&'static str, &'static str, Box<Pat>),
    ThetaX(&'static str, Box<Pat>),
    Psi(&'static str, Box<Pat>),
    Sum(&'static str, Box<Pat>),
    /// `Σ_{b | R(a,b)} b.P`
    Image(&'static str, Box<Pat>),
    /// Right-hand side of the expansion theorem for
    /// `Σ_i α_i.x_i ‖_S Σ_j β_j.z_j`.
    Expansion(&'static str),
    /// `⟨x|S⟩`
    Rec,
    /// `⟨S_x|S⟩`
    Unfold,
}

/// `set ∪ {τ}? ∪ {t}?`
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Within {
    pub set: Option<&'static str>,
    pub tau: bool,
    pub t: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cond {
    In(&'static str, Within),
    NotIn(&'static str, Within),
    /// The condition for every index of a family.
    All(&'static str, Box<Cond>),
}

#[derive(Clone, Debug)]
pub struct AxiomSchema {
    pub name: &'static str,
    pub lhs: Pat,
    pub rhs: Pat,
    pub side: Vec<Cond>,
    pub sort: Sort,
    /// Checked against strong bisimilarity rather than the sort's relation.
    pub strong: bool,
    pub derived: bool,
}

/// Values for the metavariables of a schema. Family members are stored
/// under `name_k`.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    pub terms: BTreeMap<String, Term>,
    pub actions: BTreeMap<String, ActionLabel>,
    pub sets: BTreeMap<String, ActionSet>,
    pub sizes: BTreeMap<String, usize>,
    pub renaming: Option<RenamingMap>,
    pub spec: Option<(Arc<RecSpec>, Name)>,
}

fn b(p: Pat) -> Box<Pat> {
    Box::new(p)
}

fn var(x: &'static str) -> Pat {
    Pat::Var(x)
}

fn pre(a: Act, p: Pat) -> Pat {
    Pat::Prefix(a, b(p))
}

fn alt(l: Pat, r: Pat) -> Pat {
    Pat::Choice(b(l), b(r))
}

fn alpha() -> Act {
    Act::Meta("α")
}

fn beta() -> Act {
    Act::Meta("β")
}

fn within(set: Option<&'static str>, tau: bool, t: bool) -> Within {
    Within { set, tau, t }
}

fn schema(name: &'static str, sort: Sort, lhs: Pat, rhs: Pat, side: Vec<Cond>) -> AxiomSchema {
    AxiomSchema {
        name,
        lhs,
        rhs,
        side,
        sort,
        strong: false,
        derived: false,
    }
}

fn all_schemas() -> Vec<AxiomSchema> {
    use Sort::*;
    let theta = |p: Pat| Pat::Theta("L", "U", b(p));
    let psi = |p: Pat| Pat::Psi("X", b(p));
    let hide = |p: Pat| Pat::Hide("I", b(p));
    let ren = |p: Pat| Pat::Rename(b(p));
    let xy = || alt(var("x"), var("y"));
    let ty = || Pat::Sum("i", b(pre(Act::T, var("y"))));
    let mut v = vec![
        schema(
            "assoc",
            Both,
            alt(alt(var("x"), var("y")), var("z")),
            alt(var("x"), alt(var("y"), var("z"))),
            vec![],
        ),
        schema("comm", Both, xy(), alt(var("y"), var("x")), vec![]),
        schema("idem", Both, alt(var("x"), var("x")), var("x"), vec![]),
        schema("nil", Both, alt(var("x"), Pat::Nil), var("x"), vec![]),
        schema("hide-sum", Both, hide(xy()), alt(hide(var("x")), hide(var("y"))), vec![]),
        schema(
            "hide-keep",
            Both,
            hide(pre(alpha(), var("x"))),
            pre(alpha(), hide(var("x"))),
            vec![Cond::NotIn("α", within(Some("I"), false, false))],
        ),
        schema(
            "hide-tau",
            Both,
            hide(pre(alpha(), var("x"))),
            pre(Act::Tau, hide(var("x"))),
            vec![Cond::In("α", within(Some("I"), false, false))],
        ),
        schema("ren-sum", Both, ren(xy()), alt(ren(var("x")), ren(var("y"))), vec![]),
        schema("ren-tau", Both, ren(pre(Act::Tau, var("x"))), pre(Act::Tau, ren(var("x"))), vec![]),
        schema("ren-t", Both, ren(pre(Act::T, var("x"))), pre(Act::T, ren(var("x"))), vec![]),
        schema(
            "ren-act",
            Both,
            ren(pre(Act::Meta("a"), var("x"))),
            Pat::Image("a", b(ren(var("x")))),
            vec![],
        ),
        schema(
            "expansion",
            Both,
            Pat::Par(
                "S",
                b(Pat::Sum("i", b(pre(alpha(), var("x"))))),
                b(Pat::Sum("j", b(pre(beta(), var("z"))))),
            ),
            Pat::Expansion("S"),
            vec![],
        ),
        schema(
            "branching",
            Both,
            pre(alpha(), alt(pre(Act::Tau, xy()), var("x"))),
            pre(alpha(), xy()),
            vec![],
        ),
        schema(
            "t-branching",
            Both,
            pre(alpha(), alt(pre(Act::T, alt(var("x"), ty())), var("x"))),
            pre(alpha(), alt(var("x"), ty())),
            vec![],
        ),
        schema(
            "tau-t-branching",
            Ax,
            pre(
                alpha(),
                alt(alt(pre(Act::Tau, xy()), pre(Act::T, xy())), var("x")),
            ),
            pre(alpha(), xy()),
            vec![],
        ),
        AxiomSchema {
            strong: true,
            ..schema("rdp", Both, Pat::Rec, Pat::Unfold, vec![])
        },
        schema(
            "theta-idle",
            Both,
            theta(Pat::Sum("i", b(pre(alpha(), var("x"))))),
            Pat::Sum("i", b(pre(alpha(), var("x")))),
            vec![Cond::All(
                "i",
                Box::new(Cond::NotIn("α", within(Some("L"), true, false))),
            )],
        ),
        schema(
            "theta-drop",
            Both,
            theta(alt(alt(var("x"), pre(alpha(), var("y"))), pre(beta(), var("z")))),
            theta(alt(var("x"), pre(alpha(), var("y")))),
            vec![
                Cond::In("α", within(Some("L"), true, false)),
                Cond::NotIn("β", within(Some("U"), true, false)),
            ],
        ),
        schema(
            "theta-split",
            Both,
            theta(alt(alt(var("x"), pre(alpha(), var("y"))), pre(beta(), var("z")))),
            alt(
                theta(alt(var("x"), pre(alpha(), var("y")))),
                theta(pre(beta(), var("z"))),
            ),
            vec![
                Cond::In("α", within(Some("L"), true, false)),
                Cond::In("β", within(Some("U"), true, false)),
            ],
        ),
        schema(
            "theta-act",
            Both,
            theta(pre(alpha(), var("x"))),
            pre(alpha(), var("x")),
            vec![Cond::NotIn("α", within(None, true, false))],
        ),
        schema(
            "theta-tau",
            Both,
            theta(pre(Act::Tau, var("x"))),
            pre(Act::Tau, theta(var("x"))),
            vec![],
        ),
        schema(
            "psi-act",
            Both,
            psi(alt(var("x"), pre(alpha(), var("y")))),
            alt(psi(var("x")), pre(alpha(), var("y"))),
            vec![Cond::NotIn("α", within(Some("X"), true, true))],
        ),
        schema(
            "psi-drop",
            Both,
            psi(alt(alt(var("x"), pre(alpha(), var("y"))), pre(Act::T, var("z")))),
            psi(alt(var("x"), pre(alpha(), var("y")))),
            vec![Cond::In("α", within(Some("X"), true, false))],
        ),
        schema(
            "psi-split",
            Both,
            psi(alt(alt(var("x"), pre(alpha(), var("y"))), pre(beta(), var("z")))),
            alt(psi(alt(var("x"), pre(alpha(), var("y")))), pre(beta(), var("z"))),
            vec![
                Cond::In("α", within(Some("X"), true, false)),
                Cond::In("β", within(Some("X"), true, false)),
            ],
        ),
        schema(
            "psi-nt",
            Both,
            psi(pre(alpha(), var("x"))),
            pre(alpha(), var("x")),
            vec![Cond::NotIn("α", within(None, false, true))],
        ),
        schema(
            "psi-t",
            Both,
            psi(ty()),
            Pat::Sum("i", b(pre(Act::T, Pat::ThetaX("X", b(var("y")))))),
            vec![],
        ),
    ];
    v.push(AxiomSchema {
        derived: true,
        ..schema(
            "ltau",
            Axr,
            alt(pre(Act::Tau, var("x")), pre(Act::T, var("y"))),
            pre(Act::Tau, var("x")),
            vec![],
        )
    });
    v
}

/// The equations of one axiomatisation, RDP included, RSP and the
/// reactive approximation axiom excluded.
pub fn schema_set(which: Which) -> Vec<AxiomSchema> {
    all_schemas()
        .into_iter()
        .filter(|s| !s.derived && s.sort.includes(which))
        .collect()
}

/// Laws derivable from an axiomatisation.
pub fn derived_laws(which: Which) -> Vec<AxiomSchema> {
    all_schemas()
        .into_iter()
        .filter(|s| s.derived && s.sort.includes(which))
        .collect()
}

/// Looks a schema up by name, derived laws included.
pub fn lookup(name: &str) -> Option<AxiomSchema> {
    all_schemas().into_iter().find(|s| s.name == name)
}

fn key(name: &str, idx: Option<usize>) -> String {
    match idx {
        Some(k) => format!("{name}_{k}"),
        None => name.to_string(),
    }
}

fn missing(what: &str) -> Error {
    Error::UnboundReference(what.to_string())
}

impl Bindings {
    fn term(&self, x: &str, idx: Option<usize>) -> Result<Term> {
        self.terms
            .get(&key(x, idx))
            .or_else(|| self.terms.get(x))
            .cloned()
            .ok_or_else(|| missing(&key(x, idx)))
    }

    fn action(&self, a: &str, idx: Option<usize>) -> Result<ActionLabel> {
        self.actions
            .get(&key(a, idx))
            .or_else(|| self.actions.get(a))
            .cloned()
            .ok_or_else(|| missing(&key(a, idx)))
    }

    fn set(&self, s: &str) -> Result<ActionSet> {
        self.sets.get(s).cloned().ok_or_else(|| missing(s))
    }

    fn size(&self, fam: &str) -> usize {
        self.sizes.get(fam).copied().unwrap_or(0)
    }

    fn renaming(&self) -> Result<&RenamingMap> {
        self.renaming.as_ref().ok_or_else(|| missing("R"))
    }

    fn label(&self, a: &Act, idx: Option<usize>) -> Result<ActionLabel> {
        match a {
            Act::Tau => Ok(ActionLabel::Tau),
            Act::T => Ok(ActionLabel::Timeout),
            Act::Meta(m) => self.action(m, idx),
        }
    }

    /// Flat rendering, for reports.
    pub fn describe(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for (k, v) in &self.terms {
            out.insert(k.clone(), v.to_string());
        }
        for (k, v) in &self.actions {
            out.insert(k.clone(), v.to_string());
        }
        for (k, v) in &self.sets {
            out.insert(k.clone(), render_set(v));
        }
        for (k, v) in &self.sizes {
            out.insert(format!("|{k}|"), v.to_string());
        }
        if let Some(r) = &self.renaming {
            let pairs: Vec<String> = r.pairs().map(|(a, b)| format!("{a}->{b}")).collect();
            out.insert("R".into(), format!("{{{}}}", pairs.join(", ")));
        }
        if let Some((spec, x)) = &self.spec {
            out.insert("S".into(), format!("{}.{x}", spec.name()));
        }
        out
    }
}

fn render_set(s: &ActionSet) -> String {
    format!("{{{}}}", s.iter().collect::<Vec<_>>().join(", "))
}

impl Within {
    fn contains(&self, a: &ActionLabel, b: &Bindings) -> Result<bool> {
        Ok(match a {
            ActionLabel::Tau => self.tau,
            ActionLabel::Timeout => self.t,
            ActionLabel::Visible(n) => match self.set {
                Some(s) => b.set(s)?.contains(n),
                None => false,
            },
        })
    }
}

impl Cond {
    fn holds(&self, b: &Bindings, idx: Option<usize>) -> Result<bool> {
        match self {
            Cond::In(a, w) => w.contains(&b.action(a, idx)?, b),
            Cond::NotIn(a, w) => Ok(!w.contains(&b.action(a, idx)?, b)?),
            Cond::All(fam, c) => {
                for k in 0..b.size(fam) {
                    if !c.holds(b, Some(k))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

fn build(p: &Pat, b: &Bindings, idx: Option<usize>) -> Result<Term> {
    Ok(match p {
        Pat::Nil => Term::Nil,
        Pat::Var(x) => b.term(x, idx)?,
        Pat::Prefix(a, e) => Term::prefix(b.label(a, idx)?, build(e, b, idx)?),
        Pat::Choice(l, r) => Term::choice(build(l, b, idx)?, build(r, b, idx)?),
        Pat::Par(s, l, r) => Term::par(b.set(s)?, build(l, b, idx)?, build(r, b, idx)?),
        Pat::Hide(i, e) => Term::hide(b.set(i)?, build(e, b, idx)?),
        Pat::Rename(e) => Term::rename(b.renaming()?.clone(), build(e, b, idx)?),
        Pat::Theta(l, u, e) => Term::theta(b.set(l)?, b.set(u)?, build(e, b, idx)?)?,
        Pat::ThetaX(x, e) => Term::theta_x(b.set(x)?, build(e, b, idx)?),
        Pat::Psi(x, e) => Term::psi(b.set(x)?, build(e, b, idx)?),
        Pat::Sum(fam, e) => Term::sum(
            (0..b.size(fam))
                .map(|k| build(e, b, Some(k)))
                .collect::<Result<Vec<_>>>()?,
        ),
        Pat::Image(a, e) => {
            let name = match b.action(a, idx)? {
                ActionLabel::Visible(n) => n,
                other => {
                    return Err(Error::SideConditionViolated(format!(
                        "{a} must be visible, got {other}"
                    )))
                }
            };
            let body = build(e, b, idx)?;
            Term::sum(
                b.renaming()?
                    .image(&name)
                    .map(|n| Term::prefix(ActionLabel::Visible(n.clone()), body.clone())),
            )
        }
        Pat::Expansion(s) => expansion(b, &b.set(s)?)?,
        Pat::Rec => {
            let (spec, x) = b.spec.as_ref().ok_or_else(|| missing("S"))?;
            Term::rec(x, spec.clone())?
        }
        Pat::Unfold => {
            let (spec, x) = b.spec.as_ref().ok_or_else(|| missing("S"))?;
            spec.body(x).ok_or_else(|| missing(x))?.close_with(spec)
        }
    })
}

fn expansion(b: &Bindings, s: &ActionSet) -> Result<Term> {
    let left: Vec<(ActionLabel, Term)> = (0..b.size("i"))
        .map(|k| Ok((b.action("α", Some(k))?, b.term("x", Some(k))?)))
        .collect::<Result<_>>()?;
    let right: Vec<(ActionLabel, Term)> = (0..b.size("j"))
        .map(|k| Ok((b.action("β", Some(k))?, b.term("z", Some(k))?)))
        .collect::<Result<_>>()?;
    let p = Term::sum(left.iter().map(|(a, x)| Term::prefix(a.clone(), x.clone())));
    let q = Term::sum(right.iter().map(|(a, z)| Term::prefix(a.clone(), z.clone())));
    let synced = |a: &ActionLabel| matches!(a, ActionLabel::Visible(n) if s.contains(n));
    let mut terms = Vec::new();
    for (a, x) in &left {
        if !synced(a) {
            terms.push(Term::prefix(a.clone(), Term::par(s.clone(), x.clone(), q.clone())));
        }
    }
    for (a, z) in &right {
        if !synced(a) {
            terms.push(Term::prefix(a.clone(), Term::par(s.clone(), p.clone(), z.clone())));
        }
    }
    for (a, x) in &left {
        for (c, z) in &right {
            if synced(a) && a == c {
                terms.push(Term::prefix(a.clone(), Term::par(s.clone(), x.clone(), z.clone())));
            }
        }
    }
    Ok(Term::sum(terms))
}

/// The ground equation for `bindings`.
pub fn instantiate(schema: &AxiomSchema, bindings: &Bindings) -> Result<(Term, Term)> {
    for c in &schema.side {
        if !c.holds(bindings, None)? {
            return Err(Error::SideConditionViolated(format!("{}: {c}", schema.name)));
        }
    }
    Ok((build(&schema.lhs, bindings, None)?, build(&schema.rhs, bindings, None)?))
}

/// `Σ {α.Q | P --α--> Q}`.
pub fn head_normal_form(p: &Term) -> Result<Term> {
    Ok(Term::sum(step(p)?.into_iter().map(|(a, q)| Term::prefix(a, q))))
}

#[derive(Default)]
struct Metas {
    terms: BTreeMap<&'static str, Option<&'static str>>,
    actions: BTreeMap<&'static str, Option<&'static str>>,
    sets: BTreeSet<&'static str>,
    families: BTreeSet<&'static str>,
    renaming: bool,
    spec: bool,
}

impl Metas {
    fn of(s: &AxiomSchema) -> Metas {
        let mut m = Metas::default();
        m.pat(&s.lhs, None);
        m.pat(&s.rhs, None);
        for c in &s.side {
            m.cond(c, None);
        }
        m
    }

    fn act(&mut self, a: &Act, fam: Option<&'static str>) {
        if let Act::Meta(n) = a {
            self.actions.insert(n, fam);
        }
    }

    fn pat(&mut self, p: &Pat, fam: Option<&'static str>) {
        match p {
            Pat::Nil => {}
            Pat::Var(x) => {
                self.terms.insert(x, fam);
            }
            Pat::Prefix(a, e) => {
                self.act(a, fam);
                self.pat(e, fam);
            }
            Pat::Choice(l, r) => {
                self.pat(l, fam);
                self.pat(r, fam);
            }
            Pat::Par(s, l, r) => {
                self.sets.insert(s);
                self.pat(l, fam);
                self.pat(r, fam);
            }
            Pat::Hide(s, e) | Pat::ThetaX(s, e) | Pat::Psi(s, e) => {
                self.sets.insert(s);
                self.pat(e, fam);
            }
            Pat::Theta(l, u, e) => {
                self.sets.insert(l);
                self.sets.insert(u);
                self.pat(e, fam);
            }
            Pat::Rename(e) => {
                self.renaming = true;
                self.pat(e, fam);
            }
            Pat::Sum(f, e) => {
                self.families.insert(f);
                self.pat(e, Some(f));
            }
            Pat::Image(a, e) => {
                self.renaming = true;
                self.actions.insert(a, fam);
                self.pat(e, fam);
            }
            Pat::Expansion(s) => {
                self.sets.insert(s);
            }
            Pat::Rec | Pat::Unfold => self.spec = true,
        }
    }

    fn cond(&mut self, c: &Cond, fam: Option<&'static str>) {
        match c {
            Cond::In(a, w) | Cond::NotIn(a, w) => {
                self.actions.insert(a, fam);
                if let Some(s) = w.set {
                    self.sets.insert(s);
                }
            }
            Cond::All(f, c) => {
                self.families.insert(f);
                self.cond(c, Some(f));
            }
        }
    }
}

/// Knobs for random instantiation.
#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    /// Depth of terms bound to metavariables.
    pub depth: usize,
    /// Largest family size.
    pub max_family: usize,
    /// Attempts at satisfying a side condition before giving up.
    pub tries: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            depth: 2,
            max_family: 2,
            tries: 2000,
        }
    }
}

/// Random bindings satisfying the side condition, or `None` when
/// `cfg.tries` attempts all failed.
pub fn sample_bindings(
    schema: &AxiomSchema,
    sampler: &mut Sampler,
    cfg: &SampleConfig,
) -> Option<Bindings> {
    let m = Metas::of(schema);
    for _ in 0..cfg.tries {
        let mut b = Bindings::default();
        for f in &m.families {
            b.sizes.insert(f.to_string(), sampler.rng().gen_range(0..=cfg.max_family));
        }
        for (x, fam) in &m.terms {
            for k in indices(&b, *fam) {
                b.terms.insert(key(x, k), sampler.term_of_depth(cfg.depth));
            }
        }
        for (a, fam) in &m.actions {
            for k in indices(&b, *fam) {
                let l = if *a == "a" { sampler.visible() } else { sampler.action() };
                b.actions.insert(key(a, k), l);
            }
        }
        for s in &m.sets {
            b.sets.insert(s.to_string(), sampler.action_set());
        }
        if m.sets.contains("L") && m.sets.contains("U") {
            let u = b.sets["U"].clone();
            let l: ActionSet = u.iter().filter(|_| sampler.rng().gen_bool(0.5)).collect();
            b.sets.insert("L".into(), l);
        }
        if m.renaming {
            b.renaming = Some(sampler.renaming());
        }
        if m.spec {
            let n = sampler.pool().len();
            let k = sampler.rng().gen_range(0..n);
            let spec = sampler.pool()[k].clone();
            let vars: Vec<Name> = spec.vars().map(Name::from).collect();
            let x = vars[sampler.rng().gen_range(0..vars.len())].clone();
            b.spec = Some((spec, x));
        }
        if schema.side.iter().all(|c| c.holds(&b, None).unwrap_or(false)) {
            return Some(b);
        }
    }
    None
}

fn indices(b: &Bindings, fam: Option<&str>) -> Vec<Option<usize>> {
    match fam {
        Some(f) => (0..b.size(f)).map(Some).collect(),
        None => vec![None],
    }
}

fn sub(name: &str, fam: Option<&str>) -> String {
    match fam {
        Some(f) => format!("{name}_{f}"),
        None => name.to_string(),
    }
}

fn render_act(a: &Act, fam: Option<&str>) -> String {
    match a {
        Act::Tau => "τ".into(),
        Act::T => "t".into(),
        Act::Meta(m) => sub(m, fam),
    }
}

fn render_pat(p: &Pat, fam: Option<&str>) -> String {
    match p {
        Pat::Nil => "0".into(),
        Pat::Var(x) => sub(x, fam),
        Pat::Prefix(a, e) => {
            let body = render_pat(e, fam);
            if matches!(**e, Pat::Choice(..) | Pat::Par(..) | Pat::Sum(..)) {
                format!("{}.({body})", render_act(a, fam))
            } else {
                format!("{}.{body}", render_act(a, fam))
            }
        }
        Pat::Choice(l, r) => match **r {
            Pat::Choice(..) => format!("{} + ({})", render_pat(l, fam), render_pat(r, fam)),
            _ => format!("{} + {}", render_pat(l, fam), render_pat(r, fam)),
        },
        Pat::Par(s, l, r) => format!("({}) ‖_{s} ({})", render_pat(l, fam), render_pat(r, fam)),
        Pat::Hide(i, e) => format!("τ_{i}({})", render_pat(e, fam)),
        Pat::Rename(e) => format!("R({})", render_pat(e, fam)),
        Pat::Theta(l, u, e) => format!("θ_{l}^{u}({})", render_pat(e, fam)),
        Pat::ThetaX(x, e) => format!("θ_{x}({})", render_pat(e, fam)),
        Pat::Psi(x, e) => format!("ψ_{x}({})", render_pat(e, fam)),
        Pat::Sum(f, e) => format!("Σ_{f} {}", render_pat(e, Some(f))),
        Pat::Image(a, e) => format!("Σ_{{b | R({a},b)}} b.{}", render_pat(e, fam)),
        Pat::Expansion(s) => format!(
            "Σ_{{α_i ∉ {s}}} α_i.(x_i ‖_{s} Q) + Σ_{{β_j ∉ {s}}} β_j.(P ‖_{s} z_j) \
             + Σ_{{α_i = β_j ∈ {s}}} α_i.(x_i ‖_{s} z_j)"
        ),
        Pat::Rec => "⟨x|S⟩".into(),
        Pat::Unfold => "⟨S_x|S⟩".into(),
    }
}

impl fmt::Display for Pat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_pat(self, None))
    }
}

impl fmt::Display for Within {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.set.iter().map(|s| s.to_string()).collect();
        let mut extra = Vec::new();
        if self.tau {
            extra.push("τ");
        }
        if self.t {
            extra.push("t");
        }
        if !extra.is_empty() {
            parts.push(format!("{{{}}}", extra.join(", ")));
        }
        f.write_str(&parts.join(" ∪ "))
    }
}

fn render_cond(c: &Cond, fam: Option<&str>) -> String {
    match c {
        Cond::In(a, w) => format!("{} ∈ {w}", sub(a, fam)),
        Cond::NotIn(a, w) => format!("{} ∉ {w}", sub(a, fam)),
        Cond::All(i, c) => format!("∀{i}: {}", render_cond(c, Some(i))),
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_cond(self, None))
    }
}

impl fmt::Display for AxiomSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)?;
        if !self.side.is_empty() {
            let side: Vec<String> = self.side.iter().map(|c| c.to_string()).collect();
            write!(f, "  if {}", side.join(" and "))?;
        }
        Ok(())
    }
}

/// The relation an equation is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Designated {
    Strong,
    /// Rooted t-branching bisimilarity on the encoded systems.
    RootedTb,
    /// Rooted branching reactive bisimilarity.
    RootedBrb,
}

impl Designated {
    pub fn id(self) -> &'static str {
        match self {
            Designated::Strong => "strong",
            Designated::RootedTb => "tb-rooted",
            Designated::RootedBrb => "brb-rooted",
        }
    }

    pub fn of(schema: &AxiomSchema, which: Which) -> Designated {
        match (schema.strong, which) {
            (true, _) => Designated::Strong,
            (false, Which::Ax) => Designated::RootedTb,
            (false, Which::Axr) => Designated::RootedBrb,
        }
    }
}

/// State budget for one side of a sampled equation.
pub const SAMPLE_MAX_STATES: usize = 4000;

/// Whether `p` and `q` are related by `rel`, both explored over `sigma`.
pub fn equivalent(rel: Designated, p: &Term, q: &Term, sigma: &ActionSet) -> Result<bool> {
    let alpha = Alphabet::new(&sigma.union(&p.alphabet()).union(&q.alphabet()))?;
    let lim = ExplorationLimits {
        max_states: SAMPLE_MAX_STATES,
        ..ExplorationLimits::default()
    };
    let l1 = build_lts_over(p, &alpha, lim)?;
    let l2 = build_lts_over(q, &alpha, lim)?;
    let v = match rel {
        Designated::Strong => strong_bisim(&l1, l1.initial(), &l2, l2.initial())?,
        Designated::RootedBrb => brb_check(&l1, l1.initial(), &l2, l2.initial(), true)?,
        Designated::RootedTb => {
            let (e1, e2) = (encode(&l1, true)?, encode(&l2, true)?);
            tb_check(&e1, e1.initial(), &e2, e2.initial(), true)?
        }
    };
    Ok(v.equivalent)
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub bindings: BTreeMap<String, String>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub equation: String,
    pub relation: &'static str,
    pub passes: usize,
    pub failures: Vec<Failure>,
    /// Samples dropped for exceeding the exploration budget or for an
    /// unsatisfiable side condition.
    pub skipped: usize,
}

impl AxiomReport {
    pub fn sound(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Per-item seed derived from a run seed and a name.
pub fn split_seed(seed: u64, name: &str) -> u64 {
    name.bytes().fold(seed ^ 0xcbf2_9ce4_8422_2325, |h, c| {
        (h ^ c as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Instantiates `schema` `samples` times and checks each instance.
pub fn soundcheck(
    schema: &AxiomSchema,
    which: Which,
    samples: usize,
    seed: u64,
    cfg: &SampleConfig,
) -> AxiomReport {
    let rel = Designated::of(schema, which);
    let mut sampler = Sampler::new(split_seed(seed, schema.name), &Sampler::alphabet(3));
    let sigma = sampler.sigma();
    let mut report = AxiomReport {
        axiom: schema.name.to_string(),
        equation: schema.to_string(),
        relation: rel.id(),
        passes: 0,
        failures: Vec::new(),
        skipped: 0,
    };
    let max_skips = samples.max(10) * 4;
    while report.passes + report.failures.len() < samples && report.skipped < max_skips {
        let Some(b) = sample_bindings(schema, &mut sampler, cfg) else {
            report.skipped += 1;
            continue;
        };
        let outcome = instantiate(schema, &b)
            .and_then(|(l, r)| Ok((equivalent(rel, &l, &r, &sigma)?, l, r)));
        match outcome {
            Ok((true, _, _)) => report.passes += 1,
            Ok((false, l, r)) => report.failures.push(Failure {
                bindings: b.describe(),
                lhs: l.to_string(),
                rhs: r.to_string(),
            }),
            Err(_) => report.skipped += 1,
        }
    }
    report
}

/// Every schema and derived law of `which`.
pub fn soundness_suite(which: Which, samples: usize, seed: u64) -> Vec<AxiomReport> {
    let cfg = SampleConfig::default();
    schema_set(which)
        .into_iter()
        .chain(derived_laws(which))
        .map(|s| soundcheck(&s, which, samples, seed, &cfg))
        .collect()
}

/// One instance of the reactive approximation axiom: `false` only when
/// `ψ_X(p)` and `ψ_X(q)` are rooted branching reactive bisimilar for
/// every `X ⊆ sigma` while `p` and `q` are not.
pub fn soundness_raa(p: &Term, q: &Term, sigma: &ActionSet) -> Result<bool> {
    let names: Vec<&str> = sigma.iter().collect();
    if names.len() > 16 {
        return Err(Error::StateBudgetExceeded(1 << names.len()));
    }
    for mask in 0u32..(1 << names.len()) {
        let x: ActionSet = names
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, n)| *n)
            .collect();
        let (px, qx) = (Term::psi(x.clone(), p.clone()), Term::psi(x, q.clone()));
        if !equivalent(Designated::RootedBrb, &px, &qx, sigma)? {
            return Ok(true);
        }
    }
    equivalent(Designated::RootedBrb, p, q, sigma)
}

/// A law about the environment operators, checked up to strong
/// bisimilarity.
#[derive(Clone, Copy, Debug)]
pub struct Law {
    pub name: &'static str,
    pub statement: &'static str,
    sample: fn(&mut Sampler, &SampleConfig) -> Result<Option<(Term, Term)>>,
}

impl Law {
    /// A random instance, or `None` if the premise was not met.
    pub fn sample(&self, s: &mut Sampler, cfg: &SampleConfig) -> Result<Option<(Term, Term)>> {
        (self.sample)(s, cfg)
    }
}

fn law_idempotent(s: &mut Sampler, cfg: &SampleConfig) -> Result<Option<(Term, Term)>> {
    let (x, p) = (s.action_set(), s.term_of_depth(cfg.depth + 1));
    let inner = Term::theta_x(x.clone(), p.clone());
    Ok(Some((
        Term::theta_x(x.clone(), p),
        Term::theta_x(x, inner),
    )))
}

fn law_par(s: &mut Sampler, cfg: &SampleConfig) -> Result<Option<(Term, Term)>> {
    let (p, q) = (s.term_of_depth(cfg.depth), s.term_of_depth(cfg.depth));
    let (x, sync) = (s.action_set(), s.action_set());
    let (ip, tau) = initials(&p)?;
    if tau || !ip.intersection(&x).is_subset(&sync) {
        return Ok(None);
    }
    let inner = x.difference(&sync.difference(&ip));
    Ok(Some((
        Term::theta_x(x.clone(), Term::par(sync.clone(), p.clone(), q.clone())),
        Term::theta_x(x, Term::par(sync, p, Term::theta_x(inner, q))),
    )))
}

fn law_hide(s: &mut Sampler, cfg: &SampleConfig) -> Result<Option<(Term, Term)>> {
    let (p, x, i) = (s.term_of_depth(cfg.depth + 1), s.action_set(), s.action_set());
    let inner = Term::theta_x(x.union(&i), p.clone());
    Ok(Some((
        Term::theta_x(x.clone(), Term::hide(i.clone(), p)),
        Term::theta_x(x, Term::hide(i, inner)),
    )))
}

fn law_rename(s: &mut Sampler, cfg: &SampleConfig) -> Result<Option<(Term, Term)>> {
    let (p, x, r) = (s.term_of_depth(cfg.depth + 1), s.action_set(), s.renaming());
    let inner = Term::theta_x(r.preimage(&x), p.clone());
    Ok(Some((
        Term::theta_x(x.clone(), Term::rename(r.clone(), p)),
        Term::theta_x(x, Term::rename(r, inner)),
    )))
}

fn law_hnf(s: &mut Sampler, cfg: &SampleConfig) -> Result<Option<(Term, Term)>> {
    let p = s.term_of_depth(cfg.depth + 1);
    let h = head_normal_form(&p)?;
    Ok(Some((p, h)))
}

/// The θ laws used by the congruence proof, and the head normal form law.
pub fn strong_laws() -> Vec<Law> {
    vec![
        Law {
            name: "theta-theta",
            statement: "θ_X(P) = θ_X(θ_X(P))",
            sample: law_idempotent,
        },
        Law {
            name: "theta-par",
            statement: "θ_X(P ‖_S Q) = θ_X(P ‖_S θ_{X∖(S∖I(P))}(Q))  if P has no τ and I(P) ∩ X ⊆ S",
            sample: law_par,
        },
        Law {
            name: "theta-hide",
            statement: "θ_X(τ_I(P)) = θ_X(τ_I(θ_{X∪I}(P)))",
            sample: law_hide,
        },
        Law {
            name: "theta-rename",
            statement: "θ_X(R(P)) = θ_X(R(θ_{R⁻¹(X)}(P)))",
            sample: law_rename,
        },
        Law {
            name: "hnf",
            statement: "P = Σ {α.Q | P --α--> Q}",
            sample: law_hnf,
        },
    ]
}

/// Checks `law` on `samples` instances whose premise holds.
pub fn check_law(law: &Law, samples: usize, seed: u64, cfg: &SampleConfig) -> AxiomReport {
    let mut sampler = Sampler::new(split_seed(seed, law.name), &Sampler::alphabet(3));
    let sigma = sampler.sigma();
    let mut report = AxiomReport {
        axiom: law.name.to_string(),
        equation: law.statement.to_string(),
        relation: Designated::Strong.id(),
        passes: 0,
        failures: Vec::new(),
        skipped: 0,
    };
    let max_skips = samples.max(10) * 20;
    while report.passes + report.failures.len() < samples && report.skipped < max_skips {
        match law
            .sample(&mut sampler, cfg)
            .and_then(|o| o.map(|(l, r)| Ok((equivalent(Designated::Strong, &l, &r, &sigma)?, l, r))).transpose())
        {
            Ok(Some((true, _, _))) => report.passes += 1,
            Ok(Some((false, l, r))) => report.failures.push(Failure {
                bindings: BTreeMap::new(),
                lhs: l.to_string(),
                rhs: r.to_string(),
            }),
            Ok(None) | Err(_) => report.skipped += 1,
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn branching_instance() {
        let s = lookup("branching").unwrap();
        let mut b = Bindings::default();
        b.actions.insert("α".into(), ActionLabel::visible("a"));
        b.terms.insert("x".into(), t("b.0"));
        b.terms.insert("y".into(), t("c.0"));
        let (l, r) = instantiate(&s, &b).unwrap();
        assert_eq!(l, t("a.(tau.(b.0 + c.0) + b.0)"));
        assert_eq!(r, t("a.(b.0 + c.0)"));
    }

    #[test]
    fn side_condition_rejected() {
        let s = lookup("hide-keep").unwrap();
        let mut b = Bindings::default();
        b.actions.insert("α".into(), ActionLabel::visible("a"));
        b.sets.insert("I".into(), ["a"].into_iter().collect());
        b.terms.insert("x".into(), Term::Nil);
        assert!(matches!(instantiate(&s, &b), Err(Error::SideConditionViolated(_))));
    }

    #[test]
    fn sets_differ() {
        let ax: Vec<_> = schema_set(Which::Ax).iter().map(|s| s.name).collect();
        let axr: Vec<_> = schema_set(Which::Axr).iter().map(|s| s.name).collect();
        assert!(ax.contains(&"tau-t-branching") && !axr.contains(&"tau-t-branching"));
        assert!(ax.contains(&"rdp") && axr.contains(&"idem"));
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(head_normal_form(&Term::Nil).unwrap(), Term::Nil);
        let spec = Arc::new(crate::parser::parse_spec("x = a.x").unwrap());
        let p = Term::rec("x", spec).unwrap();
        assert_eq!(head_normal_form(&p).unwrap(), Term::prefix(ActionLabel::visible("a"), p));
    }

    #[test]
    fn harness_refutes_unsound_variants() {
        let cfg = SampleConfig::default();
        let mut s = lookup("idem").unwrap();
        s.rhs = Pat::Nil;
        assert!(!soundcheck(&s, Which::Axr, 20, 3, &cfg).sound());
        let mut s = lookup("psi-t").unwrap();
        s.rhs = Pat::Sum("i", b(pre(Act::T, Pat::Psi("X", b(var("y"))))));
        assert!(!soundcheck(&s, Which::Axr, 100, 3, &cfg).sound());
    }
}
