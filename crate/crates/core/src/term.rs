//! Abstract syntax of process expressions and recursive specifications.

use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::action::{ActionLabel, ActionSet, Name, RenamingMap};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Nil,
    Var(Name),
    Prefix(ActionLabel, Arc<Term>),
    Choice(Arc<Term>, Arc<Term>),
    /// Parallel composition synchronising on the set.
    Par(ActionSet, Arc<Term>, Arc<Term>),
    /// Abstraction `τ_I`.
    Hide(ActionSet, Arc<Term>),
    Rename(RenamingMap, Arc<Term>),
    /// Environment operator `θ_L^U`, with `L ⊆ U`.
    Theta(ActionSet, ActionSet, Arc<Term>),
    Psi(ActionSet, Arc<Term>),
    /// `⟨x|S⟩`.
    Rec(Name, Arc<RecSpec>),
}

/// A recursive specification `{x = S_x | x ∈ V_S}`.
///
/// The name is a display handle only; equality and hashing look at the
/// equations.
#[derive(Clone, Debug)]
pub struct RecSpec {
    name: Name,
    equations: BTreeMap<Name, Term>,
    free: BTreeSet<Name>,
}

impl PartialEq for RecSpec {
    fn eq(&self, other: &Self) -> bool {
        self.equations == other.equations
    }
}

impl Eq for RecSpec {}

impl Hash for RecSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.equations.hash(state);
    }
}

impl RecSpec {
    pub fn new<I, S>(name: &str, equations: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Term)>,
        S: AsRef<str>,
    {
        let mut map = BTreeMap::new();
        for (x, body) in equations {
            let x = Name::from(x.as_ref());
            if map.insert(x.clone(), body).is_some() {
                return Err(Error::DuplicateEquation(x.to_string()));
            }
        }
        Ok(Self::from_map(Name::from(name), map))
    }

    fn from_map(name: Name, equations: BTreeMap<Name, Term>) -> Self {
        let mut free = BTreeSet::new();
        for body in equations.values() {
            body.collect_free(&mut free);
        }
        free.retain(|v| !equations.contains_key(v));
        RecSpec {
            name,
            equations,
            free,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(&self, name: &str) -> RecSpec {
        RecSpec {
            name: Name::from(name),
            ..self.clone()
        }
    }

    pub fn equations(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.equations.iter().map(|(x, b)| (&**x, b))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.equations.keys().map(|x| &**x)
    }

    pub fn binds(&self, x: &str) -> bool {
        self.equations.contains_key(x)
    }

    pub fn body(&self, x: &str) -> Option<&Term> {
        self.equations.get(x)
    }

    pub fn free_vars(&self) -> &BTreeSet<Name> {
        &self.free
    }

    /// Validity of the bodies with `V_S` bound.
    pub fn is_valid(&self) -> bool {
        let bound: BTreeSet<Name> = self.equations.keys().cloned().collect();
        self.equations.values().all(|b| b.valid_under(&bound))
    }

    /// True when the specification can be made manifestly well-guarded:
    /// no abstraction occurs and the graph of unguarded variable
    /// dependencies is acyclic.
    pub fn is_well_guarded(&self) -> bool {
        if self.equations.values().any(Term::contains_hide) {
            return false;
        }
        let vars: BTreeSet<Name> = self.equations.keys().cloned().collect();
        let mut edges: BTreeMap<Name, BTreeSet<Name>> = BTreeMap::new();
        for (x, body) in &self.equations {
            let mut out = BTreeSet::new();
            body.unguarded(&vars, false, &mut out);
            edges.insert(x.clone(), out);
        }
        // DFS cycle detection: 1 = on stack, 2 = done.
        let mut state: BTreeMap<&Name, u8> = BTreeMap::new();
        fn visit<'a>(
            x: &'a Name,
            edges: &'a BTreeMap<Name, BTreeSet<Name>>,
            state: &mut BTreeMap<&'a Name, u8>,
        ) -> bool {
            match state.get(x) {
                Some(1) => return false,
                Some(2) => return true,
                _ => {}
            }
            state.insert(x, 1);
            for y in edges.get(x).into_iter().flatten() {
                if !visit(y, edges, state) {
                    return false;
                }
            }
            state.insert(x, 2);
            true
        }
        edges.keys().all(|x| visit(x, &edges, &mut state))
    }
}

/// A partial map from variables to terms.
pub type Substitution = BTreeMap<Name, Term>;

impl Term {
    pub fn nil() -> Term {
        Term::Nil
    }

    pub fn var(x: &str) -> Term {
        Term::Var(Name::from(x))
    }

    pub fn prefix(a: ActionLabel, body: Term) -> Term {
        Term::Prefix(a, Arc::new(body))
    }

    pub fn choice(l: Term, r: Term) -> Term {
        Term::Choice(Arc::new(l), Arc::new(r))
    }

    /// Right-nested choice over the list; `0` when empty.
    pub fn sum<I: IntoIterator<Item = Term>>(terms: I) -> Term {
        let mut items: Vec<Term> = terms.into_iter().collect();
        let Some(mut acc) = items.pop() else {
            return Term::Nil;
        };
        while let Some(t) = items.pop() {
            acc = Term::choice(t, acc);
        }
        acc
    }

    pub fn par(s: ActionSet, l: Term, r: Term) -> Term {
        Term::Par(s, Arc::new(l), Arc::new(r))
    }

    pub fn hide(i: ActionSet, body: Term) -> Term {
        Term::Hide(i, Arc::new(body))
    }

    pub fn rename(r: RenamingMap, body: Term) -> Term {
        Term::Rename(r, Arc::new(body))
    }

    /// `θ_L^U`. Fails unless `L ⊆ U`.
    pub fn theta(l: ActionSet, u: ActionSet, body: Term) -> Result<Term> {
        if !l.is_subset(&u) {
            return Err(Error::Validity(format!("theta requires L ⊆ U, got {{{l}}} ⊄ {{{u}}}")));
        }
        Ok(Term::Theta(l, u, Arc::new(body)))
    }

    /// `θ_X = θ_X^X`.
    pub fn theta_x(x: ActionSet, body: Term) -> Term {
        Term::Theta(x.clone(), x, Arc::new(body))
    }

    pub fn psi(x: ActionSet, body: Term) -> Term {
        Term::Psi(x, Arc::new(body))
    }

    pub fn rec(x: &str, spec: Arc<RecSpec>) -> Result<Term> {
        if !spec.binds(x) {
            return Err(Error::UnboundReference(format!("<{x}|{}>", spec.name())));
        }
        Ok(Term::Rec(Name::from(x), spec))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Nil => true,
            Term::Var(_) => false,
            Term::Prefix(_, e) | Term::Hide(_, e) | Term::Rename(_, e) => e.is_closed(),
            Term::Theta(_, _, e) | Term::Psi(_, e) => e.is_closed(),
            Term::Choice(l, r) | Term::Par(_, l, r) => l.is_closed() && r.is_closed(),
            Term::Rec(_, s) => s.free.is_empty(),
        }
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Nil => {}
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Prefix(_, e) | Term::Hide(_, e) | Term::Rename(_, e) => e.collect_free(out),
            Term::Theta(_, _, e) | Term::Psi(_, e) => e.collect_free(out),
            Term::Choice(l, r) | Term::Par(_, l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
            Term::Rec(_, s) => out.extend(s.free.iter().cloned()),
        }
    }

    /// No `θ`/`ψ` sub-expression has a free variable that is bound by an
    /// enclosing specification.
    pub fn is_valid(&self) -> bool {
        self.valid_under(&BTreeSet::new())
    }

    fn valid_under(&self, bound: &BTreeSet<Name>) -> bool {
        match self {
            Term::Nil | Term::Var(_) => true,
            Term::Theta(_, _, e) | Term::Psi(_, e) => {
                e.free_vars().is_disjoint(bound) && e.valid_under(bound)
            }
            Term::Prefix(_, e) | Term::Hide(_, e) | Term::Rename(_, e) => e.valid_under(bound),
            Term::Choice(l, r) | Term::Par(_, l, r) => l.valid_under(bound) && r.valid_under(bound),
            Term::Rec(_, s) => {
                let mut inner = bound.clone();
                inner.extend(s.equations.keys().cloned());
                s.equations.values().all(|b| b.valid_under(&inner))
            }
        }
    }

    /// Every visible name occurring syntactically, including operator sets,
    /// renamings and recursive bodies.
    pub fn alphabet(&self) -> ActionSet {
        let mut out = ActionSet::new();
        self.collect_alphabet(&mut out);
        out
    }

    fn collect_alphabet(&self, out: &mut ActionSet) {
        match self {
            Term::Nil | Term::Var(_) => {}
            Term::Prefix(a, e) => {
                if let Some(n) = a.name() {
                    out.insert(n);
                }
                e.collect_alphabet(out);
            }
            Term::Choice(l, r) => {
                l.collect_alphabet(out);
                r.collect_alphabet(out);
            }
            Term::Par(s, l, r) => {
                out.extend(s);
                l.collect_alphabet(out);
                r.collect_alphabet(out);
            }
            Term::Hide(i, e) => {
                out.extend(i);
                e.collect_alphabet(out);
            }
            Term::Rename(r, e) => {
                for (a, b) in r.pairs() {
                    out.insert(a);
                    out.insert(b);
                }
                e.collect_alphabet(out);
            }
            Term::Theta(l, u, e) => {
                out.extend(l);
                out.extend(u);
                e.collect_alphabet(out);
            }
            Term::Psi(x, e) => {
                out.extend(x);
                e.collect_alphabet(out);
            }
            Term::Rec(_, s) => {
                for b in s.equations.values() {
                    b.collect_alphabet(out);
                }
            }
        }
    }

    fn contains_hide(&self) -> bool {
        match self {
            Term::Nil | Term::Var(_) => false,
            Term::Hide(..) => true,
            Term::Prefix(_, e) | Term::Rename(_, e) | Term::Theta(_, _, e) | Term::Psi(_, e) => {
                e.contains_hide()
            }
            Term::Choice(l, r) | Term::Par(_, l, r) => l.contains_hide() || r.contains_hide(),
            Term::Rec(_, s) => s.equations.values().any(Term::contains_hide),
        }
    }

    /// Variables of `vars` occurring without a visible-action guard.
    fn unguarded(&self, vars: &BTreeSet<Name>, guarded: bool, out: &mut BTreeSet<Name>) {
        match self {
            Term::Nil => {}
            Term::Var(x) => {
                if !guarded && vars.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Prefix(a, e) => e.unguarded(vars, guarded || a.is_visible(), out),
            Term::Hide(_, e) | Term::Rename(_, e) | Term::Theta(_, _, e) | Term::Psi(_, e) => {
                e.unguarded(vars, guarded, out)
            }
            Term::Choice(l, r) | Term::Par(_, l, r) => {
                l.unguarded(vars, guarded, out);
                r.unguarded(vars, guarded, out);
            }
            Term::Rec(_, s) => {
                if s.free.is_disjoint(vars) {
                    return;
                }
                let mut inner = vars.clone();
                for x in s.equations.keys() {
                    inner.remove(x);
                }
                for b in s.equations.values() {
                    b.unguarded(&inner, guarded, out);
                }
            }
        }
    }

    /// Every specification occurring in the term is well-guarded.
    pub fn is_guarded(&self) -> bool {
        let mut ok = true;
        self.visit_specs(&mut |s| ok &= s.is_well_guarded());
        ok
    }

    /// Calls `f` on every specification reachable from the term, once per
    /// distinct allocation.
    pub fn visit_specs(&self, f: &mut dyn FnMut(&Arc<RecSpec>)) {
        let mut seen = BTreeSet::new();
        self.visit_specs_inner(f, &mut seen);
    }

    fn visit_specs_inner(&self, f: &mut dyn FnMut(&Arc<RecSpec>), seen: &mut BTreeSet<usize>) {
        match self {
            Term::Nil | Term::Var(_) => {}
            Term::Prefix(_, e) | Term::Hide(_, e) | Term::Rename(_, e) | Term::Theta(_, _, e) | Term::Psi(_, e) => {
                e.visit_specs_inner(f, seen)
            }
            Term::Choice(l, r) | Term::Par(_, l, r) => {
                l.visit_specs_inner(f, seen);
                r.visit_specs_inner(f, seen);
            }
            Term::Rec(_, s) => {
                if seen.insert(Arc::as_ptr(s) as usize) {
                    for b in s.equations.values() {
                        b.visit_specs_inner(f, seen);
                    }
                    f(s);
                }
            }
        }
    }

    /// Number of constructors, counting each specification body once per
    /// occurrence of the call.
    pub fn size(&self) -> usize {
        match self {
            Term::Nil | Term::Var(_) | Term::Rec(..) => 1,
            Term::Prefix(_, e) | Term::Hide(_, e) | Term::Rename(_, e) | Term::Theta(_, _, e) | Term::Psi(_, e) => {
                1 + e.size()
            }
            Term::Choice(l, r) | Term::Par(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Capture-avoiding simultaneous substitution.
    pub fn substitute(&self, rho: &Substitution) -> Result<Term> {
        let out = self.subst(rho).unwrap_or_else(|| self.clone());
        if self.is_valid() && !out.is_valid() {
            return Err(Error::InvalidResult);
        }
        Ok(out)
    }

    /// `⟨E|S⟩`: replaces each `y ∈ V_S` by `⟨y|S⟩`.
    pub fn close_with(&self, spec: &Arc<RecSpec>) -> Term {
        let rho: Substitution = spec
            .equations
            .keys()
            .map(|y| (y.clone(), Term::Rec(y.clone(), spec.clone())))
            .collect();
        self.subst(&rho).unwrap_or_else(|| self.clone())
    }

    /// `None` when nothing changed, so untouched subterms stay shared.
    pub(crate) fn subst(&self, rho: &Substitution) -> Option<Term> {
        match self {
            Term::Nil => None,
            Term::Var(x) => rho.get(x).cloned(),
            Term::Prefix(a, e) => e.subst(rho).map(|e| Term::Prefix(a.clone(), Arc::new(e))),
            Term::Hide(i, e) => e.subst(rho).map(|e| Term::Hide(i.clone(), Arc::new(e))),
            Term::Rename(r, e) => e.subst(rho).map(|e| Term::Rename(r.clone(), Arc::new(e))),
            Term::Theta(l, u, e) => e
                .subst(rho)
                .map(|e| Term::Theta(l.clone(), u.clone(), Arc::new(e))),
            Term::Psi(x, e) => e.subst(rho).map(|e| Term::Psi(x.clone(), Arc::new(e))),
            Term::Choice(l, r) => {
                let (nl, nr) = (l.subst(rho), r.subst(rho));
                if nl.is_none() && nr.is_none() {
                    return None;
                }
                Some(Term::Choice(
                    nl.map(Arc::new).unwrap_or_else(|| l.clone()),
                    nr.map(Arc::new).unwrap_or_else(|| r.clone()),
                ))
            }
            Term::Par(s, l, r) => {
                let (nl, nr) = (l.subst(rho), r.subst(rho));
                if nl.is_none() && nr.is_none() {
                    return None;
                }
                Some(Term::Par(
                    s.clone(),
                    nl.map(Arc::new).unwrap_or_else(|| l.clone()),
                    nr.map(Arc::new).unwrap_or_else(|| r.clone()),
                ))
            }
            Term::Rec(y, spec) => {
                let relevant: Substitution = rho
                    .iter()
                    .filter(|(z, _)| spec.free.contains(*z))
                    .map(|(z, e)| (z.clone(), e.clone()))
                    .collect();
                if relevant.is_empty() {
                    return None;
                }
                let incoming: BTreeSet<Name> =
                    relevant.values().flat_map(|e| e.free_vars()).collect();
                let mut sigma = relevant;
                let mut renames: BTreeMap<Name, Name> = BTreeMap::new();
                let clashes: Vec<Name> = spec
                    .equations
                    .keys()
                    .filter(|x| incoming.contains(*x))
                    .cloned()
                    .collect();
                if !clashes.is_empty() {
                    let mut avoid: BTreeSet<Name> = incoming.clone();
                    avoid.extend(spec.equations.keys().cloned());
                    avoid.extend(spec.free.iter().cloned());
                    for x in clashes {
                        let fresh = fresh_name(&x, &avoid);
                        avoid.insert(fresh.clone());
                        sigma.insert(x.clone(), Term::Var(fresh.clone()));
                        renames.insert(x, fresh);
                    }
                }
                let equations: BTreeMap<Name, Term> = spec
                    .equations
                    .iter()
                    .map(|(x, b)| {
                        let x = renames.get(x).cloned().unwrap_or_else(|| x.clone());
                        (x, b.subst(&sigma).unwrap_or_else(|| b.clone()))
                    })
                    .collect();
                let y = renames.get(y).cloned().unwrap_or_else(|| y.clone());
                Some(Term::Rec(y, Arc::new(RecSpec::from_map(spec.name.clone(), equations))))
            }
        }
    }
}

/// Smallest `x_k` (k ≥ 1) not in `avoid`.
fn fresh_name(x: &str, avoid: &BTreeSet<Name>) -> Name {
    (1..)
        .map(|k| Name::from(format!("{x}_{k}")))
        .find(|n| !avoid.contains(n))
        .expect("unbounded suffix search")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> ActionLabel {
        ActionLabel::visible(n)
    }

    fn spec(eqs: Vec<(&str, Term)>) -> Arc<RecSpec> {
        Arc::new(RecSpec::new("S", eqs).unwrap())
    }

    #[test]
    fn free_vars_basics() {
        assert!(Term::Nil.free_vars().is_empty());
        assert_eq!(Term::var("x").free_vars().len(), 1);
        let s = spec(vec![("x", Term::prefix(a("a"), Term::var("x")))]);
        assert!(Term::rec("x", s).unwrap().free_vars().is_empty());
    }

    #[test]
    fn validity() {
        let bad = spec(vec![(
            "y",
            Term::theta(ActionSet::new(), ["a"].into_iter().collect(), Term::var("y")).unwrap(),
        )]);
        assert!(!Term::rec("y", bad).unwrap().is_valid());
        let ok = Term::theta(
            ActionSet::new(),
            ["a"].into_iter().collect(),
            Term::prefix(a("a"), Term::Nil),
        )
        .unwrap();
        assert!(ok.is_valid());
        assert!(Term::psi(["a"].into_iter().collect(), Term::var("x")).is_valid());
    }

    #[test]
    fn substitution_examples() {
        let rho: Substitution = [(Name::from("x"), Term::prefix(a("b"), Term::Nil))].into();
        let t = Term::prefix(a("a"), Term::var("x")).substitute(&rho).unwrap();
        assert_eq!(t, Term::prefix(a("a"), Term::prefix(a("b"), Term::Nil)));

        let rho: Substitution = [(Name::from("x"), Term::Nil)].into();
        let t = Term::choice(Term::var("x"), Term::var("y")).substitute(&rho).unwrap();
        assert_eq!(t, Term::choice(Term::Nil, Term::var("y")));

        let r = Term::rec("x", spec(vec![("x", Term::prefix(a("a"), Term::var("x")))])).unwrap();
        assert_eq!(r.substitute(&rho).unwrap(), r);
    }

    #[test]
    fn substitution_avoids_capture() {
        // <x|{x = a.z}> with z ↦ x must not capture the incoming x.
        let s = spec(vec![("x", Term::prefix(a("a"), Term::var("z")))]);
        let r = Term::rec("x", s).unwrap();
        let rho: Substitution = [(Name::from("z"), Term::var("x"))].into();
        let out = r.substitute(&rho).unwrap();
        assert_eq!(out.free_vars().into_iter().collect::<Vec<_>>(), vec![Name::from("x")]);
        let Term::Rec(y, s2) = &out else { panic!() };
        assert_eq!(&**y, "x_1");
        assert_eq!(s2.body("x_1"), Some(&Term::prefix(a("a"), Term::var("x"))));
    }

    #[test]
    fn alphabet_collects_operator_sets() {
        let t = Term::par(
            ["b"].into_iter().collect(),
            Term::prefix(a("a"), Term::Nil),
            Term::prefix(a("c"), Term::Nil),
        );
        assert_eq!(t.alphabet(), ["a", "b", "c"].into_iter().collect());
        let th = Term::theta(["d"].into_iter().collect(), ["d", "e"].into_iter().collect(), Term::Nil).unwrap();
        assert_eq!(th.alphabet(), ["d", "e"].into_iter().collect());
        assert!(Term::Nil.alphabet().is_empty());
    }

    #[test]
    fn well_guardedness() {
        assert!(spec(vec![("x", Term::prefix(a("a"), Term::var("x")))]).is_well_guarded());
        assert!(!spec(vec![("x", Term::var("x"))]).is_well_guarded());
        let body = Term::prefix(
            ActionLabel::Timeout,
            Term::choice(
                Term::prefix(a("a"), Term::Nil),
                Term::prefix(ActionLabel::Tau, Term::var("x")),
            ),
        );
        assert!(!spec(vec![("x", body)]).is_well_guarded());
        let mutual = spec(vec![
            ("x", Term::prefix(ActionLabel::Tau, Term::var("y"))),
            ("y", Term::prefix(a("b"), Term::var("x"))),
        ]);
        assert!(mutual.is_well_guarded());
        let hidden = spec(vec![("x", Term::hide(ActionSet::new(), Term::prefix(a("a"), Term::var("x"))))]);
        assert!(!hidden.is_well_guarded());
    }
}
