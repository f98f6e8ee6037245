//! Reactive Hennessy-Milner logic: formulas, fragments, satisfaction and
//! distinguishing formulas.

mod distinguish;
mod enumerate;
mod sat;

use std::rc::Rc;

use crate::action::{ActionLabel, ActionSet};

pub use distinguish::{distinguish, Fragment, Target};
pub use enumerate::{enumerate_lb, enumerate_lbr};
pub use sat::{sat, sat_env, Evaluator};

/// Formulas, including the derived modalities as first-class nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    And(Vec<Rc<Formula>>),
    Not(Rc<Formula>),
    Diamond(ActionLabel, Rc<Formula>),
    /// `Xφ`.
    EnvBox(ActionSet, Rc<Formula>),
    /// `⟨ε⟩φ`.
    Eps(Rc<Formula>),
    /// `⟨α̂⟩φ`.
    HatDiamond(ActionLabel, Rc<Formula>),
    /// `⟨t_X⟩φ`, i.e. `X⟨t⟩φ`.
    TimeoutDiamond(ActionSet, Rc<Formula>),
    /// `φ⟨ε_X⟩φ'`.
    EpsX(Rc<Formula>, ActionSet, Rc<Formula>),
    /// `⟨ε⟩(φ⟨α̂⟩φ')`.
    EpsStep(Rc<Formula>, ActionLabel, Rc<Formula>),
    /// `⟨ε⟩¬⟨τ⟩⊤`.
    Stable,
}

impl Formula {
    pub fn top() -> Rc<Formula> {
        Rc::new(Formula::Top)
    }

    pub fn not(f: Rc<Formula>) -> Rc<Formula> {
        match &*f {
            Formula::Not(g) => g.clone(),
            _ => Rc::new(Formula::Not(f)),
        }
    }

    /// Conjunction; flattens singletons and drops duplicates by identity.
    pub fn and(items: Vec<Rc<Formula>>) -> Rc<Formula> {
        let mut out: Vec<Rc<Formula>> = Vec::new();
        for f in items {
            if matches!(*f, Formula::Top) || out.iter().any(|g| Rc::ptr_eq(g, &f) || *g == f) {
                continue;
            }
            out.push(f);
        }
        match out.len() {
            0 => Formula::top(),
            1 => out.pop().unwrap(),
            _ => Rc::new(Formula::And(out)),
        }
    }

    pub fn diamond(a: ActionLabel, f: Rc<Formula>) -> Rc<Formula> {
        Rc::new(Formula::Diamond(a, f))
    }

    /// `Xφ`, folding `X⟨t⟩φ` into `⟨t_X⟩φ`.
    pub fn env(x: ActionSet, f: Rc<Formula>) -> Rc<Formula> {
        match &*f {
            Formula::Diamond(ActionLabel::Timeout, g) => Rc::new(Formula::TimeoutDiamond(x, g.clone())),
            _ => Rc::new(Formula::EnvBox(x, f)),
        }
    }

    pub fn timeout(x: ActionSet, f: Rc<Formula>) -> Rc<Formula> {
        Rc::new(Formula::TimeoutDiamond(x, f))
    }

    pub fn eps_step(f: Rc<Formula>, a: ActionLabel, g: Rc<Formula>) -> Rc<Formula> {
        Rc::new(Formula::EpsStep(f, a, g))
    }

    pub fn eps_x(f: Rc<Formula>, x: ActionSet, g: Rc<Formula>) -> Rc<Formula> {
        Rc::new(Formula::EpsX(f, x, g))
    }

    pub fn stable() -> Rc<Formula> {
        Rc::new(Formula::Stable)
    }

    /// Number of constructors, counting shared subformulas once per use.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Stable => 1,
            Formula::And(v) => 1 + v.iter().map(|f| f.size()).sum::<usize>(),
            Formula::Not(f)
            | Formula::Diamond(_, f)
            | Formula::EnvBox(_, f)
            | Formula::Eps(f)
            | Formula::HatDiamond(_, f)
            | Formula::TimeoutDiamond(_, f) => 1 + f.size(),
            Formula::EpsX(f, _, g) | Formula::EpsStep(f, _, g) => 1 + f.size() + g.size(),
        }
    }

    /// Grammar membership, recognising the explicit expansions of the
    /// derived productions as well.
    pub fn in_fragment(&self, which: Fragment) -> bool {
        match which {
            Fragment::Lb => self.in_lb(),
            Fragment::Lbr => self.in_lbr(),
        }
    }

    fn in_lb(&self) -> bool {
        let a_tau = |a: &ActionLabel| *a != ActionLabel::Timeout;
        match self {
            Formula::Top | Formula::Stable => true,
            Formula::And(v) => v.iter().all(|f| f.in_lb()),
            Formula::Not(f) => f.in_lb(),
            Formula::EpsStep(f, a, g) => a_tau(a) && f.in_lb() && g.in_lb(),
            Formula::EpsX(f, _, g) => f.in_lb() && g.in_lb(),
            Formula::Eps(inner) => match &**inner {
                Formula::Not(d) => matches!(&**d, Formula::Diamond(ActionLabel::Tau, top) if **top == Formula::Top),
                Formula::And(v) if v.len() == 2 => match &*v[1] {
                    Formula::HatDiamond(a, g) => a_tau(a) && v[0].in_lb() && g.in_lb(),
                    _ => false,
                },
                _ => false,
            },
            _ => false,
        }
    }

    fn in_lbr(&self) -> bool {
        match self {
            Formula::Top => true,
            Formula::And(v) => v.iter().all(|f| f.in_lbr()),
            Formula::Not(f) => f.in_lbr(),
            Formula::Diamond(a, f) => *a != ActionLabel::Timeout && f.in_lb(),
            Formula::TimeoutDiamond(_, f) => f.in_lb(),
            Formula::EnvBox(_, d) => {
                matches!(&**d, Formula::Diamond(ActionLabel::Timeout, f) if f.in_lb())
            }
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, render_formula};

    #[test]
    fn fragments() {
        assert!(Formula::Stable.in_fragment(Fragment::Lb));
        let d = Formula::Diamond(ActionLabel::visible("a"), Formula::top());
        assert!(d.in_fragment(Fragment::Lbr));
        assert!(!d.in_fragment(Fragment::Lb));
        let e = Formula::EpsX(Formula::top(), ["a"].into_iter().collect(), Formula::top());
        assert!(e.in_fragment(Fragment::Lb));
        assert!(!Formula::Diamond(ActionLabel::Timeout, Formula::top()).in_fragment(Fragment::Lbr));
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            *parse_formula("<a>T").unwrap(),
            Formula::Diamond(ActionLabel::visible("a"), Formula::top())
        );
        assert_eq!(
            *parse_formula("[{}]<t>T").unwrap(),
            Formula::TimeoutDiamond(ActionSet::new(), Formula::top())
        );
        assert_eq!(
            *parse_formula("eps(T <a^> T)").unwrap(),
            Formula::EpsStep(Formula::top(), ActionLabel::visible("a"), Formula::top())
        );
    }

    #[test]
    fn render_round_trip() {
        for text in [
            "T",
            "stable",
            "&(T,!<a>T,<tau^>stable)",
            "[{a,b}]<t>eps(T <tau^> !T)",
            "T <eps_{a}> (T <eps_{}> stable)",
            "!(T <eps_{b}> T)",
            "eps(<b>T)",
            "[{a}]!<a>T",
        ] {
            let f = parse_formula(text).unwrap();
            assert_eq!(render_formula(&f), text);
            assert_eq!(parse_formula(&render_formula(&f)).unwrap(), f);
        }
    }
}
