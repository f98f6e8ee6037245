use std::collections::HashSet;
use std::rc::Rc;

use super::Formula;
use crate::action::{ActionLabel, ActionSet};

/// Every `Lb` formula over `sigma` of size at most `max_size`, built from
/// `⊤`, the stability formula, negation, binary conjunction,
/// `⟨ε⟩(φ⟨α̂⟩φ')` and `φ⟨ε_X⟩φ'`. Double negations are skipped.
pub fn enumerate_lb(sigma: &ActionSet, max_size: usize) -> Vec<Rc<Formula>> {
    let mut labels = vec![ActionLabel::Tau];
    labels.extend(sigma.iter().map(ActionLabel::visible));
    let names: Vec<&str> = sigma.iter().collect();
    let envs: Vec<ActionSet> = (0u64..1 << names.len())
        .map(|m| {
            names
                .iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, n)| *n)
                .collect()
        })
        .collect();

    let mut seen: HashSet<Rc<Formula>> = HashSet::new();
    let mut by_size: Vec<Vec<Rc<Formula>>> = vec![Vec::new(); max_size + 1];
    let mut push = |by_size: &mut Vec<Vec<Rc<Formula>>>, size: usize, f: Formula| {
        let f = Rc::new(f);
        if seen.insert(f.clone()) {
            by_size[size].push(f);
        }
    };
    if max_size >= 1 {
        push(&mut by_size, 1, Formula::Top);
        push(&mut by_size, 1, Formula::Stable);
    }
    for size in 2..=max_size {
        for f in by_size[size - 1].clone() {
            if !matches!(*f, Formula::Not(_)) {
                push(&mut by_size, size, Formula::Not(f));
            }
        }
        for left in 1..size - 1 {
            let right = size - 1 - left;
            let (ls, rs) = (by_size[left].clone(), by_size[right].clone());
            for (i, f) in ls.iter().enumerate() {
                for (j, g) in rs.iter().enumerate() {
                    if left < right || (left == right && i < j) {
                        push(&mut by_size, size, Formula::And(vec![f.clone(), g.clone()]));
                    }
                    for a in &labels {
                        push(&mut by_size, size, Formula::EpsStep(f.clone(), a.clone(), g.clone()));
                    }
                    for x in &envs {
                        push(&mut by_size, size, Formula::EpsX(f.clone(), x.clone(), g.clone()));
                    }
                }
            }
        }
    }
    by_size.into_iter().flatten().collect()
}

/// Every `Lbr` formula over `sigma` of size at most `max_size`: `⊤`,
/// negation, binary conjunction, `⟨α⟩φ` and `⟨t_X⟩φ` with `φ ∈ Lb`.
pub fn enumerate_lbr(sigma: &ActionSet, max_size: usize) -> Vec<Rc<Formula>> {
    let lb = enumerate_lb(sigma, max_size.saturating_sub(1));
    let mut labels = vec![ActionLabel::Tau];
    labels.extend(sigma.iter().map(ActionLabel::visible));
    let names: Vec<&str> = sigma.iter().collect();
    let envs: Vec<ActionSet> = (0u64..1 << names.len())
        .map(|m| names.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, n)| *n).collect())
        .collect();
    let mut seen: HashSet<Rc<Formula>> = HashSet::new();
    let mut by_size: Vec<Vec<Rc<Formula>>> = vec![Vec::new(); max_size + 1];
    let mut push = |by_size: &mut Vec<Vec<Rc<Formula>>>, size: usize, f: Formula| {
        let f = Rc::new(f);
        if seen.insert(f.clone()) {
            by_size[size].push(f);
        }
    };
    if max_size >= 1 {
        push(&mut by_size, 1, Formula::Top);
    }
    for phi in &lb {
        let size = 1 + phi.size();
        for a in &labels {
            push(&mut by_size, size, Formula::Diamond(a.clone(), phi.clone()));
        }
        for x in &envs {
            push(&mut by_size, size, Formula::TimeoutDiamond(x.clone(), phi.clone()));
        }
    }
    for size in 2..=max_size {
        for f in by_size[size - 1].clone() {
            if !matches!(*f, Formula::Not(_)) {
                push(&mut by_size, size, Formula::Not(f));
            }
        }
        for left in 1..size - 1 {
            let right = size - 1 - left;
            if left > right {
                continue;
            }
            let (ls, rs) = (by_size[left].clone(), by_size[right].clone());
            for (i, f) in ls.iter().enumerate() {
                for (j, g) in rs.iter().enumerate() {
                    if left < right || i < j {
                        push(&mut by_size, size, Formula::And(vec![f.clone(), g.clone()]));
                    }
                }
            }
        }
    }
    by_size.into_iter().flatten().collect()
}
