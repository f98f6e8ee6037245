//! Finite labelled transition systems, label universes and the Aldebaran
//! and DOT exchange formats.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::action::{is_action_name, ActionLabel, ActionSet, Name};
use crate::error::{Error, Result};
use crate::term::Term;

/// A subset of Σ as a bitmask over [`Alphabet`] indices.
pub type EnvSet = u64;

/// Largest alphabet an [`EnvSet`] can index.
pub const MAX_ALPHABET: usize = 63;

/// The declared visible alphabet Σ, sorted lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<Name>,
}

impl Alphabet {
    pub fn new(set: &ActionSet) -> Result<Self> {
        if set.len() > MAX_ALPHABET {
            return Err(Error::LabelUniverseMismatch(format!(
                "alphabet of {} actions exceeds {MAX_ALPHABET}",
                set.len()
            )));
        }
        Ok(Alphabet {
            names: set.iter().map(Name::from).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| (**n).cmp(name)).ok()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|n| &**n)
    }

    pub fn to_set(&self) -> ActionSet {
        self.names().collect()
    }

    /// `X ∩ Σ` as a mask.
    pub fn mask(&self, x: &ActionSet) -> EnvSet {
        x.iter()
            .filter_map(|a| self.index(a))
            .fold(0, |m, i| m | (1 << i))
    }

    pub fn set_of(&self, mask: EnvSet) -> ActionSet {
        (0..self.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.name(i))
            .collect()
    }

    /// Number of subsets of Σ.
    pub fn num_envs(&self) -> usize {
        1usize << self.len()
    }

    pub fn union(&self, other: &Alphabet) -> Result<Alphabet> {
        Alphabet::new(&self.to_set().union(&other.to_set()))
    }

    /// Renders `{a,b}`-style member lists used by encoded labels.
    pub fn render_set(&self, mask: EnvSet) -> String {
        self.set_of(mask).to_string()
    }
}

/// Transition labels: the base actions plus the encoding labels `t_ε`,
/// `ε_X` and `t_X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtLabel {
    Tau,
    Timeout,
    Visible(u32),
    TEps,
    Eps(EnvSet),
    TSet(EnvSet),
}

impl ExtLabel {
    pub fn is_encoded(self) -> bool {
        matches!(self, ExtLabel::TEps | ExtLabel::Eps(_) | ExtLabel::TSet(_))
    }
}

/// Encoding modes of Table-4 style operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Triggered,
    TriggeredRooted,
    Env(EnvSet),
    EnvRooted(EnvSet),
}

/// What a state stands for.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StateTag {
    Term(Term),
    Named(String),
    Encoded { mode: Mode, base: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    alphabet: Alphabet,
    tags: Vec<StateTag>,
    succ: Vec<Vec<(ExtLabel, usize)>>,
    initial: usize,
}

/// Incremental construction; transitions are sorted and deduplicated on
/// [`LtsBuilder::finish`].
#[derive(Debug)]
pub struct LtsBuilder {
    alphabet: Alphabet,
    tags: Vec<StateTag>,
    succ: Vec<Vec<(ExtLabel, usize)>>,
}

impl LtsBuilder {
    pub fn new(alphabet: Alphabet) -> Self {
        LtsBuilder {
            alphabet,
            tags: Vec::new(),
            succ: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn add_state(&mut self, tag: StateTag) -> usize {
        self.tags.push(tag);
        self.succ.push(Vec::new());
        self.tags.len() - 1
    }

    pub fn num_states(&self) -> usize {
        self.tags.len()
    }

    pub fn add_transition(&mut self, src: usize, label: ExtLabel, dst: usize) {
        self.succ[src].push((label, dst));
    }

    /// Adds a base-action transition, interning visible names.
    pub fn add_action(&mut self, src: usize, label: &ActionLabel, dst: usize) -> Result<()> {
        let l = match label {
            ActionLabel::Tau => ExtLabel::Tau,
            ActionLabel::Timeout => ExtLabel::Timeout,
            ActionLabel::Visible(n) => ExtLabel::Visible(self.alphabet.index(n).ok_or_else(|| {
                Error::LabelUniverseMismatch(format!("action `{n}` not in the declared alphabet"))
            })? as u32),
        };
        self.add_transition(src, l, dst);
        Ok(())
    }

    pub fn finish(mut self, initial: usize) -> Lts {
        for s in &mut self.succ {
            s.sort_unstable();
            s.dedup();
        }
        Lts {
            alphabet: self.alphabet,
            tags: self.tags,
            succ: self.succ,
            initial,
        }
    }
}

impl Lts {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.tags.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn with_initial(&self, initial: usize) -> Lts {
        Lts {
            initial,
            ..self.clone()
        }
    }

    pub fn tag(&self, s: usize) -> &StateTag {
        &self.tags[s]
    }

    pub fn successors(&self, s: usize) -> &[(ExtLabel, usize)] {
        &self.succ[s]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, ExtLabel, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(s, out)| out.iter().map(move |&(l, d)| (s, l, d)))
    }

    pub fn has_encoded_labels(&self) -> bool {
        self.transitions().any(|(_, l, _)| l.is_encoded())
    }

    pub fn has_tau(&self, s: usize) -> bool {
        self.succ[s].iter().any(|(l, _)| *l == ExtLabel::Tau)
    }

    /// Visible part of `I(s)` as a mask.
    pub fn visible_initials(&self, s: usize) -> EnvSet {
        self.succ[s]
            .iter()
            .filter_map(|(l, _)| match l {
                ExtLabel::Visible(i) => Some(1 << i),
                _ => None,
            })
            .fold(0, |m, b| m | b)
    }

    /// `I(s) ∩ (X ∪ {τ}) = ∅`.
    pub fn is_idle(&self, s: usize, x: EnvSet) -> bool {
        !self.has_tau(s) && self.visible_initials(s) & x == 0
    }

    pub fn label_text(&self, l: ExtLabel) -> String {
        match l {
            ExtLabel::Tau => "tau".into(),
            ExtLabel::Timeout => "t".into(),
            ExtLabel::Visible(i) => self.alphabet.name(i as usize).into(),
            ExtLabel::TEps => "t_eps".into(),
            ExtLabel::Eps(m) => format!("eps_{{{}}}", self.alphabet.render_set(m)),
            ExtLabel::TSet(m) => format!("t_{{{}}}", self.alphabet.render_set(m)),
        }
    }

    /// Human-readable rendering of a state.
    pub fn state_text(&self, s: usize) -> String {
        match &self.tags[s] {
            StateTag::Term(t) => t.to_string(),
            StateTag::Named(n) => n.clone(),
            StateTag::Encoded { mode, base } => {
                let m = match mode {
                    Mode::Triggered => "vt".to_string(),
                    Mode::TriggeredRooted => "vt^r".to_string(),
                    Mode::Env(x) => format!("vt_{{{}}}", self.alphabet.render_set(*x)),
                    Mode::EnvRooted(x) => format!("vt^r_{{{}}}", self.alphabet.render_set(*x)),
                };
                format!("{m}(s{base})")
            }
        }
    }

    /// Re-expresses the system over a larger alphabet.
    pub fn remap(&self, target: &Alphabet) -> Result<Lts> {
        if *target == self.alphabet {
            return Ok(self.clone());
        }
        let idx: Vec<usize> = self
            .alphabet
            .names()
            .map(|n| {
                target.index(n).ok_or_else(|| {
                    Error::LabelUniverseMismatch(format!("action `{n}` missing from target alphabet"))
                })
            })
            .collect::<Result<_>>()?;
        let map_mask = |m: EnvSet| -> EnvSet {
            (0..idx.len())
                .filter(|i| m & (1 << i) != 0)
                .fold(0, |acc, i| acc | (1 << idx[i]))
        };
        let mut b = LtsBuilder::new(target.clone());
        for t in &self.tags {
            b.add_state(t.clone());
        }
        for (s, l, d) in self.transitions() {
            let l = match l {
                ExtLabel::Visible(i) => ExtLabel::Visible(idx[i as usize] as u32),
                ExtLabel::Eps(m) => ExtLabel::Eps(map_mask(m)),
                ExtLabel::TSet(m) => ExtLabel::TSet(map_mask(m)),
                other => other,
            };
            b.add_transition(s, l, d);
        }
        Ok(b.finish(self.initial))
    }

    /// Disjoint union over a shared alphabet; states of `other` are shifted
    /// by the returned offset. The initial state is that of `self`.
    pub fn disjoint_union(&self, other: &Lts) -> Result<(Lts, usize)> {
        if self.alphabet != other.alphabet {
            return Err(Error::LabelUniverseMismatch(
                "disjoint union of systems over different alphabets".into(),
            ));
        }
        let off = self.num_states();
        let mut tags = self.tags.clone();
        tags.extend(other.tags.iter().map(|t| match t {
            StateTag::Encoded { mode, base } => StateTag::Encoded {
                mode: *mode,
                base: base + off,
            },
            t => t.clone(),
        }));
        let mut succ = self.succ.clone();
        succ.extend(
            other
                .succ
                .iter()
                .map(|out| out.iter().map(|&(l, d)| (l, d + off)).collect()),
        );
        Ok((
            Lts {
                alphabet: self.alphabet.clone(),
                tags,
                succ,
                initial: self.initial,
            },
            off,
        ))
    }

    /// Aldebaran export.
    pub fn to_aut(&self) -> String {
        let mut out = format!(
            "des ({}, {}, {})\n",
            self.initial,
            self.num_transitions(),
            self.num_states()
        );
        for (s, l, d) in self.transitions() {
            let _ = writeln!(out, "({s},\"{}\",{d})", self.label_text(l));
        }
        out
    }

    /// Aldebaran import. `tau` and `i` read as the hidden action; the
    /// alphabet is the set of visible labels plus encoded-set members.
    pub fn from_aut(text: &str) -> Result<Lts> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(Error::Aut {
            line: 1,
            msg: "missing header".into(),
        })?;
        let nums = parse_tuple(header.trim().strip_prefix("des").ok_or(Error::Aut {
            line: hl + 1,
            msg: "header must start with `des`".into(),
        })?)
        .ok_or(Error::Aut {
            line: hl + 1,
            msg: "malformed header".into(),
        })?;
        let [init, m, n]: [&str; 3] = nums.try_into().map_err(|_| Error::Aut {
            line: hl + 1,
            msg: "header needs three fields".into(),
        })?;
        let num = |s: &str, line: usize| -> Result<usize> {
            s.trim().parse().map_err(|_| Error::Aut {
                line,
                msg: format!("expected a number, got `{}`", s.trim()),
            })
        };
        let (init, m, n) = (num(init, hl + 1)?, num(m, hl + 1)?, num(n, hl + 1)?);
        enum Raw {
            Base(ActionLabel),
            TEps,
            Eps(ActionSet),
            TSet(ActionSet),
        }
        let mut raw = Vec::new();
        let mut names = ActionSet::new();
        for (ln, line) in lines {
            let ln = ln + 1;
            let fields = parse_tuple(line.trim()).ok_or(Error::Aut {
                line: ln,
                msg: "malformed transition".into(),
            })?;
            let [s, l, d]: [&str; 3] = fields.try_into().map_err(|_| Error::Aut {
                line: ln,
                msg: "transition needs three fields".into(),
            })?;
            let (s, d) = (num(s, ln)?, num(d, ln)?);
            if s >= n || d >= n {
                return Err(Error::Aut {
                    line: ln,
                    msg: "state index out of range".into(),
                });
            }
            let l = l.trim();
            let l = l.strip_prefix('"').and_then(|l| l.strip_suffix('"')).unwrap_or(l);
            let set = |inner: &str| -> Result<ActionSet> {
                let members: Vec<&str> = inner.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
                if let Some(bad) = members.iter().find(|x| !is_action_name(x)) {
                    return Err(Error::Aut {
                        line: ln,
                        msg: format!("bad action name `{bad}`"),
                    });
                }
                Ok(members.into_iter().collect())
            };
            let r = if l == "tau" || l == "i" {
                Raw::Base(ActionLabel::Tau)
            } else if l == "t" {
                Raw::Base(ActionLabel::Timeout)
            } else if l == "t_eps" {
                Raw::TEps
            } else if let Some(inner) = l.strip_prefix("eps_{").and_then(|x| x.strip_suffix('}')) {
                let x = set(inner)?;
                names.extend(&x);
                Raw::Eps(x)
            } else if let Some(inner) = l.strip_prefix("t_{").and_then(|x| x.strip_suffix('}')) {
                let x = set(inner)?;
                names.extend(&x);
                Raw::TSet(x)
            } else if is_action_name(l) {
                names.insert(l);
                Raw::Base(ActionLabel::visible(l))
            } else {
                return Err(Error::Aut {
                    line: ln,
                    msg: format!("unrecognised label `{l}`"),
                });
            };
            raw.push((s, r, d));
        }
        if raw.len() != m {
            return Err(Error::Aut {
                line: hl + 1,
                msg: format!("header announces {m} transitions, found {}", raw.len()),
            });
        }
        if init >= n.max(1) {
            return Err(Error::Aut {
                line: hl + 1,
                msg: "initial state out of range".into(),
            });
        }
        let alphabet = Alphabet::new(&names)?;
        let mut b = LtsBuilder::new(alphabet);
        for i in 0..n.max(1) {
            b.add_state(StateTag::Named(format!("s{i}")));
        }
        for (s, r, d) in raw {
            match r {
                Raw::Base(a) => b.add_action(s, &a, d)?,
                Raw::TEps => b.add_transition(s, ExtLabel::TEps, d),
                Raw::Eps(x) => {
                    let m = b.alphabet().mask(&x);
                    b.add_transition(s, ExtLabel::Eps(m), d)
                }
                Raw::TSet(x) => {
                    let m = b.alphabet().mask(&x);
                    b.add_transition(s, ExtLabel::TSet(m), d)
                }
            }
        }
        Ok(b.finish(init))
    }

    /// Graphviz rendering.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lts {\n  rankdir=LR;\n  node [shape=circle];\n");
        let _ = writeln!(out, "  init [shape=point];\n  init -> s{};", self.initial);
        for s in 0..self.num_states() {
            let _ = writeln!(out, "  s{s} [label=\"{}\"];", escape(&self.state_text(s)));
        }
        for (s, l, d) in self.transitions() {
            let _ = writeln!(out, "  s{s} -> s{d} [label=\"{}\"];", escape(&self.label_text(l)));
        }
        out.push_str("}\n");
        out
    }

    /// States reachable from `s` (including `s`).
    pub fn reachable_from(&self, s: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([s]);
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &(_, v) in &self.succ[u] {
                if seen.insert(v) {
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Restricts to the states reachable from `s`, renumbered in BFS order.
    pub fn reachable_part(&self, s: usize) -> Lts {
        let mut order = vec![s];
        let mut index = BTreeMap::from([(s, 0usize)]);
        let mut i = 0;
        while i < order.len() {
            for &(_, v) in &self.succ[order[i]] {
                if let std::collections::btree_map::Entry::Vacant(e) = index.entry(v) {
                    e.insert(order.len());
                    order.push(v);
                }
            }
            i += 1;
        }
        let mut b = LtsBuilder::new(self.alphabet.clone());
        for &u in &order {
            b.add_state(self.tags[u].clone());
        }
        for (new, &u) in order.iter().enumerate() {
            for &(l, v) in &self.succ[u] {
                b.add_transition(new, l, index[&v]);
            }
        }
        b.finish(0)
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Splits `(x, "y", z)` into its three raw fields, respecting quotes.
fn parse_tuple(s: &str) -> Option<Vec<&str>> {
    let inner = s.trim().strip_prefix('(')?.strip_suffix(')')?;
    let mut out = Vec::new();
    let mut start = 0;
    let mut quoted = false;
    for (i, c) in inner.char_indices() {
        match c {
            '"' => quoted = !quoted,
            ',' if !quoted => {
                out.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&inner[start..]);
    // Labels such as eps_{a,b} contain commas: glue middle fields back.
    if out.len() > 3 {
        let first = out[0];
        let last = out[out.len() - 1];
        let begin = first.len() + 1;
        let end = inner.len() - last.len() - 1;
        return Some(vec![first, &inner[begin..end], last]);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aut_round_trip_with_encoded_labels() {
        let sigma = Alphabet::new(&["a", "b"].into_iter().collect()).unwrap();
        let mut b = LtsBuilder::new(sigma);
        for i in 0..3 {
            b.add_state(StateTag::Named(format!("s{i}")));
        }
        b.add_transition(0, ExtLabel::Eps(0b11), 1);
        b.add_transition(1, ExtLabel::TEps, 0);
        b.add_transition(0, ExtLabel::TSet(0b01), 2);
        b.add_transition(2, ExtLabel::Visible(1), 2);
        b.add_transition(2, ExtLabel::Tau, 0);
        let l = b.finish(0);
        let text = l.to_aut();
        assert!(text.starts_with("des (0, 5, 3)\n"));
        assert!(text.contains("(0,\"eps_{a,b}\",1)"));
        assert!(text.contains("(0,\"t_{a}\",2)"));
        let back = Lts::from_aut(&text).unwrap();
        assert_eq!(back.to_aut(), text);
    }

    #[test]
    fn aut_rejects_garbage() {
        assert!(Lts::from_aut("").is_err());
        assert!(Lts::from_aut("des (0, 1, 1)\n(0,\"a\",3)\n").is_err());
        assert!(Lts::from_aut("des (0, 2, 1)\n(0,\"a\",0)\n").is_err());
    }

    #[test]
    fn remap_shifts_masks() {
        let small = Alphabet::new(&["b"].into_iter().collect()).unwrap();
        let big = Alphabet::new(&["a", "b"].into_iter().collect()).unwrap();
        let mut b = LtsBuilder::new(small);
        b.add_state(StateTag::Named("s".into()));
        b.add_transition(0, ExtLabel::Visible(0), 0);
        b.add_transition(0, ExtLabel::Eps(1), 0);
        let l = b.finish(0).remap(&big).unwrap();
        assert_eq!(l.successors(0), &[(ExtLabel::Visible(1), 0), (ExtLabel::Eps(2), 0)]);
    }
}
