//! Action labels, action sets and renamings.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Interned-ish identifier; cheap to clone.
pub type Name = Arc<str>;

/// Identifiers that may not be used as visible action names.
pub const RESERVED: &[&str] = &["tau", "t", "t_eps", "hide", "rename", "theta", "psi"];

pub fn is_action_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&s)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionLabel {
    Tau,
    Timeout,
    Visible(Name),
}

impl ActionLabel {
    pub fn visible(name: &str) -> Self {
        ActionLabel::Visible(Name::from(name))
    }

    pub fn is_visible(&self) -> bool {
        matches!(self, ActionLabel::Visible(_))
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            ActionLabel::Visible(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionLabel::Tau => f.write_str("tau"),
            ActionLabel::Timeout => f.write_str("t"),
            ActionLabel::Visible(n) => f.write_str(n),
        }
    }
}

/// A finite set of visible action names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionSet(BTreeSet<Name>);

impl ActionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn contains(&self, a: &str) -> bool {
        self.0.contains(a)
    }

    pub fn insert(&mut self, a: &str) -> bool {
        self.0.insert(Name::from(a))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|n| &**n)
    }

    pub fn union(&self, other: &ActionSet) -> ActionSet {
        ActionSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &ActionSet) -> ActionSet {
        ActionSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &ActionSet) -> ActionSet {
        ActionSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &ActionSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn extend(&mut self, other: &ActionSet) {
        self.0.extend(other.0.iter().cloned());
    }
}

impl<S: AsRef<str>> FromIterator<S> for ActionSet {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        ActionSet(iter.into_iter().map(|s| Name::from(s.as_ref())).collect())
    }
}

impl fmt::Display for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().collect();
        f.write_str(&names.join(","))
    }
}

/// A finite relation on visible names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RenamingMap(BTreeSet<(Name, Name)>);

impl RenamingMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: &str, b: &str) {
        self.0.insert((Name::from(a), Name::from(b)));
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(a, b)| (&**a, &**b))
    }

    /// `{b | (a, b) ∈ R}`.
    pub fn image<'a>(&'a self, a: &'a str) -> impl Iterator<Item = &'a Name> + 'a {
        self.0.iter().filter(move |(x, _)| &**x == a).map(|(_, b)| b)
    }

    /// Preimage of a set: `{a | ∃b ∈ X. (a, b) ∈ R}`.
    pub fn preimage(&self, x: &ActionSet) -> ActionSet {
        self.pairs().filter(|(_, b)| x.contains(b)).map(|(a, _)| a).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<(S, S)> for RenamingMap {
    fn from_iter<I: IntoIterator<Item = (S, S)>>(iter: I) -> Self {
        RenamingMap(
            iter.into_iter()
                .map(|(a, b)| (Name::from(a.as_ref()), Name::from(b.as_ref())))
                .collect(),
        )
    }
}

impl fmt::Display for RenamingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().map(|(a, b)| format!("{a}->{b}")).collect();
        f.write_str(&parts.join(","))
    }
}
