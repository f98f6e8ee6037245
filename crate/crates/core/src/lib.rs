//! Process algebra with time-outs and environment operators, with checkers
//! for branching reactive bisimilarity and related equivalences.

pub mod action;
pub mod axioms;
pub mod bisim;
pub mod encode;
pub mod error;
pub mod lts;
pub mod modal;
pub mod parser;
pub mod sampler;
pub mod semantics;
pub mod term;

pub use action::{ActionLabel, ActionSet, Name, RenamingMap};
pub use bisim::{check, Relation, Verdict};
pub use error::{Error, Result};
pub use lts::{Alphabet, ExtLabel, Lts};
pub use term::{RecSpec, Term};
