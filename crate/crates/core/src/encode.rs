//! Encoding of reactive behaviour into plain labels `t_eps`, `eps_X` and `t_X`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lts::{EnvSet, ExtLabel, Lts, LtsBuilder, Mode, StateTag};

/// Encodes the initial state of `lts` in the triggered mode, rooted or not.
pub fn encode(lts: &Lts, rooted: bool) -> Result<Lts> {
    let mode = if rooted {
        Mode::TriggeredRooted
    } else {
        Mode::Triggered
    };
    encode_from(lts, mode)
}

/// Encodes the part of the encoded system reachable from `mode` applied to
/// the initial state of `lts`.
pub fn encode_from(lts: &Lts, mode: Mode) -> Result<Lts> {
    if lts.has_encoded_labels() {
        return Err(Error::LabelUniverseMismatch(
            "input already carries encoding labels".into(),
        ));
    }
    let envs = lts.alphabet().num_envs() as EnvSet;
    let mut b = LtsBuilder::new(lts.alphabet().clone());
    let mut ids: HashMap<(Mode, usize), usize> = HashMap::new();
    let mut work: Vec<(Mode, usize)> = Vec::new();
    let id = |ids: &mut HashMap<(Mode, usize), usize>,
              b: &mut LtsBuilder,
              work: &mut Vec<(Mode, usize)>,
              m: Mode,
              s: usize|
     -> usize {
        *ids.entry((m, s)).or_insert_with(|| {
            work.push((m, s));
            b.add_state(StateTag::Encoded { mode: m, base: s })
        })
    };
    let init = id(&mut ids, &mut b, &mut work, mode, lts.initial());
    let mut i = 0;
    while i < work.len() {
        let (m, s) = work[i];
        i += 1;
        let src = ids[&(m, s)];
        let mut out: Vec<(ExtLabel, Mode, usize)> = Vec::new();
        match m {
            Mode::Triggered | Mode::TriggeredRooted => {
                for &(l, d) in lts.successors(s) {
                    if l != ExtLabel::Timeout {
                        out.push((l, m, d));
                    }
                }
                for x in 0..envs {
                    let target = if m == Mode::Triggered {
                        Mode::Env(x)
                    } else {
                        Mode::EnvRooted(x)
                    };
                    out.push((ExtLabel::Eps(x), target, s));
                    if m == Mode::TriggeredRooted && lts.is_idle(s, x) {
                        for &(l, d) in lts.successors(s) {
                            if l == ExtLabel::Timeout {
                                out.push((ExtLabel::TSet(x), Mode::Env(x), d));
                            }
                        }
                    }
                }
            }
            Mode::Env(x) | Mode::EnvRooted(x) => {
                let idle = lts.is_idle(s, x);
                for &(l, d) in lts.successors(s) {
                    match l {
                        ExtLabel::Tau => out.push((l, m, d)),
                        ExtLabel::Visible(a) if x >> a & 1 == 1 => {
                            out.push((l, Mode::Triggered, d))
                        }
                        ExtLabel::Timeout if idle => out.push((l, m, d)),
                        _ => {}
                    }
                }
                if idle {
                    let back = if matches!(m, Mode::Env(_)) {
                        Mode::Triggered
                    } else {
                        Mode::TriggeredRooted
                    };
                    out.push((ExtLabel::TEps, back, s));
                }
            }
        }
        for (l, m2, d) in out {
            let dst = id(&mut ids, &mut b, &mut work, m2, d);
            b.add_transition(src, l, dst);
        }
    }
    Ok(b.finish(init))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_term;
    use crate::semantics::build_lts;

    #[test]
    fn plain_encoding_has_no_timeout_sets() {
        let l = build_lts(&parse_term("a.t.b.0").unwrap(), Default::default()).unwrap();
        let e = encode(&l, false).unwrap();
        assert!(e.transitions().all(|(_, l, _)| !matches!(l, ExtLabel::TSet(_))));
        assert!(e.transitions().any(|(_, l, _)| l == ExtLabel::TEps));
    }

    #[test]
    fn rooted_encoding_offers_timeout_sets_at_the_root() {
        let l = build_lts(&parse_term("t.b.0").unwrap(), Default::default()).unwrap();
        let e = encode(&l, true).unwrap();
        let root: Vec<_> = e.successors(e.initial()).iter().map(|(l, _)| *l).collect();
        // Σ = {b}: ε_∅, ε_{b}, and t_X for both sets since t.b.0 idles everywhere
        assert_eq!(root.iter().filter(|l| matches!(l, ExtLabel::TSet(_))).count(), 2);
        assert_eq!(root.iter().filter(|l| matches!(l, ExtLabel::Eps(_))).count(), 2);
    }

    #[test]
    fn rejects_encoded_input() {
        let l = build_lts(&parse_term("a.0").unwrap(), Default::default()).unwrap();
        let e = encode(&l, false).unwrap();
        assert!(encode(&e, false).is_err());
    }
}
