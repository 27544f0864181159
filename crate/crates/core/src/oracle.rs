//! Brute-force reference semantics.
//!
//! Every non-equivalent situation is enumerated as a (real world, possible
//! set) pair and formulas are evaluated directly by Kripke semantics. Nothing
//! here touches truth tables or the counting engine, so it can serve as an
//! independent check on both.

use crate::counter::Count;
use crate::error::{Error, Result};
use crate::formula::{Formula, LogicKind};
use crate::inference::{KnowledgeBase, Weight};
use crate::numeric::LogSumExp;
use crate::vocabulary::Vocabulary;

/// Default bound on |Ω| for enumeration (2^16 possible sets at the cap).
pub const DEFAULT_ORACLE_CAP: usize = 4;

/// Largest cap accepted: possible sets are 64-bit masks.
pub const MAX_ORACLE_CAP: usize = 6;

/// An equivalence-class representative: the real world and the set of worlds
/// the agent considers possible, both as assignment indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Situation {
    pub real_world: usize,
    pub possible: u64,
}

impl Situation {
    pub fn considers_possible(&self, world: usize) -> bool {
        self.possible >> world & 1 == 1
    }

    /// Whether this pair is a situation of `logic`.
    pub fn is_valid_for(&self, logic: LogicKind) -> bool {
        match logic {
            LogicKind::K45 => true,
            LogicKind::KD45 => self.possible != 0,
            LogicKind::S5 => self.considers_possible(self.real_world),
        }
    }
}

fn check_cap(vocab: &Vocabulary, cap: usize) -> Result<()> {
    let cap = cap.min(MAX_ORACLE_CAP);
    if vocab.len() > cap {
        return Err(Error::OracleCap {
            size: vocab.len(),
            cap,
        });
    }
    Ok(())
}

/// All situations of `logic`, real world ascending and then possible set
/// ascending as an integer mask.
pub fn enumerate_situations(
    logic: LogicKind,
    vocab: &Vocabulary,
) -> Result<impl Iterator<Item = Situation>> {
    enumerate_situations_capped(logic, vocab, DEFAULT_ORACLE_CAP)
}

pub fn enumerate_situations_capped(
    logic: LogicKind,
    vocab: &Vocabulary,
    cap: usize,
) -> Result<impl Iterator<Item = Situation>> {
    check_cap(vocab, cap)?;
    let worlds = vocab.assignments();
    let sets: u64 = if worlds == 64 {
        u64::MAX
    } else {
        (1u64 << worlds) - 1
    };
    Ok((0..worlds).flat_map(move |real_world| {
        (0..=sets)
            .map(move |possible| Situation {
                real_world,
                possible,
            })
            .filter(move |s| s.is_valid_for(logic))
    }))
}

/// A formula with propositions resolved to vocabulary positions.
enum Compiled {
    Const(bool),
    Prop(usize),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
    Belief(Box<Compiled>),
}

impl Compiled {
    fn new(f: &Formula, vocab: &Vocabulary) -> Result<Compiled> {
        let bin = |a: &Formula, b: &Formula| -> Result<(Box<Compiled>, Box<Compiled>)> {
            Ok((
                Box::new(Compiled::new(a, vocab)?),
                Box::new(Compiled::new(b, vocab)?),
            ))
        };
        Ok(match f {
            Formula::True => Compiled::Const(true),
            Formula::False => Compiled::Const(false),
            Formula::Prop(p) => Compiled::Prop(
                vocab
                    .position(p)
                    .ok_or_else(|| Error::UnknownProposition(p.clone()))?,
            ),
            Formula::Not(a) => Compiled::Not(Box::new(Compiled::new(a, vocab)?)),
            Formula::Belief(a) => Compiled::Belief(Box::new(Compiled::new(a, vocab)?)),
            Formula::And(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Iff(a, b)
            }
        })
    }

    /// Evaluates at state `world` of the situation's Kripke structure. Every
    /// state sees exactly the possible set, so nesting needs no special case.
    fn eval(&self, s: &Situation, world: usize, worlds: usize) -> bool {
        match self {
            Compiled::Const(b) => *b,
            Compiled::Prop(i) => world >> i & 1 == 1,
            Compiled::Not(a) => !a.eval(s, world, worlds),
            Compiled::And(a, b) => a.eval(s, world, worlds) && b.eval(s, world, worlds),
            Compiled::Or(a, b) => a.eval(s, world, worlds) || b.eval(s, world, worlds),
            Compiled::Implies(a, b) => !a.eval(s, world, worlds) || b.eval(s, world, worlds),
            Compiled::Iff(a, b) => a.eval(s, world, worlds) == b.eval(s, world, worlds),
            Compiled::Belief(a) => (0..worlds)
                .filter(|&r| s.considers_possible(r))
                .all(|r| a.eval(s, r, worlds)),
        }
    }
}

/// Kripke satisfaction at the situation's real world. `B φ` holds iff `φ`
/// holds in every possible world, vacuously so when the set is empty.
pub fn eval_situation(s: &Situation, f: &Formula, vocab: &Vocabulary) -> Result<bool> {
    let compiled = Compiled::new(f, vocab)?;
    Ok(compiled.eval(s, s.real_world, vocab.assignments()))
}

/// N(φ) by enumeration.
pub fn oracle_count(f: &Formula, logic: LogicKind, vocab: &Vocabulary) -> Result<Count> {
    let compiled = Compiled::new(f, vocab)?;
    let worlds = vocab.assignments();
    let n = enumerate_situations(logic, vocab)?
        .filter(|s| compiled.eval(s, s.real_world, worlds))
        .count();
    Ok(Count::from(n))
}

/// Pr(φ) by summing unnormalized situation weights over the whole space.
/// Hard-weighted formulas filter the space instead of contributing a weight.
pub fn oracle_probability(kb: &KnowledgeBase, f: &Formula) -> Result<f64> {
    let vocab = kb.vocabulary();
    let worlds = vocab.assignments();
    let query = Compiled::new(f, vocab)?;
    let entries = kb
        .entries()
        .iter()
        .map(|e| Ok((e.weight, Compiled::new(&e.formula, vocab)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut z = LogSumExp::default();
    let mut numerator = LogSumExp::default();
    'situations: for s in enumerate_situations(kb.logic(), vocab)? {
        let mut log_weight = 0.0;
        for (weight, formula) in &entries {
            let holds = formula.eval(&s, s.real_world, worlds);
            match weight {
                Weight::Hard if !holds => continue 'situations,
                Weight::Hard => {}
                Weight::Finite(w) => {
                    if holds {
                        log_weight += w;
                    }
                }
            }
        }
        z.push(log_weight);
        if query.eval(&s, s.real_world, worlds) {
            numerator.push(log_weight);
        }
    }
    if z.value() == f64::NEG_INFINITY {
        return Err(Error::InconsistentHardConstraints);
    }
    Ok((numerator.value() - z.value()).exp())
}

/// Propositional Markov logic: a log-linear distribution over the 2^|Ω|
/// truth assignments themselves. Only defined for propositional formulas.
pub fn markov_logic_probability(kb: &KnowledgeBase, f: &Formula) -> Result<f64> {
    if !f.is_propositional() || kb.entries().iter().any(|e| !e.formula.is_propositional()) {
        return Err(Error::NotPropositional);
    }
    let vocab = kb.vocabulary();
    let worlds = vocab.assignments();
    let query = Compiled::new(f, vocab)?;
    let entries = kb
        .entries()
        .iter()
        .map(|e| Ok((e.weight, Compiled::new(&e.formula, vocab)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut z = LogSumExp::default();
    let mut numerator = LogSumExp::default();
    'worlds: for x in 0..worlds {
        // Belief-free formulas never look at the possible set.
        let s = Situation {
            real_world: x,
            possible: 0,
        };
        let mut log_weight = 0.0;
        for (weight, formula) in &entries {
            let holds = formula.eval(&s, x, worlds);
            match weight {
                Weight::Hard if !holds => continue 'worlds,
                Weight::Hard => {}
                Weight::Finite(w) => {
                    if holds {
                        log_weight += w;
                    }
                }
            }
        }
        z.push(log_weight);
        if query.eval(&s, x, worlds) {
            numerator.push(log_weight);
        }
    }
    if z.value() == f64::NEG_INFINITY {
        return Err(Error::InconsistentHardConstraints);
    }
    Ok((numerator.value() - z.value()).exp())
}
