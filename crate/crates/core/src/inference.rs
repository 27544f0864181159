//! Partition functions and query probabilities from exact counts.
//!
//! The knowledge-base formulas split the situation space into classes, one
//! per truth assignment `t` to the finite-weight formulas. All situations in
//! a class share the weight `w(t)`, so
//!
//! ```text
//! Z     = Σ_t N(Φ(t)) · exp(w(t))
//! Pr(F) = Σ_t N(Φ(t) ∧ F) · exp(w(t)) / Z
//! ```
//!
//! Hard (`+inf`) formulas are not branched on: they are conjoined into every
//! `Φ(t)`, which restricts the space to the situations satisfying them.

use std::fmt;
use std::str::FromStr;

use crate::counter::Count;
use crate::engine::{CountEngine, TermSum};
use crate::error::{Error, Result};
use crate::formula::{Formula, LogicKind};
use crate::numeric::{ln_count, LogSumExp, ScaledSum};
use crate::oracle::{eval_situation, Situation};
use crate::vocabulary::Vocabulary;

/// Most finite-weight entries a knowledge base may hold; inference visits
/// up to 2^n classes.
pub const MAX_FINITE_ENTRIES: usize = 20;

/// Depth of the class-enumeration tree that is split across worker threads.
const PARALLEL_DEPTH: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weight {
    Finite(f64),
    /// `+inf`: the formula must hold.
    Hard,
}

impl Weight {
    pub fn finite(self) -> Option<f64> {
        match self {
            Weight::Finite(w) => Some(w),
            Weight::Hard => None,
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Hard => write!(f, "inf"),
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => return Ok(Weight::Hard),
            "-inf" | "-infinity" => {
                return Err(Error::InvalidWeight(
                    "-inf is not accepted; give the negated formula weight inf".into(),
                ))
            }
            _ => {}
        }
        let w: f64 = s
            .parse()
            .map_err(|_| Error::InvalidWeight(format!("`{s}` is not a number or `inf`")))?;
        if !w.is_finite() {
            return Err(Error::InvalidWeight(format!("`{s}` is not finite")));
        }
        Ok(Weight::Finite(w))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KbEntry {
    pub weight: Weight,
    pub formula: Formula,
}

/// Weighted depth-one formulas over a fixed vocabulary and logic.
#[derive(Clone, Debug, PartialEq)]
pub struct KnowledgeBase {
    logic: LogicKind,
    vocab: Vocabulary,
    entries: Vec<KbEntry>,
}

impl KnowledgeBase {
    pub fn new(logic: LogicKind, vocab: Vocabulary) -> Self {
        KnowledgeBase {
            logic,
            vocab,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, weight: Weight, formula: Formula) -> Result<()> {
        if let Weight::Finite(w) = weight {
            if !w.is_finite() {
                return Err(Error::InvalidWeight(format!("{w} is not finite")));
            }
        }
        formula.check_vocabulary(&self.vocab)?;
        formula.validate_depth_one()?;
        self.entries.push(KbEntry { weight, formula });
        Ok(())
    }

    pub fn with_entry(mut self, weight: Weight, formula: Formula) -> Result<Self> {
        self.push(weight, formula)?;
        Ok(self)
    }

    pub fn logic(&self) -> LogicKind {
        self.logic
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn entries(&self) -> &[KbEntry] {
        &self.entries
    }

    /// The same entries over a different vocabulary, which must contain
    /// every proposition used.
    pub fn with_vocabulary(&self, vocab: Vocabulary) -> Result<KnowledgeBase> {
        let mut kb = KnowledgeBase::new(self.logic, vocab);
        for e in &self.entries {
            kb.push(e.weight, e.formula.clone())?;
        }
        Ok(kb)
    }
}

/// One class of the partition: the assignment `t` to the finite-weight
/// formulas (bit `i` for the `i`-th finite entry), its exact size, and `w(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TermRow {
    pub assignment: u32,
    pub count: Count,
    /// N(Φ(t) ∧ F) when a query was supplied.
    pub query_count: Option<Count>,
    pub weight: f64,
}

impl TermRow {
    /// Truth value assigned to the `i`-th finite-weight entry.
    pub fn holds(&self, i: usize) -> bool {
        self.assignment >> i & 1 == 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InferenceResult {
    pub probability: f64,
    pub log_z: f64,
    pub log_numerator: f64,
    /// Nonzero classes, by ascending assignment, when requested.
    pub breakdown: Option<Vec<TermRow>>,
}

/// A knowledge base with its formula decompositions prepared for repeated
/// inference.
pub struct Model<'kb> {
    kb: &'kb KnowledgeBase,
    engine: CountEngine,
    /// Indices of finite-weight entries and their weights.
    finite: Vec<(usize, f64)>,
    /// (decomposition of Fᵢ, decomposition of ¬Fᵢ) per finite entry.
    branches: Vec<(TermSum, TermSum)>,
    /// Conjunction of all hard entries.
    base: TermSum,
}

impl<'kb> Model<'kb> {
    pub fn new(kb: &'kb KnowledgeBase) -> Result<Self> {
        let engine = CountEngine::new(kb.logic, kb.vocab.clone())?;
        let finite: Vec<(usize, f64)> = kb
            .entries
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.weight.finite().map(|w| (i, w)))
            .collect();
        if finite.len() > MAX_FINITE_ENTRIES {
            return Err(Error::EntryCap {
                count: finite.len(),
                cap: MAX_FINITE_ENTRIES,
            });
        }
        let mut base = engine.unit();
        for e in kb.entries.iter().filter(|e| e.weight == Weight::Hard) {
            base = engine.conjoin(&base, &engine.term_sum(&e.formula)?);
        }
        let branches = finite
            .iter()
            .map(|&(i, _)| {
                let d = engine.term_sum(&kb.entries[i].formula)?;
                let neg = engine.negate(&d);
                Ok((d, neg))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Model {
            kb,
            engine,
            finite,
            branches,
            base,
        })
    }

    pub fn engine(&self) -> &CountEngine {
        &self.engine
    }

    pub fn knowledge_base(&self) -> &KnowledgeBase {
        self.kb
    }

    /// Weights of the finite entries, in entry order.
    pub fn finite_weights(&self) -> Vec<f64> {
        self.finite.iter().map(|&(_, w)| w).collect()
    }

    /// Positions in the knowledge base of the finite entries.
    pub fn finite_entries(&self) -> Vec<usize> {
        self.finite.iter().map(|&(i, _)| i).collect()
    }

    fn assignment_weight(&self, assignment: u32, weights: &[f64]) -> f64 {
        weights
            .iter()
            .enumerate()
            .filter(|(i, _)| assignment >> i & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    fn walk(
        &self,
        depth: usize,
        assignment: u32,
        partial: TermSum,
        query: Option<&TermSum>,
    ) -> Vec<TermRow> {
        if partial.is_empty() {
            return Vec::new();
        }
        if depth == self.branches.len() {
            let count = self.engine.count_sum(&partial);
            if count == Count::from(0) {
                return Vec::new();
            }
            let query_count =
                query.map(|q| self.engine.count_sum(&self.engine.conjoin(&partial, q)));
            return vec![TermRow {
                assignment,
                count,
                query_count,
                weight: self.assignment_weight(assignment, &self.finite_weights()),
            }];
        }
        let (pos, neg) = &self.branches[depth];
        let with = |d: &TermSum, bit: u32| {
            self.walk(
                depth + 1,
                assignment | bit,
                self.engine.conjoin(&partial, d),
                query,
            )
        };
        let bit = 1u32 << depth;
        let (mut off, on) = if depth < PARALLEL_DEPTH {
            rayon::join(|| with(neg, 0), || with(pos, bit))
        } else {
            (with(neg, 0), with(pos, bit))
        };
        off.extend(on);
        off
    }

    /// Nonzero classes by ascending assignment, optionally with the counts
    /// of `query` inside each class.
    pub fn rows(&self, query: Option<&Formula>) -> Result<Vec<TermRow>> {
        let query = query.map(|q| self.engine.term_sum(q)).transpose()?;
        let mut rows = self.walk(0, 0, self.base.clone(), query.as_ref());
        rows.sort_by_key(|r| r.assignment);
        Ok(rows)
    }

    /// log Z for the given finite weights (in entry order), from rows that
    /// were computed once. Rows do not depend on weights.
    pub fn log_z_from_rows(rows: &[TermRow], weights: &[f64]) -> f64 {
        let mut acc = LogSumExp::default();
        for r in rows {
            let w: f64 = weights
                .iter()
                .enumerate()
                .filter(|(i, _)| r.holds(*i))
                .map(|(_, w)| w)
                .sum();
            acc.push(ln_count(&r.count) + w);
        }
        acc.value()
    }

    pub fn log_partition(&self) -> Result<f64> {
        let z = scaled_sum(&self.rows(None)?, |r| Some(&r.count));
        if z.is_zero() {
            return Err(Error::InconsistentHardConstraints);
        }
        Ok(z.ln())
    }

    pub fn probability(&self, f: &Formula, breakdown: bool) -> Result<InferenceResult> {
        let rows = self.rows(Some(f))?;
        let z = scaled_sum(&rows, |r| Some(&r.count));
        if z.is_zero() {
            return Err(Error::InconsistentHardConstraints);
        }
        let numerator = scaled_sum(&rows, |r| r.query_count.as_ref());
        Ok(InferenceResult {
            probability: numerator.ratio(&z),
            log_z: z.ln(),
            log_numerator: numerator.ln(),
            breakdown: breakdown.then_some(rows),
        })
    }

    /// Pr(f | g) = Pr(f ∧ g) / Pr(g).
    pub fn conditional(&self, f: &Formula, g: &Formula) -> Result<f64> {
        let given = scaled_sum(&self.rows(Some(g))?, |r| r.query_count.as_ref());
        if given.is_zero() {
            return Err(Error::ZeroProbabilityCondition);
        }
        let joint = f.clone() & g.clone();
        let both = scaled_sum(&self.rows(Some(&joint))?, |r| r.query_count.as_ref());
        Ok(both.ratio(&given))
    }

    /// Pr(σ) for a single situation.
    pub fn situation_probability(&self, s: &Situation) -> Result<f64> {
        let vocab = &self.kb.vocab;
        if s.real_world >= vocab.assignments()
            || (vocab.assignments() < 64 && s.possible >> vocab.assignments() != 0)
        {
            return Err(Error::InvalidArgument(
                "situation refers to worlds outside the vocabulary".into(),
            ));
        }
        if !s.is_valid_for(self.kb.logic) {
            return Err(Error::InvalidArgument(format!(
                "not a {} situation",
                self.kb.logic
            )));
        }
        let log_z = self.log_partition()?;
        let mut log_weight = 0.0;
        for e in &self.kb.entries {
            let holds = eval_situation(s, &e.formula, vocab)?;
            match e.weight {
                Weight::Hard if !holds => return Ok(0.0),
                Weight::Hard => {}
                Weight::Finite(w) => {
                    if holds {
                        log_weight += w;
                    }
                }
            }
        }
        Ok((log_weight - log_z).exp())
    }
}

fn scaled_sum<'a>(
    rows: &'a [TermRow],
    count: impl Fn(&'a TermRow) -> Option<&'a Count>,
) -> ScaledSum {
    let mut acc = ScaledSum::default();
    for r in rows {
        if let Some(n) = count(r) {
            acc.push(n, r.weight);
        }
    }
    acc
}

/// log Z.
pub fn partition_function(kb: &KnowledgeBase) -> Result<f64> {
    Model::new(kb)?.log_partition()
}

pub fn probability(kb: &KnowledgeBase, f: &Formula) -> Result<InferenceResult> {
    f.check_vocabulary(kb.vocabulary())?;
    Model::new(kb)?.probability(f, false)
}

pub fn conditional(kb: &KnowledgeBase, f: &Formula, g: &Formula) -> Result<f64> {
    Model::new(kb)?.conditional(f, g)
}

pub fn situation_probability(kb: &KnowledgeBase, s: &Situation) -> Result<f64> {
    Model::new(kb)?.situation_probability(s)
}
