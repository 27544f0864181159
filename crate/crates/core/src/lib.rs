//! Exact maximum-entropy inference over epistemic situations for the
//! single-agent modal logics K45, KD45 and S5.
//!
//! A knowledge base of weighted depth-one formulas defines a log-linear
//! distribution over the non-equivalent pointed Kripke structures on a fixed
//! vocabulary. There are doubly exponentially many of them, so nothing here
//! enumerates them outside of [`oracle`]. Instead [`engine`] counts the
//! situations satisfying a formula in closed form, and [`inference`] builds
//! the partition function from those counts.
//!
//! ```
//! use modal_maxent::{parse, probability, KnowledgeBase, LogicKind, Vocabulary, Weight};
//!
//! let vocab = Vocabulary::parse("p").unwrap();
//! let mut kb = KnowledgeBase::new(LogicKind::K45, vocab.clone());
//! kb.push(Weight::Finite(2f64.ln()), parse("B p", &vocab).unwrap()).unwrap();
//! let pr = probability(&kb, &parse("B p", &vocab).unwrap()).unwrap().probability;
//! assert!((pr - 2.0 / 3.0).abs() < 1e-12);
//! ```

pub mod asymptotics;
pub mod check;
pub mod counter;
pub mod engine;
pub mod error;
pub mod formula;
pub mod generate;
pub mod inference;
pub mod kbfile;
pub mod learning;
pub mod numeric;
pub mod oracle;
pub mod parser;
pub mod truth_table;
pub mod vocabulary;

/// Version of this crate, reported by front ends.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use asymptotics::{limit_ratio, limit_simplify, trend, LimitVerdict};
pub use counter::{model_count, Count};
pub use engine::{
    count_formula, decompose, BasicTerm, CountEngine, SignedDecomposition, SimpleConjunction,
};
pub use error::{Error, ErrorClass, Result};
pub use formula::{Formula, LogicKind};
pub use inference::{
    conditional, partition_function, probability, situation_probability, InferenceResult,
    KnowledgeBase, Model, Weight,
};
pub use learning::{fit_weights, objective_and_gradient, Constraint, FitOptions, FitReport};
pub use oracle::{eval_situation, oracle_count, oracle_probability, Situation};
pub use parser::parse;
pub use truth_table::TruthTable;
pub use vocabulary::Vocabulary;
