//! Cross-validation of the counting engine against enumeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::counter::Count;
use crate::engine::CountEngine;
use crate::error::{Error, Result};
use crate::formula::{Formula, LogicKind};
use crate::generate::{all_formulas, random_formula};
use crate::oracle::{oracle_count, DEFAULT_ORACLE_CAP};
use crate::vocabulary::Vocabulary;

const NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];

/// Size bound for exhaustive enumeration.
pub const ALL_SMALL_SIZE: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseSelection {
    /// This many random formulas per logic and vocabulary size.
    Random(usize),
    /// Every formula with at most [`ALL_SMALL_SIZE`] nodes.
    AllSmall,
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub logics: Vec<LogicKind>,
    pub max_omega: usize,
    pub seed: u64,
    pub cases: CaseSelection,
    /// Node bound for random formulas.
    pub max_size: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            logics: LogicKind::ALL.to_vec(),
            max_omega: 3,
            seed: 0,
            cases: CaseSelection::Random(500),
            max_size: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub logic: LogicKind,
    pub omega: usize,
    pub formula: Formula,
    pub engine: Count,
    pub oracle: Count,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub cases: usize,
    pub mismatches: usize,
    pub first_counterexample: Option<Counterexample>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Vocabulary `p`, `q`, ... of the given size.
pub fn standard_vocabulary(size: usize) -> Result<Vocabulary> {
    if size == 0 || size > NAMES.len() {
        return Err(Error::InvalidArgument(format!(
            "vocabulary size must be between 1 and {}",
            NAMES.len()
        )));
    }
    Vocabulary::new(NAMES[..size].iter().copied())
}

/// Compares `count_formula` with enumeration, and checks the complement
/// identity, on every selected case.
pub fn run_check(config: &CheckConfig) -> Result<CheckReport> {
    if config.max_omega > DEFAULT_ORACLE_CAP {
        return Err(Error::OracleCap {
            size: config.max_omega,
            cap: DEFAULT_ORACLE_CAP,
        });
    }
    let mut report = CheckReport {
        cases: 0,
        mismatches: 0,
        first_counterexample: None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for &logic in &config.logics {
        for omega in 1..=config.max_omega {
            let vocab = standard_vocabulary(omega)?;
            let engine = CountEngine::new(logic, vocab.clone())?;
            let total = engine.total();
            let formulas = match config.cases {
                CaseSelection::Random(n) => (0..n)
                    .map(|_| random_formula(&mut rng, &vocab, config.max_size))
                    .collect(),
                CaseSelection::AllSmall => all_formulas(&vocab, ALL_SMALL_SIZE),
            };
            for f in formulas {
                report.cases += 1;
                let got = engine.count_formula(&f)?;
                let want = oracle_count(&f, logic, &vocab)?;
                let complement = engine.count_formula(&!f.clone())?;
                if got != want || &got + complement != total {
                    report.mismatches += 1;
                    if report.first_counterexample.is_none() {
                        report.first_counterexample = Some(Counterexample {
                            logic,
                            omega,
                            formula: f,
                            engine: got,
                            oracle: want,
                        });
                    }
                }
            }
        }
    }
    Ok(report)
}
