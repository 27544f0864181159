//! Behaviour of belief counts as fresh propositions are added to Ω.
//!
//! For a consistent simple conjunction `C = φ₀ ∧ Bψ ∧ ⋀¬Bφᵢ` and a
//! propositional `β` with `C ∧ Bβ` consistent, the ratio
//! `N(Bβ ∧ C) / N(C)` tends to 1 when `ψ ⊨ β` and to 0 otherwise, and the
//! `¬Bφᵢ` conjuncts stop mattering in the limit.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::engine::{BasicTerm, CountEngine, SimpleConjunction};
use crate::error::{Error, Result};
use crate::formula::{Formula, LogicKind};
use crate::inference::{probability, KnowledgeBase};
use crate::vocabulary::Vocabulary;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitVerdict {
    /// 0 or 1.
    pub value: u8,
    /// Whether `ψ ⊨ β` held; this alone decides `value`.
    pub entailed: bool,
}

impl fmt::Display for LimitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entailed {
            write!(f, "1 (psi entails beta)")
        } else {
            write!(f, "0 (psi does not entail beta)")
        }
    }
}

/// The propositions of `c` and `extra`, or a single placeholder when there
/// are none.
pub fn support_vocabulary(c: &SimpleConjunction, extra: &[&Formula]) -> Result<Vocabulary> {
    let mut props = c.props();
    for f in extra {
        f.collect_props(&mut props);
    }
    if props.is_empty() {
        props.push("x0".into());
    }
    Vocabulary::new(props)
}

fn require_consistent(engine: &CountEngine, c: &SimpleConjunction, what: &str) -> Result<()> {
    if engine.count_simple(c)?.is_zero() {
        return Err(Error::InconsistentConjunction(format!(
            "{what} `{}` has no {} situation",
            c.to_formula(),
            engine.logic()
        )));
    }
    Ok(())
}

fn with_belief(c: &SimpleConjunction, beta: &Formula) -> SimpleConjunction {
    SimpleConjunction::new(
        c.phi0.clone(),
        Formula::and_simplified(c.psi.clone(), beta.clone()),
        c.negs.clone(),
    )
}

/// lim N(Bβ ∧ C) / N(C) as |Ω| → ∞.
pub fn limit_ratio(
    c: &SimpleConjunction,
    beta: &Formula,
    logic: LogicKind,
) -> Result<LimitVerdict> {
    if !beta.is_propositional() {
        return Err(Error::NotPropositional);
    }
    let vocab = support_vocabulary(c, &[beta])?;
    let engine = CountEngine::new(logic, vocab.clone())?;
    require_consistent(&engine, c, "C")?;
    require_consistent(&engine, &with_belief(c, beta), "C & B(beta)")?;
    // Entailment does not depend on unused propositions, so the support suffices.
    let entailed = c
        .psi
        .truth_table(&vocab)?
        .entails(&beta.truth_table(&vocab)?);
    Ok(LimitVerdict {
        value: u8::from(entailed),
        entailed,
    })
}

/// Drops the `¬Bφᵢ` conjuncts, which are negligible in the limit.
pub fn limit_simplify(c: &SimpleConjunction, logic: LogicKind) -> Result<BasicTerm> {
    let vocab = support_vocabulary(c, &[])?;
    let engine = CountEngine::new(logic, vocab)?;
    require_consistent(&engine, c, "C")?;
    Ok(BasicTerm::new(c.phi0.clone(), c.psi.clone()))
}

/// Exact `N(Bβ ∧ C) / N(C)` with `extra` fresh propositions beyond the support.
pub fn finite_ratio(
    c: &SimpleConjunction,
    beta: &Formula,
    logic: LogicKind,
    extra: usize,
) -> Result<BigRational> {
    let vocab = support_vocabulary(c, &[beta])?.extended(extra)?;
    let engine = CountEngine::new(logic, vocab)?;
    ratio(
        engine.count_simple(&with_belief(c, beta))?,
        engine.count_simple(c)?,
    )
}

/// Exact `N(φ₀ ∧ Bψ) / N(C)` with `extra` fresh propositions beyond the support.
pub fn dominance_ratio(
    c: &SimpleConjunction,
    logic: LogicKind,
    extra: usize,
) -> Result<BigRational> {
    let vocab = support_vocabulary(c, &[])?.extended(extra)?;
    let engine = CountEngine::new(logic, vocab)?;
    ratio(
        engine.count_basic(&BasicTerm::new(c.phi0.clone(), c.psi.clone()))?,
        engine.count_simple(c)?,
    )
}

fn ratio(num: BigInt, den: BigInt) -> Result<BigRational> {
    if den.is_zero() {
        return Err(Error::InconsistentConjunction(
            "the conjunction has no situations, so the ratio is undefined".into(),
        ));
    }
    Ok(BigRational::new(num, den))
}

/// Exact `Pr(query)` under `kb` as Ω grows to each of `sizes` propositions;
/// the extra propositions are fresh and unused.
pub fn trend(kb: &KnowledgeBase, query: &Formula, sizes: &[usize]) -> Result<Vec<f64>> {
    let base = kb.vocabulary();
    sizes
        .par_iter()
        .map(|&n| {
            if n < base.len() {
                return Err(Error::InvalidArgument(format!(
                    "size {n} is smaller than the base vocabulary ({} propositions)",
                    base.len()
                )));
            }
            let grown = kb.with_vocabulary(base.extended(n - base.len())?)?;
            Ok(probability(&grown, query)?.probability)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_free;

    fn f(text: &str) -> Formula {
        parse_free(text).unwrap()
    }

    fn simple(phi0: &str, psi: &str, negs: &[&str]) -> SimpleConjunction {
        SimpleConjunction::new(f(phi0), f(psi), negs.iter().map(|n| f(n)).collect())
    }

    #[test]
    fn verdicts() {
        for logic in LogicKind::ALL {
            let v = limit_ratio(&simple("true", "true", &[]), &f("p"), logic).unwrap();
            assert_eq!(v.value, 0);
            let v = limit_ratio(&simple("p", "p & q", &[]), &f("q"), logic).unwrap();
            assert_eq!(v.value, 1);
            assert!(matches!(
                limit_ratio(&simple("true", "p", &["p"]), &f("q"), logic),
                Err(Error::InconsistentConjunction(_))
            ));
        }
    }

    #[test]
    fn simplify_drops_negated_beliefs() {
        let c = simple("p -> q", "p | q", &["p", "q"]);
        assert_eq!(
            limit_simplify(&c, LogicKind::S5).unwrap(),
            BasicTerm::new(f("p -> q"), f("p | q"))
        );
        assert_eq!(
            limit_simplify(&simple("true", "true", &["p"]), LogicKind::K45).unwrap(),
            BasicTerm::top()
        );
        assert_eq!(
            limit_simplify(&simple("p", "p", &[]), LogicKind::KD45).unwrap(),
            BasicTerm::new(f("p"), f("p"))
        );
        assert!(limit_simplify(&simple("true", "p", &["p"]), LogicKind::K45).is_err());
    }

    #[test]
    fn trends() {
        let v = Vocabulary::new(["p"]).unwrap();
        let k45 = KnowledgeBase::new(LogicKind::K45, v.clone());
        let got = trend(&k45, &f("Bp"), &[1, 2, 3]).unwrap();
        for (g, w) in got.iter().zip([0.5, 0.25, 0.0625]) {
            assert!((g - w).abs() < 1e-15, "{got:?}");
        }
        for logic in LogicKind::ALL {
            let kb = KnowledgeBase::new(logic, v.clone());
            for p in trend(&kb, &f("p"), &[1, 2, 3]).unwrap() {
                assert!((p - 0.5).abs() < 1e-15);
            }
        }
        let s5 = KnowledgeBase::new(LogicKind::S5, v);
        assert_eq!(
            trend(&s5, &f("B(p | ~p)"), &[1, 2]).unwrap(),
            vec![1.0, 1.0]
        );
        assert!(trend(&s5, &f("p"), &[0]).is_err());
    }

    #[test]
    fn entailed_ratio_is_one_at_every_size() {
        let c = simple("p", "p & q", &["r"]);
        for extra in 0..3 {
            let r = finite_ratio(&c, &f("q"), LogicKind::K45, extra).unwrap();
            assert_eq!(r, BigRational::from_integer(1.into()));
        }
    }
}
