//! Exact propositional model counting over a declared vocabulary.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::vocabulary::Vocabulary;

/// Exact situation and model counts. Signed so inclusion-exclusion partial
/// sums can go negative; every count returned to callers is non-negative.
pub type Count = BigInt;

/// c(φ): the number of assignments to all of `vocab` that satisfy `f`,
/// including propositions that do not occur in `f`.
pub fn model_count(f: &Formula, vocab: &Vocabulary) -> Result<Count> {
    if vocab.len() > vocab.cap() {
        return Err(Error::VocabularyCap {
            size: vocab.len(),
            cap: vocab.cap(),
        });
    }
    Ok(Count::from(f.truth_table(vocab)?.count_ones()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;
    use proptest::prelude::*;

    fn count(text: &str, props: &[&str]) -> Count {
        let v = Vocabulary::new(props.iter().copied()).unwrap();
        model_count(&parse(text, &v).unwrap(), &v).unwrap()
    }

    #[test]
    fn small_counts() {
        assert_eq!(count("p | q", &["p", "q"]), Count::from(3));
        assert_eq!(count("true", &["p", "q"]), Count::from(4));
        assert_eq!(count("p", &["p", "q", "r"]), Count::from(4));
        assert_eq!(count("p & ~p", &["p"]), Count::from(0));
    }

    #[test]
    fn rejects_modal_input() {
        let v = Vocabulary::new(["p"]).unwrap();
        assert_eq!(
            model_count(&Formula::belief(Formula::prop("p")), &v),
            Err(Error::NotPropositional)
        );
    }

    fn prop_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::True),
            Just(Formula::False),
            Just(Formula::prop("p")),
            Just(Formula::prop("q")),
            Just(Formula::prop("r")),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|a| !a),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a & b),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a | b),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
            ]
        })
    }

    proptest! {
        #[test]
        fn complement_and_split(f in prop_formula(), g in prop_formula()) {
            let v = Vocabulary::new(["p", "q", "r"]).unwrap();
            let total = Count::from(8);
            let cf = model_count(&f, &v).unwrap();
            prop_assert!(cf >= Count::from(0) && cf <= total);
            prop_assert_eq!(&cf + model_count(&!f.clone(), &v).unwrap(), total);
            let split = model_count(&(f.clone() & g.clone()), &v).unwrap()
                + model_count(&(f.clone() & !g), &v).unwrap();
            prop_assert_eq!(split, cf);
        }

        #[test]
        fn unused_propositions_scale_by_powers_of_two(f in prop_formula(), k in 0usize..4) {
            let v = Vocabulary::new(["p", "q", "r"]).unwrap();
            let w = v.extended(k).unwrap();
            prop_assert_eq!(
                model_count(&f, &w).unwrap(),
                model_count(&f, &v).unwrap() << k
            );
        }
    }
}
