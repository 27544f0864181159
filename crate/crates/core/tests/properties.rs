use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::sample::select;

use modal_maxent::asymptotics::dominance_ratio;
use modal_maxent::check::standard_vocabulary;
use modal_maxent::oracle::enumerate_situations;
use modal_maxent::parser::parse_free;
use modal_maxent::{
    count_formula, decompose, eval_situation, limit_ratio, limit_simplify, oracle_count,
    oracle_probability, parse, probability, situation_probability, BasicTerm, CountEngine, Error,
    Formula, KnowledgeBase, LogicKind, SimpleConjunction, Weight,
};

const NAMES: [&str; 3] = ["p", "q", "r"];

fn logic() -> impl Strategy<Value = LogicKind> {
    select(LogicKind::ALL.to_vec())
}

fn leaf(n: usize) -> impl Strategy<Value = Formula> {
    prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        6 => select(NAMES[..n].to_vec()).prop_map(Formula::prop),
    ]
}

fn connect(inner: BoxedStrategy<Formula>) -> BoxedStrategy<Formula> {
    prop_oneof![
        inner.clone().prop_map(|f| !f),
        (inner.clone(), inner.clone()).prop_map(|(a, b)| a & b),
        (inner.clone(), inner.clone()).prop_map(|(a, b)| a | b),
        (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
        (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
    ]
    .boxed()
}

fn propositional(n: usize) -> BoxedStrategy<Formula> {
    leaf(n).prop_recursive(3, 12, 2, connect).boxed()
}

fn depth_one(n: usize) -> BoxedStrategy<Formula> {
    prop_oneof![leaf(n), propositional(n).prop_map(Formula::belief)]
        .prop_recursive(3, 16, 2, connect)
        .boxed()
}

/// Depth-one formulas built from propositional formulas and `B` with `~`
/// and `&` only outside belief.
fn core_syntax(n: usize) -> BoxedStrategy<Formula> {
    prop_oneof![propositional(n), propositional(n).prop_map(Formula::belief)]
        .prop_recursive(4, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|f| !f),
                (inner.clone(), inner).prop_map(|(a, b)| a & b),
            ]
        })
        .boxed()
}

/// Any nesting of `B`.
fn any_depth(n: usize) -> BoxedStrategy<Formula> {
    leaf(n)
        .prop_recursive(4, 16, 2, |inner| {
            prop_oneof![connect(inner.clone()), inner.prop_map(Formula::belief)]
        })
        .boxed()
}

fn sized<F, S>(max: usize, f: F) -> impl Strategy<Value = (usize, S::Value)>
where
    F: Fn(usize) -> S,
    S: Strategy + 'static,
{
    (1..=max).prop_flat_map(move |n| (Just(n), f(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printing_then_parsing_is_identity(f in any_depth(3)) {
        let text = f.to_string();
        prop_assert_eq!(parse_free(&text).or_else(|e| match e {
            // Deeper formulas are rejected after a successful parse.
            Error::NestedBelief { .. } => Ok(f.clone()),
            other => Err(other),
        }).unwrap(), f.clone(), "printed as {}", text);
    }

    #[test]
    fn depth_validation_matches_modal_depth(f in any_depth(2)) {
        prop_assert_eq!(f.validate_depth_one().is_ok(), f.modal_depth() <= 1);
    }

    #[test]
    fn normalization_preserves_meaning((n, f) in sized(3, depth_one), logic in logic()) {
        let v = standard_vocabulary(n).unwrap();
        let g = f.normalize_core();
        if f.is_propositional() {
            prop_assert_eq!(f.truth_table(&v).unwrap(), g.truth_table(&v).unwrap());
        }
        for s in enumerate_situations(logic, &v).unwrap() {
            prop_assert_eq!(eval_situation(&s, &f, &v).unwrap(), eval_situation(&s, &g, &v).unwrap());
        }
    }

    #[test]
    fn engine_matches_enumeration((n, f) in sized(3, depth_one), logic in logic()) {
        let v = standard_vocabulary(n).unwrap();
        let engine = CountEngine::new(logic, v.clone()).unwrap();
        let count = engine.count_formula(&f).unwrap();
        prop_assert_eq!(&count, &oracle_count(&f, logic, &v).unwrap());
        let complement = engine.count_formula(&!f.clone()).unwrap();
        let total = engine.count_basic(&BasicTerm::top()).unwrap();
        prop_assert_eq!(count + complement, total);
    }

    #[test]
    fn decomposition_is_pointwise_exact((n, f) in sized(2, depth_one), logic in logic()) {
        let v = standard_vocabulary(n).unwrap();
        let d = decompose(&f).unwrap();
        // Nested `<->` above beliefs expands to thousands of unmerged terms.
        prop_assume!(d.len() <= 256);
        for s in enumerate_situations(logic, &v).unwrap() {
            let value = d.evaluate_at(&s, &v).unwrap();
            prop_assert!(value == 0 || value == 1);
            prop_assert_eq!(value == 1, eval_situation(&s, &f, &v).unwrap());
        }
    }

    #[test]
    fn decomposition_size_is_bounded((_, f) in sized(3, core_syntax)) {
        let d = decompose(&f).unwrap();
        prop_assert!(d.len() as u128 <= 1u128 << f.size().min(127), "{} terms for {}", d.len(), f);
        prop_assert!(d.terms.iter().all(|(s, _)| *s == 1 || *s == -1));
    }

    #[test]
    fn knowledge_is_veridical((n, phi) in sized(3, propositional)) {
        let v = standard_vocabulary(n).unwrap();
        let f = Formula::belief(phi.clone()) & !phi;
        prop_assert!(count_formula(&f, LogicKind::S5, &v).unwrap().is_zero());
    }

    #[test]
    fn unused_proposition_growth_in_k45((n, phi0) in sized(3, propositional)) {
        let v = standard_vocabulary(n).unwrap();
        let wider = v.extended(1).unwrap();
        let term = BasicTerm::new(phi0, Formula::True);
        let before = CountEngine::new(LogicKind::K45, v).unwrap().count_basic(&term).unwrap();
        let after = CountEngine::new(LogicKind::K45, wider).unwrap().count_basic(&term).unwrap();
        let factor = BigInt::from(2) * (BigInt::one() << (1usize << n));
        prop_assert_eq!(after, before * factor);
    }

    #[test]
    fn probabilities_match_enumeration(
        (n, fs) in sized(2, |n| proptest::collection::vec(depth_one(n), 1..4)),
        weights in proptest::collection::vec(-2.0f64..2.0, 3),
        logic in logic(),
        hard in any::<bool>(),
        query_index in 0usize..3,
    ) {
        let v = standard_vocabulary(n).unwrap();
        let mut kb = KnowledgeBase::new(logic, v.clone());
        for (i, f) in fs.iter().enumerate() {
            let w = if hard && i == 0 { Weight::Hard } else { Weight::Finite(weights[i]) };
            kb.push(w, f.clone()).unwrap();
        }
        let query = fs[query_index % fs.len()].clone() | Formula::belief(Formula::prop("p"));
        match probability(&kb, &query) {
            Ok(r) => {
                let oracle = oracle_probability(&kb, &query).unwrap();
                prop_assert!((r.probability - oracle).abs() <= 1e-9, "{} vs {}", r.probability, oracle);
                prop_assert_eq!(probability(&kb, &Formula::True).unwrap().probability, 1.0);
                let total: f64 = enumerate_situations(logic, &v)
                    .unwrap()
                    .map(|s| situation_probability(&kb, &s).unwrap())
                    .sum();
                prop_assert!((total - 1.0).abs() <= 1e-12, "Σ Pr(σ) = {}", total);
            }
            Err(Error::InconsistentHardConstraints) => {
                prop_assert!(oracle_count(&fs[0], logic, &v).unwrap().is_zero());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn simplified_limit_dominates(
        (n, (phi0, psi, negs)) in sized(2, |n| (
            propositional(n),
            propositional(n),
            proptest::collection::vec(propositional(n), 0..3),
        )),
        logic in logic(),
    ) {
        let _ = n;
        let c = SimpleConjunction::new(phi0, psi, negs);
        match limit_simplify(&c, logic) {
            Ok(t) => {
                prop_assert_eq!(&t.phi0, &c.phi0);
                prop_assert_eq!(&t.psi, &c.psi);
                let ratios: Vec<_> = (0..4).map(|k| dominance_ratio(&c, logic, k).unwrap()).collect();
                prop_assert!(ratios.iter().all(|r| *r >= num_rational::BigRational::one()));
                prop_assert!(ratios.windows(2).all(|w| w[1] <= w[0]), "{:?}", ratios);
                if !ratios[0].is_one() {
                    prop_assert!(ratios[3] < ratios[0]);
                }
            }
            Err(Error::InconsistentConjunction(_)) => {
                let v = modal_maxent::asymptotics::support_vocabulary(&c, &[]).unwrap();
                prop_assert!(count_formula(&c.to_formula(), logic, &v).unwrap().is_zero());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}

#[test]
fn believing_a_contradiction() {
    let v = standard_vocabulary(1).unwrap();
    let f = parse("B false", &v).unwrap();
    let expected = [
        (LogicKind::K45, 0.25),
        (LogicKind::KD45, 0.0),
        (LogicKind::S5, 0.0),
    ];
    for (logic, want) in expected {
        let kb = KnowledgeBase::new(logic, v.clone());
        assert_eq!(probability(&kb, &f).unwrap().probability, want, "{logic}");
    }
    for n in 1..=3 {
        let v = standard_vocabulary(n).unwrap();
        assert_eq!(
            oracle_count(&Formula::belief(Formula::False), LogicKind::K45, &v).unwrap(),
            BigInt::one() << n
        );
    }
}

#[test]
fn limit_examples() {
    let t = |s: &str| parse_free(s).unwrap();
    let c = SimpleConjunction::new(Formula::True, Formula::True, vec![]);
    assert_eq!(limit_ratio(&c, &t("p"), LogicKind::K45).unwrap().value, 0);
    let c = SimpleConjunction::new(Formula::True, t("p & q"), vec![]);
    for logic in LogicKind::ALL {
        assert_eq!(limit_ratio(&c, &t("q"), logic).unwrap().value, 1);
    }
    let c = SimpleConjunction::new(Formula::True, t("p"), vec![t("p")]);
    assert!(matches!(
        limit_ratio(&c, &t("q"), LogicKind::K45),
        Err(Error::InconsistentConjunction(_))
    ));
}

#[test]
fn dual_objective_is_midpoint_convex() {
    use modal_maxent::generate::random_formula;
    use modal_maxent::{objective_and_gradient, Constraint};
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let n = rng.gen_range(1..=2);
        let logic = LogicKind::ALL[rng.gen_range(0..3)];
        let v = standard_vocabulary(n).unwrap();
        let k = rng.gen_range(1..=4);
        let cs: Vec<Constraint> = (0..k)
            .map(|_| Constraint::new(random_formula(&mut rng, &v, 8), rng.gen_range(0.05..0.95)))
            .collect();
        let mut point = || -> Vec<f64> { (0..k).map(|_| rng.gen_range(-4.0..4.0)).collect() };
        let (a, b) = (point(), point());
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x + y) / 2.0).collect();
        let f = |w: &[f64]| objective_and_gradient(w, &cs, logic, &v).unwrap().0;
        let (fa, fb, fm) = (f(&a), f(&b), f(&mid));
        assert!(
            fm <= (fa + fb) / 2.0 + 1e-10,
            "f(mid) = {fm}, ends {fa}, {fb}"
        );
    }
}
