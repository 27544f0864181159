//! Counting situations without enumerating them.
//!
//! A depth-one formula's indicator is rewritten as a signed sum of indicators
//! of basic terms `φ₀ ∧ Bψ`, and each basic term is counted in closed form
//! from the model counts of its propositional parts:
//!
//! | logic | N(φ₀ ∧ Bψ)                    |
//! |-------|-------------------------------|
//! | K45   | c(φ₀) · 2^c(ψ)                |
//! | KD45  | c(φ₀) · (2^c(ψ) − 1)          |
//! | S5    | c(φ₀ ∧ ψ) · 2^(c(ψ) − 1)      |
//!
//! `φ₀ = true` and `ψ = true` recover the rows for plain `Bψ` and plain `φ₀`.

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;
use std::sync::RwLock;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::counter::Count;
use crate::error::{Error, Result};
use crate::formula::{Formula, LogicKind};
use crate::oracle::{eval_situation, Situation};
use crate::truth_table::TruthTable;
use crate::vocabulary::Vocabulary;

/// `φ₀ ∧ Bψ` with both parts propositional. `ψ = true` stands for plain `φ₀`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasicTerm {
    pub phi0: Formula,
    pub psi: Formula,
}

impl BasicTerm {
    pub fn new(phi0: Formula, psi: Formula) -> Self {
        BasicTerm { phi0, psi }
    }

    pub fn top() -> Self {
        BasicTerm::new(Formula::True, Formula::True)
    }

    pub fn to_formula(&self) -> Formula {
        match (&self.phi0, &self.psi) {
            (_, Formula::True) => self.phi0.clone(),
            (Formula::True, _) => Formula::belief(self.psi.clone()),
            _ => self.phi0.clone() & Formula::belief(self.psi.clone()),
        }
    }

    fn check(&self) -> Result<()> {
        if self.phi0.is_propositional() && self.psi.is_propositional() {
            Ok(())
        } else {
            Err(Error::NotPropositional)
        }
    }
}

/// `φ₀ ∧ Bψ ∧ ¬Bφ₁ ∧ … ∧ ¬Bφₖ` with every part propositional.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleConjunction {
    pub phi0: Formula,
    pub psi: Formula,
    pub negs: Vec<Formula>,
}

impl SimpleConjunction {
    pub fn new(phi0: Formula, psi: Formula, negs: Vec<Formula>) -> Self {
        SimpleConjunction { phi0, psi, negs }
    }

    pub fn to_formula(&self) -> Formula {
        let mut parts = vec![self.phi0.clone(), Formula::belief(self.psi.clone())];
        parts.extend(self.negs.iter().map(|n| !Formula::belief(n.clone())));
        Formula::conjoin(parts)
    }

    /// Propositions of all parts, in order of first occurrence.
    pub fn props(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.phi0.collect_props(&mut out);
        self.psi.collect_props(&mut out);
        for n in &self.negs {
            n.collect_props(&mut out);
        }
        out
    }

    fn check(&self) -> Result<()> {
        let ok = self.phi0.is_propositional()
            && self.psi.is_propositional()
            && self.negs.iter().all(Formula::is_propositional);
        if ok {
            Ok(())
        } else {
            Err(Error::NotPropositional)
        }
    }
}

/// A formula's indicator as `Σ signᵢ · 𝟙[termᵢ]`, signs ±1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedDecomposition {
    pub terms: Vec<(i32, BasicTerm)>,
}

impl SignedDecomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ signᵢ · 𝟙[termᵢ](s)` evaluated by Kripke semantics.
    pub fn evaluate_at(&self, s: &Situation, vocab: &Vocabulary) -> Result<i64> {
        let mut total = 0i64;
        for (sign, term) in &self.terms {
            if eval_situation(s, &term.to_formula(), vocab)? {
                total += i64::from(*sign);
            }
        }
        Ok(total)
    }
}

/// The structural induction over `¬`/`∧`, shared by the syntactic
/// decomposition and the truth-table form used for counting.
trait TermAlgebra {
    type Term: Clone;

    fn top(&self) -> Self::Term;
    fn propositional(&self, f: &Formula) -> Result<Self::Term>;
    fn belief(&self, body: &Formula) -> Result<Self::Term>;
    fn meet(&self, a: &Self::Term, b: &Self::Term) -> Self::Term;
    /// Post-processing of every intermediate sum (compaction, pruning).
    fn finish(&self, terms: Vec<(i128, Self::Term)>) -> Vec<(i128, Self::Term)>;

    fn product(
        &self,
        a: &[(i128, Self::Term)],
        b: &[(i128, Self::Term)],
    ) -> Vec<(i128, Self::Term)> {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for (ca, ta) in a {
            for (cb, tb) in b {
                out.push((ca * cb, self.meet(ta, tb)));
            }
        }
        self.finish(out)
    }

    fn complement(&self, a: &[(i128, Self::Term)]) -> Vec<(i128, Self::Term)> {
        let mut out = Vec::with_capacity(a.len() + 1);
        out.push((1, self.top()));
        out.extend(a.iter().map(|(c, t)| (-c, t.clone())));
        self.finish(out)
    }

    /// Propositional subformulas become single terms; connectives above
    /// them are rewritten into `¬` and `∧` on the way down.
    fn expand(&self, f: &Formula) -> Result<Vec<(i128, Self::Term)>> {
        if f.is_propositional() {
            return Ok(self.finish(vec![(1, self.propositional(f)?)]));
        }
        match f {
            Formula::Belief(body) => Ok(self.finish(vec![(1, self.belief(body)?)])),
            Formula::Not(a) => Ok(self.complement(&self.expand(a)?)),
            Formula::And(a, b) => Ok(self.product(&self.expand(a)?, &self.expand(b)?)),
            Formula::Or(..) | Formula::Implies(..) | Formula::Iff(..) => {
                self.expand(&f.normalize_core())
            }
            Formula::True | Formula::False | Formula::Prop(_) => unreachable!("propositional"),
        }
    }
}

struct SyntacticAlgebra;

impl TermAlgebra for SyntacticAlgebra {
    type Term = BasicTerm;

    fn top(&self) -> BasicTerm {
        BasicTerm::top()
    }

    fn propositional(&self, f: &Formula) -> Result<BasicTerm> {
        Ok(BasicTerm::new(f.clone(), Formula::True))
    }

    fn belief(&self, body: &Formula) -> Result<BasicTerm> {
        Ok(BasicTerm::new(Formula::True, body.clone()))
    }

    // Bψ₁ ∧ Bψ₂ = B(ψ₁ ∧ ψ₂)
    fn meet(&self, a: &BasicTerm, b: &BasicTerm) -> BasicTerm {
        BasicTerm::new(
            Formula::and_simplified(a.phi0.clone(), b.phi0.clone()),
            Formula::and_simplified(a.psi.clone(), b.psi.clone()),
        )
    }

    fn finish(&self, terms: Vec<(i128, BasicTerm)>) -> Vec<(i128, BasicTerm)> {
        terms
    }
}

/// Signed decomposition of a depth-one formula into basic terms. The result
/// does not depend on the logic; terms are not merged, so every sign is ±1
/// and the term count is at most 2^|F| for a formula `F` in the core syntax.
pub fn decompose(f: &Formula) -> Result<SignedDecomposition> {
    f.validate_depth_one()?;
    let terms = SyntacticAlgebra.expand(f)?;
    Ok(SignedDecomposition {
        terms: terms
            .into_iter()
            .map(|(c, t)| (i32::try_from(c).expect("unmerged signs are ±1"), t))
            .collect(),
    })
}

/// A basic term identified by the truth tables of its two parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    pub phi0: TruthTable,
    pub psi: TruthTable,
}

/// A compacted signed sum of basic terms keyed by truth tables. Coefficients
/// are arbitrary nonzero integers after merging.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSum {
    terms: Vec<(i128, TermKey)>,
}

impl TermSum {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(i128, TermKey)] {
        &self.terms
    }
}

/// Closed-form situation count of a basic term from the model
/// counts `c(φ₀)`, `c(ψ)` and `c(φ₀ ∧ ψ)`.
pub fn basic_count_from_models(logic: LogicKind, c_phi0: u64, c_psi: u64, c_both: u64) -> Count {
    let pow = |e: u64| Count::one() << e;
    match logic {
        LogicKind::K45 => Count::from(c_phi0) << c_psi,
        LogicKind::KD45 => Count::from(c_phi0) * (pow(c_psi) - 1u32),
        // B(false) is unsatisfiable in S5: no possible set can contain the real world.
        LogicKind::S5 if c_psi == 0 => Count::zero(),
        LogicKind::S5 => Count::from(c_both) << (c_psi - 1),
    }
}

struct TableAlgebra<'a> {
    logic: LogicKind,
    vocab: &'a Vocabulary,
}

impl TableAlgebra<'_> {
    fn vars(&self) -> u32 {
        self.vocab.len() as u32
    }

    /// Zero-count terms stay zero under every further meet, so they can be
    /// dropped as soon as they appear.
    fn is_dead(&self, k: &TermKey) -> bool {
        match self.logic {
            LogicKind::K45 => k.phi0.is_unsat(),
            LogicKind::KD45 => k.phi0.is_unsat() || k.psi.is_unsat(),
            LogicKind::S5 => k.phi0.and(&k.psi).is_unsat(),
        }
    }
}

impl TermAlgebra for TableAlgebra<'_> {
    type Term = TermKey;

    fn top(&self) -> TermKey {
        let t = TruthTable::constant(self.vars(), true);
        TermKey {
            phi0: t.clone(),
            psi: t,
        }
    }

    fn propositional(&self, f: &Formula) -> Result<TermKey> {
        Ok(TermKey {
            phi0: f.truth_table(self.vocab)?,
            psi: TruthTable::constant(self.vars(), true),
        })
    }

    fn belief(&self, body: &Formula) -> Result<TermKey> {
        Ok(TermKey {
            phi0: TruthTable::constant(self.vars(), true),
            psi: body.truth_table(self.vocab)?,
        })
    }

    fn meet(&self, a: &TermKey, b: &TermKey) -> TermKey {
        TermKey {
            phi0: a.phi0.and(&b.phi0),
            psi: a.psi.and(&b.psi),
        }
    }

    fn finish(&self, terms: Vec<(i128, TermKey)>) -> Vec<(i128, TermKey)> {
        let mut merged: BTreeMap<TermKey, i128> = BTreeMap::new();
        for (c, k) in terms {
            if self.is_dead(&k) {
                continue;
            }
            *merged.entry(k).or_insert(0) += c;
        }
        merged
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(k, c)| (c, k))
            .collect()
    }
}

/// Exact situation counting for one logic over one vocabulary, with a memo
/// of basic-term counts keyed by truth tables.
pub struct CountEngine {
    logic: LogicKind,
    vocab: Vocabulary,
    memo: RwLock<HashMap<TermKey, Count>>,
}

impl CountEngine {
    pub fn new(logic: LogicKind, vocab: Vocabulary) -> Result<Self> {
        if vocab.len() > vocab.cap() {
            return Err(Error::VocabularyCap {
                size: vocab.len(),
                cap: vocab.cap(),
            });
        }
        Ok(CountEngine {
            logic,
            vocab,
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn logic(&self) -> LogicKind {
        self.logic
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    fn algebra(&self) -> TableAlgebra<'_> {
        TableAlgebra {
            logic: self.logic,
            vocab: &self.vocab,
        }
    }

    /// N(true), the number of situations.
    pub fn total(&self) -> Count {
        let t = TruthTable::constant(self.vocab.len() as u32, true);
        self.count_key(&TermKey {
            phi0: t.clone(),
            psi: t,
        })
    }

    pub fn count_key(&self, key: &TermKey) -> Count {
        if let Some(n) = self.memo.read().expect("memo lock").get(key) {
            return n.clone();
        }
        let n = basic_count_from_models(
            self.logic,
            key.phi0.count_ones(),
            key.psi.count_ones(),
            key.phi0.and(&key.psi).count_ones(),
        );
        self.memo
            .write()
            .expect("memo lock")
            .entry(key.clone())
            .or_insert(n)
            .clone()
    }

    fn key(&self, phi0: &Formula, psi: &Formula) -> Result<TermKey> {
        Ok(TermKey {
            phi0: phi0.truth_table(&self.vocab)?,
            psi: psi.truth_table(&self.vocab)?,
        })
    }

    /// N(φ₀ ∧ Bψ) by the closed forms.
    pub fn count_basic(&self, t: &BasicTerm) -> Result<Count> {
        t.check()?;
        Ok(self.count_key(&self.key(&t.phi0, &t.psi)?))
    }

    /// N(φ₀ ∧ Bψ ∧ ⋀¬Bφᵢ) by inclusion-exclusion over subsets of the negated
    /// beliefs: Σ_S (−1)^|S| N(φ₀ ∧ B(ψ ∧ ⋀_{i∈S} φᵢ)).
    pub fn count_simple(&self, c: &SimpleConjunction) -> Result<Count> {
        c.check()?;
        if c.negs.len() >= 32 {
            return Err(Error::InvalidArgument(format!(
                "{} negated beliefs is too many for inclusion-exclusion",
                c.negs.len()
            )));
        }
        let base = self.key(&c.phi0, &c.psi)?;
        let negs = c
            .negs
            .iter()
            .map(|n| n.truth_table(&self.vocab))
            .collect::<Result<Vec<_>>>()?;
        let mut total = Count::zero();
        for subset in 0u64..(1u64 << negs.len()) {
            let mut psi = base.psi.clone();
            for (i, n) in negs.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    psi = psi.and(n);
                }
            }
            let n = self.count_key(&TermKey {
                phi0: base.phi0.clone(),
                psi,
            });
            if subset.count_ones() % 2 == 0 {
                total += n;
            } else {
                total -= n;
            }
        }
        assert!(total >= Count::zero(), "negative count for {c:?}");
        Ok(total)
    }

    /// Compacted decomposition of a depth-one formula over this vocabulary.
    pub fn term_sum(&self, f: &Formula) -> Result<TermSum> {
        f.check_vocabulary(&self.vocab)?;
        f.validate_depth_one()?;
        Ok(TermSum {
            terms: self.algebra().expand(f)?,
        })
    }

    /// The decomposition of `true`.
    pub fn unit(&self) -> TermSum {
        let alg = self.algebra();
        TermSum {
            terms: alg.finish(vec![(1, alg.top())]),
        }
    }

    /// Decomposition of the conjunction of two formulas.
    pub fn conjoin(&self, a: &TermSum, b: &TermSum) -> TermSum {
        TermSum {
            terms: self.algebra().product(&a.terms, &b.terms),
        }
    }

    /// Decomposition of the negation of a formula.
    pub fn negate(&self, a: &TermSum) -> TermSum {
        TermSum {
            terms: self.algebra().complement(&a.terms),
        }
    }

    /// Σ coefficientᵢ · N(termᵢ).
    pub fn count_sum(&self, d: &TermSum) -> Count {
        let n: Count = if d.terms.len() > 64 {
            d.terms
                .par_iter()
                .map(|(c, k)| Count::from(*c) * self.count_key(k))
                .sum()
        } else {
            d.terms
                .iter()
                .map(|(c, k)| Count::from(*c) * self.count_key(k))
                .sum()
        };
        assert!(n >= Count::zero(), "negative situation count");
        n
    }

    /// N(F) for any depth-one formula.
    pub fn count_formula(&self, f: &Formula) -> Result<Count> {
        let n = self.count_sum(&self.term_sum(f)?);
        assert!(n <= self.total(), "count exceeds the number of situations");
        Ok(n)
    }
}

/// N(F) with a fresh engine.
pub fn count_formula(f: &Formula, logic: LogicKind, vocab: &Vocabulary) -> Result<Count> {
    CountEngine::new(logic, vocab.clone())?.count_formula(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{enumerate_situations, oracle_count};
    use crate::parser::parse;

    fn vocab(props: &[&str]) -> Vocabulary {
        Vocabulary::new(props.iter().copied()).unwrap()
    }

    fn f(text: &str) -> Formula {
        crate::parser::parse_free(text).unwrap()
    }

    fn basic(phi0: &str, psi: &str) -> BasicTerm {
        BasicTerm::new(f(phi0), f(psi))
    }

    #[test]
    fn decompose_negated_belief() {
        let d = decompose(&f("~Bp")).unwrap();
        assert_eq!(
            d.terms,
            vec![(1, basic("true", "true")), (-1, basic("true", "p"))]
        );
    }

    #[test]
    fn decompose_belief_and_negated_belief() {
        let d = decompose(&f("Bp & ~Bq")).unwrap();
        assert_eq!(
            d.terms,
            vec![(1, basic("true", "p")), (-1, basic("true", "p & q"))]
        );
        let v = vocab(&["p", "q", "r"]);
        for logic in LogicKind::ALL {
            for s in enumerate_situations(logic, &v).unwrap() {
                let want = i64::from(eval_situation(&s, &f("Bp & ~Bq"), &v).unwrap());
                assert_eq!(d.evaluate_at(&s, &v).unwrap(), want);
            }
        }
    }

    #[test]
    fn decompose_propositional_and_negated_belief() {
        let d = decompose(&f("(p -> q) & ~Bp")).unwrap();
        assert_eq!(
            d.terms,
            vec![(1, basic("p -> q", "true")), (-1, basic("p -> q", "p"))]
        );
        let v = vocab(&["p", "q"]);
        for s in enumerate_situations(LogicKind::S5, &v).unwrap() {
            let want = i64::from(eval_situation(&s, &f("(p -> q) & ~Bp"), &v).unwrap());
            assert_eq!(d.evaluate_at(&s, &v).unwrap(), want);
        }
    }

    #[test]
    fn decompose_rejects_nesting() {
        let nested = Formula::belief(Formula::belief(Formula::prop("p")));
        assert!(matches!(
            decompose(&nested),
            Err(Error::NestedBelief { .. })
        ));
    }

    #[test]
    fn table_one_examples() {
        let two = CountEngine::new(LogicKind::K45, vocab(&["p", "q"])).unwrap();
        assert_eq!(two.count_basic(&BasicTerm::top()).unwrap(), Count::from(64));

        let s5 = CountEngine::new(LogicKind::S5, vocab(&["p", "q"])).unwrap();
        assert_eq!(
            s5.count_basic(&basic("p -> q", "p | q")).unwrap(),
            Count::from(8)
        );

        let kd45 = CountEngine::new(LogicKind::KD45, vocab(&["p"])).unwrap();
        assert_eq!(
            kd45.count_basic(&basic("true", "false")).unwrap(),
            Count::from(0)
        );
    }

    #[test]
    fn s5_empty_belief_body_counts_zero() {
        let e = CountEngine::new(LogicKind::S5, vocab(&["p"])).unwrap();
        assert_eq!(
            e.count_basic(&basic("true", "false")).unwrap(),
            Count::from(0)
        );
        assert_eq!(e.count_formula(&f("B false")).unwrap(), Count::from(0));
    }

    #[test]
    fn simple_conjunction_examples() {
        let s5 = CountEngine::new(LogicKind::S5, vocab(&["p", "q"])).unwrap();
        let c = SimpleConjunction::new(f("p -> q"), f("p | q"), vec![f("p"), f("q")]);
        assert_eq!(s5.count_simple(&c).unwrap(), Count::from(3));

        let k45 = CountEngine::new(LogicKind::K45, vocab(&["p"])).unwrap();
        let top = SimpleConjunction::new(Formula::True, Formula::True, vec![]);
        assert_eq!(k45.count_simple(&top).unwrap(), Count::from(8));

        for logic in LogicKind::ALL {
            let e = CountEngine::new(logic, vocab(&["p"])).unwrap();
            let contradiction = SimpleConjunction::new(Formula::True, f("p"), vec![f("p")]);
            assert_eq!(e.count_simple(&contradiction).unwrap(), Count::from(0));
        }
    }

    #[test]
    fn formula_examples() {
        let v = vocab(&["p", "q"]);
        let s5 = CountEngine::new(LogicKind::S5, v.clone()).unwrap();
        let example_one = parse("(p -> q) & B(p | q) & ~Bp & ~Bq", &v).unwrap();
        assert_eq!(s5.count_formula(&example_one).unwrap(), Count::from(3));
        let g = parse("(p -> q) & ~Bp", &v).unwrap();
        assert_eq!(s5.count_formula(&g).unwrap(), Count::from(22));
        let example_two = parse("((p -> q) | Bp) & (p | B(p | q))", &v).unwrap();
        assert_eq!(
            s5.count_formula(&example_two).unwrap(),
            oracle_count(&example_two, LogicKind::S5, &v).unwrap()
        );
    }

    #[test]
    fn complement_rule() {
        let v = vocab(&["p", "q"]);
        for logic in LogicKind::ALL {
            let e = CountEngine::new(logic, v.clone()).unwrap();
            let g = parse("B(p | q) -> (q & ~Bp)", &v).unwrap();
            assert_eq!(
                e.count_formula(&g).unwrap() + e.count_formula(&!g).unwrap(),
                e.total()
            );
        }
    }

    #[test]
    fn unknown_proposition_is_reported() {
        let e = CountEngine::new(LogicKind::K45, vocab(&["p"])).unwrap();
        assert_eq!(
            e.count_formula(&f("Bz")),
            Err(Error::UnknownProposition("z".into()))
        );
    }
}
