//! Formula and knowledge-base generators for cross-validation.

use rand::Rng;

use crate::formula::{Formula, LogicKind};
use crate::inference::{KnowledgeBase, Weight};
use crate::vocabulary::Vocabulary;

fn leaf<R: Rng + ?Sized>(rng: &mut R, props: &[String]) -> Formula {
    match rng.gen_range(0..10) {
        0 => Formula::True,
        1 => Formula::False,
        _ => Formula::Prop(props[rng.gen_range(0..props.len())].clone()),
    }
}

fn random_with<R: Rng + ?Sized>(
    rng: &mut R,
    props: &[String],
    budget: usize,
    modal: bool,
) -> Formula {
    if budget <= 1 || rng.gen_bool(0.15) {
        return leaf(rng, props);
    }
    let rest = budget - 1;
    let choice = rng.gen_range(0..if modal { 8 } else { 6 });
    match choice {
        0 => !random_with(rng, props, rest, modal),
        1..=4 if rest >= 2 => {
            let left = rng.gen_range(1..rest);
            let a = random_with(rng, props, left, modal);
            let b = random_with(rng, props, rest - left, modal);
            match choice {
                1 => a & b,
                2 => a | b,
                3 => Formula::implies(a, b),
                _ => Formula::iff(a, b),
            }
        }
        1..=5 => !random_with(rng, props, rest, modal),
        _ => Formula::belief(random_with(rng, props, rest, false)),
    }
}

/// A depth-one formula with at most `max_size` nodes over `vocab`.
pub fn random_formula<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &Vocabulary,
    max_size: usize,
) -> Formula {
    random_with(rng, vocab.names(), max_size.max(1), true)
}

/// A propositional formula with at most `max_size` nodes over `vocab`.
pub fn random_propositional<R: Rng + ?Sized>(
    rng: &mut R,
    vocab: &Vocabulary,
    max_size: usize,
) -> Formula {
    random_with(rng, vocab.names(), max_size.max(1), false)
}

/// A knowledge base of `entries` finite-weight formulas with weights drawn
/// uniformly from `[-2, 2]`.
pub fn random_kb<R: Rng + ?Sized>(
    rng: &mut R,
    logic: LogicKind,
    vocab: &Vocabulary,
    entries: usize,
    max_size: usize,
    modal: bool,
) -> KnowledgeBase {
    let mut kb = KnowledgeBase::new(logic, vocab.clone());
    for _ in 0..entries {
        let f = if modal {
            random_formula(rng, vocab, max_size)
        } else {
            random_propositional(rng, vocab, max_size)
        };
        kb.push(Weight::Finite(rng.gen_range(-2.0..=2.0)), f)
            .expect("generated formulas are valid");
    }
    kb
}

/// Every depth-one formula with at most `max_size` nodes built from the
/// constants, the propositions of `vocab`, `~`, `&`, `|`, `->`, `<->` and `B`.
pub fn all_formulas(vocab: &Vocabulary, max_size: usize) -> Vec<Formula> {
    // by_size[s] = (propositional formulas of size s, depth-one formulas of size s)
    let mut by_size: Vec<(Vec<Formula>, Vec<Formula>)> = vec![(Vec::new(), Vec::new())];
    for size in 1..=max_size {
        let mut prop = Vec::new();
        let mut modal = Vec::new();
        if size == 1 {
            prop.push(Formula::True);
            prop.push(Formula::False);
            prop.extend(vocab.names().iter().map(|p| Formula::Prop(p.clone())));
            modal = prop.clone();
        } else {
            let (prev_prop, prev_modal) = &by_size[size - 1];
            prop.extend(prev_prop.iter().map(|f| !f.clone()));
            modal.extend(prev_modal.iter().map(|f| !f.clone()));
            modal.extend(prev_prop.iter().map(|f| Formula::belief(f.clone())));
            for left in 1..size - 1 {
                let right = size - 1 - left;
                let binary = |out: &mut Vec<Formula>, ls: &[Formula], rs: &[Formula]| {
                    for a in ls {
                        for b in rs {
                            out.push(a.clone() & b.clone());
                            out.push(a.clone() | b.clone());
                            out.push(Formula::implies(a.clone(), b.clone()));
                            out.push(Formula::iff(a.clone(), b.clone()));
                        }
                    }
                };
                binary(&mut prop, &by_size[left].0, &by_size[right].0);
                binary(&mut modal, &by_size[left].1, &by_size[right].1);
            }
        }
        by_size.push((prop, modal));
    }
    by_size.into_iter().flat_map(|(_, modal)| modal).collect()
}
