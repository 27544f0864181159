use std::fmt;
use std::ops::{BitAnd, BitOr, Not};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::truth_table::TruthTable;
use crate::vocabulary::Vocabulary;

/// The three single-agent logics whose situations are (real world, possible set) pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LogicKind {
    K45,
    KD45,
    S5,
}

impl LogicKind {
    pub const ALL: [LogicKind; 3] = [LogicKind::K45, LogicKind::KD45, LogicKind::S5];

    pub fn name(self) -> &'static str {
        match self {
            LogicKind::K45 => "K45",
            LogicKind::KD45 => "KD45",
            LogicKind::S5 => "S5",
        }
    }
}

impl fmt::Display for LogicKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "K45" => Ok(LogicKind::K45),
            "KD45" => Ok(LogicKind::KD45),
            "S5" => Ok(LogicKind::S5),
            other => Err(Error::InvalidArgument(format!(
                "unknown logic `{other}` (expected K45, KD45 or S5)"
            ))),
        }
    }
}

/// A modal formula with a single belief operator `B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Belief(Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    pub fn belief(body: Formula) -> Formula {
        Formula::Belief(Box::new(body))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::Iff(Box::new(lhs), Box::new(rhs))
    }

    /// Conjunction of all formulas; `true` when empty.
    pub fn conjoin(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(|a, b| a & b)
            .unwrap_or(Formula::True)
    }

    /// Conjunction that drops `true` operands.
    pub(crate) fn and_simplified(a: Formula, b: Formula) -> Formula {
        match (a, b) {
            (Formula::True, x) | (x, Formula::True) => x,
            (a, b) => a & b,
        }
    }

    pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Formula> {
        crate::parser::parse(text, vocab)
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => 1,
            Formula::Not(a) | Formula::Belief(a) => 1 + a.size(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Maximum nesting depth of `B`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => 0,
            Formula::Not(a) => a.modal_depth(),
            Formula::Belief(a) => 1 + a.modal_depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.modal_depth().max(b.modal_depth()),
        }
    }

    pub fn is_propositional(&self) -> bool {
        self.modal_depth() == 0
    }

    /// Proposition names in order of first occurrence.
    pub fn props(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_props(&mut out);
        out
    }

    pub(crate) fn collect_props(&self, out: &mut Vec<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Prop(p) => {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
            Formula::Not(a) | Formula::Belief(a) => a.collect_props(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_props(out);
                b.collect_props(out);
            }
        }
    }

    /// Checks that every proposition belongs to `vocab`.
    pub fn check_vocabulary(&self, vocab: &Vocabulary) -> Result<()> {
        match self.props().into_iter().find(|p| !vocab.contains(p)) {
            Some(p) => Err(Error::UnknownProposition(p)),
            None => Ok(()),
        }
    }

    /// Accepts the formula iff no `B` occurs under another `B`. The error
    /// names the offending subformula by its child-index path from the root.
    pub fn validate_depth_one(&self) -> Result<()> {
        fn walk(f: &Formula, inside_belief: bool, path: &mut Vec<usize>) -> Result<()> {
            match f {
                Formula::True | Formula::False | Formula::Prop(_) => Ok(()),
                Formula::Belief(a) => {
                    if inside_belief {
                        let rendered: Vec<String> = path.iter().map(usize::to_string).collect();
                        return Err(Error::NestedBelief {
                            path: format!("/{} ({f})", rendered.join("/")),
                        });
                    }
                    path.push(0);
                    walk(a, true, path)?;
                    path.pop();
                    Ok(())
                }
                Formula::Not(a) => {
                    path.push(0);
                    walk(a, inside_belief, path)?;
                    path.pop();
                    Ok(())
                }
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Implies(a, b)
                | Formula::Iff(a, b) => {
                    path.push(0);
                    walk(a, inside_belief, path)?;
                    path.pop();
                    path.push(1);
                    walk(b, inside_belief, path)?;
                    path.pop();
                    Ok(())
                }
            }
        }
        walk(self, false, &mut Vec::new())
    }

    /// Rewrites `|`, `->` and `<->` outside belief bodies into `~` and `&`.
    /// Belief bodies are left as written; they are handled by truth tables.
    pub fn normalize_core(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::Belief(_) => self.clone(),
            Formula::Not(a) => !a.normalize_core(),
            Formula::And(a, b) => a.normalize_core() & b.normalize_core(),
            Formula::Or(a, b) => !(!a.normalize_core() & !b.normalize_core()),
            Formula::Implies(a, b) => !(a.normalize_core() & !b.normalize_core()),
            Formula::Iff(a, b) => {
                let (a, b) = (a.normalize_core(), b.normalize_core());
                !(a.clone() & !b.clone()) & !(b & !a)
            }
        }
    }

    /// Evaluates a propositional formula under every assignment of `vocab`.
    pub fn truth_table(&self, vocab: &Vocabulary) -> Result<TruthTable> {
        let vars = vocab.len() as u32;
        Ok(match self {
            Formula::True => TruthTable::constant(vars, true),
            Formula::False => TruthTable::constant(vars, false),
            Formula::Prop(p) => {
                let i = vocab
                    .position(p)
                    .ok_or_else(|| Error::UnknownProposition(p.clone()))?;
                TruthTable::variable(vars, i as u32)
            }
            Formula::Not(a) => a.truth_table(vocab)?.not(),
            Formula::And(a, b) => a.truth_table(vocab)?.and(&b.truth_table(vocab)?),
            Formula::Or(a, b) => a.truth_table(vocab)?.or(&b.truth_table(vocab)?),
            Formula::Implies(a, b) => a.truth_table(vocab)?.implies(&b.truth_table(vocab)?),
            Formula::Iff(a, b) => a.truth_table(vocab)?.iff(&b.truth_table(vocab)?),
            Formula::Belief(_) => return Err(Error::NotPropositional),
        })
    }
}

impl Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
}

impl BitAnd for Formula {
    type Output = Formula;

    fn bitand(self, rhs: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(rhs))
    }
}

impl BitOr for Formula {
    type Output = Formula;

    fn bitor(self, rhs: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(rhs))
    }
}

// Binding strength; larger binds tighter.
const PREC_IFF: u8 = 1;
const PREC_IMPLIES: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_UNARY: u8 = 5;
const PREC_ATOM: u8 = 6;

impl Formula {
    fn precedence(&self) -> u8 {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => PREC_ATOM,
            Formula::Not(_) | Formula::Belief(_) => PREC_UNARY,
            Formula::And(..) => PREC_AND,
            Formula::Or(..) => PREC_OR,
            Formula::Implies(..) => PREC_IMPLIES,
            Formula::Iff(..) => PREC_IFF,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Prop(p) => write!(f, "{p}"),
            Formula::Not(a) => {
                write!(f, "~")?;
                a.fmt_at(f, PREC_UNARY)
            }
            Formula::Belief(a) => {
                write!(f, "B")?;
                a.fmt_at(f, PREC_ATOM)
            }
            // `&`, `|` and `<->` associate to the left, `->` to the right.
            Formula::And(a, b) => {
                a.fmt_at(f, PREC_AND)?;
                write!(f, " & ")?;
                b.fmt_at(f, PREC_AND + 1)
            }
            Formula::Or(a, b) => {
                a.fmt_at(f, PREC_OR)?;
                write!(f, " | ")?;
                b.fmt_at(f, PREC_OR + 1)
            }
            Formula::Implies(a, b) => {
                a.fmt_at(f, PREC_IMPLIES + 1)?;
                write!(f, " -> ")?;
                b.fmt_at(f, PREC_IMPLIES)
            }
            Formula::Iff(a, b) => {
                a.fmt_at(f, PREC_IFF)?;
                write!(f, " <-> ")?;
                b.fmt_at(f, PREC_IFF + 1)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
