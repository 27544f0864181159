//! Line-oriented knowledge-base and constraint files.
//!
//! ```text
//! # comment
//! logic: K45
//! props: p q r
//! weight 0.693147 : B p
//! weight inf : p -> q
//! ```
//!
//! Constraint files hold one `<formula> = <target>` per line, with the same
//! comment syntax.

use crate::error::{Error, ErrorClass, Result};
use crate::formula::LogicKind;
use crate::inference::{KnowledgeBase, Weight};
use crate::learning::Constraint;
use crate::parser::parse;
use crate::vocabulary::Vocabulary;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn at(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Format { .. } => e,
        other if other.class() != ErrorClass::Input => other,
        other => Error::Format {
            line,
            message: other.to_string(),
        },
    }
}

pub fn parse_kb(text: &str) -> Result<KnowledgeBase> {
    let mut logic: Option<LogicKind> = None;
    let mut vocab: Option<Vocabulary> = None;
    let mut weighted = Vec::new();
    for (line, content) in content_lines(text) {
        let dup = |what: &str| Error::Format {
            line,
            message: format!("duplicate `{what}` declaration"),
        };
        if let Some(rest) = content.strip_prefix("logic:") {
            if logic.is_some() {
                return Err(dup("logic"));
            }
            logic = Some(rest.parse().map_err(at(line))?);
        } else if let Some(rest) = content.strip_prefix("props:") {
            if vocab.is_some() {
                return Err(dup("props"));
            }
            vocab = Some(Vocabulary::parse(rest).map_err(at(line))?);
        } else if let Some(rest) = content.strip_prefix("weight") {
            let (w, formula) = rest.split_once(':').ok_or_else(|| Error::Format {
                line,
                message: "expected `weight <real|inf> : <formula>`".into(),
            })?;
            let weight: Weight = w.parse().map_err(at(line))?;
            weighted.push((line, weight, formula.trim().to_string()));
        } else {
            return Err(Error::Format {
                line,
                message: format!("unrecognized line `{content}`"),
            });
        }
    }
    let missing = |what: &str| Error::Format {
        line: 0,
        message: format!("missing `{what}:` declaration"),
    };
    let logic = logic.ok_or_else(|| missing("logic"))?;
    let vocab = vocab.ok_or_else(|| missing("props"))?;
    let mut kb = KnowledgeBase::new(logic, vocab);
    for (line, weight, text) in weighted {
        let f = parse(&text, kb.vocabulary()).map_err(at(line))?;
        kb.push(weight, f).map_err(at(line))?;
    }
    Ok(kb)
}

/// Renders a knowledge base in the file format; `parse_kb` reads it back.
pub fn write_kb(kb: &KnowledgeBase) -> String {
    let mut out = format!("logic: {}\nprops: {}\n", kb.logic(), kb.vocabulary());
    for e in kb.entries() {
        out.push_str(&format!("weight {} : {}\n", e.weight, e.formula));
    }
    out
}

pub fn parse_constraints(text: &str, vocab: &Vocabulary) -> Result<Vec<Constraint>> {
    content_lines(text)
        .map(|(line, content)| {
            let (formula, target) = content.rsplit_once('=').ok_or_else(|| Error::Format {
                line,
                message: "expected `<formula> = <target>`".into(),
            })?;
            let target: f64 = target.trim().parse().map_err(|_| Error::Format {
                line,
                message: format!("`{}` is not a number", target.trim()),
            })?;
            let formula = parse(formula.trim(), vocab).map_err(at(line))?;
            Ok(Constraint::new(formula, target))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;

    #[test]
    fn reads_kb() {
        let kb = parse_kb(
            "# example\nlogic: K45\nprops: p q\n\nweight 0.75 : B p\nweight inf : p -> q\n",
        )
        .unwrap();
        assert_eq!(kb.logic(), LogicKind::K45);
        assert_eq!(kb.vocabulary().names(), &["p", "q"]);
        assert_eq!(kb.entries().len(), 2);
        assert_eq!(kb.entries()[0].weight, Weight::Finite(0.75));
        assert_eq!(kb.entries()[1].weight, Weight::Hard);
        assert_eq!(
            kb.entries()[1].formula,
            Formula::implies(Formula::prop("p"), Formula::prop("q"))
        );
        assert_eq!(parse_kb(&write_kb(&kb)).unwrap(), kb);
    }

    #[test]
    fn kb_errors_carry_line_numbers() {
        let err = parse_kb("logic: S5\nprops: p\nweight 1 : B(Bp)\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }), "{err}");
        let err = parse_kb("logic: S5\nlogic: K45\nprops: p\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 2, .. }));
        assert!(parse_kb("props: p\n").is_err());
        assert!(parse_kb("logic: S4\nprops: p\n").is_err());
        assert!(parse_kb("logic: S5\nprops: p\nweight -inf : p\n").is_err());
        assert!(parse_kb("logic: S5\nprops: p\nbogus\n").is_err());
    }

    #[test]
    fn reads_constraints() {
        let v = Vocabulary::new(["p"]).unwrap();
        let cs = parse_constraints("# targets\nB p = 0.666667\np <-> p = 0.5\n", &v).unwrap();
        assert_eq!(cs.len(), 2);
        assert_eq!(cs[0].formula, Formula::belief(Formula::prop("p")));
        assert_eq!(cs[0].target, 0.666667);
        assert!(parse_constraints("B p 0.5", &v).is_err());
        assert!(parse_constraints("B q = 0.5", &v).is_err());
    }
}
