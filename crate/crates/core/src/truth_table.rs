use std::fmt;

/// Bit patterns of the first six propositions inside one 64-assignment word.
const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// The value of a propositional formula under every assignment of a
/// vocabulary, packed 64 assignments per word. Bit `j` is the value under
/// assignment index `j`; bits past 2^vars are always clear.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    vars: u32,
    words: Vec<u64>,
}

impl TruthTable {
    fn word_count(vars: u32) -> usize {
        if vars >= 6 {
            1 << (vars - 6)
        } else {
            1
        }
    }

    fn tail_mask(vars: u32) -> u64 {
        if vars >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u32 << vars)) - 1
        }
    }

    pub fn constant(vars: u32, value: bool) -> Self {
        let fill = if value { Self::tail_mask(vars) } else { 0 };
        TruthTable {
            vars,
            words: vec![fill; Self::word_count(vars)],
        }
    }

    /// Table of the proposition at position `var`.
    pub fn variable(vars: u32, var: u32) -> Self {
        assert!(var < vars, "proposition index {var} out of range");
        let mask = Self::tail_mask(vars);
        let words = if var < 6 {
            vec![LOW_PATTERNS[var as usize] & mask; Self::word_count(vars)]
        } else {
            let stride = 1usize << (var - 6);
            (0..Self::word_count(vars))
                .map(|w| if w & stride != 0 { u64::MAX } else { 0 })
                .collect()
        };
        TruthTable { vars, words }
    }

    /// Builds a table by evaluating `f` at every assignment index.
    pub fn from_fn(vars: u32, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut t = Self::constant(vars, false);
        for j in 0..(1usize << vars) {
            if f(j) {
                t.words[j / 64] |= 1u64 << (j % 64);
            }
        }
        t
    }

    pub fn vars(&self) -> u32 {
        self.vars
    }

    pub fn len(&self) -> usize {
        1usize << self.vars
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len());
        self.words[j / 64] >> (j % 64) & 1 == 1
    }

    /// Number of satisfying assignments.
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_unsat(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_valid(&self) -> bool {
        let mask = Self::tail_mask(self.vars);
        self.words.iter().all(|&w| w == mask)
    }

    /// True iff every assignment set here is also set in `other`.
    pub fn entails(&self, other: &TruthTable) -> bool {
        debug_assert_eq!(self.vars, other.vars);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn and(&self, other: &TruthTable) -> TruthTable {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn or(&self, other: &TruthTable) -> TruthTable {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn iff(&self, other: &TruthTable) -> TruthTable {
        let mask = Self::tail_mask(self.vars);
        self.zip_with(other, |a, b| !(a ^ b) & mask)
    }

    pub fn implies(&self, other: &TruthTable) -> TruthTable {
        let mask = Self::tail_mask(self.vars);
        self.zip_with(other, |a, b| (!a | b) & mask)
    }

    pub fn not(&self) -> TruthTable {
        let mask = Self::tail_mask(self.vars);
        TruthTable {
            vars: self.vars,
            words: self.words.iter().map(|w| !w & mask).collect(),
        }
    }

    fn zip_with(&self, other: &TruthTable, op: impl Fn(u64, u64) -> u64) -> TruthTable {
        assert_eq!(
            self.vars, other.vars,
            "truth tables over different vocabularies"
        );
        TruthTable {
            vars: self.vars,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(")?;
        if self.vars <= 6 {
            for j in 0..self.len() {
                write!(f, "{}", u8::from(self.get(j)))?;
            }
        } else {
            write!(f, "{} vars, {} ones", self.vars, self.count_ones())?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_patterns_match_index_bits() {
        for vars in 1..=8u32 {
            for var in 0..vars {
                let t = TruthTable::variable(vars, var);
                for j in 0..t.len() {
                    assert_eq!(t.get(j), (j >> var) & 1 == 1, "vars={vars} var={var} j={j}");
                }
            }
        }
    }

    #[test]
    fn negation_respects_tail() {
        let t = TruthTable::constant(2, false).not();
        assert_eq!(t.count_ones(), 4);
        assert!(t.is_valid());
    }

    #[test]
    fn entailment() {
        let p = TruthTable::variable(2, 0);
        let q = TruthTable::variable(2, 1);
        assert!(p.and(&q).entails(&p));
        assert!(!p.entails(&q));
    }
}
