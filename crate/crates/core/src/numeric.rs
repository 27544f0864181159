use num_bigint::Sign;
use num_traits::ToPrimitive;

use crate::counter::Count;

/// Natural log of a non-negative count; `-inf` for zero. Works for counts far
/// beyond the f64 range by splitting off a power of two.
pub fn ln_count(n: &Count) -> f64 {
    match n.sign() {
        Sign::NoSign => f64::NEG_INFINITY,
        Sign::Minus => f64::NAN,
        Sign::Plus => {
            let bits = n.bits();
            if bits <= 1000 {
                n.to_f64().expect("in range").ln()
            } else {
                let shift = bits - 64;
                let top = (n >> shift).to_f64().expect("64-bit head");
                top.ln() + shift as f64 * std::f64::consts::LN_2
            }
        }
    }
}

/// Running log-sum-exp over a sequence, summed in iteration order.
#[derive(Clone, Copy, Debug)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled += (x - self.max).exp();
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// log Σ exp(xᵢ) with the maximum factored out; `-inf` for an empty or
/// all-`-inf` input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// `2^e` for exponents in the normal range, 0 below it.
fn pow2(e: i64) -> f64 {
    if e < -1022 {
        0.0
    } else if e > 1023 {
        f64::INFINITY
    } else {
        f64::from_bits(((e + 1023) as u64) << 52)
    }
}

/// Running sum of `n·e^w` terms with a huge count `n`, kept as a mantissa
/// and a binary exponent. Counts enter with at most one rounding, and
/// weight-free ratios of power-of-two-scaled counts stay exact.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScaledSum {
    mantissa: f64,
    exponent: i64,
}

impl ScaledSum {
    pub fn push(&mut self, n: &Count, w: f64) {
        if n.sign() != Sign::Plus {
            return;
        }
        let shift = n.bits().saturating_sub(64);
        let head = (n >> shift).to_f64().expect("64-bit head");
        let k = (w / std::f64::consts::LN_2).round();
        let mantissa = head * (w - k * std::f64::consts::LN_2).exp();
        let exponent = shift as i64 + k as i64;
        if self.mantissa == 0.0 {
            self.mantissa = mantissa;
            self.exponent = exponent;
        } else if exponent > self.exponent {
            self.mantissa = self.mantissa * pow2(self.exponent - exponent) + mantissa;
            self.exponent = exponent;
        } else {
            self.mantissa += mantissa * pow2(exponent - self.exponent);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    /// Natural log of the sum; `-inf` when empty.
    pub fn ln(&self) -> f64 {
        self.mantissa.ln() + self.exponent as f64 * std::f64::consts::LN_2
    }

    /// `self / other`.
    pub fn ratio(&self, other: &ScaledSum) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.mantissa / other.mantissa * pow2(self.exponent - other.exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_of_huge_counts() {
        let n = Count::from(3) << 5000u32;
        let expected = 3f64.ln() + 5000.0 * std::f64::consts::LN_2;
        assert!((ln_count(&n) - expected).abs() < 1e-9);
        assert_eq!(ln_count(&Count::from(0)), f64::NEG_INFINITY);
        assert!((ln_count(&Count::from(12)) - 12f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn streaming_matches_batch() {
        let xs = [1234.0, 1232.0, -3.0, f64::NEG_INFINITY, 0.5];
        let mut acc = LogSumExp::default();
        xs.iter().for_each(|&x| acc.push(x));
        assert!((acc.value() - log_sum_exp(&xs)).abs() < 1e-12);
        // log(exp(1234) + exp(1232)) = 1232 + log(exp(2) + 1)
        assert!((log_sum_exp(&[1234.0, 1232.0]) - 1234.126928011043).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
    }

    #[test]
    fn scaled_sums() {
        let mut num = ScaledSum::default();
        let mut den = ScaledSum::default();
        num.push(&Count::from(4), 0.0);
        den.push(&Count::from(4), 0.0);
        den.push(&Count::from(4), 0.0);
        assert_eq!(num.ratio(&den), 0.5);
        assert!((den.ln() - 8f64.ln()).abs() < 1e-15);

        let mut big = ScaledSum::default();
        big.push(&(Count::from(3) << 5000u32), 2.5);
        big.push(&Count::from(7), 700.0);
        let expected = 3f64.ln() + 5000.0 * std::f64::consts::LN_2 + 2.5;
        assert!((big.ln() - expected).abs() < 1e-9);
        assert_eq!(ScaledSum::default().ln(), f64::NEG_INFINITY);
        assert_eq!(ScaledSum::default().ratio(&big), 0.0);
    }
}
