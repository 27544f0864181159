//! Fitting finite weights to probability constraints `Pr(Fᵢ) = cᵢ`.
//!
//! The maximum-entropy solution is the minimizer of the convex dual
//! `log Z(w) − Σ cᵢ wᵢ`, whose gradient is `Pr_w(Fᵢ) − cᵢ` and whose Hessian
//! is the covariance of the formula indicators. Class sizes `N(Φ(t))` do not
//! depend on `w`, so they are counted once and every later evaluation is a
//! sum over at most 2^n classes.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::formula::{Formula, LogicKind};
use crate::inference::{KnowledgeBase, Model, Weight, MAX_FINITE_ENTRIES};
use crate::numeric::{ln_count, LogSumExp};
use crate::vocabulary::Vocabulary;

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub formula: Formula,
    pub target: f64,
}

impl Constraint {
    pub fn new(formula: Formula, target: f64) -> Self {
        Constraint { formula, target }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop once the gradient's ∞-norm is at most this.
    pub tolerance: f64,
    pub armijo: f64,
    pub shrink: f64,
    /// Formulas that must hold; they restrict the space and get no weight.
    pub hard_constraints: Vec<Formula>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 10_000,
            tolerance: 1e-8,
            armijo: 1e-4,
            shrink: 0.5,
            hard_constraints: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    pub weights: Vec<f64>,
    pub achieved: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
}

/// The dual as a function of the weights, over precomputed classes.
struct Dual {
    classes: Vec<(f64, u32)>,
    targets: Vec<f64>,
}

struct DualPoint {
    value: f64,
    gradient: Vec<f64>,
    achieved: Vec<f64>,
    hessian: DMatrix<f64>,
}

impl Dual {
    fn build(
        constraints: &[Constraint],
        hard: &[Formula],
        logic: LogicKind,
        vocab: &Vocabulary,
        weights: Option<&[f64]>,
    ) -> Result<Dual> {
        let mut kb = KnowledgeBase::new(logic, vocab.clone());
        for h in hard {
            kb.push(Weight::Hard, h.clone())?;
        }
        for (i, c) in constraints.iter().enumerate() {
            let w = weights.map_or(0.0, |w| w[i]);
            kb.push(Weight::Finite(w), c.formula.clone())?;
        }
        let rows = Model::new(&kb)?.rows(None)?;
        if rows.is_empty() {
            return Err(Error::InconsistentHardConstraints);
        }
        Ok(Dual {
            classes: rows
                .iter()
                .map(|r| (ln_count(&r.count), r.assignment))
                .collect(),
            targets: constraints.iter().map(|c| c.target).collect(),
        })
    }

    fn dim(&self) -> usize {
        self.targets.len()
    }

    fn exponent(&self, w: &[f64], mask: u32) -> f64 {
        w.iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, x)| x)
            .sum()
    }

    fn log_z(&self, w: &[f64]) -> f64 {
        let mut acc = LogSumExp::default();
        for &(ln_n, mask) in &self.classes {
            acc.push(ln_n + self.exponent(w, mask));
        }
        acc.value()
    }

    fn value(&self, w: &[f64]) -> f64 {
        self.log_z(w) - w.iter().zip(&self.targets).map(|(x, c)| x * c).sum::<f64>()
    }

    fn evaluate(&self, w: &[f64]) -> DualPoint {
        let n = self.dim();
        let log_z = self.log_z(w);
        let mut achieved = vec![0.0; n];
        let mut second = DMatrix::<f64>::zeros(n, n);
        for &(ln_n, mask) in &self.classes {
            let p = (ln_n + self.exponent(w, mask) - log_z).exp();
            for i in (0..n).filter(|i| mask >> i & 1 == 1) {
                achieved[i] += p;
                for j in (0..n).filter(|j| mask >> j & 1 == 1) {
                    second[(i, j)] += p;
                }
            }
        }
        let mut hessian = second;
        for i in 0..n {
            for j in 0..n {
                hessian[(i, j)] -= achieved[i] * achieved[j];
            }
        }
        let gradient = achieved
            .iter()
            .zip(&self.targets)
            .map(|(a, c)| a - c)
            .collect();
        let value = log_z - w.iter().zip(&self.targets).map(|(x, c)| x * c).sum::<f64>();
        DualPoint {
            value,
            gradient,
            achieved,
            hessian,
        }
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Dual objective `log Z(w) − Σ cᵢwᵢ` and its gradient `Pr_w(Fᵢ) − cᵢ`.
pub fn objective_and_gradient(
    weights: &[f64],
    constraints: &[Constraint],
    logic: LogicKind,
    vocab: &Vocabulary,
) -> Result<(f64, Vec<f64>)> {
    if weights.len() != constraints.len() {
        return Err(Error::InvalidArgument(format!(
            "{} weights for {} constraints",
            weights.len(),
            constraints.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite()) {
        return Err(Error::InvalidWeight(format!("{w} is not finite")));
    }
    let dual = Dual::build(constraints, &[], logic, vocab, Some(weights))?;
    let point = dual.evaluate(weights);
    Ok((point.value, point.gradient))
}

/// Newton direction from the damped Hessian, or steepest descent when the
/// system is singular or the result is not a descent direction.
fn search_direction(point: &DualPoint) -> Vec<f64> {
    let n = point.gradient.len();
    let g = DVector::from_column_slice(&point.gradient);
    let scale = (0..n).map(|i| point.hessian[(i, i)]).fold(0.0, f64::max);
    let damped = &point.hessian + DMatrix::identity(n, n) * (1e-10 * scale.max(1e-300));
    if let Some(chol) = damped.cholesky() {
        let d = -chol.solve(&g);
        if d.iter().all(|x| x.is_finite()) && d.dot(&g) < 0.0 {
            return d.iter().copied().collect();
        }
    }
    point.gradient.iter().map(|x| -x).collect()
}

/// Minimizes the dual from `w = 0` with Armijo backtracking.
pub fn fit_weights(
    constraints: &[Constraint],
    logic: LogicKind,
    vocab: &Vocabulary,
    options: &FitOptions,
) -> Result<FitReport> {
    for (index, c) in constraints.iter().enumerate() {
        if !(c.target > 0.0 && c.target < 1.0) {
            return Err(Error::InvalidTarget {
                index,
                target: c.target,
            });
        }
    }
    if constraints.len() > MAX_FINITE_ENTRIES {
        return Err(Error::EntryCap {
            count: constraints.len(),
            cap: MAX_FINITE_ENTRIES,
        });
    }
    let dual = Dual::build(constraints, &options.hard_constraints, logic, vocab, None)?;

    // A formula true in no admissible situation, or in all of them, pins
    // its probability to 0 or 1 for every finite weight.
    for index in 0..constraints.len() {
        let some_true = dual.classes.iter().any(|&(_, m)| m >> index & 1 == 1);
        let some_false = dual.classes.iter().any(|&(_, m)| m >> index & 1 == 0);
        if !some_true {
            return Err(Error::Infeasible {
                index,
                reason:
                    "the formula holds in no admissible situation, so its probability is always 0"
                        .into(),
            });
        }
        if !some_false {
            return Err(Error::Infeasible {
                index,
                reason: "the formula holds in every admissible situation, so its probability is always 1"
                    .into(),
            });
        }
    }

    let mut w = vec![0.0; constraints.len()];
    let mut point = dual.evaluate(&w);
    let mut iterations = 0;
    while inf_norm(&point.gradient) > options.tolerance {
        if iterations >= options.max_iterations {
            return Err(Error::NotConverged {
                iterations,
                gradient_norm: inf_norm(&point.gradient),
                weights: w,
            });
        }
        iterations += 1;

        let mut stepped = false;
        for direction in [
            search_direction(&point),
            point.gradient.iter().map(|x| -x).collect(),
        ] {
            let slope: f64 = direction
                .iter()
                .zip(&point.gradient)
                .map(|(d, g)| d * g)
                .sum();
            let mut alpha = 1.0;
            while alpha > 1e-16 {
                let trial: Vec<f64> = w
                    .iter()
                    .zip(&direction)
                    .map(|(x, d)| x + alpha * d)
                    .collect();
                let value = dual.value(&trial);
                if value <= point.value + options.armijo * alpha * slope {
                    w = trial;
                    stepped = true;
                    break;
                }
                alpha *= options.shrink;
            }
            if stepped {
                break;
            }
        }
        if !stepped {
            return Err(Error::NotConverged {
                iterations,
                gradient_norm: inf_norm(&point.gradient),
                weights: w,
            });
        }
        point = dual.evaluate(&w);
    }

    Ok(FitReport {
        gradient_norm: inf_norm(&point.gradient),
        achieved: point.achieved,
        weights: w,
        iterations,
    })
}
