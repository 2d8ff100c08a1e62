//! Empirical error and full-batch gradient descent.
//!
//! Every epoch accumulates the gradient over all training sets before a
//! single weight update, so the result does not depend on the order in
//! which examples or tasks are visited beyond floating-point rounding.

use std::collections::BTreeMap;
use std::io::Write;

use crate::environment::{InputPattern, TrainingSet};
use crate::error::{Error, Result};
use crate::network::{
    MultitaskNetwork, NetworkGrad, OutputNet, RepresentationNet, Term, WeightedObjective, Workspace,
};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Stop once the empirical error is at or below this value.
    pub target_error: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 2.0,
            max_epochs: 200_000,
            target_error: 0.005,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidArgument(
                "max_epochs must be at least 1".into(),
            ));
        }
        if self.target_error.is_nan() || self.target_error < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "target_error must be nonnegative, got {}",
                self.target_error
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainTrace {
    /// Empirical error at the start of each epoch, before its update.
    pub errors: Vec<f64>,
    pub converged: bool,
    /// Error of the returned weights.
    pub final_error: f64,
}

impl TrainTrace {
    pub fn epochs(&self) -> usize {
        self.errors.len()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epoch", "empirical_error"])?;
        for (epoch, e) in self.errors.iter().enumerate() {
            w.write_record([epoch.to_string(), e.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mean squared error `(1/m) sum (p_i - y_i)^2`.
pub fn empirical_error(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: predictions.len(),
            actual: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::InvalidArgument(
            "empirical error of an empty sample".into(),
        ));
    }
    let sum: f64 = predictions
        .iter()
        .zip(labels)
        .map(|(p, y)| (p - y) * (p - y))
        .sum();
    Ok(sum / predictions.len() as f64)
}

/// Mean over tasks of each output net's empirical error on its own set.
pub fn multitask_empirical_error(net: &MultitaskNetwork, bundles: &[TrainingSet]) -> Result<f64> {
    if bundles.len() != net.task_count() {
        return Err(Error::DimensionMismatch {
            expected: net.task_count(),
            actual: bundles.len(),
        });
    }
    let mut total = 0.0;
    for (t, set) in bundles.iter().enumerate() {
        let predictions = set
            .pairs
            .iter()
            .map(|(x, _)| net.predict(t, x))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<f64> = set.pairs.iter().map(|(_, y)| *y as f64).collect();
        total += empirical_error(&predictions, &labels).map_err(|_| Error::EmptyTrainingSet(t))?;
    }
    Ok(total / bundles.len() as f64)
}

/// Joint full-batch gradient descent on the multitask empirical error.
pub fn train_multitask(
    net: MultitaskNetwork,
    bundles: &[TrainingSet],
    cfg: &TrainConfig,
) -> Result<(MultitaskNetwork, TrainTrace)> {
    if bundles.len() != net.task_count() {
        return Err(Error::DimensionMismatch {
            expected: net.task_count(),
            actual: bundles.len(),
        });
    }
    let objective = WeightedObjective::from_training_sets(bundles)?;
    train_objective(net, &objective, cfg)
}

/// Gradient descent on an arbitrary weighted objective.
pub fn train_objective(
    mut net: MultitaskNetwork,
    objective: &WeightedObjective,
    cfg: &TrainConfig,
) -> Result<(MultitaskNetwork, TrainTrace)> {
    cfg.validate()?;
    let mut grad = NetworkGrad::zeros_like(&net);
    let mut ws = Workspace::default();
    let mut errors = Vec::new();
    let mut converged = false;
    for epoch in 0..cfg.max_epochs {
        let loss = objective.loss_and_grad(&net, &mut grad, &mut ws)?;
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        errors.push(loss);
        if loss <= cfg.target_error {
            converged = true;
            break;
        }
        net.apply_gradient(&grad, cfg.learning_rate);
    }
    let final_error = if converged {
        *errors.last().expect("at least one epoch")
    } else {
        objective.loss(&net)?
    };
    if !final_error.is_finite() {
        return Err(Error::Diverged {
            epoch: cfg.max_epochs,
        });
    }
    Ok((
        net,
        TrainTrace {
            errors,
            converged,
            final_error,
        },
    ))
}

/// Weighted squared loss over the output weights of one task, with the
/// representation outputs precomputed.
#[derive(Debug, Clone)]
pub struct OutputObjective {
    features: Vec<Vec<f64>>,
    terms: Vec<Term>,
}

impl OutputObjective {
    pub fn new(features: Vec<Vec<f64>>, terms: Vec<Term>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyTrainingSet(0));
        }
        let k = features.first().map_or(0, Vec::len);
        if features.iter().any(|h| h.len() != k) {
            return Err(Error::InvalidArgument(
                "features have differing lengths".into(),
            ));
        }
        if terms.iter().any(|t| t.input >= features.len()) {
            return Err(Error::InvalidArgument(
                "term refers to a missing feature row".into(),
            ));
        }
        Ok(Self { features, terms })
    }

    /// Empirical error of a training set seen through a frozen representation.
    pub fn from_training_set(rep: &RepresentationNet, set: &TrainingSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::EmptyTrainingSet(0));
        }
        let mut counts: BTreeMap<(InputPattern, u8), usize> = BTreeMap::new();
        for (x, y) in &set.pairs {
            *counts.entry((*x, *y)).or_insert(0) += 1;
        }
        let m = set.len() as f64;
        let mut features = Vec::with_capacity(counts.len());
        let mut terms = Vec::with_capacity(counts.len());
        for (i, ((x, y), c)) in counts.into_iter().enumerate() {
            features.push(rep.forward_pattern(&x)?);
            terms.push(Term {
                input: i,
                target: y as f64,
                weight: c as f64 / m,
            });
        }
        Self::new(features, terms)
    }

    pub fn feature_dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn loss(&self, g: &OutputNet) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let r = g.forward(&self.features[t.input]) - t.target;
                t.weight * r * r
            })
            .sum()
    }

    fn loss_and_grad(&self, g: &OutputNet, grad: &mut [f64]) -> f64 {
        grad.fill(0.0);
        let k = g.input_dim();
        let sigmoid = matches!(g.activation(), crate::network::OutputActivation::Sigmoid);
        let mut loss = 0.0;
        for t in &self.terms {
            let h = &self.features[t.input];
            let p = g.forward(h);
            let r = p - t.target;
            loss += t.weight * r * r;
            let slope = if sigmoid { p * (1.0 - p) } else { 1.0 };
            let dz = 2.0 * t.weight * r * slope;
            for j in 0..k {
                grad[j] += dz * h[j];
            }
            grad[k] += dz;
        }
        loss
    }
}

/// Trains only the output weights on top of a frozen representation.
///
/// The representation is borrowed immutably, so its weights cannot change.
pub fn train_output_only(
    rep: &RepresentationNet,
    set: &TrainingSet,
    init: OutputNet,
    cfg: &TrainConfig,
) -> Result<(OutputNet, TrainTrace)> {
    if init.input_dim() != rep.output_dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.output_dim(),
            actual: init.input_dim(),
        });
    }
    let objective = OutputObjective::from_training_set(rep, set)?;
    train_output_objective(&objective, init, cfg)
}

pub fn train_output_objective(
    objective: &OutputObjective,
    mut g: OutputNet,
    cfg: &TrainConfig,
) -> Result<(OutputNet, TrainTrace)> {
    cfg.validate()?;
    if g.input_dim() != objective.feature_dim() {
        return Err(Error::DimensionMismatch {
            expected: objective.feature_dim(),
            actual: g.input_dim(),
        });
    }
    let mut grad = vec![0.0; g.weight_count()];
    let mut errors = Vec::new();
    let mut converged = false;
    for epoch in 0..cfg.max_epochs {
        let loss = objective.loss_and_grad(&g, &mut grad);
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        errors.push(loss);
        if loss <= cfg.target_error {
            converged = true;
            break;
        }
        for (w, d) in g.weights_mut().iter_mut().zip(&grad) {
            *w -= cfg.learning_rate * d;
        }
    }
    let final_error = if converged {
        *errors.last().expect("at least one epoch")
    } else {
        objective.loss(&g)
    };
    if !final_error.is_finite() {
        return Err(Error::Diverged {
            epoch: cfg.max_epochs,
        });
    }
    Ok((
        g,
        TrainTrace {
            errors,
            converged,
            final_error,
        },
    ))
}
