//! Closed-form sample-complexity calculators for learning `n` tasks through
//! a shared representation with `W_R` weights and per-task output networks
//! with `W_O` weights each.
//!
//! Every quantity is an order-of-magnitude bound. The constants hidden in
//! each `O(.)` are exposed as `c_cap` (inside capacity logarithms) and
//! `c_sample` (in front of sample sizes), both defaulting to 1. Results are
//! therefore only meaningful up to those undetermined constants.

use std::io::Write;

use crate::error::{Error, Result};

pub const CONSTANTS_NOTE: &str = "bounds are up to undetermined constants (c_cap, c_sample)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// Representation weight count `W_R`.
    pub rep_weights: f64,
    /// Weight count of one output network `W_O`.
    pub output_weights: f64,
    pub tasks: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub c_cap: f64,
    pub c_sample: f64,
}

impl BoundInputs {
    pub fn new(
        rep_weights: f64,
        output_weights: f64,
        tasks: usize,
        epsilon: f64,
        delta: f64,
    ) -> Self {
        Self {
            rep_weights,
            output_weights,
            tasks,
            epsilon,
            delta,
            c_cap: 1.0,
            c_sample: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_weights(self.rep_weights, self.output_weights)?;
        check_tasks(self.tasks)?;
        check_epsilon(self.epsilon)?;
        check_delta(self.delta)?;
        check_constant("c_cap", self.c_cap)?;
        check_constant("c_sample", self.c_sample)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub tasks: usize,
    pub m_bound: f64,
    pub a_term: f64,
    pub b_term: f64,
    pub gain: f64,
    pub novel_task_m_bound: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

fn check_tasks(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "task count must be at least 1".into(),
        ));
    }
    Ok(())
}

fn check_weights(rep: f64, out: f64) -> Result<()> {
    if !(rep > 0.0 && out > 0.0 && rep.is_finite() && out.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "weight counts must be positive, got W_R = {rep}, W_O = {out}"
        )));
    }
    Ok(())
}

fn check_constant(name: &str, c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "{name} must be positive, got {c}"
        )));
    }
    Ok(())
}

/// Per-task capacity logarithm of the `n`-task network class:
/// `c_cap (W_O + W_R / n) ln(1/eps)`.
pub fn capacity_log_composite(
    rep_weights: f64,
    output_weights: f64,
    n: usize,
    epsilon: f64,
    c_cap: f64,
) -> Result<f64> {
    check_weights(rep_weights, output_weights)?;
    check_tasks(n)?;
    check_epsilon(epsilon)?;
    check_constant("c_cap", c_cap)?;
    Ok(c_cap * (output_weights + rep_weights / n as f64) * (1.0 / epsilon).ln())
}

/// Examples per task for average generalization over `n` tasks, split as
/// `m = a + b / n`.
///
/// `a = c_sample W_O ln(1/eps) / eps^2` and
/// `b = c_sample (W_R ln(1/eps) + ln(1/delta)) / eps^2`.
pub fn m_bound(inputs: &BoundInputs) -> Result<(f64, f64, f64)> {
    inputs.validate()?;
    let eps2 = inputs.epsilon * inputs.epsilon;
    let log_eps = (1.0 / inputs.epsilon).ln();
    let log_delta = (1.0 / inputs.delta).ln();
    let a = inputs.c_sample * inputs.output_weights * log_eps / eps2;
    let b = inputs.c_sample * (inputs.rep_weights * log_eps + log_delta) / eps2;
    Ok((a + b / inputs.tasks as f64, a, b))
}

/// Number of tasks after which the learnt representation is good for novel
/// tasks: `c_sample / eps^2 (c_cap W_R ln(1/eps) + ln(1/delta))`.
pub fn n_bound(
    rep_weights: f64,
    epsilon: f64,
    delta: f64,
    c_cap: f64,
    c_sample: f64,
) -> Result<f64> {
    if !(rep_weights > 0.0 && rep_weights.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "W_R must be positive, got {rep_weights}"
        )));
    }
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    check_constant("c_cap", c_cap)?;
    check_constant("c_sample", c_sample)?;
    Ok(c_sample / (epsilon * epsilon)
        * (c_cap * rep_weights * (1.0 / epsilon).ln() + (1.0 / delta).ln()))
}

/// Weight-ratio approximation of the `n`-task gain,
/// `(W_O + W_R) / (W_O + W_R / n)`, which always lies in `[1, n]`.
pub fn n_task_gain(rep_weights: f64, output_weights: f64, n: usize) -> Result<f64> {
    check_weights(rep_weights, output_weights)?;
    check_tasks(n)?;
    Ok((output_weights + rep_weights) / (output_weights + rep_weights / n as f64))
}

/// Examples needed for a novel task once the representation is fixed and
/// only the output network is learnt: `c_sample / eps^2 (W_O ln(1/eps) + ln(1/delta))`.
pub fn novel_task_m_bound(
    output_weights: f64,
    epsilon: f64,
    delta: f64,
    c_sample: f64,
) -> Result<f64> {
    if !(output_weights > 0.0 && output_weights.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "W_O must be positive, got {output_weights}"
        )));
    }
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    check_constant("c_sample", c_sample)?;
    Ok(c_sample / (epsilon * epsilon)
        * (output_weights * (1.0 / epsilon).ln() + (1.0 / delta).ln()))
}

pub fn bound_report(inputs: &BoundInputs) -> Result<BoundReport> {
    let (m, a, b) = m_bound(inputs)?;
    Ok(BoundReport {
        tasks: inputs.tasks,
        m_bound: m,
        a_term: a,
        b_term: b,
        gain: n_task_gain(inputs.rep_weights, inputs.output_weights, inputs.tasks)?,
        novel_task_m_bound: novel_task_m_bound(
            inputs.output_weights,
            inputs.epsilon,
            inputs.delta,
            inputs.c_sample,
        )?,
    })
}

/// One report per task count in `tasks`.
pub fn bound_table(
    base: &BoundInputs,
    tasks: impl IntoIterator<Item = usize>,
) -> Result<Vec<BoundReport>> {
    tasks
        .into_iter()
        .map(|n| bound_report(&BoundInputs { tasks: n, ..*base }))
        .collect()
}

/// CSV with a leading `#` comment recording the inputs and constants.
pub fn write_bound_table<W: Write>(
    base: &BoundInputs,
    rows: &[BoundReport],
    mut out: W,
) -> Result<()> {
    writeln!(
        out,
        "# W_R={} W_O={} epsilon={} delta={} c_cap={} c_sample={}; {CONSTANTS_NOTE}",
        base.rep_weights, base.output_weights, base.epsilon, base.delta, base.c_cap, base.c_sample
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "m_bound",
        "a_term",
        "b_term",
        "gain",
        "novel_task_m_bound",
    ])?;
    for r in rows {
        w.write_record([
            r.tasks.to_string(),
            r.m_bound.to_string(),
            r.a_term.to_string(),
            r.b_term.to_string(),
            r.gain.to_string(),
            r.novel_task_m_bound.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
