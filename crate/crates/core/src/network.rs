//! Sigmoid feedforward networks: a shared representation network feeding
//! one single-layer output network per task.
//!
//! Each layer stores a row-major `fan_out x (fan_in + 1)` weight matrix
//! with the bias in the last column.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::environment::{InputPattern, TrainingSet};
use crate::error::{Error, Result};

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    fan_in: usize,
    fan_out: usize,
    weights: Vec<f64>,
}

impl Layer {
    pub fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self {
            fan_in,
            fan_out,
            weights: vec![0.0; (fan_in + 1) * fan_out],
        }
    }

    pub fn from_weights(fan_in: usize, fan_out: usize, weights: Vec<f64>) -> Result<Self> {
        let expected = (fan_in + 1) * fan_out;
        if weights.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: weights.len(),
            });
        }
        Ok(Self {
            fan_in,
            fan_out,
            weights,
        })
    }

    pub fn fan_in(&self) -> usize {
        self.fan_in
    }

    pub fn fan_out(&self) -> usize {
        self.fan_out
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn weight_count(&self) -> usize {
        self.weights.len()
    }

    fn forward_into(&self, input: &[f64], out: &mut [f64]) {
        let cols = self.fan_in + 1;
        for (o, row) in self.weights.chunks_exact(cols).enumerate() {
            let mut z = row[self.fan_in];
            for (w, a) in row[..self.fan_in].iter().zip(input) {
                z += w * a;
            }
            out[o] = sigmoid(z);
        }
    }
}

/// The shared internal representation `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationNet {
    layers: Vec<Layer>,
}

impl RepresentationNet {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument(
                "representation needs at least one layer".into(),
            ));
        }
        for pair in layers.windows(2) {
            if pair[0].fan_out != pair[1].fan_in {
                return Err(Error::DimensionMismatch {
                    expected: pair[0].fan_out,
                    actual: pair[1].fan_in,
                });
            }
        }
        if layers.iter().any(|l| l.fan_in == 0 || l.fan_out == 0) {
            return Err(Error::InvalidArgument(
                "layer sizes must be positive".into(),
            ));
        }
        Ok(Self { layers })
    }

    /// All-zero network with the given unit counts, input first.
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return Err(Error::InvalidArgument(
                "layer sizes need an input and an output size".into(),
            ));
        }
        Self::new(
            layer_sizes
                .windows(2)
                .map(|w| Layer::zeros(w[0], w[1]))
                .collect(),
        )
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.layers[0].fan_in)
            .chain(self.layers.iter().map(|l| l.fan_out))
            .collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in
    }

    /// Representation dimension `k`.
    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].fan_out
    }

    /// `W_R`, biases included.
    pub fn weight_count(&self) -> usize {
        self.layers.iter().map(Layer::weight_count).sum()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                actual: x.len(),
            });
        }
        let mut current = x.to_vec();
        for layer in &self.layers {
            let mut next = vec![0.0; layer.fan_out];
            layer.forward_into(&current, &mut next);
            current = next;
        }
        Ok(current)
    }

    pub fn forward_pattern(&self, x: &InputPattern) -> Result<Vec<f64>> {
        self.forward(&x.features())
    }
}

/// Alias for [`RepresentationNet::forward_pattern`].
pub fn rep_forward(rep: &RepresentationNet, x: &InputPattern) -> Result<Vec<f64>> {
    rep.forward_pattern(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputActivation {
    #[default]
    Sigmoid,
    Linear,
}

impl OutputActivation {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputActivation::Sigmoid => "sigmoid",
            OutputActivation::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "sigmoid" => Ok(OutputActivation::Sigmoid),
            "linear" => Ok(OutputActivation::Linear),
            other => Err(Error::InvalidArgument(format!(
                "unknown output activation {other:?}"
            ))),
        }
    }

    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            OutputActivation::Sigmoid => sigmoid(z),
            OutputActivation::Linear => z,
        }
    }

    /// Derivative expressed through the output value.
    #[inline]
    fn slope(self, out: f64) -> f64 {
        match self {
            OutputActivation::Sigmoid => out * (1.0 - out),
            OutputActivation::Linear => 1.0,
        }
    }
}

/// A task-specific output network `g_i` with no hidden layer.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputNet {
    /// `k` input weights followed by the bias.
    weights: Vec<f64>,
    activation: OutputActivation,
}

impl OutputNet {
    pub fn zeros(input_dim: usize, activation: OutputActivation) -> Self {
        Self {
            weights: vec![0.0; input_dim + 1],
            activation,
        }
    }

    pub fn from_weights(weights: Vec<f64>, activation: OutputActivation) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidArgument(
                "output net needs at least one input weight and a bias".into(),
            ));
        }
        Ok(Self {
            weights,
            activation,
        })
    }

    pub fn uniform<R: Rng + ?Sized>(
        input_dim: usize,
        scale: f64,
        activation: OutputActivation,
        rng: &mut R,
    ) -> Self {
        let weights = (0..=input_dim)
            .map(|_| uniform_weight(scale, rng))
            .collect();
        Self {
            weights,
            activation,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.weights.len() - 1
    }

    /// `W_O`, bias included.
    pub fn weight_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn activation(&self) -> OutputActivation {
        self.activation
    }

    #[inline]
    pub fn forward(&self, h: &[f64]) -> f64 {
        let k = self.input_dim();
        let mut z = self.weights[k];
        for (w, a) in self.weights[..k].iter().zip(h) {
            z += w * a;
        }
        self.activation.apply(z)
    }
}

fn uniform_weight<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> f64 {
    if scale == 0.0 {
        0.0
    } else {
        rng.gen_range(-scale..=scale)
    }
}

/// One representation shared by `n` output networks.
#[derive(Debug, Clone, PartialEq)]
pub struct MultitaskNetwork {
    rep: RepresentationNet,
    outputs: Vec<OutputNet>,
}

impl MultitaskNetwork {
    pub fn new(rep: RepresentationNet, outputs: Vec<OutputNet>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::InvalidArgument(
                "need at least one output network".into(),
            ));
        }
        for g in &outputs {
            if g.input_dim() != rep.output_dim() {
                return Err(Error::DimensionMismatch {
                    expected: rep.output_dim(),
                    actual: g.input_dim(),
                });
            }
        }
        Ok(Self { rep, outputs })
    }

    pub fn rep(&self) -> &RepresentationNet {
        &self.rep
    }

    pub fn rep_mut(&mut self) -> &mut RepresentationNet {
        &mut self.rep
    }

    pub fn outputs(&self) -> &[OutputNet] {
        &self.outputs
    }

    pub fn outputs_mut(&mut self) -> &mut [OutputNet] {
        &mut self.outputs
    }

    pub fn into_parts(self) -> (RepresentationNet, Vec<OutputNet>) {
        (self.rep, self.outputs)
    }

    pub fn task_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn rep_weight_count(&self) -> usize {
        self.rep.weight_count()
    }

    pub fn output_weight_count(&self) -> usize {
        self.rep.output_dim() + 1
    }

    pub fn output(&self, task_index: usize) -> Result<&OutputNet> {
        self.outputs.get(task_index).ok_or(Error::TaskIndex {
            index: task_index,
            count: self.outputs.len(),
        })
    }

    /// `g_i(f(x))`.
    pub fn predict(&self, task_index: usize, x: &InputPattern) -> Result<f64> {
        let g = self.output(task_index)?;
        Ok(g.forward(&self.rep.forward_pattern(x)?))
    }

    pub fn param_count(&self) -> usize {
        self.rep.weight_count()
            + self
                .outputs
                .iter()
                .map(OutputNet::weight_count)
                .sum::<usize>()
    }

    /// All weights: representation layers in order, then each output net.
    pub fn params(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.param_count());
        for layer in &self.rep.layers {
            flat.extend_from_slice(&layer.weights);
        }
        for g in &self.outputs {
            flat.extend_from_slice(&g.weights);
        }
        flat
    }

    pub fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::DimensionMismatch {
                expected: self.param_count(),
                actual: flat.len(),
            });
        }
        let mut rest = flat;
        for layer in &mut self.rep.layers {
            let (head, tail) = rest.split_at(layer.weights.len());
            layer.weights.copy_from_slice(head);
            rest = tail;
        }
        for g in &mut self.outputs {
            let (head, tail) = rest.split_at(g.weights.len());
            g.weights.copy_from_slice(head);
            rest = tail;
        }
        Ok(())
    }

    /// `self -= rate * grad`.
    pub fn apply_gradient(&mut self, grad: &NetworkGrad, rate: f64) {
        for (layer, g) in self.rep.layers.iter_mut().zip(&grad.rep) {
            for (w, d) in layer.weights.iter_mut().zip(g) {
                *w -= rate * d;
            }
        }
        for (out, g) in self.outputs.iter_mut().zip(&grad.outputs) {
            for (w, d) in out.weights.iter_mut().zip(g) {
                *w -= rate * d;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub input_length: usize,
    pub hidden_sizes: Vec<usize>,
    pub rep_dim: usize,
    pub init_scale: f64,
    pub output_activation: OutputActivation,
    pub seed: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            input_length: 10,
            hidden_sizes: vec![8],
            rep_dim: 2,
            init_scale: 0.5,
            output_activation: OutputActivation::Sigmoid,
            seed: 0,
        }
    }
}

impl NetworkConfig {
    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.input_length)
            .chain(self.hidden_sizes.iter().copied())
            .chain(std::iter::once(self.rep_dim))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_length == 0 || self.rep_dim == 0 || self.hidden_sizes.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "layer sizes must be positive, got {:?}",
                self.layer_sizes()
            )));
        }
        if !(self.init_scale >= 0.0 && self.init_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "init_scale must be finite and nonnegative, got {}",
                self.init_scale
            )));
        }
        Ok(())
    }
}

/// Fresh network with `n` output nets, seeded from `config.seed`.
pub fn init_multitask(config: &NetworkConfig, n: usize) -> Result<MultitaskNetwork> {
    init_multitask_with(config, n, &mut ChaCha8Rng::seed_from_u64(config.seed))
}

/// Fresh network drawing every weight i.i.d. uniform on `[-init_scale, init_scale]`.
pub fn init_multitask_with<R: Rng + ?Sized>(
    config: &NetworkConfig,
    n: usize,
    rng: &mut R,
) -> Result<MultitaskNetwork> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one task".into()));
    }
    config.validate()?;
    let mut rep = RepresentationNet::zeros(&config.layer_sizes())?;
    for layer in &mut rep.layers {
        for w in &mut layer.weights {
            *w = uniform_weight(config.init_scale, rng);
        }
    }
    let outputs = (0..n)
        .map(|_| {
            OutputNet::uniform(
                config.rep_dim,
                config.init_scale,
                config.output_activation,
                rng,
            )
        })
        .collect();
    MultitaskNetwork::new(rep, outputs)
}

/// Gradient with the same layout as [`MultitaskNetwork`].
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGrad {
    pub rep: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
}

impl NetworkGrad {
    pub fn zeros_like(net: &MultitaskNetwork) -> Self {
        Self {
            rep: net
                .rep
                .layers
                .iter()
                .map(|l| vec![0.0; l.weights.len()])
                .collect(),
            outputs: net
                .outputs
                .iter()
                .map(|g| vec![0.0; g.weights.len()])
                .collect(),
        }
    }

    fn clear(&mut self) {
        self.rep
            .iter_mut()
            .chain(self.outputs.iter_mut())
            .for_each(|g| g.fill(0.0));
    }

    /// Flattened in the order of [`MultitaskNetwork::params`].
    pub fn flatten(&self) -> Vec<f64> {
        self.rep
            .iter()
            .chain(&self.outputs)
            .flatten()
            .copied()
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.rep
            .iter()
            .chain(&self.outputs)
            .flatten()
            .fold(0.0, |m, g| m.max(g.abs()))
    }
}

/// One weighted squared-error term: `weight * (g_t(f(x_input)) - target)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub input: usize,
    pub target: f64,
    pub weight: f64,
}

/// A weighted squared loss over a shared pool of distinct inputs.
///
/// Repeated inputs are merged into one term, so each epoch runs the
/// representation forward and backward once per distinct input no matter
/// how many tasks or duplicates refer to it.
#[derive(Debug, Clone)]
pub struct WeightedObjective {
    input_dim: usize,
    inputs: Vec<f64>,
    /// Nonzero `(index, value)` entries of each input.
    sparse: Vec<Vec<(usize, f64)>>,
    tasks: Vec<Vec<Term>>,
}

impl WeightedObjective {
    pub fn new(inputs: Vec<Vec<f64>>, tasks: Vec<Vec<Term>>) -> Result<Self> {
        let input_dim = inputs.first().map_or(0, Vec::len);
        if inputs.iter().any(|x| x.len() != input_dim) {
            return Err(Error::InvalidArgument(
                "inputs have differing lengths".into(),
            ));
        }
        for (t, terms) in tasks.iter().enumerate() {
            if terms.is_empty() {
                return Err(Error::EmptyTrainingSet(t));
            }
            if let Some(bad) = terms.iter().find(|term| term.input >= inputs.len()) {
                return Err(Error::InvalidArgument(format!(
                    "term refers to input {}",
                    bad.input
                )));
            }
        }
        if tasks.is_empty() {
            return Err(Error::InvalidArgument(
                "objective needs at least one task".into(),
            ));
        }
        let sparse = inputs
            .iter()
            .map(|x| {
                x.iter()
                    .copied()
                    .enumerate()
                    .filter(|(_, v)| *v != 0.0)
                    .collect()
            })
            .collect();
        Ok(Self {
            input_dim,
            inputs: inputs.into_iter().flatten().collect(),
            sparse,
            tasks,
        })
    }

    /// The multitask empirical error `(1/n) sum_i (1/m_i) sum_j (g_i(f(x_ij)) - y_ij)^2`.
    pub fn from_training_sets(sets: &[TrainingSet]) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::InvalidArgument(
                "need at least one training set".into(),
            ));
        }
        let mut slots: BTreeMap<InputPattern, usize> = BTreeMap::new();
        for set in sets {
            for (x, _) in &set.pairs {
                slots.insert(*x, 0);
            }
        }
        for (i, slot) in slots.values_mut().enumerate() {
            *slot = i;
        }
        let n = sets.len() as f64;
        let mut tasks = Vec::with_capacity(sets.len());
        for (t, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::EmptyTrainingSet(t));
            }
            let mut counts: BTreeMap<(usize, u8), usize> = BTreeMap::new();
            for (x, y) in &set.pairs {
                *counts.entry((slots[x], *y)).or_insert(0) += 1;
            }
            let scale = 1.0 / (n * set.len() as f64);
            tasks.push(
                counts
                    .into_iter()
                    .map(|((input, y), c)| Term {
                        input,
                        target: y as f64,
                        weight: c as f64 * scale,
                    })
                    .collect(),
            );
        }
        let inputs = slots.keys().map(InputPattern::features).collect();
        Self::new(inputs, tasks)
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn tasks(&self) -> &[Vec<Term>] {
        &self.tasks
    }

    pub fn input_count(&self) -> usize {
        if self.input_dim == 0 {
            0
        } else {
            self.inputs.len() / self.input_dim
        }
    }

    pub fn input(&self, index: usize) -> &[f64] {
        &self.inputs[index * self.input_dim..(index + 1) * self.input_dim]
    }

    fn check(&self, net: &MultitaskNetwork) -> Result<()> {
        if net.task_count() != self.tasks.len() {
            return Err(Error::DimensionMismatch {
                expected: net.task_count(),
                actual: self.tasks.len(),
            });
        }
        if net.rep.input_dim() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: net.rep.input_dim(),
                actual: self.input_dim,
            });
        }
        Ok(())
    }

    pub fn loss(&self, net: &MultitaskNetwork) -> Result<f64> {
        self.check(net)?;
        let mut reps = Vec::with_capacity(self.input_count());
        for u in 0..self.input_count() {
            reps.push(net.rep.forward(self.input(u))?);
        }
        let mut loss = 0.0;
        for (g, terms) in net.outputs.iter().zip(&self.tasks) {
            for term in terms {
                let r = g.forward(&reps[term.input]) - term.target;
                loss += term.weight * r * r;
            }
        }
        Ok(loss)
    }

    /// Loss and its exact gradient, written into `grad`.
    pub fn loss_and_grad(
        &self,
        net: &MultitaskNetwork,
        grad: &mut NetworkGrad,
        ws: &mut Workspace,
    ) -> Result<f64> {
        self.check(net)?;
        if grad.rep.len() != net.rep.layers.len() || grad.outputs.len() != net.outputs.len() {
            *grad = NetworkGrad::zeros_like(net);
        } else {
            grad.clear();
        }
        let sizes = net.rep.layer_sizes();
        ws.prepare(&sizes, self.input_count());
        let stride = ws.stride;
        let k = net.rep.output_dim();
        let top = ws.offsets[sizes.len() - 1];

        // Inputs are mostly zeros, so the first layer only visits nonzero
        // entries; skipped terms contribute exactly zero.
        for u in 0..self.input_count() {
            let acts = &mut ws.acts[u * stride..(u + 1) * stride];
            acts[..self.input_dim].copy_from_slice(self.input(u));
            for (l, layer) in net.rep.layers.iter().enumerate() {
                let (prev, next) = acts.split_at_mut(ws.offsets[l + 1]);
                if l == 0 {
                    let cols = layer.fan_in + 1;
                    for (o, row) in layer.weights.chunks_exact(cols).enumerate() {
                        let mut z = row[layer.fan_in];
                        for &(i, v) in &self.sparse[u] {
                            z += row[i] * v;
                        }
                        next[o] = sigmoid(z);
                    }
                } else {
                    layer.forward_into(&prev[ws.offsets[l]..], &mut next[..layer.fan_out]);
                }
            }
        }

        ws.dh.fill(0.0);
        let mut loss = 0.0;
        for ((g, terms), gout) in net.outputs.iter().zip(&self.tasks).zip(&mut grad.outputs) {
            let (w, bias_grad_index) = (&g.weights[..k], k);
            for term in terms {
                let h = &ws.acts[term.input * stride + top..term.input * stride + top + k];
                let p = g.forward(h);
                let r = p - term.target;
                loss += term.weight * r * r;
                let dz = 2.0 * term.weight * r * g.activation.slope(p);
                let dh = &mut ws.dh[term.input * k..(term.input + 1) * k];
                for j in 0..k {
                    gout[j] += dz * h[j];
                    dh[j] += dz * w[j];
                }
                gout[bias_grad_index] += dz;
            }
        }

        let max_units = *sizes.iter().max().unwrap_or(&0);
        ws.delta.resize(max_units, 0.0);
        ws.delta_prev.resize(max_units, 0.0);
        for u in 0..self.input_count() {
            let acts = &ws.acts[u * stride..(u + 1) * stride];
            let dh = &ws.dh[u * k..(u + 1) * k];
            for j in 0..k {
                let a = acts[top + j];
                ws.delta[j] = dh[j] * a * (1.0 - a);
            }
            for l in (0..net.rep.layers.len()).rev() {
                let layer = &net.rep.layers[l];
                let prev = &acts[ws.offsets[l]..ws.offsets[l] + layer.fan_in];
                let g = &mut grad.rep[l];
                let cols = layer.fan_in + 1;
                for o in 0..layer.fan_out {
                    let d = ws.delta[o];
                    let row = &mut g[o * cols..(o + 1) * cols];
                    if l == 0 {
                        for &(i, v) in &self.sparse[u] {
                            row[i] += d * v;
                        }
                    } else {
                        for (gi, a) in row[..layer.fan_in].iter_mut().zip(prev) {
                            *gi += d * a;
                        }
                    }
                    row[layer.fan_in] += d;
                }
                if l > 0 {
                    for i in 0..layer.fan_in {
                        let mut s = 0.0;
                        for o in 0..layer.fan_out {
                            s += ws.delta[o] * layer.weights[o * cols + i];
                        }
                        ws.delta_prev[i] = s * prev[i] * (1.0 - prev[i]);
                    }
                    std::mem::swap(&mut ws.delta, &mut ws.delta_prev);
                }
            }
        }
        Ok(loss)
    }
}

/// Scratch buffers reused across gradient evaluations.
#[derive(Debug, Default, Clone)]
pub struct Workspace {
    offsets: Vec<usize>,
    stride: usize,
    acts: Vec<f64>,
    dh: Vec<f64>,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl Workspace {
    fn prepare(&mut self, sizes: &[usize], inputs: usize) {
        self.offsets.clear();
        let mut off = 0;
        for s in sizes {
            self.offsets.push(off);
            off += s;
        }
        self.stride = off;
        self.acts.resize(off * inputs, 0.0);
        self.dh.resize(sizes[sizes.len() - 1] * inputs, 0.0);
    }
}

/// Exact gradient of the multitask empirical error on `bundles`.
pub fn backprop_grads(net: &MultitaskNetwork, bundles: &[TrainingSet]) -> Result<NetworkGrad> {
    if bundles.len() != net.task_count() {
        return Err(Error::DimensionMismatch {
            expected: net.task_count(),
            actual: bundles.len(),
        });
    }
    let objective = WeightedObjective::from_training_sets(bundles)?;
    let mut grad = NetworkGrad::zeros_like(net);
    objective.loss_and_grad(net, &mut grad, &mut Workspace::default())?;
    Ok(grad)
}
