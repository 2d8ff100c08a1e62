//! Exact error functionals computed by enumerating the whole input space.
//!
//! The true error of a predictor on a task is `sum_x w(x) (h(x) - y(x))^2`
//! over every admissible input, so nothing here is sampled. The
//! representation error averages, over the whole task family, the best true
//! error reachable by training only an output network on top of a fixed
//! representation.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::environment::{
    enumerate_inputs, enumerate_tasks, EnvironmentSpec, InputMeasure, InputPattern, MeasureMode,
    SymmetricTask,
};
use crate::error::{Error, Result};
use crate::network::{
    Layer, MultitaskNetwork, OutputActivation, OutputNet, RepresentationNet, Term,
};
use crate::seeding::mix_seed;
use crate::training::{train_output_objective, OutputObjective, TrainConfig};

/// Exact true error of `predictor` on `task` under `measure`.
pub fn true_error<F>(predictor: F, task: &SymmetricTask, measure: &InputMeasure) -> Result<f64>
where
    F: Fn(&InputPattern) -> Result<f64>,
{
    let mut total = 0.0;
    for x in enumerate_inputs(&measure.spec)? {
        let r = predictor(&x)? - task.eval(&x)? as f64;
        total += measure.weight(&x) * r * r;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub per_task: Vec<f64>,
    pub mean: f64,
    pub mode: MeasureMode,
}

impl ErrorReport {
    fn from_errors(per_task: Vec<f64>, mode: MeasureMode) -> Self {
        let mean = per_task.iter().sum::<f64>() / per_task.len() as f64;
        Self {
            per_task,
            mean,
            mode,
        }
    }

    pub fn write_csv<W: Write>(&self, tasks: &[SymmetricTask], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["task_index", "task", "true_error", "measure"])?;
        for (i, (t, e)) in tasks.iter().zip(&self.per_task).enumerate() {
            w.write_record([
                i.to_string(),
                t.to_string(),
                e.to_string(),
                self.mode.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Exact true error of each `g_i o f` against task `i`, and their mean.
pub fn average_true_error(
    net: &MultitaskNetwork,
    tasks: &[SymmetricTask],
    measure: &InputMeasure,
) -> Result<ErrorReport> {
    if tasks.len() != net.task_count() {
        return Err(Error::DimensionMismatch {
            expected: net.task_count(),
            actual: tasks.len(),
        });
    }
    let mut per_task = vec![0.0; tasks.len()];
    for x in enumerate_inputs(&measure.spec)? {
        let h = net.rep().forward_pattern(&x)?;
        let w = measure.weight(&x);
        for ((err, task), g) in per_task.iter_mut().zip(tasks).zip(net.outputs()) {
            let r = g.forward(&h) - task.eval(&x)? as f64;
            *err += w * r * r;
        }
    }
    Ok(ErrorReport::from_errors(per_task, measure.mode))
}

/// How the infimum over output networks is approximated.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Restart 0 starts from all-zero weights; the rest from uniform draws.
    pub restarts: usize,
    pub init_scale: f64,
    pub activation: OutputActivation,
    pub train: TrainConfig,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            restarts: 5,
            init_scale: 1.0,
            activation: OutputActivation::Sigmoid,
            train: TrainConfig {
                learning_rate: 10.0,
                max_epochs: 20_000,
                target_error: 1e-4,
            },
            seed: 0,
        }
    }
}

/// Starting output net for one oracle restart. Depends only on
/// `(seed, task, restart)`, so raising the restart count only adds candidates.
fn restart_init(cfg: &OracleConfig, k: usize, task: &SymmetricTask, restart: usize) -> OutputNet {
    if restart == 0 {
        return OutputNet::zeros(k, cfg.activation);
    }
    let mut rng =
        ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, &[task.code() as u64, restart as u64]));
    OutputNet::uniform(k, cfg.init_scale, cfg.activation, &mut rng)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationErrorReport {
    pub tasks: Vec<SymmetricTask>,
    /// Best exact true error found for each task.
    pub per_task: Vec<f64>,
    /// Whether some restart reached the oracle's target error.
    pub converged: Vec<bool>,
    pub mean: f64,
    pub restarts: usize,
    pub mode: MeasureMode,
    /// Tasks the representation was trained on, when known.
    pub training_tasks: Vec<SymmetricTask>,
}

impl RepresentationErrorReport {
    /// Mean over the tasks that were not used to train the representation.
    pub fn novel_mean(&self) -> Option<f64> {
        let novel: Vec<f64> = self
            .tasks
            .iter()
            .zip(&self.per_task)
            .filter(|(t, _)| !self.training_tasks.contains(t))
            .map(|(_, e)| *e)
            .collect();
        (!novel.is_empty()).then(|| novel.iter().sum::<f64>() / novel.len() as f64)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["task", "infimum", "converged", "training_task", "measure"])?;
        for ((t, e), c) in self.tasks.iter().zip(&self.per_task).zip(&self.converged) {
            w.write_record([
                t.to_string(),
                e.to_string(),
                c.to_string(),
                self.training_tasks.contains(t).to_string(),
                self.mode.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Approximates the mean over all tasks of the best true error reachable
/// with `rep` held fixed, by multi-restart output-only training on the full
/// measure-weighted input space.
pub fn representation_error(
    rep: &RepresentationNet,
    spec: &EnvironmentSpec,
    measure: &InputMeasure,
    oracle: &OracleConfig,
) -> Result<RepresentationErrorReport> {
    representation_error_for(rep, &enumerate_tasks(spec)?, measure, oracle)
}

/// As [`representation_error`], over an explicit task list.
pub fn representation_error_for(
    rep: &RepresentationNet,
    tasks: &[SymmetricTask],
    measure: &InputMeasure,
    oracle: &OracleConfig,
) -> Result<RepresentationErrorReport> {
    if oracle.restarts == 0 {
        return Err(Error::InvalidArgument(
            "oracle needs at least one restart".into(),
        ));
    }
    if tasks.is_empty() {
        return Err(Error::InvalidArgument("no tasks to evaluate".into()));
    }
    let inputs = enumerate_inputs(&measure.spec)?;
    let features = inputs
        .iter()
        .map(|x| rep.forward_pattern(x))
        .collect::<Result<Vec<_>>>()?;
    let weights = measure.weights(&inputs);
    let k = rep.output_dim();

    let mut per_task = Vec::with_capacity(tasks.len());
    let mut converged = Vec::with_capacity(tasks.len());
    for task in tasks {
        let terms = inputs
            .iter()
            .zip(&weights)
            .enumerate()
            .map(|(i, (x, w))| {
                Ok(Term {
                    input: i,
                    target: task.eval(x)? as f64,
                    weight: *w,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let objective = OutputObjective::new(features.clone(), terms)?;
        let mut best = f64::INFINITY;
        let mut reached = false;
        for restart in 0..oracle.restarts {
            let init = restart_init(oracle, k, task, restart);
            let (g, trace) = train_output_objective(&objective, init, &oracle.train)?;
            best = best.min(objective.loss(&g));
            reached |= trace.converged;
        }
        per_task.push(best);
        converged.push(reached);
    }
    let mean = per_task.iter().sum::<f64>() / per_task.len() as f64;
    Ok(RepresentationErrorReport {
        tasks: tasks.to_vec(),
        per_task,
        converged,
        mean,
        restarts: oracle.restarts,
        mode: measure.mode,
        training_tasks: Vec::new(),
    })
}

/// Hand-built representation with one sigmoid unit per threshold
/// `ones >= c`, `c = ones_min + 1 ..= ones_max`. Every function of the
/// ones-count is an affine function of this code, so each symmetric task is
/// realizable through a single output unit. Larger `sharpness` pushes the
/// units closer to 0/1.
pub fn thermometer_representation(
    spec: &EnvironmentSpec,
    sharpness: f64,
) -> Result<RepresentationNet> {
    spec.validate()?;
    let len = spec.input_length as usize;
    let units = (spec.category_count() - 1).max(1) as usize;
    let mut weights = Vec::with_capacity(units * (len + 1));
    for j in 0..units {
        let threshold = (spec.ones_min + 1 + j as u32) as f64 - 0.5;
        weights.extend(std::iter::repeat(sharpness).take(len));
        weights.push(-sharpness * threshold);
    }
    RepresentationNet::new(vec![Layer::from_weights(len, units, weights)?])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub input: InputPattern,
    pub ones: u32,
    pub output: Vec<f64>,
}

/// Representation output for every admissible input.
pub fn representation_scatter(
    rep: &RepresentationNet,
    spec: &EnvironmentSpec,
) -> Result<Vec<ScatterPoint>> {
    enumerate_inputs(spec)?
        .into_iter()
        .map(|x| {
            Ok(ScatterPoint {
                input: x,
                ones: x.ones(),
                output: rep.forward_pattern(&x)?,
            })
        })
        .collect()
}

pub fn write_scatter_csv<W: Write>(points: &[ScatterPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let k = points.first().map_or(0, |p| p.output.len());
    let mut header = vec!["input".to_string(), "ones".to_string()];
    header.extend((0..k).map(|j| format!("r{j}")));
    w.write_record(&header)?;
    for p in points {
        let mut row = vec![p.input.to_string(), p.ones.to_string()];
        row.extend(p.output.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Nearest-centroid accuracy of recovering the ones-count from the
/// representation output, weighted by `measure`.
///
/// Centroids are fitted on all points and every point is classified.
/// Equidistant centroids are resolved in favour of the category with more
/// measure mass, then the lower ones-count.
const TIE_TOLERANCE: f64 = 1e-12;

pub fn category_separation(points: &[ScatterPoint], measure: &InputMeasure) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty scatter".into()));
    }
    let k = points[0].output.len();
    let mut categories: Vec<u32> = points.iter().map(|p| p.ones).collect();
    categories.sort_unstable();
    categories.dedup();

    let centroids: Vec<Vec<f64>> = categories
        .iter()
        .map(|&c| {
            let members: Vec<&ScatterPoint> = points.iter().filter(|p| p.ones == c).collect();
            (0..k)
                .map(|j| members.iter().map(|p| p.output[j]).sum::<f64>() / members.len() as f64)
                .collect()
        })
        .collect();
    let mass: Vec<f64> = categories
        .iter()
        .map(|&c| measure.category_mass(c))
        .collect();

    let mut total = 0.0;
    let mut correct = 0.0;
    for p in points {
        let w = measure.weight(&p.input);
        total += w;
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in centroids.iter().enumerate() {
            let d: f64 = c
                .iter()
                .zip(&p.output)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let tie = (d - best_d).abs() <= TIE_TOLERANCE;
            if (d < best_d && !tie) || (tie && mass[i] > mass[best]) {
                best = i;
                best_d = d;
            }
        }
        if categories[best] == p.ones {
            correct += w;
        }
    }
    if total == 0.0 {
        return Err(Error::InvalidArgument(
            "scatter carries no measure mass".into(),
        ));
    }
    Ok(correct / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{init_multitask, NetworkConfig};
    use rand::Rng;

    fn category_measure() -> InputMeasure {
        InputMeasure::new(MeasureMode::CategoryUniform, EnvironmentSpec::default()).unwrap()
    }

    fn constant_rep(value: f64) -> RepresentationNet {
        // Zero input weights and a bias b give sigmoid(b) on every unit.
        let bias = (value / (1.0 - value)).ln();
        let mut rep = RepresentationNet::zeros(&[10, 3, 2]).unwrap();
        for layer in rep.layers_mut() {
            let cols = layer.fan_in() + 1;
            let fan_in = layer.fan_in();
            for (i, w) in layer.weights_mut().iter_mut().enumerate() {
                *w = if i % cols == fan_in { bias } else { 0.0 };
            }
        }
        rep
    }

    #[test]
    fn exact_predictor_has_zero_error() {
        let m = category_measure();
        for task in enumerate_tasks(&m.spec).unwrap() {
            let e = true_error(|x| Ok(task.eval(x)? as f64), &task, &m).unwrap();
            assert_eq!(e, 0.0);
        }
    }

    #[test]
    fn half_predictor_has_quarter_error() {
        for mode in [MeasureMode::CategoryUniform, MeasureMode::FlatUniform] {
            let m = InputMeasure::new(mode, EnvironmentSpec::default()).unwrap();
            for task in enumerate_tasks(&m.spec).unwrap() {
                let e = true_error(|_| Ok(0.5), &task, &m).unwrap();
                assert!((e - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn average_error_reports() {
        let m = category_measure();
        let tasks = enumerate_tasks(&m.spec).unwrap();
        let zero = init_multitask(
            &NetworkConfig {
                init_scale: 0.0,
                ..NetworkConfig::default()
            },
            3,
        )
        .unwrap();
        let report = average_true_error(&zero, &tasks[..3], &m).unwrap();
        assert!((report.mean - 0.25).abs() < 1e-12);
        assert_eq!(report.mode, MeasureMode::CategoryUniform);
        assert!(average_true_error(&zero, &tasks[..2], &m).is_err());

        let net = init_multitask(&NetworkConfig::default(), 1).unwrap();
        let single = average_true_error(&net, &tasks[4..5], &m).unwrap();
        let direct = true_error(|x| net.predict(0, x), &tasks[4], &m).unwrap();
        assert!((single.mean - direct).abs() < 1e-15);

        // Same task twice with identical output nets.
        let (rep, outputs) = init_multitask(&NetworkConfig::default(), 1)
            .unwrap()
            .into_parts();
        let twin =
            MultitaskNetwork::new(rep, vec![outputs[0].clone(), outputs[0].clone()]).unwrap();
        let r = average_true_error(&twin, &[tasks[7], tasks[7]], &m).unwrap();
        assert_eq!(r.per_task[0], r.per_task[1]);
        let mean = r.per_task.iter().sum::<f64>() / 2.0;
        assert!((r.mean - mean).abs() < 1e-12);
    }

    #[test]
    fn enumeration_matches_monte_carlo() {
        let m = category_measure();
        let tasks = enumerate_tasks(&m.spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let net = init_multitask(
            &NetworkConfig {
                init_scale: 2.0,
                seed: 31,
                ..NetworkConfig::default()
            },
            1,
        )
        .unwrap();
        let task = tasks[5];
        let exact = true_error(|x| net.predict(0, x), &task, &m).unwrap();
        let draws = 200_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..draws {
            let x = m.sample(&mut rng);
            let l = (net.predict(0, &x).unwrap() - task.eval(&x).unwrap() as f64).powi(2);
            sum += l;
            sq += l * l;
        }
        let mean = sum / draws as f64;
        let se = ((sq / draws as f64 - mean * mean) / draws as f64).sqrt();
        assert!(
            (mean - exact).abs() < 3.0 * se,
            "{mean} vs {exact} (se {se})"
        );
    }

    #[test]
    fn constant_rep_matches_closed_form_infimum() {
        let spec = EnvironmentSpec::default();
        let inputs = enumerate_inputs(&spec).unwrap();
        let rep = constant_rep(0.3);
        for mode in [MeasureMode::CategoryUniform, MeasureMode::FlatUniform] {
            let m = InputMeasure::new(mode, spec).unwrap();
            let oracle = OracleConfig {
                restarts: 2,
                train: TrainConfig {
                    learning_rate: 10.0,
                    max_epochs: 5_000,
                    target_error: 0.0,
                },
                ..OracleConfig::default()
            };
            let report = representation_error(&rep, &spec, &m, &oracle).unwrap();
            for (task, got) in report.tasks.iter().zip(&report.per_task) {
                // min_c sum w (c - y)^2 is attained at c = sum w y.
                let w = m.weights(&inputs);
                let c: f64 = inputs
                    .iter()
                    .zip(&w)
                    .map(|(x, w)| w * task.eval(x).unwrap() as f64)
                    .sum();
                let best: f64 = inputs
                    .iter()
                    .zip(&w)
                    .map(|(x, w)| w * (c - task.eval(x).unwrap() as f64).powi(2))
                    .sum();
                assert!((got - best).abs() < 1e-6, "{mode} {task}: {got} vs {best}");
            }
        }
    }

    #[test]
    fn more_restarts_never_hurt() {
        let spec = EnvironmentSpec::default();
        let m = category_measure();
        let net = init_multitask(
            &NetworkConfig {
                seed: 5,
                init_scale: 2.0,
                ..NetworkConfig::default()
            },
            1,
        )
        .unwrap();
        let base = OracleConfig {
            restarts: 2,
            train: TrainConfig {
                learning_rate: 10.0,
                max_epochs: 300,
                target_error: 0.0,
            },
            ..OracleConfig::default()
        };
        let more = OracleConfig {
            restarts: 7,
            ..base.clone()
        };
        let a = representation_error(net.rep(), &spec, &m, &base).unwrap();
        let b = representation_error(net.rep(), &spec, &m, &more).unwrap();
        for (x, y) in a.per_task.iter().zip(&b.per_task) {
            assert!(y <= x);
        }
        assert!(a.mean <= 0.25 + 1e-6);
        assert!(a.per_task.iter().all(|e| (0.0..=1.0).contains(e)));
    }

    #[test]
    fn task_order_does_not_change_the_mean() {
        let m = category_measure();
        let net = init_multitask(
            &NetworkConfig {
                seed: 6,
                ..NetworkConfig::default()
            },
            1,
        )
        .unwrap();
        let oracle = OracleConfig {
            restarts: 2,
            train: TrainConfig {
                learning_rate: 10.0,
                max_epochs: 200,
                target_error: 0.0,
            },
            ..OracleConfig::default()
        };
        let tasks = enumerate_tasks(&m.spec).unwrap();
        let mut reversed = tasks.clone();
        reversed.reverse();
        let a = representation_error_for(net.rep(), &tasks, &m, &oracle).unwrap();
        let b = representation_error_for(net.rep(), &reversed, &m, &oracle).unwrap();
        assert!((a.mean - b.mean).abs() < 1e-12);
        let mut pa = a.per_task.clone();
        let mut pb = b.per_task.clone();
        pa.sort_by(f64::total_cmp);
        pb.sort_by(f64::total_cmp);
        assert_eq!(pa, pb);
    }

    #[test]
    fn novel_mean_excludes_training_tasks() {
        let spec = EnvironmentSpec::default();
        let tasks = enumerate_tasks(&spec).unwrap();
        let report = RepresentationErrorReport {
            tasks: tasks[..3].to_vec(),
            per_task: vec![0.1, 0.2, 0.3],
            converged: vec![true; 3],
            mean: 0.2,
            restarts: 1,
            mode: MeasureMode::CategoryUniform,
            training_tasks: vec![tasks[0]],
        };
        assert!((report.novel_mean().unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn scatter_shapes() {
        let spec = EnvironmentSpec::default();
        let net = init_multitask(&NetworkConfig::default(), 1).unwrap();
        let points = representation_scatter(net.rep(), &spec).unwrap();
        assert_eq!(points.len(), 385);
        let mut distinct: Vec<u32> = points.iter().map(|p| p.ones).collect();
        distinct.sort_unstable();
        distinct.dedup();
        assert_eq!(distinct, vec![1, 2, 3, 4]);

        let flat = representation_scatter(&constant_rep(0.7), &spec).unwrap();
        assert!(flat.windows(2).all(|w| w[0].output == w[1].output));

        let mut buf = Vec::new();
        write_scatter_csv(&points[..2], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("input,ones,r0,r1\n0000000001,1,"));
    }

    #[test]
    fn separation_of_ideal_and_degenerate_reps() {
        let spec = EnvironmentSpec::default();
        let inputs = enumerate_inputs(&spec).unwrap();
        let corners = [[0.1, 0.1], [0.9, 0.1], [0.9, 0.9], [0.1, 0.9]];
        let ideal: Vec<ScatterPoint> = inputs
            .iter()
            .map(|x| ScatterPoint {
                input: *x,
                ones: x.ones(),
                output: corners[x.ones() as usize - 1].to_vec(),
            })
            .collect();
        let cat = category_measure();
        let flat = InputMeasure::new(MeasureMode::FlatUniform, spec).unwrap();
        assert_eq!(category_separation(&ideal, &cat).unwrap(), 1.0);

        let constant = representation_scatter(&constant_rep(0.4), &spec).unwrap();
        // Four equal shares: ties go to the lowest ones-count.
        assert!((category_separation(&constant, &cat).unwrap() - 0.25).abs() < 1e-12);
        // Flat measure: the four-ones category holds 210/385 of the mass.
        assert!((category_separation(&constant, &flat).unwrap() - 210.0 / 385.0).abs() < 1e-12);
        assert!(category_separation(&[], &cat).is_err());
    }

    #[test]
    fn separation_of_random_outputs_is_near_chance() {
        let spec = EnvironmentSpec::default();
        let inputs = enumerate_inputs(&spec).unwrap();
        let m = category_measure();
        let mut total = 0.0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let points: Vec<ScatterPoint> = inputs
                .iter()
                .map(|x| ScatterPoint {
                    input: *x,
                    ones: x.ones(),
                    output: vec![rng.gen(), rng.gen()],
                })
                .collect();
            total += category_separation(&points, &m).unwrap();
        }
        let mean = total / 20.0;
        assert!((0.2..0.4).contains(&mean), "{mean}");
    }

    #[test]
    fn layer_built_rep_is_accepted() {
        let layer = Layer::from_weights(10, 2, vec![0.0; 22]).unwrap();
        let rep = RepresentationNet::new(vec![layer]).unwrap();
        assert_eq!(rep.output_dim(), 2);
        assert!(Layer::from_weights(10, 2, vec![0.0; 21]).is_err());
    }

    #[test]
    fn thermometer_rep_is_ideal() {
        let spec = EnvironmentSpec::default();
        let rep = thermometer_representation(&spec, 20.0).unwrap();
        assert_eq!(rep.output_dim(), 3);
        for mode in [MeasureMode::CategoryUniform, MeasureMode::FlatUniform] {
            let measure = InputMeasure::new(mode, spec).unwrap();
            let report =
                representation_error(&rep, &spec, &measure, &OracleConfig::default()).unwrap();
            assert!(report.mean <= 0.01, "{mode}: {}", report.mean);
            let points = representation_scatter(&rep, &spec).unwrap();
            assert_eq!(category_separation(&points, &measure).unwrap(), 1.0);
        }
    }

    #[test]
    fn square_code_cannot_realize_its_diagonal_pair() {
        // Thermometer hidden units, then categories 1..4 placed on the
        // corners of a square in cyclic order. The diagonal labelings
        // (parity and its complement) are not linearly separable.
        let spec = EnvironmentSpec::default();
        let hidden = thermometer_representation(&spec, 20.0).unwrap().layers()[0].clone();
        let b = 20.0;
        let top =
            Layer::from_weights(3, 2, vec![b, 0.0, -b, -0.5 * b, 0.0, b, 0.0, -0.5 * b]).unwrap();
        let rep = RepresentationNet::new(vec![hidden, top]).unwrap();
        let measure = category_measure();
        let points = representation_scatter(&rep, &spec).unwrap();
        assert_eq!(category_separation(&points, &measure).unwrap(), 1.0);

        let report = representation_error(&rep, &spec, &measure, &OracleConfig::default()).unwrap();
        for (t, e) in report.tasks.iter().zip(&report.per_task) {
            let name = t.to_string();
            if name == "1010" || name == "0101" {
                assert!(*e > 0.1, "{name}: {e}");
            } else {
                assert!(*e <= 0.01, "{name}: {e}");
            }
        }
        assert!(report.mean > 0.01);
    }
}
