//! The symmetric-function experiment: learning surfaces over `(n, m)`,
//! representation extraction, representation-error curves and transfer to
//! held-out tasks.
//!
//! Every cell derives its randomness from `mix_seed(global, [n, m, seed])`,
//! so any cell can be recomputed alone and dropping cells never changes the
//! others.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::checkpoint::Checkpoint;
use crate::config::RunConfig;
use crate::environment::{
    build_training_set, enumerate_tasks, sample_tasks, InputMeasure, MeasureMode, SymmetricTask,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    average_true_error, representation_error_for, true_error, OracleConfig,
    RepresentationErrorReport,
};
use crate::network::{
    init_multitask, MultitaskNetwork, NetworkConfig, OutputNet, RepresentationNet,
};
use crate::seeding::mix_seed;
use crate::training::{train_multitask, train_output_only};

pub use crate::config::SweepGrid;

pub const RESULTS_HEADER: [&str; 7] = [
    "n",
    "m",
    "seed",
    "gen_error",
    "train_error",
    "converged",
    "epochs",
];

const NET_STREAM: u64 = 0x6e6574;
const TRANSFER_STREAM: u64 = 0x7866_6572;

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceRecord {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// Exact multitask generalization error; NaN when training diverged.
    pub gen_error: f64,
    pub train_error: f64,
    pub converged: bool,
    pub epochs: usize,
    pub measure_mode: MeasureMode,
}

impl SurfaceRecord {
    pub fn diverged(&self) -> bool {
        !self.gen_error.is_finite()
    }

    fn csv_row(&self) -> [String; 7] {
        [
            self.n.to_string(),
            self.m.to_string(),
            self.seed.to_string(),
            self.gen_error.to_string(),
            self.train_error.to_string(),
            self.converged.to_string(),
            self.epochs.to_string(),
        ]
    }
}

/// One trained cell. `network` is kept only for non-divergent runs.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub record: SurfaceRecord,
    pub tasks: Vec<SymmetricTask>,
    pub network: Option<MultitaskNetwork>,
}

pub fn cell_seed(global: u64, n: usize, m: usize, seed: u64) -> u64 {
    mix_seed(global, &[n as u64, m as u64, seed])
}

/// Samples `n` tasks with replacement, `m` examples each, trains jointly and
/// evaluates the exact generalization error.
pub fn run_cell(cfg: &RunConfig, n: usize, m: usize, seed: u64) -> Result<CellOutcome> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "cell needs n, m >= 1, got ({n}, {m})"
        )));
    }
    let measure = InputMeasure::new(cfg.measure, cfg.env)?;
    let base = cell_seed(cfg.seed, n, m, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    let tasks = sample_tasks(&cfg.env, n, &mut rng)?;
    let sets = tasks
        .iter()
        .map(|t| build_training_set(*t, m, &measure, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let net_cfg = NetworkConfig {
        seed: mix_seed(base, &[NET_STREAM]),
        ..cfg.network.clone()
    };
    let net = init_multitask(&net_cfg, n)?;
    let mut record = SurfaceRecord {
        n,
        m,
        seed,
        gen_error: f64::NAN,
        train_error: f64::NAN,
        converged: false,
        epochs: 0,
        measure_mode: cfg.measure,
    };
    match train_multitask(net, &sets, &cfg.train) {
        Ok((net, trace)) => {
            record.gen_error = average_true_error(&net, &tasks, &measure)?.mean;
            record.train_error = trace.final_error;
            record.converged = trace.converged;
            record.epochs = trace.epochs();
            Ok(CellOutcome {
                record,
                tasks,
                network: Some(net),
            })
        }
        Err(Error::Diverged { epoch }) => {
            record.epochs = epoch;
            Ok(CellOutcome {
                record,
                tasks,
                network: None,
            })
        }
        Err(e) => Err(e),
    }
}

/// Runs every cell of `cfg.grid` in `(n, m, seed)` order, handing each
/// outcome to `on_cell` in that order as soon as it is available.
pub fn run_sweep<F>(cfg: &RunConfig, on_cell: F) -> Result<Vec<SurfaceRecord>>
where
    F: FnMut(&CellOutcome) -> Result<()>,
{
    cfg.validate()?;
    run_cells(cfg, &cfg.grid.cells(), default_threads(), on_cell)
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs the given `(n, m, seed)` cells on up to `threads` worker threads.
/// Outcomes reach `on_cell` in the order of `cells` regardless of which
/// worker finishes first, so output is identical for any thread count.
pub fn run_cells<F>(
    cfg: &RunConfig,
    cells: &[(usize, usize, u64)],
    threads: usize,
    mut on_cell: F,
) -> Result<Vec<SurfaceRecord>>
where
    F: FnMut(&CellOutcome) -> Result<()>,
{
    let threads = threads.clamp(1, cells.len().max(1));
    let mut records = Vec::with_capacity(cells.len());
    if threads == 1 {
        for &(n, m, seed) in cells {
            let outcome = run_cell(cfg, n, m, seed)?;
            on_cell(&outcome)?;
            records.push(outcome.record);
        }
        return Ok(records);
    }

    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    std::thread::scope(|scope| {
        let (tx, rx) = mpsc::channel::<(usize, Result<CellOutcome>)>();
        for _ in 0..threads {
            let tx = tx.clone();
            let (next, stop) = (&next, &stop);
            scope.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(n, m, seed)) = cells.get(i) else {
                    break;
                };
                if tx.send((i, run_cell(cfg, n, m, seed))).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let mut emitted = 0;
        let result = (|| -> Result<()> {
            for (i, outcome) in rx.iter() {
                pending.insert(i, outcome?);
                while let Some(outcome) = pending.remove(&emitted) {
                    on_cell(&outcome)?;
                    records.push(outcome.record);
                    emitted += 1;
                }
            }
            Ok(())
        })();
        if result.is_err() {
            stop.store(true, Ordering::Relaxed);
        }
        result
    })?;
    Ok(records)
}

pub fn checkpoint_file_name(n: usize, m: usize, seed: u64) -> String {
    format!("cell_n{n}_m{m}_s{seed}.ckpt")
}

/// Writes results CSV rows (flushed per cell) and gated checkpoints.
pub struct SweepSink {
    writer: csv::Writer<BufWriter<File>>,
    checkpoint_dir: PathBuf,
    gate: f64,
}

impl SweepSink {
    pub fn create(results: &Path, checkpoint_dir: &Path, gate: f64) -> Result<Self> {
        std::fs::create_dir_all(checkpoint_dir)?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(results)?));
        writer.write_record(RESULTS_HEADER)?;
        writer.flush()?;
        Ok(Self {
            writer,
            checkpoint_dir: checkpoint_dir.to_path_buf(),
            gate,
        })
    }

    pub fn accept(&mut self, outcome: &CellOutcome) -> Result<()> {
        let r = &outcome.record;
        if let Some(net) = &outcome.network {
            if r.train_error <= self.gate {
                Checkpoint::new(net.clone(), outcome.tasks.clone())?
                    .with_meta("n", r.n)
                    .with_meta("m", r.m)
                    .with_meta("seed", r.seed)
                    .with_meta("gen_error", r.gen_error)
                    .with_meta("train_error", r.train_error)
                    .with_meta("measure", r.measure_mode)
                    .write(
                        &self
                            .checkpoint_dir
                            .join(checkpoint_file_name(r.n, r.m, r.seed)),
                    )?;
            }
        }
        self.writer.write_record(r.csv_row())?;
        self.writer.flush()?;
        Ok(())
    }
}

pub fn write_records<W: Write>(records: &[SurfaceRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a results CSV; errors name the offending line.
pub fn parse_records(text: &str, mode: MeasureMode, path: &Path) -> Result<Vec<SurfaceRecord>> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes());
    let mut rows = reader.records();
    match rows.next() {
        Some(Ok(h)) if h.iter().eq(RESULTS_HEADER) => {}
        Some(Ok(_)) | None => {
            return Err(err(
                1,
                format!("expected header `{}`", RESULTS_HEADER.join(",")),
            ))
        }
        Some(Err(e)) => return Err(err(1, e.to_string())),
    }
    let mut out = Vec::new();
    for row in rows {
        let row =
            row.map_err(|e| err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() != RESULTS_HEADER.len() {
            return Err(err(
                line,
                format!(
                    "expected {} fields, got {}",
                    RESULTS_HEADER.len(),
                    row.len()
                ),
            ));
        }
        fn field<T: std::str::FromStr>(
            row: &csv::StringRecord,
            i: usize,
        ) -> std::result::Result<T, String> {
            row[i]
                .trim()
                .parse()
                .map_err(|_| format!("bad {} `{}`", RESULTS_HEADER[i], &row[i]))
        }
        let parsed = (|| -> std::result::Result<SurfaceRecord, String> {
            Ok(SurfaceRecord {
                n: field(&row, 0)?,
                m: field(&row, 1)?,
                seed: field(&row, 2)?,
                gen_error: field(&row, 3)?,
                train_error: field(&row, 4)?,
                converged: field(&row, 5)?,
                epochs: field(&row, 6)?,
                measure_mode: mode,
            })
        })()
        .map_err(|m| err(line, m))?;
        out.push(parsed);
    }
    if out.is_empty() {
        return Err(err(1, "no records".into()));
    }
    Ok(out)
}

pub fn read_records(path: &Path, mode: MeasureMode) -> Result<Vec<SurfaceRecord>> {
    parse_records(&std::fs::read_to_string(path)?, mode, path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCell {
    pub n: usize,
    pub m: usize,
    /// NaN when every run in the cell diverged.
    pub mean: f64,
    pub stderr: f64,
    pub count: usize,
    pub diverged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSummary {
    /// Sorted by `(n, m)`.
    pub cells: Vec<SummaryCell>,
}

impl SurfaceSummary {
    pub fn n_values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.cells.iter().map(|c| c.n).collect();
        v.dedup();
        v
    }

    pub fn m_values(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.cells.iter().map(|c| c.m).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn get(&self, n: usize, m: usize) -> Option<&SummaryCell> {
        self.cells.iter().find(|c| c.n == n && c.m == m)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "m", "mean_gen_error", "stderr", "count", "diverged"])?;
        for c in &self.cells {
            w.write_record([
                c.n.to_string(),
                c.m.to_string(),
                c.mean.to_string(),
                c.stderr.to_string(),
                c.count.to_string(),
                c.diverged.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Mean and standard error of the generalization error per `(n, m)` cell,
/// excluding divergent runs.
pub fn surface_summary(records: &[SurfaceRecord]) -> Result<SurfaceSummary> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to summarize".into()));
    }
    let mut groups: BTreeMap<(usize, usize), Vec<&SurfaceRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.n, r.m)).or_default().push(r);
    }
    let cells = groups
        .into_iter()
        .map(|((n, m), mut rs)| {
            // Fixed summation order regardless of record order.
            rs.sort_by_key(|r| r.seed);
            let values: Vec<f64> = rs
                .iter()
                .filter(|r| !r.diverged())
                .map(|r| r.gen_error)
                .collect();
            let (mean, stderr) = mean_and_stderr(&values);
            SummaryCell {
                n,
                m,
                mean,
                stderr,
                count: values.len(),
                diverged: rs.len() - values.len(),
            }
        })
        .collect();
    Ok(SurfaceSummary { cells })
}

/// A representation extracted from a run whose exact generalization error
/// fell below the extraction threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct RepArchive {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub gen_error: f64,
    pub threshold: f64,
    pub measure_mode: MeasureMode,
    pub tasks: Vec<SymmetricTask>,
    pub network: MultitaskNetwork,
}

impl RepArchive {
    pub fn id(&self) -> String {
        format!("n{}_m{}_s{}", self.n, self.m, self.seed)
    }

    pub fn rep(&self) -> &RepresentationNet {
        self.network.rep()
    }

    pub fn file_name(&self) -> String {
        format!("rep_{}.ckpt", self.id())
    }

    pub fn to_checkpoint(&self) -> Result<Checkpoint> {
        Ok(Checkpoint::new(self.network.clone(), self.tasks.clone())?
            .with_meta("kind", "archive")
            .with_meta("n", self.n)
            .with_meta("m", self.m)
            .with_meta("seed", self.seed)
            .with_meta("gen_error", self.gen_error)
            .with_meta("threshold", self.threshold)
            .with_meta("measure", self.measure_mode))
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(self.file_name());
        self.to_checkpoint()?.write(&path)?;
        Ok(path)
    }

    /// Rebuilds an archive from a checkpoint, recomputing its generalization
    /// error and rejecting it unless it matches and lies below the threshold.
    pub fn from_checkpoint(
        ckpt: Checkpoint,
        spec: &crate::environment::EnvironmentSpec,
    ) -> Result<Self> {
        let mode: MeasureMode = ckpt
            .meta
            .get("measure")
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or_default();
        let measure = InputMeasure::new(mode, *spec)?;
        let recorded = ckpt.meta_f64("gen_error")?;
        let threshold = ckpt.meta_f64("threshold").unwrap_or(f64::INFINITY);
        let recomputed = average_true_error(&ckpt.network, &ckpt.tasks, &measure)?.mean;
        if (recomputed - recorded).abs() > 1e-12 * recorded.abs().max(1.0) {
            return Err(Error::ArchiveVerification(format!(
                "recorded generalization error {recorded} but checkpoint gives {recomputed}"
            )));
        }
        if !(recomputed < threshold) {
            return Err(Error::ArchiveVerification(format!(
                "generalization error {recomputed} is not below the threshold {threshold}"
            )));
        }
        Ok(Self {
            n: ckpt.meta_usize("n")?,
            m: ckpt.meta_usize("m")?,
            seed: ckpt.meta_usize("seed")? as u64,
            gen_error: recomputed,
            threshold,
            measure_mode: mode,
            tasks: ckpt.tasks,
            network: ckpt.network,
        })
    }

    pub fn read(path: &Path, spec: &crate::environment::EnvironmentSpec) -> Result<Self> {
        Self::from_checkpoint(Checkpoint::read(path, spec)?, spec)
    }
}

/// Archives every run with exact generalization error below `threshold`.
///
/// Runs that passed the checkpoint gate must have a checkpoint in
/// `checkpoint_dir`; its recomputed error must agree with the record.
pub fn extract_representations(
    records: &[SurfaceRecord],
    checkpoint_dir: &Path,
    cfg: &RunConfig,
    threshold: f64,
) -> Result<Vec<RepArchive>> {
    let mut out = Vec::new();
    for r in records {
        if r.diverged() || !(r.gen_error < threshold) {
            continue;
        }
        let path = checkpoint_dir.join(checkpoint_file_name(r.n, r.m, r.seed));
        if !path.exists() {
            if r.train_error <= cfg.checkpoint_gate {
                return Err(Error::ArchiveVerification(format!(
                    "missing checkpoint {}",
                    path.display()
                )));
            }
            continue;
        }
        let ckpt = Checkpoint::read(&path, &cfg.env)?.with_meta("threshold", threshold);
        let archive = RepArchive::from_checkpoint(ckpt, &cfg.env)?;
        if (archive.gen_error - r.gen_error).abs() > 1e-12 * r.gen_error.abs().max(1.0) {
            return Err(Error::ArchiveVerification(format!(
                "{}: results file says {}, checkpoint gives {}",
                path.display(),
                r.gen_error,
                archive.gen_error
            )));
        }
        out.push(archive);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub archives: usize,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepErrorCurve {
    pub points: Vec<CurvePoint>,
    pub reports: Vec<(String, RepresentationErrorReport)>,
    /// Requested `n` values with no archive.
    pub skipped: Vec<usize>,
}

impl RepErrorCurve {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "archives", "mean_rep_error", "stderr"])?;
        for p in &self.points {
            w.write_record([
                p.n.to_string(),
                p.archives.to_string(),
                p.mean.to_string(),
                p.stderr.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mean representation error over all tasks, per source `n`.
pub fn rep_error_curve(
    archives: &[RepArchive],
    measure: &InputMeasure,
    oracle: &OracleConfig,
    n_values: &[usize],
) -> Result<RepErrorCurve> {
    let tasks = enumerate_tasks(&measure.spec)?;
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut reports = Vec::new();
    for a in archives {
        let mut report = representation_error_for(a.rep(), &tasks, measure, oracle)?;
        report.training_tasks = a.tasks.clone();
        groups.entry(a.n).or_default().push(report.mean);
        reports.push((a.id(), report));
    }
    let points = groups
        .iter()
        .map(|(&n, values)| {
            let (mean, stderr) = mean_and_stderr(values);
            CurvePoint {
                n,
                archives: values.len(),
                mean,
                stderr,
            }
        })
        .collect();
    let skipped = n_values
        .iter()
        .copied()
        .filter(|n| !groups.contains_key(n))
        .collect();
    Ok(RepErrorCurve {
        points,
        reports,
        skipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransferMode {
    FrozenRep,
    FromScratch,
}

impl TransferMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TransferMode::FrozenRep => "frozen-rep",
            TransferMode::FromScratch => "from-scratch",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferRecord {
    pub source: String,
    pub task: SymmetricTask,
    pub m_novel: usize,
    pub seed: u64,
    /// Exact true error; NaN when training diverged.
    pub error: f64,
    pub converged: bool,
    pub mode: TransferMode,
}

/// Tasks of the family not among `training`.
pub fn held_out_tasks(
    spec: &crate::environment::EnvironmentSpec,
    training: &[SymmetricTask],
) -> Result<Vec<SymmetricTask>> {
    let held: Vec<SymmetricTask> = enumerate_tasks(spec)?
        .into_iter()
        .filter(|t| !training.contains(t))
        .collect();
    if held.is_empty() {
        return Err(Error::NoHeldOutTasks);
    }
    Ok(held)
}

/// Frozen-representation versus from-scratch learning of held-out tasks.
///
/// Both modes see the same training set for a given `(task, m, seed)`. The
/// from-scratch baseline is a fresh single-task network of the same
/// architecture.
pub fn transfer_study(
    archive: &RepArchive,
    cfg: &RunConfig,
    tasks: &[SymmetricTask],
) -> Result<Vec<TransferRecord>> {
    transfer_study_with(archive, cfg, tasks, |_| Ok(()))
}

/// As [`transfer_study`], reporting each record as it completes.
pub fn transfer_study_with<F>(
    archive: &RepArchive,
    cfg: &RunConfig,
    tasks: &[SymmetricTask],
    mut on_record: F,
) -> Result<Vec<TransferRecord>>
where
    F: FnMut(&TransferRecord) -> Result<()>,
{
    let held = held_out_tasks(&cfg.env, &archive.tasks)?;
    let tasks: Vec<SymmetricTask> = if tasks.is_empty() {
        held
    } else {
        tasks.to_vec()
    };
    if let Some(t) = tasks.iter().find(|t| archive.tasks.contains(t)) {
        return Err(Error::InvalidArgument(format!(
            "task {t} was a training task of {}",
            archive.id()
        )));
    }
    let measure = InputMeasure::new(cfg.measure, cfg.env)?;
    let rep = archive.rep();
    let mut out = Vec::new();
    for task in &tasks {
        for &m in &cfg.transfer_m_values {
            for &seed in &cfg.transfer_seeds {
                let base = mix_seed(
                    cfg.seed,
                    &[TRANSFER_STREAM, task.code() as u64, m as u64, seed],
                );
                let mut rng = ChaCha8Rng::seed_from_u64(base);
                let set = build_training_set(*task, m, &measure, &mut rng)?;

                let mut init_rng = ChaCha8Rng::seed_from_u64(mix_seed(base, &[1]));
                let init = OutputNet::uniform(
                    rep.output_dim(),
                    cfg.network.init_scale,
                    cfg.network.output_activation,
                    &mut init_rng,
                );
                let (error, converged) = match train_output_only(rep, &set, init, &cfg.train) {
                    Ok((g, trace)) => (
                        true_error(|x| Ok(g.forward(&rep.forward_pattern(x)?)), task, &measure)?,
                        trace.converged,
                    ),
                    Err(Error::Diverged { .. }) => (f64::NAN, false),
                    Err(e) => return Err(e),
                };
                let frozen = TransferRecord {
                    source: archive.id(),
                    task: *task,
                    m_novel: m,
                    seed,
                    error,
                    converged,
                    mode: TransferMode::FrozenRep,
                };
                on_record(&frozen)?;
                out.push(frozen);

                let net_cfg = NetworkConfig {
                    seed: mix_seed(base, &[2]),
                    ..cfg.network.clone()
                };
                let net = init_multitask(&net_cfg, 1)?;
                let (error, converged) =
                    match train_multitask(net, std::slice::from_ref(&set), &cfg.train) {
                        Ok((net, trace)) => (
                            average_true_error(&net, std::slice::from_ref(task), &measure)?.mean,
                            trace.converged,
                        ),
                        Err(Error::Diverged { .. }) => (f64::NAN, false),
                        Err(e) => return Err(e),
                    };
                let scratch = TransferRecord {
                    source: archive.id(),
                    task: *task,
                    m_novel: m,
                    seed,
                    error,
                    converged,
                    mode: TransferMode::FromScratch,
                };
                on_record(&scratch)?;
                out.push(scratch);
            }
        }
    }
    Ok(out)
}

/// True error below which a novel task counts as learnt.
pub const TRANSFER_SUCCESS: f64 = 0.01;

pub const TRANSFER_HEADER: [&str; 7] = [
    "source",
    "task",
    "m_novel",
    "seed",
    "true_error",
    "converged",
    "mode",
];

pub fn transfer_row(r: &TransferRecord) -> [String; 7] {
    [
        r.source.clone(),
        r.task.to_string(),
        r.m_novel.to_string(),
        r.seed.to_string(),
        r.error.to_string(),
        r.converged.to_string(),
        r.mode.as_str().to_string(),
    ]
}

pub fn write_transfer_csv<W: Write>(records: &[TransferRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRANSFER_HEADER)?;
    for r in records {
        w.write_record(transfer_row(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Smallest `m_novel` reaching error below `threshold`, per `(task, seed)`,
/// for one mode. `None` means no `m_novel` in the grid was enough.
pub fn examples_needed(
    records: &[TransferRecord],
    mode: TransferMode,
    threshold: f64,
) -> BTreeMap<(SymmetricTask, u64), Option<usize>> {
    let mut out: BTreeMap<(SymmetricTask, u64), Option<usize>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.mode == mode) {
        let entry = out.entry((r.task, r.seed)).or_insert(None);
        if r.error < threshold {
            *entry = Some(entry.map_or(r.m_novel, |m| m.min(r.m_novel)));
        }
    }
    out
}

/// Median of [`examples_needed`], counting "never" as infinitely many.
pub fn median_examples_needed(
    records: &[TransferRecord],
    mode: TransferMode,
    threshold: f64,
) -> Option<f64> {
    let mut values: Vec<f64> = examples_needed(records, mode, threshold)
        .into_values()
        .map(|m| m.map_or(f64::INFINITY, |m| m as f64))
        .collect();
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len();
    Some(if k % 2 == 1 {
        values[k / 2]
    } else {
        let (a, b) = (values[k / 2 - 1], values[k / 2]);
        if b.is_infinite() {
            b
        } else {
            (a + b) / 2.0
        }
    })
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            actual: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("need at least two points".into()));
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let mean = (xs.len() as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::EnvironmentSpec;

    fn tiny() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.network.hidden_sizes = vec![4];
        cfg.train.max_epochs = 300;
        cfg.grid = SweepGrid {
            n_values: vec![1, 3],
            m_values: vec![5, 11],
            seeds: vec![0, 1],
        };
        cfg.seed = 99;
        cfg
    }

    #[test]
    fn cells_are_reproducible_in_isolation() {
        let cfg = tiny();
        let all = run_sweep(&cfg, |_| Ok(())).unwrap();
        assert_eq!(all.len(), 8);
        let again = run_cell(&cfg, 3, 11, 1).unwrap().record;
        let found = all
            .iter()
            .find(|r| r.n == 3 && r.m == 11 && r.seed == 1)
            .unwrap();
        assert_eq!(found.gen_error.to_bits(), again.gen_error.to_bits());
        assert_eq!(found, &again);

        let mut sub = cfg.clone();
        sub.grid.n_values = vec![3];
        sub.grid.seeds = vec![1];
        let part = run_sweep(&sub, |_| Ok(())).unwrap();
        for r in &part {
            assert!(all.contains(r));
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = tiny();
        let cells = [(3, 11, 0), (1, 5, 1), (3, 5, 1), (1, 11, 0)];
        let mut order = Vec::new();
        let serial = run_cells(&cfg, &cells, 1, |_| Ok(())).unwrap();
        let parallel = run_cells(&cfg, &cells, 3, |o| {
            order.push((o.record.n, o.record.m, o.record.seed));
            Ok(())
        })
        .unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(order, cells);
        let failing = run_cells(&cfg, &cells, 2, |_| Err(Error::Config("stop".into())));
        assert!(failing.is_err());
    }

    #[test]
    fn records_are_in_range() {
        for r in run_sweep(&tiny(), |_| Ok(())).unwrap() {
            assert!((0.0..=1.0).contains(&r.gen_error));
            assert!(r.epochs >= 1 && r.epochs <= 300);
            assert_eq!(r.converged, r.train_error <= 0.005);
        }
    }

    #[test]
    fn divergent_cells_are_flagged() {
        let mut cfg = tiny();
        cfg.network.output_activation = crate::network::OutputActivation::Linear;
        cfg.train.learning_rate = 1e300;
        let outcome = run_cell(&cfg, 1, 5, 0).unwrap();
        assert!(outcome.record.diverged());
        assert!(outcome.network.is_none());
        let summary = surface_summary(&[outcome.record.clone()]).unwrap();
        assert_eq!(summary.cells[0].diverged, 1);
        assert_eq!(summary.cells[0].count, 0);
        let mut buf = Vec::new();
        write_records(&[outcome.record.clone()], &mut buf).unwrap();
        let back = parse_records(
            std::str::from_utf8(&buf).unwrap(),
            cfg.measure,
            Path::new("r"),
        )
        .unwrap();
        assert!(back[0].diverged());
    }

    fn record(n: usize, m: usize, seed: u64, gen: f64) -> SurfaceRecord {
        SurfaceRecord {
            n,
            m,
            seed,
            gen_error: gen,
            train_error: 0.0,
            converged: true,
            epochs: 1,
            measure_mode: MeasureMode::CategoryUniform,
        }
    }

    #[test]
    fn summary_statistics() {
        let single = surface_summary(&[record(1, 1, 0, 0.3)]).unwrap();
        assert_eq!(single.cells[0].mean, 0.3);
        assert_eq!(single.cells[0].stderr, 0.0);

        let rs = vec![
            record(1, 1, 0, 0.1),
            record(1, 1, 1, 0.3),
            record(5, 1, 0, 0.2),
            record(1, 11, 0, f64::NAN),
            record(1, 11, 1, 0.05),
        ];
        let s = surface_summary(&rs).unwrap();
        let c = s.get(1, 1).unwrap();
        assert!((c.mean - 0.2).abs() < 1e-15);
        assert!((c.stderr - 0.1).abs() < 1e-15);
        assert_eq!(s.get(1, 11).unwrap().diverged, 1);
        assert_eq!(s.n_values(), vec![1, 5]);
        assert_eq!(s.m_values(), vec![1, 11]);

        let mut rev = rs.clone();
        rev.reverse();
        assert_eq!(surface_summary(&rev).unwrap(), s);
        assert!(surface_summary(&[]).is_err());
    }

    #[test]
    fn results_csv_round_trip_and_errors() {
        let rs = vec![record(1, 1, 0, 0.123456789012345), record(5, 11, 2, 1e-17)];
        let mut buf = Vec::new();
        write_records(&rs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,m,seed,gen_error,train_error,converged,epochs\n"));
        assert_eq!(
            parse_records(&text, MeasureMode::CategoryUniform, Path::new("r")).unwrap(),
            rs
        );

        let header_only = "n,m,seed,gen_error,train_error,converged,epochs\n";
        assert!(parse_records(header_only, MeasureMode::CategoryUniform, Path::new("r")).is_err());
        let bad = format!("{text}1,2,x,0.1,0.1,true,3\n");
        match parse_records(&bad, MeasureMode::CategoryUniform, Path::new("r")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn extraction_filters_and_verifies() {
        let mut cfg = tiny();
        cfg.checkpoint_gate = 1.0;
        let dir = tempfile::tempdir().unwrap();
        let ckpts = dir.path().join("ckpt");
        let results = dir.path().join("results.csv");
        let mut sink = SweepSink::create(&results, &ckpts, cfg.checkpoint_gate).unwrap();
        let records = run_sweep(&cfg, |o| sink.accept(o)).unwrap();
        drop(sink);
        assert_eq!(read_records(&results, cfg.measure).unwrap(), records);

        assert!(extract_representations(&records, &ckpts, &cfg, 0.0)
            .unwrap()
            .is_empty());
        let all = extract_representations(&records, &ckpts, &cfg, 1.0).unwrap();
        assert_eq!(all.len(), records.len());
        let cut = records.iter().map(|r| r.gen_error).sum::<f64>() / records.len() as f64;
        let some = extract_representations(&records, &ckpts, &cfg, cut).unwrap();
        assert!(some.iter().all(|a| a.gen_error < cut));
        assert_eq!(
            some.len(),
            records.iter().filter(|r| r.gen_error < cut).count()
        );

        let archive_dir = dir.path().join("archives");
        std::fs::create_dir_all(&archive_dir).unwrap();
        let path = some[0].write(&archive_dir).unwrap();
        assert_eq!(RepArchive::read(&path, &cfg.env).unwrap(), some[0]);

        // Tampering with a weight is caught on load.
        let text = std::fs::read_to_string(&path).unwrap();
        let tampered: String = text
            .lines()
            .map(|l| {
                if l.starts_with("output 0 ") {
                    "output 0 9 9 9".to_string()
                } else {
                    l.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        std::fs::write(&path, tampered).unwrap();
        assert!(matches!(
            RepArchive::read(&path, &cfg.env),
            Err(Error::ArchiveVerification(_))
        ));
    }

    fn archive_for(tasks: Vec<SymmetricTask>) -> RepArchive {
        let cfg = NetworkConfig {
            hidden_sizes: vec![4],
            ..Default::default()
        };
        RepArchive {
            n: tasks.len(),
            m: 1,
            seed: 0,
            gen_error: 0.0,
            threshold: 0.01,
            measure_mode: MeasureMode::CategoryUniform,
            network: init_multitask(&cfg, tasks.len()).unwrap(),
            tasks,
        }
    }

    #[test]
    fn transfer_requires_held_out_tasks() {
        let spec = EnvironmentSpec::default();
        let all = enumerate_tasks(&spec).unwrap();
        let cfg = tiny();
        assert!(matches!(
            transfer_study(&archive_for(all.clone()), &cfg, &[]),
            Err(Error::NoHeldOutTasks)
        ));
        let archive = archive_for(all[..13].to_vec());
        assert_eq!(
            held_out_tasks(&spec, &archive.tasks).unwrap(),
            vec![all[13]]
        );
        assert!(transfer_study(&archive, &cfg, &[all[0]]).is_err());
    }

    #[test]
    fn frozen_transfer_leaves_rep_alone() {
        let spec = EnvironmentSpec::default();
        let all = enumerate_tasks(&spec).unwrap();
        let mut cfg = tiny();
        cfg.transfer_m_values = vec![1, 11];
        cfg.transfer_seeds = vec![0, 1];
        let archive = archive_for(all[..12].to_vec());
        let before = archive.clone();
        let records = transfer_study(&archive, &cfg, &[]).unwrap();
        assert_eq!(archive, before);
        assert_eq!(records.len(), 2 * 2 * 2 * 2);
        assert!(records.iter().all(|r| (0.0..=1.0).contains(&r.error)));
        let again = transfer_study(&archive, &cfg, &[all[13]]).unwrap();
        let subset: Vec<_> = records
            .iter()
            .filter(|r| r.task == all[13])
            .cloned()
            .collect();
        assert_eq!(again, subset);
    }

    #[test]
    fn medians_treat_never_as_infinite() {
        let spec = EnvironmentSpec::default();
        let t = enumerate_tasks(&spec).unwrap()[0];
        let rec = |m, seed, error| TransferRecord {
            source: "s".into(),
            task: t,
            m_novel: m,
            seed,
            error,
            converged: true,
            mode: TransferMode::FrozenRep,
        };
        let rs = vec![
            rec(1, 0, 0.5),
            rec(11, 0, 0.001),
            rec(21, 0, 0.0),
            rec(1, 1, 0.002),
            rec(1, 2, 0.5),
            rec(11, 2, 0.5),
        ];
        let needed = examples_needed(&rs, TransferMode::FrozenRep, 0.01);
        assert_eq!(needed[&(t, 0)], Some(11));
        assert_eq!(needed[&(t, 1)], Some(1));
        assert_eq!(needed[&(t, 2)], None);
        assert_eq!(
            median_examples_needed(&rs, TransferMode::FrozenRep, 0.01),
            Some(11.0)
        );
        assert_eq!(
            median_examples_needed(&rs, TransferMode::FromScratch, 0.01),
            None
        );
        let two = vec![rec(1, 0, 0.0), rec(1, 1, 0.5)];
        assert_eq!(
            median_examples_needed(&two, TransferMode::FrozenRep, 0.01),
            Some(f64::INFINITY)
        );
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 0.5]).unwrap() + 1.0).abs() < 1e-15);
        // Ties get average ranks: ranks (1, 2.5, 2.5) against (1, 2, 3).
        let r = spearman(&[1.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((r - 0.75f64.sqrt() / 1.0).abs() < 1e-12, "{r}");
        assert!(spearman(&[1.0], &[1.0]).is_err());
    }
}
