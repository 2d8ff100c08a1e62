//! Command-line driver. Exit codes: 0 success, 1 usage or configuration
//! error, 2 data error.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::checkpoint::Checkpoint;
use crate::config::{parse_usize_list, RunConfig};
use crate::environment::{InputMeasure, SymmetricTask};
use crate::error::Error;
use crate::evaluation::{category_separation, representation_scatter, write_scatter_csv};
use crate::experiments::{
    default_threads, extract_representations, median_examples_needed, read_records,
    rep_error_curve, run_cells, surface_summary, transfer_row, transfer_study_with, RepArchive,
    SweepSink, TransferMode, TRANSFER_HEADER, TRANSFER_SUCCESS,
};
use crate::svg::{heatmap_svg, scatter_svg};
use crate::theory::{bound_table, write_bound_table, BoundInputs};

pub const OUT_ENV: &str = "BIAS_LEARN_OUT";
const DEFAULT_OUT: &str = "bias-learn-out";

#[derive(Debug, Parser)]
#[command(
    name = "bias-learn",
    version,
    about = "Multitask representation learning on symmetric Boolean functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutArg {
    /// Output directory [default: $BIAS_LEARN_OUT or ./bias-learn-out]
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArg {
    fn dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// Run configuration (key = value lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. --set train.max_epochs=1000
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::read(p).map_err(CliError::usage)?,
            None => RunConfig::default(),
        };
        for o in &self.overrides {
            cfg.apply_override(o).map_err(CliError::usage)?;
        }
        cfg.validate().map_err(CliError::usage)?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train every (n, m, seed) cell and write results.csv, manifest.txt and checkpoints
    Sweep {
        /// Run configuration (key = value lines)
        #[arg(long)]
        config: PathBuf,
        /// Override a configuration key, e.g. --set train.max_epochs=1000
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[command(flatten)]
        out: OutArg,
        /// Suppress per-cell progress on stderr
        #[arg(long)]
        quiet: bool,
        /// Worker threads [default: available cores]
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Render a results CSV as a heatmap of mean generalization error
    SurfacePlot {
        #[arg(long)]
        results: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Archive representations from runs below the generalization threshold
    ExtractReps {
        /// Sweep output directory (manifest.txt, results.csv, checkpoints/)
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Representation error of archived representations, grouped by n
    RepError {
        /// Directory of archived representations
        #[arg(long)]
        archives: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Scatter plot of a 2-D representation's outputs
    RepScatter {
        #[arg(long)]
        checkpoint: PathBuf,
        /// Only write the raw outputs as CSV (any representation dimension)
        #[arg(long)]
        csv_only: bool,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Frozen-representation versus from-scratch learning of held-out tasks
    Transfer {
        #[arg(long)]
        archive: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Sample-complexity bounds as CSV
    Bounds {
        /// Representation weight count
        #[arg(long, default_value_t = 106.0)]
        w_r: f64,
        /// Output network weight count
        #[arg(long, default_value_t = 3.0)]
        w_o: f64,
        /// Task counts: list (1,5,9) or range (1:21:4)
        #[arg(long, default_value = "1:21:4")]
        n: String,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        c_cap: f64,
        #[arg(long, default_value_t = 1.0)]
        c_sample: f64,
        /// Write to a file instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Config(_) | Error::InvalidArgument(_) => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::from(e).into()
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Error::from(e).into()
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError {
        code: 2,
        message: format!("cannot create {}: {e}", dir.display()),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        CliError {
            code: 2,
            message: format!("cannot write {}: {e}", path.display()),
        }
    })?))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sweep {
            config,
            overrides,
            out,
            quiet,
            threads,
        } => cmd_sweep(
            &ConfigArgs {
                config: Some(config),
                overrides,
            },
            &out.dir(),
            quiet,
            threads.unwrap_or_else(default_threads),
        ),
        Command::SurfacePlot { results, out } => cmd_surface_plot(&results, &out.dir()),
        Command::ExtractReps {
            run,
            threshold,
            out,
        } => cmd_extract_reps(&run, threshold, &out.dir()),
        Command::RepError {
            archives,
            config,
            out,
        } => cmd_rep_error(&archives, &config.load()?, &out.dir()),
        Command::RepScatter {
            checkpoint,
            csv_only,
            config,
            out,
        } => cmd_rep_scatter(&checkpoint, csv_only, &config.load()?, &out.dir()),
        Command::Transfer {
            archive,
            config,
            out,
        } => cmd_transfer(&archive, &config.load()?, &out.dir()),
        Command::Bounds {
            w_r,
            w_o,
            n,
            epsilon,
            delta,
            c_cap,
            c_sample,
            output,
        } => {
            let ns = parse_usize_list(&n).map_err(CliError::usage)?;
            let base = BoundInputs {
                rep_weights: w_r,
                output_weights: w_o,
                tasks: 1,
                epsilon,
                delta,
                c_cap,
                c_sample,
            };
            let rows = bound_table(&base, ns).map_err(CliError::usage)?;
            match output {
                Some(path) => write_bound_table(&base, &rows, create(&path)?)?,
                None => write_bound_table(&base, &rows, std::io::stdout().lock())?,
            }
            Ok(())
        }
    }
}

fn cmd_sweep(config: &ConfigArgs, out: &Path, quiet: bool, threads: usize) -> Result<(), CliError> {
    let cfg = config.load()?;
    create_dir(out)?;
    std::fs::write(out.join("manifest.txt"), cfg.to_manifest())?;
    let mut sink = SweepSink::create(
        &out.join("results.csv"),
        &out.join("checkpoints"),
        cfg.checkpoint_gate,
    )?;
    let total = cfg.grid.cell_count();
    let mut done = 0;
    let records = run_cells(&cfg, &cfg.grid.cells(), threads, |outcome| {
        sink.accept(outcome)?;
        done += 1;
        if !quiet {
            let r = &outcome.record;
            eprintln!(
                "[{done}/{total}] n={} m={} seed={} gen_error={:.5} converged={} epochs={}",
                r.n, r.m, r.seed, r.gen_error, r.converged, r.epochs
            );
        }
        Ok(())
    })?;
    let diverged = records.iter().filter(|r| r.diverged()).count();
    println!(
        "{} cells written to {} ({diverged} diverged)",
        records.len(),
        out.join("results.csv").display()
    );
    Ok(())
}

fn cmd_surface_plot(results: &Path, out: &Path) -> Result<(), CliError> {
    let records = read_records(results, Default::default())?;
    let summary = surface_summary(&records)?;
    create_dir(out)?;
    summary.write_csv(create(&out.join("surface_summary.csv"))?)?;
    std::fs::write(out.join("surface.svg"), heatmap_svg(&summary))?;
    println!(
        "{}x{} surface written to {}",
        summary.n_values().len(),
        summary.m_values().len(),
        out.join("surface.svg").display()
    );
    Ok(())
}

fn cmd_extract_reps(run: &Path, threshold: Option<f64>, out: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::read(&run.join("manifest.txt")).map_err(CliError::usage)?;
    let threshold = threshold.unwrap_or(cfg.extract_threshold);
    let records = read_records(&run.join("results.csv"), cfg.measure)?;
    let archives = extract_representations(&records, &run.join("checkpoints"), &cfg, threshold)?;
    let dir = out.join("archives");
    create_dir(&dir)?;
    let mut w = csv::Writer::from_writer(create(&out.join("archives.csv"))?);
    w.write_record(["id", "n", "m", "seed", "gen_error", "file"])?;
    for a in &archives {
        let path = a.write(&dir)?;
        w.write_record([
            a.id(),
            a.n.to_string(),
            a.m.to_string(),
            a.seed.to_string(),
            a.gen_error.to_string(),
            path.file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned(),
        ])?;
    }
    w.flush()?;
    println!(
        "{} representations archived in {}",
        archives.len(),
        dir.display()
    );
    Ok(())
}

fn load_archives(dir: &Path, cfg: &RunConfig) -> Result<Vec<RepArchive>, CliError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ckpt"))
        .collect();
    paths.sort();
    Ok(paths
        .iter()
        .map(|p| RepArchive::read(p, &cfg.env))
        .collect::<Result<Vec<_>, _>>()?)
}

fn cmd_rep_error(archives: &Path, cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let archives = load_archives(archives, cfg)?;
    let measure = InputMeasure::new(cfg.measure, cfg.env)?;
    let curve = rep_error_curve(&archives, &measure, &cfg.oracle, &cfg.grid.n_values)?;
    for n in &curve.skipped {
        eprintln!("note: no archived representation for n={n}; skipped");
    }
    create_dir(out)?;
    curve.write_csv(create(&out.join("rep_error_curve.csv"))?)?;
    for (id, report) in &curve.reports {
        report.write_csv(create(&out.join(format!("rep_error_{id}.csv")))?)?;
    }
    curve.write_csv(std::io::stdout().lock())?;
    Ok(())
}

fn cmd_rep_scatter(
    checkpoint: &Path,
    csv_only: bool,
    cfg: &RunConfig,
    out: &Path,
) -> Result<(), CliError> {
    let ckpt = Checkpoint::read(checkpoint, &cfg.env)?;
    let rep = ckpt.network.rep();
    if !csv_only && rep.output_dim() != 2 {
        return Err(CliError {
            code: 2,
            message: format!(
                "representation has dimension {}, scatter plots need 2; rerun with --csv-only to export the raw outputs",
                rep.output_dim()
            ),
        });
    }
    let points = representation_scatter(rep, &cfg.env)?;
    create_dir(out)?;
    write_scatter_csv(&points, create(&out.join("rep_scatter.csv"))?)?;
    let measure = InputMeasure::new(cfg.measure, cfg.env)?;
    let separation = category_separation(&points, &measure)?;
    if !csv_only {
        let title = checkpoint
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        std::fs::write(out.join("rep_scatter.svg"), scatter_svg(&points, &title)?)?;
    }
    println!(
        "{} points, category separation {separation:.4}",
        points.len()
    );
    Ok(())
}

fn cmd_transfer(archive: &Path, cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let archive = RepArchive::read(archive, &cfg.env)?;
    let tasks = cfg
        .transfer_tasks
        .iter()
        .map(|t| SymmetricTask::parse(&cfg.env, t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::usage)?;
    create_dir(out)?;
    let mut w = csv::Writer::from_writer(create(&out.join("transfer.csv"))?);
    w.write_record(TRANSFER_HEADER)?;
    w.flush()?;
    let records = transfer_study_with(&archive, cfg, &tasks, |r| {
        w.write_record(transfer_row(r))?;
        w.flush()?;
        Ok(())
    })?;
    let mut s = csv::Writer::from_writer(create(&out.join("transfer_summary.csv"))?);
    s.write_record(["mode", "median_examples_needed"])?;
    for mode in [TransferMode::FrozenRep, TransferMode::FromScratch] {
        let median = median_examples_needed(&records, mode, TRANSFER_SUCCESS).unwrap_or(f64::NAN);
        s.write_record([mode.as_str().to_string(), median.to_string()])?;
        println!("{}: median examples needed {median}", mode.as_str());
    }
    s.flush()?;
    Ok(())
}
