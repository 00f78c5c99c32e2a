//! `seizure` command-line front end.

pub mod commands;
pub mod config;
pub mod error;
pub mod synth;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use seizure_core::evaluation::{Problem, Scheme};

use crate::commands::*;
use crate::config::Config;
use crate::error::CliError;
use crate::synth::SynthSpec;

#[derive(Debug, Parser)]
#[command(name = "seizure", version, about = "Seizure-type classification from scalp EEG")]
pub struct Cli {
    /// TOML file with [pipeline] and [gbdt] sections.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for splitting, boosting and synthesis; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// 7class or 5class.
    #[arg(long, global = true)]
    pub problem: Option<Problem>,
    /// seizure or patient.
    #[arg(long, global = true)]
    pub scheme: Option<Scheme>,
    /// Worker threads; defaults to the number of logical CPUs.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Output file, or directory for `evaluate` and `gen-synthetic`.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Montage, resample and segment a corpus into a SEGT archive.
    Preprocess {
        /// Corpus directory; overrides pipeline.data_root.
        data_root: Option<PathBuf>,
    },
    /// Extract DTCWT sub-band features into a FEAT file.
    Features {
        archive: PathBuf,
        /// Also write the matrix as CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Cross-validate the classifier and write JSON, text and CSV reports.
    Evaluate {
        features: PathBuf,
        /// Number of folds; defaults to 5 (seizure) or 3 (patient).
        #[arg(long)]
        folds: Option<usize>,
    },
    /// Per-feature ANOVA F-values and model importance.
    Analyze { features: PathBuf },
    /// Fit one model on all rows and save it.
    Train {
        features: PathBuf,
        /// Random-search trials before the final fit; 0 uses the config as is.
        #[arg(long, default_value_t = 0)]
        search: usize,
        /// Also write a JSON dump of the model.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Class posteriors for every row of a feature file, as CSV.
    Predict { model: PathBuf, features: PathBuf },
    /// Write a synthetic EDF corpus with annotations.
    GenSynthetic {
        /// Comma-separated labels, or 5class / 7class.
        #[arg(long, default_value = "5class")]
        classes: String,
        #[arg(long, default_value_t = 4)]
        patients: usize,
        #[arg(long, default_value_t = 3)]
        events: usize,
        /// Spread of per-patient log-gains; 0 disables.
        #[arg(long, default_value_t = 0.0)]
        confound: f64,
    },
    /// Print the DTCWT filter coefficients as JSON.
    DumpFilters,
}

impl Cli {
    /// Config file (or defaults) with command-line overrides applied.
    pub fn config(&self) -> Result<Config, CliError> {
        let mut cfg = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        if let Some(seed) = self.seed {
            cfg.pipeline.seed = seed;
            cfg.gbdt.seed = seed;
        }
        if let Some(p) = self.problem {
            cfg.pipeline.problem = p;
        }
        if let Some(s) = self.scheme {
            cfg.pipeline.scheme = s;
        }
        cfg.validate().map_err(CliError::Usage)?;
        Ok(cfg)
    }

    fn out_or(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = cli.config()?;
    match &cli.command {
        Command::Preprocess { data_root } => {
            let root = data_root
                .clone()
                .or(cfg.pipeline.data_root.clone())
                .ok_or_else(|| CliError::Usage("no data root given on the command line or in the config".into()))?;
            let out = cli.out_or("segments.segt");
            let summary = cmd_preprocess(&cfg, &root, &out)?;
            print!("{}", summary.table());
            println!("wrote {}", out.display());
        }
        Command::Features { archive, csv } => {
            let out = cli.out_or("features.feat");
            let n = cmd_features(&cfg, archive, &out, csv.as_deref())?;
            println!("wrote {n} feature row(s) to {}", out.display());
        }
        Command::Evaluate { features, folds } => {
            if folds.is_some() {
                cfg.pipeline.folds = *folds;
                cfg.validate().map_err(CliError::Usage)?;
            }
            let out = cli.out_or("report");
            let report = cmd_evaluate(&cfg, features, &out)?;
            print!("{}", report.to_text());
            println!("wrote reports to {}", out.display());
        }
        Command::Analyze { features } => {
            let out = cli.out_or("analysis.json");
            let analysis = cmd_analyze(&cfg, features, &out)?;
            print!("{}", analysis.to_text());
            println!("wrote {}", out.display());
        }
        Command::Train { features, search, json } => {
            let out = cli.out_or("model.gbdt");
            let model = cmd_train(&cfg, features, &out, *search, json.as_deref())?;
            println!("trained {} round(s) over {} class(es); wrote {}", model.n_rounds(), model.classes.len(), out.display());
        }
        Command::Predict { model, features } => {
            let out = cli.out_or("predictions.csv");
            let s = cmd_predict(model, features, &out)?;
            println!("{} row(s), {} of {} scored correct; wrote {}", s.rows, s.correct, s.scored, out.display());
        }
        Command::GenSynthetic { classes, patients, events, confound } => {
            if !(*confound >= 0.0 && confound.is_finite()) {
                return Err(CliError::Usage("--confound must be a non-negative number".into()));
            }
            let spec = SynthSpec {
                classes: parse_classes(classes)?,
                patients_per_class: *patients,
                events_per_patient: *events,
                seed: cfg.pipeline.seed,
                confound: *confound,
            };
            let out = cli.out_or("synthetic");
            let files = cmd_gen_synthetic(&spec, &out)?;
            let n_events: usize = files.iter().map(|f| f.events.len()).sum();
            println!("wrote {} recording(s) with {n_events} event(s) to {}", files.len(), out.display());
        }
        Command::DumpFilters => {
            let json = filter_json()?;
            match &cli.out {
                Some(path) => std::fs::write(path, json).map_err(CliError::io(path))?,
                None => println!("{json}"),
            }
        }
    }
    Ok(())
}

/// Parse arguments, configure logging and the worker pool, run, and map the
/// outcome to a process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return 1;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

