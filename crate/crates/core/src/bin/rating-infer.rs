use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rating_inference::app::{cmd_evaluate, cmd_predict, cmd_prepare, cmd_train, EvaluateFlags, RunConfig};
use rating_inference::corpus::LabelScale;
use rating_inference::pipeline::Method;

#[derive(Parser)]
#[command(name = "rating-infer", version, about = "Rating inference experiments on review corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a raw corpus and write class counts and vocabulary overlap.
    Prepare {
        /// Index file, directory with index.tsv, or a scale-data author directory.
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Number of classes; read from --config when given.
        #[arg(long, conflicts_with = "config")]
        classes: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Cross-validate the configured methods and write reports.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: one per core).
        #[arg(long)]
        jobs: Option<usize>,
        /// Choose (k, alpha) on the test folds; a diagnostic upper bound.
        #[arg(long)]
        oracle_tuning: bool,
    },
    /// Fit one method on a whole corpus and save the pipeline.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        method: Method,
        /// Position of the corpus in the config's `corpora` list.
        #[arg(long, default_value_t = 0)]
        corpus: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Label documents with a saved pipeline.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// File of `id<TAB>text` lines or a directory of .txt files.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> rating_inference::Result<ExitCode> {
    match cli.command {
        Command::Prepare {
            input,
            out,
            classes,
            config,
        } => {
            let n = match (classes, config) {
                (Some(n), _) => n,
                (None, Some(c)) => RunConfig::load(&c)?.num_classes,
                (None, None) => 3,
            };
            let stats = cmd_prepare(&input, &out, LabelScale::new(n)?)?;
            println!("{}: {} documents, class counts {:?}", stats.name, stats.documents, stats.class_counts);
        }
        Command::Evaluate {
            config,
            out,
            seed,
            jobs,
            oracle_tuning,
        } => {
            let flags = EvaluateFlags {
                out,
                seed,
                jobs,
                oracle_tuning,
            };
            let summary = cmd_evaluate(RunConfig::load(&config)?, &flags)?;
            for r in &summary.reports {
                println!("{}\t{}\t{:.4}\t{:.4}", r.dataset, r.method, r.mean_accuracy, r.mean_l1);
            }
            for f in &summary.failures {
                eprintln!("FAILED {}\t{}\t{}", f.dataset, f.method, f.error);
            }
            return Ok(ExitCode::from(summary.exit_code() as u8));
        }
        Command::Train {
            config,
            method,
            corpus,
            out,
            seed,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let p = cmd_train(&cfg, method, corpus, &out)?;
            match p.config() {
                Some(c) => println!("trained {method}: k = {}, alpha = {}", c.k, c.alpha),
                None => println!("trained {method}"),
            }
        }
        Command::Predict { model, input, out } => {
            let n = cmd_predict(&model, &input, &out)?;
            println!("labeled {n} documents");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
