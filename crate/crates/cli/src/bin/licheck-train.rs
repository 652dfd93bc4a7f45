//! Command-line front end for training the license classifier.
//!
//! Writes the fitted model as JSON and prints the evaluation report to
//! stdout (and optionally to a file), so a run leaves both the artifact and
//! the numbers that justify it.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use licheck::train::{train, TrainOptions};
use licheck_core::corpus::Corpus;

#[derive(Parser)]
#[command(name = "licheck-train", version, about = "Train the license classifier")]
struct Args {
    /// Where to write the model JSON.
    #[arg(long, default_value = "model.json")]
    out: PathBuf,

    /// Also write the evaluation report to this file.
    #[arg(long)]
    report: Option<PathBuf>,

    /// Directory with corpus overrides (defaults to the embedded corpus).
    #[arg(long)]
    matrix_dir: Option<PathBuf>,

    #[arg(long, default_value_t = TrainOptions::default().seed)]
    seed: u64,

    #[arg(long, default_value_t = TrainOptions::default().epochs)]
    epochs: usize,

    #[arg(long, default_value_t = TrainOptions::default().learning_rate)]
    learning_rate: f64,

    #[arg(long, default_value_t = TrainOptions::default().momentum)]
    momentum: f64,

    /// Synthetic variants generated per license.
    #[arg(long, default_value_t = TrainOptions::default().variants_per_class)]
    variants: usize,

    /// Posterior the winning class must reach at inference time.
    #[arg(long, default_value_t = TrainOptions::default().posterior_threshold)]
    threshold: f64,
}

fn run(args: Args) -> anyhow::Result<()> {
    let corpus = Corpus::load(args.matrix_dir.as_deref())?;
    let options = TrainOptions {
        seed: args.seed,
        epochs: args.epochs,
        learning_rate: args.learning_rate,
        momentum: args.momentum,
        variants_per_class: args.variants,
        posterior_threshold: args.threshold,
    };
    let outcome = train(&corpus, &options)?;

    std::fs::write(&args.out, outcome.model.to_json())
        .with_context(|| format!("writing {}", args.out.display()))?;
    if let Some(path) = &args.report {
        std::fs::write(path, &outcome.report)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{}", outcome.report);
    println!("model written to {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("licheck-train: {error:#}");
            ExitCode::from(2)
        }
    }
}
