//! `qck` — train, evaluate, and analyze the quantum centroid-kernel
//! classifier from the command line.

mod commands;
mod config;
mod model_file;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "qck",
    version,
    about = "Quantum centroid-kernel binary classifier",
    after_help = "Set QCK_THREADS to cap worker parallelism."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model from a config file and write it to disk.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Output model path.
        #[arg(long)]
        out: PathBuf,
        /// Override the config's training seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Human-readable table instead of key=value lines.
        #[arg(long)]
        pretty: bool,
    },
    /// Score a labeled CSV with a trained model and report AUC/accuracy.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        pretty: bool,
    },
    /// Label new samples with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Write predictions here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pretty: bool,
    },
    /// Run the training-free RBF centroid baseline on the config's split.
    Baseline {
        #[arg(long)]
        config: PathBuf,
        /// RBF width; defaults to 1 / (d * variance).
        #[arg(long)]
        gamma: Option<f64>,
        /// Override the config's split seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        pretty: bool,
    },
    /// Compare circuit-evaluation counts of the centroid-kernel schedule
    /// against a pairwise kernel.
    Count {
        #[arg(long)]
        n_train: u64,
        #[arg(long)]
        n_epochs: u64,
        #[arg(long)]
        n_kao: u64,
        #[arg(long)]
        n_co: u64,
        #[arg(long)]
        pretty: bool,
    },
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("QCK_THREADS") {
        match value.parse::<usize>() {
            Ok(threads) if threads >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid QCK_THREADS={value}"),
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Train {
            config,
            out,
            seed,
            pretty,
        } => commands::cmd_train(&config, &out, seed, pretty),
        Command::Eval {
            model,
            data,
            pretty,
        } => commands::cmd_eval(&model, &data, pretty),
        Command::Predict {
            model,
            data,
            out,
            pretty,
        } => commands::cmd_predict(&model, &data, out.as_deref(), pretty),
        Command::Baseline {
            config,
            gamma,
            seed,
            pretty,
        } => commands::cmd_baseline(&config, gamma, seed, pretty),
        Command::Count {
            n_train,
            n_epochs,
            n_kao,
            n_co,
            pretty,
        } => commands::cmd_count(n_train, n_epochs, n_kao, n_co, pretty),
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_thread_pool();
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
