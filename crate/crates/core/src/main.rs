use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bigram_blocks::pipeline::{report, Overrides, Pipeline, PipelineConfig};
use bigram_blocks::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "bigram-blocks", version, about = "Keyword bi-gram networks and blockmodels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Pipeline configuration (TOML or JSON)
    config: PathBuf,
    /// Override the random seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of local-search restarts
    #[arg(long)]
    restarts: Option<usize>,
    /// Override the output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Record stage durations in the manifest
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every stage
    Run(Common),
    /// Normalize, spell-correct, filter and lemmatize the corpus
    Preprocess(Common),
    /// Build the bag of words and bi-gram network
    Network(Common),
    /// Extract and reduce the keyword subnetworks
    Extract(Common),
    /// Blockmodel each subnetwork
    Blockmodel(Common),
    /// Keyword-set frequencies per document
    Timeseries(Common),
    /// Summarize and verify an output directory
    Report(Common),
}

fn execute(cli: Cli) -> Result<()> {
    let (name, common) = match &cli.command {
        Command::Run(c) => ("run", c),
        Command::Preprocess(c) => ("preprocess", c),
        Command::Network(c) => ("network", c),
        Command::Extract(c) => ("extract", c),
        Command::Blockmodel(c) => ("blockmodel", c),
        Command::Timeseries(c) => ("timeseries", c),
        Command::Report(c) => ("report", c),
    };
    if let Some(t) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let mut config = PipelineConfig::load(&common.config)?;
    config.apply(&Overrides {
        seed: common.seed,
        restarts: common.restarts,
        output: common.out.clone(),
    });

    if name == "report" {
        let (text, bad) = report(&config.output)?;
        print!("{text}");
        if !bad.is_empty() {
            for path in &bad {
                eprintln!("modified or unlisted: {path}");
            }
            return Err(Error::Invariant(format!("{} files fail verification", bad.len())));
        }
        return Ok(());
    }

    let mut pipeline = Pipeline::new(config)?;
    pipeline.record_timings = common.timings;
    let started = std::time::Instant::now();
    match name {
        "run" => pipeline.run()?,
        "preprocess" => {
            pipeline.preprocess()?;
        }
        "network" => {
            pipeline.network()?;
        }
        "extract" => {
            pipeline.extract()?;
        }
        "blockmodel" => {
            pipeline.blockmodel()?;
        }
        "timeseries" => {
            pipeline.timeseries()?;
        }
        _ => unreachable!(),
    }
    if let Some(m) = bigram_blocks::pipeline::RunManifest::load(pipeline.out())? {
        for w in &m.warnings {
            eprintln!("warning: {w}");
        }
    }
    eprintln!("{name} finished in {:.2?}", started.elapsed());
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
