//! Command-line front end: validate configs, run experiments, sweep
//! hyperparameters, generate synthetic corpora, and re-render reports.
//!
//! Logging is controlled by the `FACETFILTER_LOG` environment variable
//! (standard `env_logger` syntax, e.g. `FACETFILTER_LOG=debug`).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use facetfilter::baselines::LearnerKind;
use facetfilter::corpus::synth::{synth_corpus, SynthSpec};
use facetfilter::error::{Error, Result};
use facetfilter::experiment::{
    load_config, load_data, read_results, render_report, run_experiment, run_sweep, with_pool,
    write_results, write_sweep,
};

#[derive(Parser)]
#[command(name = "facetfilter", version, about = "Adaptive faceted-feedback document filtering")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a config file and its referenced data without running.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the configured learners over the testing topics.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads, 0 = one per CPU (overrides the config).
        #[arg(long)]
        jobs: Option<usize>,
        /// Run a single learner instead of the configured list.
        #[arg(long)]
        learner: Option<LearnerKind>,
    },
    /// Grid-search hyperparameters on the tuning topics.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Generate a synthetic corpus, topics, and qrels.
    Synth {
        #[arg(long)]
        config: PathBuf,
        /// RNG seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory, default `synth-out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-render the text report from an existing results directory.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
}

/// Synthetic-generation config: a seed plus the generator spec.
#[derive(Deserialize)]
struct SynthFileConfig {
    #[serde(default)]
    seed: u64,
    #[serde(flatten)]
    spec: SynthSpec,
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn cmd_validate(config: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let data = load_data(&cfg)?;
    println!(
        "ok: {} documents, {} topics, {} learners, {} testing topics",
        data.prepared.len(),
        data.topics.len(),
        cfg.learners.len(),
        cfg.testing_topics.len()
    );
    Ok(())
}

fn cmd_run(
    config: &Path,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    learner: Option<LearnerKind>,
) -> Result<()> {
    let mut cfg = load_config(config)?;
    if let Some(l) = learner {
        cfg.learners = vec![l];
    }
    let out_dir = out.unwrap_or_else(|| cfg.out_dir.clone());
    let jobs = jobs.unwrap_or(cfg.jobs);
    let data = load_data(&cfg)?;
    let results = with_pool(jobs, || {
        run_experiment(&cfg, &data, &cfg.testing_topics)
    })?;
    write_results(&out_dir, &results)?;
    print!("{}", render_report(&results));
    println!("results written to {}", out_dir.display());
    Ok(())
}

fn cmd_sweep(config: &Path, out: Option<PathBuf>, jobs: Option<usize>) -> Result<()> {
    let cfg = load_config(config)?;
    let out_dir = out.unwrap_or_else(|| cfg.out_dir.clone());
    let jobs = jobs.unwrap_or(cfg.jobs);
    let data = load_data(&cfg)?;
    let outcomes = with_pool(jobs, || run_sweep(&cfg, &data))?;
    write_sweep(&out_dir, &outcomes)?;
    for o in &outcomes {
        println!(
            "{}: best macro T11SU {:.4} at λ=({}, {}, {}, {}), t=({}, {}), μ={}, θ={}",
            o.learner.tag(),
            o.objective,
            o.best.lambda1,
            o.best.lambda2,
            o.best.lambda3,
            o.best.lambda4,
            o.best.t_suff,
            o.best.t_nec,
            o.best.prior_mu,
            o.best.threshold
        );
    }
    println!("sweep written to {}", out_dir.display());
    Ok(())
}

fn cmd_synth(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<()> {
    let text = fs::read_to_string(config).map_err(|e| Error::Io {
        path: config.to_path_buf(),
        source: e,
    })?;
    let file_cfg: SynthFileConfig = serde_json::from_str(&text)?;
    let seed = seed.unwrap_or(file_cfg.seed);
    let out_dir = out.unwrap_or_else(|| PathBuf::from("synth-out"));
    let (corpus, topics, qrels) = synth_corpus(&file_cfg.spec, seed)?;

    fs::create_dir_all(&out_dir).map_err(|e| Error::Io {
        path: out_dir.clone(),
        source: e,
    })?;
    let mut corpus_lines = String::new();
    for d in &corpus.docs {
        corpus_lines.push_str(&serde_json::to_string(d)?);
        corpus_lines.push('\n');
    }
    write_file(&out_dir.join("corpus.jsonl"), &corpus_lines)?;
    write_file(
        &out_dir.join("topics.json"),
        &serde_json::to_string_pretty(&topics)?,
    )?;
    let mut qrels_lines = String::new();
    for t in &topics {
        for d in &corpus.docs {
            if qrels.is_relevant(&t.topic_id, &d.doc_id) {
                qrels_lines.push_str(&format!("{} 0 {} 1\n", t.topic_id, d.doc_id));
            }
        }
    }
    write_file(&out_dir.join("qrels.txt"), &qrels_lines)?;
    println!(
        "wrote {} documents, {} topics to {}",
        corpus.len(),
        topics.len(),
        out_dir.display()
    );
    Ok(())
}

fn cmd_report(out: &Path) -> Result<()> {
    let results = read_results(out)?;
    let report = render_report(&results);
    write_file(&out.join("report.txt"), &report)?;
    print!("{report}");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("FACETFILTER_LOG")).init();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Validate { config } => cmd_validate(&config),
        Cmd::Run {
            config,
            out,
            jobs,
            learner,
        } => cmd_run(&config, out, jobs, learner),
        Cmd::Sweep { config, out, jobs } => cmd_sweep(&config, out, jobs),
        Cmd::Synth { config, seed, out } => cmd_synth(&config, seed, out),
        Cmd::Report { out } => cmd_report(&out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
