//! `ltg`: measure how structured long texts are and run the challenge server.
//!
//! Exit status is 0 on success, 1 for usage, I/O and embedding-file errors,
//! and 2 when the text itself cannot be measured (too short, no vocabulary
//! overlap, unusable autocorrelation curve).

mod output;

use std::collections::HashSet;
use std::fs;
use std::io::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use ltg_core::{analyze_text, text_curve, tokenize, AnalysisConfig, EmbeddingTable, GridMode};
use ltg_service::{AppState, Challenge, ChallengeConfig};
use rayon::prelude::*;

use output::{render_corpus, render_curve, render_report, CorpusRow, OutputFormat};

#[derive(Debug, Parser)]
#[command(name = "ltg", version, about = "Text structuredness from embedding autocorrelation decay")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the GAPELMAPER metric for one text file.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Tabulate the metric for every file in a directory.
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Print the autocorrelation curve of one text as `tau,c` CSV.
    Curve {
        file: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
    },
    /// Run the challenge HTTP server.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct MetricArgs {
    /// Whitespace-separated `word v1 .. vd` embedding file.
    #[arg(long, env = "LTG_EMBEDDINGS")]
    embeddings: PathBuf,
    #[arg(long, default_value_t = 10)]
    tau_min: usize,
    #[arg(long, default_value_t = 10_000)]
    tau_max: usize,
    /// Lags used for fitting: `geometric20` or `all`.
    #[arg(long, default_value_t = GridMode::Geometric20)]
    grid: GridMode,
}

impl MetricArgs {
    fn config(&self) -> Result<AnalysisConfig, Failure> {
        let config = AnalysisConfig {
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            grid_mode: self.grid,
        };
        config.validate().map_err(Failure::usage)?;
        Ok(config)
    }

    /// Loads only the rows for words that occur in `texts`.
    fn table_for<'a>(&self, texts: impl IntoIterator<Item = &'a str>) -> Result<EmbeddingTable, Failure> {
        let vocab: HashSet<String> = texts.into_iter().flat_map(|t| tokenize(t).tokens).collect();
        EmbeddingTable::from_path_filtered(&self.embeddings, |w| vocab.contains(w))
            .map_err(|e| Failure::usage(format!("{}: {e}", self.embeddings.display())))
    }
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// JSON array of `{id, text, reference_text?}` prompts.
    #[arg(long)]
    prompts: PathBuf,
    /// Event log; created if missing, replayed if present.
    #[arg(long)]
    log: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    #[arg(long, env = "LTG_EMBEDDINGS")]
    embeddings: PathBuf,
    /// Concurrent scoring jobs.
    #[arg(long, default_value_t = 2)]
    workers: usize,
    #[arg(long, default_value_t = 40_000)]
    min_tokens: usize,
    #[arg(long, default_value_t = 2_000_000)]
    max_tokens: usize,
    #[arg(long, default_value_t = 5)]
    judges_per_submission: usize,
    /// Bearer token for phase changes; unset disables them.
    #[arg(long, env = "LTG_ADMIN_TOKEN", hide_env_values = true)]
    admin_token: Option<String>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }

    fn metric(path: &Path, error: ltg_core::Error) -> Self {
        Failure {
            code: if error.is_metric_error() { 2 } else { 1 },
            message: format!("{}: {error}", path.display()),
        }
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn analyze(file: &Path, metric: &MetricArgs, format: OutputFormat) -> Result<String, Failure> {
    let config = metric.config()?;
    let text = read_text(file)?;
    let table = metric.table_for([text.as_str()])?;
    let report = analyze_text(&text, &table, &config).map_err(|e| Failure::metric(file, e))?;
    Ok(render_report(&report, format))
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Failure::usage(format!("{}: {e}", dir.display())))?;
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if !hidden && entry.path().is_file() {
            files.push(entry.path());
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Failure::usage(format!("{}: no text files", dir.display())));
    }
    Ok(files)
}

fn corpus(dir: &Path, metric: &MetricArgs, format: OutputFormat) -> Result<String, Failure> {
    let config = metric.config()?;
    let files = corpus_files(dir)?;
    let texts: Vec<_> = files.iter().map(fs::read_to_string).collect();
    let table = metric.table_for(texts.iter().filter_map(|t| t.as_deref().ok()))?;
    let rows: Vec<CorpusRow> = files
        .par_iter()
        .zip(texts.par_iter())
        .map(|(path, text)| {
            let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
            match text {
                Ok(text) => match analyze_text(text, &table, &config) {
                    Ok(report) => CorpusRow::ok(name, &report),
                    Err(e) => CorpusRow::failed(name, e.to_string()),
                },
                Err(e) => CorpusRow::failed(name, e.to_string()),
            }
        })
        .collect();
    Ok(render_corpus(&rows, format))
}

fn curve(file: &Path, metric: &MetricArgs) -> Result<String, Failure> {
    let config = metric.config()?;
    let text = read_text(file)?;
    let table = metric.table_for([text.as_str()])?;
    let curve = text_curve(&text, &table, &config).map_err(|e| Failure::metric(file, e))?;
    Ok(render_curve(&curve))
}

fn serve(args: ServeArgs) -> Result<String, Failure> {
    tracing_subscriber::fmt().with_writer(std::io::stderr).init();
    let prompts = ChallengeConfig::load_prompts(&args.prompts)
        .map_err(|e| Failure::usage(format!("{}: {e}", args.prompts.display())))?;
    let config = ChallengeConfig {
        min_tokens: args.min_tokens,
        max_tokens: args.max_tokens,
        judges_per_submission: args.judges_per_submission,
        ..ChallengeConfig::with_prompts(prompts)
    };
    let table = EmbeddingTable::from_path(&args.embeddings)
        .map_err(|e| Failure::usage(format!("{}: {e}", args.embeddings.display())))?;
    let challenge = Challenge::open(config, &args.log)
        .map_err(|e| Failure::usage(format!("{}: {e}", args.log.display())))?;
    let state = AppState::new(challenge, Arc::new(table), args.workers, args.admin_token);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(Failure::usage)?;
    runtime
        .block_on(ltg_service::serve(args.addr, state))
        .map_err(|e| Failure::usage(format!("{}: {e}", args.addr)))?;
    Ok(String::new())
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Analyze { file, metric, format } => analyze(&file, &metric, format),
        Command::Corpus { dir, metric, format } => corpus(&dir, &metric, format),
        Command::Curve { file, metric } => curve(&file, &metric),
        Command::Serve(args) => serve(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(out) => {
            // A closed pipe (`ltg curve f | head`) is not an error.
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
