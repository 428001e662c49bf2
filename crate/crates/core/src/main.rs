use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use luandri::ingest::{read_corpus, CorpusFormat};
use luandri::run_file::run_lines;
use luandri::{build_index, write_index, QueryEnvironment, ScoringParams, SearchRequest};

#[derive(Parser)]
#[command(
    name = "luandri",
    version,
    about = "Build and search positional indexes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a TREC-text or plain-text corpus.
    Index(IndexArgs),
    /// Search one or more indexes, interactively or in batch mode.
    Search(SearchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Trec,
    Text,
}

#[derive(Args)]
struct IndexArgs {
    /// Corpus file or directory.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "trec")]
    format: Format,
    /// Output index directory.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated numeric field names (TREC only).
    #[arg(long, value_delimiter = ',')]
    fields: Vec<String>,
}

#[derive(Args)]
struct SearchArgs {
    /// Index directory; repeat to search several indexes as one collection.
    #[arg(long, required = true)]
    index: Vec<PathBuf>,
    #[arg(long, conflicts_with = "batch", required_unless_present = "batch")]
    query: Option<String>,
    /// File of `qid<TAB>query` lines; output is in run-file format.
    #[arg(long)]
    batch: Option<PathBuf>,
    /// Results per query.
    #[arg(short = 'n', default_value_t = 10)]
    results: usize,
    /// Dirichlet smoothing pseudo-count.
    #[arg(long, default_value_t = 2500.0)]
    mu: f64,
    /// Whitespace-separated stop word file.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long, default_value = "luandri")]
    run_tag: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Index(args) => cmd_index(args),
        Command::Search(args) => cmd_search(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type CliResult = Result<(), Box<dyn std::error::Error + Send + Sync>>;

fn cmd_index(args: IndexArgs) -> CliResult {
    let format = match args.format {
        Format::Trec => CorpusFormat::Trec,
        Format::Text => CorpusFormat::Text,
    };
    let fields: BTreeSet<String> = args
        .fields
        .iter()
        .map(|f| f.trim().to_ascii_lowercase())
        .filter(|f| !f.is_empty())
        .collect();
    let docs = read_corpus(&args.corpus, format, &fields)?;
    let snapshot = build_index(&docs)?;
    write_index(&snapshot, &args.out)
        .map_err(|e| format!("writing {}: {e}", args.out.display()))?;
    let stats = snapshot.stats();
    println!("doc_count\t{}", stats.doc_count);
    println!("total_terms\t{}", stats.total_terms);
    println!("vocab_size\t{}", stats.vocab_size);
    Ok(())
}

fn cmd_search(args: SearchArgs) -> CliResult {
    let mut env = QueryEnvironment::with_params(ScoringParams::new(args.mu)?);
    for dir in &args.index {
        env.add_index(dir)
            .map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    let stopwords = match &args.stopwords {
        Some(path) => Some(
            fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?
                .split_whitespace()
                .map(str::to_string)
                .collect::<Vec<_>>(),
        ),
        None => None,
    };
    let request = |query: &str| SearchRequest {
        stopwords: stopwords.clone(),
        ..SearchRequest::new(query).results_requested(args.results)
    };

    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());

    if let Some(query) = &args.query {
        for (rank, r) in env.run_query(&request(query))?.iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t{}\t{:.6}\t{}",
                rank + 1,
                r.docid,
                r.document_name,
                r.score,
                r.snippet
            )?;
        }
    } else if let Some(batch) = &args.batch {
        let text = fs::read_to_string(batch).map_err(|e| format!("{}: {e}", batch.display()))?;
        let mut queries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (qid, query) = line
                .split_once('\t')
                .ok_or_else(|| format!("line {}: expected qid<TAB>query", lineno + 1))?;
            queries.push((qid.trim(), query));
        }
        let results: Vec<_> = queries
            .par_iter()
            .map(|(qid, query)| {
                env.run_query(&request(query))
                    .map_err(|e| format!("query {qid}: {e}"))
            })
            .collect();
        for ((qid, _), result) in queries.iter().zip(results) {
            for line in run_lines(qid, &result?, &args.run_tag) {
                writeln!(out, "{line}")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
