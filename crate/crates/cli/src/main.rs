use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use iru_core::analysis::{self, DEFAULT_REMOTE_GAP};
use iru_core::trace::{write_trace, write_trace_tabular};
use iru_core::transcript::{parse, Transcript};

/// Replay annotated dialogue transcripts and report graded mutual beliefs.
#[derive(Debug, Parser)]
#[command(name = "iru", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// An antecedent more than this many turns back makes an IRU remote.
    #[arg(long, default_value_t = DEFAULT_REMOTE_GAP, global = true)]
    remote_gap: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replay one transcript and print the belief-state trace.
    Trace { file: PathBuf },
    /// Corpus statistics over every `.dlg` file in a directory.
    Stats { dir: PathBuf },
    /// Parse and replay transcripts, reporting any problems.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// One row per IRU, for a transcript or a directory of them.
    Classify { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tabular,
}

enum Failure {
    /// Unreadable or malformed input: exit 2.
    Input(Vec<String>),
    /// Input that parses but cannot be replayed: exit 3.
    Semantic(Vec<String>),
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure::Input(vec![msg.into()])
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Trace { file } => trace(file, cli.format),
        Command::Stats { dir } => stats(dir, cli.format, cli.remote_gap),
        Command::Check { files } => check(files),
        Command::Classify { path } => classify(path, cli.format, cli.remote_gap),
    };
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msgs)) => {
            for m in msgs {
                eprintln!("{m}");
            }
            ExitCode::from(2)
        }
        Err(Failure::Semantic(msgs)) => {
            for m in msgs {
                eprintln!("{m}");
            }
            ExitCode::from(3)
        }
    }
}

fn load(path: &Path) -> Result<Transcript, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|errs| {
        Failure::Input(
            errs.0
                .iter()
                .map(|e| format!("{}:{}: {}", path.display(), e.line, e.kind))
                .collect(),
        )
    })
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<Transcript>, Failure> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for p in paths {
        match load(p) {
            Ok(t) => out.push(t),
            Err(Failure::Input(m)) | Err(Failure::Semantic(m)) => errors.extend(m),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(Failure::Input(errors))
    }
}

// `.dlg` files directly inside `dir`, sorted by name.
fn transcripts_in(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?
            .path();
        if path.is_file() && path.extension().is_some_and(|x| x == "dlg") {
            paths.push(path);
        }
    }
    paths.sort();
    if paths.is_empty() {
        return Err(Failure::input(format!("{}: no .dlg transcripts found", dir.display())));
    }
    Ok(paths)
}

fn trace(file: &Path, format: Format) -> Result<String, Failure> {
    let t = load(file)?;
    let (_, records) = iru_core::replay(&t).map_err(|e| Failure::Semantic(vec![format!("{}: {e}", file.display())]))?;
    Ok(match format {
        Format::Text => write_trace(&records),
        Format::Tabular => write_trace_tabular(&records),
    })
}

fn stats(dir: &Path, format: Format, gap: usize) -> Result<String, Failure> {
    let corpus = load_all(&transcripts_in(dir)?)?;
    let s =
        analysis::corpus_stats(&corpus, gap).map_err(|e| Failure::Semantic(vec![format!("{}: {e}", dir.display())]))?;
    Ok(match format {
        Format::Text => analysis::render_text(&s, gap),
        Format::Tabular => analysis::render_tabular(&s),
    })
}

fn check(files: &[PathBuf]) -> Result<String, Failure> {
    let mut out = String::new();
    let (mut input, mut semantic) = (Vec::new(), Vec::new());
    for f in files {
        match load(f) {
            Ok(t) => match iru_core::replay(&t) {
                Ok(_) => out.push_str(&format!("{}: ok, {} events\n", f.display(), t.events.len())),
                Err(e) => semantic.push(format!("{}: {e}", f.display())),
            },
            Err(Failure::Input(m)) | Err(Failure::Semantic(m)) => input.extend(m),
        }
    }
    if !input.is_empty() {
        input.extend(semantic);
        Err(Failure::Input(input))
    } else if !semantic.is_empty() {
        Err(Failure::Semantic(semantic))
    } else {
        Ok(out)
    }
}

fn classify(path: &Path, format: Format, gap: usize) -> Result<String, Failure> {
    let paths = if path.is_dir() {
        transcripts_in(path)?
    } else {
        vec![path.to_path_buf()]
    };
    let mut rows = Vec::new();
    for (p, t) in paths.iter().zip(load_all(&paths)?) {
        let r = analysis::iru_rows(&t, gap).map_err(|e| Failure::Semantic(vec![format!("{}: {e}", p.display())]))?;
        rows.extend(r);
    }
    Ok(match format {
        Format::Text => analysis::render_rows_text(&rows),
        Format::Tabular => analysis::render_rows_tabular(&rows),
    })
}
