use std::collections::BTreeMap;
use std::io::{self, BufRead, IsTerminal, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use sqmeter_core::{evaluate, score_answer, suggest, Band, HashParams, RuleVector, WordlistSet};
use sqmeter_service::config::{load_templates, load_wordlists};
use sqmeter_service::{ServiceConfig, WordlistSpec};

mod demo;

#[derive(Parser)]
#[command(name = "sqmeter", version, about = "Score and set up security-question answers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score one answer against the five rules.
    Score {
        answer: String,
        /// Print the same JSON the /score endpoint returns.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Generate a mnemonic answer for a question category.
    Suggest {
        #[arg(long)]
        category: String,
        /// Random when omitted.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Score a file of candidate answers, one per line; `#` lines are comments.
    Audit {
        /// `category=path`, or a path whose file stem is the category.
        #[arg(long = "wordlist", required = true)]
        wordlists: Vec<WordlistSpec>,
        #[arg(long)]
        answers: PathBuf,
    },
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Walk through the five-question setup in the terminal.
    Demo {
        /// Minimum correct answers for recovery.
        #[arg(long, default_value_t = 3)]
        threshold: u8,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Wordlists to use instead of the shipped ones.
    #[arg(long = "wordlist")]
    wordlists: Vec<WordlistSpec>,
    /// Extra mnemonic templates; they replace shipped ones of the same category.
    #[arg(long = "template")]
    templates: Vec<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "SQMETER_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    #[arg(long = "wordlist", env = "SQMETER_WORDLISTS", value_delimiter = ',')]
    wordlists: Vec<WordlistSpec>,
    #[arg(long = "template", env = "SQMETER_TEMPLATES", value_delimiter = ',')]
    templates: Vec<PathBuf>,
    #[arg(long, env = "SQMETER_THRESHOLD", default_value_t = 3)]
    threshold: u8,
    /// Idle seconds before an open session is abandoned.
    #[arg(long, env = "SQMETER_SESSION_TTL", default_value_t = 1800)]
    session_ttl: u64,
    /// Profile record file; profiles live in memory only when omitted.
    #[arg(long, env = "SQMETER_STORE")]
    store: Option<PathBuf>,
    #[arg(long, env = "SQMETER_ARGON2_MEMORY_KIB", default_value_t = HashParams::default().memory_kib)]
    argon2_memory_kib: u32,
    #[arg(long, env = "SQMETER_ARGON2_ITERATIONS", default_value_t = HashParams::default().iterations)]
    argon2_iterations: u32,
    #[arg(long, env = "SQMETER_ARGON2_PARALLELISM", default_value_t = HashParams::default().parallelism)]
    argon2_parallelism: u32,
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Score { answer, json, data } => score(&answer, json, &data),
        Command::Suggest { category, seed, data } => suggest_cmd(&category, seed, &data),
        Command::Audit { wordlists, answers } => audit(&wordlists, &answers),
        Command::Serve(args) => serve(args),
        Command::Demo { threshold } => {
            let engine = ServiceConfig::default().engine()?;
            let stdin = io::stdin();
            demo::run(&engine, threshold, &mut stdin.lock(), &mut io::stdout().lock())
        }
    }
}

const RULE_NAMES: [&str; 5] = ["capital letter", "digit", "special character", "letter", "8 or more characters"];

fn rule_lines(rules: &RuleVector) -> Vec<String> {
    rules
        .as_array()
        .iter()
        .zip(RULE_NAMES)
        .map(|(ok, name)| format!("  [{}] {name}", if *ok { "x" } else { " " }))
        .collect()
}

fn score(answer: &str, json: bool, data: &DataArgs) -> anyhow::Result<()> {
    let lists = load_wordlists(&data.wordlists)?;
    let payload = score_answer(answer, &lists);
    if json {
        println!("{}", serde_json::to_string(&payload)?);
        return Ok(());
    }
    println!("score {}/5, {}", payload.score, payload.band);
    for line in rule_lines(&payload.rules) {
        println!("{line}");
    }
    if let Some(cat) = payload.common {
        println!("found in the {cat} list of common answers; treated as weak");
    }
    Ok(())
}

fn suggest_cmd(category: &str, seed: Option<u64>, data: &DataArgs) -> anyhow::Result<()> {
    let lists = load_wordlists(&data.wordlists)?;
    let templates = load_templates(&data.templates)?;
    let seed = seed.unwrap_or_else(rand::random);
    let s = suggest(category, seed, &templates, &lists)?;
    println!("{}", s.answer);
    println!("{}", s.explanation);
    Ok(())
}

fn audit(specs: &[WordlistSpec], answers: &PathBuf) -> anyhow::Result<()> {
    let lists: WordlistSet = load_wordlists(specs)?;
    let text = std::fs::read_to_string(answers).with_context(|| format!("reading {}", answers.display()))?;
    let rows: Vec<&str> = text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .collect();
    if rows.is_empty() {
        bail!("{} holds no answers", answers.display());
    }

    let width = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0).clamp(6, 40);
    let mut out = io::stdout().lock();
    writeln!(out, "{:<width$}  score  band    common", "answer")?;
    let mut bands: BTreeMap<&str, usize> = BTreeMap::new();
    let mut hits: BTreeMap<String, usize> = BTreeMap::new();
    for answer in &rows {
        let report = evaluate(answer);
        let common = lists.is_common(answer);
        let band = if common.is_some() { Band::Weak } else { report.band };
        *bands.entry(band.as_str()).or_default() += 1;
        if let Some(c) = common {
            *hits.entry(c.to_owned()).or_default() += 1;
        }
        writeln!(
            out,
            "{:<width$}  {}/5    {:<6}  {}",
            answer,
            report.score,
            band.as_str(),
            common.unwrap_or("-")
        )?;
    }
    writeln!(out)?;
    let band_summary: Vec<String> = ["strong", "medium", "weak"]
        .iter()
        .map(|b| format!("{} {b}", bands.get(b).copied().unwrap_or(0)))
        .collect();
    writeln!(out, "{} answers: {}", rows.len(), band_summary.join(", "))?;
    let total_hits: usize = hits.values().sum();
    let per_list: Vec<String> = hits.iter().map(|(c, n)| format!("{c} {n}")).collect();
    if per_list.is_empty() {
        writeln!(out, "common hits: 0")?;
    } else {
        writeln!(out, "common hits: {total_hits} ({})", per_list.join(", "))?;
    }
    Ok(())
}

fn serve(args: ServeArgs) -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .with_ansi(io::stderr().is_terminal())
        .init();
    let config = ServiceConfig {
        listen: args.listen,
        wordlists: args.wordlists,
        templates: args.templates,
        threshold: args.threshold,
        session_ttl: Duration::from_secs(args.session_ttl),
        store: args.store,
        hash: HashParams::new(args.argon2_memory_kib, args.argon2_iterations, args.argon2_parallelism)?,
    };
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(sqmeter_service::serve(config))?;
    Ok(())
}

/// Reads one trimmed line; `None` at end of input.
fn read_line(input: &mut dyn BufRead) -> io::Result<Option<String>> {
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim_end_matches(['\n', '\r']).to_owned()))
}
