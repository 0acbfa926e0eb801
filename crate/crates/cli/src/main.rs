//! `tweetcheck`: verify alleged tweets, evaluate search engines against a
//! ground-truth dataset, record fixtures and scrape single articles.
//!
//! Exit status: verify exits 0 (authentic), 1 (fabricated) or 2
//! (unverifiable). 3 is an operational failure, 64 a usage error, 65 a
//! dataset error and 66 a missing fixture in replay mode.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use tweetcheck_core::dataset::{load_dataset, load_records, validate_dataset};
use tweetcheck_core::eval::{evaluate_engine, render_report, ReportFormat};
use tweetcheck_core::fetch::HttpTransport;
use tweetcheck_core::pipeline::{rating_line, render_verdict, verify};
use tweetcheck_core::rating::{scrape_rating, Publisher};
use tweetcheck_core::{
    Error, Execution, FetchRequest, Fetcher, FixtureStore, Mode, Outcome, Searcher, Settings, SourceId, TweetClaim,
};

const EXIT_OPERATIONAL: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_DATASET: u8 = 65;
const EXIT_FIXTURE: u8 = 66;

const MODE_ENV: &str = "TWEETCHECK_MODE";

const EVAL_ENGINES: [SourceId; 4] = [
    SourceId::WebSearch,
    SourceId::WebSearchSiteSnopes,
    SourceId::SnopesSearch,
    SourceId::ReutersSearch,
];

#[derive(Parser)]
#[command(name = "tweetcheck", version, about = "Check whether an alleged tweet was really posted")]
struct Cli {
    /// Configuration file (key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Network mode. Overrides the TWEETCHECK_MODE variable and the config file.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Fixture directory for record and replay modes.
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    /// Print queried URLs and per-record details on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Look for evidence about one tweet body and print a verdict.
    Verify {
        /// The tweet text.
        body: String,
        /// Restrict to these engines (repeatable): snopes, reuters, web, web-snopes, politwoops.
        #[arg(long = "engine", value_parser = parse_engine)]
        engines: Vec<SourceId>,
    },
    /// Score search engines with MRR and P@1 over a dataset.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long = "engine", value_parser = parse_engine)]
        engines: Vec<SourceId>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Perform every fetch an evaluation would and store the responses.
    Record {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long = "engine", value_parser = parse_engine)]
        engines: Vec<SourceId>,
    },
    /// Check a dataset file and list every problem found.
    ValidateDataset {
        /// Dataset file; `--dataset` is accepted too.
        #[arg(required_unless_present = "dataset")]
        path: Option<PathBuf>,
        #[arg(long, conflicts_with = "path")]
        dataset: Option<PathBuf>,
    },
    /// Scrape the truth rating of one fact-check article.
    Scrape { url: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Machine,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_engine(s: &str) -> Result<SourceId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::FixtureMiss(_) | Error::FixtureMisses(_) | Error::CorruptFixture { .. } => EXIT_FIXTURE,
            Error::Format { .. } | Error::Validation { .. } | Error::EmptyDataset => EXIT_DATASET,
            Error::UnsupportedEngine(_) | Error::UnsupportedPublisher(_) | Error::InvalidClaim(_) => EXIT_USAGE,
            Error::Config(_) | Error::InvalidRequest(_) => EXIT_USAGE,
            _ => EXIT_OPERATIONAL,
        };
        let message = match &e {
            Error::FixtureMisses(misses) => {
                let mut m = e.to_string();
                for miss in misses {
                    m.push_str(&format!("\n  {miss}"));
                }
                m
            }
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

struct Context {
    settings: Settings,
    mode: Mode,
    verbose: bool,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self, Failure> {
        let mut settings = match &cli.config {
            Some(path) => Settings::load(path).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?,
            None => Settings::default(),
        };
        let env_mode = match std::env::var(MODE_ENV) {
            Ok(v) if cli.mode.is_none() && !v.trim().is_empty() => Some(
                v.parse::<Mode>()
                    .map_err(|e| Failure::new(EXIT_USAGE, format!("{MODE_ENV}: {e}")))?,
            ),
            _ => None,
        };
        let mode = cli.mode.or(env_mode).or(settings.mode).unwrap_or(Mode::Live);
        if let Some(dir) = &cli.fixtures {
            settings.fixtures = Some(dir.clone());
        }
        Ok(Context {
            settings,
            mode,
            verbose: cli.verbose,
        })
    }

    fn fetcher(&self, mode: Mode) -> Result<Fetcher, Failure> {
        let dir = || {
            self.settings
                .fixtures
                .clone()
                .ok_or_else(|| Failure::new(EXIT_USAGE, format!("{} mode needs --fixtures DIR", mode.as_str())))
        };
        let fetcher = match mode {
            Mode::Replay => {
                let dir = dir()?;
                let store = FixtureStore::open(&dir)
                    .map_err(|e| Failure::new(EXIT_FIXTURE, format!("fixture directory: {e}")))?;
                Fetcher::replay(store)
            }
            Mode::Record => {
                let store = FixtureStore::create(dir()?)?;
                Fetcher::new(mode, Some(store), Some(self.transport()?), self.settings.politeness)?
            }
            Mode::Live => Fetcher::new(mode, None, Some(self.transport()?), self.settings.politeness)?,
        };
        if self.verbose {
            eprintln!("mode: {}", mode.as_str());
        }
        Ok(fetcher)
    }

    fn transport(&self) -> Result<Arc<HttpTransport>, Failure> {
        Ok(Arc::new(HttpTransport::new(&self.settings.user_agent)?))
    }
}

fn engines_or(requested: &[SourceId], default: &[SourceId]) -> Vec<SourceId> {
    let mut engines = if requested.is_empty() {
        default.to_vec()
    } else {
        requested.to_vec()
    };
    engines.sort();
    engines.dedup();
    engines
}

fn cmd_verify(ctx: &Context, body: &str, engines: &[SourceId]) -> Result<u8, Failure> {
    let claim = TweetClaim::new(body).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let fetcher = ctx.fetcher(ctx.mode)?;
    let searcher = Searcher::new(&fetcher, &ctx.settings);
    let engines = engines_or(engines, &SourceId::ALL);
    if ctx.verbose {
        for &source in &engines {
            if let Ok((query, req)) = searcher.request_for(source, &claim) {
                eprintln!("{source}: {query:?} -> {}", req.url());
            }
        }
    }
    let report = verify(&claim, &searcher, &engines, Execution::Parallel);
    for line in &report.diagnostics {
        eprintln!("{line}");
    }
    print!("{}", render_verdict(&report.verdict));
    Ok(match report.verdict.outcome {
        Outcome::Authentic => 0,
        Outcome::Fabricated => 1,
        Outcome::Unverifiable => 2,
    })
}

fn load_valid(path: &Path) -> Result<Vec<tweetcheck_core::GroundTruthRecord>, Failure> {
    let records = load_dataset(path)?;
    let report = validate_dataset(&records);
    if !report.is_empty() {
        let lines: Vec<_> = report.findings.iter().map(|f| f.to_string()).collect();
        return Err(Failure::new(EXIT_DATASET, lines.join("\n")));
    }
    Ok(records)
}

fn report_failures(ctx: &Context, report: &tweetcheck_core::EngineReport) -> usize {
    let mut failed = 0;
    for o in &report.outcomes {
        if let Some(why) = &o.failure {
            failed += 1;
            eprintln!("{} {}: {why}", o.source, o.record_id);
        } else if ctx.verbose {
            let rank = o.rank_of_relevant.map(|k| k.to_string()).unwrap_or_else(|| "-".into());
            eprintln!("{} {}: rank {rank}", o.source, o.record_id);
        }
    }
    failed
}

fn cmd_eval(ctx: &Context, dataset: &Path, engines: &[SourceId], format: Format) -> Result<u8, Failure> {
    let records = load_valid(dataset)?;
    let fetcher = ctx.fetcher(ctx.mode)?;
    let searcher = Searcher::new(&fetcher, &ctx.settings);
    let mut reports = Vec::new();
    for source in engines_or(engines, &EVAL_ENGINES) {
        let report = evaluate_engine(source, &records, &searcher, Execution::Parallel)?;
        report_failures(ctx, &report);
        reports.push(report);
    }
    let format = match format {
        Format::Table => ReportFormat::Table,
        Format::Machine => ReportFormat::Machine,
    };
    print!("{}", render_report(&reports, format));
    Ok(0)
}

fn cmd_record(ctx: &Context, dataset: &Path, engines: &[SourceId]) -> Result<u8, Failure> {
    let records = load_valid(dataset)?;
    if records.is_empty() {
        eprintln!("dataset is empty; nothing recorded");
        return Ok(0);
    }
    let fetcher = ctx.fetcher(Mode::Record)?;
    let searcher = Searcher::new(&fetcher, &ctx.settings);
    let mut failed = 0;
    for source in engines_or(engines, &EVAL_ENGINES) {
        let report = evaluate_engine(source, &records, &searcher, Execution::Sequential)?;
        let f = report_failures(ctx, &report);
        failed += f;
        eprintln!("{source}: {} of {} queries recorded", report.outcomes.len() - f, report.outcomes.len());
    }
    Ok(if failed == 0 { 0 } else { EXIT_OPERATIONAL })
}

fn cmd_validate(path: &Path) -> Result<u8, Failure> {
    let records = load_records(path)?;
    let report = validate_dataset(&records);
    for finding in &report.findings {
        println!("{finding}");
    }
    let authentic = records.iter().filter(|r| r.authentic).count();
    eprintln!(
        "{} records ({authentic} authentic, {} fabricated), {} finding(s)",
        records.len(),
        records.len() - authentic,
        report.findings.len()
    );
    Ok(if report.is_empty() { 0 } else { EXIT_DATASET })
}

fn cmd_scrape(ctx: &Context, url: &str) -> Result<u8, Failure> {
    if Publisher::from_url(url).is_none() {
        return Err(Failure::new(EXIT_USAGE, format!("unsupported publisher: {url}")));
    }
    let fetcher = ctx.fetcher(ctx.mode)?;
    let mut req = FetchRequest::get(url).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    if let Some(lang) = &ctx.settings.accept_language {
        req = req.with_accept_language(lang.clone());
    }
    let page = fetcher.fetch(&req)?;
    if !page.is_success() {
        return Err(Failure::new(EXIT_OPERATIONAL, format!("{url}: HTTP status {}", page.status)));
    }
    let (_, scraped) = scrape_rating(&page, &ctx.settings.selectors)?;
    if scraped.low_confidence {
        eprintln!("rating found by text fallback, low confidence");
    }
    println!("{}", rating_line(&scraped.rating));
    println!("Rating kind: {}", scraped.rating.kind());
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let ctx = Context::new(&cli)?;
    match &cli.command {
        Command::Verify { body, engines } => cmd_verify(&ctx, body, engines),
        Command::Eval {
            dataset,
            engines,
            format,
        } => cmd_eval(&ctx, dataset, engines, *format),
        Command::Record { dataset, engines } => cmd_record(&ctx, dataset, engines),
        Command::ValidateDataset { path, dataset } => {
            cmd_validate(path.as_deref().or(dataset.as_deref()).expect("clap requires one"))
        }
        Command::Scrape { url } => cmd_scrape(&ctx, url),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
