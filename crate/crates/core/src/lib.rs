//! Checks whether a tweet attributed to someone was actually posted, by
//! searching fact-check publishers, web search and Politwoops with the tweet
//! body, scraping truth ratings and aggregating them into a verdict. Also
//! scores the search engines with MRR and P@1 over a ground-truth dataset.
//!
//! All network access goes through [`fetch::Fetcher`], which can record
//! responses to a fixture directory and replay them offline.

pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod fetch;
mod html;
pub mod model;
pub mod parallel;
pub mod pipeline;
pub mod query;
pub mod rating;
pub mod search;
pub mod selectors;
pub mod verdict;

pub use config::Settings;
pub use dataset::{load_dataset, validate_dataset, GroundTruthRecord, ValidationReport};
pub use error::{Error, FixtureMiss, Result};
pub use eval::{evaluate_engine, render_report, EngineReport, QueryOutcome, ReportFormat};
pub use fetch::{FetchRequest, FetchResponse, Fetcher, FixtureStore, Mode, Transport};
pub use model::{
    classify_rating, EvidenceItem, Outcome, RankedResults, RatingKind, SourceId, TruthRating, TweetClaim, Verdict,
};
pub use parallel::Execution;
pub use pipeline::{verify, VerifyReport};
pub use query::{build_query, truncate_body, QuerySpec};
pub use rating::canonicalize_article_url;
pub use search::{match_politwoops, Searcher};
pub use verdict::aggregate;
