//! End-to-end verification of one claim: query every enabled engine, scrape
//! the fact-check articles they surface, check Politwoops, aggregate.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::error::Result;
use crate::fetch::{FetchRequest, FetchResponse};
use crate::model::{EvidenceItem, SourceId, TruthRating, TweetClaim, Verdict};
use crate::parallel::{map_ordered, Execution};
use crate::rating::{canonicalize_article_url, scrape_rating, Publisher, ScrapedRating};
use crate::search::{match_politwoops, Searcher};
use crate::verdict::aggregate;

/// What one engine turned up before article scraping.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Found {
    Articles(Vec<(u32, String)>),
    PolitwoopsMatch { rank: u32, url: String, text: String },
    Nothing,
}

/// Outcome of verifying one claim, plus anything worth telling the operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub verdict: Verdict,
    /// One line per engine or article that failed; meant for stderr.
    pub diagnostics: Vec<String>,
}

/// True for URLs that point at a scrapeable fact-check article.
pub fn is_article_url(url: &str) -> bool {
    match Publisher::from_url(url) {
        Some(Publisher::Snopes) => canonicalize_article_url(url).starts_with("snopes.com/fact-check/"),
        Some(Publisher::Reuters) => !canonicalize_article_url(url).contains('/'),
        None => false,
    }
}

fn query_engine(searcher: &Searcher<'_>, source: SourceId, claim: &TweetClaim) -> Result<Found> {
    let limit = searcher.settings().article_limit;
    if source == SourceId::Politwoops {
        let found = searcher.search_politwoops(claim)?;
        return Ok(match match_politwoops(claim, &found.hits) {
            Some(hit) => {
                let rank = found.hits.iter().position(|h| h == hit).unwrap_or_default() as u32 + 1;
                Found::PolitwoopsMatch {
                    rank,
                    url: hit.detail_url.clone(),
                    text: hit.tweet_text.clone(),
                }
            }
            None => Found::Nothing,
        });
    }
    let results = searcher.ranked(source, claim)?;
    let articles: Vec<_> = results
        .urls
        .iter()
        .enumerate()
        .filter(|(_, url)| is_article_url(url))
        .take(limit)
        .map(|(i, url)| (i as u32 + 1, url.clone()))
        .collect();
    Ok(if articles.is_empty() {
        Found::Nothing
    } else {
        Found::Articles(articles)
    })
}

fn scrape(searcher: &Searcher<'_>, url: &str) -> Result<ScrapedRating> {
    let mut req = FetchRequest::get(url)?;
    if let Some(lang) = &searcher.settings().accept_language {
        req = req.with_accept_language(lang.clone());
    }
    let page: FetchResponse = searcher.fetcher().fetch(&req)?;
    if !page.is_success() {
        return Err(crate::error::Error::Network {
            url: url.to_string(),
            message: format!("HTTP status {}", page.status),
        });
    }
    Ok(scrape_rating(&page, &searcher.settings().selectors)?.1)
}

/// Runs `engines` for `claim` and aggregates whatever they find.
///
/// Engine and scrape failures do not abort the run; they drop that evidence
/// and add a diagnostic. An article reached through several engines is
/// scraped once and credited to the first engine in [`SourceId`] order.
pub fn verify(claim: &TweetClaim, searcher: &Searcher<'_>, engines: &[SourceId], exec: Execution) -> VerifyReport {
    let mut engines = engines.to_vec();
    engines.sort();
    engines.dedup();

    let mut diagnostics = Vec::new();
    let found = map_ordered(&engines, exec, |&source| (source, query_engine(searcher, source, claim)));

    let mut evidence = Vec::new();
    let mut to_scrape: Vec<(SourceId, u32, String)> = Vec::new();
    let mut seen = HashSet::new();
    for (source, outcome) in found {
        match outcome {
            Err(e) => diagnostics.push(format!("{source}: {e}")),
            Ok(Found::Nothing) => {}
            Ok(Found::PolitwoopsMatch { rank, url, text }) => match EvidenceItem::politwoops(url, rank, text) {
                Ok(item) => evidence.push(item),
                Err(e) => diagnostics.push(format!("{source}: {e}")),
            },
            Ok(Found::Articles(list)) => {
                for (rank, url) in list {
                    if seen.insert(canonicalize_article_url(&url)) {
                        to_scrape.push((source, rank, url));
                    }
                }
            }
        }
    }

    let scraped = map_ordered(&to_scrape, exec, |(_, _, url)| scrape(searcher, url));
    let mut by_url = BTreeMap::new();
    for ((source, rank, url), rating) in to_scrape.into_iter().zip(scraped) {
        match rating {
            Ok(r) => {
                by_url.insert(url.clone(), r.low_confidence);
                match EvidenceItem::fact_check(source, url, rank, r.rating) {
                    Ok(item) => evidence.push(item),
                    Err(e) => diagnostics.push(format!("{source}: {e}")),
                }
            }
            Err(e) => diagnostics.push(format!("{source}: {url}: {e}")),
        }
    }
    for (url, low) in by_url {
        if low {
            diagnostics.push(format!("{url}: rating found by text fallback, low confidence"));
        }
    }

    VerifyReport {
        verdict: aggregate(claim, evidence),
        diagnostics,
    }
}

/// `Truth rating: <label>` as printed for a scraped article.
pub fn rating_line(rating: &TruthRating) -> String {
    if rating.is_missing() {
        "Truth rating: UNKNOWN (missing)".to_string()
    } else {
        format!("Truth rating: {}", rating.raw_label())
    }
}

/// Evidence lines followed by one verdict line.
pub fn render_verdict(verdict: &Verdict) -> String {
    let mut out = String::new();
    for item in &verdict.evidence {
        match item.rating() {
            Some(rating) => {
                let _ = writeln!(out, "Article found at URL: {}", item.url());
                let _ = writeln!(out, "{}", rating_line(rating));
            }
            None => {
                let _ = writeln!(out, "That tweet was successfully queried on Politwoops");
                let _ = writeln!(out, "Tweet found at URL: {}", item.url());
            }
        }
    }
    let _ = write!(out, "Verdict: {}", verdict.outcome);
    if verdict.conflict {
        out.push_str(" (conflicting evidence)");
    }
    out.push('\n');
    out
}
