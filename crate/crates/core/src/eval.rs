//! MRR / P@1 evaluation of the search engines over a ground-truth dataset.
//!
//! A result is relevant when its canonical article identity equals the
//! identity of the record's known article (the Snopes URL, or the Reuters
//! URL for the Reuters engine).

use std::fmt::Write as _;

use crate::dataset::GroundTruthRecord;
use crate::error::{Error, FixtureMiss, Result};
use crate::fetch::Mode;
use crate::model::{RankedResults, SourceId, TweetClaim};
use crate::parallel::{map_ordered, Execution};
use crate::rating::canonicalize_article_url;
use crate::search::Searcher;

/// Position of the relevant result and the two per-query metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankScore {
    pub rank_of_relevant: Option<u32>,
    pub reciprocal_rank: f64,
    pub p_at_1: u8,
}

impl RankScore {
    pub const MISS: RankScore = RankScore {
        rank_of_relevant: None,
        reciprocal_rank: 0.0,
        p_at_1: 0,
    };

    pub fn at(rank: Option<u32>) -> Self {
        match rank {
            Some(k) if k >= 1 => RankScore {
                rank_of_relevant: Some(k),
                reciprocal_rank: 1.0 / f64::from(k),
                p_at_1: u8::from(k == 1),
            },
            _ => Self::MISS,
        }
    }
}

pub fn reciprocal_rank(results: &RankedResults, relevant: &str) -> RankScore {
    let wanted = canonicalize_article_url(relevant);
    let rank = results
        .urls
        .iter()
        .position(|u| canonicalize_article_url(u) == wanted)
        .map(|i| i as u32 + 1);
    RankScore::at(rank)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryOutcome {
    pub record_id: String,
    pub source: SourceId,
    pub rank_of_relevant: Option<u32>,
    pub reciprocal_rank: f64,
    pub p_at_1: u8,
    /// Why the query could not be scored, if it failed. Failed queries score 0.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineReport {
    pub source: SourceId,
    pub mrr: f64,
    pub mean_p_at_1: f64,
    pub outcomes: Vec<QueryOutcome>,
}

/// Mean that does not depend on the order of `values`.
fn order_free_mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values.into_iter().sum::<f64>() / n
}

impl EngineReport {
    pub fn from_outcomes(source: SourceId, outcomes: Vec<QueryOutcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mrr = order_free_mean(outcomes.iter().map(|o| o.reciprocal_rank).collect());
        let mean_p_at_1 = order_free_mean(outcomes.iter().map(|o| f64::from(o.p_at_1)).collect());
        Ok(EngineReport {
            source,
            mrr,
            mean_p_at_1,
            outcomes,
        })
    }
}

/// The article a record's query should find on `source`.
pub fn relevant_url(source: SourceId, record: &GroundTruthRecord) -> Option<&str> {
    match source {
        SourceId::ReutersSearch => record.reuters_url.as_deref(),
        _ => Some(&record.snopes_url),
    }
}

enum Scored {
    Outcome(QueryOutcome),
    Miss(FixtureMiss),
}

fn score_record(source: SourceId, record: &GroundTruthRecord, searcher: &Searcher<'_>) -> Scored {
    let outcome = |score: RankScore, failure: Option<String>| {
        Scored::Outcome(QueryOutcome {
            record_id: record.id.clone(),
            source,
            rank_of_relevant: score.rank_of_relevant,
            reciprocal_rank: score.reciprocal_rank,
            p_at_1: score.p_at_1,
            failure,
        })
    };
    let claim = match TweetClaim::new(record.tweet_body.clone()) {
        Ok(c) => c,
        Err(e) => return outcome(RankScore::MISS, Some(e.to_string())),
    };
    match searcher.ranked(source, &claim) {
        Ok(results) => {
            let score = relevant_url(source, record)
                .map(|rel| reciprocal_rank(&results, rel))
                .unwrap_or(RankScore::MISS);
            let failure = (!(200..300).contains(&results.status))
                .then(|| format!("HTTP status {}", results.status));
            outcome(score, failure)
        }
        Err(Error::FixtureMiss(mut miss)) => {
            miss.record_id = Some(record.id.clone());
            Scored::Miss(miss)
        }
        Err(e) => outcome(RankScore::MISS, Some(e.to_string())),
    }
}

/// Runs `source` over every record, in dataset order.
///
/// Records are scored concurrently only in replay mode; live and record
/// runs go one request at a time. Fixture misses are collected across the
/// whole dataset and reported together.
pub fn evaluate_engine(
    source: SourceId,
    dataset: &[GroundTruthRecord],
    searcher: &Searcher<'_>,
    exec: Execution,
) -> Result<EngineReport> {
    if source == SourceId::Politwoops {
        return Err(Error::UnsupportedEngine(source.name().to_string()));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let exec = if searcher.fetcher().mode() == Mode::Replay {
        exec
    } else {
        Execution::Sequential
    };
    let scored = map_ordered(dataset, exec, |record| score_record(source, record, searcher));
    let mut outcomes = Vec::with_capacity(scored.len());
    let mut misses = Vec::new();
    for s in scored {
        match s {
            Scored::Outcome(o) => outcomes.push(o),
            Scored::Miss(m) => misses.push(m),
        }
    }
    if !misses.is_empty() {
        return Err(Error::FixtureMisses(misses));
    }
    EngineReport::from_outcomes(source, outcomes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Machine,
}

const TABLE_HEADER: [&str; 3] = ["Search engine being evaluated", "MRR", "Mean P@1"];

/// Renders reports as an aligned table (engine, MRR, mean P@1) or as
/// tab-separated lines: one `record_id source rank rr p_at_1` line per
/// outcome, then one `#SUMMARY source mrr mean_p_at_1 n` line per engine.
pub fn render_report(reports: &[EngineReport], format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Table => {
            let width = reports
                .iter()
                .map(|r| r.source.display_name().len())
                .chain([TABLE_HEADER[0].len()])
                .max()
                .unwrap_or_default();
            let _ = writeln!(out, "{:<width$}  {:<6}  {}", TABLE_HEADER[0], TABLE_HEADER[1], TABLE_HEADER[2]);
            for r in reports {
                let _ = writeln!(
                    out,
                    "{:<width$}  {:.4}  {:.4}",
                    r.source.display_name(),
                    r.mrr,
                    r.mean_p_at_1
                );
            }
        }
        ReportFormat::Machine => {
            for r in reports {
                for o in &r.outcomes {
                    let rank = o
                        .rank_of_relevant
                        .map(|k| k.to_string())
                        .unwrap_or_else(|| "-".to_string());
                    let _ = writeln!(
                        out,
                        "{}\t{}\t{}\t{:.4}\t{}",
                        o.record_id, o.source, rank, o.reciprocal_rank, o.p_at_1
                    );
                }
            }
            for r in reports {
                let _ = writeln!(
                    out,
                    "#SUMMARY\t{}\t{:.4}\t{:.4}\t{}",
                    r.source,
                    r.mrr,
                    r.mean_p_at_1,
                    r.outcomes.len()
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn results(urls: &[&str]) -> RankedResults {
        RankedResults {
            source: SourceId::WebSearchSiteSnopes,
            query_text: "q".to_string(),
            urls: urls.iter().map(|u| u.to_string()).collect(),
            status: 200,
        }
    }

    const REL: &str = "https://www.snopes.com/fact-check/target/";

    #[test]
    fn rank_one() {
        let s = reciprocal_rank(&results(&["https://snopes.com/fact-check/target"]), REL);
        assert_eq!(s.rank_of_relevant, Some(1));
        assert_eq!(s.reciprocal_rank, 1.0);
        assert_eq!(s.p_at_1, 1);
    }

    #[test]
    fn rank_three() {
        let s = reciprocal_rank(
            &results(&["https://a.org/", "https://b.org/", "http://www.snopes.com/fact-check/target/?x=1"]),
            REL,
        );
        assert_eq!(s.rank_of_relevant, Some(3));
        assert!((s.reciprocal_rank - 0.3333).abs() <= 0.005);
        assert_eq!(s.p_at_1, 0);
    }

    #[test]
    fn absent() {
        let s = reciprocal_rank(&results(&["https://a.org/"]), REL);
        assert_eq!(s, RankScore::MISS);
        assert_eq!(reciprocal_rank(&results(&[]), REL), RankScore::MISS);
    }

    fn outcome(id: &str, rank: Option<u32>) -> QueryOutcome {
        let s = RankScore::at(rank);
        QueryOutcome {
            record_id: id.to_string(),
            source: SourceId::SnopesSearch,
            rank_of_relevant: s.rank_of_relevant,
            reciprocal_rank: s.reciprocal_rank,
            p_at_1: s.p_at_1,
            failure: None,
        }
    }

    #[test]
    fn means_and_empty_guard() {
        let r = EngineReport::from_outcomes(
            SourceId::SnopesSearch,
            vec![outcome("a", Some(1)), outcome("b", Some(2)), outcome("c", None)],
        )
        .unwrap();
        assert_eq!(r.mrr, 0.5);
        assert_eq!(r.mean_p_at_1, 1.0 / 3.0);
        assert!(matches!(
            EngineReport::from_outcomes(SourceId::SnopesSearch, vec![]),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn table_rendering() {
        assert_eq!(
            render_report(&[], ReportFormat::Table),
            "Search engine being evaluated  MRR     Mean P@1\n"
        );
        let reports: Vec<_> = [SourceId::WebSearch, SourceId::WebSearchSiteSnopes, SourceId::SnopesSearch, SourceId::ReutersSearch]
            .into_iter()
            .map(|s| EngineReport::from_outcomes(s, vec![outcome("a", Some(3))]).unwrap())
            .collect();
        let table = render_report(&reports, ReportFormat::Table);
        let lines: Vec<_> = table.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("Web search with site:snopes.com"));
        assert!(lines[2].ends_with("0.3333  0.0000"), "{}", lines[2]);
    }

    #[test]
    fn machine_rendering() {
        let r = EngineReport::from_outcomes(SourceId::SnopesSearch, vec![outcome("a", Some(2)), outcome("b", None)]).unwrap();
        assert_eq!(
            render_report(&[r], ReportFormat::Machine),
            "a\tsnopes\t2\t0.5000\t0\nb\tsnopes\t-\t0.0000\t0\n#SUMMARY\tsnopes\t0.2500\t0.0000\t2\n"
        );
    }
}
