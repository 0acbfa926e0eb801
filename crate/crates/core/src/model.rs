//! Shared domain vocabulary: claims, sources, ratings, evidence and verdicts.

use std::fmt;
use std::num::NonZeroU32;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Upper bound on an alleged tweet body, in unicode scalar values.
pub const MAX_BODY_CHARS: usize = 4000;

/// The alleged tweet under verification.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TweetClaim {
    body: String,
    alleged_handle: Option<String>,
}

impl TweetClaim {
    pub fn new(body: impl Into<String>) -> Result<Self> {
        Self::with_handle(body, None::<String>)
    }

    /// The handle is stored without a leading `@`. Adapters do not use it yet.
    pub fn with_handle(body: impl Into<String>, handle: Option<impl Into<String>>) -> Result<Self> {
        let body = body.into();
        if body.trim().is_empty() {
            return Err(Error::InvalidClaim("tweet body is empty".into()));
        }
        let chars = body.chars().count();
        if chars > MAX_BODY_CHARS {
            return Err(Error::InvalidClaim(format!(
                "tweet body has {chars} characters, limit is {MAX_BODY_CHARS}"
            )));
        }
        let alleged_handle = handle
            .map(Into::into)
            .map(|h: String| h.trim().trim_start_matches('@').to_string())
            .filter(|h| !h.is_empty());
        Ok(TweetClaim {
            body,
            alleged_handle,
        })
    }

    pub fn body(&self) -> &str {
        &self.body
    }

    pub fn alleged_handle(&self) -> Option<&str> {
        self.alleged_handle.as_deref()
    }
}

/// Every place evidence can come from. Declaration order is the output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceId {
    SnopesSearch,
    ReutersSearch,
    WebSearch,
    WebSearchSiteSnopes,
    Politwoops,
}

impl SourceId {
    pub const ALL: [SourceId; 5] = [
        SourceId::SnopesSearch,
        SourceId::ReutersSearch,
        SourceId::WebSearch,
        SourceId::WebSearchSiteSnopes,
        SourceId::Politwoops,
    ];

    /// Short machine name, used on the command line, in config keys and in
    /// machine-readable reports.
    pub fn name(self) -> &'static str {
        match self {
            SourceId::SnopesSearch => "snopes",
            SourceId::ReutersSearch => "reuters",
            SourceId::WebSearch => "web",
            SourceId::WebSearchSiteSnopes => "web-snopes",
            SourceId::Politwoops => "politwoops",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            SourceId::SnopesSearch => "Snopes built-in search",
            SourceId::ReutersSearch => "Reuters built-in search",
            SourceId::WebSearch => "Web search",
            SourceId::WebSearchSiteSnopes => "Web search with site:snopes.com",
            SourceId::Politwoops => "Politwoops",
        }
    }

    pub fn is_web_search(self) -> bool {
        matches!(self, SourceId::WebSearch | SourceId::WebSearchSiteSnopes)
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SourceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        SourceId::ALL
            .into_iter()
            .find(|id| id.name() == wanted)
            .ok_or_else(|| {
                let known: Vec<_> = SourceId::ALL.iter().map(|id| id.name()).collect();
                Error::Config(format!(
                    "unknown engine {s:?} (expected one of {})",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RatingKind {
    True,
    False,
    Mixture,
    Misattributed,
    CorrectAttribution,
    Satire,
    Unknown,
}

impl RatingKind {
    pub const ALL: [RatingKind; 7] = [
        RatingKind::True,
        RatingKind::False,
        RatingKind::Mixture,
        RatingKind::Misattributed,
        RatingKind::CorrectAttribution,
        RatingKind::Satire,
        RatingKind::Unknown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RatingKind::True => "True",
            RatingKind::False => "False",
            RatingKind::Mixture => "Mixture",
            RatingKind::Misattributed => "Misattributed",
            RatingKind::CorrectAttribution => "Correct Attribution",
            RatingKind::Satire => "Satire",
            RatingKind::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for RatingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A publisher's verdict label, normalized into a [`RatingKind`] with the
/// scraped text kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruthRating {
    kind: RatingKind,
    raw_label: String,
    missing: bool,
}

impl TruthRating {
    /// Rating for an article whose rating block could not be found.
    pub fn missing() -> Self {
        TruthRating {
            kind: RatingKind::Unknown,
            raw_label: String::new(),
            missing: true,
        }
    }

    pub fn kind(&self) -> RatingKind {
        self.kind
    }

    pub fn raw_label(&self) -> &str {
        &self.raw_label
    }

    pub fn is_missing(&self) -> bool {
        self.missing
    }
}

// (normalized label, kind). Labels are compared after `normalize_label`.
const RATING_TABLE: &[(&str, RatingKind)] = &[
    ("true", RatingKind::True),
    ("correct attribution", RatingKind::CorrectAttribution),
    ("false", RatingKind::False),
    ("fake", RatingKind::False),
    ("fabricated", RatingKind::False),
    ("misattributed", RatingKind::Misattributed),
    ("mixture", RatingKind::Mixture),
    ("partly false", RatingKind::Mixture),
    ("labeled satire", RatingKind::Satire),
    ("satire", RatingKind::Satire),
];

fn normalize_label(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    let trimmed = lowered
        .trim()
        .trim_end_matches(|c: char| c.is_ascii_punctuation() || c.is_whitespace());
    trimmed.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Maps a scraped rating label onto a [`RatingKind`]. Never fails: labels
/// outside the table become `Unknown`, and an empty label is flagged missing.
pub fn classify_rating(raw_label: &str) -> TruthRating {
    let normalized = normalize_label(raw_label);
    let kind = RATING_TABLE
        .iter()
        .find(|(label, _)| *label == normalized)
        .map(|(_, kind)| *kind)
        .unwrap_or(RatingKind::Unknown);
    TruthRating {
        kind,
        raw_label: raw_label.to_string(),
        missing: raw_label.trim().is_empty(),
    }
}

/// What a piece of evidence says about whether the tweet was made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attribution {
    ImpliesAuthentic,
    ImpliesFabricated,
    NoImplication,
}

pub fn implied_attribution(rating: &TruthRating) -> Attribution {
    match rating.kind() {
        RatingKind::False | RatingKind::Misattributed => Attribution::ImpliesFabricated,
        RatingKind::True | RatingKind::CorrectAttribution => Attribution::ImpliesAuthentic,
        RatingKind::Mixture | RatingKind::Satire | RatingKind::Unknown => {
            Attribution::NoImplication
        }
    }
}

/// One found artifact: a rated fact-check article or a preserved deleted tweet.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvidenceItem {
    source: SourceId,
    rank: NonZeroU32,
    url: String,
    rating: Option<TruthRating>,
    matched_text: Option<String>,
    attribution_override: Option<Attribution>,
}

impl EvidenceItem {
    /// A fact-check article found by `source` at position `rank` (1-based).
    pub fn fact_check(
        source: SourceId,
        url: impl Into<String>,
        rank: u32,
        rating: TruthRating,
    ) -> Result<Self> {
        if source == SourceId::Politwoops {
            return Err(Error::InvalidEvidence(
                "Politwoops evidence must be built with EvidenceItem::politwoops".into(),
            ));
        }
        Ok(EvidenceItem {
            source,
            rank: rank_from(rank)?,
            url: url.into(),
            rating: Some(rating),
            matched_text: None,
            attribution_override: None,
        })
    }

    /// A deleted tweet preserved by Politwoops whose text matched the claim.
    pub fn politwoops(url: impl Into<String>, rank: u32, matched_text: impl Into<String>) -> Result<Self> {
        Ok(EvidenceItem {
            source: SourceId::Politwoops,
            rank: rank_from(rank)?,
            url: url.into(),
            rating: None,
            matched_text: Some(matched_text.into()),
            attribution_override: None,
        })
    }

    /// Replaces the rating-derived implication of a fact-check item, for
    /// articles known to check a tweet's content rather than its attribution.
    /// Has no effect on Politwoops evidence.
    pub fn with_override(mut self, attribution: Attribution) -> Self {
        self.attribution_override = Some(attribution);
        self
    }

    pub fn source(&self) -> SourceId {
        self.source
    }

    pub fn rank(&self) -> u32 {
        self.rank.get()
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn rating(&self) -> Option<&TruthRating> {
        self.rating.as_ref()
    }

    pub fn matched_text(&self) -> Option<&str> {
        self.matched_text.as_deref()
    }

    pub fn attribution_override(&self) -> Option<Attribution> {
        self.attribution_override
    }

    pub fn is_existence_proof(&self) -> bool {
        self.matched_text.is_some()
    }

    pub fn implication(&self) -> Attribution {
        if self.is_existence_proof() {
            return Attribution::ImpliesAuthentic;
        }
        if let Some(forced) = self.attribution_override {
            return forced;
        }
        self.rating
            .as_ref()
            .map(implied_attribution)
            .unwrap_or(Attribution::NoImplication)
    }
}

fn rank_from(rank: u32) -> Result<NonZeroU32> {
    NonZeroU32::new(rank).ok_or_else(|| Error::InvalidEvidence("evidence rank must be >= 1".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Authentic,
    Fabricated,
    Unverifiable,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Authentic => "Authentic",
            Outcome::Fabricated => "Fabricated",
            Outcome::Unverifiable => "Unverifiable",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    /// Sorted by (source, rank).
    pub evidence: Vec<EvidenceItem>,
    pub conflict: bool,
}

/// Links returned by one source for one query, in presentation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedResults {
    pub source: SourceId,
    pub query_text: String,
    pub urls: Vec<String>,
    /// HTTP status of the results page. Non-2xx pages yield no urls.
    pub status: u16,
}

impl RankedResults {
    /// Position (1-based) of `url` in the results.
    pub fn rank_of(&self, url: &str) -> Option<u32> {
        self.urls
            .iter()
            .position(|u| u == url)
            .map(|i| i as u32 + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_listing_label() {
        let r = classify_rating("False");
        assert_eq!(r.kind(), RatingKind::False);
        assert_eq!(r.raw_label(), "False");
        assert!(!r.is_missing());
    }

    #[test]
    fn classify_empty_is_missing() {
        let r = classify_rating("");
        assert_eq!(r.kind(), RatingKind::Unknown);
        assert_eq!(r.raw_label(), "");
        assert!(r.is_missing());
        assert_eq!(r, TruthRating::missing());
    }

    #[test]
    fn classify_ignores_case_and_trailing_punctuation() {
        let r = classify_rating("FALSE.");
        assert_eq!(r.kind(), RatingKind::False);
        assert_eq!(r.raw_label(), "FALSE.");
        assert_eq!(classify_rating("  Partly  False ").kind(), RatingKind::Mixture);
        assert_eq!(classify_rating("Labeled Satire").kind(), RatingKind::Satire);
        assert_eq!(classify_rating("Correct Attribution!").kind(), RatingKind::CorrectAttribution);
    }

    #[test]
    fn unmapped_label_is_unknown_not_missing() {
        let r = classify_rating("Outdated");
        assert_eq!(r.kind(), RatingKind::Unknown);
        assert!(!r.is_missing());
    }

    #[test]
    fn implication_truth_table() {
        for kind in RatingKind::ALL {
            let rating = RATING_TABLE
                .iter()
                .find(|(_, k)| *k == kind)
                .map(|(label, _)| classify_rating(label))
                .unwrap_or_else(|| classify_rating("no such label"));
            assert_eq!(rating.kind(), kind);
            let expected = match kind {
                RatingKind::False | RatingKind::Misattributed => Attribution::ImpliesFabricated,
                RatingKind::True | RatingKind::CorrectAttribution => Attribution::ImpliesAuthentic,
                _ => Attribution::NoImplication,
            };
            assert_eq!(implied_attribution(&rating), expected, "{kind:?}");
        }
    }

    #[test]
    fn claim_rejects_blank_and_oversized_bodies() {
        assert!(TweetClaim::new("   \n").is_err());
        assert!(TweetClaim::new("x".repeat(MAX_BODY_CHARS + 1)).is_err());
        assert!(TweetClaim::new("é".repeat(MAX_BODY_CHARS)).is_ok());
        let c = TweetClaim::with_handle("hello", Some("@realDonaldTrump")).unwrap();
        assert_eq!(c.alleged_handle(), Some("realDonaldTrump"));
    }

    #[test]
    fn evidence_rank_is_positive() {
        assert!(EvidenceItem::politwoops("https://x", 0, "t").is_err());
        assert!(EvidenceItem::fact_check(SourceId::SnopesSearch, "u", 0, TruthRating::missing()).is_err());
        assert!(EvidenceItem::fact_check(SourceId::Politwoops, "u", 1, TruthRating::missing()).is_err());
    }

    #[test]
    fn politwoops_evidence_implies_authentic_even_with_override() {
        let item = EvidenceItem::politwoops("https://x", 1, "t")
            .unwrap()
            .with_override(Attribution::ImpliesFabricated);
        assert_eq!(item.implication(), Attribution::ImpliesAuthentic);
        assert!(item.rating().is_none());
    }

    #[test]
    fn override_replaces_rating_implication() {
        let item = EvidenceItem::fact_check(SourceId::SnopesSearch, "u", 1, classify_rating("False"))
            .unwrap()
            .with_override(Attribution::ImpliesAuthentic);
        assert_eq!(item.implication(), Attribution::ImpliesAuthentic);
    }

    #[test]
    fn source_names_round_trip() {
        for id in SourceId::ALL {
            assert_eq!(id.name().parse::<SourceId>().unwrap(), id);
        }
        assert!("google".parse::<SourceId>().is_err());
    }
}
