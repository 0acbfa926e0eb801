//! Ground-truth corpus of tweets with known Snopes fact-checks.
//!
//! One record per line, tab-separated:
//!
//! ```text
//! id  authentic  tweet_body  snopes_url  live_url  archived_url  [reuters_url]
//! ```
//!
//! The first non-comment line is a header. `authentic` is `true` or `false`,
//! absent optional URLs are written as `-`, and `\t`, `\n`, `\r` and `\\`
//! escape tab, newline, carriage return and backslash inside `tweet_body`.
//! Lines starting with `#` are comments. The seventh column is optional and
//! carries a known Reuters article for the overlap evaluation.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use url::Url;

use crate::error::{Error, Result};
use crate::rating::canonicalize_article_url;
use crate::search::SNOPES_HOST;

pub const HEADER: &str = "id\tauthentic\ttweet_body\tsnopes_url\tlive_url\tarchived_url";
const FIELDS: [&str; 7] = [
    "id",
    "authentic",
    "tweet_body",
    "snopes_url",
    "live_url",
    "archived_url",
    "reuters_url",
];
const ABSENT: &str = "-";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthRecord {
    pub id: String,
    pub tweet_body: String,
    pub snopes_url: String,
    pub authentic: bool,
    pub live_url: Option<String>,
    pub archived_url: Option<String>,
    pub reuters_url: Option<String>,
}

impl GroundTruthRecord {
    /// Invariant breaches, empty when the record is well-formed.
    pub fn breaches(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.id.trim().is_empty() {
            out.push("id is blank".to_string());
        } else if self.id.starts_with('#') || self.id.chars().any(char::is_whitespace) {
            out.push(format!("id {:?} contains whitespace or starts with #", self.id));
        }
        if self.tweet_body.trim().is_empty() {
            out.push("tweet_body is blank".to_string());
        }
        let is_snopes = Url::parse(&self.snopes_url)
            .ok()
            .and_then(|u| u.host_str().map(|h| h.to_ascii_lowercase()))
            .is_some_and(|h| h.trim_start_matches("www.") == SNOPES_HOST)
            && !self.snopes_url.chars().any(char::is_whitespace);
        if !is_snopes {
            out.push(format!("snopes_url {:?} is not a snopes.com URL", self.snopes_url));
        }
        for (name, value) in [
            ("live_url", &self.live_url),
            ("archived_url", &self.archived_url),
            ("reuters_url", &self.reuters_url),
        ] {
            if let Some(v) = value {
                if Url::parse(v).is_err() || v.chars().any(char::is_whitespace) || v == ABSENT {
                    out.push(format!("{name} {v:?} is not an absolute URL"));
                }
            }
        }
        if self.authentic {
            if self.live_url.is_none() {
                out.push("authentic record is missing live_url".to_string());
            }
            if self.archived_url.is_none() {
                out.push("authentic record is missing archived_url".to_string());
            }
        } else {
            if self.live_url.is_some() {
                out.push("fabricated record has a live_url".to_string());
            }
            if self.archived_url.is_some() {
                out.push("fabricated record has an archived_url".to_string());
            }
        }
        out
    }
}

pub fn escape_body(body: &str) -> String {
    let mut out = String::with_capacity(body.len());
    for c in body.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            other => out.push(other),
        }
    }
    out
}

pub fn unescape_body(raw: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some(other) => return Err(format!("unknown escape \\{other}")),
            None => return Err("dangling backslash".to_string()),
        }
    }
    Ok(out)
}

fn optional(value: &str) -> Option<String> {
    (value != ABSENT).then(|| value.to_string())
}

/// Parses records without checking record invariants. Row structure errors
/// are reported with their 1-based line number and field.
pub fn parse_records(text: &str) -> Result<Vec<GroundTruthRecord>> {
    let mut records = Vec::new();
    let mut seen_header = false;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !seen_header {
            let expected: Vec<&str> = HEADER.split('\t').collect();
            let got: Vec<&str> = line.split('\t').collect();
            if got.len() < 6 || got[..6] != expected[..] || got.len() > 7 || (got.len() == 7 && got[6] != FIELDS[6]) {
                return Err(Error::Format {
                    line: line_no,
                    field: "header".to_string(),
                    message: format!("expected {HEADER:?} (optionally followed by \treuters_url)"),
                });
            }
            seen_header = true;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 6 && cols.len() != 7 {
            return Err(Error::Format {
                line: line_no,
                field: FIELDS[cols.len().min(6)].to_string(),
                message: format!("expected 6 or 7 tab-separated fields, found {}", cols.len()),
            });
        }
        let format_err = |field: usize, message: String| Error::Format {
            line: line_no,
            field: FIELDS[field].to_string(),
            message,
        };
        let authentic = match cols[1] {
            "true" => true,
            "false" => false,
            other => return Err(format_err(1, format!("expected true or false, got {other:?}"))),
        };
        let tweet_body = unescape_body(cols[2]).map_err(|m| format_err(2, m))?;
        for (i, col) in cols.iter().enumerate() {
            if i != 2 && *col != col.trim() {
                return Err(format_err(i, "surrounding whitespace".to_string()));
            }
        }
        records.push(GroundTruthRecord {
            id: cols[0].to_string(),
            authentic,
            tweet_body,
            snopes_url: cols[3].to_string(),
            live_url: optional(cols[4]),
            archived_url: optional(cols[5]),
            reuters_url: cols.get(6).and_then(|v| optional(v)),
        });
    }
    Ok(records)
}

/// Parses and validates every record. Records keep file order.
pub fn parse_dataset(text: &str) -> Result<Vec<GroundTruthRecord>> {
    let records = parse_records(text)?;
    for record in &records {
        if let Some(first) = record.breaches().into_iter().next() {
            return Err(Error::Validation {
                id: record.id.clone(),
                message: first,
            });
        }
    }
    Ok(records)
}

/// The corpus shipped with the crate.
pub const SHIPPED_CORPUS: &str = include_str!("../data/ground_truth.tsv");

pub fn shipped_corpus() -> Result<Vec<GroundTruthRecord>> {
    parse_dataset(SHIPPED_CORPUS)
}

pub fn load_dataset(path: &Path) -> Result<Vec<GroundTruthRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text)
}

pub fn load_records(path: &Path) -> Result<Vec<GroundTruthRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records(&text)
}

pub fn serialize_dataset(records: &[GroundTruthRecord]) -> String {
    let with_reuters = records.iter().any(|r| r.reuters_url.is_some());
    let mut out = String::from(HEADER);
    if with_reuters {
        out.push_str("\treuters_url");
    }
    out.push('\n');
    let opt = |v: &Option<String>| v.clone().unwrap_or_else(|| ABSENT.to_string());
    for r in records {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            r.id,
            r.authentic,
            escape_body(&r.tweet_body),
            r.snopes_url,
            opt(&r.live_url),
            opt(&r.archived_url)
        ));
        if with_reuters {
            out.push('\t');
            out.push_str(&opt(&r.reuters_url));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    DuplicateId { id: String },
    DuplicateSnopesUrl { identity: String, ids: Vec<String> },
    Breach { id: String, message: String },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::DuplicateId { id } => write!(f, "duplicate id {id}"),
            Finding::DuplicateSnopesUrl { identity, ids } => {
                write!(f, "duplicate snopes_url {identity} in records {}", ids.join(", "))
            }
            Finding::Breach { id, message } => write!(f, "record {id}: {message}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }
}

pub fn validate_dataset(records: &[GroundTruthRecord]) -> ValidationReport {
    let mut findings = Vec::new();
    let mut id_counts: HashMap<&str, usize> = HashMap::new();
    for r in records {
        let n = id_counts.entry(&r.id).or_default();
        *n += 1;
        if *n == 2 {
            findings.push(Finding::DuplicateId { id: r.id.clone() });
        }
    }
    let mut by_identity: Vec<(String, Vec<String>)> = Vec::new();
    for r in records {
        let identity = canonicalize_article_url(&r.snopes_url);
        match by_identity.iter_mut().find(|(k, _)| *k == identity) {
            Some((_, ids)) => ids.push(r.id.clone()),
            None => by_identity.push((identity, vec![r.id.clone()])),
        }
    }
    for (identity, ids) in by_identity {
        if ids.len() > 1 {
            findings.push(Finding::DuplicateSnopesUrl { identity, ids });
        }
    }
    for r in records {
        for message in r.breaches() {
            findings.push(Finding::Breach {
                id: r.id.clone(),
                message,
            });
        }
    }
    ValidationReport { findings }
}
