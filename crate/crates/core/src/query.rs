//! Per-engine query construction: truncation, quoting, site restriction and
//! URL encoding.

use std::borrow::Cow;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use url::form_urlencoded;

use crate::error::{Error, Result};
use crate::model::{SourceId, TweetClaim};

pub const MIN_MAX_CHARS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    /// Form encoding: space becomes `+`, everything but `A-Za-z0-9*-._` is escaped.
    PlusEncoded,
    /// Path-style encoding: space becomes `%20`.
    PercentEncoded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    CharPrefix,
    WordBoundaryPrefix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySpec {
    source: SourceId,
    max_chars: usize,
    encoding: Encoding,
    site_filter: Option<String>,
    truncation: Truncation,
    quoted: bool,
}

impl QuerySpec {
    pub fn new(
        source: SourceId,
        max_chars: usize,
        encoding: Encoding,
        truncation: Truncation,
    ) -> Result<Self> {
        if max_chars < MIN_MAX_CHARS {
            return Err(Error::InvalidSpec(format!(
                "max_chars must be at least {MIN_MAX_CHARS}, got {max_chars}"
            )));
        }
        Ok(QuerySpec {
            source,
            max_chars,
            encoding,
            site_filter: None,
            truncation,
            quoted: false,
        })
    }

    /// Built-in spec for an engine.
    pub fn default_for(source: SourceId) -> Self {
        let (max_chars, encoding, truncation) = match source {
            SourceId::SnopesSearch => (100, Encoding::PercentEncoded, Truncation::WordBoundaryPrefix),
            SourceId::ReutersSearch => (130, Encoding::PlusEncoded, Truncation::WordBoundaryPrefix),
            SourceId::Politwoops => (50, Encoding::PlusEncoded, Truncation::CharPrefix),
            SourceId::WebSearch | SourceId::WebSearchSiteSnopes => {
                (200, Encoding::PlusEncoded, Truncation::WordBoundaryPrefix)
            }
        };
        let mut spec = QuerySpec {
            source,
            max_chars,
            encoding,
            site_filter: None,
            truncation,
            quoted: false,
        };
        if source == SourceId::WebSearchSiteSnopes {
            spec.site_filter = Some("snopes.com".to_string());
        }
        spec
    }

    pub fn with_site_filter(mut self, domain: Option<&str>) -> Result<Self> {
        let domain = domain.map(str::trim).filter(|d| !d.is_empty());
        if domain.is_some() && !self.source.is_web_search() {
            return Err(Error::InvalidSpec(format!(
                "site filter is only allowed for web search engines, not {}",
                self.source
            )));
        }
        if let Some(d) = domain {
            if d.chars().any(|c| c.is_whitespace() || c.is_control()) {
                return Err(Error::InvalidSpec(format!("site filter {d:?} is not a domain")));
            }
        }
        self.site_filter = domain.map(str::to_string);
        Ok(self)
    }

    pub fn with_max_chars(mut self, max_chars: usize) -> Result<Self> {
        if max_chars < MIN_MAX_CHARS {
            return Err(Error::InvalidSpec(format!(
                "max_chars must be at least {MIN_MAX_CHARS}, got {max_chars}"
            )));
        }
        self.max_chars = max_chars;
        Ok(self)
    }

    pub fn with_encoding(mut self, encoding: Encoding) -> Self {
        self.encoding = encoding;
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    /// Wrap the truncated body in double quotes (exact-phrase search).
    pub fn with_quoted(mut self, quoted: bool) -> Self {
        self.quoted = quoted;
        self
    }

    pub fn source(&self) -> SourceId {
        self.source
    }

    pub fn max_chars(&self) -> usize {
        self.max_chars
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn site_filter(&self) -> Option<&str> {
        self.site_filter.as_deref()
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn quoted(&self) -> bool {
        self.quoted
    }
}

fn char_prefix(body: &str, max_chars: usize) -> &str {
    match body.char_indices().nth(max_chars) {
        Some((byte, _)) => &body[..byte],
        None => body,
    }
}

/// Cuts `body` down to at most `spec.max_chars` unicode scalar values.
///
/// Word-boundary truncation keeps the longest prefix that ends at the end of
/// a word. If even the first word is too long it falls back to a plain
/// character prefix, so the result is never empty for a non-empty body.
pub fn truncate_body<'a>(body: &'a str, spec: &QuerySpec) -> &'a str {
    let max = spec.max_chars;
    match spec.truncation {
        Truncation::CharPrefix => char_prefix(body, max),
        Truncation::WordBoundaryPrefix => {
            if body.chars().count() <= max {
                return body;
            }
            let mut best = None;
            let mut prev_is_word = false;
            for (count, (byte, c)) in body.char_indices().enumerate() {
                if count > max {
                    break;
                }
                if c.is_whitespace() && prev_is_word {
                    best = Some(byte);
                }
                prev_is_word = !c.is_whitespace();
            }
            match best {
                Some(end) => &body[..end],
                None => char_prefix(body, max),
            }
        }
    }
}

// Unreserved characters plus `!'()*` stay literal, matching what the
// Snopes search path accepts.
const PATH_SET: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'-')
    .remove(b'.')
    .remove(b'_')
    .remove(b'~')
    .remove(b'!')
    .remove(b'\'')
    .remove(b'(')
    .remove(b')')
    .remove(b'*');

pub fn encode_query(text: &str, encoding: Encoding) -> String {
    match encoding {
        Encoding::PlusEncoded => form_urlencoded::byte_serialize(text.as_bytes()).collect(),
        Encoding::PercentEncoded => utf8_percent_encode(text, PATH_SET).to_string(),
    }
}

/// Inverse of [`encode_query`]. Invalid UTF-8 sequences are replaced.
pub fn decode_query(encoded: &str, encoding: Encoding) -> String {
    match encoding {
        Encoding::PlusEncoded => {
            let plus_as_space: Cow<'_, str> = if encoded.contains('+') {
                Cow::Owned(encoded.replace('+', " "))
            } else {
                Cow::Borrowed(encoded)
            };
            percent_decode_str(&plus_as_space).decode_utf8_lossy().into_owned()
        }
        Encoding::PercentEncoded => percent_decode_str(encoded).decode_utf8_lossy().into_owned(),
    }
}

/// Query text (before encoding) for `claim` on the engine described by `spec`.
///
/// Control characters in the truncated body, including newlines, become
/// single spaces. The site operator does not count against `max_chars`.
pub fn build_query(claim: &TweetClaim, spec: &QuerySpec) -> String {
    let truncated = truncate_body(claim.body(), spec);
    let cleaned: String = truncated
        .chars()
        .map(|c| if c.is_control() { ' ' } else { c })
        .collect();
    let mut query = if spec.quoted {
        format!("\"{cleaned}\"")
    } else {
        cleaned
    };
    if let Some(domain) = spec.site_filter() {
        query.push_str(" site:");
        query.push_str(domain);
    }
    query
}
