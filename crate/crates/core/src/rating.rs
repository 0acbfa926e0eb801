//! Truth-rating extraction from fact-check article pages, and canonical
//! article identities for comparing differently shaped URLs.

use std::sync::OnceLock;

use regex::Regex;
use scraper::{ElementRef, Html};
use url::Url;

use crate::error::{Error, Result};
use crate::fetch::FetchResponse;
use crate::html::{document_lines, full_text, host_matches, own_text, parse_page};
use crate::model::{classify_rating, TruthRating};
use crate::search::{REUTERS_HOST, SNOPES_HOST};
use crate::selectors::{PageKind, Selectors};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Publisher {
    Snopes,
    Reuters,
}

impl Publisher {
    /// Publisher owning `host`, if supported.
    pub fn from_host(host: &str) -> Option<Self> {
        if host_matches(host, SNOPES_HOST) {
            Some(Publisher::Snopes)
        } else if host_matches(host, REUTERS_HOST) {
            Some(Publisher::Reuters)
        } else {
            None
        }
    }

    pub fn from_url(url: &str) -> Option<Self> {
        Url::parse(url)
            .ok()
            .and_then(|u| u.host_str().and_then(Self::from_host))
    }

    pub fn name(self) -> &'static str {
        match self {
            Publisher::Snopes => "Snopes",
            Publisher::Reuters => "Reuters",
        }
    }
}

/// A rating plus how it was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScrapedRating {
    pub rating: TruthRating,
    /// Found by the text-pattern fallback rather than the structural selectors.
    pub low_confidence: bool,
}

impl ScrapedRating {
    fn structural(label: &str) -> Self {
        ScrapedRating {
            rating: classify_rating(label),
            low_confidence: false,
        }
    }

    fn missing() -> Self {
        ScrapedRating {
            rating: TruthRating::missing(),
            low_confidence: false,
        }
    }
}

fn default_selectors() -> &'static Selectors {
    static DEFAULT: OnceLock<Selectors> = OnceLock::new();
    DEFAULT.get_or_init(Selectors::default)
}

fn fallback(doc: &Html, pattern: Option<Regex>) -> Option<ScrapedRating> {
    let pattern = pattern?;
    let text = document_lines(doc);
    let label = pattern.captures(&text)?.get(1)?.as_str().trim().to_string();
    Some(ScrapedRating {
        rating: classify_rating(&label),
        low_confidence: true,
    })
}

pub fn scrape_snopes_rating(page: &FetchResponse) -> Result<ScrapedRating> {
    scrape_snopes_rating_with(page, default_selectors())
}

pub fn scrape_snopes_rating_with(page: &FetchResponse, selectors: &Selectors) -> Result<ScrapedRating> {
    let doc = parse_page(page)?;
    let set = selectors.get(PageKind::SnopesArticle);
    let rating = set.css("rating")?;
    if let Some(el) = doc.select(&rating).next() {
        let mut label = own_text(el);
        if label.is_empty() {
            label = full_text(el);
        }
        if !label.is_empty() {
            return Ok(ScrapedRating::structural(&label));
        }
    }
    Ok(fallback(&doc, set.regex_opt("fallback_pattern")?).unwrap_or_else(ScrapedRating::missing))
}

pub fn scrape_reuters_rating(page: &FetchResponse) -> Result<ScrapedRating> {
    scrape_reuters_rating_with(page, default_selectors())
}

fn next_element(el: ElementRef<'_>) -> Option<ElementRef<'_>> {
    el.next_siblings().find_map(ElementRef::wrap)
}

/// The verdict label is the text before the first sentence break in the
/// element following the heading, e.g. "False." or "Partly false: ...".
fn verdict_label(text: &str) -> &str {
    let end = text.find(['.', ':', ';', '\n']).unwrap_or(text.len());
    text[..end].trim()
}

pub fn scrape_reuters_rating_with(page: &FetchResponse, selectors: &Selectors) -> Result<ScrapedRating> {
    let doc = parse_page(page)?;
    let set = selectors.get(PageKind::ReutersArticle);
    let headings = set.css("verdict_heading")?;
    let wanted = set.get("verdict_heading_text").unwrap_or("VERDICT");
    for heading in doc.select(&headings) {
        if !full_text(heading).trim_end_matches(':').eq_ignore_ascii_case(wanted) {
            continue;
        }
        // <p><b>VERDICT</b></p><p>False. ...</p> puts the label after the parent.
        let body = next_element(heading).or_else(|| {
            heading
                .parent()
                .and_then(ElementRef::wrap)
                .and_then(next_element)
        });
        if let Some(body) = body {
            let text = full_text(body);
            let label = verdict_label(&text);
            if !label.is_empty() {
                return Ok(ScrapedRating::structural(label));
            }
        }
    }
    Ok(fallback(&doc, set.regex_opt("fallback_pattern")?).unwrap_or_else(ScrapedRating::missing))
}

/// Routes by the host of the page's final URL.
pub fn scrape_rating(page: &FetchResponse, selectors: &Selectors) -> Result<(Publisher, ScrapedRating)> {
    let host = page
        .final_host()
        .ok_or_else(|| Error::UnsupportedPublisher(page.final_url.clone()))?;
    match Publisher::from_host(&host) {
        Some(Publisher::Snopes) => Ok((Publisher::Snopes, scrape_snopes_rating_with(page, selectors)?)),
        Some(Publisher::Reuters) => Ok((Publisher::Reuters, scrape_reuters_rating_with(page, selectors)?)),
        None => Err(Error::UnsupportedPublisher(host)),
    }
}

fn reuters_id_token() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?:^|[-/])(id[A-Z]{2}[A-Z0-9]{4,})$").expect("valid regex"))
}

fn bare_reuters_token() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^id[A-Z]{2}[A-Z0-9]{4,}$").expect("valid regex"))
}

const SNOPES_IDENTITY_PREFIX: &str = "snopes.com/fact-check/";

/// Identity under which two URLs for the same article compare equal.
///
/// * Reuters: the trailing `idXX...` article token, e.g. `idUSKCN2242AK`.
/// * Snopes fact-checks: `snopes.com/fact-check/<slug>`.
/// * Anything else: scheme and host lowercased, `www.` dropped, no query,
///   fragment or trailing `/`.
///
/// Identities are fixed points: canonicalizing one returns it unchanged.
pub fn canonicalize_article_url(url: &str) -> String {
    let trimmed = url.trim();
    if bare_reuters_token().is_match(trimmed) || trimmed.starts_with(SNOPES_IDENTITY_PREFIX) {
        return trimmed.to_string();
    }
    let Ok(parsed) = Url::parse(trimmed) else {
        return trimmed.to_string();
    };
    let Some(host) = parsed.host_str() else {
        return trimmed.to_string();
    };
    let host = host.to_ascii_lowercase();
    let mut host = host.as_str();
    while let Some(rest) = host.strip_prefix("www.").filter(|r| !r.is_empty()) {
        host = rest;
    }
    let path = parsed.path().trim_end_matches('/');

    if host_matches(host, REUTERS_HOST) {
        let last = path.rsplit('/').next().unwrap_or_default();
        if let Some(token) = reuters_id_token().captures(last).and_then(|c| c.get(1)) {
            return token.as_str().to_string();
        }
    }
    if host == SNOPES_HOST {
        if let Some(slug) = path
            .strip_prefix("/fact-check/")
            .and_then(|rest| rest.split('/').next())
            .filter(|slug| !slug.is_empty())
        {
            return format!("{SNOPES_IDENTITY_PREFIX}{slug}");
        }
    }
    let mut out = format!("{}://{host}", parsed.scheme());
    if let Some(port) = parsed.port() {
        out.push(':');
        out.push_str(&port.to_string());
    }
    out.push_str(path);
    out
}
