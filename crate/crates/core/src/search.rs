//! One adapter per [`SourceId`]. Each builds its query, fetches the first
//! results page through the [`Fetcher`] and parses it with the configured
//! selectors.

use std::collections::HashSet;

use scraper::{ElementRef, Html, Selector};
use url::Url;

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::fetch::{FetchRequest, FetchResponse, Fetcher};
use crate::html::{full_text, host_matches, parse_page, resolve_link};
use crate::model::{RankedResults, SourceId, TweetClaim};
use crate::query::{build_query, encode_query, QuerySpec};
use crate::selectors::{PageKind, SelectorSet};

pub const SNOPES_HOST: &str = "snopes.com";
pub const REUTERS_HOST: &str = "reuters.com";

/// A deleted tweet listed on a Politwoops results page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolitwoopsHit {
    pub tweet_text: String,
    pub detail_url: String,
    pub handle: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolitwoopsResults {
    pub query_text: String,
    pub status: u16,
    pub hits: Vec<PolitwoopsHit>,
}

/// Lowercases, decodes HTML entities, straightens curly quotes and collapses
/// whitespace runs.
pub fn normalize_text(text: &str) -> String {
    let decoded = html_escape::decode_html_entities(text);
    let straightened: String = decoded
        .to_lowercase()
        .chars()
        .map(|c| match c {
            '\u{2018}' | '\u{2019}' | '\u{201A}' | '\u{201B}' | '\u{2032}' => '\'',
            '\u{201C}' | '\u{201D}' | '\u{201E}' | '\u{201F}' | '\u{2033}' => '"',
            other => other,
        })
        .collect();
    straightened.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// First hit whose normalized text equals the normalized claim body.
pub fn match_politwoops<'a>(claim: &TweetClaim, hits: &'a [PolitwoopsHit]) -> Option<&'a PolitwoopsHit> {
    let wanted = normalize_text(claim.body());
    hits.iter().find(|hit| normalize_text(&hit.tweet_text) == wanted)
}

fn dedupe_push(urls: &mut Vec<String>, seen: &mut HashSet<String>, url: Url) {
    let s = url.to_string();
    if seen.insert(s.clone()) {
        urls.push(s);
    }
}

fn base_url(page: &FetchResponse) -> Option<Url> {
    Url::parse(&page.final_url).ok()
}

fn descendants<'a>(scope: ElementRef<'a>, sel: &'a Selector) -> impl Iterator<Item = ElementRef<'a>> + 'a {
    scope.select(sel)
}

/// Finds the results container, or decides the page legitimately has no
/// results. `Ok(None)` means an empty result list.
fn results_container<'a>(doc: &'a Html, set: &SelectorSet) -> Result<Option<ElementRef<'a>>> {
    let results = set.css("results")?;
    if let Some(container) = doc.select(&results).next() {
        return Ok(Some(container));
    }
    if let Some(no_results) = set.css_opt("no_results")? {
        if doc.select(&no_results).next().is_some() {
            return Ok(None);
        }
    }
    Err(Error::Parse(format!(
        "{}: result list not found",
        set.name()
    )))
}

/// Links from a site's built-in search page that point at articles on
/// `domain` and whose path matches `article_path`.
pub fn parse_site_results(page: &FetchResponse, set: &SelectorSet, domain: &str) -> Result<Vec<String>> {
    let doc = parse_page(page)?;
    let Some(container) = results_container(&doc, set)? else {
        return Ok(Vec::new());
    };
    let link_sel = set.css("result_link")?;
    let article_path = set.regex_opt("article_path")?;
    let base = base_url(page);
    let mut urls = Vec::new();
    let mut seen = HashSet::new();
    for a in descendants(container, &link_sel) {
        let Some(href) = a.value().attr("href") else { continue };
        let Some(url) = resolve_link(base.as_ref(), href) else { continue };
        if !url.host_str().is_some_and(|h| host_matches(h, domain)) {
            continue;
        }
        if let Some(re) = &article_path {
            if !re.is_match(url.path()) {
                continue;
            }
        }
        dedupe_push(&mut urls, &mut seen, url);
    }
    Ok(urls)
}

fn unwrap_redirect(url: Url, set: &SelectorSet) -> Url {
    let path = set.get("redirect_path").unwrap_or("/url");
    if url.path() != path {
        return url;
    }
    let params = set.list("redirect_params");
    for name in &params {
        if let Some((_, target)) = url.query_pairs().find(|(k, _)| k == name.as_str()) {
            if let Some(inner) = resolve_link(None, &target) {
                return inner;
            }
        }
    }
    url
}

fn is_engine_host(url: &Url, engine_host: Option<&str>) -> bool {
    let (Some(host), Some(engine)) = (url.host_str(), engine_host) else {
        return false;
    };
    let strip = |h: &str| h.trim_start_matches("www.").to_ascii_lowercase();
    strip(host) == strip(engine)
}

/// Organic result links from a web search results page, in rank order,
/// with redirect wrappers removed and ads skipped.
pub fn parse_serp(page: &FetchResponse, set: &SelectorSet) -> Result<Vec<String>> {
    if let Some(pattern) = set.regex_opt("captcha_text")? {
        if pattern.is_match(&page.text()) {
            return Err(Error::CaptchaDetected(page.final_url.clone()));
        }
    }
    let doc = parse_page(page)?;
    if let Some(captcha) = set.css_opt("captcha")? {
        if doc.select(&captcha).next().is_some() {
            return Err(Error::CaptchaDetected(page.final_url.clone()));
        }
    }
    let Some(container) = results_container(&doc, set)? else {
        return Ok(Vec::new());
    };
    let organic = set.css("organic")?;
    let link_sel = set.css("result_link")?;
    let ads = set.css_opt("ads")?;
    let in_ad = |el: ElementRef<'_>| {
        ads.as_ref().is_some_and(|ads| {
            ads.matches(&el)
                || el
                    .ancestors()
                    .filter_map(ElementRef::wrap)
                    .any(|anc| ads.matches(&anc))
        })
    };
    let base = base_url(page);
    let engine_host = base.as_ref().and_then(|b| b.host_str().map(str::to_string));
    let mut urls = Vec::new();
    let mut seen = HashSet::new();
    for block in descendants(container, &organic) {
        if in_ad(block) {
            continue;
        }
        // Nested organic blocks are visited through their outermost match.
        if block
            .ancestors()
            .filter_map(ElementRef::wrap)
            .take_while(|anc| *anc != container)
            .any(|anc| organic.matches(&anc))
        {
            continue;
        }
        let first = block
            .select(&link_sel)
            .filter_map(|a| a.value().attr("href"))
            .filter_map(|href| resolve_link(base.as_ref(), href))
            .map(|u| unwrap_redirect(u, set))
            .find(|u| !is_engine_host(u, engine_host.as_deref()));
        if let Some(url) = first {
            dedupe_push(&mut urls, &mut seen, url);
        }
    }
    Ok(urls)
}

/// Result cards on a Politwoops search page. Cards whose detail link does not
/// point at `politwoops_host` are skipped.
pub fn parse_politwoops(page: &FetchResponse, set: &SelectorSet, politwoops_host: &str) -> Result<Vec<PolitwoopsHit>> {
    let doc = parse_page(page)?;
    let Some(container) = results_container(&doc, set)? else {
        return Ok(Vec::new());
    };
    let card_sel = set.css("card")?;
    let text_sel = set.css("text")?;
    let link_sel = set.css("link")?;
    let handle_sel = set.css_opt("handle")?;
    let base = base_url(page);
    let mut hits = Vec::new();
    for card in descendants(container, &card_sel) {
        let Some(text_el) = card.select(&text_sel).next() else { continue };
        let Some(detail) = card
            .select(&link_sel)
            .filter_map(|a| a.value().attr("href"))
            .filter_map(|href| resolve_link(base.as_ref(), href))
            .next()
        else {
            continue;
        };
        if !detail
            .host_str()
            .is_some_and(|h| h.eq_ignore_ascii_case(politwoops_host))
        {
            continue;
        }
        let handle = handle_sel
            .as_ref()
            .and_then(|sel| card.select(sel).next())
            .map(full_text)
            .unwrap_or_default()
            .trim_start_matches('@')
            .to_string();
        hits.push(PolitwoopsHit {
            tweet_text: full_text(text_el),
            detail_url: detail.to_string(),
            handle,
        });
    }
    Ok(hits)
}

/// Adapter front end over a shared [`Fetcher`].
pub struct Searcher<'a> {
    fetcher: &'a Fetcher,
    settings: &'a Settings,
}

impl<'a> Searcher<'a> {
    pub fn new(fetcher: &'a Fetcher, settings: &'a Settings) -> Self {
        Searcher { fetcher, settings }
    }

    pub fn settings(&self) -> &Settings {
        self.settings
    }

    pub fn fetcher(&self) -> &Fetcher {
        self.fetcher
    }

    /// The query text and URL an engine would use for `claim`.
    pub fn request_for(&self, source: SourceId, claim: &TweetClaim) -> Result<(String, FetchRequest)> {
        self.request_with(source, self.settings.spec(source), claim)
    }

    fn request_with(&self, source: SourceId, spec: &QuerySpec, claim: &TweetClaim) -> Result<(String, FetchRequest)> {
        let query = build_query(claim, spec);
        let url = self
            .settings
            .endpoints
            .url_for(source, &encode_query(&query, spec.encoding()));
        let mut req = FetchRequest::get(&url)?;
        if let Some(lang) = &self.settings.accept_language {
            req = req.with_accept_language(lang.clone());
        }
        Ok((query, req))
    }

    fn fetch_results(&self, source: SourceId, claim: &TweetClaim) -> Result<(String, FetchResponse)> {
        let (query, req) = self.request_for(source, claim)?;
        let page = self.fetcher.fetch(&req)?;
        Ok((query, page))
    }

    fn site_search(&self, source: SourceId, kind: PageKind, domain: &str, claim: &TweetClaim) -> Result<RankedResults> {
        let (query_text, page) = self.fetch_results(source, claim)?;
        let urls = if page.is_success() {
            parse_site_results(&page, self.settings.selectors.get(kind), domain)?
        } else {
            Vec::new()
        };
        Ok(RankedResults {
            source,
            query_text,
            urls,
            status: page.status,
        })
    }

    pub fn search_snopes(&self, claim: &TweetClaim) -> Result<RankedResults> {
        self.site_search(SourceId::SnopesSearch, PageKind::SnopesSearch, SNOPES_HOST, claim)
    }

    pub fn search_reuters(&self, claim: &TweetClaim) -> Result<RankedResults> {
        self.site_search(SourceId::ReutersSearch, PageKind::ReutersSearch, REUTERS_HOST, claim)
    }

    /// Web search, optionally restricted to one domain with `site:`. A
    /// filter uses the site-restricted engine's spec with its domain replaced.
    pub fn search_web(&self, claim: &TweetClaim, site_filter: Option<&str>) -> Result<RankedResults> {
        match site_filter {
            None => self.web(SourceId::WebSearch, claim, None),
            Some(domain) => self.web(SourceId::WebSearchSiteSnopes, claim, Some(domain)),
        }
    }

    fn web(&self, source: SourceId, claim: &TweetClaim, site_filter: Option<&str>) -> Result<RankedResults> {
        let mut spec = self.settings.spec(source).clone();
        if site_filter.is_some() {
            spec = spec.with_site_filter(site_filter)?;
        }
        let (query_text, req) = self.request_with(source, &spec, claim)?;
        let page = self.fetcher.fetch(&req)?;
        let set = self.settings.selectors.get(PageKind::WebSearch);
        let urls = if page.is_success() {
            parse_serp(&page, set)?
        } else {
            // Bot challenges often come back as 429 or 503.
            match parse_serp(&page, set) {
                Err(Error::CaptchaDetected(u)) => return Err(Error::CaptchaDetected(u)),
                _ => Vec::new(),
            }
        };
        Ok(RankedResults {
            source,
            query_text,
            urls,
            status: page.status,
        })
    }

    pub fn search_politwoops(&self, claim: &TweetClaim) -> Result<PolitwoopsResults> {
        let (query_text, page) = self.fetch_results(SourceId::Politwoops, claim)?;
        let template = self.settings.endpoints.template(SourceId::Politwoops);
        let host = Url::parse(&template.replace(crate::config::QUERY_PLACEHOLDER, "q"))
            .ok()
            .and_then(|u| u.host_str().map(str::to_string))
            .unwrap_or_default();
        let hits = if page.is_success() {
            parse_politwoops(&page, self.settings.selectors.get(PageKind::PolitwoopsSearch), &host)?
        } else {
            Vec::new()
        };
        Ok(PolitwoopsResults {
            query_text,
            status: page.status,
            hits,
        })
    }

    /// Ranked links for any source. Politwoops results rank detail pages.
    pub fn ranked(&self, source: SourceId, claim: &TweetClaim) -> Result<RankedResults> {
        match source {
            SourceId::SnopesSearch => self.search_snopes(claim),
            SourceId::ReutersSearch => self.search_reuters(claim),
            SourceId::WebSearch => self.web(SourceId::WebSearch, claim, None),
            SourceId::WebSearchSiteSnopes => self.web(SourceId::WebSearchSiteSnopes, claim, None),
            SourceId::Politwoops => {
                let found = self.search_politwoops(claim)?;
                let mut seen = HashSet::new();
                let urls = found
                    .hits
                    .into_iter()
                    .map(|h| h.detail_url)
                    .filter(|u| seen.insert(u.clone()))
                    .collect();
                Ok(RankedResults {
                    source,
                    query_text: found.query_text,
                    urls,
                    status: found.status,
                })
            }
        }
    }
}
