use scraper::{ElementRef, Html, Node};
use url::Url;

use crate::error::{Error, Result};
use crate::fetch::FetchResponse;

/// Parses a fetched page, refusing bodies that are clearly not HTML.
pub(crate) fn parse_page(page: &FetchResponse) -> Result<Html> {
    let ct = page.content_type.to_ascii_lowercase();
    if !ct.is_empty() && !ct.contains("html") && !ct.contains("xml") {
        return Err(Error::Parse(format!(
            "{} is {}, not HTML",
            page.final_url, page.content_type
        )));
    }
    let text = std::str::from_utf8(&page.body)
        .map_err(|_| Error::Parse(format!("{} is not UTF-8 text", page.final_url)))?;
    if !text.contains('<') {
        return Err(Error::Parse(format!("{} has no markup", page.final_url)));
    }
    Ok(Html::parse_document(text))
}

pub(crate) fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Text of the element and all descendants, whitespace collapsed.
pub(crate) fn full_text(el: ElementRef<'_>) -> String {
    collapse_ws(&el.text().collect::<Vec<_>>().join(" "))
}

/// Text nodes that are direct children of the element, whitespace collapsed.
pub(crate) fn own_text(el: ElementRef<'_>) -> String {
    let parts: Vec<&str> = el
        .children()
        .filter_map(|child| match child.value() {
            Node::Text(t) => Some(&**t),
            _ => None,
        })
        .collect();
    collapse_ws(&parts.join(" "))
}

/// Every text node in document order, one per line.
pub(crate) fn document_lines(doc: &Html) -> String {
    doc.root_element()
        .text()
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

/// Resolves `href` against `base` and drops the fragment. Only http(s)
/// results are returned.
pub(crate) fn resolve_link(base: Option<&Url>, href: &str) -> Option<Url> {
    let href = href.trim();
    let mut url = match Url::parse(href) {
        Ok(u) => u,
        Err(url::ParseError::RelativeUrlWithoutBase) => base?.join(href).ok()?,
        Err(_) => return None,
    };
    if url.scheme() != "http" && url.scheme() != "https" {
        return None;
    }
    url.set_fragment(None);
    Some(url)
}

pub(crate) fn host_matches(host: &str, domain: &str) -> bool {
    let host = host.to_ascii_lowercase();
    host == domain || host.ends_with(&format!(".{domain}"))
}
