//! Selector configuration: plain `key = value` files, one per page type.
//!
//! Values are CSS selector lists, regular expressions or comma-separated
//! names depending on the key. Lines starting with `#` are comments. The
//! defaults shipped with the crate live under `selectors/`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use regex::Regex;
use scraper::Selector;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorSet {
    name: String,
    entries: BTreeMap<String, String>,
}

impl SelectorSet {
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("{name}: line {}: expected `key = value`", idx + 1))
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Config(format!("{name}: line {}: empty key", idx + 1)));
            }
            entries.insert(key.to_string(), value.trim().to_string());
        }
        Ok(SelectorSet {
            name: name.to_string(),
            entries,
        })
    }

    pub fn load(name: &str, path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(name, &text)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Config(format!("{}: missing key `{key}`", self.name)))
    }

    pub fn css(&self, key: &str) -> Result<Selector> {
        let raw = self.require(key)?;
        Selector::parse(raw)
            .map_err(|e| Error::Config(format!("{}: bad selector for `{key}`: {e}", self.name)))
    }

    pub fn css_opt(&self, key: &str) -> Result<Option<Selector>> {
        match self.get(key) {
            Some(_) => self.css(key).map(Some),
            None => Ok(None),
        }
    }

    pub fn regex(&self, key: &str) -> Result<Regex> {
        let raw = self.require(key)?;
        Regex::new(raw).map_err(|e| Error::Config(format!("{}: bad pattern for `{key}`: {e}", self.name)))
    }

    pub fn regex_opt(&self, key: &str) -> Result<Option<Regex>> {
        match self.get(key) {
            Some(_) => self.regex(key).map(Some),
            None => Ok(None),
        }
    }

    pub fn list(&self, key: &str) -> Vec<String> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Overlays `other` on top of `self`, key by key.
    pub fn merged(mut self, other: &SelectorSet) -> Self {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
        self
    }
}

/// Which page a selector set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PageKind {
    SnopesSearch,
    ReutersSearch,
    WebSearch,
    PolitwoopsSearch,
    SnopesArticle,
    ReutersArticle,
}

impl PageKind {
    pub const ALL: [PageKind; 6] = [
        PageKind::SnopesSearch,
        PageKind::ReutersSearch,
        PageKind::WebSearch,
        PageKind::PolitwoopsSearch,
        PageKind::SnopesArticle,
        PageKind::ReutersArticle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PageKind::SnopesSearch => "snopes-search",
            PageKind::ReutersSearch => "reuters-search",
            PageKind::WebSearch => "web-search",
            PageKind::PolitwoopsSearch => "politwoops-search",
            PageKind::SnopesArticle => "snopes-article",
            PageKind::ReutersArticle => "reuters-article",
        }
    }

    fn default_text(self) -> &'static str {
        match self {
            PageKind::SnopesSearch => include_str!("../selectors/snopes-search.conf"),
            PageKind::ReutersSearch => include_str!("../selectors/reuters-search.conf"),
            PageKind::WebSearch => include_str!("../selectors/web-search.conf"),
            PageKind::PolitwoopsSearch => include_str!("../selectors/politwoops-search.conf"),
            PageKind::SnopesArticle => include_str!("../selectors/snopes-article.conf"),
            PageKind::ReutersArticle => include_str!("../selectors/reuters-article.conf"),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        PageKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// One selector set per page kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selectors {
    sets: BTreeMap<&'static str, SelectorSet>,
}

impl Default for Selectors {
    fn default() -> Self {
        let sets = PageKind::ALL
            .into_iter()
            .map(|kind| {
                let set = SelectorSet::parse(kind.name(), kind.default_text())
                    .expect("built-in selector files parse");
                (kind.name(), set)
            })
            .collect();
        Selectors { sets }
    }
}

impl Selectors {
    pub fn get(&self, kind: PageKind) -> &SelectorSet {
        &self.sets[kind.name()]
    }

    /// Overlays the keys in `set` onto the defaults for `kind`.
    pub fn override_with(&mut self, kind: PageKind, set: &SelectorSet) {
        let merged = self.get(kind).clone().merged(set);
        self.sets.insert(kind.name(), merged);
    }
}
