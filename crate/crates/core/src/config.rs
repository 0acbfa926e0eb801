//! Runtime settings and the optional `key = value` configuration file.
//!
//! Recognized keys:
//!
//! ```text
//! user_agent = tweetcheck/0.1
//! politeness_ms = 1000
//! accept_language = en-US
//! mode = replay                      # live | record | replay
//! fixtures = fixtures                # relative to the config file
//! article_limit = 1
//! endpoint.snopes = https://www.snopes.com/search/{query}/
//! query.snopes.max_chars = 100
//! query.snopes.encoding = percent    # plus | percent
//! query.snopes.truncation = word     # word | char
//! query.web.quoted = true
//! query.web.site_filter = snopes.com
//! selectors.snopes-search = my-snopes.conf
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::error::{Error, Result};
use crate::fetch::{Mode, DEFAULT_POLITENESS, DEFAULT_USER_AGENT};
use crate::model::SourceId;
use crate::query::{Encoding, QuerySpec, Truncation};
use crate::selectors::{PageKind, SelectorSet, Selectors};

pub const QUERY_PLACEHOLDER: &str = "{query}";

/// URL templates; `{query}` is replaced by the encoded query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endpoints {
    templates: BTreeMap<SourceId, String>,
}

impl Default for Endpoints {
    fn default() -> Self {
        let mut templates = BTreeMap::new();
        templates.insert(
            SourceId::SnopesSearch,
            "https://www.snopes.com/search/{query}/".to_string(),
        );
        templates.insert(
            SourceId::ReutersSearch,
            "https://www.reuters.com/search/news?sortBy=&dateRange=&blob={query}".to_string(),
        );
        let web = "https://www.google.com/search?q={query}&hl=en".to_string();
        templates.insert(SourceId::WebSearch, web.clone());
        templates.insert(SourceId::WebSearchSiteSnopes, web);
        templates.insert(
            SourceId::Politwoops,
            "https://projects.propublica.org/politwoops/index?utf8=%E2%9C%93&q={query}".to_string(),
        );
        Endpoints { templates }
    }
}

impl Endpoints {
    pub fn template(&self, source: SourceId) -> &str {
        &self.templates[&source]
    }

    pub fn set(&mut self, source: SourceId, template: impl Into<String>) -> Result<()> {
        let template = template.into();
        if !template.contains(QUERY_PLACEHOLDER) {
            return Err(Error::Config(format!(
                "endpoint for {source} must contain {QUERY_PLACEHOLDER}"
            )));
        }
        self.templates.insert(source, template);
        Ok(())
    }

    pub fn url_for(&self, source: SourceId, encoded_query: &str) -> String {
        self.template(source).replace(QUERY_PLACEHOLDER, encoded_query)
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub user_agent: String,
    pub politeness: Duration,
    pub accept_language: Option<String>,
    pub mode: Option<Mode>,
    pub fixtures: Option<PathBuf>,
    /// Fact-check articles scraped per engine during verification.
    pub article_limit: usize,
    pub endpoints: Endpoints,
    pub selectors: Selectors,
    specs: BTreeMap<SourceId, QuerySpec>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            user_agent: DEFAULT_USER_AGENT.to_string(),
            politeness: DEFAULT_POLITENESS,
            accept_language: Some("en-US,en;q=0.8".to_string()),
            mode: None,
            fixtures: None,
            article_limit: 1,
            endpoints: Endpoints::default(),
            selectors: Selectors::default(),
            specs: SourceId::ALL
                .into_iter()
                .map(|s| (s, QuerySpec::default_for(s)))
                .collect(),
        }
    }
}

impl Settings {
    pub fn spec(&self, source: SourceId) -> &QuerySpec {
        &self.specs[&source]
    }

    pub fn set_spec(&mut self, spec: QuerySpec) {
        self.specs.insert(spec.source(), spec);
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Applies a configuration file on top of the defaults. Relative paths
    /// are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut settings = Settings::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = |msg: String| Error::Config(format!("line {}: {msg}", idx + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            settings.apply(key, value, base).map_err(|e| match e {
                Error::Config(msg) => at(msg),
                other => other,
            })?;
        }
        Ok(settings)
    }

    fn apply(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let parse_num = |v: &str| -> Result<u64> {
            v.parse()
                .map_err(|_| Error::Config(format!("`{key}` expects a number, got {v:?}")))
        };
        match key {
            "user_agent" => self.user_agent = value.to_string(),
            "politeness_ms" => self.politeness = Duration::from_millis(parse_num(value)?),
            "accept_language" => {
                self.accept_language = Some(value.to_string()).filter(|v| !v.is_empty())
            }
            "mode" => self.mode = Some(value.parse()?),
            "fixtures" => self.fixtures = Some(base.join(value)),
            "article_limit" => self.article_limit = parse_num(value)? as usize,
            _ => {
                if let Some(engine) = key.strip_prefix("endpoint.") {
                    let source: SourceId = engine.parse()?;
                    self.endpoints.set(source, value)?;
                } else if let Some(rest) = key.strip_prefix("query.") {
                    let (engine, field) = rest
                        .split_once('.')
                        .ok_or_else(|| Error::Config(format!("unknown key `{key}`")))?;
                    let source: SourceId = engine.parse()?;
                    let spec = self.apply_spec(self.spec(source).clone(), field, value)?;
                    self.set_spec(spec);
                } else if let Some(page) = key.strip_prefix("selectors.") {
                    let kind = PageKind::from_name(page)
                        .ok_or_else(|| Error::Config(format!("unknown selector set `{page}`")))?;
                    let set = SelectorSet::load(page, &base.join(value))?;
                    self.selectors.override_with(kind, &set);
                } else {
                    return Err(Error::Config(format!("unknown key `{key}`")));
                }
            }
        }
        Ok(())
    }

    fn apply_spec(&self, spec: QuerySpec, field: &str, value: &str) -> Result<QuerySpec> {
        match field {
            "max_chars" => {
                let n = value
                    .parse()
                    .map_err(|_| Error::Config(format!("max_chars expects a number, got {value:?}")))?;
                spec.with_max_chars(n)
            }
            "encoding" => Ok(spec.with_encoding(match value {
                "plus" => Encoding::PlusEncoded,
                "percent" => Encoding::PercentEncoded,
                _ => return Err(Error::Config(format!("unknown encoding {value:?}"))),
            })),
            "truncation" => Ok(spec.with_truncation(match value {
                "char" => Truncation::CharPrefix,
                "word" => Truncation::WordBoundaryPrefix,
                _ => return Err(Error::Config(format!("unknown truncation {value:?}"))),
            })),
            "quoted" => Ok(spec.with_quoted(parse_bool(value)?)),
            "site_filter" => spec.with_site_filter(Some(value)),
            _ => Err(Error::Config(format!("unknown query setting `{field}`"))),
        }
        .map_err(|e| match e {
            Error::InvalidSpec(msg) => Error::Config(msg),
            other => other,
        })
    }
}

fn parse_bool(v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("expected a boolean, got {v:?}"))),
    }
}
