//! Hand-built page corpus shared by the integration tests. Each entry maps a
//! request (a search query or an article URL) to a page under
//! `tests/data/pages`; `record_corpus` pushes the whole corpus through a
//! recording fetcher to produce a fixture store.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use tweetcheck_core::fetch::{FixtureKey, Transport};
use tweetcheck_core::query::encode_query;
use tweetcheck_core::{
    build_query, Error, FetchRequest, FetchResponse, Fetcher, FixtureStore, Mode, Result, Settings, SourceId,
    TweetClaim,
};

pub const PANDEMIC: &str = "Obama's handling of this whole pandemic has been terrible! As President, ALL responsibility becomes yours during a crisis like this, whether or not you're entirely to blame. John McCain, and for that matter myself, would never let thousands of Americans die from a pandemic while in office.";

pub const JOBS: &str = "The jobs report shows unemployment down to 3.5%, the lowest rate in decades. More people are working than at any point in American history. but it's not the number of jobs that counts. That's why Democrats are fighting to ensure jobs provide living wages, benefits & paid leave.";

pub const SNOPES_PANDEMIC: &str = "https://www.snopes.com/fact-check/2009-trump-tweet-pandemic/";
pub const SNOPES_UNPRESIDENTED: &str = "https://www.snopes.com/fact-check/trump-sends-unpresidented-tweet/";
pub const SNOPES_NO_RATING: &str = "https://www.snopes.com/fact-check/synthetic-rating-block-removed/";
pub const REUTERS_SHORT: &str = "http://reuters.com/article/idUSKCN2242AK";
pub const REUTERS_LONG: &str = "https://www.reuters.com/article/uk-factcheck-trump-tweet-thousands-die/false-claim-in-2009-trump-tweeted-that-he-would-never-let-thousands-of-americans-die-from-a-pandemic-idUSKCN2242AK";
pub const POLITWOOPS_JOBS_HIT: &str = "https://projects.propublica.org/politwoops/tweet/1000000000000000001";

/// (record id, tweet body, known Snopes article) for the metric corpus.
pub const METRIC: [(&str, &str, &str); 3] = [
    (
        "m1",
        "Synthetic metric fixture one: the town library will extend its weekend opening hours.",
        "https://www.snopes.com/fact-check/synthetic-metric-one/",
    ),
    (
        "m2",
        "Synthetic metric fixture two: the regional rail line will add a late evening service.",
        "https://www.snopes.com/fact-check/synthetic-metric-two/",
    ),
    (
        "m3",
        "Synthetic metric fixture three: the harbour festival moves to the first week of June.",
        "https://www.snopes.com/fact-check/synthetic-metric-three/",
    ),
];

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn committed_fixtures() -> PathBuf {
    data_dir().join("fixtures")
}

pub fn metric_dataset() -> PathBuf {
    data_dir().join("metric.tsv")
}

pub fn read_page(file: &str) -> Vec<u8> {
    std::fs::read(data_dir().join("pages").join(file)).unwrap_or_else(|e| panic!("page {file}: {e}"))
}

enum Entry {
    Search(SourceId, &'static str, &'static str),
    Url(&'static str, &'static str, &'static str),
}

fn entries() -> Vec<Entry> {
    use Entry::*;
    use SourceId::*;
    let mut list = vec![
        Search(SnopesSearch, PANDEMIC, "snopes_search_pandemic.html"),
        Search(ReutersSearch, PANDEMIC, "reuters_search_pandemic.html"),
        Search(WebSearch, PANDEMIC, "google_pandemic.html"),
        Search(WebSearchSiteSnopes, PANDEMIC, "google_site_snopes_pandemic.html"),
        Search(Politwoops, PANDEMIC, "politwoops_none.html"),
        Search(SnopesSearch, JOBS, "snopes_search_none.html"),
        Search(ReutersSearch, JOBS, "reuters_search_none.html"),
        Search(WebSearch, JOBS, "google_jobs.html"),
        Search(WebSearchSiteSnopes, JOBS, "google_none.html"),
        Search(Politwoops, JOBS, "politwoops_jobs.html"),
        Url(SNOPES_PANDEMIC, SNOPES_PANDEMIC, "snopes_article_2009_trump_tweet_pandemic.html"),
        Url(SNOPES_UNPRESIDENTED, SNOPES_UNPRESIDENTED, "snopes_article_trump_sends_unpresidented_tweet.html"),
        Url(SNOPES_NO_RATING, SNOPES_NO_RATING, "snopes_article_no_rating.html"),
        Url(REUTERS_LONG, REUTERS_LONG, "reuters_article_idUSKCN2242AK.html"),
        Url(REUTERS_SHORT, REUTERS_LONG, "reuters_article_idUSKCN2242AK.html"),
    ];
    list.push(Search(SnopesSearch, METRIC[0].1, "snopes_search_metric.html"));
    list.push(Search(SnopesSearch, METRIC[1].1, "snopes_search_metric.html"));
    list.push(Search(SnopesSearch, METRIC[2].1, "snopes_search_metric_other.html"));
    list
}

/// The URL the default settings would request for `body` on `source`.
pub fn search_url(source: SourceId, body: &str) -> String {
    let settings = Settings::default();
    let spec = settings.spec(source);
    let claim = TweetClaim::new(body).expect("valid claim");
    let query = build_query(&claim, spec);
    settings.endpoints.url_for(source, &encode_query(&query, spec.encoding()))
}

/// Every request in the corpus with the response it should produce.
pub fn corpus() -> Vec<(FetchRequest, FetchResponse)> {
    entries()
        .into_iter()
        .map(|entry| {
            let (url, final_url, file) = match entry {
                Entry::Search(source, body, file) => {
                    let url = search_url(source, body);
                    (url.clone(), url, file)
                }
                Entry::Url(url, final_url, file) => (url.to_string(), final_url.to_string(), file),
            };
            let resp = FetchResponse {
                status: 200,
                final_url,
                body: read_page(file),
                content_type: "text/html; charset=utf-8".to_string(),
            };
            (FetchRequest::get(&url).expect("absolute url"), resp)
        })
        .collect()
}

/// Serves the corpus in place of the network and counts every send.
pub struct CannedTransport {
    pages: HashMap<String, FetchResponse>,
    pub sends: AtomicUsize,
}

impl CannedTransport {
    pub fn new() -> Self {
        let pages = corpus()
            .into_iter()
            .map(|(req, resp)| (FixtureKey::for_request(&req).as_str().to_string(), resp))
            .collect();
        CannedTransport {
            pages,
            sends: AtomicUsize::new(0),
        }
    }

    pub fn sends(&self) -> usize {
        self.sends.load(Ordering::SeqCst)
    }
}

impl Transport for CannedTransport {
    fn send(&self, req: &FetchRequest) -> Result<FetchResponse> {
        self.sends.fetch_add(1, Ordering::SeqCst);
        self.pages
            .get(FixtureKey::for_request(req).as_str())
            .cloned()
            .ok_or_else(|| Error::Network {
                url: req.url().to_string(),
                message: "no canned page".to_string(),
            })
    }
}

/// Fails the test if anything tries to reach the network.
pub struct PanickingTransport;

impl Transport for PanickingTransport {
    fn send(&self, req: &FetchRequest) -> Result<FetchResponse> {
        panic!("network access attempted: {}", req.url())
    }
}

pub fn recording_fetcher(dir: &Path, transport: Arc<CannedTransport>) -> Fetcher {
    Fetcher::new(Mode::Record, Some(FixtureStore::create(dir).unwrap()), Some(transport), Duration::ZERO).unwrap()
}

/// Records the whole corpus into `dir`.
pub fn record_corpus(dir: &Path) {
    let fetcher = recording_fetcher(dir, Arc::new(CannedTransport::new()));
    for (req, _) in corpus() {
        fetcher.fetch(&req).unwrap();
    }
}

pub fn replay_fetcher(dir: &Path) -> Fetcher {
    Fetcher::replay(FixtureStore::open(dir).unwrap())
}
