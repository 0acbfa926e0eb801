//! The single HTTP gateway. Every page the crate reads goes through a
//! [`Fetcher`], which either talks to the network (`Live`), talks to the
//! network and stores what it saw (`Record`), or serves stored responses
//! without any network access (`Replay`).
//!
//! Stored responses live one per file in a fixture directory, named
//! `<digest>.fixture` where the digest is the [`FixtureKey`] of the request.
//! A fixture file is a four-line ASCII header (status, final URL, content
//! type, body length in bytes), a blank line, then the raw body bytes.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};
use url::Url;

use crate::error::{Error, FixtureMiss, Result};

pub const DEFAULT_POLITENESS: Duration = Duration::from_millis(1000);
pub const MAX_REDIRECTS: usize = 5;
pub const DEFAULT_USER_AGENT: &str = concat!(
    "tweetcheck/",
    env!("CARGO_PKG_VERSION"),
    " (tweet attribution checker)"
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Get,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Get => "GET",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchRequest {
    method: Method,
    url: Url,
    accept_language: Option<String>,
}

impl FetchRequest {
    pub fn get(url: &str) -> Result<Self> {
        let parsed = Url::parse(url)
            .map_err(|e| Error::InvalidRequest(format!("{url:?} is not an absolute URL: {e}")))?;
        if !parsed.has_host() || parsed.cannot_be_a_base() {
            return Err(Error::InvalidRequest(format!("{url:?} has no host")));
        }
        Ok(FetchRequest {
            method: Method::Get,
            url: parsed,
            accept_language: None,
        })
    }

    pub fn with_accept_language(mut self, lang: impl Into<String>) -> Self {
        self.accept_language = Some(lang.into());
        self
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn url(&self) -> &Url {
        &self.url
    }

    pub fn accept_language(&self) -> Option<&str> {
        self.accept_language.as_deref()
    }

    pub fn host(&self) -> &str {
        self.url.host_str().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchResponse {
    pub status: u16,
    pub final_url: String,
    pub body: Vec<u8>,
    pub content_type: String,
}

impl FetchResponse {
    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }

    pub fn text(&self) -> std::borrow::Cow<'_, str> {
        String::from_utf8_lossy(&self.body)
    }

    pub fn final_host(&self) -> Option<String> {
        Url::parse(&self.final_url)
            .ok()
            .and_then(|u| u.host_str().map(str::to_ascii_lowercase))
    }
}

/// SHA-256 of `"<METHOD> <normalized-url>"`, as 64 lowercase hex digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FixtureKey(String);

impl FixtureKey {
    pub fn for_request(req: &FetchRequest) -> Self {
        Self::from_parts(req.method(), req.url())
    }

    pub fn from_parts(method: Method, url: &Url) -> Self {
        let material = format!("{} {}", method.as_str(), normalize_key_url(url));
        FixtureKey(hex::encode(Sha256::digest(material.as_bytes())))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn file_name(&self) -> String {
        format!("{}.fixture", self.0)
    }
}

impl fmt::Display for FixtureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Scheme and host lowercased (the parser already does this), trailing `/`
/// removed from the path, fragment dropped, query kept.
pub fn normalize_key_url(url: &Url) -> String {
    let mut out = format!("{}://", url.scheme());
    if let Some(host) = url.host_str() {
        out.push_str(host);
    }
    if let Some(port) = url.port() {
        out.push(':');
        out.push_str(&port.to_string());
    }
    out.push_str(url.path().trim_end_matches('/'));
    if let Some(q) = url.query() {
        out.push('?');
        out.push_str(q);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Live,
    Record,
    Replay,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Live => "live",
            Mode::Record => "record",
            Mode::Replay => "replay",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "live" => Ok(Mode::Live),
            "record" => Ok(Mode::Record),
            "replay" => Ok(Mode::Replay),
            other => Err(Error::Config(format!(
                "unknown fetch mode {other:?} (expected live, record or replay)"
            ))),
        }
    }
}

/// Something that can perform a request over the network.
pub trait Transport: Send + Sync {
    fn send(&self, req: &FetchRequest) -> Result<FetchResponse>;
}

/// `reqwest`-backed transport. Follows up to [`MAX_REDIRECTS`] redirects.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(user_agent: &str) -> Result<Self> {
        let client = reqwest::blocking::Client::builder()
            .user_agent(user_agent)
            .redirect(reqwest::redirect::Policy::limited(MAX_REDIRECTS))
            .timeout(Duration::from_secs(30))
            .build()
            .map_err(|e| Error::Config(format!("cannot build HTTP client: {e}")))?;
        Ok(HttpTransport { client })
    }
}

impl Transport for HttpTransport {
    fn send(&self, req: &FetchRequest) -> Result<FetchResponse> {
        let network = |e: reqwest::Error| Error::Network {
            url: req.url().to_string(),
            message: e.to_string(),
        };
        let mut builder = self.client.get(req.url().clone());
        if let Some(lang) = req.accept_language() {
            builder = builder.header(reqwest::header::ACCEPT_LANGUAGE, lang);
        }
        let resp = builder.send().map_err(network)?;
        let status = resp.status().as_u16();
        let final_url = resp.url().to_string();
        let content_type = resp
            .headers()
            .get(reqwest::header::CONTENT_TYPE)
            .and_then(|v| v.to_str().ok())
            .unwrap_or_default()
            .to_string();
        let body = resp.bytes().map_err(network)?.to_vec();
        Ok(FetchResponse {
            status,
            final_url,
            body,
            content_type,
        })
    }
}

/// Directory of `<digest>.fixture` files.
pub struct FixtureStore {
    dir: PathBuf,
    write_locks: Mutex<HashMap<FixtureKey, Arc<Mutex<()>>>>,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl FixtureStore {
    /// Opens an existing fixture directory.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        if !dir.is_dir() {
            return Err(Error::io(
                &dir,
                io::Error::new(io::ErrorKind::NotFound, "fixture directory does not exist"),
            ));
        }
        Ok(Self::unchecked(dir))
    }

    /// Opens a fixture directory, creating it if needed.
    pub fn create(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self::unchecked(dir))
    }

    fn unchecked(dir: PathBuf) -> Self {
        FixtureStore {
            dir,
            write_locks: Mutex::new(HashMap::new()),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &FixtureKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    pub fn get(&self, key: &FixtureKey) -> Result<Option<FetchResponse>> {
        let path = self.path_for(key);
        match fs::read(&path) {
            Ok(bytes) => decode_fixture(&bytes)
                .map(Some)
                .map_err(|message| Error::CorruptFixture { path, message }),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    /// Writes are serialized per key and land atomically; the last write wins.
    pub fn put(&self, key: &FixtureKey, resp: &FetchResponse) -> Result<()> {
        let lock = {
            let mut locks = self.write_locks.lock().unwrap_or_else(|p| p.into_inner());
            locks.entry(key.clone()).or_default().clone()
        };
        let _guard = lock.lock().unwrap_or_else(|p| p.into_inner());
        let path = self.path_for(key);
        let tmp = self.dir.join(format!(
            ".{}.{}.{}.tmp",
            key.as_str(),
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, encode_fixture(resp)).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }
}

fn header_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii() && !c.is_ascii_control() { c } else { '?' })
        .collect()
}

pub fn encode_fixture(resp: &FetchResponse) -> Vec<u8> {
    let header = format!(
        "{}\n{}\n{}\n{}\n\n",
        resp.status,
        header_safe(&resp.final_url),
        header_safe(&resp.content_type),
        resp.body.len()
    );
    let mut out = header.into_bytes();
    out.extend_from_slice(&resp.body);
    out
}

pub fn decode_fixture(bytes: &[u8]) -> std::result::Result<FetchResponse, String> {
    let mut rest = bytes;
    let mut lines = Vec::with_capacity(5);
    for _ in 0..5 {
        let nl = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or("truncated header")?;
        let line = std::str::from_utf8(&rest[..nl]).map_err(|_| "header is not ASCII")?;
        lines.push(line);
        rest = &rest[nl + 1..];
    }
    if !lines[4].is_empty() {
        return Err("missing blank line after header".into());
    }
    let status: u16 = lines[0]
        .parse()
        .map_err(|_| format!("bad status line {:?}", lines[0]))?;
    if !(100..=599).contains(&status) {
        return Err(format!("status {status} out of range"));
    }
    let len: usize = lines[3]
        .parse()
        .map_err(|_| format!("bad length line {:?}", lines[3]))?;
    if rest.len() != len {
        return Err(format!("header says {len} body bytes, found {}", rest.len()));
    }
    Ok(FetchResponse {
        status,
        final_url: lines[1].to_string(),
        content_type: lines[2].to_string(),
        body: rest.to_vec(),
    })
}

#[derive(Default)]
struct HostState {
    busy: bool,
    ready_at: Option<Instant>,
}

type HostCell = Arc<(Mutex<HostState>, Condvar)>;

/// Per-host request spacing shared by every caller of one [`Fetcher`].
///
/// At most one request per host is in flight, and the next one starts no
/// earlier than `delay` after the previous one finished. Different hosts do
/// not wait for each other.
pub struct Politeness {
    delay: Duration,
    hosts: Mutex<HashMap<String, HostCell>>,
}

/// Holds a host's request slot; dropping it starts the delay.
pub struct HostSlot<'a> {
    politeness: &'a Politeness,
    state: HostCell,
}

impl Drop for HostSlot<'_> {
    fn drop(&mut self) {
        let (lock, cvar) = &*self.state;
        let mut st = lock.lock().unwrap_or_else(|p| p.into_inner());
        st.busy = false;
        st.ready_at = Some(Instant::now() + self.politeness.delay);
        cvar.notify_one();
    }
}

impl Politeness {
    pub fn new(delay: Duration) -> Self {
        Politeness {
            delay,
            hosts: Mutex::new(HashMap::new()),
        }
    }

    pub fn delay(&self) -> Duration {
        self.delay
    }

    /// Blocks until a request to `host` may start and reserves the host
    /// until the returned slot is dropped.
    pub fn acquire(&self, host: &str) -> HostSlot<'_> {
        let state = {
            let mut hosts = self.hosts.lock().unwrap_or_else(|p| p.into_inner());
            hosts.entry(host.to_ascii_lowercase()).or_default().clone()
        };
        {
            let (lock, cvar) = &*state;
            let mut st = lock.lock().unwrap_or_else(|p| p.into_inner());
            loop {
                if st.busy {
                    st = cvar.wait(st).unwrap_or_else(|p| p.into_inner());
                    continue;
                }
                match st.ready_at {
                    Some(t) if t > Instant::now() => {
                        let wait = t - Instant::now();
                        st = cvar.wait_timeout(st, wait).unwrap_or_else(|p| p.into_inner()).0;
                    }
                    _ => break,
                }
            }
            st.busy = true;
        }
        HostSlot { politeness: self, state }
    }

    /// Waits for `host` like [`Politeness::acquire`] and releases at once.
    pub fn wait(&self, host: &str) {
        drop(self.acquire(host));
    }
}

pub struct Fetcher {
    mode: Mode,
    store: Option<FixtureStore>,
    transport: Option<Arc<dyn Transport>>,
    politeness: Politeness,
}

impl Fetcher {
    /// Replay-only fetcher. It has no transport at all.
    pub fn replay(store: FixtureStore) -> Self {
        Fetcher {
            mode: Mode::Replay,
            store: Some(store),
            transport: None,
            politeness: Politeness::new(Duration::ZERO),
        }
    }

    /// General constructor. `Record` and `Replay` need a store; `Live` and
    /// `Record` need a transport.
    pub fn new(
        mode: Mode,
        store: Option<FixtureStore>,
        transport: Option<Arc<dyn Transport>>,
        politeness: Duration,
    ) -> Result<Self> {
        if mode != Mode::Live && store.is_none() {
            return Err(Error::Config(format!("{} mode needs a fixture directory", mode.as_str())));
        }
        if mode != Mode::Replay && transport.is_none() {
            return Err(Error::Config(format!("{} mode needs a transport", mode.as_str())));
        }
        Ok(Fetcher {
            mode,
            store,
            transport,
            politeness: Politeness::new(politeness),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn store(&self) -> Option<&FixtureStore> {
        self.store.as_ref()
    }

    pub fn fetch(&self, req: &FetchRequest) -> Result<FetchResponse> {
        match self.mode {
            Mode::Replay => {
                let store = self.store.as_ref().expect("replay fetcher has a store");
                let key = FixtureKey::for_request(req);
                store.get(&key)?.ok_or_else(|| {
                    Error::FixtureMiss(FixtureMiss {
                        url: req.url().to_string(),
                        key: key.to_string(),
                        record_id: None,
                    })
                })
            }
            Mode::Live | Mode::Record => {
                let transport = self.transport.as_ref().expect("live fetcher has a transport");
                let slot = self.politeness.acquire(req.host());
                let resp = transport.send(req);
                drop(slot);
                let resp = resp?;
                if !(100..=599).contains(&resp.status) {
                    return Err(Error::Network {
                        url: req.url().to_string(),
                        message: format!("invalid HTTP status {}", resp.status),
                    });
                }
                if self.mode == Mode::Record {
                    let store = self.store.as_ref().expect("record fetcher has a store");
                    store.put(&FixtureKey::for_request(req), &resp)?;
                }
                Ok(resp)
            }
        }
    }
}
