//! Package-metadata providers. The live backend speaks a one-endpoint HTTP
//! contract; the fixture backend reads the same records from a directory;
//! a disabled stub and a freshness-window disk cache round out the set.

use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a provider knows about one package version. Both fields are
/// optional; a record with neither is still a record.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderRecord {
    #[serde(default)]
    pub license_name: Option<String>,
    #[serde(default)]
    pub homepage: Option<String>,
}

/// A source of package metadata, keyed by Maven coordinates. `Ok(None)`
/// means the provider has no record; errors are degradable, the caller
/// warns and keeps going.
pub trait MetadataProvider: Sync {
    fn fetch(&self, group: &str, artifact: &str, version: &str) -> Result<Option<ProviderRecord>>;
}

/// The no-network, no-fixtures provider: never has a record.
pub struct DisabledProvider;

impl MetadataProvider for DisabledProvider {
    fn fetch(&self, _: &str, _: &str, _: &str) -> Result<Option<ProviderRecord>> {
        Ok(None)
    }
}

fn record_file_name(group: &str, artifact: &str, version: &str) -> String {
    format!("{group}__{artifact}__{version}.json")
}

/// Serves records from a directory of `{group}__{artifact}__{version}.json`
/// files.
pub struct FixtureProvider {
    dir: PathBuf,
}

impl FixtureProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        FixtureProvider { dir: dir.into() }
    }
}

impl MetadataProvider for FixtureProvider {
    fn fetch(&self, group: &str, artifact: &str, version: &str) -> Result<Option<ProviderRecord>> {
        let path = self.dir.join(record_file_name(group, artifact, version));
        let text = match std::fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::Provider(format!("{}: {e}", path.display()))),
        };
        let record = serde_json::from_str(&text)
            .map_err(|e| Error::Provider(format!("{}: {e}", path.display())))?;
        Ok(Some(record))
    }
}

/// The live backend: `GET {base}/package/{group}:{artifact}:{version}`
/// returning a JSON record; 404 means no record.
pub struct HttpProvider {
    base_url: String,
    agent: ureq::Agent,
}

impl HttpProvider {
    pub fn new(base_url: impl Into<String>) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(10)))
            .build()
            .into();
        HttpProvider { base_url: base_url.into().trim_end_matches('/').to_string(), agent }
    }
}

impl MetadataProvider for HttpProvider {
    fn fetch(&self, group: &str, artifact: &str, version: &str) -> Result<Option<ProviderRecord>> {
        let url = format!("{}/package/{group}:{artifact}:{version}", self.base_url);
        match self.agent.get(&url).call() {
            Ok(mut response) => {
                let body = response
                    .body_mut()
                    .read_to_string()
                    .map_err(|e| Error::Provider(format!("{url}: {e}")))?;
                let record = serde_json::from_str(&body)
                    .map_err(|e| Error::Provider(format!("{url}: malformed response: {e}")))?;
                Ok(Some(record))
            }
            Err(ureq::Error::StatusCode(404)) => Ok(None),
            Err(e) => Err(Error::Provider(format!("{url}: {e}"))),
        }
    }
}

/// How long a cached provider record stays fresh.
pub const DEFAULT_CACHE_TTL: Duration = Duration::from_secs(7 * 24 * 60 * 60);

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    /// Seconds since the Unix epoch at fetch time.
    fetched_at: u64,
    /// Whether the upstream had a record (negative results are cached too).
    found: bool,
    #[serde(default)]
    record: Option<ProviderRecord>,
}

/// Wraps another provider with an on-disk cache. Entries older than the
/// freshness window are refetched; cache write failures are ignored (the
/// cache is advisory), cache read failures fall through to the upstream.
pub struct CachedProvider<P> {
    inner: P,
    dir: PathBuf,
    ttl: Duration,
}

impl<P: MetadataProvider> CachedProvider<P> {
    pub fn new(inner: P, dir: impl Into<PathBuf>, ttl: Duration) -> Self {
        CachedProvider { inner, dir: dir.into(), ttl }
    }

    fn read_fresh(&self, path: &Path) -> Option<CacheEntry> {
        let text = std::fs::read_to_string(path).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        let now = SystemTime::now().duration_since(UNIX_EPOCH).ok()?.as_secs();
        (now.saturating_sub(entry.fetched_at) <= self.ttl.as_secs()).then_some(entry)
    }

    fn write(&self, path: &Path, entry: &CacheEntry) {
        let Ok(json) = serde_json::to_string(entry) else { return };
        if std::fs::create_dir_all(&self.dir).is_err() {
            return;
        }
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        if std::fs::write(&tmp, json).is_ok() {
            let _ = std::fs::rename(&tmp, path);
        }
    }
}

impl<P: MetadataProvider> MetadataProvider for CachedProvider<P> {
    fn fetch(&self, group: &str, artifact: &str, version: &str) -> Result<Option<ProviderRecord>> {
        let path = self.dir.join(record_file_name(group, artifact, version));
        if let Some(entry) = self.read_fresh(&path) {
            return Ok(if entry.found { entry.record.or(Some(ProviderRecord::default())) } else { None });
        }
        let fetched = self.inner.fetch(group, artifact, version)?;
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        self.write(
            &path,
            &CacheEntry { fetched_at: now, found: fetched.is_some(), record: fetched.clone() },
        );
        Ok(fetched)
    }
}
