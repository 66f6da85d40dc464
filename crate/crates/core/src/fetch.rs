//! Download and cache TU dataset archives.
//!
//! `<base_url>/<NAME>.zip` is fetched once into the cache directory and
//! extracted to `<cache_dir>/<NAME>/`. Concurrent fetches of the same
//! dataset serialize on `<cache_dir>/<NAME>.lock`.

use std::fs::{self, File};
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DEFAULT_BASE_URL: &str = "https://www.chrsmrrs.com/graphkerneldatasets";
pub const CACHE_DIR_ENV: &str = "WLAUDIT_CACHE_DIR";
pub const BASE_URL_ENV: &str = "WLAUDIT_BASE_URL";

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub base_url: String,
    pub cache_dir: PathBuf,
    pub timeout: Duration,
    /// Expected SHA-256 of the archive, lowercase hex.
    pub checksum: Option<String>,
}

impl FetchConfig {
    /// Base URL and cache directory from the environment, falling back to the
    /// public archive and `$HOME/.cache/wlaudit`.
    pub fn from_env() -> Self {
        let base_url = std::env::var(BASE_URL_ENV).unwrap_or_else(|_| DEFAULT_BASE_URL.to_string());
        let cache_dir = std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache/wlaudit")))
            .unwrap_or_else(|| PathBuf::from(".wlaudit-cache"));
        FetchConfig {
            base_url,
            cache_dir,
            timeout: Duration::from_secs(60),
            checksum: None,
        }
    }
}

fn dataset_dir(cfg: &FetchConfig, name: &str) -> PathBuf {
    cfg.cache_dir.join(name)
}

fn is_complete(dir: &Path, name: &str) -> bool {
    dir.join(format!("{name}_A.txt")).is_file()
}

/// Returns a directory holding `NAME_A.txt` and friends, downloading and
/// extracting the archive on a cache miss.
pub fn fetch_dataset(cfg: &FetchConfig, name: &str) -> Result<PathBuf> {
    if cfg.base_url.is_empty() {
        return Err(Error::InvalidArgument("empty base URL".into()));
    }
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(Error::InvalidArgument(format!("bad dataset name {name:?}")));
    }
    let dir = dataset_dir(cfg, name);
    if is_complete(&dir, name) {
        return Ok(dir);
    }
    fs::create_dir_all(&cfg.cache_dir).map_err(|e| Error::io(&cfg.cache_dir, e))?;
    let lock_path = cfg.cache_dir.join(format!("{name}.lock"));
    let lock = File::create(&lock_path).map_err(|e| Error::io(&lock_path, e))?;
    lock.lock().map_err(|e| Error::io(&lock_path, e))?;
    // another process may have finished while we waited
    if is_complete(&dir, name) {
        return Ok(dir);
    }

    let url = format!("{}/{name}.zip", cfg.base_url.trim_end_matches('/'));
    let bytes = download(&url, cfg.timeout)?;
    if let Some(expected) = &cfg.checksum {
        let actual = hex::encode(Sha256::digest(&bytes));
        if !actual.eq_ignore_ascii_case(expected) {
            return Err(Error::ChecksumMismatch {
                name: name.to_string(),
                expected: expected.clone(),
                actual,
            });
        }
    }
    let archive = cfg.cache_dir.join(format!("{name}.zip"));
    fs::write(&archive, &bytes).map_err(|e| Error::io(&archive, e))?;
    extract(&archive, &bytes, &cfg.cache_dir, name)?;
    if !is_complete(&dir, name) {
        return Err(Error::ExtractError {
            archive,
            reason: format!("archive has no {name}/{name}_A.txt"),
        });
    }
    Ok(dir)
}

fn download(url: &str, timeout: Duration) -> Result<Vec<u8>> {
    let failed = |reason: String| Error::FetchFailed {
        url: url.to_string(),
        reason,
    };
    let agent = ureq::AgentBuilder::new().timeout(timeout).build();
    let response = agent.get(url).call().map_err(|e| match e {
        ureq::Error::Status(code, _) => failed(format!("HTTP {code}")),
        other => failed(other.to_string()),
    })?;
    let mut bytes = Vec::new();
    response
        .into_reader()
        .read_to_end(&mut bytes)
        .map_err(|e| failed(e.to_string()))?;
    Ok(bytes)
}

/// Extracts every file of the archive below `dest`. Entries for `NAME_*`
/// files that sit at the archive root are moved under `NAME/`.
fn extract(archive: &Path, bytes: &[u8], dest: &Path, name: &str) -> Result<()> {
    let bad = |reason: String| Error::ExtractError {
        archive: archive.to_path_buf(),
        reason,
    };
    let mut zip = zip::ZipArchive::new(io::Cursor::new(bytes)).map_err(|e| bad(e.to_string()))?;
    for i in 0..zip.len() {
        let mut entry = zip.by_index(i).map_err(|e| bad(e.to_string()))?;
        let Some(rel) = entry.enclosed_name() else {
            return Err(bad(format!("unsafe entry path {:?}", entry.name())));
        };
        let rel = if rel.components().count() == 1 {
            Path::new(name).join(rel)
        } else {
            rel
        };
        let out = dest.join(rel);
        if entry.is_dir() {
            fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            continue;
        }
        if let Some(parent) = out.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        let mut file = File::create(&out).map_err(|e| Error::io(&out, e))?;
        io::copy(&mut entry, &mut file).map_err(|e| Error::io(&out, e))?;
    }
    Ok(())
}
