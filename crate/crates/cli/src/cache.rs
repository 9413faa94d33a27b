use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Hex SHA-256 of the tool version and a canonical input serialization.
pub fn digest(version: &str, canonical: &str) -> String {
    let mut h = Sha256::new();
    h.update(version.as_bytes());
    h.update([0]);
    h.update(canonical.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Content-addressed store: `reports/<digest>.json` holds the exact bytes of
/// a report, `matrices/<digest>.txt` boundary matrices of a complex. Each
/// entry has a sibling `.lock` file taken shared for reads and exclusively
/// for writes.
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: &Path) -> std::io::Result<Cache> {
        for sub in ["reports", "matrices"] {
            fs::create_dir_all(root.join(sub))?;
        }
        Ok(Cache { root: root.to_path_buf() })
    }

    fn path(&self, kind: &str, key: &str) -> PathBuf {
        let ext = if kind == "reports" { "json" } else { "txt" };
        self.root.join(kind).join(format!("{key}.{ext}"))
    }

    fn lock_file(&self, kind: &str, key: &str) -> std::io::Result<File> {
        OpenOptions::new().create(true).truncate(false).write(true).open(self.root.join(kind).join(format!("{key}.lock")))
    }

    fn get(&self, kind: &str, key: &str) -> Option<Vec<u8>> {
        let lock = self.lock_file(kind, key).ok()?;
        lock.lock_shared().ok()?;
        let mut buf = Vec::new();
        let ok = File::open(self.path(kind, key)).and_then(|mut f| f.read_to_end(&mut buf)).is_ok();
        let _ = lock.unlock();
        ok.then_some(buf)
    }

    fn put(&self, kind: &str, key: &str, bytes: &[u8]) -> std::io::Result<()> {
        let lock = self.lock_file(kind, key)?;
        lock.lock()?;
        let tmp = self.root.join(kind).join(format!("{key}.{}.tmp", std::process::id()));
        let res = File::create(&tmp)
            .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
            .and_then(|_| fs::rename(&tmp, self.path(kind, key)));
        let _ = lock.unlock();
        res
    }

    pub fn report(&self, key: &str) -> Option<Vec<u8>> {
        self.get("reports", key)
    }

    pub fn store_report(&self, key: &str, bytes: &[u8]) -> std::io::Result<()> {
        self.put("reports", key, bytes)
    }

    pub fn matrices(&self, key: &str) -> Option<String> {
        self.get("matrices", key).and_then(|b| String::from_utf8(b).ok())
    }

    pub fn store_matrices(&self, key: &str, text: &str) -> std::io::Result<()> {
        self.put("matrices", key, text.as_bytes())
    }
}

/// `$HOMCX_CACHE_DIR`, then `$XDG_CACHE_HOME/homcx`, then `~/.cache/homcx`.
pub fn default_root() -> Option<PathBuf> {
    if let Some(p) = std::env::var_os("HOMCX_CACHE_DIR") {
        return Some(PathBuf::from(p));
    }
    if let Some(p) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(p).join("homcx"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("homcx"))
}
