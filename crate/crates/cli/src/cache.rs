//! On-disk cache of Lloyd-Max codebooks for uniform sources, keyed by `(q, L)`.

use std::fs;
use std::path::{Path, PathBuf};

use sckyber::quantization::{lloyd_max, DiscretePmf, QuantCodebook};

use crate::CliError;

pub struct CodebookCache {
    dir: Option<PathBuf>,
}

impl CodebookCache {
    /// `dir = None` disables the cache.
    pub fn new(dir: Option<PathBuf>) -> Self {
        CodebookCache { dir }
    }

    /// `--cache-dir`, else `$SCKYBER_CACHE_DIR`, else `$XDG_CACHE_HOME/sckyber`,
    /// else `$HOME/.cache/sckyber`.
    pub fn default_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
        let env = |k| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        flag.or_else(|| env("SCKYBER_CACHE_DIR"))
            .or_else(|| env("XDG_CACHE_HOME").map(|d| d.join("sckyber")))
            .or_else(|| env("HOME").map(|d| d.join(".cache").join("sckyber")))
    }

    fn path(dir: &Path, q: u32, levels: usize) -> PathBuf {
        dir.join(format!("lloyd-max-q{q}-L{levels}.cb"))
    }

    /// The `levels`-level codebook for a uniform source on `Z_q`. Unreadable
    /// or mismatched cache entries are rebuilt; a failed cache write only
    /// produces a warning.
    pub fn uniform(&self, q: u32, levels: usize) -> Result<QuantCodebook, CliError> {
        let source = DiscretePmf::uniform(q)?;
        let Some(dir) = &self.dir else {
            return Ok(lloyd_max(&source, levels)?);
        };
        let path = Self::path(dir, q, levels);
        if let Ok(bytes) = fs::read(&path) {
            match QuantCodebook::from_bytes(&bytes) {
                Ok(cb) if cb.source() == source.label() && cb.len() == levels.min(q as usize) => return Ok(cb),
                _ => eprintln!("sckyber: warning: rebuilding invalid cache entry {}", path.display()),
            }
        }
        let cb = lloyd_max(&source, levels)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let stored = fs::create_dir_all(dir)
            .and_then(|_| fs::write(&tmp, cb.to_bytes().map_err(std::io::Error::other)?))
            .and_then(|_| fs::rename(&tmp, &path));
        if let Err(e) = stored {
            let _ = fs::remove_file(&tmp);
            eprintln!("sckyber: warning: cannot write codebook cache {}: {e}", path.display());
        }
        Ok(cb)
    }
}
