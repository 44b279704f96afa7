use std::path::PathBuf;

use anyhow::Result;
use clap::ValueEnum;

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OeisMode {
    Online,
    Offline,
}

/// Everything a command needs besides its own positional choices.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub max_n: u64,
    pub max_j: u64,
    pub max_iter: u32,
    pub output_format: OutputFormat,
    pub oeis_mode: OeisMode,
    pub cache_dir: PathBuf,
    pub parallelism: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_n == 0 || self.max_j == 0 {
            return Err(UsageError("max-n and max-j must be positive".into()).into());
        }
        if self.parallelism == 0 {
            return Err(UsageError("parallelism must be at least 1".into()).into());
        }
        Ok(())
    }

    /// Runs `f` on a pool of `parallelism` workers.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.parallelism).build()?;
        Ok(pool.install(f))
    }
}

/// `$XDG_CACHE_HOME/logprim`, falling back to `~/.cache/logprim`.
pub fn default_cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME").filter(|d| !d.is_empty()) {
        return PathBuf::from(dir).join("logprim");
    }
    match std::env::var_os("HOME") {
        Some(home) => PathBuf::from(home).join(".cache").join("logprim"),
        None => std::env::temp_dir().join("logprim-cache"),
    }
}

pub fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
