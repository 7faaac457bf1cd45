use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use sqmeter_core::profile::DEFAULT_THRESHOLD;
use sqmeter_core::{builtin, load_template, load_wordlist, Engine, HashParams, TemplateSet, WordlistSet};

/// A wordlist on disk and the category it belongs to. Parsed from
/// `category=path`, or a bare path whose file stem names the category.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordlistSpec {
    pub category: String,
    pub path: PathBuf,
}

impl FromStr for WordlistSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some((cat, path)) = s.split_once('=') {
            if cat.is_empty() || path.is_empty() {
                return Err(format!("bad wordlist spec {s:?}, expected category=path"));
            }
            return Ok(WordlistSpec {
                category: cat.to_owned(),
                path: path.into(),
            });
        }
        let path = PathBuf::from(s);
        let category = path
            .file_stem()
            .and_then(|s| s.to_str())
            .filter(|s| !s.is_empty())
            .ok_or_else(|| format!("cannot take a category from {s:?}"))?
            .to_owned();
        Ok(WordlistSpec { category, path })
    }
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    /// Replace the shipped wordlists when non-empty.
    pub wordlists: Vec<WordlistSpec>,
    /// Added over the shipped templates, replacing same-category ones.
    pub templates: Vec<PathBuf>,
    pub threshold: u8,
    pub session_ttl: Duration,
    /// Profiles are kept in memory only when unset.
    pub store: Option<PathBuf>,
    pub hash: HashParams,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            wordlists: Vec::new(),
            templates: Vec::new(),
            threshold: DEFAULT_THRESHOLD,
            session_ttl: Duration::from_secs(30 * 60),
            store: None,
            hash: HashParams::default(),
        }
    }
}

pub fn load_wordlists(specs: &[WordlistSpec]) -> sqmeter_core::Result<WordlistSet> {
    if specs.is_empty() {
        return Ok(builtin::wordlists());
    }
    let mut set = WordlistSet::default();
    for spec in specs {
        set.add(load_wordlist(&spec.path, &spec.category)?);
    }
    Ok(set)
}

pub fn load_templates(paths: &[impl AsRef<Path>]) -> sqmeter_core::Result<TemplateSet> {
    let mut set = builtin::templates();
    for p in paths {
        set.insert(load_template(p)?);
    }
    Ok(set)
}

impl ServiceConfig {
    pub fn engine(&self) -> sqmeter_core::Result<Engine> {
        if !(1..=5).contains(&self.threshold) {
            return Err(sqmeter_core::Error::Config(format!(
                "recovery threshold {} outside 1..=5",
                self.threshold
            )));
        }
        let ttl = chrono::Duration::from_std(self.session_ttl)
            .map_err(|e| sqmeter_core::Error::Config(format!("session ttl: {e}")))?;
        Ok(Engine::new(
            builtin::catalog(),
            load_wordlists(&self.wordlists)?,
            load_templates(&self.templates)?,
        )?
        .with_hash_params(self.hash)
        .with_session_ttl(ttl))
    }
}
