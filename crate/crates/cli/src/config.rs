//! Engine configuration: a `key = value` file plus command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use idfawe_core::corpus::{IdentityStemmer, Stemmer, Stoplist, SuffixStemmer};
use idfawe_core::expansion::{Variant, VariantConfig};
use idfawe_core::{Alpha, Analyzer, Bm25Params, IdfVariant};
use serde::Serialize;

pub const CONFIG_ENV: &str = "IDFAWE_CONFIG";

/// Invalid configuration or command-line usage.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StemmerKind {
    Suffix,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineConfig {
    pub corpus: Option<PathBuf>,
    pub stoplist: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub contextual: Option<PathBuf>,
    pub index: Option<PathBuf>,
    pub topics: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
    pub output: Option<PathBuf>,
    #[serde(serialize_with = "variant_names")]
    pub variants: Vec<Variant>,
    pub expansion_terms: usize,
    pub local_k: usize,
    pub depth: usize,
    pub alphas: Vec<f64>,
    pub idf: String,
    pub k1: f64,
    pub b: f64,
    pub normalize: bool,
    pub stemmer: StemmerKind,
    pub workers: usize,
    pub tag: String,
    pub cutoff: usize,
}

fn variant_names<S: serde::Serializer>(v: &[Variant], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|v| v.name()))
}

impl Default for EngineConfig {
    fn default() -> Self {
        let base = VariantConfig::new(Variant::Bm25);
        Self {
            corpus: None,
            stoplist: None,
            embeddings: None,
            contextual: None,
            index: None,
            topics: None,
            qrels: None,
            output: None,
            variants: vec![Variant::IdfAweVsAqeIdfCentPlus],
            expansion_terms: base.expansion_terms,
            local_k: base.local_k,
            depth: base.depth,
            alphas: vec![base.alpha.get()],
            idf: base.idf.name().to_string(),
            k1: base.bm25.k1(),
            b: base.bm25.b(),
            normalize: base.normalize,
            stemmer: StemmerKind::Suffix,
            workers: 1,
            tag: "idfawe".into(),
            cutoff: 10,
        }
    }
}

pub const KEYS: [&str; 21] = [
    "corpus", "stoplist", "embeddings", "contextual", "index", "topics", "qrels", "output", "variant",
    "terms", "local_k", "depth", "alpha", "idf", "k1", "b", "normalize", "stemmer", "workers", "tag",
    "cutoff",
];

fn number<T: std::str::FromStr>(key: &str, value: &str) -> anyhow::Result<T> {
    value
        .parse()
        .map_err(|_| usage(format!("{key}: `{value}` is not a valid number")))
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl EngineConfig {
    /// Applies one `key = value` setting. Relative paths resolve against
    /// `base`; an empty path value unsets the key.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> anyhow::Result<()> {
        let value = value.trim();
        let path = || (!value.is_empty()).then(|| base.join(value));
        match key {
            "corpus" => self.corpus = path(),
            "stoplist" => self.stoplist = path(),
            "embeddings" => self.embeddings = path(),
            "contextual" => self.contextual = path(),
            "index" => self.index = path(),
            "topics" => self.topics = path(),
            "qrels" => self.qrels = path(),
            "output" => self.output = path(),
            "variant" => {
                self.variants = list(value)
                    .map(|v| v.parse::<Variant>().map_err(|e| usage(e.to_string())))
                    .collect::<anyhow::Result<_>>()?;
                if self.variants.is_empty() {
                    return Err(usage("variant: at least one variant is required"));
                }
            }
            "terms" => self.expansion_terms = number(key, value)?,
            "local_k" => self.local_k = number(key, value)?,
            "depth" => self.depth = number(key, value)?,
            "alpha" => {
                self.alphas = list(value).map(|a| number(key, a)).collect::<anyhow::Result<_>>()?;
                if self.alphas.is_empty() {
                    return Err(usage("alpha: at least one value is required"));
                }
            }
            "idf" => self.idf = value.to_string(),
            "k1" => self.k1 = number(key, value)?,
            "b" => self.b = number(key, value)?,
            "normalize" => {
                self.normalize = match value {
                    "true" | "yes" | "1" | "on" => true,
                    "false" | "no" | "0" | "off" => false,
                    _ => return Err(usage(format!("normalize: `{value}` is not a boolean"))),
                }
            }
            "stemmer" => {
                self.stemmer = match value {
                    "suffix" => StemmerKind::Suffix,
                    "identity" | "none" => StemmerKind::Identity,
                    _ => return Err(usage(format!("stemmer: unknown stemmer `{value}` (valid: suffix, identity)"))),
                }
            }
            "workers" => self.workers = number(key, value)?,
            "tag" => {
                if value.is_empty() || value.contains(char::is_whitespace) {
                    return Err(usage("tag: must be a single non-empty word"));
                }
                self.tag = value.to_string()
            }
            "cutoff" => self.cutoff = number(key, value)?,
            _ => return Err(usage(format!("unknown configuration key `{key}` (valid: {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    /// Parses a `key = value` file; `#` starts a comment line.
    pub fn parse(text: &str, base: &Path) -> anyhow::Result<Self> {
        let mut config = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(usage(format!("config line {}: expected `key = value`", i + 1)));
            };
            config
                .set(key.trim(), value, base)
                .map_err(|e| usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Applies `key=value` overrides on top of the file settings.
    pub fn apply_overrides<'a>(&mut self, overrides: impl IntoIterator<Item = (&'a str, &'a str)>) -> anyhow::Result<()> {
        for (key, value) in overrides {
            self.set(key, value, Path::new(""))?;
        }
        Ok(())
    }

    pub fn idf_variant(&self) -> anyhow::Result<IdfVariant> {
        self.idf.parse().map_err(|e: idfawe_core::Error| usage(e.to_string()))
    }

    pub fn bm25(&self) -> anyhow::Result<Bm25Params> {
        Bm25Params::new(self.k1, self.b).map_err(|e| usage(e.to_string()))
    }

    pub fn alpha_values(&self) -> anyhow::Result<Vec<Alpha>> {
        self.alphas
            .iter()
            .map(|&a| Alpha::new(a).map_err(|e| usage(e.to_string())))
            .collect()
    }

    /// Pipeline settings for one variant and α.
    pub fn variant_config(&self, variant: Variant, alpha: Alpha) -> anyhow::Result<VariantConfig> {
        let config = VariantConfig {
            variant,
            expansion_terms: self.expansion_terms,
            local_k: self.local_k,
            depth: self.depth,
            alpha,
            idf: self.idf_variant()?,
            bm25: self.bm25()?,
            normalize: self.normalize,
            contextual: self.contextual.is_some(),
        };
        config.validate().map_err(|e| usage(e.to_string()))?;
        Ok(config)
    }

    /// Checks numeric ranges and enumerations without touching the filesystem.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.alpha_values()?;
        for &v in &self.variants {
            self.variant_config(v, Alpha::default())?;
        }
        if self.workers == 0 {
            return Err(usage("workers must be at least 1"));
        }
        if self.cutoff == 0 {
            return Err(usage("cutoff must be at least 1"));
        }
        Ok(())
    }

    pub fn require<'a>(&self, key: &str, path: &'a Option<PathBuf>) -> anyhow::Result<&'a Path> {
        let path = path
            .as_deref()
            .ok_or_else(|| usage(format!("`{key}` is not configured")))?;
        if !path.exists() {
            return Err(usage(format!("{key} path {} does not exist", path.display())));
        }
        Ok(path)
    }

    pub fn optional<'a>(&self, key: &str, path: &'a Option<PathBuf>) -> anyhow::Result<Option<&'a Path>> {
        match path {
            Some(_) => self.require(key, path).map(Some),
            None => Ok(None),
        }
    }

    pub fn analyzer(&self) -> anyhow::Result<Analyzer> {
        let stoplist = match self.optional("stoplist", &self.stoplist)? {
            Some(path) => Stoplist::parse(&fs::read_to_string(path)?),
            None => Stoplist::smart(),
        };
        let stemmer: Box<dyn Stemmer> = match self.stemmer {
            StemmerKind::Suffix => Box::new(SuffixStemmer),
            StemmerKind::Identity => Box::new(IdentityStemmer),
        };
        Ok(Analyzer::new(stoplist, stemmer))
    }

    /// Every setting rendered as it would appear in a config file.
    pub fn settings(&self) -> BTreeMap<&'static str, String> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let join = |v: Vec<String>| v.join(",");
        BTreeMap::from([
            ("corpus", path(&self.corpus)),
            ("stoplist", path(&self.stoplist)),
            ("embeddings", path(&self.embeddings)),
            ("contextual", path(&self.contextual)),
            ("index", path(&self.index)),
            ("topics", path(&self.topics)),
            ("qrels", path(&self.qrels)),
            ("output", path(&self.output)),
            ("variant", join(self.variants.iter().map(|v| v.name().to_string()).collect())),
            ("terms", self.expansion_terms.to_string()),
            ("local_k", self.local_k.to_string()),
            ("depth", self.depth.to_string()),
            ("alpha", join(self.alphas.iter().map(f64::to_string).collect())),
            ("idf", self.idf.clone()),
            ("k1", self.k1.to_string()),
            ("b", self.b.to_string()),
            ("normalize", self.normalize.to_string()),
            ("stemmer", format!("{:?}", self.stemmer).to_lowercase()),
            ("workers", self.workers.to_string()),
            ("tag", self.tag.clone()),
            ("cutoff", self.cutoff.to_string()),
        ])
    }
}
