use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::blockmodel::{BlockSpec, BlockType, Diagonal, Measure};
use crate::error::{Error, Result};
use crate::ngram::WeightMode;
use crate::preprocess::MaxEdit;
use crate::subnet::{
    default_keyword_sets, keyword_sets_from_map, load_keyword_file, KeywordSet, DEFAULT_MIN_CORE,
    DEFAULT_SIZE_CAP,
};

fn default_max_edit() -> MaxEdit {
    MaxEdit::Two
}

fn default_allowed() -> Vec<BlockType> {
    vec![BlockType::Null, BlockType::Complete]
}

fn default_measure() -> Measure {
    Measure::SumOfSquares
}

fn default_diagonal() -> Diagonal {
    Diagonal::Ignore
}

fn default_weight_mode() -> WeightMode {
    WeightMode::Count
}

fn default_size_cap() -> usize {
    DEFAULT_SIZE_CAP
}

fn default_min_core() -> usize {
    DEFAULT_MIN_CORE
}

fn default_restarts() -> usize {
    50
}

fn default_k() -> usize {
    3
}

fn default_min_correct_len() -> usize {
    crate::preprocess::SpellCorrector::DEFAULT_MIN_LEN
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterCounts {
    #[serde(default = "default_k")]
    pub default: usize,
    /// Per keyword-set overrides.
    #[serde(default)]
    pub sets: BTreeMap<String, usize>,
}

impl Default for ClusterCounts {
    fn default() -> Self {
        ClusterCounts {
            default: default_k(),
            sets: BTreeMap::new(),
        }
    }
}

/// Pipeline configuration. Relative paths are resolved against the directory
/// holding the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: PathBuf,
    pub stopwords: PathBuf,
    #[serde(default)]
    pub lemmas: Option<PathBuf>,
    /// Text file or directory training the spell corrector; no correction when absent.
    #[serde(default)]
    pub language_model: Option<PathBuf>,
    #[serde(default = "default_max_edit")]
    pub max_edit: MaxEdit,
    #[serde(default = "default_min_correct_len")]
    pub min_correct_len: usize,
    /// Keyword-set file (TOML or JSON); the bundled sets are used when neither
    /// this nor `keyword_sets` is given.
    #[serde(default)]
    pub keywords: Option<PathBuf>,
    #[serde(default)]
    pub keyword_sets: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    pub clusters: ClusterCounts,
    #[serde(default = "default_allowed")]
    pub allowed_types: Vec<BlockType>,
    #[serde(default = "default_measure")]
    pub measure: Measure,
    #[serde(default = "default_diagonal")]
    pub diagonal: Diagonal,
    #[serde(default = "default_weight_mode")]
    pub weight_mode: WeightMode,
    #[serde(default = "default_size_cap")]
    pub size_cap: usize,
    #[serde(default = "default_min_core")]
    pub min_core: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub restarts: Option<usize>,
    pub output: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn parse(text: &str, json: bool) -> Result<Self> {
        if json {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
        }
    }

    /// Reads a `.json` or TOML configuration and resolves its relative paths.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let json = path.extension().is_some_and(|e| e == "json");
        let mut config = Self::parse(&text, json)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.corpus);
        fix(&mut self.stopwords);
        fix(&mut self.output);
        for p in [&mut self.lemmas, &mut self.language_model, &mut self.keywords]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
    }

    pub fn apply(&mut self, overrides: &Overrides) {
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(r) = overrides.restarts {
            self.restarts = r;
        }
        if let Some(out) = &overrides.output {
            self.output = out.clone();
        }
    }

    /// Checks referenced inputs exist and numeric settings are in range.
    pub fn validate(&self) -> Result<()> {
        let must_exist = |label: &str, p: &Path| {
            if p.exists() {
                Ok(())
            } else {
                Err(Error::Config(format!("{label} `{}` does not exist", p.display())))
            }
        };
        must_exist("corpus", &self.corpus)?;
        must_exist("stopword list", &self.stopwords)?;
        if let Some(p) = &self.lemmas {
            must_exist("lemma dictionary", p)?;
        }
        if let Some(p) = &self.language_model {
            must_exist("language model source", p)?;
        }
        if let Some(p) = &self.keywords {
            must_exist("keyword file", p)?;
        }
        if self.keywords.is_some() && self.keyword_sets.is_some() {
            return Err(Error::Config("give either `keywords` or `keyword_sets`, not both".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if self.min_core == 0 {
            return Err(Error::Config("min_core must be at least 1".into()));
        }
        let sets = self.keyword_sets()?;
        for (name, &k) in &self.clusters.sets {
            if !sets.iter().any(|s| s.name() == name) {
                return Err(Error::Config(format!("cluster count given for unknown keyword set `{name}`")));
            }
            if k == 0 {
                return Err(Error::Config(format!("k for `{name}` must be at least 1")));
            }
        }
        for set in &sets {
            self.block_spec(set.name())?;
        }
        Ok(())
    }

    pub fn keyword_sets(&self) -> Result<Vec<KeywordSet>> {
        match (&self.keywords, &self.keyword_sets) {
            (Some(path), _) => load_keyword_file(path),
            (None, Some(map)) => keyword_sets_from_map(map.clone()),
            (None, None) => Ok(default_keyword_sets()),
        }
    }

    pub fn k_for(&self, set: &str) -> usize {
        self.clusters.sets.get(set).copied().unwrap_or(self.clusters.default)
    }

    pub fn block_spec(&self, set: &str) -> Result<BlockSpec> {
        BlockSpec::new(
            self.k_for(set),
            self.allowed_types.iter().copied(),
            self.measure,
            self.diagonal,
        )
    }

    /// SHA-256 over the configuration minus its output directory.
    pub fn digest(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = value.as_object_mut() {
            obj.remove("output");
        }
        let bytes = serde_json::to_vec(&value).expect("json value serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
