//! Run configuration: a plain `key = value` file plus flag overrides
//! (flags win). Unknown keys are config errors so typos cannot silently
//! change a run.

use crate::errors::{config_error, CliResult};
use satdmine::comments::Language;
use satdmine::history::default_extension_map;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub repo: Option<PathBuf>,
    pub branch: String,
    pub release: Option<String>,
    pub window_days: f64,
    pub phases: usize,
    pub corpus: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub mailmap: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub feature_count: usize,
    pub folds: usize,
    pub rename_threshold: f64,
    /// Extension overrides added on top of the default map,
    /// e.g. `.pyx=python,.hxx=cpp`.
    pub extensions: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            repo: None,
            branch: "master".to_string(),
            release: None,
            window_days: 365.0,
            phases: 10,
            corpus: None,
            model: None,
            labels: None,
            mailmap: None,
            out: PathBuf::from("satdmine-out"),
            seed: 42,
            feature_count: 500,
            folds: 5,
            rename_threshold: 0.6,
            extensions: BTreeMap::new(),
        }
    }
}

/// Flag-level overrides; `None` means "not given on the command line".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub repo: Option<PathBuf>,
    pub branch: Option<String>,
    pub release: Option<String>,
    pub window_days: Option<f64>,
    pub phases: Option<usize>,
    pub corpus: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub mailmap: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub feature_count: Option<usize>,
    pub folds: Option<usize>,
}

impl RunConfig {
    pub fn load(config_path: Option<&Path>, overrides: &Overrides) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = config_path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read config `{}`: {e}", path.display())))?;
            cfg.apply_file(&text, path)?;
        }
        cfg.apply_overrides(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, text: &str, path: &Path) -> CliResult<()> {
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_error(format!(
                    "{}:{}: expected `key = value`",
                    path.display(),
                    idx + 1
                )));
            };
            let key = key.trim();
            let value = value.trim();
            let parse_f64 = |v: &str| {
                v.parse::<f64>().map_err(|_| {
                    config_error(format!("{}:{}: `{key}` must be a number", path.display(), idx + 1))
                })
            };
            let parse_usize = |v: &str| {
                v.parse::<usize>().map_err(|_| {
                    config_error(format!("{}:{}: `{key}` must be an integer", path.display(), idx + 1))
                })
            };
            match key {
                "repo" => self.repo = Some(PathBuf::from(value)),
                "branch" => self.branch = value.to_string(),
                "release" => self.release = Some(value.to_string()),
                "window_days" => self.window_days = parse_f64(value)?,
                "phases" => self.phases = parse_usize(value)?,
                "corpus" => self.corpus = Some(PathBuf::from(value)),
                "model" => self.model = Some(PathBuf::from(value)),
                "labels" => self.labels = Some(PathBuf::from(value)),
                "mailmap" => self.mailmap = Some(PathBuf::from(value)),
                "out" => self.out = PathBuf::from(value),
                "seed" => {
                    self.seed = value.parse::<u64>().map_err(|_| {
                        config_error(format!("{}:{}: `seed` must be an integer", path.display(), idx + 1))
                    })?
                }
                "feature_count" => self.feature_count = parse_usize(value)?,
                "folds" => self.folds = parse_usize(value)?,
                "rename_threshold" => self.rename_threshold = parse_f64(value)?,
                "extensions" => {
                    for pair in value.split(',').filter(|p| !p.trim().is_empty()) {
                        let Some((ext, lang)) = pair.split_once('=') else {
                            return Err(config_error(format!(
                                "{}:{}: extensions entries look like `.ext=lang`",
                                path.display(),
                                idx + 1
                            )));
                        };
                        self.extensions
                            .insert(ext.trim().to_string(), lang.trim().to_string());
                    }
                }
                other => {
                    return Err(config_error(format!(
                        "{}:{}: unknown config key `{other}`",
                        path.display(),
                        idx + 1
                    )))
                }
            }
        }
        Ok(())
    }

    fn apply_overrides(&mut self, ov: &Overrides) {
        macro_rules! take {
            ($field:ident) => {
                if let Some(v) = &ov.$field {
                    self.$field = Some(v.clone());
                }
            };
        }
        take!(repo);
        take!(release);
        take!(corpus);
        take!(model);
        take!(labels);
        take!(mailmap);
        if let Some(v) = &ov.branch {
            self.branch = v.clone();
        }
        if let Some(v) = ov.window_days {
            self.window_days = v;
        }
        if let Some(v) = ov.phases {
            self.phases = v;
        }
        if let Some(v) = &ov.out {
            self.out = v.clone();
        }
        if let Some(v) = ov.seed {
            self.seed = v;
        }
        if let Some(v) = ov.feature_count {
            self.feature_count = v;
        }
        if let Some(v) = ov.folds {
            self.folds = v;
        }
    }

    fn validate(&self) -> CliResult<()> {
        if self.window_days <= 0.0 {
            return Err(config_error("window_days must be positive"));
        }
        if self.phases < 2 {
            return Err(config_error("phases must be at least 2"));
        }
        if !(self.rename_threshold > 0.0 && self.rename_threshold <= 1.0) {
            return Err(config_error("rename_threshold must be in (0, 1]"));
        }
        if self.feature_count == 0 {
            return Err(config_error("feature_count must be at least 1"));
        }
        for (ext, lang) in &self.extensions {
            if !ext.starts_with('.') {
                return Err(config_error(format!("extension `{ext}` must start with a dot")));
            }
            if parse_language(lang).is_none() {
                return Err(config_error(format!(
                    "unknown language `{lang}` for extension `{ext}` (c, cpp, java, python, other)"
                )));
            }
        }
        Ok(())
    }

    /// Default extension map with the config's overrides applied.
    pub fn extension_map(&self) -> BTreeMap<String, Language> {
        let mut map = default_extension_map();
        for (ext, lang) in &self.extensions {
            map.insert(
                ext.to_ascii_lowercase(),
                parse_language(lang).expect("validated"),
            );
        }
        map
    }

    pub fn require_repo(&self) -> CliResult<&Path> {
        self.repo
            .as_deref()
            .ok_or_else(|| config_error("missing `repo` (config key or --repo)"))
    }

    pub fn require_release(&self) -> CliResult<&str> {
        self.release
            .as_deref()
            .ok_or_else(|| config_error("missing `release` commit (config key or --release)"))
    }
}

fn parse_language(s: &str) -> Option<Language> {
    match s.to_ascii_lowercase().as_str() {
        "c" => Some(Language::C),
        "cpp" | "c++" => Some(Language::Cpp),
        "java" => Some(Language::Java),
        "python" | "py" => Some(Language::Python),
        "other" => Some(Language::Other),
        _ => None,
    }
}
