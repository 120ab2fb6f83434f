//! Run configuration, loaded from TOML or JSON. Relative paths resolve
//! against the directory holding the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use adtext_core::knowledge_map::DictionarySchema;
use adtext_core::stage_pipeline::LabelMode;
use adtext_core::wage_extract::WageConfig;
use adtext_core::YearMonth;
use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

pub const OUT_DIR_ENV: &str = "ADTEXT_OUT_DIR";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    pub corpus: CorpusConfig,
    #[serde(default)]
    pub dictionaries: BTreeMap<String, DictionaryConfig>,
    #[serde(default)]
    pub exclusions: Option<PathBuf>,
    #[serde(default)]
    pub rules: Option<PathBuf>,
    #[serde(default)]
    pub skills: Option<MatchConfig>,
    #[serde(default)]
    pub tasks: Option<MatchConfig>,
    #[serde(default)]
    pub titles: Option<TitleConfig>,
    #[serde(default)]
    pub firms: Option<FirmConfig>,
    #[serde(default)]
    pub wages: Option<WageSection>,
    #[serde(default)]
    pub tags: Option<TagConfig>,
    #[serde(default)]
    pub aggregate: AggregateConfig,
    #[serde(default)]
    pub validation: Option<ValidationConfig>,
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub paths: Vec<PathBuf>,
    #[serde(default)]
    pub strict: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DictionaryConfig {
    pub path: PathBuf,
    pub schema: DictionarySchema,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchConfig {
    /// Cue-phrase file for the built-in filter.
    #[serde(default)]
    pub filter: Option<PathBuf>,
    /// Per-sentence JSONL labels; takes precedence over `filter`.
    #[serde(default)]
    pub external_labels: Option<PathBuf>,
    pub label_vectors: PathBuf,
    pub label_sets: PathBuf,
    pub sentence_vectors: PathBuf,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub label_mode: LabelMode,
    #[serde(default)]
    pub keep_below_threshold: bool,
    /// Extra statements to fold into the label sets before matching.
    #[serde(default)]
    pub augment_candidates: Option<PathBuf>,
    #[serde(default = "default_augment")]
    pub augment_threshold: f64,
}

fn default_augment() -> f64 {
    0.9
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TitleConfig {
    pub references: PathBuf,
    #[serde(default)]
    pub reference_vectors: Option<PathBuf>,
    /// Title embeddings keyed by ad id.
    #[serde(default)]
    pub query_vectors: Option<PathBuf>,
    #[serde(default)]
    pub hierarchy_base: Option<PathBuf>,
    #[serde(default)]
    pub hierarchy_stepper: Option<PathBuf>,
    #[serde(default)]
    pub features: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirmConfig {
    pub establishments: PathBuf,
    /// JSONL {ad_id, firm_name} filling ads without firm metadata.
    #[serde(default)]
    pub spans: Option<PathBuf>,
    #[serde(default = "default_accept")]
    pub accept: f64,
}

fn default_accept() -> f64 {
    adtext_core::firm_match::DEFAULT_ACCEPT
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WageSection {
    #[serde(default)]
    pub overrides: Option<PathBuf>,
    #[serde(default)]
    pub hours_per_year: Option<i64>,
    #[serde(default)]
    pub outlier_min: Option<f64>,
    #[serde(default)]
    pub outlier_max: Option<f64>,
}

impl WageSection {
    pub fn wage_config(&self) -> WageConfig {
        let mut c = WageConfig::default();
        if let Some(h) = self.hours_per_year {
            c.hours_per_year = h;
        }
        if let Some(v) = self.outlier_min {
            c.outlier_min = v;
        }
        if let Some(v) = self.outlier_max {
            c.outlier_max = v;
        }
        c
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TagConfig {
    pub classes: Vec<PathBuf>,
    #[serde(default = "default_radius")]
    pub radius: usize,
    #[serde(default)]
    pub predictions: BTreeMap<String, PathBuf>,
}

fn default_radius() -> usize {
    adtext_core::job_tag::DEFAULT_RADIUS
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateConfig {
    #[serde(default = "default_anomalous")]
    pub anomalous_months: Vec<YearMonth>,
    #[serde(default = "default_offset")]
    pub fallback_offset: i64,
    #[serde(default = "default_group_by")]
    pub group_by: Vec<String>,
    #[serde(default)]
    pub include_flagged: bool,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
}

impl Default for AggregateConfig {
    fn default() -> Self {
        AggregateConfig {
            anomalous_months: default_anomalous(),
            fallback_offset: default_offset(),
            group_by: default_group_by(),
            include_flagged: false,
            top_k: default_top_k(),
        }
    }
}

fn default_anomalous() -> Vec<YearMonth> {
    adtext_core::aggregate::default_anomalous_months().into_iter().collect()
}

fn default_offset() -> i64 {
    adtext_core::aggregate::DEFAULT_FALLBACK_OFFSET
}

fn default_group_by() -> Vec<String> {
    vec!["month".into()]
}

fn default_top_k() -> usize {
    10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationConfig {
    pub bins: PathBuf,
    pub accuracy: String,
    pub n_flagged: f64,
    pub n_unflagged: f64,
    pub stage1_fnr: f64,
    pub threshold: f64,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: RunConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => {
                serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?
            }
            _ => toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?,
        };
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.resolve(&base);
        if let Some(out) = std::env::var_os(OUT_DIR_ENV) {
            cfg.output_dir = PathBuf::from(out);
        }
        Ok(cfg)
    }

    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let fix_opt = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        fix(&mut self.output_dir);
        self.corpus.paths.iter_mut().for_each(fix);
        self.dictionaries.values_mut().for_each(|d| fix(&mut d.path));
        fix_opt(&mut self.exclusions);
        fix_opt(&mut self.rules);
        for m in [&mut self.skills, &mut self.tasks].into_iter().flatten() {
            fix_opt(&mut m.filter);
            fix_opt(&mut m.external_labels);
            fix(&mut m.label_vectors);
            fix(&mut m.label_sets);
            fix(&mut m.sentence_vectors);
            fix_opt(&mut m.augment_candidates);
        }
        if let Some(t) = &mut self.titles {
            fix(&mut t.references);
            fix_opt(&mut t.reference_vectors);
            fix_opt(&mut t.query_vectors);
            fix_opt(&mut t.hierarchy_base);
            fix_opt(&mut t.hierarchy_stepper);
            fix_opt(&mut t.features);
        }
        if let Some(f) = &mut self.firms {
            fix(&mut f.establishments);
            fix_opt(&mut f.spans);
        }
        if let Some(w) = &mut self.wages {
            fix_opt(&mut w.overrides);
        }
        if let Some(t) = &mut self.tags {
            t.classes.iter_mut().for_each(fix);
            t.predictions.values_mut().for_each(fix);
        }
        if let Some(v) = &mut self.validation {
            fix(&mut v.bins);
        }
    }

    /// Every input path named by the config.
    pub fn input_paths(&self) -> Vec<(&'static str, &Path)> {
        let mut out: Vec<(&'static str, &Path)> = Vec::new();
        out.extend(self.corpus.paths.iter().map(|p| ("corpus", p.as_path())));
        out.extend(self.dictionaries.values().map(|d| ("dictionary", d.path.as_path())));
        out.extend(self.exclusions.as_deref().map(|p| ("exclusions", p)));
        out.extend(self.rules.as_deref().map(|p| ("rules", p)));
        for (name, m) in [("skills", &self.skills), ("tasks", &self.tasks)] {
            if let Some(m) = m {
                out.extend(m.filter.as_deref().map(|p| (name, p)));
                out.extend(m.external_labels.as_deref().map(|p| (name, p)));
                out.push((name, &m.label_vectors));
                out.push((name, &m.label_sets));
                out.push((name, &m.sentence_vectors));
                out.extend(m.augment_candidates.as_deref().map(|p| (name, p)));
            }
        }
        if let Some(t) = &self.titles {
            out.push(("titles", &t.references));
            for p in [&t.reference_vectors, &t.query_vectors, &t.hierarchy_base, &t.hierarchy_stepper, &t.features]
                .into_iter()
                .flatten()
            {
                out.push(("titles", p));
            }
        }
        if let Some(f) = &self.firms {
            out.push(("firms", &f.establishments));
            out.extend(f.spans.as_deref().map(|p| ("firms", p)));
        }
        if let Some(w) = &self.wages {
            out.extend(w.overrides.as_deref().map(|p| ("wages", p)));
        }
        if let Some(t) = &self.tags {
            out.extend(t.classes.iter().map(|p| ("tags", p.as_path())));
            out.extend(t.predictions.values().map(|p| ("tags", p.as_path())));
        }
        if let Some(v) = &self.validation {
            out.push(("validation", &v.bins));
        }
        out
    }

    /// Check everything at once and report every problem found.
    pub fn validate(&self) -> anyhow::Result<()> {
        let mut problems = Vec::new();
        if self.corpus.paths.is_empty() {
            problems.push("corpus.paths is empty".to_string());
        }
        for (section, p) in self.input_paths() {
            if !p.exists() {
                problems.push(format!("{section}: path does not exist: {}", p.display()));
            }
        }
        for (name, m) in [("skills", &self.skills), ("tasks", &self.tasks)] {
            if let Some(m) = m {
                if let Some(t) = m.threshold {
                    if !(t > 0.0 && t <= 1.0) {
                        problems.push(format!("{name}.threshold {t} outside (0, 1]"));
                    }
                }
                if !(m.augment_threshold > 0.0 && m.augment_threshold <= 1.0) {
                    problems.push(format!("{name}.augment_threshold {} outside (0, 1]", m.augment_threshold));
                }
                if m.filter.is_none() && m.external_labels.is_none() {
                    problems.push(format!("{name}: set `filter` or `external_labels`"));
                }
            }
        }
        if let Some(f) = &self.firms {
            if !(f.accept > 0.0 && f.accept <= 1.0) {
                problems.push(format!("firms.accept {} outside (0, 1]", f.accept));
            }
        }
        if let Some(w) = &self.wages {
            if let Err(e) = w.wage_config().validate() {
                problems.push(format!("wages: {e}"));
            }
        }
        if let Some(t) = &self.tags {
            if t.radius == 0 {
                problems.push("tags.radius must be at least 1".into());
            }
        }
        for d in &self.aggregate.group_by {
            if let Err(e) = d.parse::<adtext_core::aggregate::Dim>() {
                problems.push(format!("aggregate.group_by: {e}"));
            }
        }
        if self.aggregate.top_k == 0 {
            problems.push("aggregate.top_k must be at least 1".into());
        }
        if self.aggregate.fallback_offset < 0 {
            problems.push("aggregate.fallback_offset must be non-negative".into());
        }
        if let Some(v) = &self.validation {
            if !(0.0..=1.0).contains(&v.stage1_fnr) {
                problems.push(format!("validation.stage1_fnr {} outside [0, 1]", v.stage1_fnr));
            }
        }
        if problems.is_empty() {
            return Ok(());
        }
        bail!("invalid configuration:\n  - {}", problems.join("\n  - "))
    }
}
