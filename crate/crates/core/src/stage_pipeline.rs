//! Two-stage sentence extractor: a candidate filter followed by semantic
//! matching against labelled embedding sets with a retention threshold.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{self, JobAdRecord, Sentence};
use crate::embed_store::{self, EmbeddingMatrix, LabeledSet};
use crate::error::{Error, Result};
use crate::knowledge_map::{self, MapEntry, Matcher};

/// Decides whether a sentence goes on to semantic matching.
pub trait SentenceFilter: Send + Sync {
    fn name(&self) -> &str;
    fn version(&self) -> &str;
    /// `Err` carries a diagnostic; the sentence is then treated as rejected.
    fn classify(&self, sentence: &Sentence) -> Result<bool, String>;
}

/// Passes every sentence.
#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptAll;

impl SentenceFilter for AcceptAll {
    fn name(&self) -> &str {
        "accept_all"
    }
    fn version(&self) -> &str {
        "1"
    }
    fn classify(&self, _: &Sentence) -> Result<bool, String> {
        Ok(true)
    }
}

/// Cue-phrase baseline: a sentence is a candidate if any cue occurs in it.
#[derive(Debug, Clone)]
pub struct KeywordFilter {
    name: String,
    version: String,
    matcher: Matcher,
}

impl KeywordFilter {
    pub fn new(name: &str, cues: &[&str]) -> Result<Self> {
        let entries = cues.iter().map(|c| MapEntry::new(&[*c], "cue", c)).collect::<Result<Vec<_>>>()?;
        Ok(KeywordFilter {
            name: name.to_string(),
            version: format!("cues-{}", cues.len()),
            matcher: knowledge_map::compile(entries, Vec::new())?,
        })
    }

    /// One cue per line; blank lines and `#` comments ignored.
    pub fn parse(name: &str, contents: &str) -> Result<Self> {
        let cues: Vec<&str> =
            contents.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
        Self::new(name, &cues)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("keywords");
        Self::parse(name, &s)
    }
}

impl SentenceFilter for KeywordFilter {
    fn name(&self) -> &str {
        &self.name
    }
    fn version(&self) -> &str {
        &self.version
    }
    fn classify(&self, sentence: &Sentence) -> Result<bool, String> {
        Ok(!self.matcher.scan(&sentence.text).is_empty())
    }
}

#[derive(Debug, Deserialize)]
struct ExternalLabel {
    ad_id: String,
    sentence_idx: usize,
    candidate: bool,
}

/// Per-sentence labels computed elsewhere (for instance by a trained classifier).
#[derive(Debug, Clone, Default)]
pub struct ExternalLabels {
    version: String,
    labels: HashMap<(String, usize), bool>,
}

impl ExternalLabels {
    pub fn parse(contents: &str, version: &str) -> Result<Self> {
        let mut labels = HashMap::new();
        for (i, line) in contents.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let l: ExternalLabel =
                serde_json::from_str(line).map_err(|e| Error::json(format!("external labels line {}", i + 1), e))?;
            labels.insert((l.ad_id, l.sentence_idx), l.candidate);
        }
        Ok(ExternalLabels { version: version.to_string(), labels })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&s, &path.display().to_string())
    }
}

impl SentenceFilter for ExternalLabels {
    fn name(&self) -> &str {
        "external"
    }
    fn version(&self) -> &str {
        &self.version
    }
    fn classify(&self, s: &Sentence) -> Result<bool, String> {
        self.labels
            .get(&(s.ad_id.clone(), s.index))
            .copied()
            .ok_or_else(|| format!("no external label for {}", s.key()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub ad_id: String,
    pub sentence_idx: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct Stage1Outcome {
    pub candidates: Vec<Sentence>,
    pub rejected: Vec<Sentence>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn run_stage1(filter: &dyn SentenceFilter, sentences: Vec<Sentence>) -> Stage1Outcome {
    let mut out = Stage1Outcome::default();
    for s in sentences {
        match filter.classify(&s) {
            Ok(true) => out.candidates.push(s),
            Ok(false) => out.rejected.push(s),
            Err(message) => {
                out.diagnostics.push(Diagnostic { ad_id: s.ad_id.clone(), sentence_idx: s.index, message });
                out.rejected.push(s);
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskName {
    Skill,
    Task,
    Custom,
}

impl TaskName {
    pub fn default_threshold(self) -> f64 {
        match self {
            TaskName::Skill => 0.87,
            TaskName::Task | TaskName::Custom => 0.90,
        }
    }
}

/// How a label is represented when scoring a sentence against it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    /// Best similarity over the label's member statements.
    #[default]
    MemberMax,
    /// Similarity to the single vector whose id is the label code.
    TitleVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub task_name: TaskName,
    pub threshold: f64,
    #[serde(default)]
    pub keep_below_threshold: bool,
    #[serde(default)]
    pub label_mode: LabelMode,
}

impl PipelineConfig {
    pub fn new(task_name: TaskName) -> Self {
        PipelineConfig {
            task_name,
            threshold: task_name.default_threshold(),
            keep_below_threshold: false,
            label_mode: LabelMode::MemberMax,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return Err(Error::InvalidParameter(format!("threshold {} outside (0, 1]", self.threshold)));
        }
        Ok(())
    }
}

/// Label sets resolved to row positions of a label matrix, ordered by code.
#[derive(Debug, Clone)]
pub struct LabelIndex {
    matrix: EmbeddingMatrix,
    labels: Vec<(String, Vec<usize>)>,
}

impl LabelIndex {
    pub fn new(sets: &[LabeledSet], matrix: EmbeddingMatrix, mode: LabelMode) -> Result<Self> {
        embed_store::check_sets(sets, &matrix)?;
        let mut labels = Vec::with_capacity(sets.len());
        for set in sets {
            let rows = match mode {
                LabelMode::MemberMax => set.all_ids().map(|id| matrix.position(id).expect("checked")).collect(),
                LabelMode::TitleVector => {
                    vec![matrix.position(&set.label_code).ok_or_else(|| Error::UnknownId(set.label_code.clone()))?]
                }
            };
            labels.push((set.label_code.clone(), rows));
        }
        labels.sort_by(|a, b| a.0.cmp(&b.0));
        if labels.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidEntry("duplicate label code in label sets".into()));
        }
        if labels.is_empty() {
            return Err(Error::Empty("label sets"));
        }
        Ok(LabelIndex { matrix, labels })
    }

    pub fn d(&self) -> usize {
        self.matrix.d()
    }

    /// Best label for a unit query vector; ties go to the smaller code.
    pub fn best(&self, query: &[f32]) -> (&str, f64) {
        let mut best: Option<(&str, f64)> = None;
        for (code, rows) in &self.labels {
            let s = rows
                .iter()
                .map(|&r| embed_store::unit_dot(self.matrix.row(r), query))
                .fold(f64::NEG_INFINITY, f64::max);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((code, s));
            }
        }
        best.expect("label index is never empty")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub ad_id: String,
    pub sentence_idx: usize,
    pub label_code: String,
    pub score: f64,
    pub stage1_passed: bool,
    pub retained: bool,
}

/// The JSONL shape of a retained result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetainedRecord {
    pub ad_id: String,
    pub sentence_idx: usize,
    pub label_code: String,
    pub score: f64,
}

impl From<&MatchResult> for RetainedRecord {
    fn from(m: &MatchResult) -> Self {
        RetainedRecord {
            ad_id: m.ad_id.clone(),
            sentence_idx: m.sentence_idx,
            label_code: m.label_code.clone(),
            score: m.score,
        }
    }
}

pub const HIST_LOWER: f64 = 0.80;
pub const HIST_BINS: usize = 20;

/// Stage-2 score histogram: 0.01-wide bins over [0.80, 1.00] plus an underflow count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreHistogram {
    pub underflow: u64,
    pub bins: Vec<u64>,
}

impl Default for ScoreHistogram {
    fn default() -> Self {
        ScoreHistogram { underflow: 0, bins: vec![0; HIST_BINS] }
    }
}

impl ScoreHistogram {
    /// Bin index for a score, `None` below 0.80. The top bin is closed at 1.00.
    pub fn bin_of(score: f64) -> Option<usize> {
        let pct = (score * 100.0 + 1e-9).floor() as i64;
        if pct < 80 {
            return None;
        }
        Some(((pct - 80) as usize).min(HIST_BINS - 1))
    }

    pub fn add(&mut self, score: f64) {
        match Self::bin_of(score) {
            Some(i) => self.bins[i] += 1,
            None => self.underflow += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.underflow + self.bins.iter().sum::<u64>()
    }

    pub fn merge(&mut self, other: &ScoreHistogram) {
        self.underflow += other.underflow;
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
    }

    /// Label for bin `i`, e.g. `0.87-0.88`.
    pub fn bin_label(i: usize) -> String {
        let lo = 80 + i;
        format!("0.{lo:02}-{}", if lo + 1 == 100 { "1.00".to_string() } else { format!("0.{:02}", lo + 1) })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    pub ads: u64,
    pub sentences: u64,
    pub stage1_candidates: u64,
    pub stage1_rejected: u64,
    pub filter_errors: u64,
    pub missing_vectors: u64,
    pub stage2_inputs: u64,
    pub retained: u64,
    pub histogram: ScoreHistogram,
}

impl StageStats {
    pub fn merge(&mut self, o: &StageStats) {
        self.ads += o.ads;
        self.sentences += o.sentences;
        self.stage1_candidates += o.stage1_candidates;
        self.stage1_rejected += o.stage1_rejected;
        self.filter_errors += o.filter_errors;
        self.missing_vectors += o.missing_vectors;
        self.stage2_inputs += o.stage2_inputs;
        self.retained += o.retained;
        self.histogram.merge(&o.histogram);
    }
}

#[derive(Debug, Clone, Default)]
pub struct Stage2Outcome {
    /// All scored candidates, retained or not.
    pub results: Vec<MatchResult>,
    pub diagnostics: Vec<Diagnostic>,
    pub stats: StageStats,
}

pub fn run_stage2(
    candidates: &[Sentence],
    config: &PipelineConfig,
    labels: &LabelIndex,
    sentence_matrix: &EmbeddingMatrix,
) -> Result<Stage2Outcome> {
    config.validate()?;
    if !sentence_matrix.is_empty() && sentence_matrix.d() != labels.d() {
        return Err(Error::DimensionMismatch { left: sentence_matrix.d(), right: labels.d() });
    }
    let mut out = Stage2Outcome::default();
    for s in candidates {
        let Some(v) = sentence_matrix.get(&s.key()) else {
            out.stats.missing_vectors += 1;
            out.diagnostics.push(Diagnostic {
                ad_id: s.ad_id.clone(),
                sentence_idx: s.index,
                message: format!("no embedding for {}", s.key()),
            });
            continue;
        };
        let (code, score) = labels.best(v);
        let retained = score >= config.threshold;
        out.stats.stage2_inputs += 1;
        out.stats.histogram.add(score);
        out.stats.retained += u64::from(retained);
        out.results.push(MatchResult {
            ad_id: s.ad_id.clone(),
            sentence_idx: s.index,
            label_code: code.to_string(),
            score,
            stage1_passed: true,
            retained,
        });
    }
    out.results.sort_by(|a, b| (&a.ad_id, a.sentence_idx).cmp(&(&b.ad_id, b.sentence_idx)));
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct PipelineOutput {
    /// Retained results, plus below-threshold ones when `keep_below_threshold` is set.
    pub results: Vec<MatchResult>,
    pub diagnostics: Vec<Diagnostic>,
    pub stats: StageStats,
}

impl PipelineOutput {
    pub fn retained(&self) -> impl Iterator<Item = &MatchResult> {
        self.results.iter().filter(|r| r.retained)
    }
}

fn run_one(
    ad: &JobAdRecord,
    filter: &dyn SentenceFilter,
    config: &PipelineConfig,
    labels: &LabelIndex,
    sentence_matrix: &EmbeddingMatrix,
) -> Result<PipelineOutput> {
    let sentences = corpus::sentences(&ad.id, &ad.body);
    let n = sentences.len() as u64;
    let s1 = run_stage1(filter, sentences);
    let mut s2 = run_stage2(&s1.candidates, config, labels, sentence_matrix)?;
    s2.stats.ads = 1;
    s2.stats.sentences = n;
    s2.stats.stage1_candidates = s1.candidates.len() as u64;
    s2.stats.stage1_rejected = s1.rejected.len() as u64;
    s2.stats.filter_errors = s1.diagnostics.len() as u64;
    let mut diagnostics = s1.diagnostics;
    diagnostics.extend(s2.diagnostics);
    if !config.keep_below_threshold {
        s2.results.retain(|r| r.retained);
    }
    Ok(PipelineOutput { results: s2.results, diagnostics, stats: s2.stats })
}

/// Segment, filter and match every ad. Ads run in parallel on the current
/// rayon pool; output order does not depend on scheduling.
pub fn run_pipeline(
    ads: &[JobAdRecord],
    filter: &dyn SentenceFilter,
    config: &PipelineConfig,
    labels: &LabelIndex,
    sentence_matrix: &EmbeddingMatrix,
) -> Result<PipelineOutput> {
    config.validate()?;
    let parts =
        ads.par_iter().map(|ad| run_one(ad, filter, config, labels, sentence_matrix)).collect::<Result<Vec<_>>>()?;
    let mut out = PipelineOutput::default();
    for p in parts {
        out.results.extend(p.results);
        out.diagnostics.extend(p.diagnostics);
        out.stats.merge(&p.stats);
    }
    out.results.sort_by(|a, b| (&a.ad_id, a.sentence_idx).cmp(&(&b.ad_id, b.sentence_idx)));
    out.diagnostics.sort_by(|a, b| (&a.ad_id, a.sentence_idx, &a.message).cmp(&(&b.ad_id, b.sentence_idx, &b.message)));
    Ok(out)
}
