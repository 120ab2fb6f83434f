//! Job-title coding: exact lookup against reference titles with a
//! nearest-neighbour fallback, hierarchy level from keyword maps, and
//! title feature tags.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embed_store::{self, EmbeddingMatrix};
use crate::error::{Error, Result};
use crate::knowledge_map::{self, MapEntry, Matcher};

/// Lowercase, drop bracketed segments, replace punctuation with spaces and
/// collapse whitespace.
pub fn normalize_title(title: &str) -> String {
    let mut out = String::with_capacity(title.len());
    let mut depth = 0usize;
    for c in title.chars() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth = depth.saturating_sub(1),
            _ if depth > 0 => {}
            c if c.is_alphanumeric() => out.extend(c.to_lowercase()),
            _ => out.push(' '),
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Embedding id of a reference title.
pub fn reference_id(onet_code: &str, normalized_title: &str) -> String {
    format!("{onet_code}|{normalized_title}")
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OccupationCode {
    pub onet_code: String,
    pub soc_code: String,
}

#[derive(Debug, Clone, Deserialize)]
struct ReferenceRow {
    onet_code: String,
    soc_code: String,
    title: String,
}

#[derive(Debug, Clone, Default)]
pub struct TitleIndex {
    exact_table: HashMap<String, Vec<OccupationCode>>,
    title_matrix: Option<EmbeddingMatrix>,
    title_to_code: HashMap<String, OccupationCode>,
    rows_by_onet: HashMap<String, Vec<usize>>,
}

impl TitleIndex {
    /// Build from (code, title) pairs plus an optional matrix of reference
    /// title embeddings keyed by [`reference_id`].
    pub fn new(references: Vec<(OccupationCode, String)>, title_matrix: Option<EmbeddingMatrix>) -> Result<Self> {
        let mut exact_table: HashMap<String, Vec<OccupationCode>> = HashMap::new();
        let mut title_to_code = HashMap::new();
        for (code, title) in references {
            let norm = normalize_title(&title);
            if norm.is_empty() {
                continue;
            }
            title_to_code.insert(reference_id(&code.onet_code, &norm), code.clone());
            let codes = exact_table.entry(norm).or_default();
            if !codes.contains(&code) {
                codes.push(code);
            }
        }
        exact_table.values_mut().for_each(|v| v.sort());
        let mut rows_by_onet: HashMap<String, Vec<usize>> = HashMap::new();
        if let Some(m) = &title_matrix {
            for (i, id) in m.ids().iter().enumerate() {
                let code = title_to_code.get(id).ok_or_else(|| Error::UnknownId(id.clone()))?;
                rows_by_onet.entry(code.onet_code.clone()).or_default().push(i);
            }
        }
        Ok(TitleIndex { exact_table, title_matrix, title_to_code, rows_by_onet })
    }

    /// Reference CSV with columns onet_code, soc_code, title.
    pub fn read_references<R: std::io::Read>(reader: R) -> Result<Vec<(OccupationCode, String)>> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut out = Vec::new();
        for row in rdr.deserialize::<ReferenceRow>() {
            let row = row.map_err(|e| Error::csv("reference titles", e))?;
            out.push((
                OccupationCode { onet_code: row.onet_code.trim().into(), soc_code: row.soc_code.trim().into() },
                row.title,
            ));
        }
        Ok(out)
    }

    pub fn load(references: &Path, title_matrix: Option<&Path>) -> Result<Self> {
        let f = std::fs::File::open(references).map_err(|e| Error::io(references, e))?;
        let refs = Self::read_references(f)?;
        let matrix = title_matrix.map(embed_store::load_vectors).transpose()?;
        Self::new(refs, matrix)
    }

    pub fn is_empty(&self) -> bool {
        self.exact_table.is_empty() && self.title_matrix.as_ref().is_none_or(EmbeddingMatrix::is_empty)
    }

    pub fn exact(&self, title: &str) -> Option<&[OccupationCode]> {
        self.exact_table.get(&normalize_title(title)).map(Vec::as_slice)
    }

    pub fn d(&self) -> Option<usize> {
        self.title_matrix.as_ref().map(EmbeddingMatrix::d)
    }

    fn best_row_score(&self, onet: &str, query: &[f32]) -> Option<f64> {
        let m = self.title_matrix.as_ref()?;
        let rows = self.rows_by_onet.get(onet)?;
        rows.iter()
            .filter_map(|&r| embed_store::cosine(m.row(r), query).ok())
            .fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.max(s))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Exact,
    Nn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodedTitle {
    pub code: OccupationCode,
    pub match_kind: MatchKind,
    pub nn_score: Option<f64>,
    /// Every code the normalized title maps to exactly; for nearest-neighbour
    /// results, just the chosen code.
    pub candidates: Vec<OccupationCode>,
}

/// Code a title. `query` is the title's embedding; it picks among multiple
/// exact codes and is required when there is no exact hit.
pub fn code_title(title: &str, query: Option<&[f32]>, index: &TitleIndex) -> Result<CodedTitle> {
    if index.is_empty() {
        return Err(Error::Empty("title index"));
    }
    if title.trim().is_empty() {
        return Err(Error::InvalidParameter("empty title".into()));
    }
    if let Some(codes) = index.exact(title) {
        let mut chosen = &codes[0];
        if codes.len() > 1 {
            if let Some(q) = query {
                let mut best = f64::NEG_INFINITY;
                for c in codes {
                    if let Some(s) = index.best_row_score(&c.onet_code, q) {
                        if s > best {
                            best = s;
                            chosen = c;
                        }
                    }
                }
            }
        }
        return Ok(CodedTitle {
            code: chosen.clone(),
            match_kind: MatchKind::Exact,
            nn_score: None,
            candidates: codes.to_vec(),
        });
    }
    let matrix =
        index.title_matrix.as_ref().filter(|m| !m.is_empty()).ok_or(Error::Empty("reference title embeddings"))?;
    let q = query.ok_or_else(|| Error::UnknownId(format!("embedding for title `{title}`")))?;
    let (id, score) = embed_store::nearest(q, matrix, 1)?.remove(0);
    let code = index.title_to_code[&id].clone();
    Ok(CodedTitle { code: code.clone(), match_kind: MatchKind::Nn, nn_score: Some(score), candidates: vec![code] })
}

/// Values allowed in the base map.
pub const BASE_VALUES: [i32; 8] = [-10, 0, 10, 20, 30, 40, 50, 60];
pub const STEPPER_RANGE: (i32, i32) = (-7, 4);

const DEFAULT_BASE: &[(&str, i32, &str)] = &[
    ("Internship", -10, "Intern level"),
    ("Intern", -10, "Intern level"),
    ("Trainee", -10, "Intern level"),
    ("Entry-Level", 0, "Base level"),
    ("Manager", 10, "First-Level Supervisor"),
    ("Supervisor", 10, "First-Level Supervisor"),
    ("Team Leader", 10, "First-Level Supervisor"),
    ("Territory Manager", 20, "Second-Level Supervisor"),
    ("Division Leader", 30, "Third-Level Supervisor"),
    ("General Manager", 30, "Third-Level Supervisor"),
    ("Director", 40, "First-level Executive"),
    ("CHRO", 50, "Senior Executive"),
    ("Chief Human Resources Officer", 50, "Senior Executive"),
    ("CEO", 60, "Top Management"),
    ("Chief Executive Officer", 60, "Top Management"),
];

const DEFAULT_STEPPER: &[(&str, i32, &str)] = &[
    ("Helper", -7, "Helper"),
    ("Junior", -6, "Junior"),
    ("Jr", -6, "Junior"),
    ("Asst", -5, "Assistant"),
    ("Assistant", -5, "Assistant"),
    ("Associate", -3, "Associate"),
    ("Vice", -2, "Vice"),
    ("Deputy", -1, "Deputy"),
    ("Lead", 1, "Lead"),
    ("Leader", 1, "Leader"),
    ("Sr", 2, "Senior"),
    ("Senior", 2, "Senior"),
    ("Exec", 3, "Executive"),
    ("Executive", 3, "Executive"),
    ("Chief", 4, "Executive"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyTerm {
    pub term: String,
    pub value: i32,
    pub label: String,
}

/// Base and stepper keyword maps for the hierarchy score.
#[derive(Debug, Clone)]
pub struct HierarchyMaps {
    base: Vec<HierarchyTerm>,
    stepper: Vec<HierarchyTerm>,
    base_matcher: Matcher,
    stepper_matcher: Matcher,
}

fn matcher_for(terms: &[HierarchyTerm]) -> Result<Matcher> {
    let entries = terms
        .iter()
        .map(|t| MapEntry::new(&[t.term.as_str()], &t.value.to_string(), &t.label))
        .collect::<Result<Vec<_>>>()?;
    knowledge_map::compile(entries, Vec::new())
}

impl HierarchyMaps {
    pub fn new(base: Vec<HierarchyTerm>, stepper: Vec<HierarchyTerm>) -> Result<Self> {
        if let Some(t) = base.iter().find(|t| !BASE_VALUES.contains(&t.value)) {
            return Err(Error::InvalidEntry(format!("base term `{}` has value {}", t.term, t.value)));
        }
        if let Some(t) = stepper.iter().find(|t| t.value < STEPPER_RANGE.0 || t.value > STEPPER_RANGE.1) {
            return Err(Error::InvalidEntry(format!("stepper term `{}` has value {}", t.term, t.value)));
        }
        Ok(HierarchyMaps { base_matcher: matcher_for(&base)?, stepper_matcher: matcher_for(&stepper)?, base, stepper })
    }

    pub fn default_maps() -> Self {
        let conv = |rows: &[(&str, i32, &str)]| {
            rows.iter()
                .map(|&(term, value, label)| HierarchyTerm { term: term.into(), value, label: label.into() })
                .collect()
        };
        Self::new(conv(DEFAULT_BASE), conv(DEFAULT_STEPPER)).expect("built-in maps are valid")
    }

    /// CSV with columns term, value, label.
    pub fn read_terms<R: std::io::Read>(reader: R) -> Result<Vec<HierarchyTerm>> {
        csv::Reader::from_reader(reader).deserialize().map(|r| r.map_err(|e| Error::csv("hierarchy map", e))).collect()
    }

    pub fn load(base: &Path, stepper: &Path) -> Result<Self> {
        let open = |p: &Path| std::fs::File::open(p).map_err(|e| Error::io(p, e));
        Self::new(Self::read_terms(open(base)?)?, Self::read_terms(open(stepper)?)?)
    }

    pub fn base_terms(&self) -> &[HierarchyTerm] {
        &self.base
    }

    pub fn stepper_terms(&self) -> &[HierarchyTerm] {
        &self.stepper
    }

    /// Highest base value present (default 0) plus the first stepper term
    /// left to right (default 0). Tokens covered by base terms cannot also
    /// fire as steppers.
    pub fn hierarchy(&self, title: &str) -> i32 {
        let base_hits = self.base_matcher.scan(title);
        let base = base_hits.iter().map(|h| self.base[h.entry].value).max().unwrap_or(0);
        let stepper = self
            .stepper_matcher
            .scan(title)
            .into_iter()
            .filter(|s| !base_hits.iter().any(|b| s.start_token < b.end_token && b.start_token < s.end_token))
            .min_by_key(|s| (s.start_token, s.entry))
            .map_or(0, |s| self.stepper[s.entry].value);
        base + stepper
    }
}

pub fn title_features(title: &str, feature_map: &Matcher) -> BTreeSet<String> {
    feature_map.scan(title).into_iter().map(|h| h.uci).collect()
}

/// One JSONL output row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TitleResult {
    pub ad_id: String,
    pub soc_code: String,
    pub onet_code: String,
    pub match_kind: MatchKind,
    pub nn_score: Option<f64>,
    pub hierarchy: i32,
    pub features: Vec<String>,
    pub candidates: Vec<String>,
}
