//! Knowledge maps: term dictionaries compiled into a token-level Aho-Corasick
//! automaton, with negation and co-occurrence rules applied after matching.
//!
//! Matching is case-insensitive and token-exact (see [`crate::text`]).
//! Overlapping candidates resolve longest-first, then leftmost. Identical
//! spans produced by different entries are all kept.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text;

/// A dictionary entry: one or more surface forms resolving to a concept code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapEntry {
    pub surface_forms: Vec<Vec<String>>,
    pub uci: String,
    pub label: String,
}

impl MapEntry {
    /// Build an entry from raw surface strings; each is tokenized.
    pub fn new<S: AsRef<str>>(forms: &[S], uci: &str, label: &str) -> Result<Self> {
        let surface_forms = forms.iter().map(|f| text::token_strings(f.as_ref())).collect::<Vec<_>>();
        let entry = MapEntry { surface_forms, uci: uci.trim().to_string(), label: label.trim().to_string() };
        entry.validate()?;
        Ok(entry)
    }

    fn validate(&self) -> Result<()> {
        if self.uci.is_empty() {
            return Err(Error::InvalidEntry(format!("empty uci for `{}`", self.label)));
        }
        if self.surface_forms.is_empty() || self.surface_forms.iter().any(Vec::is_empty) {
            return Err(Error::InvalidEntry(format!("empty surface form for uci `{}`", self.uci)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuleKind {
    /// Drop trigger hits when the guard occurs within the window.
    Negation,
    /// Keep trigger hits only when the guard occurs within the window.
    CoOccur,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Guard {
    Terms(Vec<String>),
    Uci(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationRule {
    pub rule_id: String,
    pub kind: RuleKind,
    pub trigger_uci: String,
    pub guard: Guard,
    /// Token distance from the trigger span within which the guard must lie.
    pub window: usize,
}

/// A raw match of one entry inside a text, in token coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hit {
    pub start_token: usize,
    pub end_token: usize,
    pub entry: usize,
    pub uci: String,
    pub term: String,
}

/// A hit attributed to an ad; the JSONL output record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictionaryHit {
    pub ad_id: String,
    pub uci: String,
    pub term: String,
    pub start_token: usize,
    pub end_token: usize,
}

const UNKNOWN: u32 = u32::MAX;
const ROOT: usize = 0;

#[derive(Debug, Clone, Default)]
struct Node {
    next: HashMap<u32, u32>,
    fail: u32,
    /// Nearest node on the failure chain that has outputs.
    out_link: Option<u32>,
    outputs: Vec<u32>,
}

#[derive(Debug, Clone)]
struct Pattern {
    entry: u32,
    len: u32,
    form: u32,
}

#[derive(Debug, Clone)]
struct CompiledRule {
    rule: AssociationRule,
    guard_terms: Vec<Vec<u32>>,
}

/// Immutable compiled matcher; safe to share across threads.
#[derive(Debug, Clone)]
pub struct Matcher {
    entries: Vec<MapEntry>,
    vocab: HashMap<String, u32>,
    nodes: Vec<Node>,
    patterns: Vec<Pattern>,
    negations: HashMap<String, Vec<CompiledRule>>,
    co_occurs: HashMap<String, Vec<CompiledRule>>,
}

impl Matcher {
    pub fn entries(&self) -> &[MapEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    fn token_id(&self, tok: &str) -> u32 {
        self.vocab.get(tok).copied().unwrap_or(UNKNOWN)
    }

    fn encode(&self, text: &str) -> Vec<u32> {
        let mut ids = Vec::new();
        let mut buf = String::new();
        for c in text.chars() {
            if c.is_alphanumeric() {
                buf.extend(c.to_lowercase());
            } else if !buf.is_empty() {
                ids.push(self.token_id(&buf));
                buf.clear();
            }
        }
        if !buf.is_empty() {
            ids.push(self.token_id(&buf));
        }
        ids
    }

    /// All (start, end, pattern) candidates, before overlap resolution.
    fn candidates(&self, ids: &[u32]) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        if self.patterns.is_empty() {
            return out;
        }
        let mut state = ROOT;
        for (i, &id) in ids.iter().enumerate() {
            if id == UNKNOWN {
                state = ROOT;
                continue;
            }
            loop {
                if let Some(&n) = self.nodes[state].next.get(&id) {
                    state = n as usize;
                    break;
                }
                if state == ROOT {
                    break;
                }
                state = self.nodes[state].fail as usize;
            }
            let mut cursor = Some(state as u32);
            if self.nodes[state].outputs.is_empty() {
                cursor = self.nodes[state].out_link;
            }
            while let Some(n) = cursor {
                let node = &self.nodes[n as usize];
                for &p in &node.outputs {
                    let len = self.patterns[p as usize].len as usize;
                    out.push((i + 1 - len, i + 1, p));
                }
                cursor = node.out_link;
            }
        }
        out
    }

    /// Scan text and return hits after overlap resolution and rule application.
    pub fn scan(&self, text: &str) -> Vec<Hit> {
        let ids = self.encode(text);
        let mut cands = self.candidates(&ids);
        if cands.is_empty() {
            return Vec::new();
        }

        cands.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)).then(a.2.cmp(&b.2)));
        let mut taken = vec![false; ids.len()];
        let mut hits = Vec::new();
        let mut i = 0;
        while i < cands.len() {
            let (s, e, _) = cands[i];
            let mut j = i;
            while j < cands.len() && cands[j].0 == s && cands[j].1 == e {
                j += 1;
            }
            if !taken[s..e].iter().any(|&t| t) {
                taken[s..e].iter_mut().for_each(|t| *t = true);
                let mut seen = HashSet::new();
                for &(_, _, p) in &cands[i..j] {
                    let pat = &self.patterns[p as usize];
                    if seen.insert(pat.entry) {
                        let entry = &self.entries[pat.entry as usize];
                        hits.push(Hit {
                            start_token: s,
                            end_token: e,
                            entry: pat.entry as usize,
                            uci: entry.uci.clone(),
                            term: entry.surface_forms[pat.form as usize].join(" "),
                        });
                    }
                }
            }
            i = j;
        }
        hits.sort();
        self.apply_rules(&ids, hits)
    }

    fn guard_present(&self, ids: &[u32], rule: &CompiledRule, hit: &Hit, others: &[Hit]) -> bool {
        let lo = hit.start_token.saturating_sub(rule.rule.window);
        let hi = (hit.end_token + rule.rule.window).min(ids.len());
        match &rule.rule.guard {
            Guard::Terms(_) => rule
                .guard_terms
                .iter()
                .any(|g| g.len() <= hi - lo && (lo..=hi - g.len()).any(|s| ids[s..s + g.len()] == g[..])),
            Guard::Uci(uci) => {
                others.iter().any(|o| o != hit && &o.uci == uci && o.start_token >= lo && o.end_token <= hi)
            }
        }
    }

    fn apply_rules(&self, ids: &[u32], hits: Vec<Hit>) -> Vec<Hit> {
        if self.negations.is_empty() && self.co_occurs.is_empty() {
            return hits;
        }
        let after_neg: Vec<Hit> = hits
            .iter()
            .filter(|h| {
                self.negations
                    .get(&h.uci)
                    .is_none_or(|rules| !rules.iter().any(|r| self.guard_present(ids, r, h, &hits)))
            })
            .cloned()
            .collect();
        after_neg
            .iter()
            .filter(|h| {
                self.co_occurs
                    .get(&h.uci)
                    .is_none_or(|rules| rules.iter().all(|r| self.guard_present(ids, r, h, &after_neg)))
            })
            .cloned()
            .collect()
    }

    pub fn scan_ad(&self, ad_id: &str, text: &str) -> Vec<DictionaryHit> {
        self.scan(text)
            .into_iter()
            .map(|h| DictionaryHit {
                ad_id: ad_id.to_string(),
                uci: h.uci,
                term: h.term,
                start_token: h.start_token,
                end_token: h.end_token,
            })
            .collect()
    }
}

/// Compile entries and rules into a [`Matcher`].
pub fn compile(entries: Vec<MapEntry>, rules: Vec<AssociationRule>) -> Result<Matcher> {
    let mut vocab: HashMap<String, u32> = HashMap::new();
    let mut intern = |t: &str| -> u32 {
        let n = vocab.len() as u32;
        *vocab.entry(t.to_string()).or_insert(n)
    };

    let mut nodes = vec![Node::default()];
    let mut patterns = Vec::new();
    for (ei, entry) in entries.iter().enumerate() {
        entry.validate()?;
        for (fi, form) in entry.surface_forms.iter().enumerate() {
            let mut state = ROOT;
            for tok in form {
                let id = intern(tok);
                state = match nodes[state].next.get(&id) {
                    Some(&n) => n as usize,
                    None => {
                        nodes.push(Node::default());
                        let n = nodes.len() - 1;
                        nodes[state].next.insert(id, n as u32);
                        n
                    }
                };
            }
            nodes[state].outputs.push(patterns.len() as u32);
            patterns.push(Pattern { entry: ei as u32, len: form.len() as u32, form: fi as u32 });
        }
    }

    let mut queue = VecDeque::new();
    let root_children: Vec<u32> = nodes[ROOT].next.values().copied().collect();
    for c in root_children {
        nodes[c as usize].fail = ROOT as u32;
        queue.push_back(c as usize);
    }
    while let Some(u) = queue.pop_front() {
        let children: Vec<(u32, u32)> = nodes[u].next.iter().map(|(&k, &v)| (k, v)).collect();
        for (tok, v) in children {
            let mut f = nodes[u].fail as usize;
            let fail = loop {
                if let Some(&n) = nodes[f].next.get(&tok) {
                    break n as usize;
                }
                if f == ROOT {
                    break ROOT;
                }
                f = nodes[f].fail as usize;
            };
            nodes[v as usize].fail = fail as u32;
            nodes[v as usize].out_link =
                if !nodes[fail].outputs.is_empty() { Some(fail as u32) } else { nodes[fail].out_link };
            queue.push_back(v as usize);
        }
    }

    let mut ids_seen = HashSet::new();
    let mut negations: HashMap<String, Vec<CompiledRule>> = HashMap::new();
    let mut co_occurs: HashMap<String, Vec<CompiledRule>> = HashMap::new();
    for rule in rules {
        if !ids_seen.insert(rule.rule_id.clone()) {
            return Err(Error::ConflictingRule(rule.rule_id));
        }
        if rule.window == 0 {
            return Err(Error::InvalidParameter(format!("rule `{}` has window 0", rule.rule_id)));
        }
        let guard_terms = match &rule.guard {
            Guard::Terms(terms) => {
                let mut out = Vec::new();
                for t in terms {
                    let toks = text::token_strings(t);
                    if toks.is_empty() {
                        return Err(Error::InvalidEntry(format!("rule `{}` has an empty guard term", rule.rule_id)));
                    }
                    out.push(toks.iter().map(|t| intern(t)).collect());
                }
                out
            }
            Guard::Uci(_) => Vec::new(),
        };
        let compiled = CompiledRule { rule, guard_terms };
        let bucket = match compiled.rule.kind {
            RuleKind::Negation => &mut negations,
            RuleKind::CoOccur => &mut co_occurs,
        };
        bucket.entry(compiled.rule.trigger_uci.clone()).or_default().push(compiled);
    }

    Ok(Matcher { entries, vocab, nodes, patterns, negations, co_occurs })
}

/// Dictionary families with known CSV layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DictionarySchema {
    Benefits,
    Education,
    Shifts,
    BackgroundChecks,
    Riasec,
    ToolsTech,
    Generic,
}

impl std::str::FromStr for DictionarySchema {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "benefits" => Self::Benefits,
            "education" => Self::Education,
            "shifts" => Self::Shifts,
            "background_checks" => Self::BackgroundChecks,
            "riasec" => Self::Riasec,
            "tools_tech" => Self::ToolsTech,
            "generic" => Self::Generic,
            other => return Err(Error::InvalidParameter(format!("unknown dictionary schema `{other}`"))),
        })
    }
}

impl DictionarySchema {
    /// (term column, code column, optional label column).
    fn columns(self) -> (&'static str, &'static str, Option<&'static str>) {
        match self {
            Self::Benefits | Self::Education | Self::Shifts | Self::BackgroundChecks => ("term", "label", None),
            Self::Riasec => ("term", "interest", None),
            Self::ToolsTech => ("example", "commodity code", Some("commodity title")),
            Self::Generic => ("term", "uci", Some("label")),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LoadReport {
    /// CSV line numbers of rows skipped because the term was blank.
    pub blank_rows: Vec<usize>,
    pub duplicates: usize,
}

fn riasec_code(raw: &str) -> Option<&'static str> {
    let v = raw.trim().to_ascii_lowercase();
    Some(match v.as_str() {
        "r" | "realistic" => "R",
        "i" | "investigative" => "I",
        "a" | "artistic" => "A",
        "s" | "social" => "S",
        "e" | "enterprising" => "E",
        "c" | "conventional" => "C",
        _ => return None,
    })
}

fn header_key(h: &str) -> String {
    h.trim().to_ascii_lowercase().replace(['_', '-'], " ")
}

/// Load a dictionary CSV. One entry per distinct (term, code) row.
pub fn load_dictionary(path: &Path, schema: DictionarySchema) -> Result<(Vec<MapEntry>, LoadReport)> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_dictionary(file, schema, &path.display().to_string())
}

pub fn read_dictionary<R: std::io::Read>(
    reader: R,
    schema: DictionarySchema,
    context: &str,
) -> Result<(Vec<MapEntry>, LoadReport)> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers: Vec<String> = rdr.headers().map_err(|e| Error::csv(context, e))?.iter().map(header_key).collect();
    let (term_col, code_col, label_col) = schema.columns();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn { column: name.to_string(), context: context.to_string() })
    };
    let term_idx = find(term_col)?;
    let code_idx = find(code_col)?;
    let label_idx = label_col.and_then(|c| headers.iter().position(|h| h == c));

    let mut report = LoadReport::default();
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::csv(context, e))?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let term = rec.get(term_idx).unwrap_or("").trim();
        if text::normalize_term(term).is_empty() {
            report.blank_rows.push(line);
            continue;
        }
        let raw_code = rec.get(code_idx).unwrap_or("").trim();
        let code = match schema {
            DictionarySchema::Riasec => riasec_code(raw_code)
                .ok_or_else(|| Error::InvalidEntry(format!("{context}:{line}: `{raw_code}` is not a RIASEC interest")))?
                .to_string(),
            _ => raw_code.to_string(),
        };
        if code.is_empty() {
            return Err(Error::InvalidEntry(format!("{context}:{line}: empty {code_col}")));
        }
        let label =
            label_idx.and_then(|i| rec.get(i)).map(str::trim).filter(|s| !s.is_empty()).unwrap_or(&code).to_string();
        if !seen.insert((text::normalize_term(term), code.clone())) {
            report.duplicates += 1;
            continue;
        }
        entries.push(MapEntry::new(&[term], &code, &label)?);
    }
    Ok((entries, report))
}

/// Terms removed from dictionaries for excessive false positives.
#[derive(Debug, Clone, Default)]
pub struct ExclusionList {
    terms: BTreeSet<String>,
}

impl ExclusionList {
    pub fn parse(contents: &str) -> Self {
        ExclusionList { terms: contents.lines().map(text::normalize_term).filter(|t| !t.is_empty()).collect() }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&s))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Drop excluded surface forms; entries left without forms are removed.
    pub fn apply(&self, entries: Vec<MapEntry>) -> Vec<MapEntry> {
        entries
            .into_iter()
            .filter_map(|mut e| {
                e.surface_forms.retain(|f| !self.terms.contains(&f.join(" ")));
                (!e.surface_forms.is_empty()).then_some(e)
            })
            .collect()
    }
}

/// Load association rules from a JSONL file (one [`AssociationRule`] per line).
pub fn load_rules(path: &Path) -> Result<Vec<AssociationRule>> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    s.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| Error::json(path.display().to_string(), e)))
        .collect()
}
