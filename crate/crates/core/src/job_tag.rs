//! Keyword-in-context tagging: find class keywords, cut fixed token windows
//! around them and classify each window with ordered cue rules or external
//! predictions.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::JobAdRecord;
use crate::error::{Error, Result};
use crate::knowledge_map::{self, MapEntry, Matcher};
use crate::text;

pub const DEFAULT_RADIUS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Positive,
    Negative,
}

#[derive(Debug, Clone)]
pub struct TagClass {
    pub class_name: String,
    pub keywords: Vec<String>,
    pub window_radius: usize,
    /// Checked before `positive_rules`.
    pub negative_rules: Vec<Vec<String>>,
    pub positive_rules: Vec<Vec<String>>,
    matcher: Matcher,
}

fn term_lines(contents: &str) -> Vec<String> {
    contents.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_string).collect()
}

fn tokenize_rules(lines: &[String]) -> Vec<Vec<String>> {
    lines.iter().map(|l| text::token_strings(l)).filter(|t| !t.is_empty()).collect()
}

impl TagClass {
    pub fn new(
        class_name: &str,
        keywords: Vec<String>,
        negative: &[String],
        positive: &[String],
        window_radius: usize,
    ) -> Result<Self> {
        if window_radius == 0 {
            return Err(Error::InvalidParameter(format!("class `{class_name}`: window radius must be at least 1")));
        }
        if keywords.is_empty() {
            return Err(Error::InvalidEntry(format!("class `{class_name}` has no keywords")));
        }
        let entries =
            keywords.iter().map(|k| MapEntry::new(&[k.as_str()], class_name, k)).collect::<Result<Vec<_>>>()?;
        Ok(TagClass {
            class_name: class_name.into(),
            matcher: knowledge_map::compile(entries, Vec::new())?,
            keywords,
            window_radius,
            negative_rules: tokenize_rules(negative),
            positive_rules: tokenize_rules(positive),
        })
    }

    /// Load a class directory holding keywords.txt and optional
    /// negative_rules.txt / positive_rules.txt. The class is named after the directory.
    pub fn load(dir: &Path, window_radius: usize) -> Result<Self> {
        let read = |name: &str, required: bool| -> Result<Vec<String>> {
            let p = dir.join(name);
            match std::fs::read_to_string(&p) {
                Ok(s) => Ok(term_lines(&s)),
                Err(e) if !required && e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
                Err(e) => Err(Error::io(p, e)),
            }
        };
        let name = dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| Error::InvalidParameter(format!("bad class directory {}", dir.display())))?;
        Self::new(
            name,
            read("keywords.txt", true)?,
            &read("negative_rules.txt", false)?,
            &read("positive_rules.txt", false)?,
            window_radius,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub keyword_start: usize,
    pub keyword_end: usize,
    pub window_start: usize,
    pub window_end: usize,
    pub tokens: Vec<String>,
    pub text: String,
}

/// One window per keyword occurrence: the keyword plus up to `radius`
/// tokens on each side, ignoring sentence boundaries.
pub fn extract_windows(body: &str, class: &TagClass) -> Vec<Window> {
    let toks = text::tokenize(body);
    class
        .matcher
        .scan(body)
        .into_iter()
        .map(|h| {
            let ws = h.start_token.saturating_sub(class.window_radius);
            let we = (h.end_token + class.window_radius).min(toks.len());
            Window {
                keyword_start: h.start_token,
                keyword_end: h.end_token,
                window_start: ws,
                window_end: we,
                tokens: toks[ws..we].iter().map(|t| t.text.clone()).collect(),
                text: body[toks[ws].start..toks[we - 1].end].to_string(),
            }
        })
        .collect()
}

fn contains(haystack: &[String], needle: &[String]) -> bool {
    needle.len() <= haystack.len() && haystack.windows(needle.len()).any(|w| w == needle)
}

/// Negative cues first, then positive; first match wins; default negative.
pub fn classify_window(window: &Window, class: &TagClass) -> (Decision, Option<String>) {
    for rule in &class.negative_rules {
        if contains(&window.tokens, rule) {
            return (Decision::Negative, Some(format!("negative:{}", rule.join(" "))));
        }
    }
    for rule in &class.positive_rules {
        if contains(&window.tokens, rule) {
            return (Decision::Positive, Some(format!("positive:{}", rule.join(" "))));
        }
    }
    (Decision::Negative, None)
}

#[derive(Debug, Deserialize)]
struct PredictionRow {
    ad_id: String,
    window_idx: usize,
    decision: Decision,
}

/// External per-window decisions for one class.
#[derive(Debug, Clone, Default)]
pub struct Predictions {
    source: String,
    decisions: HashMap<(String, usize), Decision>,
}

impl Predictions {
    pub fn parse(contents: &str, source: &str) -> Result<Self> {
        let mut decisions = HashMap::new();
        for (i, line) in contents.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let r: PredictionRow =
                serde_json::from_str(line).map_err(|e| Error::json(format!("{source} line {}", i + 1), e))?;
            decisions.insert((r.ad_id, r.window_idx), r.decision);
        }
        Ok(Predictions { source: source.into(), decisions })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&s, &path.display().to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagResult {
    pub ad_id: String,
    pub class_name: String,
    pub window_idx: usize,
    pub keyword_start: usize,
    pub keyword_end: usize,
    pub window_text: String,
    pub decision: Decision,
    /// The rule that decided, or `external:<source>` for predictions.
    pub rule_fired: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdTags {
    pub ad_id: String,
    pub tags: BTreeMap<String, bool>,
    pub windows: Vec<TagResult>,
}

/// Tag an ad's body for every class. A class is positive if any window is.
pub fn tag_ad(ad: &JobAdRecord, classes: &[TagClass], predictions: &HashMap<String, Predictions>) -> AdTags {
    let mut tags = BTreeMap::new();
    let mut windows = Vec::new();
    for class in classes {
        let preds = predictions.get(&class.class_name);
        let mut any = false;
        for (i, w) in extract_windows(&ad.body, class).into_iter().enumerate() {
            let external = preds.and_then(|p| p.decisions.get(&(ad.id.clone(), i)).map(|d| (*d, &p.source)));
            let (decision, rule_fired) = match external {
                Some((d, src)) => (d, Some(format!("external:{src}"))),
                None => classify_window(&w, class),
            };
            any |= decision == Decision::Positive;
            windows.push(TagResult {
                ad_id: ad.id.clone(),
                class_name: class.class_name.clone(),
                window_idx: i,
                keyword_start: w.keyword_start,
                keyword_end: w.keyword_end,
                window_text: w.text,
                decision,
                rule_fired,
            });
        }
        tags.insert(class.class_name.clone(), any);
    }
    AdTags { ad_id: ad.id.clone(), tags, windows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn union_class() -> TagClass {
        TagClass::new(
            "union",
            vec!["union".into()],
            &["credit".into()],
            &["collective bargaining".into(), "labor".into()],
            DEFAULT_RADIUS,
        )
        .unwrap()
    }

    #[test]
    fn window_geometry() {
        let c = union_class();
        let w = extract_windows("proud member of a labor union family", &c);
        assert_eq!(w.len(), 1);
        assert_eq!((w[0].window_start, w[0].keyword_start, w[0].keyword_end, w[0].window_end), (0, 5, 6, 7));
        assert_eq!(w[0].text, "proud member of a labor union family");
        let w = extract_windows("Union shop with great pay and many other perks today", &c);
        assert_eq!(w[0].window_start, 0);
        assert_eq!(w[0].tokens.len(), 7);
        assert!(extract_windows("no keyword here", &c).is_empty());
    }

    #[test]
    fn rule_order() {
        let c = union_class();
        let w = &extract_windows("join our credit union today", &c)[0];
        assert_eq!(classify_window(w, &c).0, Decision::Negative);
        let w = &extract_windows("covered by a union collective bargaining agreement", &c)[0];
        assert_eq!(classify_window(w, &c).0, Decision::Positive);
        let bare = TagClass::new("union", vec!["union".into()], &[], &[], 6).unwrap();
        let w = &extract_windows("union collective bargaining", &bare)[0];
        assert_eq!(classify_window(w, &bare), (Decision::Negative, None));
    }

    #[test]
    fn invalid_classes() {
        assert!(TagClass::new("x", vec![], &[], &[], 6).is_err());
        assert!(TagClass::new("x", vec!["a".into()], &[], &[], 0).is_err());
    }
}
