//! Job-ad records: ingestion from JSONL/CSV, sentence segmentation and
//! per-ad readability.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::month::YearMonth;

/// One job posting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobAdRecord {
    pub id: String,
    pub title: String,
    pub body: String,
    pub date_acquired: Option<YearMonth>,
    pub date_compiled: YearMonth,
    pub state: Option<String>,
    pub zip: Option<String>,
    pub firm_name_meta: Option<String>,
    pub wage_min_meta: Option<f64>,
    pub wage_max_meta: Option<f64>,
}

pub const REQUIRED_FIELDS: [&str; 4] = ["id", "title", "body", "date_compiled"];
pub const ALL_FIELDS: [&str; 10] = [
    "id",
    "title",
    "body",
    "date_acquired",
    "date_compiled",
    "state",
    "zip",
    "firm_name_meta",
    "wage_min_meta",
    "wage_max_meta",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Jsonl,
    Csv,
}

impl SourceFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "jsonl" | "ndjson" | "json" => Some(SourceFormat::Jsonl),
            "csv" => Some(SourceFormat::Csv),
            _ => None,
        }
    }
}

/// A row that failed validation and was skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedRow {
    pub line: usize,
    pub id: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct IngestOutcome {
    pub records: Vec<JobAdRecord>,
    pub rejected: Vec<RejectedRow>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Fail on the first rejected row instead of skipping it.
    pub strict: bool,
}

pub fn ingest_path(path: &Path, options: IngestOptions) -> Result<IngestOutcome> {
    let format = SourceFormat::from_path(path)
        .ok_or_else(|| Error::Unreadable(format!("{}: unknown corpus format (use .jsonl or .csv)", path.display())))?;
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    ingest(file, format, options)
}

pub fn ingest<R: Read>(reader: R, format: SourceFormat, options: IngestOptions) -> Result<IngestOutcome> {
    let mut outcome = IngestOutcome::default();
    let mut push = |line: usize, row: Result<JobAdRecord, (Option<String>, String)>| -> Result<()> {
        match row {
            Ok(record) => outcome.records.push(record),
            Err((id, reason)) => {
                if options.strict {
                    return Err(Error::RejectedRow { line, reason });
                }
                outcome.rejected.push(RejectedRow { line, id, reason });
            }
        }
        Ok(())
    };

    match format {
        SourceFormat::Jsonl => {
            for (i, line) in BufReader::new(reader).lines().enumerate() {
                let line = line.map_err(|e| Error::Unreadable(e.to_string()))?;
                if line.trim().is_empty() {
                    continue;
                }
                push(i + 1, parse_json_row(&line))?;
            }
        }
        SourceFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(reader);
            let headers = rdr.headers().map_err(|e| Error::Unreadable(e.to_string()))?.clone();
            let columns: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
            for required in REQUIRED_FIELDS {
                if !columns.iter().any(|c| c == required) {
                    return Err(Error::MissingColumn { column: required.to_string(), context: "corpus csv".into() });
                }
            }
            for result in rdr.records() {
                let rec = match result {
                    Ok(rec) => rec,
                    Err(e) if matches!(e.kind(), csv::ErrorKind::Utf8 { .. } | csv::ErrorKind::Io(_)) => {
                        return Err(Error::Unreadable(e.to_string()));
                    }
                    Err(e) => {
                        let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
                        push(line, Err((None, e.to_string())))?;
                        continue;
                    }
                };
                let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
                let fields: BTreeMap<&str, &str> = columns.iter().map(String::as_str).zip(rec.iter()).collect();
                let get = |k: &str| fields.get(k).map(|v| v.to_string()).filter(|v| !v.is_empty());
                push(line, build_record(get))?;
            }
        }
    }

    let mut seen = BTreeSet::new();
    let mut dups = BTreeSet::new();
    for r in &outcome.records {
        if !seen.insert(r.id.as_str()) {
            dups.insert(r.id.clone());
        }
    }
    if !dups.is_empty() {
        return Err(Error::DuplicateIds(dups.into_iter().collect()));
    }
    Ok(outcome)
}

fn parse_json_row(line: &str) -> Result<JobAdRecord, (Option<String>, String)> {
    let value: Value = serde_json::from_str(line).map_err(|e| (None, format!("invalid json: {e}")))?;
    let obj = value.as_object().ok_or_else(|| (None, "row is not a json object".to_string()))?;
    let get = |k: &str| match obj.get(k) {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) if s.is_empty() => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(other) => Some(other.to_string()),
    };
    build_record(get)
}

fn build_record(get: impl Fn(&str) -> Option<String>) -> Result<JobAdRecord, (Option<String>, String)> {
    let id = get("id");
    let fail = |reason: String| (id.clone(), reason);
    let Some(ad_id) = id.clone().filter(|s| !s.trim().is_empty()) else {
        return Err(fail("missing id".into()));
    };
    let title = get("title").unwrap_or_default();
    let body = get("body").ok_or_else(|| fail("missing body".into()))?;
    let compiled = get("date_compiled").ok_or_else(|| fail("missing date_compiled".into()))?;
    let date_compiled: YearMonth =
        compiled.parse().map_err(|_| fail(format!("malformed date_compiled `{compiled}`")))?;
    let date_acquired = match get("date_acquired") {
        None => None,
        Some(s) => Some(s.parse::<YearMonth>().map_err(|_| fail(format!("malformed date_acquired `{s}`")))?),
    };
    if let Some(acq) = date_acquired {
        if acq > date_compiled {
            return Err(fail(format!("date_acquired {acq} is after date_compiled {date_compiled}")));
        }
    }
    let state = get("state").map(|s| s.trim().to_string());
    if let Some(s) = &state {
        if s.len() != 2 || !s.bytes().all(|b| b.is_ascii_alphabetic()) {
            return Err(fail(format!("malformed state `{s}`")));
        }
    }
    let zip = get("zip").map(|s| s.trim().to_string());
    if let Some(z) = &zip {
        if z.len() != 5 || !z.bytes().all(|b| b.is_ascii_digit()) {
            return Err(fail(format!("malformed zip `{z}`")));
        }
    }
    let money = |key: &str| -> Result<Option<f64>, (Option<String>, String)> {
        match get(key) {
            None => Ok(None),
            Some(s) => s
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite() && *v >= 0.0)
                .map(Some)
                .ok_or_else(|| fail(format!("malformed {key} `{s}`"))),
        }
    };
    let wage_min_meta = money("wage_min_meta")?;
    let wage_max_meta = money("wage_max_meta")?;
    Ok(JobAdRecord {
        id: ad_id,
        title,
        body,
        date_acquired,
        date_compiled,
        state,
        zip,
        firm_name_meta: get("firm_name_meta"),
        wage_min_meta,
        wage_max_meta,
    })
}

/// Write records as JSONL, one object per line, fields in declaration order.
pub fn emit_jsonl<W: Write>(records: &[JobAdRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Write records as RFC-4180 CSV with a header row.
pub fn emit_csv<W: Write>(records: &[JobAdRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ALL_FIELDS)?;
    let opt = |v: &Option<String>| v.clone().unwrap_or_default();
    let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        w.write_record([
            r.id.clone(),
            r.title.clone(),
            r.body.clone(),
            r.date_acquired.map(|m| m.to_string()).unwrap_or_default(),
            r.date_compiled.to_string(),
            opt(&r.state),
            opt(&r.zip),
            opt(&r.firm_name_meta),
            num(r.wage_min_meta),
            num(r.wage_max_meta),
        ])?;
    }
    w.flush()
}

/// A sentence produced by [`segment`]. `char_span` holds byte offsets into the body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub ad_id: String,
    pub index: usize,
    pub text: String,
    pub char_span: (usize, usize),
}

impl Sentence {
    /// Key under which this sentence's embedding is stored.
    pub fn key(&self) -> String {
        sentence_key(&self.ad_id, self.index)
    }
}

pub fn sentence_key(ad_id: &str, index: usize) -> String {
    format!("{ad_id}#{index}")
}

const BULLET_GLYPHS: &[char] = &['•', '◦', '▪', '‣', '●', '○', '■', '►', '❖', '➢'];

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_bullet(c: char) -> bool {
    BULLET_GLYPHS.contains(&c)
}

/// Split a body into sentences.
///
/// Delimiters: newlines, bullet glyphs, and runs of `.`/`!`/`?` that are
/// followed by whitespace, a bullet or the end of text (so `$15.50` and
/// `e.g.x` stay intact). Fragments are trimmed, leading ASCII list markers
/// (`- `, `* `, `+ `) are stripped and empty fragments dropped.
pub fn segment(body: &str) -> Vec<(usize, usize)> {
    let chars: Vec<(usize, char)> = body.char_indices().collect();
    let mut delim = vec![false; chars.len()];
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i].1;
        if c == '\n' || c == '\r' || is_bullet(c) {
            delim[i] = true;
            i += 1;
        } else if is_terminator(c) {
            let mut j = i;
            while j < chars.len() && is_terminator(chars[j].1) {
                j += 1;
            }
            let ends = j == chars.len() || chars[j].1.is_whitespace() || is_bullet(chars[j].1);
            if ends {
                delim[i..j].iter_mut().for_each(|d| *d = true);
            }
            i = j;
        } else {
            i += 1;
        }
    }

    let mut spans = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        if delim[k] {
            k += 1;
            continue;
        }
        let start = chars[k].0;
        while k < chars.len() && !delim[k] {
            k += 1;
        }
        let end = if k < chars.len() { chars[k].0 } else { body.len() };
        if let Some(span) = clean_fragment(body, start, end) {
            spans.push(span);
        }
    }
    spans
}

fn clean_fragment(body: &str, mut start: usize, mut end: usize) -> Option<(usize, usize)> {
    loop {
        let frag = &body[start..end];
        let trimmed = frag.trim_start();
        start += frag.len() - trimmed.len();
        let mut it = trimmed.chars();
        match (it.next(), it.next()) {
            (Some('-' | '*' | '+'), Some(ws)) if ws.is_whitespace() => start += 1,
            _ => break,
        }
    }
    end = start + body[start..end].trim_end().len();
    (end > start).then_some((start, end))
}

/// Segment an ad body into [`Sentence`]s.
pub fn sentences(ad_id: &str, body: &str) -> Vec<Sentence> {
    segment(body)
        .into_iter()
        .enumerate()
        .map(|(index, (s, e))| Sentence {
            ad_id: ad_id.to_string(),
            index,
            text: body[s..e].to_string(),
            char_span: (s, e),
        })
        .collect()
}

/// Syllables by vowel groups (`aeiouy`), minus one for a silent terminal `e`, floor 1.
pub fn count_syllables(word: &str) -> usize {
    let letters: Vec<char> = word.chars().filter(|c| c.is_alphabetic()).flat_map(char::to_lowercase).collect();
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0usize;
    let mut prev = false;
    for &c in &letters {
        let v = is_vowel(c);
        if v && !prev {
            groups += 1;
        }
        prev = v;
    }
    // A final e after a consonant is silent, except in a consonant + "le" ending.
    if let [.., before, 'e'] = letters.as_slice() {
        let n = letters.len();
        let syllabic_le = *before == 'l' && n >= 3 && !is_vowel(letters[n - 3]);
        if !is_vowel(*before) && !syllabic_le {
            groups = groups.saturating_sub(1);
        }
    }
    groups.max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadabilityCounts {
    pub words: usize,
    pub sentences: usize,
    pub syllables: usize,
}

pub fn readability_counts(body: &str) -> ReadabilityCounts {
    let words: Vec<&str> = body.split_whitespace().filter(|w| w.chars().any(char::is_alphanumeric)).collect();
    ReadabilityCounts {
        words: words.len(),
        sentences: segment(body).len().max(1),
        syllables: words.iter().map(|w| count_syllables(w)).sum(),
    }
}

/// Flesch reading ease: `206.835 - 1.015 * (words/sentences) - 84.6 * (syllables/words)`.
pub fn flesch_reading_ease(body: &str) -> Result<f64> {
    let c = readability_counts(body);
    if c.words == 0 {
        return Err(Error::Unreadable("no words".into()));
    }
    let words = c.words as f64;
    Ok(206.835 - 1.015 * (words / c.sentences as f64) - 84.6 * (c.syllables as f64 / words))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(body: &str) -> Vec<&str> {
        segment(body).into_iter().map(|(s, e)| &body[s..e]).collect()
    }

    #[test]
    fn segment_basic_rules() {
        assert!(segment("").is_empty());
        let body = "Cook food. Clean grill.";
        assert_eq!(segment(body), vec![(0, 9), (11, 22)]);
        assert_eq!(texts(body), vec!["Cook food", "Clean grill"]);
        assert_eq!(texts("• greet guests\n• run register"), vec!["greet guests", "run register"]);
        assert_eq!(texts("- lift 50 lbs\n* stand\n\n\nsmile!"), vec!["lift 50 lbs", "stand", "smile"]);
    }

    #[test]
    fn decimals_do_not_split() {
        assert_eq!(texts("Pay is $15.50 per hour. Apply now!"), vec!["Pay is $15.50 per hour", "Apply now"]);
        assert_eq!(texts("Wow!!! Great."), vec!["Wow", "Great"]);
    }

    #[test]
    fn flesch_hand_value() {
        let s = flesch_reading_ease("The cat sat.").unwrap();
        assert!((s - 119.19).abs() < 0.01, "{s}");
        assert!(flesch_reading_ease("").is_err());
        assert!(flesch_reading_ease("  ... ").is_err());
    }

    #[test]
    fn syllable_heuristic() {
        assert_eq!(count_syllables("cat"), 1);
        assert_eq!(count_syllables("make"), 1);
        assert_eq!(count_syllables("the"), 1);
        assert_eq!(count_syllables("customer"), 3);
        assert_eq!(count_syllables("value"), 2);
        assert_eq!(count_syllables("table"), 2);
        assert_eq!(count_syllables("2024"), 1);
    }

    #[test]
    fn rejects_inverted_dates() {
        let row = r#"{"id":"a","title":"t","body":"b","date_acquired":"2024-03","date_compiled":"2024-01"}"#;
        let out = ingest(row.as_bytes(), SourceFormat::Jsonl, IngestOptions::default()).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.rejected.len(), 1);
        assert!(out.rejected[0].reason.contains("after"));
        let strict = ingest(row.as_bytes(), SourceFormat::Jsonl, IngestOptions { strict: true });
        assert!(matches!(strict, Err(Error::RejectedRow { line: 1, .. })));
    }

    #[test]
    fn empty_stream_and_duplicates() {
        let out = ingest(&b""[..], SourceFormat::Jsonl, IngestOptions::default()).unwrap();
        assert!(out.records.is_empty());
        let rows = "{\"id\":\"a\",\"title\":\"t\",\"body\":\"b\",\"date_compiled\":\"2024-01\"}\n\
                    {\"id\":\"a\",\"title\":\"t\",\"body\":\"b\",\"date_compiled\":\"2024-01\"}\n";
        match ingest(rows.as_bytes(), SourceFormat::Jsonl, IngestOptions::default()) {
            Err(Error::DuplicateIds(ids)) => assert_eq!(ids, vec!["a".to_string()]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_missing_column_is_fatal() {
        let data = "id,title,body\na,t,b\n";
        match ingest(data.as_bytes(), SourceFormat::Csv, IngestOptions::default()) {
            Err(Error::MissingColumn { column, .. }) => assert_eq!(column, "date_compiled"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_utf8_is_fatal() {
        let bytes = b"{\"id\":\"\xff\"}\n";
        assert!(matches!(ingest(&bytes[..], SourceFormat::Jsonl, IngestOptions::default()), Err(Error::Unreadable(_))));
    }
}
