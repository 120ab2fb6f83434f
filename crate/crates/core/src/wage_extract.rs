//! Wage sentences: detection, MIN/MAX span parsing, pay-frequency
//! resolution, annualization and outlier flags.
//!
//! Money is held in integer cents so parsing and rendering round-trip exactly.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize, Serializer};

use crate::corpus::{self, JobAdRecord, Sentence};
use crate::error::{Error, Result};

/// An amount of US dollars in cents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Money(pub i64);

impl Money {
    pub fn from_dollars(d: f64) -> Self {
        Money((d * 100.0).round() as i64)
    }

    pub fn dollars(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

impl fmt::Display for Money {
    /// `$1,234` for whole dollars, `$1,234.56` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let whole = self.0 / 100;
        let cents = self.0 % 100;
        let digits = whole.to_string();
        let mut grouped = String::new();
        for (i, c) in digits.chars().enumerate() {
            if i > 0 && (digits.len() - i).is_multiple_of(3) {
                grouped.push(',');
            }
            grouped.push(c);
        }
        if cents == 0 {
            write!(f, "${grouped}")
        } else {
            write!(f, "${grouped}.{cents:02}")
        }
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.dollars())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Money::from_dollars)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frequency {
    Hourly,
    Weekly,
    Monthly,
    Annually,
}

impl Frequency {
    fn cue_text(self) -> &'static str {
        match self {
            Frequency::Hourly => "per hour",
            Frequency::Weekly => "per week",
            Frequency::Monthly => "per month",
            Frequency::Annually => "per year",
        }
    }
}

impl std::str::FromStr for Frequency {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hourly" | "hour" | "hr" => Ok(Frequency::Hourly),
            "weekly" | "week" | "wk" => Ok(Frequency::Weekly),
            "monthly" | "month" | "mo" => Ok(Frequency::Monthly),
            "annually" | "annual" | "yearly" | "year" | "yr" => Ok(Frequency::Annually),
            other => Err(Error::InvalidParameter(format!("unknown pay frequency `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointOrRange {
    Point,
    Range,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Text,
    Metadata,
    Override,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WageConfig {
    /// Multipliers to annual pay.
    pub hours_per_year: i64,
    pub weeks_per_year: i64,
    pub months_per_year: i64,
    /// Values below this (in dollars) default to hourly when no cue is present.
    pub hourly_below: f64,
    /// Values at or above this default to annual; between the two, monthly.
    pub annual_from: f64,
    pub outlier_min: f64,
    pub outlier_max: f64,
}

impl Default for WageConfig {
    fn default() -> Self {
        WageConfig {
            hours_per_year: 2080,
            weeks_per_year: 52,
            months_per_year: 12,
            hourly_below: 200.0,
            annual_from: 10_000.0,
            outlier_min: 5_000.0,
            outlier_max: 1_000_000.0,
        }
    }
}

impl WageConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.hours_per_year <= 0 || self.weeks_per_year <= 0 || self.months_per_year <= 0 {
            problems.push("annualization multipliers must be positive");
        }
        if !(self.hourly_below > 0.0 && self.hourly_below < self.annual_from) {
            problems.push("magnitude thresholds must satisfy 0 < hourly_below < annual_from");
        }
        if !(self.outlier_min >= 0.0 && self.outlier_min < self.outlier_max) {
            problems.push("outlier bounds must satisfy 0 <= min < max");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(problems.join("; ")))
        }
    }

    pub fn multiplier(&self, f: Frequency) -> i64 {
        match f {
            Frequency::Hourly => self.hours_per_year,
            Frequency::Weekly => self.weeks_per_year,
            Frequency::Monthly => self.months_per_year,
            Frequency::Annually => 1,
        }
    }

    /// Frequency guessed from magnitude alone.
    pub fn frequency_by_magnitude(&self, value: Money) -> Frequency {
        let d = value.dollars();
        if d < self.hourly_below {
            Frequency::Hourly
        } else if d < self.annual_from {
            Frequency::Monthly
        } else {
            Frequency::Annually
        }
    }
}

/// One parsed amount and where it came from in the sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmountSpan {
    pub start: usize,
    pub end: usize,
    pub text: String,
    pub value: Money,
    #[serde(skip)]
    currency: bool,
    #[serde(skip)]
    thousands: bool,
}

static AMOUNT: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(\$\s?)?(\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?)([kK])?").expect("valid regex"));

static RETIREMENT_PLAN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b40[13]\s*\(?\s*[kb]\s*\)?").expect("valid regex"));

static CUES: LazyLock<Vec<(Frequency, Regex)>> = LazyLock::new(|| {
    let build = |p: &str| Regex::new(&format!("(?i){p}")).expect("valid regex");
    vec![
        (Frequency::Hourly, build(r"\bper\s+(?:hour|hr)\b|\ban?\s+(?:hour|hr)\b|/\s*(?:hour|hr)\b|\bhourly\b")),
        (Frequency::Weekly, build(r"\bper\s+(?:week|wk)\b|\ba\s+week\b|/\s*(?:week|wk)\b|\bweekly\b")),
        (Frequency::Monthly, build(r"\bper\s+(?:month|mo)\b|\ba\s+month\b|/\s*(?:month|mo)\b|\bmonthly\b")),
        (
            Frequency::Annually,
            build(
                r"\bper\s+(?:year|yr|annum)\b|\ba\s+(?:year|yr)\b|/\s*(?:year|yr|annum)\b|\bannual(?:ly)?\b|\byearly\b",
            ),
        ),
    ]
});

static PAY_WORDS: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:salary|wages?|pay|compensation|earn|rate)\b").expect("valid regex"));

static GAP_AFTER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)^\s*(?:usd|dollars?)?\s*$").expect("valid regex"));
static GAP_BEFORE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)^[\s:]*(?:(?:rate|pay|wage|salary)\s*)?(?:(?:of|is|:)\s*)?$").expect("valid regex")
});
static RANGE_GAP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^\s*(?:-|–|—|to)\s*$").expect("valid regex"));
static BETWEEN_GAP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)^\s*and\s*$").expect("valid regex"));
static BETWEEN_BEFORE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\bbetween\s*$").expect("valid regex"));

fn parse_cents(num: &str) -> Option<i64> {
    let num = num.replace(',', "");
    let (whole, frac) = match num.split_once('.') {
        Some((w, f)) => (w, f),
        None => (num.as_str(), ""),
    };
    let whole: i64 = whole.parse().ok()?;
    let mut cents = 0i64;
    let fd: Vec<u32> = frac.chars().filter_map(|c| c.to_digit(10)).collect();
    if let Some(&d) = fd.first() {
        cents += i64::from(d) * 10;
    }
    if let Some(&d) = fd.get(1) {
        cents += i64::from(d);
    }
    if fd.get(2).is_some_and(|&d| d >= 5) {
        cents += 1;
    }
    whole.checked_mul(100)?.checked_add(cents)
}

fn amounts(text: &str) -> Vec<AmountSpan> {
    let masked: Vec<(usize, usize)> = RETIREMENT_PLAN.find_iter(text).map(|m| (m.start(), m.end())).collect();
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    for caps in AMOUNT.captures_iter(text) {
        let m = caps.get(0).expect("whole match");
        let (start, mut end) = (m.start(), m.end());
        let num = caps.get(2).expect("number group");
        let mut thousands = caps.get(3).is_some();
        let prev_alnum = text[..start].chars().next_back().is_some_and(|c| c.is_alphanumeric());
        if prev_alnum || masked.iter().any(|&(a, b)| start < b && a < end) {
            continue;
        }
        if bytes.get(end).is_some_and(|b| b.is_ascii_alphanumeric()) {
            if !thousands {
                continue;
            }
            // "5km" and the like: the k was the start of a word.
            thousands = false;
            end = num.end();
            if bytes.get(end).is_some_and(|b| b.is_ascii_alphanumeric()) {
                continue;
            }
        }
        let Some(mut cents) = parse_cents(num.as_str()) else { continue };
        if thousands {
            cents *= 1000;
        }
        out.push(AmountSpan {
            start,
            end,
            text: text[start..end].to_string(),
            value: Money(cents),
            currency: caps.get(1).is_some(),
            thousands,
        });
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Cue {
    start: usize,
    end: usize,
    freq: Frequency,
}

fn cues(text: &str) -> Vec<Cue> {
    let mut out: Vec<Cue> = CUES
        .iter()
        .flat_map(|(f, re)| re.find_iter(text).map(move |m| Cue { start: m.start(), end: m.end(), freq: *f }))
        .collect();
    out.sort_by_key(|c| (c.start, c.end));
    out
}

/// True if the sentence plausibly states pay. Errs on the side of recall.
pub fn is_wage_candidate(text: &str) -> bool {
    let masked = RETIREMENT_PLAN.replace_all(text, " ");
    let found = amounts(&masked);
    if found.iter().any(|a| a.currency) {
        return true;
    }
    !found.is_empty() && (!cues(&masked).is_empty() || PAY_WORDS.is_match(&masked))
}

pub fn detect_wage_sentences(sentences: &[Sentence]) -> Vec<&Sentence> {
    sentences.iter().filter(|s| is_wage_candidate(&s.text)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedWage {
    pub min: AmountSpan,
    pub max: AmountSpan,
    pub kind: PointOrRange,
    pub frequency: Frequency,
    pub low_confidence: bool,
}

fn cue_after(text: &str, cues: &[Cue], end: usize) -> Option<Frequency> {
    cues.iter().find(|c| c.start >= end && GAP_AFTER.is_match(&text[end..c.start])).map(|c| c.freq)
}

fn cue_before(text: &str, cues: &[Cue], start: usize) -> Option<Frequency> {
    cues.iter().rev().find(|c| c.end <= start && GAP_BEFORE.is_match(&text[c.end..start])).map(|c| c.freq)
}

/// Parse the single wage statement in a sentence. `Err` carries the reason.
pub fn parse_wage(text: &str, config: &WageConfig) -> Result<ParsedWage, String> {
    let found = amounts(text);
    let cue_list = cues(text);
    let adjacent =
        |start: usize, end: usize| cue_after(text, &cue_list, end).or_else(|| cue_before(text, &cue_list, start));

    let mut items: Vec<(AmountSpan, AmountSpan, Option<Frequency>)> = Vec::new();
    let mut i = 0;
    while i < found.len() {
        let a = &found[i];
        if let Some(b) = found.get(i + 1) {
            let gap = &text[a.end..b.start];
            let ranged =
                RANGE_GAP.is_match(gap) || (BETWEEN_GAP.is_match(gap) && BETWEEN_BEFORE.is_match(&text[..a.start]));
            if ranged {
                let cue = adjacent(a.start, b.end);
                if a.currency || b.currency || cue.is_some() {
                    let mut lo = a.clone();
                    if b.thousands && !lo.thousands && lo.value.0 < 100_000 {
                        lo.value = Money(lo.value.0 * 1000);
                    }
                    items.push((lo, b.clone(), cue));
                }
                i += 2;
                continue;
            }
        }
        let cue = adjacent(a.start, a.end);
        if a.currency || cue.is_some() {
            items.push((a.clone(), a.clone(), cue));
        }
        i += 1;
    }

    let (min, max, cue) = match items.len() {
        0 => return Err("no anchored amount".into()),
        1 => items.remove(0),
        n => return Err(format!("{n} wage amounts without range syntax")),
    };
    if min.value > max.value {
        return Err(format!("inverted range {} > {}", min.text, max.text));
    }
    let nearest_cue = || {
        let mid = (min.start + max.end) / 2;
        cue_list.iter().min_by_key(|c| (c.start.abs_diff(mid), c.start)).map(|c| c.freq)
    };
    let (frequency, low_confidence) = match cue.or_else(nearest_cue) {
        Some(f) => (f, false),
        None => (config.frequency_by_magnitude(Money((min.value.0 + max.value.0) / 2)), true),
    };
    let kind = if min.start == max.start { PointOrRange::Point } else { PointOrRange::Range };
    Ok(ParsedWage { min, max, kind, frequency, low_confidence })
}

/// Parse a standalone amount such as `$15.50` or `60k`.
pub fn parse_amount(text: &str) -> Option<Money> {
    let found = amounts(text.trim());
    match found.as_slice() {
        [a] if a.start == 0 && a.end == text.trim().len() => Some(a.value),
        _ => None,
    }
}

/// Annual pay in cents from the midpoint, rounding half-cents up.
pub fn annualize(min: Money, max: Money, frequency: Frequency, config: &WageConfig) -> Money {
    let total = (min.0 + max.0) * config.multiplier(frequency);
    Money((total + 1).div_euclid(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WageObservation {
    pub ad_id: String,
    pub sentence_idx: Option<usize>,
    pub raw_span_min: Option<String>,
    pub raw_span_max: Option<String>,
    pub min_value: Money,
    pub max_value: Money,
    pub frequency: Frequency,
    pub low_confidence: bool,
    pub annualized: Money,
    pub point_or_range: PointOrRange,
    pub outlier: bool,
    pub provenance: Provenance,
}

impl WageObservation {
    #[allow(clippy::too_many_arguments)]
    fn build(
        ad_id: &str,
        sentence_idx: Option<usize>,
        spans: (Option<String>, Option<String>),
        min: Money,
        max: Money,
        frequency: Frequency,
        low_confidence: bool,
        provenance: Provenance,
        config: &WageConfig,
    ) -> Self {
        let annualized = annualize(min, max, frequency, config);
        let a = annualized.dollars();
        WageObservation {
            ad_id: ad_id.into(),
            sentence_idx,
            raw_span_min: spans.0,
            raw_span_max: spans.1,
            min_value: min,
            max_value: max,
            frequency,
            low_confidence,
            annualized,
            point_or_range: if min == max { PointOrRange::Point } else { PointOrRange::Range },
            outlier: a < config.outlier_min || a > config.outlier_max,
            provenance,
        }
    }

    pub fn from_parsed(ad_id: &str, sentence_idx: usize, p: &ParsedWage, config: &WageConfig) -> Self {
        let mut obs = Self::build(
            ad_id,
            Some(sentence_idx),
            (Some(p.min.text.clone()), Some(p.max.text.clone())),
            p.min.value,
            p.max.value,
            p.frequency,
            p.low_confidence,
            Provenance::Text,
            config,
        );
        obs.point_or_range = p.kind;
        obs
    }
}

/// Canonical text for an observation, e.g. `$15.50 - $18 per hour`.
pub fn render(obs: &WageObservation) -> String {
    match obs.point_or_range {
        PointOrRange::Point => format!("{} {}", obs.min_value, obs.frequency.cue_text()),
        PointOrRange::Range => format!("{} - {} {}", obs.min_value, obs.max_value, obs.frequency.cue_text()),
    }
}

/// Externally supplied spans for one sentence, replacing the grammar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WageOverride {
    pub ad_id: String,
    pub sentence_idx: usize,
    pub min_span: Option<String>,
    pub max_span: Option<String>,
    pub freq: Option<String>,
}

pub fn load_overrides(path: &Path) -> Result<HashMap<(String, usize), WageOverride>> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_overrides(&s)
}

pub fn parse_overrides(contents: &str) -> Result<HashMap<(String, usize), WageOverride>> {
    let mut out = HashMap::new();
    for (i, line) in contents.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let o: WageOverride =
            serde_json::from_str(line).map_err(|e| Error::json(format!("wage overrides line {}", i + 1), e))?;
        out.insert((o.ad_id.clone(), o.sentence_idx), o);
    }
    Ok(out)
}

fn from_override(o: &WageOverride, config: &WageConfig) -> Result<WageObservation, String> {
    let parse = |s: &Option<String>| -> Result<Option<Money>, String> {
        s.as_deref().map(|t| parse_amount(t).ok_or_else(|| format!("override span `{t}` is not an amount"))).transpose()
    };
    let (min, max) = match (parse(&o.min_span)?, parse(&o.max_span)?) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) | (None, Some(a)) => (a, a),
        (None, None) => return Err("override has no spans".into()),
    };
    if min > max {
        return Err("override range is inverted".into());
    }
    let (freq, low) = match &o.freq {
        Some(f) => (f.parse::<Frequency>().map_err(|e| e.to_string())?, false),
        None => (config.frequency_by_magnitude(Money((min.0 + max.0) / 2)), true),
    };
    Ok(WageObservation::build(
        &o.ad_id,
        Some(o.sentence_idx),
        (o.min_span.clone(), o.max_span.clone()),
        min,
        max,
        freq,
        low,
        Provenance::Override,
        config,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WageDiagnostic {
    pub ad_id: String,
    pub sentence_idx: usize,
    pub message: String,
}

/// Wage outcome for one ad. `observation` is the reported value: metadata
/// when present, else the first parsed sentence. `text_observation` keeps the
/// text-derived value even when metadata wins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdWage {
    pub ad_id: String,
    pub observation: Option<WageObservation>,
    pub text_observation: Option<WageObservation>,
    pub diagnostics: Vec<WageDiagnostic>,
}

pub fn extract_ad(ad: &JobAdRecord, overrides: &HashMap<(String, usize), WageOverride>, config: &WageConfig) -> AdWage {
    let mut diagnostics = Vec::new();
    let mut text_observation = None;
    for s in corpus::sentences(&ad.id, &ad.body) {
        let parsed = if let Some(o) = overrides.get(&(ad.id.clone(), s.index)) {
            from_override(o, config)
        } else if is_wage_candidate(&s.text) {
            parse_wage(&s.text, config).map(|p| WageObservation::from_parsed(&ad.id, s.index, &p, config))
        } else {
            continue;
        };
        match parsed {
            Ok(obs) => {
                text_observation = Some(obs);
                break;
            }
            Err(message) => diagnostics.push(WageDiagnostic { ad_id: ad.id.clone(), sentence_idx: s.index, message }),
        }
    }
    let meta = match (ad.wage_min_meta, ad.wage_max_meta) {
        (Some(a), Some(b)) => Some((a.min(b), a.max(b))),
        (Some(a), None) | (None, Some(a)) => Some((a, a)),
        (None, None) => None,
    };
    let observation = match meta {
        Some((lo, hi)) => {
            let (min, max) = (Money::from_dollars(lo), Money::from_dollars(hi));
            let (freq, low) = match &text_observation {
                Some(t) => (t.frequency, t.low_confidence),
                None => (config.frequency_by_magnitude(Money((min.0 + max.0) / 2)), true),
            };
            Some(WageObservation::build(&ad.id, None, (None, None), min, max, freq, low, Provenance::Metadata, config))
        }
        None => text_observation.clone(),
    };
    AdWage { ad_id: ad.id.clone(), observation, text_observation, diagnostics }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> WageConfig {
        WageConfig::default()
    }

    #[test]
    fn detection() {
        assert!(is_wage_candidate("Salary: $55,000 per year"));
        assert!(!is_wage_candidate("We have 401(k) matching"));
        assert!(!is_wage_candidate(""));
        assert!(is_wage_candidate("Earn 18 per hour"));
    }

    #[test]
    fn parse_examples() {
        let p = parse_wage("pay: $15.50 - $18.00 per hour", &cfg()).unwrap();
        assert_eq!((p.min.value, p.max.value), (Money(1550), Money(1800)));
        assert_eq!((p.min.text.as_str(), p.max.text.as_str()), ("$15.50", "$18.00"));
        assert_eq!(p.frequency, Frequency::Hourly);
        assert_eq!(p.kind, PointOrRange::Range);

        let p = parse_wage("$60k/yr", &cfg()).unwrap();
        assert_eq!(p.min.value, Money(6_000_000));
        assert_eq!((p.kind, p.frequency), (PointOrRange::Point, Frequency::Annually));

        assert!(parse_wage("call 555-1200 for pay details", &cfg()).is_err());
        assert!(parse_wage("$20 or $25 depending", &cfg()).is_err());
        assert!(parse_wage("$25 - $20 per hour", &cfg()).is_err());
    }

    #[test]
    fn range_syntaxes() {
        let p = parse_wage("between $40,000 and $50,000 annually", &cfg()).unwrap();
        assert_eq!((p.min.value, p.max.value), (Money(4_000_000), Money(5_000_000)));
        let p = parse_wage("$50-60k", &cfg()).unwrap();
        assert_eq!((p.min.value, p.max.value), (Money(5_000_000), Money(6_000_000)));
        let p = parse_wage("18 to 22 an hour", &cfg()).unwrap();
        assert_eq!((p.min.text.as_str(), p.frequency), ("18", Frequency::Hourly));
    }

    #[test]
    fn frequency_classes() {
        assert_eq!(parse_wage("$18/hr", &cfg()).unwrap().frequency, Frequency::Hourly);
        assert_eq!(parse_wage("$4,200 monthly", &cfg()).unwrap().frequency, Frequency::Monthly);
        let p = parse_wage("$52,000", &cfg()).unwrap();
        assert_eq!(p.frequency, Frequency::Annually);
        assert!(p.low_confidence);
    }

    #[test]
    fn annualization_examples() {
        let c = cfg();
        assert_eq!(annualize(Money(5_200_000), Money(5_200_000), Frequency::Annually, &c), Money(5_200_000));
        assert_eq!(annualize(Money(1550), Money(1800), Frequency::Hourly, &c), Money(3_484_000));
        let p = parse_wage("$2 per hour", &c).unwrap();
        let obs = WageObservation::from_parsed("a", 0, &p, &c);
        assert_eq!(obs.annualized, Money(416_000));
        assert!(obs.outlier);
    }

    #[test]
    fn money_display() {
        assert_eq!(Money(3_484_000).to_string(), "$34,840");
        assert_eq!(Money(1550).to_string(), "$15.50");
        assert_eq!(Money(5).to_string(), "$0.05");
        assert_eq!(parse_amount("$1,234.56"), Some(Money(123_456)));
        assert_eq!(parse_amount("60k"), Some(Money(6_000_000)));
        assert_eq!(parse_amount("abc"), None);
    }

    #[test]
    fn override_replaces_grammar() {
        let o = WageOverride {
            ad_id: "a".into(),
            sentence_idx: 0,
            min_span: Some("$20".into()),
            max_span: Some("$30".into()),
            freq: Some("hourly".into()),
        };
        let obs = from_override(&o, &cfg()).unwrap();
        assert_eq!(obs.provenance, Provenance::Override);
        assert_eq!(obs.annualized, Money(5_200_000));
    }
}
