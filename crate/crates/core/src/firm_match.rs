//! Firm-name standardization and Levenshtein-ratio linkage to an
//! establishment index, searched zip first, then state, then nationally.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ACCEPT: f64 = 0.8;

const NUMBER_WORDS: &[(&str, &str)] = &[
    ("zero", "0"),
    ("one", "1"),
    ("two", "2"),
    ("three", "3"),
    ("four", "4"),
    ("five", "5"),
    ("six", "6"),
    ("seven", "7"),
    ("eight", "8"),
    ("nine", "9"),
    ("ten", "10"),
    ("eleven", "11"),
    ("twelve", "12"),
    ("thirteen", "13"),
    ("fourteen", "14"),
    ("fifteen", "15"),
    ("sixteen", "16"),
    ("seventeen", "17"),
    ("eighteen", "18"),
    ("nineteen", "19"),
    ("twenty", "20"),
    ("thirty", "30"),
    ("forty", "40"),
    ("fifty", "50"),
    ("sixty", "60"),
    ("seventy", "70"),
    ("eighty", "80"),
    ("ninety", "90"),
];

fn canonical_token(tok: &str) -> &str {
    match tok {
        "incorporated" => "inc",
        "corporation" => "corp",
        "company" => "co",
        "limited" => "ltd",
        _ => NUMBER_WORDS.iter().find(|(w, _)| *w == tok).map_or(tok, |(_, d)| d),
    }
}

/// Canonical firm name used for linkage. Idempotent.
pub fn standardize(name: &str) -> String {
    let mut cleaned = String::with_capacity(name.len());
    for c in name.chars() {
        match c {
            '\'' | '’' | '.' => {}
            '&' => cleaned.push_str(" and "),
            c if c.is_alphanumeric() => cleaned.extend(c.to_lowercase()),
            _ => cleaned.push(' '),
        }
    }
    let toks: Vec<&str> = cleaned.split_whitespace().map(canonical_token).collect();
    let mut out: Vec<&str> = Vec::with_capacity(toks.len());
    let mut i = 0;
    while i < toks.len() {
        if toks[i] == "ltd" && toks.get(i + 1) == Some(&"liability") && toks.get(i + 2) == Some(&"co") {
            out.push("llc");
            i += 3;
        } else {
            out.push(toks[i]);
            i += 1;
        }
    }
    out.join(" ")
}

/// Edit distance over chars with unit costs.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - d / max(len)`; two empty strings score 1.
pub fn lev_ratio(a: &str, b: &str) -> f64 {
    let max = a.chars().count().max(b.chars().count());
    if max == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / max as f64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstablishmentRecord {
    pub est_id: String,
    pub name_raw: String,
    pub name_std: String,
    pub zip: String,
    pub state: String,
    pub naics: String,
    pub sic: Option<String>,
}

#[derive(Debug, Deserialize)]
struct EstablishmentRow {
    est_id: String,
    name: String,
    #[serde(default)]
    zip: String,
    #[serde(default)]
    state: String,
    naics: String,
    #[serde(default)]
    sic: Option<String>,
}

impl EstablishmentRecord {
    pub fn new(est_id: &str, name: &str, zip: &str, state: &str, naics: &str) -> Result<Self> {
        let naics = naics.trim();
        if !(2..=6).contains(&naics.len()) || !naics.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidEntry(format!("establishment {est_id}: bad NAICS `{naics}`")));
        }
        Ok(EstablishmentRecord {
            est_id: est_id.trim().into(),
            name_raw: name.into(),
            name_std: standardize(name),
            zip: zip.trim().into(),
            state: state.trim().to_ascii_uppercase(),
            naics: naics.into(),
            sic: None,
        })
    }
}

fn first_key(name_std: &str) -> Option<char> {
    name_std.chars().find(|c| c.is_alphanumeric())
}

/// Immutable establishment index with zip, state and first-character buckets.
#[derive(Debug, Clone, Default)]
pub struct EstablishmentIndex {
    records: Vec<EstablishmentRecord>,
    by_zip: HashMap<String, Vec<usize>>,
    by_state: HashMap<String, Vec<usize>>,
    by_first: HashMap<char, Vec<usize>>,
}

impl EstablishmentIndex {
    pub fn new(mut records: Vec<EstablishmentRecord>) -> Result<Self> {
        records.sort_by(|a, b| a.est_id.cmp(&b.est_id));
        let dups: Vec<String> =
            records.windows(2).filter(|w| w[0].est_id == w[1].est_id).map(|w| w[0].est_id.clone()).collect();
        if !dups.is_empty() {
            return Err(Error::DuplicateIds(dups));
        }
        let mut idx = EstablishmentIndex { records, ..Default::default() };
        for (i, r) in idx.records.iter().enumerate() {
            if !r.zip.is_empty() {
                idx.by_zip.entry(r.zip.clone()).or_default().push(i);
            }
            if !r.state.is_empty() {
                idx.by_state.entry(r.state.clone()).or_default().push(i);
            }
            if let Some(c) = first_key(&r.name_std) {
                idx.by_first.entry(c).or_default().push(i);
            }
        }
        Ok(idx)
    }

    /// CSV with columns est_id, name, zip, state, naics and optional sic.
    pub fn read<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut recs = Vec::new();
        for row in csv::Reader::from_reader(reader).deserialize::<EstablishmentRow>() {
            let row = row.map_err(|e| Error::csv("establishment index", e))?;
            let mut r = EstablishmentRecord::new(&row.est_id, &row.name, &row.zip, &row.state, &row.naics)?;
            r.sic = row.sic.filter(|s| !s.trim().is_empty());
            recs.push(r);
        }
        Self::new(recs)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(f)
    }

    pub fn records(&self) -> &[EstablishmentRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Best (score, record index) in a bucket. Records are sorted by id, so
    /// the first maximum is the smallest id.
    fn best_in(&self, name_std: &str, bucket: Option<&Vec<usize>>) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for &i in bucket? {
            let s = lev_ratio(name_std, &self.records[i].name_std);
            if best.is_none_or(|(b, _)| s > b) {
                best = Some((s, i));
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Zip,
    State,
    National,
    None,
}

/// Best score seen at one tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TierBest {
    pub tier: Tier,
    pub est_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmMatchResult {
    pub ad_id: String,
    pub extracted_name: String,
    pub name_std: String,
    pub est_id: Option<String>,
    pub score: f64,
    pub tier: Tier,
    pub naics: Option<String>,
    /// Best record overall, kept even when below the threshold.
    pub candidate_est_id: Option<String>,
    pub tier_bests: Vec<TierBest>,
}

/// Search zip, then state, then records sharing the first character; stop at
/// the first tier whose best score reaches `accept`.
pub fn cascade_match(
    ad_id: &str,
    extracted_name: &str,
    zip: Option<&str>,
    state: Option<&str>,
    index: &EstablishmentIndex,
    accept: f64,
) -> FirmMatchResult {
    let name_std = standardize(extracted_name);
    let mut result = FirmMatchResult {
        ad_id: ad_id.into(),
        extracted_name: extracted_name.into(),
        name_std: name_std.clone(),
        est_id: None,
        score: 0.0,
        tier: Tier::None,
        naics: None,
        candidate_est_id: None,
        tier_bests: Vec::new(),
    };
    if name_std.is_empty() {
        return result;
    }
    let state = state.map(str::to_ascii_uppercase);
    let tiers = [
        (Tier::Zip, zip.and_then(|z| index.by_zip.get(z))),
        (Tier::State, state.as_deref().and_then(|s| index.by_state.get(s))),
        (Tier::National, first_key(&name_std).and_then(|c| index.by_first.get(&c))),
    ];
    let mut overall: Option<(f64, usize)> = None;
    for (tier, bucket) in tiers {
        let Some((score, i)) = index.best_in(&name_std, bucket) else { continue };
        let rec = &index.records[i];
        result.tier_bests.push(TierBest { tier, est_id: rec.est_id.clone(), score });
        let better = match overall {
            None => true,
            Some((s, j)) => score > s || (score == s && rec.est_id < index.records[j].est_id),
        };
        if better {
            overall = Some((score, i));
        }
        if score >= accept {
            result.tier = tier;
            result.score = score;
            result.est_id = Some(rec.est_id.clone());
            result.naics = Some(rec.naics.clone());
            result.candidate_est_id = Some(rec.est_id.clone());
            return result;
        }
    }
    if let Some((score, i)) = overall {
        result.score = score;
        result.candidate_est_id = Some(index.records[i].est_id.clone());
    }
    result
}
