//! Monthly active jobs and grouped statistics over extracted features.
//!
//! An ad is active in every month from its start month through its compile
//! month. Statistics are computed over ad-months: a feature of an ad active
//! for three months counts in three month rows.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::JobAdRecord;
use crate::error::{Error, Result};
use crate::month::YearMonth;

pub const DEFAULT_FALLBACK_OFFSET: i64 = 2;

/// Acquisition months with bulk-load artifacts.
pub fn default_anomalous_months() -> BTreeSet<YearMonth> {
    [(2015, 1), (2016, 1), (2017, 1)].into_iter().map(|(y, m)| YearMonth::new(y, m).expect("valid month")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSpan {
    pub ad_id: String,
    pub start: YearMonth,
    pub end: YearMonth,
    /// Start was derived from the compile month rather than the acquisition month.
    pub adjusted: bool,
}

impl ActiveSpan {
    pub fn len(&self) -> u64 {
        self.start.span_len(self.end)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, m: YearMonth) -> bool {
        self.start <= m && m <= self.end
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MonthlyActiveIndex {
    spans: BTreeMap<String, ActiveSpan>,
}

/// Build the active-month index. The start is the acquisition month unless it
/// is missing or anomalous, in which case it is `fallback_offset` months
/// before the compile month.
pub fn build_maj(ads: &[JobAdRecord], anomalous: &BTreeSet<YearMonth>, fallback_offset: i64) -> MonthlyActiveIndex {
    let spans = ads
        .iter()
        .map(|ad| {
            let end = ad.date_compiled;
            let (start, adjusted) = match ad.date_acquired {
                Some(a) if !anomalous.contains(&a) && a <= end => (a, false),
                _ => (end.add_months(-fallback_offset.max(0)), true),
            };
            (ad.id.clone(), ActiveSpan { ad_id: ad.id.clone(), start, end, adjusted })
        })
        .collect();
    MonthlyActiveIndex { spans }
}

impl MonthlyActiveIndex {
    pub fn span(&self, ad_id: &str) -> Option<&ActiveSpan> {
        self.spans.get(ad_id)
    }

    pub fn spans(&self) -> impl Iterator<Item = &ActiveSpan> {
        self.spans.values()
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Month → active ad ids, ids in ascending order.
    pub fn by_month(&self) -> BTreeMap<YearMonth, Vec<&str>> {
        let mut out: BTreeMap<YearMonth, Vec<&str>> = BTreeMap::new();
        for s in self.spans.values() {
            for m in s.start.through(s.end) {
                out.entry(m).or_default().push(&s.ad_id);
            }
        }
        out
    }

    /// Active-job counts per month.
    pub fn counts(&self) -> BTreeMap<YearMonth, u64> {
        let mut out = BTreeMap::new();
        for s in self.spans.values() {
            for m in s.start.through(s.end) {
                *out.entry(m).or_insert(0) += 1;
            }
        }
        out
    }
}

/// One extracted value attached to an ad.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub ad_id: String,
    pub metric: String,
    pub code: Option<String>,
    pub value: Option<f64>,
    /// Outlier or otherwise suspect; excluded unless requested.
    #[serde(default)]
    pub flagged: bool,
}

/// Grouping attributes of an ad.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdAttributes {
    pub soc: Option<String>,
    pub naics: Option<String>,
    pub state: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dim {
    Month,
    Soc2,
    Soc4,
    Soc6,
    Naics2,
    Naics4,
    Naics6,
    State,
}

impl Dim {
    pub fn name(self) -> &'static str {
        match self {
            Dim::Month => "month",
            Dim::Soc2 => "soc2",
            Dim::Soc4 => "soc4",
            Dim::Soc6 => "soc6",
            Dim::Naics2 => "naics2",
            Dim::Naics4 => "naics4",
            Dim::Naics6 => "naics6",
            Dim::State => "state",
        }
    }

    fn value(self, month: YearMonth, attrs: Option<&AdAttributes>) -> String {
        let prefix = |code: Option<&String>, n: usize| -> String {
            let digits: String = code.map(|c| c.chars().filter(char::is_ascii_digit).collect()).unwrap_or_default();
            if digits.len() >= n {
                digits[..n].to_string()
            } else {
                NA.to_string()
            }
        };
        match self {
            Dim::Month => month.to_string(),
            Dim::Soc2 => prefix(attrs.and_then(|a| a.soc.as_ref()), 2),
            Dim::Soc4 => prefix(attrs.and_then(|a| a.soc.as_ref()), 4),
            Dim::Soc6 => prefix(attrs.and_then(|a| a.soc.as_ref()), 6),
            Dim::Naics2 => prefix(attrs.and_then(|a| a.naics.as_ref()), 2),
            Dim::Naics4 => prefix(attrs.and_then(|a| a.naics.as_ref()), 4),
            Dim::Naics6 => prefix(attrs.and_then(|a| a.naics.as_ref()), 6),
            Dim::State => attrs.and_then(|a| a.state.clone()).unwrap_or_else(|| NA.to_string()),
        }
    }
}

impl std::str::FromStr for Dim {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "month" => Dim::Month,
            "soc2" => Dim::Soc2,
            "soc4" => Dim::Soc4,
            "soc6" => Dim::Soc6,
            "naics2" => Dim::Naics2,
            "naics4" => Dim::Naics4,
            "naics6" => Dim::Naics6,
            "state" => Dim::State,
            other => return Err(Error::InvalidParameter(format!("unknown group dimension `{other}`"))),
        })
    }
}

pub const NA: &str = "NA";
pub const ACTIVE_JOBS: &str = "active_jobs";
pub const PERCENTILES: [f64; 5] = [10.0, 25.0, 50.0, 75.0, 90.0];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub dims: Vec<Dim>,
    #[serde(default)]
    pub include_flagged: bool,
}

impl GroupSpec {
    pub fn new(dims: Vec<Dim>) -> Self {
        GroupSpec { dims, include_flagged: false }
    }

    fn key(&self, month: YearMonth, attrs: Option<&AdAttributes>) -> Vec<String> {
        self.dims.iter().map(|d| d.value(month, attrs)).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Acc {
    count: u64,
    /// Distinct (ad, month) pairs, so shards may split an ad's features.
    members: BTreeSet<(String, YearMonth)>,
    values: Vec<f64>,
}

type CellKey = (Vec<String>, String, Option<String>);

/// Partial aggregate over any shard of the feature stream.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Partial {
    cells: BTreeMap<CellKey, Acc>,
    pub unknown_ads: u64,
    pub excluded_flagged: u64,
}

impl Partial {
    pub fn merge(mut self, other: Partial) -> Partial {
        for (k, acc) in other.cells {
            let e = self.cells.entry(k).or_default();
            e.count += acc.count;
            e.members.extend(acc.members);
            e.values.extend(acc.values);
        }
        self.unknown_ads += other.unknown_ads;
        self.excluded_flagged += other.excluded_flagged;
        self
    }
}

pub fn aggregate_partial(
    features: &[FeatureRecord],
    index: &MonthlyActiveIndex,
    attrs: &HashMap<String, AdAttributes>,
    spec: &GroupSpec,
) -> Partial {
    let mut partial = Partial::default();
    let mut by_ad: BTreeMap<&str, Vec<&FeatureRecord>> = BTreeMap::new();
    for f in features {
        if f.flagged && !spec.include_flagged {
            partial.excluded_flagged += 1;
            continue;
        }
        by_ad.entry(&f.ad_id).or_default().push(f);
    }
    for (ad_id, feats) in by_ad {
        let Some(span) = index.span(ad_id) else {
            partial.unknown_ads += 1;
            continue;
        };
        let a = attrs.get(ad_id);
        for m in span.start.through(span.end) {
            let key = spec.key(m, a);
            for f in &feats {
                let acc = partial.cells.entry((key.clone(), f.metric.clone(), f.code.clone())).or_default();
                acc.count += 1;
                if let Some(v) = f.value {
                    acc.values.push(v);
                }
                acc.members.insert((ad_id.to_string(), m));
            }
        }
    }
    partial
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub key: Vec<String>,
    pub metric: String,
    pub code: Option<String>,
    pub count: u64,
    /// Distinct ad-months with this feature.
    pub ads: u64,
    /// `ads` over active jobs in the group.
    pub share: Option<f64>,
    pub mean: Option<f64>,
    pub percentiles: Option<[f64; 5]>,
}

fn active_by_group(
    index: &MonthlyActiveIndex,
    attrs: &HashMap<String, AdAttributes>,
    spec: &GroupSpec,
) -> BTreeMap<Vec<String>, u64> {
    let mut out = BTreeMap::new();
    for s in index.spans() {
        let a = attrs.get(&s.ad_id);
        for m in s.start.through(s.end) {
            *out.entry(spec.key(m, a)).or_insert(0) += 1;
        }
    }
    out
}

/// Turn merged partials into rows ordered by (key, metric, code). Each group
/// also gets an `active_jobs` row.
pub fn finalize(
    partial: Partial,
    index: &MonthlyActiveIndex,
    attrs: &HashMap<String, AdAttributes>,
    spec: &GroupSpec,
) -> Vec<AggregateRow> {
    let active = active_by_group(index, attrs, spec);
    let mut rows = Vec::with_capacity(partial.cells.len() + active.len());
    for (key, n) in &active {
        rows.push(AggregateRow {
            key: key.clone(),
            metric: ACTIVE_JOBS.into(),
            code: None,
            count: *n,
            ads: *n,
            share: Some(1.0),
            mean: None,
            percentiles: None,
        });
    }
    for ((key, metric, code), mut acc) in partial.cells {
        let denom = active.get(&key).copied().unwrap_or(0);
        let (mean, pcts) = if acc.values.is_empty() {
            (None, None)
        } else {
            acc.values.sort_by(f64::total_cmp);
            let mean = acc.values.iter().sum::<f64>() / acc.values.len() as f64;
            let p = percentiles_sorted(&acc.values, &PERCENTILES);
            (Some(mean), Some([p[0], p[1], p[2], p[3], p[4]]))
        };
        rows.push(AggregateRow {
            key,
            metric,
            code,
            count: acc.count,
            ads: acc.members.len() as u64,
            share: (denom > 0).then(|| acc.members.len() as f64 / denom as f64),
            mean,
            percentiles: pcts,
        });
    }
    rows.sort_by(|a, b| (&a.key, &a.metric, &a.code).cmp(&(&b.key, &b.metric, &b.code)));
    rows
}

/// Single-shard convenience wrapper.
pub fn aggregate(
    features: &[FeatureRecord],
    index: &MonthlyActiveIndex,
    attrs: &HashMap<String, AdAttributes>,
    spec: &GroupSpec,
) -> (Vec<AggregateRow>, u64) {
    let partial = aggregate_partial(features, index, attrs, spec);
    let unknown = partial.unknown_ads;
    if features.is_empty() {
        return (Vec::new(), unknown);
    }
    (finalize(partial, index, attrs, spec), unknown)
}

/// The `k` highest-count codes per (group key, metric); ties by code.
pub fn top_k(rows: &[AggregateRow], k: usize) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(&Vec<String>, &str), Vec<&AggregateRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.code.is_some()) {
        groups.entry((&r.key, &r.metric)).or_default().push(r);
    }
    let mut out = Vec::new();
    for (_, mut rs) in groups {
        rs.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.code.cmp(&b.code)));
        out.extend(rs.into_iter().take(k).cloned());
    }
    out
}

/// Nearest-rank percentile of already-sorted values: rank `ceil(p/100 * n)`, at least 1.
pub fn percentiles_sorted(sorted: &[f64], ps: &[f64]) -> Vec<f64> {
    let n = sorted.len();
    ps.iter()
        .map(|&p| {
            let rank = ((p / 100.0) * n as f64 - 1e-9).ceil().max(1.0) as usize;
            sorted[rank.min(n) - 1]
        })
        .collect()
}

pub fn percentiles(values: &[f64], ps: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Empty("percentile input"));
    }
    if let Some(p) = ps.iter().find(|p| !(0.0..=100.0).contains(*p)) {
        return Err(Error::InvalidParameter(format!("percentile {p} outside [0, 100]")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(percentiles_sorted(&v, ps))
}
