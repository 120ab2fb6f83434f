//! Validation arithmetic: threshold simulation over binned accuracy tables,
//! inter-rater statistics, stratified audit sampling and correlation.

use std::collections::BTreeMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EDGE_EPS: f64 = 1e-9;

/// Score bins with their frequency share and one or more named accuracy rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinTable {
    pub labels: Vec<String>,
    /// Inclusive lower edge of each bin.
    pub lower: Vec<f64>,
    pub freq: Vec<f64>,
    pub accuracy: BTreeMap<String, Vec<f64>>,
}

/// Lower edge of a label such as `0.85`, `0.80-0.84` or `0.96-1`.
fn lower_edge(label: &str) -> Option<f64> {
    let first = label.split(['-', '–']).next()?.trim();
    first.parse().ok()
}

impl BinTable {
    pub fn new(labels: Vec<String>, freq: Vec<f64>, accuracy: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        let mut lower = Vec::with_capacity(labels.len());
        for l in &labels {
            lower.push(lower_edge(l).ok_or_else(|| Error::InvalidEntry(format!("bad bin label `{l}`")))?);
        }
        let table = BinTable { labels, lower, freq, accuracy };
        table.check()?;
        Ok(table)
    }

    fn check(&self) -> Result<()> {
        let n = self.labels.len();
        if n == 0 {
            return Err(Error::Empty("bin table"));
        }
        if self.freq.len() != n || self.accuracy.values().any(|a| a.len() != n) {
            return Err(Error::InvalidEntry("bin table rows differ in length".into()));
        }
        if self.lower.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidEntry("bins are not in ascending order".into()));
        }
        let total: f64 = self.freq.iter().sum();
        if (total - 1.0).abs() > 1e-6 || self.freq.iter().any(|f| *f < 0.0) {
            return Err(Error::InvalidEntry(format!("bin frequencies sum to {total}, expected 1")));
        }
        for (name, acc) in &self.accuracy {
            if acc.iter().any(|a| !(0.0..=1.0).contains(a)) {
                return Err(Error::InvalidEntry(format!("accuracy row `{name}` outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// CSV: `bin_label,freq,<accuracy name>...`, one row per bin.
    pub fn read<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let headers: Vec<String> =
            rdr.headers().map_err(|e| Error::csv("bin table", e))?.iter().map(|h| h.trim().to_string()).collect();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn { column: name.into(), context: "bin table".into() })
        };
        let (li, fi) = (col("bin_label")?, col("freq")?);
        let acc_cols: Vec<(usize, String)> =
            headers.iter().enumerate().filter(|(i, _)| *i != li && *i != fi).map(|(i, h)| (i, h.clone())).collect();
        if acc_cols.is_empty() {
            return Err(Error::MissingColumn { column: "accuracy".into(), context: "bin table".into() });
        }
        let mut labels = Vec::new();
        let mut freq = Vec::new();
        let mut accuracy: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::csv("bin table", e))?;
            let num = |i: usize| -> Result<f64> {
                let s = rec.get(i).unwrap_or("").trim();
                s.parse().map_err(|_| Error::InvalidEntry(format!("`{s}` is not a number in bin table")))
            };
            labels.push(rec.get(li).unwrap_or("").trim().to_string());
            freq.push(num(fi)?);
            for (i, name) in &acc_cols {
                accuracy.entry(name.clone()).or_default().push(num(*i)?);
            }
        }
        Self::new(labels, freq, accuracy)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(f)
    }

    pub fn accuracy_row(&self, name: &str) -> Result<&[f64]> {
        self.accuracy
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingColumn { column: name.into(), context: "bin table".into() })
    }

    /// Index of the first retained bin for threshold `t`. Thresholds at or
    /// below the lowest edge keep every bin; others must sit on an edge.
    pub fn cut(&self, t: f64) -> Result<usize> {
        if t <= self.lower[0] + EDGE_EPS {
            return Ok(0);
        }
        if let Some(i) = self.lower.iter().position(|e| (e - t).abs() <= EDGE_EPS) {
            return Ok(i);
        }
        Err(Error::OffGrid {
            threshold: t,
            below: self.lower.iter().rev().find(|e| **e < t).copied(),
            above: self.lower.iter().find(|e| **e > t).copied(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionEstimate {
    pub threshold: f64,
    pub tp: f64,
    pub fp: f64,
    pub tn: f64,
    pub fn_: f64,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationInputs {
    pub n_flagged: f64,
    pub n_unflagged: f64,
    pub stage1_fnr: f64,
}

fn ratio(a: f64, b: f64) -> Option<f64> {
    (b > 0.0).then(|| a / b)
}

/// Expected confusion counts when keeping bins at or above `threshold`.
///
/// Retained bins contribute true and false positives by their accuracy.
/// Discarded correct matches plus stage-1 misses among unflagged sentences are
/// false negatives. True negatives make up the rest of the population.
pub fn simulate_confusion(
    bins: &BinTable,
    accuracy: &[f64],
    inputs: SimulationInputs,
    threshold: f64,
) -> Result<ConfusionEstimate> {
    if accuracy.len() != bins.freq.len() {
        return Err(Error::DimensionMismatch { left: bins.freq.len(), right: accuracy.len() });
    }
    if !(0.0..=1.0).contains(&inputs.stage1_fnr) {
        return Err(Error::InvalidParameter(format!("stage-1 FNR {} outside [0, 1]", inputs.stage1_fnr)));
    }
    if inputs.n_flagged < 0.0 || inputs.n_unflagged < 0.0 {
        return Err(Error::InvalidParameter("population counts must be non-negative".into()));
    }
    let cut = bins.cut(threshold)?;
    let (mut kept_ok, mut kept_bad, mut dropped_ok) = (0.0, 0.0, 0.0);
    for (i, (f, a)) in bins.freq.iter().zip(accuracy).enumerate() {
        if i >= cut {
            kept_ok += f * a;
            kept_bad += f * (1.0 - a);
        } else {
            dropped_ok += f * a;
        }
    }
    let tp = inputs.n_flagged * kept_ok;
    let fp = inputs.n_flagged * kept_bad;
    let fn_ = inputs.n_flagged * dropped_ok + inputs.n_unflagged * inputs.stage1_fnr;
    let tn = (inputs.n_flagged + inputs.n_unflagged - tp - fp - fn_).max(0.0);
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(ConfusionEstimate { threshold, tp, fp, tn, fn_, precision, recall, f1 })
}

/// The estimate at every bin edge.
pub fn simulate_curve(bins: &BinTable, accuracy: &[f64], inputs: SimulationInputs) -> Result<Vec<ConfusionEstimate>> {
    bins.lower.iter().map(|&t| simulate_confusion(bins, accuracy, inputs, t)).collect()
}

fn check_square(table: &[Vec<u64>]) -> Result<u64> {
    let k = table.len();
    if k == 0 || table.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidParameter("rater table must be square and non-empty".into()));
    }
    let total: u64 = table.iter().flatten().sum();
    if total == 0 {
        return Err(Error::Degenerate("rater table is empty".into()));
    }
    Ok(total)
}

/// Share of items on the diagonal.
pub fn agreement(table: &[Vec<u64>]) -> Result<f64> {
    let total = check_square(table)?;
    let diag: u64 = (0..table.len()).map(|i| table[i][i]).sum();
    Ok(diag as f64 / total as f64)
}

/// Cohen's kappa for two raters.
pub fn kappa(table: &[Vec<u64>]) -> Result<f64> {
    let total = check_square(table)? as f64;
    let k = table.len();
    let p_o = agreement(table)?;
    let p_e: f64 = (0..k)
        .map(|i| {
            let row: u64 = table[i].iter().sum();
            let col: u64 = table.iter().map(|r| r[i]).sum();
            (row as f64 / total) * (col as f64 / total)
        })
        .sum();
    if (1.0 - p_e).abs() < 1e-12 {
        return if (p_o - 1.0).abs() < 1e-12 {
            Ok(1.0)
        } else {
            Err(Error::Degenerate("expected agreement is 1".into()))
        };
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Contingency table of two raters' category indices.
pub fn rater_table(a: &[usize], b: &[usize], categories: usize) -> Result<Vec<Vec<u64>>> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let mut t = vec![vec![0u64; categories]; categories];
    for (&x, &y) in a.iter().zip(b) {
        if x >= categories || y >= categories {
            return Err(Error::InvalidParameter(format!("category index out of range: {x}, {y}")));
        }
        t[x][y] += 1;
    }
    Ok(t)
}

/// (strict, lenient): shares of items where the reference equals every
/// rater, and at least one rater.
pub fn strict_lenient<T: PartialEq>(reference: &[T], raters: &[Vec<T>]) -> Result<(f64, f64)> {
    if reference.is_empty() {
        return Err(Error::Empty("rated items"));
    }
    if raters.is_empty() || raters.iter().any(|r| r.len() != reference.len()) {
        return Err(Error::InvalidParameter("every rater must label every item".into()));
    }
    let n = reference.len();
    let (mut strict, mut lenient) = (0usize, 0usize);
    for (i, r) in reference.iter().enumerate() {
        let hits = raters.iter().filter(|rater| rater[i] == *r).count();
        strict += usize::from(hits == raters.len());
        lenient += usize::from(hits > 0);
    }
    Ok((strict as f64 / n as f64, lenient as f64 / n as f64))
}

/// Indices of a seeded sample of up to `per_bin_n` items per score bin.
/// `edges` has one more entry than there are bins; the last bin is closed.
/// Scores outside the edges are never sampled.
pub fn stratified_sample(scores: &[f64], edges: &[f64], per_bin_n: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if per_bin_n == 0 {
        return Err(Error::InvalidParameter("per_bin_n must be at least 1".into()));
    }
    if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("edges must be ascending with at least two entries".into()));
    }
    let nb = edges.len() - 1;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nb];
    for (i, &s) in scores.iter().enumerate() {
        if s < edges[0] || s > edges[nb] {
            continue;
        }
        let b = edges[1..].iter().position(|&e| s < e).unwrap_or(nb - 1);
        members[b].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(members
        .into_iter()
        .map(|m| {
            if m.len() <= per_bin_n {
                m
            } else {
                let mut picked: Vec<usize> =
                    rand::seq::index::sample(&mut rng, m.len(), per_bin_n).into_iter().map(|j| m[j]).collect();
                picked.sort_unstable();
                picked
            }
        })
        .collect())
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
