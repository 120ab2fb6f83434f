//! Embedding matrices in the JVEC binary format, exact cosine search and the
//! label-set augmentation bootstrap.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"JVEC";
pub const VERSION: u32 = 1;
const HEADER_LEN: u64 = 16;

/// Row-normalized embedding matrix with unique string ids.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    d: usize,
    data: Vec<f32>,
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl EmbeddingMatrix {
    /// Build from rows; each row is normalized to unit length.
    pub fn from_rows(d: usize, ids: Vec<String>, rows: Vec<Vec<f32>>) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::DimensionMismatch { left: ids.len(), right: rows.len() });
        }
        let mut data = Vec::with_capacity(rows.len() * d);
        for row in &rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch { left: d, right: row.len() });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(d, ids, data)
    }

    fn from_flat(d: usize, ids: Vec<String>, mut data: Vec<f32>) -> Result<Self> {
        let mut index = HashMap::with_capacity(ids.len());
        let mut dups = Vec::new();
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                dups.push(id.clone());
            }
        }
        if !dups.is_empty() {
            dups.sort();
            dups.dedup();
            return Err(Error::DuplicateIds(dups));
        }
        if d > 0 {
            for (row, id) in data.chunks_mut(d).zip(&ids) {
                let norm = row.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
                if !norm.is_finite() || norm == 0.0 {
                    return Err(Error::ZeroVector(id.clone()));
                }
                // Rows already unit length within f32 precision are kept bit-exact,
                // which makes decode(encode(m)) == m.
                if (norm - 1.0).abs() > 1e-6 {
                    row.iter_mut().for_each(|x| *x = (f64::from(*x) / norm) as f32);
                }
            }
        } else if !ids.is_empty() {
            return Err(Error::ZeroVector(ids[0].clone()));
        }
        Ok(EmbeddingMatrix { d, data, ids, index })
    }

    pub fn empty(d: usize) -> Self {
        EmbeddingMatrix { d, data: Vec::new(), ids: Vec::new(), index: HashMap::new() }
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.position(id).map(|i| self.row(i))
    }

    /// Stack two matrices of equal dimension. Ids must stay unique.
    pub fn concat(&self, other: &EmbeddingMatrix) -> Result<Self> {
        if self.n() > 0 && other.n() > 0 && self.d != other.d {
            return Err(Error::DimensionMismatch { left: self.d, right: other.d });
        }
        let d = if self.n() > 0 { self.d } else { other.d };
        let mut ids = self.ids.clone();
        ids.extend(other.ids.iter().cloned());
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self::from_flat(d, ids, data)
    }

    /// Keep only the rows whose ids are listed, in the given order.
    pub fn select(&self, ids: &[String]) -> Result<Self> {
        let mut data = Vec::with_capacity(ids.len() * self.d);
        for id in ids {
            let row = self.get(id).ok_or_else(|| Error::UnknownId(id.clone()))?;
            data.extend_from_slice(row);
        }
        Self::from_flat(self.d, ids.to_vec(), data)
    }
}

fn read_u32(buf: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(buf[at..at + 4].try_into().expect("4 bytes"))
}

/// Decode a JVEC byte stream.
pub fn decode(bytes: &[u8]) -> Result<EmbeddingMatrix> {
    let actual = bytes.len() as u64;
    if actual < HEADER_LEN {
        return Err(Error::Truncated { expected: HEADER_LEN, actual });
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Format(format!("bad magic {:?}", &bytes[..4])));
    }
    let version = read_u32(bytes, 4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let n = read_u32(bytes, 8) as u64;
    let d = read_u32(bytes, 12) as u64;
    let body = n
        .checked_mul(d)
        .and_then(|v| v.checked_mul(4))
        .and_then(|v| v.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format(format!("n·d overflow (n={n}, d={d})")))?;
    // Each id record needs at least its 2-byte length prefix.
    let minimum = body.saturating_add(n.saturating_mul(2));
    if actual < minimum {
        return Err(Error::Truncated { expected: minimum, actual });
    }
    let body = body as usize;
    let data: Vec<f32> = bytes[HEADER_LEN as usize..body]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();

    let mut pos = body;
    let mut ids = Vec::with_capacity(n as usize);
    let mut remaining_prefixes = n;
    for _ in 0..n {
        remaining_prefixes -= 1;
        if pos + 2 > bytes.len() {
            return Err(Error::Truncated { expected: (pos + 2) as u64 + remaining_prefixes * 2, actual });
        }
        let len = u16::from_le_bytes([bytes[pos], bytes[pos + 1]]) as usize;
        pos += 2;
        let end = pos + len;
        if end > bytes.len() {
            return Err(Error::Truncated { expected: end as u64 + remaining_prefixes * 2, actual });
        }
        let id = std::str::from_utf8(&bytes[pos..end])
            .map_err(|e| Error::Format(format!("id {} is not UTF-8: {e}", ids.len())))?;
        ids.push(id.to_string());
        pos = end;
    }
    if pos != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes", bytes.len() - pos)));
    }
    EmbeddingMatrix::from_flat(d as usize, ids, data)
}

/// Encode rows exactly as stored (no renormalization on write).
pub fn encode(matrix: &EmbeddingMatrix) -> Result<Vec<u8>> {
    encode_raw(matrix.d, &matrix.ids, &matrix.data)
}

/// Encode arbitrary rows; used by fixture writers.
pub fn encode_raw(d: usize, ids: &[String], data: &[f32]) -> Result<Vec<u8>> {
    if data.len() != ids.len() * d {
        return Err(Error::DimensionMismatch { left: ids.len() * d, right: data.len() });
    }
    let to_u32 =
        |v: usize, what: &str| u32::try_from(v).map_err(|_| Error::InvalidParameter(format!("{what} {v} exceeds u32")));
    let mut out = Vec::with_capacity(16 + data.len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&to_u32(ids.len(), "n")?.to_le_bytes());
    out.extend_from_slice(&to_u32(d, "d")?.to_le_bytes());
    for x in data {
        out.extend_from_slice(&x.to_le_bytes());
    }
    for id in ids {
        let len = u16::try_from(id.len())
            .map_err(|_| Error::InvalidParameter(format!("id longer than 65535 bytes: {id}")))?;
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(id.as_bytes());
    }
    Ok(out)
}

pub fn load_vectors(path: &Path) -> Result<EmbeddingMatrix> {
    let mut bytes = Vec::new();
    std::fs::File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

pub fn write_vectors(path: &Path, matrix: &EmbeddingMatrix) -> Result<()> {
    let bytes = encode(matrix)?;
    std::fs::File::create(path).and_then(|mut f| f.write_all(&bytes)).map_err(|e| Error::io(path, e))
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum()
}

/// Cosine similarity, computed in f64.
pub fn cosine(a: &[f32], b: &[f32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { left: a.len(), right: b.len() });
    }
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector("cosine operand".into()));
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// Cosine between two rows already known to be unit length.
pub(crate) fn unit_dot(a: &[f32], b: &[f32]) -> f64 {
    dot(a, b).clamp(-1.0, 1.0)
}

/// Exact top-k by cosine; ties broken by ascending id.
pub fn nearest(query: &[f32], matrix: &EmbeddingMatrix, k: usize) -> Result<Vec<(String, f64)>> {
    if matrix.is_empty() {
        return Err(Error::Empty("embedding matrix"));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if query.len() != matrix.d {
        return Err(Error::DimensionMismatch { left: query.len(), right: matrix.d });
    }
    let qn = dot(query, query).sqrt();
    if qn == 0.0 {
        return Err(Error::ZeroVector("query".into()));
    }
    let mut scored: Vec<(usize, f64)> = (0..matrix.n())
        // Adding 0.0 folds -0.0 into 0.0 so orthogonal rows tie on id.
        .map(|i| (i, (dot(query, matrix.row(i)) / qn).clamp(-1.0, 1.0) + 0.0))
        .collect();
    let ids = &matrix.ids;
    let cmp = |a: &(usize, f64), b: &(usize, f64)| b.1.total_cmp(&a.1).then_with(|| ids[a.0].cmp(&ids[b.0]));
    let k = k.min(scored.len());
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, cmp);
        scored.truncate(k);
    }
    scored.sort_by(cmp);
    Ok(scored.into_iter().map(|(i, s)| (ids[i].clone(), s)).collect())
}

/// A taxonomy code with its seed statement ids and any ids added by augmentation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSet {
    pub label_code: String,
    pub member_ids: Vec<String>,
    #[serde(default)]
    pub augmented_ids: Vec<String>,
}

impl LabeledSet {
    pub fn new(label_code: impl Into<String>, member_ids: Vec<String>) -> Self {
        LabeledSet { label_code: label_code.into(), member_ids, augmented_ids: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.member_ids.len() + self.augmented_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Seed members followed by augmented members.
    pub fn all_ids(&self) -> impl Iterator<Item = &String> {
        self.member_ids.iter().chain(&self.augmented_ids)
    }
}

/// Parse a sidecar JSON object `{label_code: [ids]}` into seed sets, ordered by code.
pub fn parse_sidecar(json: &str) -> Result<Vec<LabeledSet>> {
    let map: BTreeMap<String, Vec<String>> = serde_json::from_str(json).map_err(|e| Error::json("label sidecar", e))?;
    let mut out = Vec::with_capacity(map.len());
    for (code, ids) in map {
        if ids.is_empty() {
            return Err(Error::InvalidEntry(format!("label `{code}` has no members")));
        }
        out.push(LabeledSet::new(code, ids));
    }
    Ok(out)
}

pub fn load_sidecar(path: &Path) -> Result<Vec<LabeledSet>> {
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sidecar(&s)
}

/// Check every member id of every set resolves in `matrix`.
pub fn check_sets(sets: &[LabeledSet], matrix: &EmbeddingMatrix) -> Result<()> {
    for set in sets {
        if set.member_ids.is_empty() {
            return Err(Error::InvalidEntry(format!("label `{}` has no members", set.label_code)));
        }
        if let Some(id) = set.all_ids().find(|id| matrix.position(id).is_none()) {
            return Err(Error::UnknownId(id.clone()));
        }
    }
    Ok(())
}

/// Add each candidate to every set whose best seed-member similarity reaches
/// `threshold`. Similarity is taken against seed members only, so a second
/// pass over the same pool adds nothing.
pub fn augment(
    seed_sets: &[LabeledSet],
    seeds: &EmbeddingMatrix,
    candidates: &EmbeddingMatrix,
    threshold: f64,
) -> Result<Vec<LabeledSet>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!("threshold {threshold} outside (0, 1]")));
    }
    check_sets(
        &seed_sets.iter().map(|s| LabeledSet::new(s.label_code.clone(), s.member_ids.clone())).collect::<Vec<_>>(),
        seeds,
    )?;
    if !candidates.is_empty() && !seeds.is_empty() && candidates.d != seeds.d {
        return Err(Error::DimensionMismatch { left: seeds.d, right: candidates.d });
    }
    let mut out = Vec::with_capacity(seed_sets.len());
    for set in seed_sets {
        let rows: Vec<&[f32]> = set.member_ids.iter().map(|id| seeds.get(id).expect("checked above")).collect();
        let mut present: HashSet<&str> = set.all_ids().map(String::as_str).collect();
        let mut next = set.clone();
        for (ci, cid) in candidates.ids.iter().enumerate() {
            if present.contains(cid.as_str()) {
                continue;
            }
            let c = candidates.row(ci);
            let best = rows.iter().map(|r| unit_dot(r, c)).fold(f64::NEG_INFINITY, f64::max);
            if best >= threshold {
                present.insert(cid);
                next.augmented_ids.push(cid.clone());
            }
        }
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[(&str, &[f32])]) -> EmbeddingMatrix {
        let d = rows[0].1.len();
        EmbeddingMatrix::from_rows(
            d,
            rows.iter().map(|r| r.0.to_string()).collect(),
            rows.iter().map(|r| r.1.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine(&[1.0, 2.0], &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-6);
        assert!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap().abs() < 1e-6);
        assert!((cosine(&[1.0, 0.0], &[1.0, 1.0]).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
        assert!(matches!(cosine(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroVector(_))));
    }

    #[test]
    fn empty_file_keeps_dimension() {
        let bytes = encode_raw(7, &[], &[]).unwrap();
        let mat = decode(&bytes).unwrap();
        assert_eq!((mat.n(), mat.d()), (0, 7));
    }

    #[test]
    fn round_trip_and_renormalize() {
        let bytes = encode_raw(2, &["a".into(), "é".into()], &[3.0, 4.0, 0.0, 2.0]).unwrap();
        let mat = decode(&bytes).unwrap();
        assert_eq!(mat.ids(), &["a".to_string(), "é".to_string()]);
        assert!((mat.row(0)[0] - 0.6).abs() < 1e-6);
        assert_eq!(decode(&encode(&mat).unwrap()).unwrap(), mat);
    }

    #[test]
    fn truncation_reports_sizes() {
        let bytes = encode_raw(2, &["a".into()], &[1.0, 0.0]).unwrap();
        let cut = &bytes[..20];
        match decode(cut) {
            Err(Error::Truncated { expected, actual }) => {
                assert_eq!(actual, 20);
                assert_eq!(expected, 16 + 8 + 2);
            }
            other => panic!("{other:?}"),
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad), Err(Error::Format(_))));
        let mut v2 = bytes;
        v2[4] = 2;
        assert!(matches!(decode(&v2), Err(Error::Format(_))));
    }

    #[test]
    fn overflowing_header_is_fatal() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(MAGIC);
        bytes.extend_from_slice(&1u32.to_le_bytes());
        bytes.extend_from_slice(&u32::MAX.to_le_bytes());
        bytes.extend_from_slice(&u32::MAX.to_le_bytes());
        assert!(decode(&bytes).is_err());
    }

    #[test]
    fn zero_row_and_duplicates_rejected() {
        let z = encode_raw(2, &["a".into()], &[0.0, 0.0]).unwrap();
        assert!(matches!(decode(&z), Err(Error::ZeroVector(_))));
        let d = encode_raw(1, &["a".into(), "a".into()], &[1.0, 1.0]).unwrap();
        assert!(matches!(decode(&d), Err(Error::DuplicateIds(_))));
    }

    #[test]
    fn nearest_ties_by_id() {
        let mat = m(&[("b", &[1.0, 0.0]), ("a", &[1.0, 0.0]), ("c", &[0.0, 1.0])]);
        let got = nearest(&[2.0, 0.0], &mat, 3).unwrap();
        let ids: Vec<_> = got.iter().map(|g| g.0.as_str()).collect();
        assert_eq!(ids, vec!["a", "b", "c"]);
        assert!((got[0].1 - 1.0).abs() < 1e-9);
        assert!(matches!(nearest(&[1.0], &EmbeddingMatrix::empty(1), 1), Err(Error::Empty(_))));
    }

    #[test]
    fn augment_examples() {
        let seeds = m(&[("s1", &[1.0, 0.0, 0.0]), ("s2", &[0.0, 1.0, 0.0])]);
        let cands = m(&[("c1", &[1.0, 0.0, 0.0]), ("c2", &[0.0, 0.0, 1.0])]);
        let sets = vec![LabeledSet::new("A", vec!["s1".into()]), LabeledSet::new("B", vec!["s2".into()])];
        let out = augment(&sets, &seeds, &cands, 0.9).unwrap();
        assert_eq!(out[0].augmented_ids, vec!["c1".to_string()]);
        assert!(out[1].augmented_ids.is_empty());
        let again = augment(&out, &seeds, &cands, 0.9).unwrap();
        assert_eq!(again, out);
        assert!(augment(&sets, &seeds, &cands, 0.0).is_err());
    }

    #[test]
    fn sidecar_parses_in_code_order() {
        let sets = parse_sidecar(r#"{"B":["x"],"A":["y","z"]}"#).unwrap();
        assert_eq!(sets[0].label_code, "A");
        assert_eq!(sets[0].member_ids.len(), 2);
        assert!(parse_sidecar(r#"{"A":[]}"#).is_err());
    }
}
