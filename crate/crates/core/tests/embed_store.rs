mod oracles;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use adtext_core::embed_store::{self, EmbeddingMatrix, LabeledSet};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn data(p: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(p)
}

fn random_matrix(rng: &mut ChaCha8Rng) -> EmbeddingMatrix {
    let d = rng.gen_range(1..=8);
    let n = rng.gen_range(1..=40);
    let mut rows: Vec<Vec<f32>> = Vec::new();
    while rows.len() < n {
        // Small integer coordinates make exact ties common; duplicates make them certain.
        if !rows.is_empty() && rng.gen_bool(0.25) {
            let dup = rows[rng.gen_range(0..rows.len())].clone();
            rows.push(dup);
            continue;
        }
        let r: Vec<f32> = (0..d).map(|_| rng.gen_range(-2i32..=2) as f32).collect();
        if r.iter().any(|&x| x != 0.0) {
            rows.push(r);
        }
    }
    let mut ids: Vec<String> = (0..n).map(|i| format!("id{i:03}")).collect();
    ids.shuffle(rng);
    EmbeddingMatrix::from_rows(d, ids, rows).unwrap()
}

#[test]
fn nearest_matches_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe5);
    let mut tie_cases = 0;
    for case in 0..500 {
        let m = random_matrix(&mut rng);
        let q: Vec<f32> = loop {
            let q: Vec<f32> = (0..m.d()).map(|_| rng.gen_range(-3i32..=3) as f32).collect();
            if q.iter().any(|&x| x != 0.0) {
                break q;
            }
        };
        let k = rng.gen_range(1..=m.n() + 2);
        let got = embed_store::nearest(&q, &m, k).unwrap();
        let want = oracles::nearest(&q, &m, k);
        assert_eq!(got.len(), want.len(), "case {case}");
        for (i, (g, w)) in got.iter().zip(&want).enumerate() {
            assert!((g.1 - w.1).abs() < 1e-6, "case {case} rank {i}: {g:?} vs {w:?}");
            if g.0 != w.0 {
                // Differing ids are only acceptable across a floating-point tie.
                let gs = oracles::cos(&q, m.get(&g.0).unwrap());
                let ws = oracles::cos(&q, m.get(&w.0).unwrap());
                assert!((gs - ws).abs() < 1e-6, "case {case} rank {i}");
            }
        }
        if got.windows(2).any(|p| p[0].1 == p[1].1) {
            tie_cases += 1;
            for p in got.windows(2) {
                if p[0].1 == p[1].1 {
                    assert!(p[0].0 < p[1].0, "case {case}: tie not broken by id");
                }
            }
        }
    }
    assert!(tie_cases > 50, "only {tie_cases} cases exercised ties");
}

#[test]
fn cosine_identity_orthogonality_and_half_angle() {
    assert!((embed_store::cosine(&[1.0, 0.0], &[1.0, 1.0]).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let a: Vec<f32> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        assert!((embed_store::cosine(&a, &a).unwrap() - 1.0).abs() < 1e-6);
        // Gram-Schmidt against a gives an orthogonal vector.
        let b: Vec<f32> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ab: f64 = a.iter().zip(&b).map(|(x, y)| f64::from(*x) * f64::from(*y)).sum();
        let aa: f64 = a.iter().map(|x| f64::from(*x).powi(2)).sum();
        let o: Vec<f32> = a.iter().zip(&b).map(|(x, y)| (f64::from(*y) - ab / aa * f64::from(*x)) as f32).collect();
        assert!(embed_store::cosine(&a, &o).unwrap().abs() < 1e-6);
    }
}

#[test]
fn nearest_is_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let m = random_matrix(&mut rng);
        let q: Vec<f32> = (0..m.d()).map(|_| rng.gen_range(0.1..1.0)).collect();
        let scaled: Vec<f32> = q.iter().map(|x| x * 4.0).collect();
        let a = embed_store::nearest(&q, &m, 1).unwrap();
        let b = embed_store::nearest(&scaled, &m, 1).unwrap();
        assert!((a[0].1 - b[0].1).abs() < 1e-9);
    }
}

#[test]
fn python_written_fixture_decodes_with_unit_rows() {
    for name in ["skill_members", "task_members", "candidates", "reference_titles", "title_queries", "sentences"] {
        let path = data(&format!("embeddings/{name}.jvec"));
        let bytes = std::fs::read(&path).unwrap();
        let m = embed_store::decode(&bytes).unwrap();
        assert!(m.n() > 0, "{name}");
        for i in 0..m.n() {
            let norm: f64 = m.row(i).iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-4, "{name} row {i}");
        }
        let again = embed_store::decode(&embed_store::encode(&m).unwrap()).unwrap();
        assert_eq!(again, m, "{name}");
    }
}

#[test]
fn fixture_ids_follow_input_jsonl_order() {
    let m = embed_store::load_vectors(&data("embeddings/candidates.jvec")).unwrap();
    let text = std::fs::read_to_string(data("embeddings/candidates.jsonl")).unwrap();
    let ids: Vec<String> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(m.ids(), &ids[..]);
}

#[test]
fn truncated_and_malformed_files_are_rejected() {
    let m = EmbeddingMatrix::from_rows(2, vec!["a".into()], vec![vec![1.0, 0.0]]).unwrap();
    let bytes = embed_store::encode(&m).unwrap();
    assert!(embed_store::decode(&bytes[..bytes.len() - 1]).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(embed_store::decode(&bad).is_err());
    let dup = embed_store::encode_raw(1, &["a".into(), "a".into()], &[1.0, 1.0]).unwrap();
    assert!(embed_store::decode(&dup).is_err());
    assert!(EmbeddingMatrix::from_rows(2, vec!["z".into()], vec![vec![0.0, 0.0]]).is_err());
}

fn fixture_sets() -> (Vec<LabeledSet>, EmbeddingMatrix, EmbeddingMatrix) {
    let sets = embed_store::load_sidecar(&data("embeddings/skill_sets.json")).unwrap();
    let seeds = embed_store::load_vectors(&data("embeddings/skill_members.jvec")).unwrap();
    let cands = embed_store::load_vectors(&data("embeddings/candidates.jvec")).unwrap();
    (sets, seeds, cands)
}

#[test]
fn fixture_augmentation_matches_oracle() {
    let (sets, seeds, cands) = fixture_sets();
    assert_eq!(sets.len(), 3);
    assert_eq!(cands.n(), 20);
    let got = embed_store::augment(&sets, &seeds, &cands, 0.9).unwrap();
    let plain: Vec<(String, Vec<String>)> = sets.iter().map(|s| (s.label_code.clone(), s.member_ids.clone())).collect();
    let want = oracles::augment(&plain, &seeds, &cands, 0.9);
    let got: BTreeMap<String, BTreeSet<String>> = got
        .into_iter()
        .map(|s| {
            assert_eq!(s.member_ids, sets.iter().find(|o| o.label_code == s.label_code).unwrap().member_ids);
            (s.label_code, s.augmented_ids.into_iter().collect())
        })
        .collect();
    assert_eq!(got, want);
    assert!(got.values().any(|v| !v.is_empty()), "fixture should add at least one candidate");
}

#[test]
fn augmentation_is_idempotent() {
    let (sets, seeds, cands) = fixture_sets();
    let once = embed_store::augment(&sets, &seeds, &cands, 0.9).unwrap();
    let twice = embed_store::augment(&once, &seeds, &cands, 0.9).unwrap();
    assert_eq!(once, twice);
}

proptest! {
    #[test]
    fn jvec_round_trip(d in 1usize..6, rows in prop::collection::vec(prop::collection::vec(0.1f32..10.0, 6), 0..12)) {
        let ids: Vec<String> = (0..rows.len()).map(|i| format!("r{i}\u{e9}")).collect();
        let rows: Vec<Vec<f32>> = rows.into_iter().map(|r| r[..d].to_vec()).collect();
        let m = EmbeddingMatrix::from_rows(d, ids, rows).unwrap();
        let back = embed_store::decode(&embed_store::encode(&m).unwrap()).unwrap();
        prop_assert_eq!(back, m);
    }
}
