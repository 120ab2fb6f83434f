mod oracles;

use std::path::PathBuf;

use adtext_core::firm_match::{self, EstablishmentIndex, EstablishmentRecord, Tier, DEFAULT_ACCEPT};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn data(p: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(p)
}

fn random_string(rng: &mut ChaCha8Rng) -> String {
    let alphabet: Vec<char> = "abcde xyzé7".chars().collect();
    (0..rng.gen_range(0..16)).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

#[test]
fn levenshtein_matches_dp_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for case in 0..1000 {
        let a = random_string(&mut rng);
        let b = random_string(&mut rng);
        assert_eq!(firm_match::levenshtein(&a, &b), oracles::levenshtein(&a, &b), "case {case}: {a:?} {b:?}");
    }
}

#[test]
fn kitten_sitting_ratio() {
    assert!((firm_match::lev_ratio("kitten", "sitting") - 0.5714).abs() < 1e-4);
    assert_eq!(firm_match::levenshtein("kitten", "sitting"), 3);
}

#[test]
fn named_standardization_examples() {
    assert_eq!(firm_match::standardize("Wal-Mart Stores, Incorporated"), "wal mart stores inc");
    assert_eq!(firm_match::standardize("Seven-Eleven"), "7 11");
    assert_eq!(firm_match::standardize("7-11 Inc."), "7 11 inc");
}

proptest! {
    #[test]
    fn distance_is_a_metric(a in "[a-c]{0,8}", b in "[a-c]{0,8}", c in "[a-c]{0,8}") {
        let d = firm_match::levenshtein;
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &a), 0);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        let r = firm_match::lev_ratio(&a, &b);
        prop_assert!((0.0..=1.0).contains(&r));
    }

    #[test]
    fn standardize_is_idempotent(name in "[A-Za-z0-9 &.,'-]{0,30}") {
        let once = firm_match::standardize(&name);
        prop_assert_eq!(firm_match::standardize(&once), once);
    }
}

fn fixture() -> EstablishmentIndex {
    EstablishmentIndex::load(&data("firms/establishments.csv")).unwrap()
}

/// Best (score, est_id) among records passing `keep`, lowest id on ties.
fn brute_best(
    recs: &[EstablishmentRecord],
    name: &str,
    keep: impl Fn(&EstablishmentRecord) -> bool,
) -> Option<(f64, String)> {
    let mut best: Option<(f64, String)> = None;
    for r in recs.iter().filter(|r| keep(r)) {
        let s = oracles::levenshtein(name, &r.name_std);
        let max = name.chars().count().max(r.name_std.chars().count());
        let s = if max == 0 { 1.0 } else { 1.0 - s as f64 / max as f64 };
        let better = match &best {
            None => true,
            Some((b, id)) => s > *b || (s == *b && r.est_id < *id),
        };
        if better {
            best = Some((s, r.est_id.clone()));
        }
    }
    best
}

#[test]
fn cascade_tier_ordering_on_fixture_index() {
    let idx = fixture();
    assert!(idx.len() >= 200);
    let recs = idx.records().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let suffixes = ["", " Inc", " LLC", " Co", "s", " Group"];
    for case in 0..500 {
        let base = recs.choose(&mut rng).unwrap();
        let mut name = base.name_raw.clone();
        if rng.gen_bool(0.5) {
            name.push_str(suffixes.choose(&mut rng).unwrap());
        }
        if rng.gen_bool(0.3) {
            let other = recs.choose(&mut rng).unwrap();
            name = format!("{} {}", name.split(' ').next().unwrap(), other.name_raw);
        }
        let loc = recs.choose(&mut rng).unwrap();
        let zip = rng.gen_bool(0.7).then(|| loc.zip.clone());
        let state = rng.gen_bool(0.7).then(|| loc.state.clone());
        let accept = [0.6, 0.8, 0.9].choose(&mut rng).copied().unwrap();

        let got = firm_match::cascade_match("ad", &name, zip.as_deref(), state.as_deref(), &idx, accept);
        let std = firm_match::standardize(&name);
        let first = std.chars().next();
        let tiers: [(Tier, Option<(f64, String)>); 3] = [
            (Tier::Zip, zip.as_ref().and_then(|z| brute_best(&recs, &std, |r| &r.zip == z))),
            (Tier::State, state.as_ref().and_then(|s| brute_best(&recs, &std, |r| &r.state == s))),
            (Tier::National, brute_best(&recs, &std, |r| r.name_std.chars().next() == first)),
        ];
        let want = tiers.iter().find(|(_, b)| b.as_ref().is_some_and(|(s, _)| *s >= accept));
        match want {
            Some((tier, Some((score, id)))) => {
                assert_eq!(got.tier, *tier, "case {case}: {name}");
                assert_eq!(got.est_id.as_deref(), Some(id.as_str()), "case {case}");
                assert!((got.score - score).abs() < 1e-12);
                assert!(got.naics.is_some());
            }
            _ => {
                assert_eq!(got.tier, Tier::None, "case {case}");
                assert!(got.est_id.is_none() && got.naics.is_none());
                assert!(got.score < accept);
            }
        }
        // Tiers are visited in order and every earlier tier fell short.
        assert!(got.tier_bests.windows(2).all(|w| w[0].tier < w[1].tier));
        for tb in &got.tier_bests {
            if tb.tier < got.tier {
                assert!(tb.score < accept, "case {case}");
            }
        }
    }
}

#[test]
fn exact_name_in_zip_wins_at_zip_tier() {
    let idx = fixture();
    for r in idx.records().iter().take(50) {
        let got = firm_match::cascade_match("ad", &r.name_raw, Some(&r.zip), Some(&r.state), &idx, DEFAULT_ACCEPT);
        assert_eq!(got.tier, Tier::Zip);
        assert_eq!(got.score, 1.0);
        assert_eq!(got.naics.as_deref(), Some(r.naics.as_str()));
    }
}

#[test]
fn same_name_in_other_states_resolves_by_location() {
    let idx = fixture();
    let got = firm_match::cascade_match("ad", "Summit Health, Inc.", Some("99999"), Some("tx"), &idx, DEFAULT_ACCEPT);
    assert_eq!((got.tier, got.est_id.as_deref()), (Tier::State, Some("E0901")));
    let got = firm_match::cascade_match("ad", "Summit Health Inc", None, None, &idx, DEFAULT_ACCEPT);
    assert_eq!((got.tier, got.est_id.as_deref()), (Tier::National, Some("E0900")));
}
