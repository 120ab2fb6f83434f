use std::path::PathBuf;

use adtext_core::knowledge_map::{self, DictionarySchema};
use adtext_core::title_match::{self, HierarchyMaps, HierarchyTerm, MatchKind, TitleIndex};
use proptest::prelude::*;

fn data(p: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(p)
}

fn shipped_maps() -> HierarchyMaps {
    HierarchyMaps::load(&data("titles/hierarchy_base.csv"), &data("titles/hierarchy_stepper.csv")).unwrap()
}

fn read(p: &str) -> Vec<HierarchyTerm> {
    HierarchyMaps::read_terms(std::fs::File::open(data(p)).unwrap()).unwrap()
}

/// (title, expected) pairs built directly from the table rows.
fn table_pairs() -> Vec<(String, i32)> {
    let base = read("titles/hierarchy_base.csv");
    let stepper = read("titles/hierarchy_stepper.csv");
    let manager = base.iter().find(|t| t.term == "Manager").unwrap().value;
    let mut out: Vec<(String, i32)> = base.iter().map(|t| (t.term.clone(), t.value)).collect();
    for s in &stepper {
        out.push((format!("{} Manager", s.term), s.value + manager));
        out.push((s.term.clone(), s.value));
    }
    out
}

#[test]
fn hierarchy_conforms_to_every_table_row() {
    let pairs = table_pairs();
    assert_eq!(pairs.len(), 15 + 2 * 15);
    for maps in [shipped_maps(), HierarchyMaps::default_maps()] {
        for (title, want) in &pairs {
            assert_eq!(maps.hierarchy(title), *want, "{title}");
        }
    }
}

#[test]
fn hierarchy_named_examples() {
    let maps = shipped_maps();
    for (title, want) in [
        ("Manager", 10),
        ("CEO", 60),
        ("Internship", -10),
        ("Senior Manager", 12),
        ("Helper", -7),
        ("Retail Sales Associate", -3),
        ("Cashier", 0),
        ("Sr. Director of Sales", 42),
        ("Team Leader", 10),
    ] {
        assert_eq!(maps.hierarchy(title), want, "{title}");
    }
}

#[test]
fn out_of_range_terms_are_rejected() {
    let t = |term: &str, value| HierarchyTerm { term: term.into(), value, label: "x".into() };
    assert!(HierarchyMaps::new(vec![t("Boss", 15)], vec![]).is_err());
    assert!(HierarchyMaps::new(vec![], vec![t("Super", 5)]).is_err());
    assert!(HierarchyMaps::new(vec![t("Boss", 20)], vec![t("Mini", -7)]).is_ok());
}

fn term_title() -> impl Strategy<Value = String> {
    let base = HierarchyMaps::default_maps();
    let mut words: Vec<String> = base.base_terms().iter().chain(base.stepper_terms()).map(|t| t.term.clone()).collect();
    words.extend(["Cashier", "of", "Sales", "-", "Nurse"].map(String::from));
    prop::collection::vec(prop::sample::select(words), 0..6).prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn hierarchy_stays_in_range(title in term_title()) {
        let h = HierarchyMaps::default_maps().hierarchy(&title);
        prop_assert!((-17..=64).contains(&h), "{} -> {}", title, h);
    }
}

fn index() -> TitleIndex {
    TitleIndex::load(&data("titles/reference_titles.csv"), Some(&data("embeddings/reference_titles.jvec"))).unwrap()
}

#[test]
fn data_analyst_has_nine_exact_candidates() {
    let idx = index();
    let got = title_match::code_title("Data Analyst", None, &idx).unwrap();
    assert_eq!(got.match_kind, MatchKind::Exact);
    assert_eq!(got.candidates.len(), 9);
    assert!(got.nn_score.is_none());
    assert!(got.candidates.contains(&got.code));
}

#[test]
fn exact_match_takes_precedence_over_nearest_neighbour() {
    let idx = index();
    let refs = TitleIndex::read_references(std::fs::File::open(data("titles/reference_titles.csv")).unwrap()).unwrap();
    let m = adtext_core::embed_store::load_vectors(&data("embeddings/reference_titles.jvec")).unwrap();
    // Query with some other title's vector: exact lookup must still win.
    let other = m.row(m.n() - 1).to_vec();
    for (code, title) in &refs {
        let got = title_match::code_title(title, Some(&other), &idx).unwrap();
        assert_eq!(got.match_kind, MatchKind::Exact, "{title}");
        assert!(got.nn_score.is_none());
        assert!(got.candidates.contains(code), "{title}");
    }
}

#[test]
fn unmatched_title_falls_back_to_nearest_reference() {
    let idx = index();
    let m = adtext_core::embed_store::load_vectors(&data("embeddings/reference_titles.jvec")).unwrap();
    let id = m.ids()[0].clone();
    let got = title_match::code_title("Zzyzx Wrangler", Some(m.row(0)), &idx).unwrap();
    assert_eq!(got.match_kind, MatchKind::Nn);
    assert!((got.nn_score.unwrap() - 1.0).abs() < 1e-6);
    assert!(id.starts_with(&format!("{}|", got.code.onet_code)));
    assert!(title_match::code_title("Zzyzx Wrangler", None, &idx).is_err());
    assert!(title_match::code_title("   ", None, &idx).is_err());
}

#[test]
fn normalization_drops_brackets_and_punctuation() {
    assert_eq!(title_match::normalize_title("Data Analyst (Remote) - NYC!"), "data analyst nyc");
    assert_eq!(title_match::normalize_title("  RN,   ICU [nights]"), "rn icu");
}

#[test]
fn title_feature_examples() {
    let (entries, _) =
        knowledge_map::load_dictionary(&data("titles/title_features.csv"), DictionarySchema::Generic).unwrap();
    let m = knowledge_map::compile(entries, vec![]).unwrap();
    let f = |t: &str| title_match::title_features(t, &m).into_iter().collect::<Vec<_>>();
    assert_eq!(f("Registered Nurse - $5,000 Sign-On Bonus"), vec!["sign_on_bonus"]);
    assert_eq!(f("Seasonal Part-Time Cashier"), vec!["part_time", "seasonal"]);
    assert!(f("Cashier").is_empty());
}
