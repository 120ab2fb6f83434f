use std::collections::HashMap;
use std::path::PathBuf;

use adtext_core::corpus::JobAdRecord;
use adtext_core::job_tag::{self, Decision, Predictions, TagClass, DEFAULT_RADIUS};
use adtext_core::YearMonth;
use proptest::prelude::*;
use serde::Deserialize;

fn data(p: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(p)
}

fn class(name: &str) -> TagClass {
    TagClass::load(&data(&format!("tags/{name}")), DEFAULT_RADIUS).unwrap()
}

fn ad(id: &str, body: &str) -> JobAdRecord {
    JobAdRecord {
        id: id.into(),
        title: String::new(),
        body: body.into(),
        date_compiled: YearMonth::new(2021, 3).unwrap(),
        date_acquired: None,
        state: None,
        zip: None,
        firm_name_meta: None,
        wage_min_meta: None,
        wage_max_meta: None,
    }
}

#[derive(Deserialize)]
struct Golden {
    text: String,
    class: String,
    decision: Decision,
}

#[test]
fn fixture_ads_match_hand_labels() {
    let text = std::fs::read_to_string(data("tags/golden.jsonl")).unwrap();
    let classes = ["union", "spanish_language", "training"].map(class);
    for (i, line) in text.lines().filter(|l| !l.trim().is_empty()).enumerate() {
        let g: Golden = serde_json::from_str(line).unwrap();
        let tags = job_tag::tag_ad(&ad(&format!("g{i}"), &g.text), &classes, &HashMap::new());
        assert_eq!(tags.tags[&g.class], g.decision == Decision::Positive, "{}", g.text);
    }
}

#[test]
fn labor_union_window_geometry() {
    let c = class("union");
    let w = job_tag::extract_windows("proud member of a labor union family", &c);
    assert_eq!(w.len(), 1);
    assert!(w[0].text.contains("labor union"));
    assert_eq!(w[0].keyword_start - w[0].window_start, 5);
    assert_eq!(w[0].window_end - w[0].keyword_end, 1);
    let w = job_tag::extract_windows("Union shop offering steady hours", &c);
    assert_eq!(w[0].window_start, w[0].keyword_start);
    assert!(job_tag::extract_windows("no keyword here", &c).is_empty());
}

#[test]
fn rule_examples() {
    let c = class("union");
    let decide = |t: &str| {
        let w = job_tag::extract_windows(t, &c);
        job_tag::classify_window(&w[0], &c).0
    };
    assert_eq!(decide("Join our credit union today"), Decision::Negative);
    assert_eq!(decide("union role under collective bargaining rules"), Decision::Positive);
    let bare = TagClass::new("union", vec!["union".into()], &[], &[], 6).unwrap();
    let w = job_tag::extract_windows("a union job with collective bargaining", &bare);
    assert_eq!(job_tag::classify_window(&w[0], &bare), (Decision::Negative, None));
}

#[test]
fn classes_need_keywords_and_positive_radius() {
    assert!(TagClass::new("x", vec![], &[], &[], 6).is_err());
    assert!(TagClass::new("x", vec!["k".into()], &[], &[], 0).is_err());
}

#[test]
fn external_predictions_override_rules() {
    let c = class("union");
    let preds = Predictions::parse(r#"{"ad_id":"a","window_idx":1,"decision":"positive"}"#, "model-v1").unwrap();
    let map = HashMap::from([("union".to_string(), preds)]);
    let body = "Join our credit union. Ask about union dues at the credit desk.";
    let plain = job_tag::tag_ad(&ad("a", body), std::slice::from_ref(&c), &HashMap::new());
    assert!(!plain.tags["union"]);
    let tagged = job_tag::tag_ad(&ad("a", body), &[c], &map);
    assert!(tagged.tags["union"]);
    assert_eq!(tagged.windows[1].rule_fired.as_deref(), Some("external:model-v1"));
    assert_eq!(tagged.windows[0].decision, Decision::Negative);
}

fn body() -> impl Strategy<Value = String> {
    let words = prop::sample::select(vec![
        "union",
        "credit",
        "labor",
        "member",
        "team",
        "pay",
        "collective",
        "bargaining",
        "the",
        "spanish",
        "training",
    ]);
    prop::collection::vec(words, 0..40).prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn windows_are_exhaustive_and_bounded(text in body(), radius in 1usize..8) {
        let c = TagClass::new("union", vec!["union".into(), "labor".into()], &["credit".into()], &["bargaining".into()], radius).unwrap();
        let toks = adtext_core::text::token_strings(&text);
        let occurrences = toks.iter().filter(|t| *t == "union" || *t == "labor").count();
        let ws = job_tag::extract_windows(&text, &c);
        prop_assert_eq!(ws.len(), occurrences);
        for w in &ws {
            prop_assert!(w.tokens.len() <= 2 * radius + 1);
            prop_assert_eq!(&w.tokens[..], &toks[w.window_start..w.window_end]);
        }
    }

    #[test]
    fn appending_a_positive_window_never_clears_the_tag(text in body()) {
        let c = class("union");
        // Windows cross sentence boundaries, so pad past the radius before the new window.
        let more = format!("{text}. Apply now for this great opening in our shop today. Proud union position with collective bargaining.");
        let after = job_tag::tag_ad(&ad("a", &more), &[c], &HashMap::new()).tags["union"];
        prop_assert!(after);
    }

    #[test]
    fn decisions_are_deterministic(text in body()) {
        let c = class("union");
        let a = job_tag::tag_ad(&ad("a", &text), std::slice::from_ref(&c), &HashMap::new());
        let b = job_tag::tag_ad(&ad("a", &text), &[c], &HashMap::new());
        prop_assert_eq!(a, b);
    }
}
