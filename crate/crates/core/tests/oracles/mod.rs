//! Brute-force reference implementations. Shared by the property tests and
//! the acceptance target; each is written for obviousness, not speed.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use adtext_core::corpus::JobAdRecord;
use adtext_core::embed_store::EmbeddingMatrix;
use adtext_core::knowledge_map::{AssociationRule, Guard, Hit, MapEntry, RuleKind};
use adtext_core::YearMonth;

pub fn tokens(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty()).map(|t| t.to_lowercase()).collect()
}

fn occurs(toks: &[String], s: usize, form: &[String]) -> bool {
    s + form.len() <= toks.len() && toks[s..s + form.len()] == *form
}

/// Longest span first, then leftmost; every entry matching an accepted span
/// reports a hit with its first matching form. Negation then co-occurrence.
pub fn km_scan(entries: &[MapEntry], rules: &[AssociationRule], text: &str) -> Vec<Hit> {
    let toks = tokens(text);
    let mut spans: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in entries {
        for f in &e.surface_forms {
            for s in 0..toks.len() {
                if occurs(&toks, s, f) {
                    spans.insert((s, s + f.len()));
                }
            }
        }
    }
    let mut ordered: Vec<(usize, usize)> = spans.into_iter().collect();
    ordered.sort_by(|a, b| (b.1 - b.0).cmp(&(a.1 - a.0)).then(a.0.cmp(&b.0)));
    let mut taken = vec![false; toks.len()];
    let mut hits = Vec::new();
    for (s, e) in ordered {
        if (s..e).any(|i| taken[i]) {
            continue;
        }
        (s..e).for_each(|i| taken[i] = true);
        for (ei, entry) in entries.iter().enumerate() {
            if let Some(f) = entry.surface_forms.iter().find(|f| f.len() == e - s && occurs(&toks, s, f)) {
                hits.push(Hit { start_token: s, end_token: e, entry: ei, uci: entry.uci.clone(), term: f.join(" ") });
            }
        }
    }
    hits.sort();

    let guard_ok = |r: &AssociationRule, h: &Hit, pool: &[Hit]| -> bool {
        let lo = h.start_token.saturating_sub(r.window);
        let hi = (h.end_token + r.window).min(toks.len());
        match &r.guard {
            Guard::Terms(terms) => terms.iter().any(|t| {
                let g = tokens(t);
                !g.is_empty() && (lo..hi).any(|s| s + g.len() <= hi && occurs(&toks, s, &g))
            }),
            Guard::Uci(u) => pool.iter().any(|o| o != h && &o.uci == u && o.start_token >= lo && o.end_token <= hi),
        }
    };
    let negated: Vec<Hit> = hits
        .iter()
        .filter(|h| {
            !rules.iter().any(|r| r.kind == RuleKind::Negation && r.trigger_uci == h.uci && guard_ok(r, h, &hits))
        })
        .cloned()
        .collect();
    negated
        .iter()
        .filter(|h| {
            rules
                .iter()
                .filter(|r| r.kind == RuleKind::CoOccur && r.trigger_uci == h.uci)
                .all(|r| guard_ok(r, h, &negated))
        })
        .cloned()
        .collect()
}

pub fn cos(a: &[f32], b: &[f32]) -> f64 {
    let mut dot = 0.0f64;
    let mut na = 0.0f64;
    let mut nb = 0.0f64;
    for i in 0..a.len() {
        dot += a[i] as f64 * b[i] as f64;
        na += a[i] as f64 * a[i] as f64;
        nb += b[i] as f64 * b[i] as f64;
    }
    dot / (na.sqrt() * nb.sqrt())
}

/// Every row scored, sorted by score descending then id.
pub fn nearest(query: &[f32], m: &EmbeddingMatrix, k: usize) -> Vec<(String, f64)> {
    let mut all: Vec<(String, f64)> = (0..m.n()).map(|i| (m.ids()[i].clone(), cos(query, m.row(i)))).collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Full-matrix edit distance over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// Kappa by enumerating item pairs rather than from marginals.
pub fn kappa_from_items(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let observed = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let mut chance = 0.0;
    for x in a {
        for y in b {
            if x == y {
                chance += 1.0;
            }
        }
    }
    chance /= n * n;
    (observed - chance) / (1.0 - chance)
}

pub fn strict_lenient<T: PartialEq>(reference: &[T], raters: &[Vec<T>]) -> (f64, f64) {
    let n = reference.len();
    let mut strict = 0usize;
    let mut lenient = 0usize;
    for i in 0..n {
        let agree = raters.iter().filter(|r| r[i] == reference[i]).count();
        if agree == raters.len() {
            strict += 1;
        }
        if agree > 0 {
            lenient += 1;
        }
    }
    (strict as f64 / n as f64, lenient as f64 / n as f64)
}

/// Month -> active ad ids, by walking every month of every ad.
pub fn maj(ads: &[JobAdRecord], anomalous: &BTreeSet<YearMonth>, offset: i64) -> BTreeMap<YearMonth, BTreeSet<String>> {
    let mut out: BTreeMap<YearMonth, BTreeSet<String>> = BTreeMap::new();
    for ad in ads {
        let end = ad.date_compiled;
        let start = match ad.date_acquired {
            Some(a) if a <= end && !anomalous.contains(&a) => a,
            _ => end.add_months(-offset),
        };
        let mut m = start;
        while m <= end {
            out.entry(m).or_default().insert(ad.id.clone());
            m = m.add_months(1);
        }
    }
    out
}

/// Vowel groups (y counts as a vowel), minus a trailing silent e, at least one.
pub fn syllables(word: &str) -> usize {
    let w: Vec<char> = word.to_lowercase().chars().filter(|c| c.is_alphabetic()).collect();
    if w.is_empty() {
        return 0;
    }
    let vowel = |c: char| "aeiouy".contains(c);
    let mut groups = 0;
    let mut prev = false;
    for &c in &w {
        let v = vowel(c);
        if v && !prev {
            groups += 1;
        }
        prev = v;
    }
    let n = w.len();
    if n >= 2 && w[n - 1] == 'e' && !vowel(w[n - 2]) && groups > 1 {
        groups -= 1;
    }
    groups.max(1)
}

/// Flesch reading ease from whitespace words and terminal punctuation.
pub fn flesch(text: &str) -> f64 {
    let words: Vec<&str> = text.split_whitespace().filter(|w| w.chars().any(char::is_alphanumeric)).collect();
    let sentences = text.split(['.', '!', '?']).filter(|s| s.chars().any(char::is_alphanumeric)).count().max(1);
    let syl: usize = words.iter().map(|w| syllables(w)).sum();
    206.835 - 1.015 * (words.len() as f64 / sentences as f64) - 84.6 * (syl as f64 / words.len() as f64)
}

/// For each set: its members plus every candidate whose best cosine to any
/// original member reaches the threshold.
pub fn augment(
    sets: &[(String, Vec<String>)],
    seeds: &EmbeddingMatrix,
    cands: &EmbeddingMatrix,
    threshold: f64,
) -> BTreeMap<String, BTreeSet<String>> {
    let mut out = BTreeMap::new();
    for (code, members) in sets {
        let mut got = BTreeSet::new();
        for j in 0..cands.n() {
            let best =
                members.iter().map(|m| cos(seeds.get(m).unwrap(), cands.row(j))).fold(f64::NEG_INFINITY, f64::max);
            if best >= threshold {
                got.insert(cands.ids()[j].clone());
            }
        }
        out.insert(code.clone(), got);
    }
    out
}

/// Best (label, score) over every (sentence, member) pair; ties to the lower code.
pub fn best_label(query: &[f32], sets: &[(String, Vec<String>)], m: &EmbeddingMatrix) -> (String, f64) {
    let mut best: Option<(String, f64)> = None;
    for (code, members) in sets {
        for id in members {
            let s = cos(query, m.get(id).unwrap());
            let better = match &best {
                None => true,
                Some((c, b)) => s > *b || (s == *b && code < c),
            };
            if better {
                best = Some((code.clone(), s));
            }
        }
    }
    best.unwrap()
}
