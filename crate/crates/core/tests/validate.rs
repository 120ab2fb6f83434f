mod oracles;

use std::path::PathBuf;

use adtext_core::validate::{self, BinTable, SimulationInputs};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn data(p: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(p)
}

#[test]
fn kappa_examples() {
    let k = validate::kappa(&[vec![40, 10], vec![10, 40]]).unwrap();
    assert!((k - 0.6).abs() < 1e-9);
    assert_eq!(validate::kappa(&[vec![25, 0], vec![0, 75]]).unwrap(), 1.0);
    assert_eq!(validate::kappa(&[vec![30]]).unwrap(), 1.0);
    assert!(validate::kappa(&[vec![0, 0], vec![0, 0]]).is_err());
}

#[test]
fn pearson_of_a_series_with_itself_is_one() {
    let xs: Vec<f64> = (0..50).map(|i| (i as f64).sin() * 3.0 + i as f64).collect();
    assert!((validate::pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
    let neg: Vec<f64> = xs.iter().map(|x| -2.0 * x + 1.0).collect();
    assert!((validate::pearson(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
    assert!(validate::pearson(&[1.0, 1.0], &[2.0, 3.0]).is_err());
}

struct Raters {
    system: Vec<String>,
    raters: Vec<Vec<String>>,
}

fn raters() -> Raters {
    let mut rdr = csv::Reader::from_path(data("validation/raters.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    let system = rows.iter().map(|r| r[1].to_string()).collect();
    let raters = (2..5).map(|c| rows.iter().map(|r| r[c].to_string()).collect()).collect();
    Raters { system, raters }
}

#[test]
fn three_rater_fixture_matches_enumeration() {
    let r = raters();
    assert_eq!(r.system.len(), 20);
    let got = validate::strict_lenient(&r.system, &r.raters).unwrap();
    let want = oracles::strict_lenient(&r.system, &r.raters);
    assert_eq!(got, want);
    assert!(got.0 <= got.1);

    let code = |v: &[String]| -> Vec<usize> { v.iter().map(|s| usize::from(s == "skill")).collect() };
    for i in 0..3 {
        for j in (i + 1)..3 {
            let (a, b) = (code(&r.raters[i]), code(&r.raters[j]));
            let t = validate::rater_table(&a, &b, 2).unwrap();
            let k = validate::kappa(&t).unwrap();
            assert!((k - oracles::kappa_from_items(&a, &b)).abs() < 1e-12, "raters {i},{j}");
        }
    }
}

proptest! {
    #[test]
    fn kappa_never_exceeds_agreement(cells in prop::collection::vec(0u64..30, 9)) {
        let t: Vec<Vec<u64>> = cells.chunks(3).map(<[u64]>::to_vec).collect();
        prop_assume!(cells.iter().sum::<u64>() > 0);
        if let Ok(k) = validate::kappa(&t) {
            prop_assert!(k <= validate::agreement(&t).unwrap() + 1e-12);
            prop_assert!(k <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn stratified_sample_takes_min_of_n_and_bin_size(
        scores in prop::collection::vec(0.7f64..1.0, 0..300),
        n in 1usize..20,
        seed in any::<u64>(),
    ) {
        let edges: Vec<f64> = (0..=20).map(|i| 0.80 + 0.01 * i as f64).collect();
        let got = validate::stratified_sample(&scores, &edges, n, seed).unwrap();
        prop_assert_eq!(got.len(), 20);
        for (b, picked) in got.iter().enumerate() {
            let last = b == 19;
            let size = scores
                .iter()
                .filter(|&&s| s >= edges[b] && (s < edges[b + 1] || (last && s <= edges[b + 1])))
                .count();
            prop_assert_eq!(picked.len(), size.min(n));
            for &i in picked {
                prop_assert!(scores[i] >= edges[b] && scores[i] <= edges[b + 1]);
            }
        }
        prop_assert_eq!(validate::stratified_sample(&scores, &edges, n, seed).unwrap(), got);
    }
}

fn table5() -> BinTable {
    BinTable::load(&data("validation/table5.csv")).unwrap()
}

#[test]
fn simulation_is_monotone_and_conserves_population() {
    for (path, row) in [("validation/table5.csv", "majority"), ("validation/table7.csv", "strict")] {
        let bins = BinTable::load(&data(path)).unwrap();
        let acc = bins.accuracy_row(row).unwrap().to_vec();
        let inputs = SimulationInputs { n_flagged: 2.0e6, n_unflagged: 3.0e6, stage1_fnr: 0.2 };
        let curve = validate::simulate_curve(&bins, &acc, inputs).unwrap();
        for w in curve.windows(2) {
            assert!(w[1].tp <= w[0].tp + 1e-6);
            assert!(w[1].fp <= w[0].fp + 1e-6);
            assert!(w[1].fn_ >= w[0].fn_ - 1e-6);
        }
        for c in &curve {
            let total = c.tp + c.fp + c.fn_ + c.tn;
            assert!((total - 5.0e6).abs() < 1e-3, "{path} t={}", c.threshold);
        }
    }
}

#[test]
fn off_grid_threshold_reports_neighbours() {
    let bins = table5();
    let acc = bins.accuracy_row("majority").unwrap().to_vec();
    let inputs = SimulationInputs { n_flagged: 1.0, n_unflagged: 1.0, stage1_fnr: 0.1 };
    let err = validate::simulate_confusion(&bins, &acc, inputs, 0.875).unwrap_err().to_string();
    assert!(err.contains("0.87") && err.contains("0.88"), "{err}");
}

#[test]
fn expected_counts_agree_with_monte_carlo() {
    let bins = table5();
    let acc = bins.accuracy_row("majority").unwrap().to_vec();
    let inputs = SimulationInputs { n_flagged: 1.0, n_unflagged: 0.0, stage1_fnr: 0.0 };
    let est = validate::simulate_confusion(&bins, &acc, inputs, 0.87).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(87);
    let draws = 400_000;
    let (mut tp, mut fp) = (0u64, 0u64);
    for _ in 0..draws {
        let mut u: f64 = rng.gen();
        let mut b = bins.freq.len() - 1;
        for (i, f) in bins.freq.iter().enumerate() {
            if u < *f {
                b = i;
                break;
            }
            u -= f;
        }
        if bins.lower[b] >= 0.87 - 1e-9 {
            if rng.gen_bool(acc[b]) {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    let n = draws as f64;
    assert!((est.tp - tp as f64 / n).abs() < 0.005);
    assert!((est.fp - fp as f64 / n).abs() < 0.005);
}

#[test]
fn bin_tables_are_validated() {
    assert!(BinTable::read("bin_label,freq,a\n0.8,0.5,0.5\n0.9,0.4,0.5\n".as_bytes()).is_err());
    assert!(BinTable::read("bin_label,freq,a\n0.9,0.5,0.5\n0.8,0.5,0.5\n".as_bytes()).is_err());
    assert!(BinTable::read("bin_label,a\n0.9,0.5\n".as_bytes()).is_err());
    let t = BinTable::read("bin_label,freq,a\n0.80-0.84,0.5,0.5\n0.85-1,0.5,1\n".as_bytes()).unwrap();
    assert_eq!(t.lower, vec![0.80, 0.85]);
}
