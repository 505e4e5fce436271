use std::collections::BTreeMap;

use anomaly_bench::eval::{aucroc, subsample_labels};
use anomaly_bench::seed::{derive_seed, rng};
use anomaly_bench::{DataMatrix, DetectorKind, DetectorSpec, LabelMask, LabelVector, ScoreVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Gaussian cluster with a few scattered outliers appended at the end.
fn fixture(n: usize, n_out: usize, d: usize, seed: u64) -> (DataMatrix, LabelVector) {
    let mut r = rng(seed);
    let mut values = Vec::new();
    for i in 0..n + n_out {
        for j in 0..d {
            let z: f64 = StandardNormal.sample(&mut r);
            let scale = 1.0 + j as f64 * 0.5;
            values.push(if i < n {
                z * scale
            } else {
                z + 6.0 * scale * if r.random::<bool>() { 1.0 } else { -1.0 }
            });
        }
    }
    let mut y = vec![0u8; n];
    y.resize(n + n_out, 1);
    (
        DataMatrix::new(n + n_out, d, values).unwrap(),
        LabelVector::new(y).unwrap(),
    )
}

fn fit_score(spec: &DetectorSpec, train: &DataMatrix, y: &LabelVector, x: &DataMatrix, seed: u64) -> ScoreVector {
    let mask = LabelMask::all_anomalies(y);
    let mask = spec.needs_labels().then_some(&mask);
    spec.fit(train, mask, seed).unwrap().score(x).unwrap()
}

fn close(a: &[f64], b: &[f64], rel: f64) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= rel * x.abs().max(y.abs()).max(1e-300))
}

#[test]
fn scores_are_finite_with_matching_length_and_deterministic() {
    let (train, y) = fixture(150, 10, 4, 1);
    let (test, _) = fixture(40, 5, 4, 2);
    for kind in DetectorKind::ALL {
        let spec = DetectorSpec::default_for(kind);
        let a = fit_score(&spec, &train, &y, &test, 9);
        assert_eq!(a.len(), test.rows(), "{kind}");
        assert!(a.as_slice().iter().all(|v| v.is_finite()), "{kind}");
        let b = fit_score(&spec, &train, &y, &test, 9);
        assert_eq!(a, b, "{kind}");
    }
}

#[test]
fn column_permutation_equivariance() {
    let (train, y) = fixture(200, 10, 5, 3);
    let (test, _) = fixture(50, 5, 5, 4);
    let perm = [3, 0, 4, 2, 1];
    let ptrain = train.permute_columns(&perm).unwrap();
    let ptest = test.permute_columns(&perm).unwrap();
    // Distance- and feature-sum-based detectors agree up to summation order.
    for kind in [
        DetectorKind::Knn,
        DetectorKind::Lof,
        DetectorKind::Cblof,
        DetectorKind::Hbos,
        DetectorKind::Ecod,
        DetectorKind::Copod,
        DetectorKind::Pca,
    ] {
        let spec = DetectorSpec::default_for(kind);
        let a = fit_score(&spec, &train, &y, &test, 5);
        let b = fit_score(&spec, &ptrain, &y, &ptest, 5);
        assert!(close(a.as_slice(), b.as_slice(), 1e-9), "{kind}");
    }
    // Randomised detectors pick features by index, so equality holds only in
    // distribution: the anomaly ranking must survive.
    let (_, ytest) = fixture(50, 5, 5, 4);
    for kind in [DetectorKind::IForest, DetectorKind::Loda] {
        let spec = DetectorSpec::default_for(kind);
        let a = aucroc(&fit_score(&spec, &train, &y, &test, 5), &ytest).unwrap();
        let b = aucroc(&fit_score(&spec, &ptrain, &y, &ptest, 5), &ytest).unwrap();
        assert!((a - b).abs() < 0.05, "{kind}: {a} vs {b}");
    }
}

#[test]
fn iforest_scores_in_unit_interval() {
    let (train, y) = fixture(300, 15, 3, 6);
    let s = fit_score(&DetectorSpec::default_for(DetectorKind::IForest), &train, &y, &train, 1);
    assert!(s.as_slice().iter().all(|&v| v > 0.0 && v <= 1.0));
}

#[test]
fn ecod_copod_monotone_transform() {
    let (train, y) = fixture(120, 6, 3, 8);
    // Shift to positive values; the log keeps each feature's skew sign here.
    let shifted = train.map_columns(|_, v| v + 100.0).unwrap();
    let transformed = shifted
        .map_columns(|j, v| if j == 0 { v.ln() } else { v * 3.0 + 1.0 })
        .unwrap();
    for kind in [DetectorKind::Ecod, DetectorKind::Copod] {
        let spec = DetectorSpec::default_for(kind);
        let a = fit_score(&spec, &shifted, &y, &shifted, 0);
        let b = fit_score(&spec, &transformed, &y, &transformed, 0);
        assert_eq!(a, b, "{kind}");
    }
}

#[test]
fn supervised_detectors_separate_perfectly_on_train() {
    let (x, y) = fixture(100, 20, 3, 11);
    for kind in [DetectorKind::Gnb, DetectorKind::RForest] {
        let s = fit_score(&DetectorSpec::default_for(kind), &x, &y, &x, 2);
        assert_eq!(aucroc(&s, &y).unwrap(), 1.0, "{kind}");
    }
}

#[test]
fn supervised_detectors_need_labels() {
    let (x, _) = fixture(30, 3, 2, 0);
    for kind in [DetectorKind::Gnb, DetectorKind::RForest, DetectorKind::ScoreStack] {
        assert!(DetectorSpec::default_for(kind).fit(&x, None, 0).is_err(), "{kind}");
    }
}

fn forest(n_trees: f64) -> DetectorSpec {
    DetectorSpec::new(
        DetectorKind::RForest,
        &BTreeMap::from([("n_trees".to_string(), n_trees)]),
    )
    .unwrap()
}

#[test]
fn scorestack_with_empty_roster_is_a_plain_forest() {
    let (x, y) = fixture(100, 12, 3, 13);
    let (test, _) = fixture(30, 4, 3, 14);
    let mask = LabelMask::all_anomalies(&y);
    let stack = DetectorSpec::scorestack(Vec::new(), &BTreeMap::new()).unwrap();
    let a = stack.fit(&x, Some(&mask), 21).unwrap().score(&test).unwrap();
    let b = forest(100.0).fit(&x, Some(&mask), 21).unwrap().score(&test).unwrap();
    assert_eq!(a, b);
}

#[test]
fn scorestack_with_full_mask_is_a_forest_on_augmented_features() {
    let (x, y) = fixture(100, 12, 3, 15);
    let (test, _) = fixture(30, 4, 3, 16);
    let mask = LabelMask::all_anomalies(&y);
    let roster = vec![
        DetectorSpec::default_for(DetectorKind::Knn),
        DetectorSpec::default_for(DetectorKind::IForest),
    ];
    let seed = 33;
    let stack = DetectorSpec::scorestack(roster.clone(), &BTreeMap::new()).unwrap();
    let got = stack.fit(&x, Some(&mask), seed).unwrap().score(&test).unwrap();

    let fitted: Vec<_> = roster
        .iter()
        .enumerate()
        .map(|(i, s)| s.fit(&x, None, derive_seed(seed, &[i as u64 + 1])).unwrap())
        .collect();
    let aug = |m: &DataMatrix| {
        let cols: Vec<Vec<f64>> = fitted.iter().map(|f| f.score(m).unwrap().into_vec()).collect();
        m.with_columns(&cols).unwrap()
    };
    let want = forest(100.0)
        .fit(&aug(&x), Some(&mask), seed)
        .unwrap()
        .score(&aug(&test))
        .unwrap();
    assert_eq!(got, want);
}

#[test]
fn scorestack_rejects_zero_revealed_anomalies() {
    let (x, y) = fixture(50, 5, 2, 17);
    let mask = LabelMask::new(vec![false; y.len()], &y).unwrap();
    assert!(DetectorSpec::default_for(DetectorKind::ScoreStack)
        .fit(&x, Some(&mask), 0)
        .is_err());
}

#[test]
fn scorestack_beats_raw_forest_at_low_supervision() {
    let mut wins = 0;
    for s in 0..20u64 {
        let (train, y) = fixture(300, 30, 4, 100 + s);
        let (test, ytest) = fixture(150, 15, 4, 200 + s);
        let mask = subsample_labels(&y, 0.1, s).unwrap();
        let stack = fit_with(
            &DetectorSpec::default_for(DetectorKind::ScoreStack),
            &train,
            &mask,
            &test,
            s,
        );
        let raw = fit_with(&forest(100.0), &train, &mask, &test, s);
        if aucroc(&stack, &ytest).unwrap() >= aucroc(&raw, &ytest).unwrap() {
            wins += 1;
        }
    }
    assert!(wins > 10, "{wins}/20");
}

fn fit_with(spec: &DetectorSpec, train: &DataMatrix, mask: &LabelMask, x: &DataMatrix, seed: u64) -> ScoreVector {
    spec.fit(train, Some(mask), seed).unwrap().score(x).unwrap()
}
