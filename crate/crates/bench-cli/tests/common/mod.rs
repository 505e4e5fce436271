//! Fixture datasets shared by the integration tests.
#![allow(dead_code)]

use anomaly_bench::seed::rng;
use anomaly_bench::synth::GmmModel;
use anomaly_bench::{derive_seed, DataMatrix, Dataset, LabelVector};
use nalgebra::{DMatrix, DVector};
use rand::Rng as _;

pub const N_ROWS: usize = 2_000;
pub const N_ANOMALIES: usize = 100;

/// Two components with different means and scales and a random tilt.
pub fn normal_model(d: usize, seed: u64) -> GmmModel {
    let mut r = rng(seed);
    let mut means = Vec::new();
    let mut covs = Vec::new();
    for (c, scale) in [(0usize, 1.0f64), (1, 0.35)] {
        let m: Vec<f64> = (0..d)
            .map(|_| if c == 0 { 0.0 } else { 4.0 + r.random_range(-1.0..1.0) })
            .collect();
        let a = DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { r.random_range(-0.3..0.3) });
        let cov = (&a * a.transpose()) * (scale * scale);
        means.push(m);
        covs.push(cov);
    }
    GmmModel::new(vec![0.6, 0.4], means, covs).expect("valid fixture model")
}

fn stack(normal: &DataMatrix, anomalies: &DataMatrix) -> Dataset {
    let d = normal.cols();
    let mut values = Vec::with_capacity((normal.rows() + anomalies.rows()) * d);
    for m in [normal, anomalies] {
        for row in m.row_iter() {
            values.extend(row.iter().copied());
        }
    }
    let mut y = vec![0u8; normal.rows()];
    y.resize(normal.rows() + anomalies.rows(), 1);
    Dataset {
        x: DataMatrix::new(normal.rows() + anomalies.rows(), d, values).unwrap(),
        y: LabelVector::new(y).unwrap(),
    }
}

fn group(centre: Vec<f64>, var: f64, n: usize, seed: u64) -> DataMatrix {
    let d = centre.len();
    let g = GmmModel::new(vec![1.0], vec![centre], vec![DMatrix::identity(d, d) * var]).unwrap();
    g.sample(n, seed).unwrap()
}

fn min_mahalanobis(model: &GmmModel, row: &[f64]) -> f64 {
    (0..model.n_components())
        .map(|k| {
            let diff = DVector::from_iterator(row.len(), row.iter().zip(&model.means()[k]).map(|(a, b)| a - b));
            let inv = model.covariances()[k].clone().try_inverse().unwrap();
            (diff.transpose() * inv * &diff)[(0, 0)]
        })
        .fold(f64::INFINITY, f64::min)
}

/// Inflated-covariance draws kept only outside every component's
/// `d + 4 sqrt(2d)` squared Mahalanobis radius, so a radial boundary
/// separates them from the normals.
fn shell(model: &GmmModel, n: usize, seed: u64) -> DataMatrix {
    let d = model.dim() as f64;
    let radius = d + 4.0 * (2.0 * d).sqrt();
    let wide = model.with_scaled_covariances(5.0);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut round = 0;
    while rows.len() < n {
        let batch = wide.sample(4 * n, derive_seed(seed, &[round])).unwrap();
        rows.extend(
            batch
                .row_iter()
                .filter(|r| min_mahalanobis(model, r) > radius)
                .map(<[f64]>::to_vec)
                .take(n - rows.len()),
        );
        round += 1;
    }
    DataMatrix::from_rows(&rows).unwrap()
}

fn with_anomalies(d: usize, seed: u64, make: impl FnOnce(&GmmModel, u64) -> DataMatrix) -> Dataset {
    let model = normal_model(d, derive_seed(seed, &[0]));
    let normal = model.sample(N_ROWS - N_ANOMALIES, derive_seed(seed, &[1])).unwrap();
    let anomalies = make(&model, derive_seed(seed, &[2]));
    assert_eq!(anomalies.rows(), N_ANOMALIES);
    stack(&normal, &anomalies)
}

/// 2,000 rows, 5% anomalies: half inflated-covariance draws from the normal
/// model, half one displaced group. Generator settings replace the
/// anomalies and only use the normal rows.
pub fn gmm_fixture(d: usize, seed: u64) -> Dataset {
    with_anomalies(d, seed, |model, s| {
        let local = model.with_scaled_covariances(5.0).sample(N_ANOMALIES / 2, s).unwrap();
        let centre = (0..d).map(|j| if j < 2 { 4.0 } else { -1.0 }).collect();
        local
            .vstack(&group(centre, 1.0, N_ANOMALIES / 2, derive_seed(s, &[1])))
            .unwrap()
    })
}

/// All anomalies lie in a Mahalanobis shell around the normal components.
pub fn shell_fixture(d: usize, seed: u64) -> Dataset {
    with_anomalies(d, seed, |model, s| shell(model, N_ANOMALIES, s))
}

/// Half shell anomalies, half a tight group inside the normal bulk. The
/// group is separable with labels but dense, so distance and density
/// detectors rank it as normal.
pub fn embedded_fixture(d: usize, seed: u64) -> Dataset {
    with_anomalies(d, seed, |model, s| {
        let centre = (0..d).map(|j| if j % 2 == 0 { 0.75 } else { -0.75 }).collect();
        let inner = group(centre, 0.02, N_ANOMALIES / 2, derive_seed(s, &[1]));
        shell(model, N_ANOMALIES / 2, s).vstack(&inner).unwrap()
    })
}

/// Ten seeds alternating d = 4 and d = 8.
pub fn fixture_dims() -> Vec<(usize, u64)> {
    (0..10)
        .map(|i| (if i % 2 == 0 { 4 } else { 8 }, 1_000 + i as u64))
        .collect()
}
