//! Dataset ingestion, normalization, splitting, and synthetic generators.
//!
//! The only on-disk format is CSV: UTF-8, comma separated, header row, a
//! `label` column, everything else numeric features in header order.
//! Floats are written with 17 significant digits so a write/read round
//! trip reproduces every double exactly.

use std::path::Path;

use ndarray::{Array2, ArrayView2, Axis};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{Error, Result};

/// Feature matrix with +/-1 labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Vec<i8>,
    pub feature_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(x: Array2<f64>, y: Vec<i8>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                got: y.len(),
            });
        }
        if y.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::InvalidParameter("labels must be +1 or -1".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite feature value".into()));
        }
        Ok(Dataset {
            x,
            y,
            feature_names: None,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select(Axis(0), indices),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// Load a labeled CSV. The label column must parse to 1 or -1; a 0 is
/// accepted as -1 (a common export convention) with a logged notice.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let (x, raw, names) = load_csv_raw(path)?;
    let mut saw_zero = false;
    let mut y = Vec::with_capacity(raw.len());
    for (row, &v) in raw.iter().enumerate() {
        if v == 1.0 {
            y.push(1);
        } else if v == -1.0 {
            y.push(-1);
        } else if v == 0.0 {
            saw_zero = true;
            y.push(-1);
        } else {
            return Err(Error::BadLabel {
                row,
                value: format!("{v}"),
            });
        }
    }
    if saw_zero {
        log::warn!("label column contains 0s; mapping 0 -> -1");
    }
    let mut ds = Dataset::new(x, y)?;
    ds.feature_names = Some(names);
    Ok(ds)
}

/// Load a CSV keeping the label column as raw numbers (for datasets whose
/// labels still need [`relabel`], e.g. digit classes).
pub fn load_csv_raw(path: impl AsRef<Path>) -> Result<(Array2<f64>, Vec<f64>, Vec<String>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    let label_col = headers
        .iter()
        .position(|h| h == "label")
        .ok_or(Error::MissingLabelColumn)?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != label_col)
        .map(|(_, h)| h.to_string())
        .collect();
    if feature_names.is_empty() {
        return Err(Error::NoFeatureColumns);
    }

    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for (col, cell) in record.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::NonNumericCell {
                row,
                column: headers.get(col).unwrap_or("?").to_string(),
                value: cell.to_string(),
            })?;
            if col == label_col {
                labels.push(value);
            } else {
                features.push(value);
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyCsv);
    }
    let n = labels.len();
    let d = feature_names.len();
    let x = Array2::from_shape_vec((n, d), features).map_err(|_| Error::DimensionMismatch {
        expected: n * d,
        got: 0,
    })?;
    Ok((x, labels, feature_names))
}

/// Write a dataset as CSV, features first and the label column last,
/// floats at 17 significant digits.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    let d = dataset.n_features();
    let names: Vec<String> = match &dataset.feature_names {
        Some(names) => names.clone(),
        None => (0..d).map(|i| format!("x{i}")).collect(),
    };
    let mut header = names;
    header.push("label".to_string());
    writer.write_record(&header)?;
    for (row, &label) in dataset.x.rows().into_iter().zip(&dataset.y) {
        let mut record: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        record.push(format!("{label}"));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Map raw labels to +/-1 by a predicate (true means +1).
pub fn relabel(y_raw: &[f64], positive: impl Fn(f64) -> bool) -> Vec<i8> {
    y_raw
        .iter()
        .map(|&v| if positive(v) { 1 } else { -1 })
        .collect()
}

/// Per-feature min/max statistics taken from a training split.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    pub mins: Vec<f64>,
    pub maxs: Vec<f64>,
}

impl Normalizer {
    /// Fit on the training split only; validation/test values scaled with
    /// these statistics may land outside [0, 1] and are not clipped.
    pub fn fit(train: &Dataset) -> Self {
        let d = train.n_features();
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        for row in train.x.rows() {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        Normalizer { mins, maxs }
    }

    /// x' = (x - min) / (max - min); constant features map to 0.
    pub fn apply(&self, dataset: &Dataset) -> Result<Dataset> {
        let x = self.apply_features(dataset.x.view())?;
        Ok(Dataset {
            x,
            y: dataset.y.clone(),
            feature_names: dataset.feature_names.clone(),
        })
    }

    pub fn apply_features(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.mins.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mins.len(),
                got: x.ncols(),
            });
        }
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                let range = self.maxs[j] - self.mins[j];
                *v = if range == 0.0 {
                    0.0
                } else {
                    (*v - self.mins[j]) / range
                };
            }
        }
        Ok(out)
    }
}

/// Seeded shuffle into disjoint 70/30-style pools, then draw the requested
/// subsample sizes: training from the first pool, validation and test
/// disjointly from the second.
pub fn split_and_subsample(
    dataset: &Dataset,
    n_train: usize,
    n_val: usize,
    n_test: usize,
    train_frac: f64,
    seed: u64,
) -> Result<(Dataset, Dataset, Dataset)> {
    if !(0.0..1.0).contains(&train_frac) || train_frac == 0.0 {
        return Err(Error::InvalidParameter(
            "train_frac must be in (0, 1)".into(),
        ));
    }
    let n = dataset.n_samples();
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);

    let pool_train_len = ((n as f64) * train_frac).round() as usize;
    let (pool_train, pool_rest) = indices.split_at(pool_train_len.min(n));
    if pool_train.len() < n_train {
        return Err(Error::PoolTooSmall {
            requested: n_train,
            available: pool_train.len(),
        });
    }
    if pool_rest.len() < n_val + n_test {
        return Err(Error::PoolTooSmall {
            requested: n_val + n_test,
            available: pool_rest.len(),
        });
    }
    let train = dataset.select(&pool_train[..n_train]);
    let val = dataset.select(&pool_rest[..n_val]);
    let test = dataset.select(&pool_rest[n_val..n_val + n_test]);
    Ok((train, val, test))
}

/// Two spherical Gaussian clusters inside [0, 1]^d whose means are
/// `separation` apart (coordinates clamped to the box). Cluster spread is
/// 0.05 per coordinate, so separation 0.3 is six standard deviations.
pub fn synth_blobs(n: usize, d: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if n < 2 || d == 0 {
        return Err(Error::InvalidParameter("need n >= 2 and d >= 1".into()));
    }
    if separation < 0.0 {
        return Err(Error::InvalidParameter("separation must be >= 0".into()));
    }
    const SIGMA: f64 = 0.05;
    let offset = separation / 2.0 / (d as f64).sqrt();
    let normal = Normal::new(0.0, SIGMA).expect("valid sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, d));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let label: i8 = if i % 2 == 0 { 1 } else { -1 };
        let center = 0.5 + f64::from(label) * offset;
        for j in 0..d {
            x[[i, j]] = (center + normal.sample(&mut rng)).clamp(0.0, 1.0);
        }
        y.push(label);
    }
    Dataset::new(x, y)
}

/// Uniform samples on [0, 1]^2 labeled by quadrant parity around the
/// center. Both class means sit at the center, which makes this the
/// designed failure case for centroid classifiers in raw data space.
pub fn synth_xor(n: usize, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidParameter("need n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, 2));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let a: f64 = rng.random_range(0.0..1.0);
        let b: f64 = rng.random_range(0.0..1.0);
        x[[i, 0]] = a;
        x[[i, 1]] = b;
        y.push(if (a - 0.5) * (b - 0.5) > 0.0 { 1 } else { -1 });
    }
    Dataset::new(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_basic_csv() {
        let f = write_temp("a,b,label\n1.0,2.0,1\n3.0,4.0,-1\n");
        let ds = load_csv(f.path()).unwrap();
        assert_eq!(ds.n_samples(), 2);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.y, vec![1, -1]);
        assert_eq!(ds.x, array![[1.0, 2.0], [3.0, 4.0]]);
        assert_eq!(
            ds.feature_names.as_deref(),
            Some(&["a".to_string(), "b".to_string()][..])
        );
    }

    #[test]
    fn load_accepts_zero_as_negative() {
        let f = write_temp("a,label\n1.0,0\n2.0,1\n");
        let ds = load_csv(f.path()).unwrap();
        assert_eq!(ds.y, vec![-1, 1]);
    }

    #[test]
    fn load_label_only_file_is_an_error() {
        let f = write_temp("label\n1\n-1\n");
        assert!(matches!(load_csv(f.path()), Err(Error::NoFeatureColumns)));
    }

    #[test]
    fn load_missing_label_column() {
        let f = write_temp("a,b\n1.0,2.0\n");
        assert!(matches!(load_csv(f.path()), Err(Error::MissingLabelColumn)));
    }

    #[test]
    fn load_empty_file() {
        let f = write_temp("a,label\n");
        assert!(matches!(load_csv(f.path()), Err(Error::EmptyCsv)));
    }

    #[test]
    fn load_non_numeric_cell() {
        let f = write_temp("a,label\nfoo,1\n");
        match load_csv(f.path()) {
            Err(Error::NonNumericCell { row, column, value }) => {
                assert_eq!(row, 0);
                assert_eq!(column, "a");
                assert_eq!(value, "foo");
            }
            other => panic!("expected NonNumericCell, got {other:?}"),
        }
    }

    #[test]
    fn load_bad_label_value() {
        let f = write_temp("a,label\n1.0,7\n");
        assert!(matches!(load_csv(f.path()), Err(Error::BadLabel { .. })));
    }

    #[test]
    fn relabel_cases() {
        // Digit-style raw labels: digits up to 4 are the positive class.
        assert_eq!(relabel(&[3.0, 7.0], |v| v <= 4.0), vec![1, -1]);
        assert_eq!(relabel(&[0.0, 9.0, 4.0], |_| true), vec![1, 1, 1]);
        // Letter index split A-M (0..=12) vs N-Z.
        assert_eq!(relabel(&[0.0, 12.0, 13.0], |v| v <= 12.0), vec![1, 1, -1]);
    }

    #[test]
    fn normalizer_basic_and_degenerate() {
        let train = Dataset::new(array![[0.0, 5.0], [5.0, 5.0], [10.0, 5.0]], vec![1, -1, 1]).unwrap();
        let norm = Normalizer::fit(&train);
        let out = norm.apply(&train).unwrap();
        assert_eq!(out.x.column(0).to_vec(), vec![0.0, 0.5, 1.0]);
        // Constant column maps to zero.
        assert_eq!(out.x.column(1).to_vec(), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn normalizer_does_not_clip_out_of_range() {
        let train = Dataset::new(array![[0.0], [10.0]], vec![1, -1]).unwrap();
        let norm = Normalizer::fit(&train);
        let test = Dataset::new(array![[12.0]], vec![1]).unwrap();
        let out = norm.apply(&test).unwrap();
        assert!((out.x[[0, 0]] - 1.2).abs() <= 1e-15);
    }

    #[test]
    fn normalizer_idempotent_after_first_pass() {
        let train = Dataset::new(array![[0.0], [4.0], [8.0]], vec![1, -1, 1]).unwrap();
        let once = Normalizer::fit(&train).apply(&train).unwrap();
        let twice = Normalizer::fit(&once).apply(&once).unwrap();
        assert_eq!(once.x, twice.x);
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let ds = synth_blobs(100, 3, 0.2, 5).unwrap();
        let (tr1, va1, te1) = split_and_subsample(&ds, 40, 10, 10, 0.7, 9).unwrap();
        let (tr2, ..) = split_and_subsample(&ds, 40, 10, 10, 0.7, 9).unwrap();
        assert_eq!(tr1, tr2);
        assert_eq!(tr1.n_samples(), 40);
        assert_eq!(va1.n_samples(), 10);
        assert_eq!(te1.n_samples(), 10);

        // Disjointness by value: every row is unique in this dataset.
        let key = |row: ndarray::ArrayView1<f64>| {
            row.iter().map(|v| v.to_bits()).collect::<Vec<u64>>()
        };
        let train_keys: std::collections::HashSet<_> = tr1.x.rows().into_iter().map(key).collect();
        for row in va1.x.rows().into_iter().chain(te1.x.rows()) {
            assert!(!train_keys.contains(&key(row)));
        }
        let val_keys: std::collections::HashSet<_> = va1.x.rows().into_iter().map(key).collect();
        for row in te1.x.rows() {
            assert!(!val_keys.contains(&key(row)));
        }
    }

    #[test]
    fn split_rejects_oversized_requests() {
        let ds = synth_blobs(20, 2, 0.2, 5).unwrap();
        assert!(matches!(
            split_and_subsample(&ds, 40, 1, 1, 0.7, 0),
            Err(Error::PoolTooSmall { .. })
        ));
        assert!(matches!(
            split_and_subsample(&ds, 10, 4, 4, 0.7, 0),
            Err(Error::PoolTooSmall { .. })
        ));
    }

    #[test]
    fn blobs_shapes_and_balance() {
        let ds = synth_blobs(101, 4, 0.3, 1).unwrap();
        assert_eq!(ds.n_samples(), 101);
        assert_eq!(ds.n_features(), 4);
        assert!(ds.x.iter().all(|&v| (0.0..=1.0).contains(&v)));
        let pos = ds.y.iter().filter(|&&y| y == 1).count();
        assert_eq!(pos, 51);
    }

    #[test]
    fn xor_means_coincide_at_center() {
        let ds = synth_xor(4000, 3).unwrap();
        let mut mean_pos = [0.0f64; 2];
        let mut mean_neg = [0.0f64; 2];
        let (mut np, mut nn) = (0.0f64, 0.0f64);
        for (row, &y) in ds.x.rows().into_iter().zip(&ds.y) {
            if y == 1 {
                np += 1.0;
                mean_pos[0] += row[0];
                mean_pos[1] += row[1];
            } else {
                nn += 1.0;
                mean_neg[0] += row[0];
                mean_neg[1] += row[1];
            }
        }
        for k in 0..2 {
            mean_pos[k] /= np;
            mean_neg[k] /= nn;
            assert!((mean_pos[k] - mean_neg[k]).abs() < 0.05);
            assert!((mean_pos[k] - 0.5).abs() < 0.05);
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ds = synth_blobs(25, 3, 0.17, 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.csv");
        save_csv(&ds, &path).unwrap();
        let back = load_csv(&path).unwrap();
        assert_eq!(ds.x, back.x);
        assert_eq!(ds.y, back.y);
    }
}
