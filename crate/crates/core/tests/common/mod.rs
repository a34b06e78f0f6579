#![allow(dead_code)]

use std::path::PathBuf;

use ffa::data_io::{normalize_01, read_idx, Dataset};

/// Seed used to draw the MNIST subsets shared by the long-running tests.
pub const SUBSET_SEED: u64 = 2024;
pub const TRAIN_ROWS: usize = 10_000;
pub const TEST_ROWS: usize = 1_000;

/// `$FFA_DATA_DIR`, or `data/` at the workspace root.
pub fn data_dir() -> PathBuf {
    std::env::var_os("FFA_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

pub fn data_file(name: &str) -> PathBuf {
    let path = data_dir().join(name);
    assert!(
        path.exists(),
        "{} not found; run scripts/fetch_data.sh or set FFA_DATA_DIR",
        path.display()
    );
    path
}

fn load(images: &str, labels: &str) -> Dataset {
    let ds = read_idx(&data_file(images), Some(&data_file(labels))).expect("readable IDX files");
    normalize_01(ds)
}

/// Normalized MNIST training subset (10k rows).
pub fn mnist_train() -> Dataset {
    load("train-images-idx3-ubyte", "train-labels-idx1-ubyte").subsample(TRAIN_ROWS, SUBSET_SEED)
}

/// Normalized MNIST test subset (1k rows).
pub fn mnist_test() -> Dataset {
    load("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte").subsample(TEST_ROWS, SUBSET_SEED)
}

/// First sneaker (class 7) of the Fashion-MNIST sample, normalized.
pub fn fashion_shoe() -> Vec<f64> {
    let ds = load("fashion-sample-images-idx3-ubyte", "fashion-sample-labels-idx1-ubyte");
    let labels = ds.labels.as_ref().expect("labelled sample");
    let i = labels.iter().position(|&l| l == 7).expect("a sneaker in the sample");
    ds.features.row(i).to_vec()
}
