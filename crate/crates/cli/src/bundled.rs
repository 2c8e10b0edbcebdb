//! The bundled benchmark dataset.

use std::path::PathBuf;

use lmls_core::oracles::SparseDataset;

pub const SAMPLES: usize = 500;
pub const FEATURES: usize = 20;
const DENSITY: f64 = 0.5;
const LABEL_NOISE: f64 = 0.5;
const SEED: u64 = 2024;

/// Path of `data/synthetic500.svm` inside this crate.
pub fn path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join("synthetic500.svm")
}

/// The generator behind the bundled file.
pub fn generate() -> SparseDataset {
    SparseDataset::synthetic(SAMPLES, FEATURES, DENSITY, LABEL_NOISE, SEED)
}
