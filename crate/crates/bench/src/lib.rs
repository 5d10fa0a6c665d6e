//! Fixtures shared by the benchmarks in `benches/`.

use std::path::{Path, PathBuf};

use trl_core::format::read_model_file;
use trl_core::hasse::WitnessLibrary;
use trl_core::sullivan::SullivanModel;

pub fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

/// The total model of a file under `data/`.
pub fn model(rel: &str) -> SullivanModel {
    read_model_file(&data(rel)).expect("fixture model").model().clone()
}

pub fn library(name: &str) -> WitnessLibrary {
    WitnessLibrary::load(&data(&format!("witnesses/{name}/library.toml"))).expect("fixture library")
}
