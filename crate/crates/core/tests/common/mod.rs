//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use cpkw_core::cp::{parse_proof, parse_system, Proof, System};

/// Path of a bundled data file.
pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Contents of a bundled data file.
pub fn data(name: &str) -> String {
    fs::read_to_string(data_path(name)).unwrap_or_else(|e| panic!("reading data/{name}: {e}"))
}

/// Parses a bundled system/proof pair by stem, e.g. "sum".
pub fn bundled(stem: &str) -> (System, Proof) {
    let sys = parse_system(&data(&format!("{stem}.sys")))
        .unwrap_or_else(|e| panic!("data/{stem}.sys: {e}"));
    let proof = parse_proof(&data(&format!("{stem}.proof")))
        .unwrap_or_else(|e| panic!("data/{stem}.proof: {e}"));
    (sys, proof)
}

/// The stems of every bundled refutation.
pub const BUNDLED: [&str; 5] = ["unit", "sum", "div", "mul", "caterpillar"];

/// The n-bit assignment encoded by mask, MSB-first: bit i (1-based) of the
/// result is mask bit (n - i).
pub fn alpha_bits(mask: u32, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((mask >> (n - 1 - i)) & 1) as u8).collect()
}

/// Splits a full assignment into the per-side projections of a partition.
pub fn project(alpha: &[u8], side: &[usize]) -> Vec<u8> {
    side.iter().map(|&i| alpha[i - 1]).collect()
}
