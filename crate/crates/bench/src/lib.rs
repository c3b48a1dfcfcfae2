//! Shared fixtures for the criterion benches.

use linea_core::evaluation::scaled_spec;
use linea_core::{generate_synthetic, BuildingRecord};

/// Deterministic generated scene of roughly `n` buildings.
pub fn scene(n: usize) -> Vec<BuildingRecord> {
    let spec = scaled_spec(n, 900 + n as u64).expect("bench sizes are valid");
    generate_synthetic(&spec).expect("bench scenes generate").0
}
