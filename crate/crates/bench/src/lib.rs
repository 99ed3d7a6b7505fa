//! Benchmark-only crate; see `benches/kernels.rs`.
//!
//! Shared helpers for setting up representative blocks.

pub use shg_core::{Block, ModelParams};

/// Resonant unit-coupling parameters used across the benchmarks.
pub fn unit_resonant() -> ModelParams {
    ModelParams::resonant(1.0, 0.0).expect("valid parameters")
}

/// The k=0 block of a given size.
pub fn even_block(s: usize) -> Block {
    Block::new(0, s).expect("valid block")
}
