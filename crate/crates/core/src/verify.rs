//! Verification oracles (placeholder).
