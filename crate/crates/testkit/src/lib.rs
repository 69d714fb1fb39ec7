//! Test support: seeded instance generators and brute-force oracles.
//!
//! The oracles deliberately avoid the library's search and canonicalization
//! code; they only read diagram structure and mode declarations.

pub mod check;
pub mod gen;
pub mod oracle;

/// Case count requested through `PROPTEST_CASES`, or 0.
pub fn cases() -> u32 {
    std::env::var("PROPTEST_CASES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}
