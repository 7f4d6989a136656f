//! Deterministic seed derivation.
//!
//! A run takes a single base seed; every stage and every per-record stream
//! derives its own seed from it. Derivations depend only on (base, label) or
//! (base, index), never on iteration order, so parallel scheduling and record
//! reordering cannot change outputs.

/// 64-bit FNV-1a over a byte string.
fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// SplitMix64 finalizer; decorrelates nearby inputs.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for a named stage (or named record) of a run.
pub fn derive_seed(base: u64, label: &str) -> u64 {
    splitmix64(base ^ fnv1a64(label.as_bytes()))
}

/// Seed for the `index`-th parallel stream of a stage.
pub fn derive_stream(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index ^ 0xa076_1d64_78bd_642f))
}
