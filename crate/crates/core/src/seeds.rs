//! Deterministic seed derivation.
//!
//! Every run derives all of its randomness from one master seed. Trials,
//! covariance experiments, and the per-trial generator streams get
//! decorrelated child seeds through SplitMix64 so results are reproducible
//! bit for bit regardless of execution order.

/// Derives the `index`-th child seed from a master seed (SplitMix64 mixing).
pub fn child_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ChaCha stream carrying the white noise vectors of a trial.
pub const STREAM_NOISE: u64 = 1;
/// ChaCha stream carrying the fading oscillator draws.
pub const STREAM_CHANNEL: u64 = 2;
/// ChaCha stream for fallback (non shift-register) spreading codes.
pub const STREAM_CODES: u64 = 3;
/// Base id for per-user symbol streams; user `k` reads stream `BASE + k`.
pub const STREAM_SYMBOLS_BASE: u64 = 16;
