//! Spreading-code generation.
//!
//! Code families come from pairs of maximal-length shift-register sequences
//! combined Gold-style (the two generators plus all cyclic-offset XOR
//! combinations), giving `N + 2` codes of length `N = 2^m - 1`. Lengths
//! without a wired-in generator pair fall back to seeded random bipolar
//! codes, flagged in the result. Arbitrary codes can also be constructed
//! from raw chip vectors, e.g. when loaded from a file.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::seeds::STREAM_CODES;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodeError {
    #[error("spreading gain must be at least 2, got {0}")]
    LengthTooShort(usize),
    #[error("at least one user is required")]
    NoUsers,
    #[error("{requested} users exceed the {capacity} codes of the length-{n} family")]
    CapacityExceeded { requested: usize, capacity: usize, n: usize },
    #[error("chip {index} is {value}, expected +1 or -1")]
    BadChip { index: usize, value: f64 },
    #[error("code is empty or all-zero")]
    DegenerateCode,
}

/// Unit-norm chip vector assigned to one user.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadingCode {
    chips: Vec<f64>,
}

impl SpreadingCode {
    /// Builds a code from bipolar chips, normalizing to unit energy.
    pub fn from_bipolar(chips: &[f64]) -> Result<Self, CodeError> {
        if chips.is_empty() {
            return Err(CodeError::DegenerateCode);
        }
        for (index, &value) in chips.iter().enumerate() {
            if value != 1.0 && value != -1.0 {
                return Err(CodeError::BadChip { index, value });
            }
        }
        let scale = 1.0 / libm::sqrt(chips.len() as f64);
        Ok(SpreadingCode { chips: chips.iter().map(|c| c * scale).collect() })
    }

    fn from_bits(bits: &[u8]) -> Self {
        let scale = 1.0 / libm::sqrt(bits.len() as f64);
        SpreadingCode {
            chips: bits.iter().map(|&b| if b == 0 { scale } else { -scale }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn chips(&self) -> &[f64] {
        &self.chips
    }
}

/// A generated set of codes, one per user.
#[derive(Debug, Clone)]
pub struct CodeFamily {
    pub codes: Vec<SpreadingCode>,
    /// True when no shift-register family exists for the requested length
    /// and seeded random codes were used instead.
    pub used_fallback: bool,
}

/// Feedback masks (exponents below the degree) for one generator pair per
/// supported length. Both polynomials are primitive, so each register runs
/// the full `2^m - 1` period.
fn generator_pair(n: usize) -> Option<(u32, u32, u32)> {
    match n {
        7 => Some((3, 0b011, 0b101)),        // x^3+x+1, x^3+x^2+1
        15 => Some((4, 0b0011, 0b1001)),     // x^4+x+1, x^4+x^3+1
        31 => Some((5, 0b00101, 0b11101)),   // x^5+x^2+1, x^5+x^4+x^3+x^2+1
        63 => Some((6, 0b000011, 0b100111)), // x^6+x+1, x^6+x^5+x^2+x+1
        _ => None,
    }
}

/// Runs a Fibonacci shift register of the given degree for one full period.
fn m_sequence(degree: u32, mask: u32) -> Vec<u8> {
    let n = (1usize << degree) - 1;
    let mut state: u32 = 1;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push((state & 1) as u8);
        let feedback = (state & mask).count_ones() & 1;
        state = (state >> 1) | (feedback << (degree - 1));
    }
    out
}

fn xor_rotated(u: &[u8], v: &[u8], offset: usize) -> Vec<u8> {
    let n = u.len();
    (0..n).map(|i| u[i] ^ v[(i + offset) % n]).collect()
}

/// Generates `k` spreading codes of length `n` for users `0..k`.
///
/// User 0 is conventionally the desired user. For supported lengths the
/// family holds `n + 2` codes; asking for more is an error. Unsupported
/// lengths produce seeded random bipolar codes with `used_fallback` set.
pub fn gen_spreading_codes(n: usize, k: usize, seed: u64) -> Result<CodeFamily, CodeError> {
    if n < 2 {
        return Err(CodeError::LengthTooShort(n));
    }
    if k == 0 {
        return Err(CodeError::NoUsers);
    }
    if let Some((degree, mask_a, mask_b)) = generator_pair(n) {
        let capacity = n + 2;
        if k > capacity {
            return Err(CodeError::CapacityExceeded { requested: k, capacity, n });
        }
        let u = m_sequence(degree, mask_a);
        let v = m_sequence(degree, mask_b);
        let mut bit_codes = Vec::with_capacity(capacity);
        bit_codes.push(u.clone());
        bit_codes.push(v.clone());
        for offset in 0..n {
            bit_codes.push(xor_rotated(&u, &v, offset));
        }
        let codes = bit_codes.iter().take(k).map(|bits| SpreadingCode::from_bits(bits)).collect();
        Ok(CodeFamily { codes, used_fallback: false })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(STREAM_CODES);
        let mut codes: Vec<SpreadingCode> = Vec::with_capacity(k);
        let mut attempts = 0;
        while codes.len() < k {
            attempts += 1;
            if attempts > 64 * k {
                return Err(CodeError::CapacityExceeded { requested: k, capacity: codes.len(), n });
            }
            let bits: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
            let code = SpreadingCode::from_bits(&bits);
            if codes.iter().all(|c| c != &code) {
                codes.push(code);
            }
        }
        Ok(CodeFamily { codes, used_fallback: true })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_period(bits: &[u8]) -> usize {
        let n = bits.len();
        'candidate: for p in 1..=n {
            if n % p != 0 {
                continue;
            }
            for i in 0..n {
                if bits[i] != bits[(i + p) % n] {
                    continue 'candidate;
                }
            }
            return p;
        }
        n
    }

    #[test]
    fn shift_registers_run_full_period_and_are_balanced() {
        for n in [7usize, 15, 31, 63] {
            let (degree, mask_a, mask_b) = generator_pair(n).unwrap();
            for mask in [mask_a, mask_b] {
                let seq = m_sequence(degree, mask);
                assert_eq!(seq.len(), n);
                assert_eq!(minimal_period(&seq), n, "n={n} mask={mask:b}");
                let ones: usize = seq.iter().map(|&b| b as usize).sum();
                assert_eq!(ones, (n + 1) / 2, "n={n} mask={mask:b}");
            }
        }
    }

    #[test]
    fn family_has_full_size_unit_norm_distinct_codes() {
        let fam = gen_spreading_codes(15, 17, 0).unwrap();
        assert!(!fam.used_fallback);
        assert_eq!(fam.codes.len(), 17);
        for (i, code) in fam.codes.iter().enumerate() {
            let e: f64 = code.chips().iter().map(|c| c * c).sum();
            assert!((e - 1.0).abs() < 1e-12, "code {i} energy {e}");
            for other in &fam.codes[i + 1..] {
                assert_ne!(code, other);
            }
        }
    }

    #[test]
    fn cross_correlations_stay_in_the_family_value_set() {
        // Zero-offset correlations between distinct family members, scaled
        // back to integer counts. The generating pair fixes this set; it was
        // computed by exhaustive enumeration of the family below and frozen.
        let fam = gen_spreading_codes(15, 17, 0).unwrap();
        let n = 15.0;
        let mut seen = alloc::vec::Vec::new();
        for i in 0..fam.codes.len() {
            for j in i + 1..fam.codes.len() {
                let c: f64 = fam.codes[i]
                    .chips()
                    .iter()
                    .zip(fam.codes[j].chips())
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    * n;
                let rounded = libm::round(c) as i32;
                assert!((c - rounded as f64).abs() < 1e-9);
                if !seen.contains(&rounded) {
                    seen.push(rounded);
                }
            }
        }
        seen.sort_unstable();
        assert_eq!(seen, alloc::vec![-5, -1, 3, 7]);
    }

    #[test]
    fn capacity_overflow_is_an_error() {
        let err = gen_spreading_codes(15, 18, 0).unwrap_err();
        assert_eq!(err, CodeError::CapacityExceeded { requested: 18, capacity: 17, n: 15 });
    }

    #[test]
    fn unsupported_length_falls_back_to_random_codes() {
        let fam = gen_spreading_codes(16, 6, 9).unwrap();
        assert!(fam.used_fallback);
        assert_eq!(fam.codes.len(), 6);
        for (i, code) in fam.codes.iter().enumerate() {
            assert_eq!(code.len(), 16);
            let e: f64 = code.chips().iter().map(|c| c * c).sum();
            assert!((e - 1.0).abs() < 1e-12);
            for other in &fam.codes[i + 1..] {
                assert_ne!(code, other);
            }
        }
        // Same seed reproduces the same fallback family.
        let again = gen_spreading_codes(16, 6, 9).unwrap();
        assert_eq!(fam.codes, again.codes);
    }

    #[test]
    fn bipolar_constructor_normalizes_and_validates() {
        let code = SpreadingCode::from_bipolar(&[1.0, -1.0, 1.0, 1.0]).unwrap();
        let e: f64 = code.chips().iter().map(|c| c * c).sum();
        assert!((e - 1.0).abs() < 1e-12);
        assert_eq!(code.chips()[0], 0.5);
        assert!(matches!(
            SpreadingCode::from_bipolar(&[1.0, 0.0]),
            Err(CodeError::BadChip { index: 1, .. })
        ));
        assert!(matches!(SpreadingCode::from_bipolar(&[]), Err(CodeError::DegenerateCode)));
    }
}
