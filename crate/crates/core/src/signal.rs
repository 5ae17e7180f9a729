//! Chip-level structure of the received vector.
//!
//! With spreading gain `N` and `L_p` resolvable paths, the receiver window
//! spans `M = N + L_p - 1` chips per symbol. The window sees three symbols
//! of each user: the current one through the code/channel convolution, plus
//! edge leakage from the previous and next symbols. All three enter as
//! matrix-vector products so the second-order statistics can reuse the same
//! building blocks.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::ChannelState;
use crate::codes::SpreadingCode;
use crate::linalg::{C64, CMat};

/// Window length for a given code length and path count.
pub fn window_len(n: usize, num_paths: usize) -> usize {
    n + num_paths - 1
}

/// Code-shift matrix: `M x L_p`, column `j` holds the code shifted down by
/// `j` chips. Multiplying by the path gains yields the composite signature
/// of the current symbol.
pub fn build_constraint_matrix(code: &SpreadingCode, num_paths: usize) -> CMat {
    let n = code.len();
    let m = window_len(n, num_paths);
    CMat::from_fn(m, num_paths, |r, c| {
        if r >= c && r - c < n {
            C64::new(code.chips()[r - c], 0.0)
        } else {
            C64::ZERO
        }
    })
}

/// Edge-leakage matrices for the previous and next symbols, `M x N` each.
///
/// `pre` carries the tail of the previous symbol through the delayed paths
/// (upper-right band, last rows zero); `post` carries the head of the next
/// symbol (lower-left band, first rows zero). With a single path both are
/// zero.
#[derive(Debug, Clone)]
pub struct IsiMatrices {
    pub pre: CMat,
    pub post: CMat,
}

pub fn build_isi_matrices(h_prev: &[C64], h_next: &[C64], n: usize) -> IsiMatrices {
    let num_paths = h_prev.len();
    debug_assert_eq!(num_paths, h_next.len());
    let m = window_len(n, num_paths);
    let pre = CMat::from_fn(m, n, |r, c| {
        // Chip r of the window picks up path f = r + N - c of the previous
        // symbol whenever that delay exists.
        let f = r + n - c;
        if (1..num_paths).contains(&f) {
            h_prev[f]
        } else {
            C64::ZERO
        }
    });
    let post = CMat::from_fn(m, n, |r, c| {
        if r >= n + c {
            let f = r - n - c;
            if f + 1 < num_paths {
                return h_next[f];
            }
        }
        C64::ZERO
    });
    IsiMatrices { pre, post }
}

/// One user's contribution vectors at a given symbol: the composite
/// signature of the current symbol and the two edge-leakage vectors.
#[derive(Debug, Clone)]
pub struct UserComponents {
    pub sig: Vec<C64>,
    pub pre: Vec<C64>,
    pub post: Vec<C64>,
}

/// Evaluates every user's component vectors for the channel's current
/// symbol. `c_mats` are the per-user code-shift matrices.
pub fn user_components(
    c_mats: &[CMat],
    codes: &[SpreadingCode],
    channel: &ChannelState,
) -> Vec<UserComponents> {
    debug_assert_eq!(c_mats.len(), codes.len());
    let n = codes[0].len();
    let isi = build_isi_matrices(channel.h_prev(), channel.h_next(), n);
    c_mats
        .iter()
        .zip(codes)
        .map(|(c_mat, code)| {
            let p: Vec<C64> = code.chips().iter().map(|&c| C64::new(c, 0.0)).collect();
            UserComponents {
                sig: c_mat.matvec(channel.h()),
                pre: isi.pre.matvec(&p),
                post: isi.post.matvec(&p),
            }
        })
        .collect()
}

/// Symbols of one user visible in the current window; entries are bipolar,
/// or zero while the user is inactive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolWindow {
    pub prev: f64,
    pub cur: f64,
    pub next: f64,
}

/// Synthesizes the received vector for one symbol:
/// `r = sum_k A_k (b_k sig_k + b_k_prev pre_k + b_k_next post_k) + noise`.
pub fn synth_received(
    components: &[UserComponents],
    amps: &[f64],
    windows: &[SymbolWindow],
    noise: &[C64],
) -> Vec<C64> {
    debug_assert_eq!(components.len(), amps.len());
    debug_assert_eq!(components.len(), windows.len());
    let mut r = noise.to_vec();
    for ((comp, &amp), win) in components.iter().zip(amps).zip(windows) {
        let (wc, wp, wn) = (amp * win.cur, amp * win.prev, amp * win.next);
        for m in 0..r.len() {
            r[m] += wc * comp.sig[m] + wp * comp.pre[m] + wn * comp.post[m];
        }
    }
    r
}

/// Complex white Gaussian noise with total per-chip variance `noise_var`.
pub fn noise_vector(rng: &mut impl rand::Rng, m: usize, noise_var: f64) -> Vec<C64> {
    use rand_distr::StandardNormal;
    let s = libm::sqrt(noise_var / 2.0);
    let mut out = vec![C64::ZERO; m];
    for x in &mut out {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *x = C64::new(re * s, im * s);
    }
    out
}
