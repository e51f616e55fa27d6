//! Baseline GreaterThan: binary search for the most significant differing bit.
//!
//! Each search step runs an EQ fingerprint test on the left half of the current
//! interval at per-call error delta = epsilon/(2n); the search runs a fixed
//! schedule of exactly ceil(log2 n) steps (paths that converge early pad with
//! degenerate checks, so the transcript is the same on every input and every
//! run). A final full-string EQ acts as an equality guard so that
//! x = y yields false deterministically (every EQ is one-sided). By a union
//! bound over the ceil(log2 n) + 1 fingerprint tests, the total error is at
//! most (ceil(log2 n) + 1) * epsilon/(2n) <= epsilon/2.
//!
//! Transcript: exactly k_d*(ceil(log2 n) + 1) + 3 bits with
//! k_d = ceil(log2(2n/epsilon)) — the fingerprint bits plus a 2-bit exchange of
//! the candidate position's input bits plus 1 result bit. In the shape
//! C1*log2(n/epsilon)*ceil(log2 n) + C1' this is C1 = 1 (up to the +1 guard
//! round) and C1' = 3.

use crate::bits::BitString;
use crate::coins::CoinSource;
use crate::eq::eq_rounds;
use crate::error::ProtocolError;
use crate::transcript::{Party, ProtocolResult, Transcript};
use crate::util::{ceil_log2, ceil_log2_recip};

/// Fingerprint rounds per EQ call: k_d = ceil(log2(2n/epsilon)), i.e. per-call
/// error delta = epsilon/(2n).
pub fn baseline_eq_rounds(n: usize, epsilon: f64) -> u32 {
    ceil_log2_recip(epsilon / (2.0 * n as f64))
}

/// Deterministic worst-case transcript size of `gt_baseline` in bits.
pub fn gt_baseline_bound(n: usize, epsilon: f64) -> u64 {
    let kd = u64::from(baseline_eq_rounds(n, epsilon));
    kd * (u64::from(ceil_log2(n)) + 1) + 3
}

/// Decides x > y (unsigned) with error at most epsilon. x = y gives false with
/// probability 1.
pub fn gt_baseline(
    x: &BitString,
    y: &BitString,
    epsilon: f64,
    coins: &mut impl CoinSource,
) -> Result<ProtocolResult<bool>, ProtocolError> {
    if x.len() != y.len() {
        return Err(ProtocolError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ProtocolError::InvalidParams(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    let n = x.len();
    let kd = baseline_eq_rounds(n, epsilon);
    let mut transcript = Transcript::new();

    // Invariant (when no EQ errs): the first differing index lies in [lo, hi].
    // The schedule is fixed at ceil(log2 n) steps — the longest halving path —
    // so the transcript is the same on every input; paths that pin down the
    // candidate early pad with checks of the degenerate interval.
    let (mut lo, mut hi) = (1, n);
    for _ in 0..ceil_log2(n) {
        if lo < hi {
            let mid = (lo + hi) / 2;
            if eq_rounds(x, y, lo, mid, kd, coins, &mut transcript) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        } else {
            let _ = eq_rounds(x, y, lo, lo, kd, coins, &mut transcript);
        }
    }
    let i = lo;

    // Exchange the candidate bits, then guard against x = y with a full EQ:
    // a one-sided "equal" on truly equal strings is certain, so x = y can
    // never be reported as greater.
    transcript.charge(Party::Alice, 1);
    transcript.charge(Party::Bob, 1);
    let guard_equal = eq_rounds(x, y, 1, n, kd, coins, &mut transcript);
    let output = !guard_equal && x.get(i) != y.get(i) && x.get(i) == 1;
    transcript.charge(Party::Alice, 1);

    debug_assert_eq!(transcript.total_bits(), gt_baseline_bound(n, epsilon));
    Ok(ProtocolResult { output, transcript })
}
