//! One-sided-error equality testing by random inner-product fingerprints.
//!
//! For k shared random n-bit strings r_1..r_k, Alice sends the inner products
//! <x, r_i> mod 2 (k bits total); Bob compares them against his own. Identical
//! inputs always compare equal. Unequal inputs collide on each fingerprint with
//! probability exactly 1/2 over the coins (x xor y is a fixed nonzero vector),
//! so the false-"equal" probability is exactly 2^(-k).

use crate::bits::BitString;
use crate::coins::CoinSource;
use crate::error::ProtocolError;
use crate::transcript::{Party, ProtocolResult, Transcript};
use crate::util::ceil_log2_recip;

/// Parameters of the equality protocol: k fingerprint rounds, error 2^(-k).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EqParams {
    k: u32,
}

impl EqParams {
    pub fn new(k: u32) -> Result<Self, ProtocolError> {
        if k == 0 {
            return Err(ProtocolError::InvalidParams("k must be >= 1".into()));
        }
        Ok(EqParams { k })
    }

    /// Smallest k achieving error at most `epsilon`.
    pub fn for_epsilon(epsilon: f64) -> Result<Self, ProtocolError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ProtocolError::InvalidParams(format!(
                "epsilon must lie in (0,1), got {epsilon}"
            )));
        }
        EqParams::new(ceil_log2_recip(epsilon))
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// The exact false-"equal" probability 2^(-k).
    pub fn epsilon(&self) -> f64 {
        2f64.powi(-(self.k as i32))
    }
}

/// k fingerprint rounds restricted to the slice [lo..=hi] (1-based, inclusive).
/// Draws (hi-lo+1) coins per round and charges exactly k bits from Alice.
/// Returns true when every fingerprint pair matched ("equal").
pub(crate) fn eq_rounds(
    x: &BitString,
    y: &BitString,
    lo: usize,
    hi: usize,
    k: u32,
    coins: &mut impl CoinSource,
    transcript: &mut Transcript,
) -> bool {
    debug_assert!(1 <= lo && lo <= hi && hi <= x.len() && hi <= y.len());
    let width = hi - lo + 1;
    let start = lo - 1;
    let mut equal = true;
    for _ in 0..k {
        let mut acc = 0u64;
        let mut done = 0;
        while done < width {
            let chunk = (width - done).min(64) as u32;
            let r = coins.draw_word(chunk);
            // r's low bits are zero, so no extra masking is needed.
            acc ^= (x.extract_word(start + done) ^ y.extract_word(start + done)) & r;
            done += chunk as usize;
        }
        if acc.count_ones() & 1 == 1 {
            equal = false;
        }
    }
    transcript.charge(Party::Alice, k);
    equal
}

/// Runs the equality protocol on the full strings. Output true means "equal".
pub fn eq_protocol(
    x: &BitString,
    y: &BitString,
    params: EqParams,
    coins: &mut impl CoinSource,
) -> Result<ProtocolResult<bool>, ProtocolError> {
    if x.len() != y.len() {
        return Err(ProtocolError::LengthMismatch { left: x.len(), right: y.len() });
    }
    let mut transcript = Transcript::new();
    let output = eq_rounds(x, y, 1, x.len(), params.k, coins, &mut transcript);
    Ok(ProtocolResult { output, transcript })
}
