//! Small numeric helpers shared across protocol modules.

/// ceil(log2(n)) for n >= 1; 0 for n = 1.
pub(crate) fn ceil_log2(n: usize) -> u32 {
    assert!(n >= 1);
    if n == 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Smallest k >= 1 with 2^(-k) <= epsilon, robust to float slop at exact
/// powers of two.
pub(crate) fn ceil_log2_recip(epsilon: f64) -> u32 {
    debug_assert!(epsilon > 0.0 && epsilon < 1.0);
    let raw = -epsilon.log2();
    let k = if (raw - raw.round()).abs() < 1e-9 { raw.round() } else { raw.ceil() };
    (k as u32).max(1)
}
