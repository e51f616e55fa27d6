//! Degree-1 threshold functions with unbounded integer coefficients and their
//! two-party evaluation under a variable partition.
//!
//! f(x) = 1 iff a_1*x_1 + ... + a_n*x_n <= b, evaluated in exact
//! arbitrary-precision arithmetic. For the two-party protocol, Alice holds the
//! variables of part_A and Bob those of part_B; Alice's local sum x_1 and Bob's
//! complement b - x_2 are mapped order-preservingly into fixed-width unsigned
//! encodings, and one gt_walk run decides x_1 > b - x_2 — f is the negation.
//! Both sides of the comparison may be negative, hence the signed offset
//! encoding over a common range covering every partial sum and b minus every
//! partial sum.

use num_bigint::{BigInt, BigUint};
use num_traits::Signed;

use crate::bits::BitString;
use crate::coins::CoinSource;
use crate::error::ProtocolError;
use crate::transcript::{Party, ProtocolResult, Transcript};
use crate::walk::{gt_walk, WalkParams};

/// f(x) = 1 iff coeffs . x <= bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdFunction {
    coeffs: Vec<BigInt>,
    bound: BigInt,
}

impl ThresholdFunction {
    pub fn new(coeffs: Vec<BigInt>, bound: BigInt) -> Result<Self, ProtocolError> {
        if coeffs.is_empty() {
            return Err(ProtocolError::InvalidParams("need at least one variable".into()));
        }
        Ok(ThresholdFunction { coeffs, bound })
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn bound(&self) -> &BigInt {
        &self.bound
    }

    /// [lo_p, hi_p]: the exact range of partial sums sum_{i in S} a_i*x_i over
    /// all subsets S and 0/1 assignments.
    fn partial_sum_range(&self) -> (BigInt, BigInt) {
        let mut lo = BigInt::ZERO;
        let mut hi = BigInt::ZERO;
        for a in &self.coeffs {
            if a.is_negative() {
                lo += a;
            } else {
                hi += a;
            }
        }
        (lo, hi)
    }

    /// The common encoding range: covers every partial sum and b minus every
    /// partial sum, so both GT operands always encode.
    pub fn encoding_range(&self) -> (BigInt, BigInt) {
        let (lo_p, hi_p) = self.partial_sum_range();
        let lo = (&self.bound - &hi_p).min(lo_p.clone());
        let hi = (&self.bound - &lo_p).max(hi_p.clone());
        (lo, hi)
    }
}

/// Exact evaluation: 1 iff sum a_i*alpha_i <= b.
pub fn eval_threshold(f: &ThresholdFunction, alpha: &[u8]) -> Result<bool, ProtocolError> {
    if alpha.len() != f.n() {
        return Err(ProtocolError::LengthMismatch { left: f.n(), right: alpha.len() });
    }
    let mut sum = BigInt::ZERO;
    for (a, &v) in f.coeffs.iter().zip(alpha) {
        debug_assert!(v <= 1);
        if v == 1 {
            sum += a;
        }
    }
    Ok(sum <= f.bound)
}

/// Width (in bits) of the unsigned encoding covering the common range.
pub fn bit_width(f: &ThresholdFunction) -> usize {
    let (lo, hi) = f.encoding_range();
    let span: BigUint = (hi - lo).try_into().expect("range_hi >= range_lo");
    (span.bits() as usize).max(1)
}

/// Fixed-width big-endian encoding of v - range_lo; order-preserving, so
/// unsigned GT on encodings decides signed GT on values.
pub fn encode_signed(
    v: &BigInt,
    range_lo: &BigInt,
    range_hi: &BigInt,
) -> Result<BitString, ProtocolError> {
    if v < range_lo || v > range_hi {
        return Err(ProtocolError::InvalidParams(format!(
            "value {v} outside encoding range [{range_lo}, {range_hi}]"
        )));
    }
    let span: BigUint = (range_hi - range_lo).try_into().expect("range_hi >= range_lo");
    let width = (span.bits() as usize).max(1);
    let offset: BigUint = (v - range_lo).try_into().expect("v >= range_lo");
    Ok(BitString::from_biguint(&offset, width))
}

/// A two-sided split of the variable indices {1..n}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    part_a: Vec<usize>,
    part_b: Vec<usize>,
    n: usize,
}

impl Partition {
    /// Validates disjointness and coverage of {1..n}; either side may be empty.
    pub fn new(
        part_a: Vec<usize>,
        part_b: Vec<usize>,
        n: usize,
    ) -> Result<Self, ProtocolError> {
        let mut seen = vec![false; n + 1];
        for &i in part_a.iter().chain(&part_b) {
            if i == 0 || i > n {
                return Err(ProtocolError::InvalidParams(format!(
                    "variable index {i} outside 1..={n}"
                )));
            }
            if seen[i] {
                return Err(ProtocolError::InvalidParams(format!(
                    "variable index {i} appears twice"
                )));
            }
            seen[i] = true;
        }
        if seen[1..].iter().filter(|&&s| s).count() != n {
            return Err(ProtocolError::InvalidParams(format!(
                "partition sides must cover all of 1..={n}"
            )));
        }
        Ok(Partition { part_a, part_b, n })
    }

    /// Parses "1,3;2,4": semicolon-separated sides, comma-separated indices,
    /// sides must partition {1..n}; a side may be empty.
    pub fn parse(text: &str, n: usize) -> Result<Self, ProtocolError> {
        let mut sides = text.split(';');
        let (a, b) = match (sides.next(), sides.next(), sides.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(ProtocolError::InvalidParams(
                    "partition must be two ';'-separated sides, e.g. \"1,3;2,4\"".into(),
                ))
            }
        };
        let parse_side = |side: &str| -> Result<Vec<usize>, ProtocolError> {
            if side.trim().is_empty() {
                return Ok(Vec::new());
            }
            side.split(',')
                .map(|tok| {
                    tok.trim().parse::<usize>().map_err(|_| {
                        ProtocolError::InvalidParams(format!(
                            "invalid variable index {:?} in partition",
                            tok.trim()
                        ))
                    })
                })
                .collect()
        };
        Partition::new(parse_side(a)?, parse_side(b)?, n)
    }

    pub fn part_a(&self) -> &[usize] {
        &self.part_a
    }

    pub fn part_b(&self) -> &[usize] {
        &self.part_b
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

fn local_sum(
    f: &ThresholdFunction,
    side: &[usize],
    alpha: &[u8],
    side_name: &str,
) -> Result<BigInt, ProtocolError> {
    if alpha.len() != side.len() {
        return Err(ProtocolError::ProjectionMismatch(format!(
            "{side_name} assigns {} values but the partition side has {} variables",
            alpha.len(),
            side.len()
        )));
    }
    let mut sum = BigInt::ZERO;
    for (&i, &v) in side.iter().zip(alpha) {
        if v > 1 {
            return Err(ProtocolError::ProjectionMismatch(format!(
                "{side_name} contains non-bit value {v}"
            )));
        }
        if v == 1 {
            sum += &f.coeffs[i - 1];
        }
    }
    Ok(sum)
}

/// Two-party evaluation of f under the partition: output 1 iff f(alpha) = 1,
/// with error at most epsilon. alpha_a / alpha_b assign the variables of
/// part_A / part_B in the order the partition lists them. Communication is one
/// gt_walk run at input length bit_width(f).
pub fn threshold_protocol(
    f: &ThresholdFunction,
    part: &Partition,
    alpha_a: &[u8],
    alpha_b: &[u8],
    epsilon: f64,
    coins: &mut impl CoinSource,
) -> Result<ProtocolResult<bool>, ProtocolError> {
    if part.n() != f.n() {
        return Err(ProtocolError::ProjectionMismatch(format!(
            "partition is over {} variables, f has {}",
            part.n(),
            f.n()
        )));
    }
    let x1 = local_sum(f, &part.part_a, alpha_a, "alpha_A")?;
    let x2 = local_sum(f, &part.part_b, alpha_b, "alpha_B")?;
    let (range_lo, range_hi) = f.encoding_range();
    let complement = &f.bound - &x2;
    let enc_a = encode_signed(&x1, &range_lo, &range_hi).expect("x1 lies in the common range");
    let enc_b =
        encode_signed(&complement, &range_lo, &range_hi).expect("b - x2 lies in the common range");
    let params = WalkParams::for_inputs(enc_a.len(), epsilon)?;
    let gt = gt_walk(&enc_a, &enc_b, &params, coins)?;
    // f = 1 iff x1 + x2 <= b iff NOT (x1 > b - x2)
    Ok(ProtocolResult { output: !gt.output, transcript: gt.transcript })
}

/// Hard transcript bound of `threshold_protocol` at error target epsilon.
pub fn threshold_walk_bound(f: &ThresholdFunction, epsilon: f64) -> Result<u64, ProtocolError> {
    Ok(WalkParams::for_inputs(bit_width(f), epsilon)?.transcript_bound())
}

/// Deterministic fallback: Alice sends her partial sum in the common encoding
/// (bit_width(f) bits), Bob compares exactly and answers with 1 result bit.
/// Exact, but costs the full coefficient width.
pub fn threshold_deterministic(
    f: &ThresholdFunction,
    part: &Partition,
    alpha_a: &[u8],
    alpha_b: &[u8],
) -> Result<ProtocolResult<bool>, ProtocolError> {
    if part.n() != f.n() {
        return Err(ProtocolError::ProjectionMismatch(format!(
            "partition is over {} variables, f has {}",
            part.n(),
            f.n()
        )));
    }
    let x1 = local_sum(f, &part.part_a, alpha_a, "alpha_A")?;
    let x2 = local_sum(f, &part.part_b, alpha_b, "alpha_B")?;
    let mut transcript = Transcript::new();
    transcript.charge(Party::Alice, bit_width(f) as u32);
    transcript.charge(Party::Bob, 1);
    let output = x1 + x2 <= f.bound;
    Ok(ProtocolResult { output, transcript })
}
