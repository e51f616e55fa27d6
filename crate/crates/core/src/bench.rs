//! Seeded empirical benchmarks: error rates and transcript sizes over many
//! protocol runs.
//!
//! Every trial t draws its inputs from `CoinStream::for_trial(seed, 2t)` and
//! its protocol coins from `CoinStream::for_trial(seed, 2t + 1)`, so results
//! are bit-for-bit reproducible from (protocol, n, epsilon, class, seed,
//! trials) alone and independent of how trials are scheduled across threads.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::bits::BitString;
use crate::coins::{draw_bits, CoinSource, CoinStream};
use crate::eq::{eq_protocol, EqParams};
use crate::error::ProtocolError;
use crate::gt::{gt_baseline, gt_baseline_bound};
use crate::threshold::{
    eval_threshold, threshold_protocol, threshold_walk_bound, Partition, ThresholdFunction,
};
use crate::walk::{gt_walk, gt_walk_bound, WalkParams};

/// Which protocol a benchmark exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchProtocol {
    /// Inner-product fingerprint equality test.
    EqFingerprint,
    /// Binary search with high-confidence equality checks.
    GtBaseline,
    /// Random walk with verification checks and chains.
    GtWalk,
    /// Two-party majority over n variables via one walk comparison (the
    /// canonical threshold instance; see [`majority_instance`]).
    Threshold,
}

impl BenchProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            BenchProtocol::EqFingerprint => "eq",
            BenchProtocol::GtBaseline => "gt_baseline",
            BenchProtocol::GtWalk => "gt_walk",
            BenchProtocol::Threshold => "threshold",
        }
    }
}

/// How each trial's input pair is drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputClass {
    /// x and y independently uniform (for threshold: a uniform assignment).
    Uniform,
    /// Hardest neighboring pairs: for GT, x = y + 1 (answer true by the
    /// narrowest margin); for EQ, y is x with its last bit flipped; for
    /// threshold, a uniform assignment of boundary weight t or t - 1.
    Adversarial,
    /// y = x exactly (for threshold: weight exactly t, which makes the two
    /// compared encodings coincide) — exercises the one-sided cases.
    Equal,
}

impl InputClass {
    pub fn name(&self) -> &'static str {
        match self {
            InputClass::Uniform => "uniform",
            InputClass::Adversarial => "adversarial",
            InputClass::Equal => "equal",
        }
    }
}

/// One benchmark configuration.
#[derive(Clone, Copy, Debug)]
pub struct BenchConfig {
    pub protocol: BenchProtocol,
    pub n: usize,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    pub class: InputClass,
}

/// Aggregated results of one configuration.
#[derive(Clone, Debug)]
pub struct BenchRow {
    pub protocol: BenchProtocol,
    pub class: InputClass,
    pub n: usize,
    pub epsilon: f64,
    pub trials: u64,
    pub errors: u64,
    pub empirical_error: f64,
    pub mean_bits: f64,
    pub max_bits: u64,
    pub bound_bits: u64,
}

/// The threshold instance benched at size n: majority in normal form,
/// -x1 - ... - xn <= -t with t = floor(n/2) + 1 (true iff at least t ones),
/// split between the parties as contiguous halves (Alice holds 1..=ceil(n/2)).
pub fn majority_instance(n: usize) -> Result<(ThresholdFunction, Partition), ProtocolError> {
    if n == 0 {
        return Err(ProtocolError::InvalidParams("majority needs n >= 1".into()));
    }
    let t = n / 2 + 1;
    let f = ThresholdFunction::new(vec![BigInt::from(-1); n], -BigInt::from(t))?;
    let split = n.div_ceil(2);
    let part = Partition::new((1..=split).collect(), (split + 1..=n).collect(), n)?;
    Ok((f, part))
}

/// Uniform integer in [0, n) by rejection sampling.
fn draw_below(coins: &mut impl CoinSource, n: u64) -> u64 {
    debug_assert!(n >= 1);
    if n == 1 {
        return 0;
    }
    let bits = 64 - (n - 1).leading_zeros();
    loop {
        let v = coins.draw_word(bits) >> (64 - bits);
        if v < n {
            return v;
        }
    }
}

/// A uniformly random assignment with exactly k ones (partial Fisher-Yates).
fn assignment_of_weight(n: usize, k: usize, coins: &mut impl CoinSource) -> Vec<u8> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut alpha = vec![0u8; n];
    for i in 0..k {
        let j = i + draw_below(coins, (n - i) as u64) as usize;
        idx.swap(i, j);
        alpha[idx[i]] = 1;
    }
    alpha
}

/// Draws the assignment for one majority trial. Adversarial weights sit on
/// the decision boundary (t - 1 or t, one coin choosing which), so the walk
/// must separate encodings that differ by at most one; weight exactly t makes
/// Alice's encoding equal Bob's, the always-correct case.
fn draw_threshold_alpha(cfg: &BenchConfig, coins: &mut impl CoinSource) -> Vec<u8> {
    let t = cfg.n / 2 + 1;
    match cfg.class {
        InputClass::Uniform => draw_bits(coins, cfg.n),
        InputClass::Adversarial => {
            let target = t - usize::from(coins.draw_bit());
            assignment_of_weight(cfg.n, target, coins)
        }
        InputClass::Equal => assignment_of_weight(cfg.n, t, coins),
    }
}

/// Draws the (x, y) pair for one trial.
fn draw_inputs(cfg: &BenchConfig, coins: &mut impl CoinSource) -> (BitString, BitString) {
    match cfg.class {
        InputClass::Uniform => {
            let x = BitString::random(cfg.n, coins);
            let y = BitString::random(cfg.n, coins);
            (x, y)
        }
        InputClass::Adversarial => match cfg.protocol {
            BenchProtocol::EqFingerprint => {
                let x = BitString::random(cfg.n, coins);
                let mut bits: Vec<u8> = (1..=cfg.n).map(|i| x.get(i)).collect();
                bits[cfg.n - 1] ^= 1;
                (x, BitString::from_bits(&bits))
            }
            _ => {
                let y = BitString::random(cfg.n, coins);
                let mut bits: Vec<u8> = (1..=cfg.n).map(|i| y.get(i)).collect();
                if bits.iter().all(|&b| b == 1) {
                    // y + 1 must stay n bits; drop the all-ones draw to 0...0
                    bits.fill(0);
                }
                let y = BitString::from_bits(&bits);
                // binary increment: flip trailing ones and the first zero
                for b in bits.iter_mut().rev() {
                    *b ^= 1;
                    if *b == 1 {
                        break;
                    }
                }
                (BitString::from_bits(&bits), y)
            }
        },
        InputClass::Equal => {
            let x = BitString::random(cfg.n, coins);
            (x.clone(), x)
        }
    }
}

/// The correct answer for a pair under the benchmarked predicate.
fn ground_truth(protocol: BenchProtocol, x: &BitString, y: &BitString) -> bool {
    match protocol {
        BenchProtocol::EqFingerprint => x == y,
        BenchProtocol::GtBaseline | BenchProtocol::GtWalk => BitString::unsigned_gt(x, y),
        BenchProtocol::Threshold => unreachable!("threshold trials do not draw pairs"),
    }
}

/// One trial: draw inputs, run the protocol, compare to the truth.
/// Returns (erred, transcript bits).
fn run_trial(
    cfg: &BenchConfig,
    majority: &Option<(ThresholdFunction, Partition)>,
    trial: u64,
) -> Result<(bool, u64), ProtocolError> {
    let mut input_coins = CoinStream::for_trial(cfg.seed, 2 * trial);
    let mut coins = CoinStream::for_trial(cfg.seed, 2 * trial + 1);
    if let Some((f, part)) = majority {
        let alpha = draw_threshold_alpha(cfg, &mut input_coins);
        let truth = eval_threshold(f, &alpha)?;
        let alpha_a: Vec<u8> = part.part_a().iter().map(|&i| alpha[i - 1]).collect();
        let alpha_b: Vec<u8> = part.part_b().iter().map(|&i| alpha[i - 1]).collect();
        let result = threshold_protocol(f, part, &alpha_a, &alpha_b, cfg.epsilon, &mut coins)?;
        return Ok((result.output != truth, result.transcript.total_bits()));
    }
    let (x, y) = draw_inputs(cfg, &mut input_coins);
    let truth = ground_truth(cfg.protocol, &x, &y);
    let result = match cfg.protocol {
        BenchProtocol::EqFingerprint => {
            eq_protocol(&x, &y, EqParams::for_epsilon(cfg.epsilon)?, &mut coins)?
        }
        BenchProtocol::GtBaseline => gt_baseline(&x, &y, cfg.epsilon, &mut coins)?,
        BenchProtocol::GtWalk => {
            let params = WalkParams::for_inputs(cfg.n, cfg.epsilon)?;
            gt_walk(&x, &y, &params, &mut coins)?
        }
        BenchProtocol::Threshold => unreachable!("handled above"),
    };
    Ok((result.output != truth, result.transcript.total_bits()))
}

/// Runs all trials of a configuration (in parallel) and aggregates exactly:
/// error and bit counters are integers, divided only at the end.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchRow, ProtocolError> {
    if cfg.trials == 0 {
        return Err(ProtocolError::InvalidParams("trials must be >= 1".into()));
    }
    let majority = match cfg.protocol {
        BenchProtocol::Threshold => Some(majority_instance(cfg.n)?),
        _ => None,
    };
    let bound_bits = match cfg.protocol {
        BenchProtocol::EqFingerprint => u64::from(EqParams::for_epsilon(cfg.epsilon)?.k()),
        BenchProtocol::GtBaseline => {
            // surface bad parameters before spawning trials
            EqParams::for_epsilon(cfg.epsilon)?;
            gt_baseline_bound(cfg.n, cfg.epsilon)
        }
        BenchProtocol::GtWalk => gt_walk_bound(cfg.n, cfg.epsilon)?,
        BenchProtocol::Threshold => {
            let (f, _) = majority.as_ref().expect("instance built above");
            threshold_walk_bound(f, cfg.epsilon)?
        }
    };

    let totals = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<(u64, u64, u64), ProtocolError> {
            let (erred, bits) = run_trial(cfg, &majority, trial)?;
            Ok((u64::from(erred), bits, bits))
        })
        .try_reduce(
            || (0, 0, 0),
            |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2.max(b.2))),
        )?;

    let (errors, sum_bits, max_bits) = totals;
    Ok(BenchRow {
        protocol: cfg.protocol,
        class: cfg.class,
        n: cfg.n,
        epsilon: cfg.epsilon,
        trials: cfg.trials,
        errors,
        empirical_error: errors as f64 / cfg.trials as f64,
        mean_bits: sum_bits as f64 / cfg.trials as f64,
        max_bits,
        bound_bits,
    })
}

/// CSV column names, matching [`BenchRow::to_csv`].
pub fn csv_header() -> &'static str {
    "protocol,n,epsilon,trials,empirical_error,mean_bits,max_bits,bound_bits"
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.protocol.name(),
            self.n,
            self.epsilon,
            self.trials,
            self.empirical_error,
            self.mean_bits,
            self.max_bits,
            self.bound_bits
        )
    }

    pub fn to_human(&self) -> String {
        format!(
            "{} ({} inputs) n={} eps={}: {} errors in {} trials (rate {:.2e}, target {:.2e}); bits mean {:.1}, max {} (bound {})",
            self.protocol.name(),
            self.class.name(),
            self.n,
            self.epsilon,
            self.errors,
            self.trials,
            self.empirical_error,
            self.epsilon,
            self.mean_bits,
            self.max_bits,
            self.bound_bits
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(protocol: BenchProtocol, class: InputClass) -> BenchConfig {
        BenchConfig { protocol, n: 8, epsilon: 0.125, trials: 400, seed: 9, class }
    }

    #[test]
    fn adversarial_gt_pairs_differ_by_one() {
        let c = cfg(BenchProtocol::GtWalk, InputClass::Adversarial);
        for trial in 0..200 {
            let mut coins = CoinStream::for_trial(3, trial);
            let (x, y) = draw_inputs(&c, &mut coins);
            assert!(BitString::unsigned_gt(&x, &y));
            assert_eq!(x.as_u64() - y.as_u64(), 1, "x={x} y={y}");
        }
    }

    #[test]
    fn adversarial_eq_pairs_differ_in_last_bit() {
        let c = cfg(BenchProtocol::EqFingerprint, InputClass::Adversarial);
        let mut coins = CoinStream::for_trial(3, 0);
        let (x, y) = draw_inputs(&c, &mut coins);
        assert_ne!(x, y);
        assert_eq!(x.get(8), y.get(8) ^ 1);
        for i in 1..8 {
            assert_eq!(x.get(i), y.get(i));
        }
    }

    #[test]
    fn equal_class_never_errs_and_bounds_hold() {
        for protocol in [
            BenchProtocol::EqFingerprint,
            BenchProtocol::GtBaseline,
            BenchProtocol::GtWalk,
            BenchProtocol::Threshold,
        ] {
            let row = run_bench(&cfg(protocol, InputClass::Equal)).unwrap();
            assert_eq!(row.errors, 0, "{} errs on equal inputs", protocol.name());
            assert!(row.max_bits <= row.bound_bits);
            assert!(row.mean_bits <= row.max_bits as f64);
        }
    }

    #[test]
    fn threshold_classes_draw_the_advertised_weights() {
        // n = 9: t = 5, adversarial weights in {4, 5}, equal weight exactly 5
        let mut c = cfg(BenchProtocol::Threshold, InputClass::Adversarial);
        c.n = 9;
        let mut seen = [false; 2];
        for trial in 0..200 {
            let mut coins = CoinStream::for_trial(c.seed, 2 * trial);
            let alpha = draw_threshold_alpha(&c, &mut coins);
            let weight: usize = alpha.iter().map(|&b| usize::from(b)).sum();
            assert!(weight == 4 || weight == 5, "boundary weight, got {weight}");
            seen[weight - 4] = true;
        }
        assert!(seen[0] && seen[1], "both boundary weights should occur");

        c.class = InputClass::Equal;
        for trial in 0..50 {
            let mut coins = CoinStream::for_trial(c.seed, 2 * trial);
            let alpha = draw_threshold_alpha(&c, &mut coins);
            assert_eq!(alpha.iter().map(|&b| usize::from(b)).sum::<usize>(), 5);
        }
    }

    #[test]
    fn threshold_bench_stays_in_budget_on_boundary_inputs() {
        let row = run_bench(&cfg(BenchProtocol::Threshold, InputClass::Adversarial)).unwrap();
        assert!(row.max_bits <= row.bound_bits);
        // 400 boundary trials at eps=1/8: generous 3-sigma headroom
        assert!(row.empirical_error <= 0.125 + 3.0 * (0.125f64 / 400.0).sqrt());
        assert!(row.to_csv().starts_with("threshold,8,"));
    }

    #[test]
    fn runs_are_reproducible_and_error_stays_in_budget() {
        let c = cfg(BenchProtocol::GtWalk, InputClass::Adversarial);
        let a = run_bench(&c).unwrap();
        let b = run_bench(&c).unwrap();
        assert_eq!(a.errors, b.errors);
        assert_eq!(a.max_bits, b.max_bits);
        assert_eq!(a.to_csv(), b.to_csv());
        // 400 adversarial trials at eps=1/8: generous 3-sigma headroom
        assert!(a.empirical_error <= 0.125 + 3.0 * (0.125f64 / 400.0).sqrt());
    }

    #[test]
    fn csv_row_matches_header_arity() {
        let row = run_bench(&cfg(BenchProtocol::EqFingerprint, InputClass::Uniform)).unwrap();
        assert_eq!(row.to_csv().split(',').count(), csv_header().split(',').count());
        assert!(row.to_csv().starts_with("eq,8,0.125,400,"));
        // eq transcripts are exactly k bits on every run
        assert_eq!(row.max_bits, row.bound_bits);
        assert_eq!(row.mean_bits, row.bound_bits as f64);
    }

    #[test]
    fn zero_trials_rejected() {
        let mut c = cfg(BenchProtocol::EqFingerprint, InputClass::Uniform);
        c.trials = 0;
        assert!(run_bench(&c).is_err());
    }
}
