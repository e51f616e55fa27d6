//! Public-coin streams: deterministic, seed-derived randomness shared by both parties.
//!
//! Both players read the same stream (public-coin model), so drawing coins never
//! costs communication. `CoinStream` is a counter-mode PRG (ChaCha8) keyed by the
//! seed; independent per-trial sub-streams come from the generator's stream index,
//! so trial t of seed s is reproducible regardless of scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A source of shared random bits. Draws are consumed in a fixed order, so
/// identical seeds and identical draw sequences give identical bits.
pub trait CoinSource {
    /// The next coin (0 or 1).
    fn draw_bit(&mut self) -> u8;

    /// The next `nbits` coins (1..=64), packed MSB-first into the high bits:
    /// the first coin drawn lands at bit 63. Drawing 3 bits then 5 bits yields
    /// the same coins as one draw of 8.
    fn draw_word(&mut self, nbits: u32) -> u64 {
        debug_assert!((1..=64).contains(&nbits));
        let mut acc = 0u64;
        for _ in 0..nbits {
            acc = (acc << 1) | u64::from(self.draw_bit());
        }
        acc << (64 - nbits)
    }

    /// Total bits consumed so far.
    fn position(&self) -> u64;
}

/// Sequence of `count` coins as 0/1 values (convenience for tests and fixtures).
pub fn draw_bits(coins: &mut impl CoinSource, count: usize) -> Vec<u8> {
    assert!(count >= 1);
    (0..count).map(|_| coins.draw_bit()).collect()
}

/// Seeded ChaCha8-backed coin stream with bit-granular buffering.
#[derive(Clone, Debug)]
pub struct CoinStream {
    rng: ChaCha8Rng,
    buf: u64,
    avail: u32,
    position: u64,
}

impl CoinStream {
    pub fn new(seed: u64) -> Self {
        CoinStream { rng: ChaCha8Rng::seed_from_u64(seed), buf: 0, avail: 0, position: 0 }
    }

    /// Independent sub-stream for trial `trial` of the given seed.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        CoinStream { rng, buf: 0, avail: 0, position: 0 }
    }

    fn refill(&mut self) {
        self.buf = self.rng.next_u64();
        self.avail = 64;
    }
}

impl CoinSource for CoinStream {
    fn draw_bit(&mut self) -> u8 {
        if self.avail == 0 {
            self.refill();
        }
        let bit = (self.buf >> 63) as u8;
        self.buf <<= 1;
        self.avail -= 1;
        self.position += 1;
        bit
    }

    fn draw_word(&mut self, nbits: u32) -> u64 {
        debug_assert!((1..=64).contains(&nbits));
        let mut acc = 0u64;
        let mut got = 0u32;
        while got < nbits {
            if self.avail == 0 {
                self.refill();
            }
            let take = (nbits - got).min(self.avail);
            if take == 64 {
                acc = self.buf;
                self.buf = 0;
            } else {
                acc = (acc << take) | (self.buf >> (64 - take));
                self.buf <<= take;
            }
            self.avail -= take;
            got += take;
        }
        self.position += u64::from(nbits);
        if nbits == 64 {
            acc
        } else {
            acc << (64 - nbits)
        }
    }

    fn position(&self) -> u64 {
        self.position
    }
}

/// A preset finite coin sequence, for exhaustive enumeration of coin spaces.
/// Panics if a protocol draws more coins than were provided, so tests size
/// coin budgets exactly.
#[derive(Clone, Debug)]
pub struct ExplicitCoins {
    bits: Vec<u8>,
    pos: usize,
}

impl ExplicitCoins {
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1));
        ExplicitCoins { bits, pos: 0 }
    }

    /// The `index`-th point of the 2^total coin space: bit j of the sequence is
    /// bit (total-1-j) of `index`, so index 0 is all-zero coins.
    pub fn from_index(index: u64, total: usize) -> Self {
        assert!(total <= 63 && (index >> total) == 0);
        let bits = (0..total).map(|j| ((index >> (total - 1 - j)) & 1) as u8).collect();
        ExplicitCoins { bits, pos: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

impl CoinSource for ExplicitCoins {
    fn draw_bit(&mut self) -> u8 {
        assert!(self.pos < self.bits.len(), "explicit coin budget exceeded");
        let bit = self.bits[self.pos];
        self.pos += 1;
        bit
    }

    fn position(&self) -> u64 {
        self.pos as u64
    }
}
