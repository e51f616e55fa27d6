//! Exact bit accounting for protocol runs.
//!
//! A transcript records the semantic bit-counts a protocol charges (what the
//! cost model bounds), not any wire encoding overhead. Events are appended
//! monotonically in round order and totals never decrease.

/// The two parties of a protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

/// One charged message: round index, sender, and bit count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TranscriptEvent {
    pub round: u32,
    pub sender: Party,
    pub bits: u32,
}

/// Ordered record of every bit exchanged during a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transcript {
    events: Vec<TranscriptEvent>,
    total_bits: u64,
}

impl Transcript {
    pub fn new() -> Self {
        Transcript::default()
    }

    /// Charges `bits` sent by `sender` as the next round. Zero-bit charges are
    /// dropped (nothing crossed the channel).
    pub fn charge(&mut self, sender: Party, bits: u32) {
        if bits == 0 {
            return;
        }
        let round = self.events.len() as u32 + 1;
        self.events.push(TranscriptEvent { round, sender, bits });
        self.total_bits += u64::from(bits);
    }

    /// Appends all of `other`'s events after this transcript's, renumbering
    /// rounds to stay monotone (used when protocols call sub-protocols).
    pub fn absorb(&mut self, other: Transcript) {
        for ev in other.events {
            self.charge(ev.sender, ev.bits);
        }
    }

    pub fn total_bits(&self) -> u64 {
        self.total_bits
    }

    pub fn events(&self) -> &[TranscriptEvent] {
        &self.events
    }
}

/// Total bits exchanged in a transcript.
pub fn bits_used(t: &Transcript) -> u64 {
    t.total_bits()
}

/// A protocol's output together with the complete transcript that produced it.
#[derive(Clone, Debug)]
pub struct ProtocolResult<T> {
    pub output: T,
    pub transcript: Transcript,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_transcript_is_zero_bits() {
        assert_eq!(bits_used(&Transcript::new()), 0);
    }

    #[test]
    fn totals_sum_events() {
        let mut t = Transcript::new();
        t.charge(Party::Alice, 2);
        t.charge(Party::Bob, 2);
        assert_eq!(bits_used(&t), 4);
        assert_eq!(t.events().len(), 2);
        assert_eq!(t.events()[0].round, 1);
        assert_eq!(t.events()[1].round, 2);
        let sum: u64 = t.events().iter().map(|e| u64::from(e.bits)).sum();
        assert_eq!(sum, t.total_bits());
    }

    #[test]
    fn zero_charges_are_dropped_and_rounds_stay_monotone() {
        let mut t = Transcript::new();
        t.charge(Party::Alice, 1);
        t.charge(Party::Bob, 0);
        t.charge(Party::Bob, 3);
        assert_eq!(t.events().len(), 2);
        assert!(t.events().windows(2).all(|w| w[0].round < w[1].round));
        assert_eq!(t.total_bits(), 4);
    }

    #[test]
    fn absorb_renumbers_rounds() {
        let mut outer = Transcript::new();
        outer.charge(Party::Alice, 2);
        let mut inner = Transcript::new();
        inner.charge(Party::Bob, 5);
        outer.absorb(inner);
        assert_eq!(outer.total_bits(), 7);
        assert_eq!(outer.events()[1].round, 2);
    }
}
