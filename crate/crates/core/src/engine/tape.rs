use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Counter-based random tape: a ChaCha stream addressed by `(seed, stream)`
/// plus a word position. Plain data, so copies replay identically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomTape {
    seed: u64,
    stream: u64,
    word_pos: u128,
}

impl RandomTape {
    /// Private tape of node `id`.
    pub fn for_node(seed: u64, id: u32) -> Self {
        Self { seed, stream: u64::from(id), word_pos: 0 }
    }

    /// Tape shared by every node (stream 0; node IDs start at 1).
    pub fn shared(seed: u64) -> Self {
        Self { seed, stream: 0, word_pos: 0 }
    }

    /// Fresh tape on the same seed for a node that exists only in a simulation.
    /// Anyone holding the shared tape derives the same stream.
    pub fn for_virtual_node(&self, id: u32) -> Self {
        Self::for_node(self.seed, id)
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(self.word_pos);
        rng
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut rng = self.rng();
        let v = rng.next_u64();
        self.word_pos = rng.get_word_pos();
        v
    }

    pub fn next_bit(&mut self) -> bool {
        self.next_u64() & 1 == 1
    }

    /// Uniform in `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        use rand::Rng;
        let mut rng = self.rng();
        let v = rng.gen_range(0..bound);
        self.word_pos = rng.get_word_pos();
        v
    }
}
