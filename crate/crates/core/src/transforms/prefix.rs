use crate::model::index;

/// Dense indexing of `union_{k in [r]} B^k`: tuples ordered by length, then
/// big-endian within a length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixIndex {
    base: usize,
    rounds: usize,
    offsets: Vec<usize>,
}

impl PrefixIndex {
    pub fn new(base: usize, rounds: usize) -> Self {
        let mut offsets = Vec::with_capacity(rounds + 1);
        let mut acc = 0;
        for k in 1..=rounds {
            offsets.push(acc);
            acc += index::pow(base, k);
        }
        offsets.push(acc);
        PrefixIndex { base, rounds, offsets }
    }

    pub fn len(&self) -> usize {
        self.offsets[self.rounds]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Index of the length-`k` tuple with big-endian code `code`.
    pub fn index(&self, k: usize, code: usize) -> usize {
        debug_assert!(k >= 1 && k <= self.rounds && code < index::pow(self.base, k));
        self.offsets[k - 1] + code
    }

    /// `(k, code)` of a dense index.
    pub fn split(&self, i: usize) -> (usize, usize) {
        let k = self.offsets[1..].iter().position(|&end| i < end).expect("prefix index out of range") + 1;
        (k, i - self.offsets[k - 1])
    }

    pub fn digits(&self, i: usize) -> Vec<usize> {
        let (k, code) = self.split(i);
        index::decode(code, self.base, k)
    }
}
