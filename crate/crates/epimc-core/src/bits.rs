//! Small fixed-width bitset used by the bottom-up satisfaction evaluators.

/// Fixed-width bitset over evaluation nodes (context members or worlds).
#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn ones(len: usize) -> Self {
        let mut b = Bits { words: vec![!0u64; len.div_ceil(64)], len };
        b.mask_tail();
        b
    }

    fn mask_tail(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0u64 >> extra;
            }
        }
    }

    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        if v {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn and_with(&mut self, other: &Bits) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
    }

    pub fn negate(&mut self) {
        for w in &mut self.words {
            *w = !*w;
        }
        self.mask_tail();
    }

    /// True iff every bit of `self` among the first `upto` is set in `other`.
    pub fn subset_of(&self, other: &Bits, upto: usize) -> bool {
        let full = upto / 64;
        for w in 0..full {
            if self.words[w] & !other.words[w] != 0 {
                return false;
            }
        }
        let rem = upto % 64;
        if rem > 0 {
            let mask = !0u64 >> (64 - rem);
            if self.words[full] & !other.words[full] & mask != 0 {
                return false;
            }
        }
        true
    }
}
