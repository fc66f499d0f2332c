//! Fixed-capacity bitmask representing a subset of a group of order <= 256.
//!
//! Bit `e` is set iff element `e` belongs to the subset.  All sumset kernels
//! reduce to OR/rotate on these masks, so the representation is kept `Copy`
//! and branch-light.

/// Number of 64-bit words in a mask.
pub const MASK_WORDS: usize = 4;
/// Largest group order a mask can represent.
pub const MASK_BITS: usize = MASK_WORDS * 64;

/// A set of bit positions below [`MASK_BITS`].
///
/// Ordering compares masks as [`MASK_BITS`]-bit integers with bit 0 least
/// significant; this is the order used to pick canonical orbit
/// representatives.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Mask {
    words: [u64; MASK_WORDS],
}

impl Mask {
    pub const fn empty() -> Self {
        Mask { words: [0; MASK_WORDS] }
    }

    pub fn singleton(bit: u32) -> Self {
        let mut m = Mask::empty();
        m.set(bit);
        m
    }

    /// Mask with bits `0..k` set.
    pub fn low_bits(k: u32) -> Self {
        debug_assert!(k as usize <= MASK_BITS);
        let mut m = Mask::empty();
        for i in 0..MASK_WORDS {
            let lo = i as u32 * 64;
            m.words[i] = match k.saturating_sub(lo) {
                0 => 0,
                b if b >= 64 => u64::MAX,
                b => (1u64 << b) - 1,
            };
        }
        m
    }

    #[inline]
    pub fn set(&mut self, bit: u32) {
        debug_assert!((bit as usize) < MASK_BITS);
        self.words[(bit / 64) as usize] |= 1u64 << (bit % 64);
    }

    #[inline]
    pub fn clear(&mut self, bit: u32) {
        self.words[(bit / 64) as usize] &= !(1u64 << (bit % 64));
    }

    #[inline]
    pub fn test(&self, bit: u32) -> bool {
        (bit as usize) < MASK_BITS && self.words[(bit / 64) as usize] >> (bit % 64) & 1 == 1
    }

    #[inline]
    pub fn count(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn or_assign(&mut self, other: &Mask) {
        for i in 0..MASK_WORDS {
            self.words[i] |= other.words[i];
        }
    }

    #[inline]
    pub fn and_assign(&mut self, other: &Mask) {
        for i in 0..MASK_WORDS {
            self.words[i] &= other.words[i];
        }
    }

    pub fn is_subset_of(&self, other: &Mask) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Iterate set bits in increasing order.
    pub fn ones(self) -> Ones {
        Ones { mask: self, word: 0 }
    }

    /// Rotate the low `n`-bit window left by `x`: bit `e` moves to
    /// `(e + x) mod n`.  This is addition of `x` in a cyclic group of
    /// order `n` applied to every element of the set.
    pub fn rotate(&self, n: u32, x: u32) -> Mask {
        debug_assert!(1 <= n && n as usize <= MASK_BITS && x < n);
        if x == 0 {
            return *self;
        }
        if n <= 64 {
            // single-word fast path: the search hot loop lives here
            let w = self.words[0];
            let win = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let out = ((w << x) | (w >> (n - x))) & win;
            return Mask { words: [out, 0, 0, 0] };
        }
        let mut out = self.shl(x);
        out.or_assign(&self.shr(n - x));
        out.and_assign(&Mask::low_bits(n));
        out
    }

    fn shl(&self, k: u32) -> Mask {
        let (wk, bk) = ((k / 64) as usize, k % 64);
        let mut words = [0u64; MASK_WORDS];
        for i in (wk..MASK_WORDS).rev() {
            let mut v = self.words[i - wk] << bk;
            if bk > 0 && i > wk {
                v |= self.words[i - wk - 1] >> (64 - bk);
            }
            words[i] = v;
        }
        Mask { words }
    }

    // the index arithmetic mirrors shl; an iterator form would obscure it
    #[allow(clippy::needless_range_loop)]
    fn shr(&self, k: u32) -> Mask {
        let (wk, bk) = ((k / 64) as usize, k % 64);
        let mut words = [0u64; MASK_WORDS];
        for i in 0..MASK_WORDS - wk {
            let mut v = self.words[i + wk] >> bk;
            if bk > 0 && i + wk + 1 < MASK_WORDS {
                v |= self.words[i + wk + 1] << (64 - bk);
            }
            words[i] = v;
        }
        Mask { words }
    }
}

impl Ord for Mask {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // integer order: most significant word decides first
        self.words.iter().rev().cmp(other.words.iter().rev())
    }
}

impl PartialOrd for Mask {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for Mask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

/// Iterator over set bits, low to high.
pub struct Ones {
    mask: Mask,
    word: usize,
}

impl Iterator for Ones {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        while self.word < MASK_WORDS {
            let w = self.mask.words[self.word];
            if w != 0 {
                let b = w.trailing_zeros();
                self.mask.words[self.word] = w & (w - 1);
                return Some(self.word as u32 * 64 + b);
            }
            self.word += 1;
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_bits(bits: &[u32]) -> Mask {
        let mut m = Mask::empty();
        for &b in bits {
            m.set(b);
        }
        m
    }

    #[test]
    fn set_test_count() {
        let m = from_bits(&[0, 63, 64, 200, 255]);
        assert!(m.test(0) && m.test(63) && m.test(64) && m.test(200) && m.test(255));
        assert!(!m.test(1) && !m.test(199));
        assert_eq!(m.count(), 5);
        assert_eq!(m.ones().collect::<Vec<_>>(), vec![0, 63, 64, 200, 255]);
    }

    #[test]
    fn rotation_matches_elementwise_addition() {
        for n in [1u32, 2, 5, 12, 63, 64, 65, 100, 127, 128, 200, 256] {
            let bits: Vec<u32> = (0..n).filter(|e| (e * 7 + 3) % 5 < 2).collect();
            let m = from_bits(&bits);
            for x in 0..n.min(40) {
                let want = from_bits(&bits.iter().map(|&e| (e + x) % n).collect::<Vec<_>>());
                assert_eq!(m.rotate(n, x), want, "n={n} x={x}");
            }
            // full cycle returns to start
            let mut cur = m;
            for _ in 0..n {
                cur = cur.rotate(n, 1 % n);
            }
            assert_eq!(cur, m);
        }
    }

    #[test]
    fn integer_ordering() {
        assert!(from_bits(&[0]) < from_bits(&[1]));
        assert!(from_bits(&[0, 1]) < from_bits(&[2]));
        assert!(from_bits(&[5]) < from_bits(&[64]));
        assert!(from_bits(&[63, 100]) > from_bits(&[0, 1, 2, 100]));
        assert!(from_bits(&[0, 255]) > from_bits(&[200, 201, 202]));
    }

    #[test]
    fn subset_relation() {
        assert!(from_bits(&[1, 65]).is_subset_of(&from_bits(&[1, 2, 65])));
        assert!(!from_bits(&[1, 66]).is_subset_of(&from_bits(&[1, 2, 65])));
    }

    #[test]
    fn low_bits_window() {
        assert_eq!(Mask::low_bits(0).count(), 0);
        assert_eq!(Mask::low_bits(64).count(), 64);
        assert_eq!(Mask::low_bits(65).count(), 65);
        assert_eq!(Mask::low_bits(256).count(), 256);
    }
}
