use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric::Digit;

/// A finite word over {0, 1}.
///
/// Read left to right it is both a digit prefix `(eps_1, ..., eps_k)` and
/// the composition that applies `T_{eps_1}` first. Bits are packed
/// most-significant-first into `u64` blocks; bits past `len` are zero, so
/// the derived block order is the lexicographic order of words.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BinaryWord {
    blocks: Vec<u64>,
    len: usize,
}

#[inline]
fn mask_bit(i: usize) -> u64 {
    1u64 << (63 - (i % 64))
}

impl BinaryWord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BinaryWord {
            blocks: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut w = Self::new();
        for b in bits {
            w.push(b);
        }
        w
    }

    pub fn repeat(bit: bool, n: usize) -> Self {
        Self::from_bits(std::iter::repeat_n(bit, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self::repeat(false, n)
    }

    pub fn ones(n: usize) -> Self {
        Self::repeat(true, n)
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "word of length {len} does not fit in u64");
        if len == 0 {
            return Self::new();
        }
        let v = if len == 64 { value } else { value & ((1u64 << len) - 1) };
        BinaryWord {
            blocks: vec![v << (64 - len)],
            len,
        }
    }

    /// Inverse of [`from_u64`](Self::from_u64); `None` for words longer than 64.
    pub fn to_u64(&self) -> Option<u64> {
        match self.len {
            0 => Some(0),
            1..=64 => Some(self.blocks[0] >> (64 - self.len)),
            _ => None,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for word of length {}", self.len);
        self.blocks[i / 64] & mask_bit(i) != 0
    }

    pub fn digit(&self, i: usize) -> Digit {
        Digit::from_bit(self.get(i))
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.blocks.push(0);
        }
        if bit {
            let i = self.len;
            self.blocks[i / 64] |= mask_bit(i);
        }
        self.len += 1;
    }

    pub fn push_digit(&mut self, d: Digit) {
        self.push(d.is_one());
    }

    pub fn pop(&mut self) -> Option<bool> {
        if self.len == 0 {
            return None;
        }
        let i = self.len - 1;
        let bit = self.get(i);
        self.blocks[i / 64] &= !mask_bit(i);
        self.len -= 1;
        if self.len.is_multiple_of(64) {
            self.blocks.pop();
        }
        Some(bit)
    }

    pub fn extend_from(&mut self, other: &BinaryWord) {
        for b in other.bits() {
            self.push(b);
        }
    }

    pub fn concat(&self, other: &BinaryWord) -> BinaryWord {
        let mut w = self.clone();
        w.extend_from(other);
        w
    }

    pub fn with_bit(&self, bit: bool) -> BinaryWord {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    /// The first `k` letters.
    pub fn prefix(&self, k: usize) -> BinaryWord {
        assert!(k <= self.len);
        let mut blocks = self.blocks[..k.div_ceil(64)].to_vec();
        if !k.is_multiple_of(64) {
            if let Some(last) = blocks.last_mut() {
                *last &= !(u64::MAX >> (k % 64));
            }
        }
        BinaryWord { blocks, len: k }
    }

    pub fn is_prefix_of(&self, other: &BinaryWord) -> bool {
        self.len <= other.len && other.prefix(self.len) == *self
    }

    pub fn bits(&self) -> impl DoubleEndedIterator<Item = bool> + ExactSizeIterator + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn digits(&self) -> impl DoubleEndedIterator<Item = Digit> + '_ {
        self.bits().map(Digit::from_bit)
    }

    /// `|a|_1`.
    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// `|a|_0`.
    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Letterwise complement.
    pub fn complement(&self) -> BinaryWord {
        BinaryWord::from_bits(self.bits().map(|b| !b))
    }

    /// Length of the longest common prefix.
    pub fn lcp(&self, other: &BinaryWord) -> usize {
        let limit = self.len.min(other.len);
        for (i, (a, b)) in self.blocks.iter().zip(&other.blocks).enumerate() {
            let diff = a ^ b;
            if diff != 0 {
                return (i * 64 + diff.leading_zeros() as usize).min(limit);
            }
        }
        limit
    }
}

impl Ord for BinaryWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.blocks.cmp(&other.blocks).then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for BinaryWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryWord(\"{self}\")")
    }
}

impl FromStr for BinaryWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut w = BinaryWord::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => w.push(false),
                '1' => w.push(true),
                _ => {
                    return Err(Error::Parse {
                        input: s.to_string(),
                        reason: format!("unexpected letter {c:?} in binary word"),
                    })
                }
            }
        }
        Ok(w)
    }
}

impl Serialize for BinaryWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinaryWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All words of length `len` with at least `min_ones` ones, in
/// lexicographic order.
pub fn words_with_min_ones(len: usize, min_ones: usize) -> Vec<BinaryWord> {
    assert!(len <= 32);
    (0u64..1u64 << len)
        .filter(|v| v.count_ones() as usize >= min_ones)
        .map(|v| BinaryWord::from_u64(v, len))
        .collect()
}

/// All words of length `len` with at least `min_zeros` zeros, in
/// lexicographic order.
pub fn words_with_min_zeros(len: usize, min_zeros: usize) -> Vec<BinaryWord> {
    assert!(len <= 32);
    (0u64..1u64 << len)
        .filter(|v| len - v.count_ones() as usize >= min_zeros)
        .map(|v| BinaryWord::from_u64(v, len))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display() {
        let w: BinaryWord = "0110".parse().unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.to_string(), "0110");
        assert_eq!(w.count_ones(), 2);
        assert_eq!(w.count_zeros(), 2);
        assert!("01a".parse::<BinaryWord>().is_err());
        assert_eq!("".parse::<BinaryWord>().unwrap(), BinaryWord::new());
    }

    #[test]
    fn u64_round_trip() {
        let w = BinaryWord::from_u64(0b101, 5);
        assert_eq!(w.to_string(), "00101");
        assert_eq!(w.to_u64(), Some(0b101));
        assert_eq!(BinaryWord::from_u64(u64::MAX, 64).count_ones(), 64);
    }

    #[test]
    fn order_is_lexicographic() {
        let mut ws: Vec<BinaryWord> = ["1", "0", "01", "10", "00", "", "011", "0111"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        ws.sort();
        let got: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(got, ["", "0", "00", "01", "011", "0111", "1", "10"]);
    }

    #[test]
    fn extension_sets_for_m_one() {
        let got: Vec<String> = words_with_min_ones(3, 2).iter().map(|w| w.to_string()).collect();
        assert_eq!(got, ["011", "101", "110", "111"]);
        assert_eq!(words_with_min_zeros(5, 3).len(), 16);
    }

    #[test]
    fn long_words_cross_block_boundaries() {
        let mut w = BinaryWord::ones(63);
        w.push(false);
        w.push(true);
        assert_eq!(w.len(), 65);
        assert!(w.get(64));
        assert!(!w.get(63));
        assert_eq!(w.pop(), Some(true));
        assert_eq!(w.len(), 64);
        assert_eq!(w.prefix(10), BinaryWord::ones(10));
        let longer = w.concat(&BinaryWord::zeros(70));
        assert_eq!(longer.lcp(&w), 64);
        assert!(w.is_prefix_of(&longer));
    }

    proptest! {
        #[test]
        fn counts_add_up(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let w = BinaryWord::from_bits(bits.clone());
            prop_assert_eq!(w.count_ones() + w.count_zeros(), w.len());
            prop_assert_eq!(w.bits().collect::<Vec<_>>(), bits);
            prop_assert_eq!(w.complement().complement(), w.clone());
        }

        #[test]
        fn order_matches_string_order(
            a in proptest::collection::vec(any::<bool>(), 0..130),
            b in proptest::collection::vec(any::<bool>(), 0..130),
        ) {
            let wa = BinaryWord::from_bits(a);
            let wb = BinaryWord::from_bits(b);
            prop_assert_eq!(wa.cmp(&wb), wa.to_string().cmp(&wb.to_string()));
            let l = wa.lcp(&wb);
            prop_assert!(wa.prefix(l) == wb.prefix(l));
            prop_assert!(l == wa.len().min(wb.len()) || wa.get(l) != wb.get(l));
        }
    }
}
