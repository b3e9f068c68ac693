//! Free-group words over the surface-group generators.
//!
//! A genus-`g` surface group is generated by `2g` letters. Words are kept
//! freely reduced; the surface relation itself is never applied here, so two
//! distinct reduced words may still name the same group element. Callers that
//! care about group elements deduplicate by matrix fingerprint.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("word count for rank {rank} up to length {max_len} overflows u64")]
    CountOverflow { rank: usize, max_len: usize },
    #[error("invalid letter {0:?}")]
    InvalidLetter(char),
    #[error("word of length {len} over rank {rank} cannot be packed")]
    Unpackable { len: usize, rank: usize },
}

/// One generator or its inverse.
///
/// Letters order by generator index first and put the generator before its
/// inverse, so the alphabet reads `a < A < b < B < ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    index: u8,
    inverted: bool,
}

impl Letter {
    pub fn new(index: usize, sign: i8) -> Self {
        assert!(index < 26, "generator index {index} out of range");
        assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
        Letter {
            index: index as u8,
            inverted: sign < 0,
        }
    }

    pub fn gen(index: usize) -> Self {
        Letter::new(index, 1)
    }

    pub fn gen_inv(index: usize) -> Self {
        Letter::new(index, -1)
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn sign(self) -> i8 {
        if self.inverted {
            -1
        } else {
            1
        }
    }

    pub fn is_inverted(self) -> bool {
        self.inverted
    }

    pub fn inverse(self) -> Self {
        Letter {
            index: self.index,
            inverted: !self.inverted,
        }
    }

    /// Position in the canonical alphabet order, `2 * index + inverted`.
    pub fn code(self) -> u8 {
        self.index * 2 + self.inverted as u8
    }

    pub fn from_code(code: u8) -> Self {
        Letter {
            index: code / 2,
            inverted: code % 2 == 1,
        }
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.index) as char;
        if self.inverted {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn from_char(c: char) -> Result<Self, WordError> {
        if !c.is_ascii_alphabetic() {
            return Err(WordError::InvalidLetter(c));
        }
        let index = (c.to_ascii_lowercase() as u8 - b'a') as usize;
        Ok(Letter::new(index, if c.is_ascii_uppercase() { -1 } else { 1 }))
    }
}

/// All `2 * rank` letters in canonical order.
pub fn alphabet(rank: usize) -> impl Iterator<Item = Letter> + Clone {
    (0..2 * rank as u8).map(Letter::from_code)
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in raw {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(letters: &[Letter]) -> bool {
        letters.windows(2).all(|w| w[1] != w[0].inverse())
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Reduced product `self * other`.
    pub fn mul(&self, other: &Word) -> Self {
        Word::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, n: u32) -> Self {
        Word::reduce(std::iter::repeat_n(self.0.iter().copied(), n as usize).flatten())
    }

    pub fn conjugate_by(&self, by: &Word) -> Self {
        by.mul(self).mul(&by.inverse())
    }

    /// Largest generator index used, plus one.
    pub fn min_rank(&self) -> usize {
        self.0.iter().map(|l| l.index() + 1).max().unwrap_or(0)
    }
}

/// `u v u⁻¹ v⁻¹`, reduced.
pub fn commutator(u: &Word, v: &Word) -> Word {
    Word::reduce(
        u.0.iter()
            .chain(v.0.iter())
            .copied()
            .chain(u.inverse().0)
            .chain(v.inverse().0),
    )
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: shorter first, then lexicographic on letters.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(Letter::from_char)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Word::reduce(letters))
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        Word::reduce(iter)
    }
}

const PACK_LEN_SHIFT: u32 = 60;
const PACK_MAX_LEN: usize = 15;

/// A word packed into a `u64`: length in the top four bits, then one
/// four-bit letter code per position, most significant first.
///
/// Numeric order on packed words coincides with the canonical word order,
/// which makes them cheap sort keys for multi-million element sweeps.
/// Packing requires rank ≤ 8 and length ≤ 15.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PackedWord(u64);

impl PackedWord {
    pub const EMPTY: PackedWord = PackedWord(0);

    pub fn pack(word: &Word) -> Result<Self, WordError> {
        Self::from_letters(word.letters())
    }

    pub fn from_letters(letters: &[Letter]) -> Result<Self, WordError> {
        let rank = letters.iter().map(|l| l.index() + 1).max().unwrap_or(0);
        if letters.len() > PACK_MAX_LEN || rank > 8 {
            return Err(WordError::Unpackable {
                len: letters.len(),
                rank,
            });
        }
        let mut p = PackedWord::EMPTY;
        for l in letters {
            p = p.push(*l);
        }
        Ok(p)
    }

    pub fn len(self) -> usize {
        (self.0 >> PACK_LEN_SHIFT) as usize
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    /// Append a letter. The caller keeps the length ≤ 15.
    pub fn push(self, l: Letter) -> Self {
        let len = self.len();
        debug_assert!(len < PACK_MAX_LEN);
        let shift = PACK_LEN_SHIFT - 4 * (len as u32 + 1);
        let body = self.0 & ((1u64 << PACK_LEN_SHIFT) - 1);
        PackedWord(((len as u64 + 1) << PACK_LEN_SHIFT) | body | ((l.code() as u64) << shift))
    }

    pub fn get(self, i: usize) -> Letter {
        let shift = PACK_LEN_SHIFT - 4 * (i as u32 + 1);
        Letter::from_code(((self.0 >> shift) & 0xf) as u8)
    }

    pub fn unpack(self) -> Word {
        Word((0..self.len()).map(|i| self.get(i)).collect())
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

/// Number of reduced words of length ≤ `max_len` over `rank` generators:
/// `1 + Σ_{k=1..N} 2r (2r - 1)^{k-1}`.
pub fn reduced_word_count(rank: usize, max_len: usize) -> Result<u64, WordError> {
    let overflow = WordError::CountOverflow { rank, max_len };
    let n = 2 * rank as u64;
    if n == 0 {
        return Ok(1);
    }
    let mut total: u64 = 1;
    let mut layer: u64 = n;
    for k in 1..=max_len {
        if k > 1 {
            layer = layer.checked_mul(n - 1).ok_or(overflow.clone())?;
        }
        total = total.checked_add(layer).ok_or(overflow.clone())?;
    }
    Ok(total)
}

/// Iterator over reduced words in canonical (length, lexicographic) order.
#[derive(Clone, Debug)]
pub struct WordEnumerator {
    alphabet_size: u8,
    max_len: usize,
    first: Option<Letter>,
    current: Option<Vec<u8>>,
    started: bool,
}

/// Every reduced word of length ≤ `max_len` over `rank` generators.
pub fn enumerate(rank: usize, max_len: usize) -> Result<WordEnumerator, WordError> {
    reduced_word_count(rank, max_len)?;
    Ok(WordEnumerator {
        alphabet_size: 2 * rank as u8,
        max_len,
        first: None,
        current: Some(Vec::new()),
        started: false,
    })
}

/// The slice of [`enumerate`] whose words start with `first`, in canonical
/// order. The empty word belongs to no partition.
pub fn enumerate_partition(
    rank: usize,
    max_len: usize,
    first: Letter,
) -> Result<WordEnumerator, WordError> {
    reduced_word_count(rank, max_len)?;
    let current = if max_len == 0 || first.index() >= rank {
        None
    } else {
        Some(vec![first.code()])
    };
    Ok(WordEnumerator {
        alphabet_size: 2 * rank as u8,
        max_len,
        first: Some(first),
        current,
        started: false,
    })
}

impl WordEnumerator {
    fn smallest_after(&self, prev: Option<u8>, from: u8) -> Option<u8> {
        (from..self.alphabet_size).find(|&c| prev.is_none_or(|p| c != (p ^ 1)))
    }

    /// Fill positions `start..len` with the smallest admissible codes.
    fn fill_min(&self, w: &mut [u8], start: usize) -> bool {
        for i in start..w.len() {
            let prev = if i == 0 { None } else { Some(w[i - 1]) };
            match self.smallest_after(prev, 0) {
                Some(c) => w[i] = c,
                None => return false,
            }
        }
        true
    }

    fn advance(&self, w: &[u8]) -> Option<Vec<u8>> {
        let fixed = usize::from(self.first.is_some());
        let mut next = w.to_vec();
        for i in (fixed..next.len()).rev() {
            let prev = if i == 0 { None } else { Some(next[i - 1]) };
            if let Some(c) = self.smallest_after(prev, next[i] + 1) {
                next[i] = c;
                if self.fill_min(&mut next, i + 1) {
                    return Some(next);
                }
            }
        }
        // Move on to the next length.
        let len = w.len() + 1;
        if len > self.max_len || self.alphabet_size == 0 {
            return None;
        }
        let mut next = vec![0u8; len];
        let start = match self.first {
            Some(f) => {
                next[0] = f.code();
                1
            }
            None => 0,
        };
        if self.fill_min(&mut next, start) {
            Some(next)
        } else {
            None
        }
    }
}

impl Iterator for WordEnumerator {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.started {
            let cur = self.current.take()?;
            self.current = self.advance(&cur);
        } else {
            self.started = true;
        }
        self.current
            .as_ref()
            .map(|codes| Word(codes.iter().map(|&c| Letter::from_code(c)).collect()))
    }
}

/// Merge first-letter partitions back into canonical order.
///
/// `parts` may arrive in any order; each must itself be canonically ordered.
pub fn merge_partitions(include_empty: bool, parts: Vec<Vec<Word>>) -> Vec<Word> {
    let mut all: Vec<Word> = parts.into_iter().flatten().collect();
    if include_empty {
        all.push(Word::empty());
    }
    all.sort();
    all
}

/// The relator of the genus-`g` surface group in the octagon-style
/// presentation: `x₀ x₁ … x₂g₋₁ x₀⁻¹ x₁⁻¹ … x₂g₋₁⁻¹`.
pub fn surface_relator(genus: usize) -> Word {
    let rank = 2 * genus;
    Word::reduce(
        (0..rank)
            .map(Letter::gen)
            .chain((0..rank).map(Letter::gen_inv)),
    )
}

/// A symplectic generating set `(a₁, b₁, a₂, b₂)` for genus 2, written in the
/// octagon generators, with `[a₁,b₁][a₂,b₂]` equal to [`surface_relator`]
/// as a reduced word.
pub fn symplectic_basis_genus2() -> [(Word, Word); 2] {
    let w = |s: &str| s.parse::<Word>().expect("static word");
    [(w("a"), w("bcd")), (w("bc"), w("dB"))]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(w("aA"), Word::empty());
        let raw = [
            Letter::gen(0),
            Letter::gen(1),
            Letter::gen_inv(1),
            Letter::gen(0),
        ];
        assert_eq!(Word::reduce(raw), w("aa"));
        let already = [Letter::gen(0), Letter::gen(1), Letter::gen_inv(0)];
        assert_eq!(Word::reduce(already).letters(), &already);
    }

    #[test]
    fn enumeration_counts_small() {
        assert_eq!(enumerate(4, 0).unwrap().count(), 1);
        assert_eq!(enumerate(4, 1).unwrap().count(), 9);
        assert_eq!(enumerate(4, 2).unwrap().count(), 65);
    }

    /// Every product of at most `max_len` letters, reduced and deduplicated.
    fn brute_force(rank: usize, max_len: usize) -> HashSet<Word> {
        let letters: Vec<Letter> = alphabet(rank).collect();
        let mut all: HashSet<Word> = HashSet::from([Word::empty()]);
        let mut layer = all.clone();
        for _ in 0..max_len {
            let mut next = HashSet::new();
            for w in &layer {
                for l in &letters {
                    next.insert(w.mul(&Word::letter(*l)));
                }
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        all.into_iter().filter(|w| w.len() <= max_len).collect()
    }

    #[test]
    fn enumeration_matches_brute_force_and_closed_form() {
        for genus in 1..=3 {
            let rank = 2 * genus;
            for n in 0..=6 {
                let words: Vec<Word> = enumerate(rank, n).unwrap().collect();
                let set: HashSet<Word> = words.iter().cloned().collect();
                assert_eq!(set.len(), words.len(), "duplicates at g={genus} N={n}");
                assert_eq!(set, brute_force(rank, n), "g={genus} N={n}");
                assert_eq!(words.len() as u64, reduced_word_count(rank, n).unwrap());
            }
        }
    }

    #[test]
    fn enumeration_is_canonically_ordered() {
        let words: Vec<Word> = enumerate(4, 3).unwrap().collect();
        assert!(words.windows(2).all(|p| p[0] < p[1]));
        assert_eq!(words[1], w("a"));
        assert_eq!(words[2], w("A"));
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(
            enumerate(4, 40),
            Err(WordError::CountOverflow { .. })
        ));
    }

    #[test]
    fn partitions_merge_to_canonical_order() {
        let rank = 4;
        let canonical: Vec<Word> = enumerate(rank, 4).unwrap().collect();
        let mut parts: Vec<Vec<Word>> = alphabet(rank)
            .map(|l| enumerate_partition(rank, 4, l).unwrap().collect())
            .collect();
        parts.reverse();
        assert_eq!(merge_partitions(true, parts), canonical);
    }

    #[test]
    fn inverse_and_commutator() {
        assert_eq!(w("ab").inverse(), w("BA"));
        assert_eq!(commutator(&w("a"), &w("a")), Word::empty());
        assert_eq!(commutator(&w("a"), &w("b")), w("abAB"));
    }

    #[test]
    fn symplectic_basis_reproduces_relator() {
        let [(a1, b1), (a2, b2)] = symplectic_basis_genus2();
        let product = commutator(&a1, &b1).mul(&commutator(&a2, &b2));
        assert_eq!(product, surface_relator(2));
        assert_eq!(surface_relator(2).to_string(), "abcdABCD");
    }

    #[test]
    fn packing_preserves_order() {
        let words: Vec<Word> = enumerate(4, 3).unwrap().collect();
        let packed: Vec<PackedWord> = words.iter().map(|w| PackedWord::pack(w).unwrap()).collect();
        assert!(packed.windows(2).all(|p| p[0] < p[1]));
        for (w, p) in words.iter().zip(&packed) {
            assert_eq!(&p.unpack(), w);
            assert_eq!(p.len(), w.len());
        }
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn raw_letters() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec((0usize..4, prop::bool::ANY), 0..24).prop_map(|v| {
            v.into_iter()
                .map(|(i, inv)| Letter::new(i, if inv { -1 } else { 1 }))
                .collect()
        })
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(raw in raw_letters()) {
            let once = Word::reduce(raw);
            prop_assert!(Word::is_reduced(once.letters()));
            prop_assert_eq!(Word::reduce(once.letters().iter().copied()), once);
        }

        #[test]
        fn inverse_laws(raw in raw_letters()) {
            let w = Word::reduce(raw);
            prop_assert_eq!(w.inverse().inverse(), w.clone());
            prop_assert!(w.mul(&w.inverse()).is_empty());
        }
    }
}
