//! Free-group words over a signed alphabet, cyclic operations, and exact
//! counting / uniform sampling of constrained reduced words.
//!
//! Letters are nonzero integers: `k > 0` is the generator `s_k`, `-k` its
//! inverse. In text form generator `k` is the `k`-th lowercase letter and its
//! inverse the matching uppercase letter, so `"abAB"` is the commutator of the
//! first two generators.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A signed generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter(i32);

impl Letter {
    pub fn new(value: i32, n: usize) -> Result<Letter> {
        if value == 0 || value.unsigned_abs() as usize > n {
            return Err(Error::Alphabet(format!(
                "letter {value} outside alphabet of size {n}"
            )));
        }
        Ok(Letter(value))
    }

    pub fn value(self) -> i32 {
        self.0
    }

    /// 1-based generator number.
    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// Dense index in `0..2n` following the order `a < A < b < B < ...`.
    pub fn index(self) -> usize {
        2 * (self.generator() - 1) + usize::from(self.0 < 0)
    }

    pub fn from_index(idx: usize) -> Letter {
        let g = (idx / 2 + 1) as i32;
        if idx.is_multiple_of(2) {
            Letter(g)
        } else {
            Letter(-g)
        }
    }

    pub fn to_char(self) -> Option<char> {
        let g = self.generator();
        if g > 26 {
            return None;
        }
        let base = if self.is_positive() { b'a' } else { b'A' };
        Some((base + (g as u8 - 1)) as char)
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a'..='z' => Some(Letter(c as i32 - 'a' as i32 + 1)),
            'A'..='Z' => Some(Letter(-(c as i32 - 'A' as i32 + 1))),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_char() {
            Some(c) => write!(f, "{c}"),
            None => write!(f, "{}", self.0),
        }
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index().cmp(&other.index())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A freely reduced word. Ordering is ShortLex: length first, then
/// lexicographic with `a < A < b < B < ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Free reduction of a raw letter sequence, validating the alphabet.
pub fn reduce(raw: &[i32], n: usize) -> Result<Word> {
    let mut out: Vec<Letter> = Vec::with_capacity(raw.len());
    for &v in raw {
        let l = Letter::new(v, n)?;
        push_reduced(&mut out, l);
    }
    Ok(Word(out))
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inverse()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// Freely reduces the given letters.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Word {
        let mut out = Vec::new();
        for l in letters {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// Wraps letters already known to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|w| w[0] != w[1].inverse()));
        Word(letters)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    /// Parses the text form (`^[a-zA-Z]*$`, case = sign) and reduces.
    pub fn parse(text: &str, n: usize) -> Result<Word> {
        let mut raw = Vec::with_capacity(text.len());
        for c in text.chars() {
            let l = Letter::from_char(c)
                .ok_or_else(|| Error::Alphabet(format!("invalid character {c:?} in {text:?}")))?;
            raw.push(l.value());
        }
        reduce(&raw, n)
    }

    /// Parses text without an alphabet bound; the alphabet is inferred.
    pub fn parse_unbounded(text: &str) -> Result<Word> {
        Word::parse(text, 26)
    }

    pub fn from_ints(values: &[i32], n: usize) -> Result<Word> {
        reduce(values, n)
    }

    pub fn to_ints(&self) -> Vec<i32> {
        self.0.iter().map(|l| l.value()).collect()
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

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Largest generator number used.
    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.generator()).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Product in the free group.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn mul_letter(&self, l: Letter) -> Word {
        let mut out = self.0.clone();
        push_reduced(&mut out, l);
        Word(out)
    }

    /// `self · w · self⁻¹`.
    pub fn conjugate(&self, w: &Word) -> Word {
        self.mul(w).mul(&self.inverse())
    }

    /// Subword `[start, end)`; always reduced.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Concatenation that must not cancel at the seam.
    pub fn concat_exact(&self, other: &Word) -> Option<Word> {
        if let (Some(a), Some(b)) = (self.last(), other.first()) {
            if a == b.inverse() {
                return None;
            }
        }
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Some(Word(v))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => self.0.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    /// Splits `w = conjugator · core · conjugator⁻¹` with `core` cyclically
    /// reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let v = &self.0;
        let mut i = 0;
        let mut j = v.len();
        while j >= i + 2 && v[i] == v[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        (Word(v[i..j].to_vec()), Word(v[..i].to_vec()))
    }

    /// Rotation starting at `offset`. Only meaningful for cyclically reduced
    /// words, for which the result is again reduced.
    pub fn rotate(&self, offset: usize) -> Word {
        if self.0.is_empty() {
            return Word::empty();
        }
        let k = offset % self.0.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// All rotations (with repetition for proper powers).
    pub fn cyclic_conjugates(&self) -> Vec<Word> {
        (0..self.0.len().max(1))
            .map(|k| self.rotate(k))
            .collect()
    }

    /// ShortLex-least rotation: a canonical name for the cyclic word.
    pub fn min_rotation(&self) -> Word {
        self.cyclic_conjugates().into_iter().min().unwrap_or_default()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| l.is_positive())
    }

    /// Text form; `None` if some generator exceeds 26.
    pub fn to_text(&self) -> Option<String> {
        self.0.iter().map(|l| l.to_char()).collect()
    }

    pub fn starts_with(&self, prefix: &[Letter]) -> bool {
        self.0.starts_with(prefix)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Some(s) if s.is_empty() => write!(f, "ε"),
            Some(s) => write!(f, "{s}"),
            None => write!(f, "{:?}", self.to_ints()),
        }
    }
}

impl std::ops::Index<usize> for Word {
    type Output = Letter;
    fn index(&self, i: usize) -> &Letter {
        &self.0[i]
    }
}

/// JSON form of a word: a string when every generator fits in `a..z`,
/// otherwise an array of nonzero integers. Both forms are accepted on input.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum WordRepr {
    Text(String),
    Ints(Vec<i32>),
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.to_text() {
            Some(t) => WordRepr::Text(t).serialize(s),
            None => WordRepr::Ints(self.to_ints()).serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Word, D::Error> {
        let repr = WordRepr::deserialize(d)?;
        let w = match repr {
            WordRepr::Text(t) => Word::parse_unbounded(&t),
            WordRepr::Ints(v) => reduce(&v, i32::MAX as usize),
        };
        w.map_err(serde::de::Error::custom)
    }
}

/// Constraints on reduced words of a fixed length.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordConstraints {
    pub first: Option<Letter>,
    pub last: Option<Letter>,
    pub cyclically_reduced: bool,
    pub positive: bool,
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i32(self.0)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Letter, D::Error> {
        let v = i32::deserialize(d)?;
        if v == 0 {
            return Err(serde::de::Error::custom("letter 0"));
        }
        Ok(Letter(v))
    }
}

impl WordConstraints {
    pub fn cell(first: Letter, last: Letter) -> WordConstraints {
        WordConstraints {
            first: Some(first),
            last: Some(last),
            ..Default::default()
        }
    }

    pub fn cyclic() -> WordConstraints {
        WordConstraints {
            cyclically_reduced: true,
            ..Default::default()
        }
    }

    pub fn positive() -> WordConstraints {
        WordConstraints {
            positive: true,
            ..Default::default()
        }
    }

    /// Does `w` (assumed reduced, of the right length) satisfy these?
    pub fn admits(&self, w: &Word) -> bool {
        if let Some(f) = self.first {
            if w.first() != Some(f) {
                return false;
            }
        }
        if let Some(l) = self.last {
            if w.last() != Some(l) {
                return false;
            }
        }
        if self.cyclically_reduced && !w.is_cyclically_reduced() {
            return false;
        }
        if self.positive && !w.is_positive() {
            return false;
        }
        true
    }
}

/// Exact count of reduced words of length `l` over `n` generators satisfying
/// `c`.
pub fn count_reduced_words(n: usize, l: usize, c: &WordConstraints) -> Result<BigUint> {
    Ok(WordSpace::new(n, l, *c)?.total().clone())
}

/// The set of reduced words of one length satisfying fixed constraints,
/// with dynamic-programming tables for ranking and exact uniform sampling.
///
/// For each admissible first letter `f` the table `ways[f][m][x]` counts the
/// continuations of `m` further letters after `x` that end in an allowed last
/// letter (allowed-last depends on `f` when cyclic reduction is required).
#[derive(Clone, Debug)]
pub struct WordSpace {
    n: usize,
    len: usize,
    constraints: WordConstraints,
    alphabet: Vec<bool>,
    first_counts: Vec<BigUint>,
    ways: Vec<Vec<Vec<BigUint>>>,
    total: BigUint,
}

impl WordSpace {
    pub fn new(n: usize, len: usize, c: WordConstraints) -> Result<WordSpace> {
        if n == 0 || len == 0 {
            return Err(Error::Contract(format!("need n ≥ 1 and l ≥ 1 (n={n}, l={len})")));
        }
        for l in [c.first, c.last].into_iter().flatten() {
            Letter::new(l.value(), n)?;
        }
        if len == 1 {
            if let (Some(f), Some(e)) = (c.first, c.last) {
                if f != e {
                    return Err(Error::Contract(format!(
                        "length-1 words cannot start with {f:?} and end with {e:?}"
                    )));
                }
            }
        }
        let k = 2 * n;
        let alphabet: Vec<bool> = (0..k).map(|i| !c.positive || i % 2 == 0).collect();
        let mut first_counts = vec![BigUint::zero(); k];
        let mut ways = vec![Vec::new(); k];
        for f in 0..k {
            if !alphabet[f] || c.first.is_some_and(|x| x.index() != f) {
                continue;
            }
            let allowed_last: Vec<bool> = (0..k)
                .map(|x| {
                    alphabet[x]
                        && c.last.is_none_or(|e| e.index() == x)
                        && (!c.cyclically_reduced || len == 1 || x != (f ^ 1))
                })
                .collect();
            let mut table: Vec<Vec<BigUint>> = Vec::with_capacity(len);
            table.push(
                allowed_last
                    .iter()
                    .map(|&b| if b { BigUint::one() } else { BigUint::zero() })
                    .collect(),
            );
            for m in 1..len {
                let prev = &table[m - 1];
                let sum: BigUint = (0..k).filter(|&y| alphabet[y]).map(|y| &prev[y]).sum();
                let row: Vec<BigUint> = (0..k)
                    .map(|x| {
                        if alphabet[x ^ 1] {
                            &sum - &prev[x ^ 1]
                        } else {
                            sum.clone()
                        }
                    })
                    .collect();
                table.push(row);
            }
            first_counts[f] = table[len - 1][f].clone();
            ways[f] = table;
        }
        let total = first_counts.iter().sum();
        Ok(WordSpace {
            n,
            len,
            constraints: c,
            alphabet,
            first_counts,
            ways,
            total,
        })
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn total_u128(&self) -> Option<u128> {
        self.total.to_u128()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_zero()
    }

    pub fn constraints(&self) -> &WordConstraints {
        &self.constraints
    }

    /// The word of rank `idx` in ShortLex order within this space.
    pub fn unrank(&self, idx: &BigUint) -> Result<Word> {
        if idx >= &self.total {
            return Err(Error::Contract(format!("rank {idx} ≥ size {}", self.total)));
        }
        let k = 2 * self.n;
        let mut rem = idx.clone();
        let mut f = 0;
        while f < k {
            if rem < self.first_counts[f] {
                break;
            }
            rem -= &self.first_counts[f];
            f += 1;
        }
        let table = &self.ways[f];
        let mut letters = vec![Letter::from_index(f)];
        let mut cur = f;
        for pos in 1..self.len {
            let m = self.len - 1 - pos;
            let mut chosen = None;
            for y in 0..k {
                if !self.alphabet[y] || y == (cur ^ 1) {
                    continue;
                }
                let w = &table[m][y];
                if rem < *w {
                    chosen = Some(y);
                    break;
                }
                rem -= w;
            }
            let y = chosen.expect("rank tables are consistent");
            letters.push(Letter::from_index(y));
            cur = y;
        }
        Ok(Word::from_reduced(letters))
    }

    /// Rank of `w` in ShortLex order; `None` if `w` is not in the space.
    pub fn rank(&self, w: &Word) -> Option<BigUint> {
        if w.len() != self.len || !self.constraints.admits(w) {
            return None;
        }
        let k = 2 * self.n;
        let f = w[0].index();
        let mut r: BigUint = self.first_counts[..f].iter().sum();
        let table = &self.ways[f];
        let mut cur = f;
        for pos in 1..self.len {
            let m = self.len - 1 - pos;
            let target = w[pos].index();
            for y in 0..target.min(k) {
                if self.alphabet[y] && y != (cur ^ 1) {
                    r += &table[m][y];
                }
            }
            cur = target;
        }
        Some(r)
    }

    /// One uniform draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Word> {
        if self.is_empty() {
            return Err(Error::EmptySample(format!(
                "n={}, l={}, {:?}",
                self.n, self.len, self.constraints
            )));
        }
        let idx = rng.gen_biguint_below(&self.total);
        self.unrank(&idx)
    }

    /// `m` distinct words, uniform over `m`-subsets (Floyd's algorithm on
    /// ranks). Returns the words in ShortLex order plus the number of draws
    /// that hit an already-chosen rank.
    pub fn sample_distinct<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Result<(Vec<Word>, usize)> {
        let big_m = BigUint::from(m);
        if big_m > self.total {
            return Err(Error::Model(format!(
                "requested {m} distinct words but only {} exist (n={}, l={})",
                self.total, self.n, self.len
            )));
        }
        let (ranks, collisions) = floyd(&self.total, m, rng);
        let words = ranks
            .iter()
            .map(|r| self.unrank(r))
            .collect::<Result<Vec<_>>>()?;
        Ok((words, collisions))
    }

    /// `m` distinct words uniform over `m`-subsets of the space minus
    /// `excluded`, in ShortLex order.
    pub fn sample_distinct_excluding<R: Rng + ?Sized>(
        &self,
        m: usize,
        excluded: &[Word],
        rng: &mut R,
    ) -> Result<Vec<Word>> {
        let mut ex: Vec<BigUint> = excluded.iter().filter_map(|w| self.rank(w)).collect();
        ex.sort();
        ex.dedup();
        let avail = &self.total - BigUint::from(ex.len());
        if BigUint::from(m) > avail {
            return Err(Error::Model(format!(
                "requested {m} new words but only {avail} remain (n={}, l={})",
                self.n, self.len
            )));
        }
        let (picks, _) = floyd(&avail, m, rng);
        picks
            .into_iter()
            .map(|mut r| {
                for e in &ex {
                    if *e <= r {
                        r += 1u32;
                    } else {
                        break;
                    }
                }
                self.unrank(&r)
            })
            .collect()
    }
}

/// Floyd's algorithm: a uniform `m`-subset of `0..total`, sorted, plus the
/// number of draws that hit an already-chosen value.
fn floyd<R: Rng + ?Sized>(total: &BigUint, m: usize, rng: &mut R) -> (Vec<BigUint>, usize) {
    let mut chosen: HashSet<BigUint> = HashSet::with_capacity(m);
    let mut collisions = 0;
    let mut j = total - BigUint::from(m);
    while &j < total {
        let t = rng.gen_biguint_below(&(&j + 1u32));
        if chosen.contains(&t) {
            collisions += 1;
            chosen.insert(j.clone());
        } else {
            chosen.insert(t);
        }
        j += 1u32;
    }
    let mut ranks: Vec<BigUint> = chosen.into_iter().collect();
    ranks.sort();
    (ranks, collisions)
}

/// Uniform draw of a single constrained word.
pub fn sample_word<R: Rng + ?Sized>(n: usize, l: usize, c: &WordConstraints, rng: &mut R) -> Result<Word> {
    WordSpace::new(n, l, *c)?.sample(rng)
}

/// All reduced words of length exactly `l` (brute force, for small cases).
pub fn enumerate_reduced(n: usize, l: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for _ in 0..l {
        let mut next = Vec::with_capacity(out.len() * 2 * n);
        for w in &out {
            for idx in 0..2 * n {
                let x = Letter::from_index(idx);
                if w.last() == Some(x.inverse()) {
                    continue;
                }
                let mut v = w.0.clone();
                v.push(x);
                next.push(Word(v));
            }
        }
        out = next;
    }
    out
}
