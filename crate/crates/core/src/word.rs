//! Words in the free group `F_k`.
//!
//! Generators are written `a, b, c, ...` and their inverses `A, B, C, ...`,
//! which limits the rank to 26.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 26;

/// A generator `a_j` (1-based) or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    generator: u8,
    inverse: bool,
}

impl Letter {
    /// `generator` is 1-based.
    pub fn new(generator: usize, inverse: bool) -> Self {
        assert!((1..=MAX_RANK).contains(&generator), "generator {generator} out of range");
        Letter { generator: generator as u8, inverse }
    }

    pub fn generator(self) -> usize {
        self.generator as usize
    }

    /// 0-based label index, convenient for adjacency tables.
    pub fn label(self) -> usize {
        self.generator as usize - 1
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inverse(self) -> Self {
        Letter { generator: self.generator, inverse: !self.inverse }
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + self.generator - 1) as char;
        if self.inverse {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    fn from_char(c: char, rank: usize) -> Result<Self> {
        if !c.is_ascii_alphabetic() {
            return Err(Error::InvalidInput(format!("`{c}` is not a generator letter")));
        }
        let generator = (c.to_ascii_lowercase() as u8 - b'a') as usize + 1;
        if generator > rank {
            return Err(Error::InvalidGenerator { letter: c, rank });
        }
        Ok(Letter::new(generator, c.is_ascii_uppercase()))
    }
}

/// An element of `F_rank` written as a letter sequence. Not necessarily reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
    rank: usize,
}

pub(crate) fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        Err(Error::InvalidRank(rank))
    } else {
        Ok(())
    }
}

impl Word {
    /// Parses a word letter by letter, without any reduction. Whitespace is ignored;
    /// the empty string is the identity.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        check_rank(rank)?;
        let letters = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| Letter::from_char(c, rank))
            .collect::<Result<Vec<_>>>()?;
        Ok(Word { letters, rank })
    }

    pub fn identity(rank: usize) -> Self {
        Word { letters: Vec::new(), rank }
    }

    pub fn from_letters(letters: Vec<Letter>, rank: usize) -> Result<Self> {
        check_rank(rank)?;
        if let Some(l) = letters.iter().find(|l| l.generator() > rank) {
            return Err(Error::InvalidGenerator { letter: l.to_char(), rank });
        }
        Ok(Word { letters, rank })
    }

    /// The generator `a_j` as a one-letter word.
    pub fn generator(j: usize, rank: usize) -> Self {
        assert!(j >= 1 && j <= rank);
        Word { letters: vec![Letter::new(j, false)], rank }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.free_reduce().is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0] != w[1].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.letters.first(), self.letters.last()) {
                (Some(&f), Some(&l)) if self.len() > 1 => f != l.inverse(),
                _ => true,
            }
    }

    pub fn inverse(&self) -> Self {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            rank: self.rank,
        }
    }

    /// Concatenation, without reduction.
    pub fn concat(&self, other: &Word) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters, rank: self.rank.max(other.rank) }
    }

    /// `self` repeated `k` times, without reduction.
    pub fn pow(&self, k: usize) -> Self {
        Word { letters: self.letters.repeat(k), rank: self.rank }
    }

    pub fn free_reduce(&self) -> Self {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out, rank: self.rank }
    }

    /// Returns `(core, conjugator)` with `core` cyclically reduced and
    /// `self = conjugator * core * conjugator^-1` in the free group.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let r = self.free_reduce().letters;
        let mut lo = 0;
        let mut hi = r.len();
        while hi - lo >= 2 && r[lo] == r[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        (
            Word { letters: r[lo..hi].to_vec(), rank: self.rank },
            Word { letters: r[..lo].to_vec(), rank: self.rank },
        )
    }

    /// Writes a nonempty word as `u^e` with `u` not a proper power and `e` maximal.
    pub fn power_decompose(&self) -> Result<(Word, usize)> {
        let n = self.letters.len();
        if n == 0 {
            return Err(Error::DegenerateInput("the identity has no root".into()));
        }
        for period in 1..=n {
            if n.is_multiple_of(period) && (period..n).all(|i| self.letters[i] == self.letters[i - period]) {
                let root = Word { letters: self.letters[..period].to_vec(), rank: self.rank };
                return Ok((root, n / period));
            }
        }
        unreachable!("the full length is always a period")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses a comma-separated list of words; empty entries are skipped.
pub fn parse_word_list(text: &str, rank: usize) -> Result<Vec<Word>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Word::parse(s, rank))
        .collect()
}
