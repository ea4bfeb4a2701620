//! Permutations in one-line notation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A permutation of `1..=n` written in one-line notation `π₁…πₙ`.
///
/// Linear extensions and the members of a [`PermSubset`](crate::subsets::PermSubset)
/// are both words. Letters are stored as `u8`, so `n ≤ 255`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

/// A linear extension of a poset, as a word.
pub type LinearExtension = Word;

impl Word {
    /// Builds a word, checking that it is a permutation of `1..=n`.
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        let n = letters.len();
        let mut seen = vec![false; n + 1];
        for &l in &letters {
            let l = l as usize;
            if l == 0 || l > n || seen[l] {
                return Err(Error::malformed(0, format!("{letters:?} is not a permutation")));
            }
            seen[l] = true;
        }
        Ok(Word(letters))
    }

    pub(crate) fn from_vec_unchecked(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn identity(n: usize) -> Self {
        Word((1..=n as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    /// Letter at 1-based position `i`.
    pub fn at(&self, i: usize) -> usize {
        self.0[i - 1] as usize
    }

    /// 1-based position of `letter`, i.e. `π⁻¹(letter)`.
    pub fn position(&self, letter: usize) -> Option<usize> {
        self.0.iter().position(|&l| l as usize == letter).map(|p| p + 1)
    }

    pub fn inverse(&self) -> Word {
        let mut inv = vec![0u8; self.0.len()];
        for (pos, &l) in self.0.iter().enumerate() {
            inv[l as usize - 1] = pos as u8 + 1;
        }
        Word(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &l)| l as usize == i + 1)
    }

    pub fn inversions(&self) -> usize {
        let w = &self.0;
        (0..w.len())
            .map(|i| w[i + 1..].iter().filter(|&&b| b < w[i]).count())
            .sum()
    }

    /// Swaps 1-based positions `i` and `i + 1`.
    pub fn swapped(&self, i: usize) -> Word {
        let mut w = self.0.clone();
        w.swap(i - 1, i);
        Word(w)
    }

    pub fn has_fixed_point(&self) -> bool {
        self.0.iter().enumerate().any(|(i, &l)| l as usize == i + 1)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() <= 9 {
            for l in &self.0 {
                write!(f, "{l}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
            f.write_str(&parts.join(" "))
        }
    }
}

/// Parses either compact digits (`"2143"`, only for `n ≤ 9`) or letters
/// separated by spaces or commas (`"10 2 1 ..."`).
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let letters: Vec<u8> = if s.contains(|c: char| c == ' ' || c == ',') {
            s.split(|c: char| c == ' ' || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u8>()
                        .map_err(|_| Error::malformed(0, format!("bad letter {t:?}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::malformed(0, format!("bad letter {c:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        Word::new(letters)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
