//! Words over a finite generator set, with an adjoined absorbing zero.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite word over generators `1..=d`, or the formal zero.
///
/// The empty word is the semigroup identity; the formal zero absorbs
/// multiplication. Length is undefined on the zero.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(clippy::len_without_is_empty)] // len is fallible; emptiness is is_empty_word
pub enum Word {
    Zero,
    Letters(Vec<u32>),
}

impl Word {
    pub fn empty() -> Self {
        Word::Letters(Vec::new())
    }

    pub fn from_letters(letters: impl Into<Vec<u32>>) -> Self {
        Word::Letters(letters.into())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Word::Zero)
    }

    pub fn is_empty_word(&self) -> bool {
        matches!(self, Word::Letters(v) if v.is_empty())
    }

    /// Length of the letter string; an error on the formal zero.
    pub fn len(&self) -> Result<usize> {
        match self {
            Word::Zero => Err(Error::ZeroLength),
            Word::Letters(v) => Ok(v.len()),
        }
    }

    pub fn letters(&self) -> Result<&[u32]> {
        match self {
            Word::Zero => Err(Error::ZeroLength),
            Word::Letters(v) => Ok(v),
        }
    }

    /// Semigroup product. Zero absorbs on either side.
    pub fn concat(&self, other: &Word) -> Word {
        match (self, other) {
            (Word::Zero, _) | (_, Word::Zero) => Word::Zero,
            (Word::Letters(a), Word::Letters(b)) => {
                let mut v = Vec::with_capacity(a.len() + b.len());
                v.extend_from_slice(a);
                v.extend_from_slice(b);
                Word::Letters(v)
            }
        }
    }

    pub fn validate_letters(&self, d: u32) -> Result<()> {
        if let Word::Letters(v) = self {
            for &l in v {
                if l < 1 || l > d {
                    return Err(Error::LetterOutOfRange { letter: l, d });
                }
            }
        }
        Ok(())
    }

    /// Multidegree: occurrence count of each generator.
    pub fn multidegree(&self, d: u32) -> Result<Vec<u32>> {
        let letters = self.letters()?;
        let mut k = vec![0u32; d as usize];
        for &l in letters {
            k[(l - 1) as usize] += 1;
        }
        Ok(k)
    }
}

/// Lexicographic rank among the d^n words of the same length.
pub fn rank(letters: &[u32], d: u32) -> u64 {
    let mut r = 0u64;
    for &l in letters {
        r = r * d as u64 + (l as u64 - 1);
    }
    r
}

/// Inverse of [`rank`].
pub fn unrank(mut r: u64, len: usize, d: u32) -> Vec<u32> {
    let mut letters = vec![1u32; len];
    for i in (0..len).rev() {
        letters[i] = (r % d as u64) as u32 + 1;
        r /= d as u64;
    }
    letters
}

/// d^n as u64, for per-level word counts.
pub fn words_at_level(d: u32, n: usize) -> u64 {
    (d as u64).pow(n as u32)
}

/// True when `factor` occurs as a contiguous subword of `w`.
pub fn contains_factor(w: &[u32], factor: &[u32]) -> bool {
    if factor.is_empty() {
        return true;
    }
    if factor.len() > w.len() {
        return false;
    }
    w.windows(factor.len()).any(|win| win == factor)
}

/// Disk form of a word: a digit string for d <= 9, an integer array otherwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WordRepr {
    Text(String),
    Array(Vec<u32>),
}

impl WordRepr {
    pub fn parse(&self, d: u32) -> Result<Word> {
        let word = match self {
            WordRepr::Text(s) => {
                let mut letters = Vec::with_capacity(s.len());
                for c in s.chars() {
                    let digit = c.to_digit(10).ok_or_else(|| Error::WordSyntax {
                        text: s.clone(),
                        reason: format!("non-digit character {c:?}"),
                    })?;
                    letters.push(digit);
                }
                if d > 9 && !letters.is_empty() {
                    return Err(Error::WordSyntax {
                        text: s.clone(),
                        reason: "digit strings are ambiguous for d > 9; use an integer array"
                            .into(),
                    });
                }
                Word::Letters(letters)
            }
            WordRepr::Array(v) => Word::Letters(v.clone()),
        };
        word.validate_letters(d)?;
        Ok(word)
    }

    pub fn of(word: &Word, d: u32) -> WordRepr {
        match word {
            Word::Zero => WordRepr::Text("0".into()),
            Word::Letters(v) => {
                if d <= 9 {
                    WordRepr::Text(v.iter().map(|l| l.to_string()).collect())
                } else {
                    WordRepr::Array(v.clone())
                }
            }
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Zero => write!(f, "0"),
            Word::Letters(v) if v.is_empty() => write!(f, "@"),
            Word::Letters(v) => {
                if v.iter().all(|&l| l <= 9) {
                    for l in v {
                        write!(f, "{l}")?;
                    }
                    Ok(())
                } else {
                    write!(f, "{v:?}")
                }
            }
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}
