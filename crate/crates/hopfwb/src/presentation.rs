//! Finite presentations of homogeneous congruences on the free semigroup
//! with adjoined zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Word, WordRepr};

/// Generating data for a homogeneous semigroup congruence: pairs `u ~ v`
/// of equal positive length, plus words declared equivalent to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    d: u32,
    relations: Vec<(Word, Word)>,
    zeros: Vec<Word>,
}

#[derive(Serialize, Deserialize)]
struct PresentationFile {
    d: u32,
    #[serde(default)]
    relations: Vec<(WordRepr, WordRepr)>,
    #[serde(default)]
    zeros: Vec<WordRepr>,
}

impl Presentation {
    pub fn new(d: u32, relations: Vec<(Word, Word)>, zeros: Vec<Word>) -> Result<Self> {
        if d < 1 {
            return Err(Error::BadGeneratorCount(d));
        }
        for (u, v) in &relations {
            u.validate_letters(d)?;
            v.validate_letters(d)?;
            let (lu, lv) = (u.len()?, v.len()?);
            if lu != lv {
                return Err(Error::InhomogeneousRelation {
                    u: u.to_string(),
                    v: v.to_string(),
                    lu,
                    lv,
                });
            }
            if lu == 0 || u == v {
                return Err(Error::DegenerateRelation {
                    u: u.to_string(),
                    v: v.to_string(),
                });
            }
        }
        for z in &zeros {
            z.validate_letters(d)?;
            if z.len()? == 0 {
                return Err(Error::EmptyZeroWord);
            }
        }
        Ok(Presentation {
            d,
            relations,
            zeros,
        })
    }

    /// The trivial congruence: every word is its own class.
    pub fn trivial(d: u32) -> Self {
        Presentation::new(d, Vec::new(), Vec::new()).expect("d >= 1")
    }

    /// The commutator congruence `ij ~ ji`, whose quotient is the free
    /// commutative semigroup with zero.
    pub fn commutator(d: u32) -> Self {
        let mut relations = Vec::new();
        for i in 1..=d {
            for j in (i + 1)..=d {
                relations.push((Word::from_letters([i, j]), Word::from_letters([j, i])));
            }
        }
        Presentation::new(d, relations, Vec::new()).expect("d >= 1")
    }

    /// Congruence generated by declaring the given words zero.
    pub fn with_zeros(d: u32, zeros: Vec<Word>) -> Result<Self> {
        Presentation::new(d, Vec::new(), zeros)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn relations(&self) -> &[(Word, Word)] {
        &self.relations
    }

    pub fn zeros(&self) -> &[Word] {
        &self.zeros
    }

    /// Longest word appearing among relations and zeros (0 when empty).
    pub fn max_generator_length(&self) -> usize {
        let rel = self
            .relations
            .iter()
            .map(|(u, _)| u.len().unwrap_or(0))
            .max()
            .unwrap_or(0);
        let zer = self
            .zeros
            .iter()
            .map(|z| z.len().unwrap_or(0))
            .max()
            .unwrap_or(0);
        rel.max(zer)
    }

    /// Parses the JSON presentation format:
    /// `{"d": n, "relations": [["12","21"], ...], "zeros": ["11", ...]}`.
    /// Words are digit strings for d <= 9 or integer arrays.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PresentationFile = serde_json::from_str(text)?;
        let mut relations = Vec::with_capacity(file.relations.len());
        for (u, v) in &file.relations {
            relations.push((u.parse(file.d)?, v.parse(file.d)?));
        }
        let mut zeros = Vec::with_capacity(file.zeros.len());
        for z in &file.zeros {
            zeros.push(z.parse(file.d)?);
        }
        Presentation::new(file.d, relations, zeros)
    }

    pub fn to_json(&self) -> String {
        let file = PresentationFile {
            d: self.d,
            relations: self
                .relations
                .iter()
                .map(|(u, v)| (WordRepr::of(u, self.d), WordRepr::of(v, self.d)))
                .collect(),
            zeros: self.zeros.iter().map(|z| WordRepr::of(z, self.d)).collect(),
        };
        serde_json::to_string(&file).expect("presentation serializes")
    }
}
