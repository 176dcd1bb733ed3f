//! Exact arithmetic for finite formal series over the quotient semigroup,
//! plus the pre-quotient free-word model and the collapse map between them.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};

use crate::congruence::{ClassId, ClassTable, NzClassId};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, rc_is_zero, rc_one, rc_real, Rc};
use crate::word::{Word, WordRepr};

/// A finite series sum a_s L_s over nonzero classes of a fixed table.
/// Coefficients are exact; the zero class never appears as a key and stored
/// coefficients are never zero.
#[derive(Debug, Clone)]
pub struct Element {
    table: Arc<ClassTable>,
    terms: BTreeMap<NzClassId, Rc>,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.compatible(other) && self.terms == other.terms
    }
}
impl Eq for Element {}

pub(crate) fn same_table(a: &Arc<ClassTable>, b: &Arc<ClassTable>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Element {
    pub fn zero(table: &Arc<ClassTable>) -> Self {
        Element {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The unit I = L_{[empty]}.
    pub fn identity(table: &Arc<ClassTable>) -> Self {
        Element::monomial(table, table.identity_class(), rc_one())
    }

    pub fn monomial(table: &Arc<ClassTable>, id: NzClassId, coeff: Rc) -> Self {
        let mut e = Element::zero(table);
        e.add_term(id, coeff);
        e
    }

    /// L_s for the class of the given word; the zero class yields the zero
    /// element.
    pub fn from_word(table: &Arc<ClassTable>, word: &Word) -> Result<Self> {
        match table.class_of(word)? {
            ClassId::Zero => Ok(Element::zero(table)),
            ClassId::Nonzero(id) => Ok(Element::monomial(table, id, rc_one())),
        }
    }

    pub fn table(&self) -> &Arc<ClassTable> {
        &self.table
    }

    pub fn terms(&self) -> impl Iterator<Item = (&NzClassId, &Rc)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = NzClassId> + '_ {
        self.terms.keys().copied()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn compatible(&self, other: &Element) -> bool {
        same_table(&self.table, &other.table)
    }

    pub fn add_term(&mut self, id: NzClassId, coeff: Rc) {
        if rc_is_zero(&coeff) {
            return;
        }
        match self.terms.entry(id) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if rc_is_zero(&sum) {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    /// Maximum key level; `None` for the zero element.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|id| id.level as usize).max()
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        if !self.compatible(other) {
            return Err(Error::TableMismatch);
        }
        let mut out = self.clone();
        for (id, c) in &other.terms {
            out.add_term(*id, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.scale(&-rc_one()))
    }

    pub fn scale(&self, factor: &Rc) -> Element {
        let mut out = Element::zero(&self.table);
        if rc_is_zero(factor) {
            return out;
        }
        for (id, c) in &self.terms {
            out.add_term(*id, c.clone() * factor.clone());
        }
        out
    }

    /// Bilinear extension of class multiplication; terms landing in the zero
    /// class are dropped. Errors when the combined degree outruns the table.
    pub fn product(&self, other: &Element) -> Result<Element> {
        if !self.compatible(other) {
            return Err(Error::TableMismatch);
        }
        let max = self.table.max_level();
        if let (Some(da), Some(db)) = (self.degree(), other.degree()) {
            if da + db > max {
                return Err(Error::LevelOverflow {
                    requested: da + db,
                    max,
                });
            }
        }
        let mut out = Element::zero(&self.table);
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                match self
                    .table
                    .multiply(ClassId::Nonzero(*s), ClassId::Nonzero(*t))?
                {
                    ClassId::Zero => {}
                    ClassId::Nonzero(st) => out.add_term(st, a.clone() * b.clone()),
                }
            }
        }
        Ok(out)
    }

    /// The s-th Fourier coefficient (zero when absent).
    pub fn fourier(&self, s: NzClassId) -> Rc {
        self.terms
            .get(&s)
            .cloned()
            .unwrap_or_else(crate::scalar::rc_zero)
    }

    /// Degree-weighted partial sum: level-n terms scale by (1 - n/k) for
    /// n < k and vanish for n >= k. Exact rational scaling.
    pub fn cesaro(&self, k: usize) -> Element {
        assert!(k >= 1, "cesaro order must be positive");
        let mut out = Element::zero(&self.table);
        for (id, c) in &self.terms {
            let n = id.level as usize;
            if n >= k {
                continue;
            }
            let weight = BigRational::new(BigInt::from((k - n) as u64), BigInt::from(k as u64));
            out.add_term(*id, c.clone() * rc_real(weight));
        }
        out
    }

    /// Restriction of the series to keys at one level.
    pub fn graded_block(&self, level: usize) -> Element {
        let mut out = Element::zero(&self.table);
        for (id, c) in &self.terms {
            if id.level as usize == level {
                out.add_term(*id, c.clone());
            }
        }
        out
    }

    /// Reads `{"terms":[{"class":"<word>","re":q,"im":q},...]}` against a
    /// table; any member word addresses its class, words in zero classes are
    /// rejected.
    pub fn from_json(table: &Arc<ClassTable>, text: &str) -> Result<Element> {
        let file: ElementFile = serde_json::from_str(text)?;
        let mut out = Element::zero(table);
        for term in &file.terms {
            let word = term.class.parse(table.d())?;
            let re = parse_rational(&term.re)?;
            let im = parse_rational(term.im.as_deref().unwrap_or("0"))?;
            match table.class_of(&word)? {
                ClassId::Zero => {
                    return Err(Error::Invalid(format!(
                        "word {word} lies in the zero class and cannot index a term"
                    )))
                }
                ClassId::Nonzero(id) => out.add_term(id, num::Complex::new(re, im)),
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let d = self.table.d();
        let terms: Vec<ElementTermFile> = self
            .terms
            .iter()
            .map(|(id, c)| ElementTermFile {
                class: WordRepr::of(&self.table.representative(*id).expect("key exists"), d),
                re: crate::scalar::format_rational(&c.re),
                im: Some(crate::scalar::format_rational(&c.im)),
            })
            .collect();
        serde_json::to_string(&ElementFile { terms }).expect("element serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct ElementFile {
    terms: Vec<ElementTermFile>,
}

#[derive(Serialize, Deserialize)]
struct ElementTermFile {
    class: WordRepr,
    re: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<String>,
}

/// A finite series over free words, before passing to the quotient. Used to
/// state collapse-intertwining identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeElement {
    d: u32,
    terms: BTreeMap<Vec<u32>, Rc>,
}

impl FreeElement {
    pub fn zero(d: u32) -> Self {
        FreeElement {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(d: u32) -> Self {
        let mut e = FreeElement::zero(d);
        e.add_term(Vec::new(), rc_one());
        e
    }

    pub fn monomial(d: u32, word: &Word, coeff: Rc) -> Result<Self> {
        word.validate_letters(d)?;
        let mut e = FreeElement::zero(d);
        e.add_term(word.letters()?.to_vec(), coeff);
        Ok(e)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rc)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: Vec<u32>, coeff: Rc) {
        if rc_is_zero(&coeff) {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if rc_is_zero(&sum) {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    pub fn add(&self, other: &FreeElement) -> FreeElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Rc) -> FreeElement {
        let mut out = FreeElement::zero(self.d);
        if rc_is_zero(factor) {
            return out;
        }
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.clone() * factor.clone());
        }
        out
    }

    /// Free concatenation product.
    pub fn product(&self, other: &FreeElement) -> FreeElement {
        let mut out = FreeElement::zero(self.d);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a.clone() * b.clone());
            }
        }
        out
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).max()
    }

    /// True when all terms share one length (the zero series is homogeneous).
    pub fn is_homogeneous(&self) -> bool {
        let mut lengths = self.terms.keys().map(|w| w.len());
        match lengths.next() {
            None => true,
            Some(first) => lengths.all(|l| l == first),
        }
    }

    /// Cesaro map on the free model, mirroring [`Element::cesaro`].
    pub fn cesaro(&self, k: usize) -> FreeElement {
        assert!(k >= 1, "cesaro order must be positive");
        let mut out = FreeElement::zero(self.d);
        for (w, c) in &self.terms {
            let n = w.len();
            if n >= k {
                continue;
            }
            let weight = BigRational::new(BigInt::from((k - n) as u64), BigInt::from(k as u64));
            out.add_term(w.clone(), c.clone() * rc_real(weight));
        }
        out
    }

    /// Collapse onto the quotient: word keys map to their classes, terms in
    /// zero classes are dropped.
    pub fn collapse(&self, table: &Arc<ClassTable>) -> Result<Element> {
        let mut out = Element::zero(table);
        for (w, c) in &self.terms {
            match table.class_of(&Word::Letters(w.clone()))? {
                ClassId::Zero => {}
                ClassId::Nonzero(id) => out.add_term(id, c.clone()),
            }
        }
        Ok(out)
    }

    /// Reads `{"terms":[{"word":"<word>","re":q,"im":q},...]}`.
    pub fn from_json(d: u32, text: &str) -> Result<FreeElement> {
        let file: FreeElementFile = serde_json::from_str(text)?;
        let mut out = FreeElement::zero(d);
        for term in &file.terms {
            let word = term.word.parse(d)?;
            let re = parse_rational(&term.re)?;
            let im = parse_rational(term.im.as_deref().unwrap_or("0"))?;
            out.add_term(word.letters()?.to_vec(), num::Complex::new(re, im));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct FreeElementFile {
    terms: Vec<FreeElementTermFile>,
}

#[derive(Serialize, Deserialize)]
struct FreeElementTermFile {
    word: WordRepr,
    re: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<String>,
}
