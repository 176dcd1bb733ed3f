//! Comultiplication and its consequences: coassociativity, semigroup-like
//! elements, coideal membership, the indicator-basis criterion for degree
//! slices of ideals, and spatial corepresentation checks.
//!
//! Everything except the corepresentation residual runs on the exact
//! polynomial model; identities are asserted as equalities of rational
//! coefficient maps, with no tolerances.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num::complex::Complex64;

use crate::algebra::{same_table, Element, FreeElement};
use crate::congruence::{ClassId, ClassTable, NzClassId};
use crate::error::{Error, Result};
use crate::fock::{evaluate, left_regular, SemigroupSpace};
use crate::linalg_exact::{in_span, nullspace, rref};
use crate::scalar::{rc_is_zero, rc_order_key, rc_zero, Rc};
use crate::word::{unrank, words_at_level, Word};

/// A finite series over pairs of nonzero classes: the polynomial model of a
/// two-fold tensor.
#[derive(Debug, Clone)]
pub struct TensorElement {
    table: Arc<ClassTable>,
    terms: BTreeMap<(NzClassId, NzClassId), Rc>,
}

impl PartialEq for TensorElement {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}
impl Eq for TensorElement {}

impl TensorElement {
    pub fn zero(table: &Arc<ClassTable>) -> Self {
        TensorElement {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn table(&self) -> &Arc<ClassTable> {
        &self.table
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(NzClassId, NzClassId), &Rc)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: (NzClassId, NzClassId), coeff: Rc) {
        if rc_is_zero(&coeff) {
            return;
        }
        match self.terms.entry(key) {
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

    /// Elementary tensor a (x) b.
    pub fn pure(a: &Element, b: &Element) -> Result<TensorElement> {
        if !same_table(a.table(), b.table()) {
            return Err(Error::TableMismatch);
        }
        let mut out = TensorElement::zero(a.table());
        for (&s, ca) in a.terms() {
            for (&t, cb) in b.terms() {
                out.add_term((s, t), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    /// Componentwise product of tensors, with zero-class terms dropped.
    pub fn product(&self, other: &TensorElement) -> Result<TensorElement> {
        if !same_table(&self.table, &other.table) {
            return Err(Error::TableMismatch);
        }
        let mut out = TensorElement::zero(&self.table);
        for ((s1, t1), a) in &self.terms {
            for ((s2, t2), b) in &other.terms {
                let left = self
                    .table
                    .multiply(ClassId::Nonzero(*s1), ClassId::Nonzero(*s2))?;
                let right = self
                    .table
                    .multiply(ClassId::Nonzero(*t1), ClassId::Nonzero(*t2))?;
                if let (ClassId::Nonzero(l), ClassId::Nonzero(r)) = (left, right) {
                    out.add_term((l, r), a.clone() * b.clone());
                }
            }
        }
        Ok(out)
    }
}

/// Three-fold tensors, used only to state coassociativity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleTensor {
    terms: BTreeMap<(NzClassId, NzClassId, NzClassId), Rc>,
}

impl TripleTensor {
    fn add_term(&mut self, key: (NzClassId, NzClassId, NzClassId), coeff: Rc) {
        if rc_is_zero(&coeff) {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(rc_zero);
        *entry = entry.clone() + coeff;
        if rc_is_zero(entry) {
            self.terms.remove(&key);
        }
    }
}

/// The comultiplication on the polynomial model: L_s maps to L_s (x) L_s,
/// extended linearly.
pub fn comultiply(e: &Element) -> TensorElement {
    let mut out = TensorElement::zero(e.table());
    for (&s, c) in e.terms() {
        out.add_term((s, s), c.clone());
    }
    out
}

/// e (x) e with coefficients multiplied out.
pub fn tensor_square(e: &Element) -> TensorElement {
    TensorElement::pure(e, e).expect("same table")
}

/// Applies the comultiplication to the left leg: (s,t) maps to (s,s,t).
pub fn comultiply_left_leg(t: &TensorElement) -> TripleTensor {
    let mut out = TripleTensor {
        terms: BTreeMap::new(),
    };
    for (&(s, u), c) in t.terms() {
        out.add_term((s, s, u), c.clone());
    }
    out
}

/// Applies the comultiplication to the right leg: (s,t) maps to (s,t,t).
pub fn comultiply_right_leg(t: &TensorElement) -> TripleTensor {
    let mut out = TripleTensor {
        terms: BTreeMap::new(),
    };
    for (&(s, u), c) in t.terms() {
        out.add_term((s, u, u), c.clone());
    }
    out
}

/// Coassociativity holds identically on the diagonal comultiplication; this
/// verifies it coefficient by coefficient for a concrete element.
pub fn coassociativity_holds(e: &Element) -> bool {
    let delta = comultiply(e);
    comultiply_right_leg(&delta) == comultiply_left_leg(&delta)
}

/// True exactly when the comultiplication of e equals its tensor square:
/// by the spectrum argument this happens only for single monomials L_s with
/// coefficient one, and for the zero element.
pub fn is_semigroup_like(e: &Element) -> bool {
    comultiply(e) == tensor_square(e)
}

/// Exhaustive scan of 0/1-coefficient series supported on classes of level
/// <= `max_degree`; returns the supports recognized as semigroup-like.
pub fn semigroup_like_scan(
    table: &Arc<ClassTable>,
    max_degree: usize,
) -> Result<Vec<Vec<NzClassId>>> {
    let classes = table.classes_up_to(max_degree);
    if classes.len() > 20 {
        return Err(Error::ScanTooLarge(classes.len()));
    }
    let mut found = Vec::new();
    for mask in 0u64..(1u64 << classes.len()) {
        let mut e = Element::zero(table);
        let mut support = Vec::new();
        for (i, &id) in classes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                e.add_term(id, crate::scalar::rc_one());
                support.push(id);
            }
        }
        if is_semigroup_like(&e) {
            found.push(support);
        }
    }
    Ok(found)
}

/// A finite tensor series over pairs of free words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FreeTensorElement {
    terms: BTreeMap<(Vec<u32>, Vec<u32>), Rc>,
}

impl FreeTensorElement {
    pub fn new() -> Self {
        FreeTensorElement::default()
    }

    pub fn add_term(&mut self, key: (Vec<u32>, Vec<u32>), coeff: Rc) {
        if rc_is_zero(&coeff) {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_insert_with(rc_zero);
        *entry = entry.clone() + coeff;
        if rc_is_zero(entry) {
            self.terms.remove(&key);
        }
    }

    pub fn pure(a: &FreeElement, b: &FreeElement) -> FreeTensorElement {
        let mut out = FreeTensorElement::new();
        for (u, ca) in a.terms() {
            for (v, cb) in b.terms() {
                out.add_term((u.clone(), v.clone()), ca.clone() * cb.clone());
            }
        }
        out
    }

    /// Diagonal comultiplication on the free model.
    pub fn comultiply(e: &FreeElement) -> FreeTensorElement {
        let mut out = FreeTensorElement::new();
        for (w, c) in e.terms() {
            out.add_term((w.clone(), w.clone()), c.clone());
        }
        out
    }

    /// Pushes both legs through the quotient, dropping zero classes.
    pub fn collapse(&self, table: &Arc<ClassTable>) -> Result<TensorElement> {
        let mut out = TensorElement::zero(table);
        for ((u, v), c) in &self.terms {
            let cu = table.class_of(&Word::Letters(u.clone()))?;
            let cv = table.class_of(&Word::Letters(v.clone()))?;
            if let (ClassId::Nonzero(a), ClassId::Nonzero(b)) = (cu, cv) {
                out.add_term((a, b), c.clone());
            }
        }
        Ok(out)
    }
}

/// Membership in the graded span of J (x) L + L (x) J for a polynomial free
/// tensor: both legs collapsed through the quotient must vanish identically.
pub fn coideal_membership(x: &FreeTensorElement, table: &Arc<ClassTable>) -> Result<bool> {
    Ok(x.collapse(table)?.is_zero())
}

/// Result of the degree-n indicator test on an ideal slice.
#[derive(Debug, Clone)]
pub struct IdealSliceReport {
    pub degree: usize,
    /// Dimension of the degree-n slice of the ideal.
    pub slice_dim: usize,
    /// Dimension of its annihilator inside the diagonal functional space.
    pub annihilator_dim: usize,
    /// True when the annihilator is closed under entrywise products, i.e.
    /// admits a basis of indicator vectors of disjoint word sets.
    pub coideal_in_degree: bool,
    /// The disjoint word sets, present when the test succeeds.
    pub indicator_sets: Vec<Vec<Word>>,
    /// Words annihilated by every functional in the annihilator (their
    /// monomials lie in the slice).
    pub killed_words: Vec<Word>,
}

/// The words of length `degree` spanning x g y contexts of the generators,
/// as coefficient rows over the d^degree word space.
fn ideal_slice_rows(generators: &[FreeElement], d: u32, degree: usize) -> Result<Vec<Vec<Rc>>> {
    let ncols = words_at_level(d, degree) as usize;
    let mut rows = Vec::new();
    for g in generators {
        if !g.is_homogeneous() {
            return Err(Error::InhomogeneousGenerator);
        }
        let Some(m) = g.degree() else { continue };
        if m > degree {
            continue;
        }
        let free = degree - m;
        for left_len in 0..=free {
            let right_len = free - left_len;
            for lrank in 0..words_at_level(d, left_len) {
                let left = unrank(lrank, left_len, d);
                for rrank in 0..words_at_level(d, right_len) {
                    let right = unrank(rrank, right_len, d);
                    let mut row = vec![rc_zero(); ncols];
                    for (w, c) in g.terms() {
                        let mut xwy = left.clone();
                        xwy.extend_from_slice(w);
                        xwy.extend_from_slice(&right);
                        let col = crate::word::rank(&xwy, d) as usize;
                        row[col] = row[col].clone() + c.clone();
                    }
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

/// Degree-n slice test: computes J_n = span{x g y}, its annihilator in the
/// diagonal functional space, and decides whether the annihilator is closed
/// under entrywise products. When it is, the annihilator is spanned by
/// indicators of disjoint word sets, which are extracted and returned.
pub fn hopf_ideal_test(
    generators: &[FreeElement],
    d: u32,
    degree: usize,
    max_words: u64,
) -> Result<IdealSliceReport> {
    let ncols_u64 = words_at_level(d, degree);
    if ncols_u64 > max_words {
        return Err(Error::ResourceLimit {
            words: ncols_u64,
            level: degree,
            limit: max_words,
        });
    }
    let ncols = ncols_u64 as usize;

    let rows = ideal_slice_rows(generators, d, degree)?;
    let mut slice = rows.clone();
    let slice_pivots = rref(&mut slice);
    let slice_dim = slice_pivots.len();

    let annihilator = nullspace(&rows, ncols);
    let annihilator_dim = annihilator.len();

    // Closure under entrywise products: every pairwise product must stay in
    // the span.
    let mut ann_rref = annihilator.clone();
    let ann_pivots = rref(&mut ann_rref);
    let mut closed = true;
    'outer: for a in &annihilator {
        for b in &annihilator {
            let product: Vec<Rc> = a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| x.clone() * y.clone())
                .collect();
            if !in_span(&ann_rref, &ann_pivots, &product) {
                closed = false;
                break 'outer;
            }
        }
    }

    // Group coordinates by their fingerprint across the annihilator basis;
    // words with a nonzero fingerprint form the indicator sets, the rest are
    // killed by the slice.
    let mut groups: BTreeMap<Vec<(num::BigRational, num::BigRational)>, Vec<Word>> =
        BTreeMap::new();
    let mut killed = Vec::new();
    for col in 0..ncols {
        let fingerprint: Vec<_> = annihilator.iter().map(|v| rc_order_key(&v[col])).collect();
        let word = Word::Letters(unrank(col as u64, degree, d));
        if fingerprint.iter().all(|(re, im)| {
            use num::Zero;
            re.is_zero() && im.is_zero()
        }) {
            killed.push(word);
        } else {
            groups.entry(fingerprint).or_default().push(word);
        }
    }
    let mut indicator_sets: Vec<Vec<Word>> = groups.into_values().collect();
    indicator_sets.sort();

    let coideal_in_degree = closed && indicator_sets.len() == annihilator_dim;
    Ok(IdealSliceReport {
        degree,
        slice_dim,
        annihilator_dim,
        coideal_in_degree,
        indicator_sets: if coideal_in_degree {
            indicator_sets
        } else {
            Vec::new()
        },
        killed_words: killed,
    })
}

/// The generating polynomials L_u - L_v and L_z of the ideal induced by a
/// presentation.
pub fn presentation_ideal_generators(
    p: &crate::presentation::Presentation,
) -> Result<Vec<FreeElement>> {
    let mut out = Vec::new();
    for (u, v) in p.relations() {
        let rel = FreeElement::monomial(p.d(), u, crate::scalar::rc_one())?
            .add(&FreeElement::monomial(p.d(), v, -crate::scalar::rc_one())?);
        out.push(rel);
    }
    for z in p.zeros() {
        out.push(FreeElement::monomial(p.d(), z, crate::scalar::rc_one())?);
    }
    Ok(out)
}

/// Verifies that comultiplication is well defined on the quotient: collapsing
/// after the free comultiplication agrees with comultiplying the collapse.
pub fn comultiplication_descends(free: &FreeElement, table: &Arc<ClassTable>) -> Result<bool> {
    let via_quotient = comultiply(&free.collapse(table)?);
    let via_free = FreeTensorElement::comultiply(free).collapse(table)?;
    Ok(via_quotient == via_free)
}

/// Residual of the corepresentation identity for V = evaluate(e) (x) id on a
/// one-dimensional auxiliary space: compares V_{1,3} V_{2,3} with the matrix
/// of the comultiplied series on the doubled space, measured on the interior
/// (both input legs at levels <= N - deg e).
pub fn corepresentation_residual(e: &Element, space: &SemigroupSpace) -> Result<f64> {
    let deg = e.degree().unwrap_or(0);
    if 2 * deg > space.level() {
        return Err(Error::LevelOverflow {
            requested: 2 * deg,
            max: space.level(),
        });
    }
    let a = evaluate(e, space)?;
    let dim = space.dim();
    let eye = DMatrix::<Complex64>::identity(dim, dim);
    // Leg 3 is one-dimensional, so V_{1,3} = A (x) I and V_{2,3} = I (x) A.
    let v13 = a.matrix.kronecker(&eye);
    let v23 = eye.kronecker(&a.matrix);
    let lhs = v13 * v23;

    let mut rhs = DMatrix::<Complex64>::zeros(dim * dim, dim * dim);
    for (&(s, t), c) in comultiply(e).terms() {
        let ls = left_regular(space, s)?;
        let lt = left_regular(space, t)?;
        rhs += ls.matrix.kronecker(&lt.matrix) * crate::scalar::rc_to_c64(c);
    }

    let diff = lhs - rhs;
    let interior = space.positions_up_to(space.level() - deg);
    let mut residual = 0.0f64;
    for c1 in interior.clone() {
        for c2 in interior.clone() {
            let col = c1 * dim + c2;
            for row in 0..dim * dim {
                residual = residual.max(diff[(row, col)].norm());
            }
        }
    }
    Ok(residual)
}

/// The corepresentation identity for a single monomial V = L_s (x) id.
pub fn corepresentation_check(
    table: &Arc<ClassTable>,
    s: NzClassId,
    level: usize,
    tol: f64,
) -> Result<bool> {
    let space = SemigroupSpace::new(table, level)?;
    let e = Element::monomial(table, s, crate::scalar::rc_one());
    Ok(corepresentation_residual(&e, &space)? <= tol)
}

/// Max-entry distance between the comultiplied product and the product of
/// comultiplications, exact check packaged as a boolean.
pub fn comultiplication_is_algebra_map(a: &Element, b: &Element) -> Result<bool> {
    let lhs = comultiply(&a.product(b)?);
    let rhs = comultiply(a).product(&comultiply(b))?;
    Ok(lhs == rhs)
}
