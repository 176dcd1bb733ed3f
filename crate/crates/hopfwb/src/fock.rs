//! Truncated Hilbert spaces and matrix realizations: the weighted
//! representation space of the quotient, the full Fock space, the coinvariant
//! subspace with its unitary onto the quotient space, compressions, and
//! operator norms.
//!
//! Truncation discipline: an operator raising the grading by m maps input
//! level t into level t+m, so identities are asserted only on the interior
//! (input levels <= N - m). Every comparison here states its interior
//! explicitly.

use std::sync::Arc;

use nalgebra::DMatrix;
use num::complex::Complex64;

use crate::algebra::{same_table, Element};
use crate::congruence::{ClassId, ClassTable, NzClassId};
use crate::error::{Error, Result};
use crate::scalar::rc_to_c64;
use crate::word::{rank, words_at_level, Word};

/// Truncated carrier of the weighted representation: orthonormal basis
/// y_s indexed by nonzero classes with level <= N, ordered by (level, index).
/// The unnormalized vectors x_s = y_s / sqrt(|[s]|) satisfy
/// (x_s, x_t) = delta_{s,t} / |[s]|.
#[derive(Debug, Clone)]
pub struct SemigroupSpace {
    table: Arc<ClassTable>,
    level: usize,
    index: Vec<NzClassId>,
    offsets: Vec<usize>,
}

impl SemigroupSpace {
    pub fn new(table: &Arc<ClassTable>, level: usize) -> Result<Self> {
        if level > table.max_level() {
            return Err(Error::LevelOverflow {
                requested: level,
                max: table.max_level(),
            });
        }
        let mut index = Vec::new();
        let mut offsets = Vec::with_capacity(level + 2);
        offsets.push(0);
        for n in 0..=level {
            index.extend(table.classes_at(n));
            offsets.push(index.len());
        }
        Ok(SemigroupSpace {
            table: table.clone(),
            level,
            index,
            offsets,
        })
    }

    pub fn table(&self) -> &Arc<ClassTable> {
        &self.table
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn basis(&self) -> &[NzClassId] {
        &self.index
    }

    /// Position of a class in the orthonormal basis.
    pub fn position(&self, id: NzClassId) -> Result<usize> {
        let lvl = id.level as usize;
        if lvl > self.level || id.index as usize >= self.table.class_count_at(lvl) {
            return Err(Error::UnknownClass(id.to_string()));
        }
        Ok(self.offsets[lvl] + id.index as usize)
    }

    /// Positions of all basis vectors with level <= `max`: the interior used
    /// for truncated identities.
    pub fn positions_up_to(&self, max: usize) -> std::ops::Range<usize> {
        0..self.offsets[max.min(self.level) + 1]
    }
}

/// Truncated full Fock space: orthonormal basis indexed by all words of
/// length <= N over d generators, ordered by (length, lex rank).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    d: u32,
    level: usize,
    offsets: Vec<usize>,
}

impl FockSpace {
    pub fn new(d: u32, level: usize) -> Self {
        let mut offsets = Vec::with_capacity(level + 2);
        offsets.push(0);
        let mut total = 0usize;
        for n in 0..=level {
            total += words_at_level(d, n) as usize;
            offsets.push(total);
        }
        FockSpace { d, level, offsets }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().expect("offsets nonempty")
    }

    pub fn position(&self, letters: &[u32]) -> Result<usize> {
        let n = letters.len();
        if n > self.level {
            return Err(Error::LevelOverflow {
                requested: n,
                max: self.level,
            });
        }
        Ok(self.offsets[n] + rank(letters, self.d) as usize)
    }

    pub fn word_at(&self, position: usize) -> Vec<u32> {
        let n = self.offsets.partition_point(|&o| o <= position) - 1;
        crate::word::unrank((position - self.offsets[n]) as u64, n, self.d)
    }

    pub fn positions_up_to(&self, max: usize) -> std::ops::Range<usize> {
        0..self.offsets[max.min(self.level) + 1]
    }
}

/// A dense matrix acting on one of the truncated spaces, tagged with the
/// number of levels it raises when it represents a graded monomial.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub matrix: DMatrix<Complex64>,
    pub degree_shift: Option<usize>,
}

impl TruncatedOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Self {
        TruncatedOperator {
            matrix,
            degree_shift: None,
        }
    }

    pub fn with_shift(matrix: DMatrix<Complex64>, shift: usize) -> Self {
        TruncatedOperator {
            matrix,
            degree_shift: Some(shift),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn identity(dim: usize) -> Self {
        TruncatedOperator::with_shift(DMatrix::identity(dim, dim), 0)
    }

    pub fn compose(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(TruncatedOperator::new(&self.matrix * &other.matrix))
    }

    pub fn sub(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(TruncatedOperator::new(&self.matrix - &other.matrix))
    }

    pub fn adjoint(&self) -> TruncatedOperator {
        TruncatedOperator::new(self.matrix.adjoint())
    }

    /// Columns restricted to `interior`, rows kept: the honest comparison
    /// region for a truncated graded operator.
    pub fn restrict_columns(&self, interior: std::ops::Range<usize>) -> TruncatedOperator {
        TruncatedOperator::new(
            self.matrix
                .columns(interior.start, interior.len())
                .into_owned(),
        )
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Largest singular value via dense SVD.
pub fn operator_norm(op: &TruncatedOperator) -> Result<f64> {
    operator_norm_of(&op.matrix)
}

pub fn operator_norm_of(matrix: &DMatrix<Complex64>) -> Result<f64> {
    if matrix.is_empty() {
        return Ok(0.0);
    }
    let svd = nalgebra::SVD::try_new(matrix.clone(), false, false, f64::EPSILON, 1000)
        .ok_or(Error::SvdNonConvergence)?;
    Ok(svd.singular_values.iter().copied().fold(0.0, f64::max))
}

/// Matrix of the weighted left shift by a class: y_t maps to
/// sqrt(|[t]|/|[st]|) y_{st} when the product stays within the truncation and
/// is nonzero, and to 0 otherwise.
pub fn left_regular(space: &SemigroupSpace, s: NzClassId) -> Result<TruncatedOperator> {
    let table = space.table();
    let n = space.dim();
    let mut m = DMatrix::zeros(n, n);
    let shift = s.level as usize;
    let _ = table.class_size(s)?; // validates s against the table
    for (col, &t) in space.basis().iter().enumerate() {
        if shift + t.level as usize > space.level() {
            continue;
        }
        match table.multiply(ClassId::Nonzero(s), ClassId::Nonzero(t))? {
            ClassId::Zero => {}
            ClassId::Nonzero(st) => {
                let weight = (table.class_size(t)? as f64 / table.class_size(st)? as f64).sqrt();
                m[(space.position(st)?, col)] = Complex64::new(weight, 0.0);
            }
        }
    }
    Ok(TruncatedOperator::with_shift(m, shift))
}

/// Matrix of the unweighted left shift on the full Fock space:
/// xi_v maps to xi_{wv} while the product stays within the truncation.
pub fn full_shift(space: &FockSpace, word: &Word) -> Result<TruncatedOperator> {
    let letters = word.letters()?;
    word.validate_letters(space.d())?;
    let shift = letters.len();
    if shift > space.level() {
        return Err(Error::LevelOverflow {
            requested: shift,
            max: space.level(),
        });
    }
    let n = space.dim();
    let mut m = DMatrix::zeros(n, n);
    for col in space.positions_up_to(space.level() - shift) {
        let v = space.word_at(col);
        let mut wv = letters.to_vec();
        wv.extend_from_slice(&v);
        m[(space.position(&wv)?, col)] = Complex64::new(1.0, 0.0);
    }
    Ok(TruncatedOperator::with_shift(m, shift))
}

/// Orthogonal basis of the truncated coinvariant subspace: for each nonzero
/// class s, the 0/1 vector eta_s summing the Fock basis vectors of the
/// members of [s]. Norms satisfy ||eta_s||^2 = |[s]| exactly.
#[derive(Debug, Clone)]
pub struct CoinvariantBasis {
    table: Arc<ClassTable>,
    fock: FockSpace,
    space: SemigroupSpace,
}

impl CoinvariantBasis {
    pub fn new(table: &Arc<ClassTable>, level: usize) -> Result<Self> {
        Ok(CoinvariantBasis {
            table: table.clone(),
            fock: FockSpace::new(table.d(), level),
            space: SemigroupSpace::new(table, level)?,
        })
    }

    pub fn fock(&self) -> &FockSpace {
        &self.fock
    }

    pub fn quotient_space(&self) -> &SemigroupSpace {
        &self.space
    }

    pub fn table(&self) -> &Arc<ClassTable> {
        &self.table
    }

    /// Fock coordinates of eta_s (0/1 entries over the member words).
    pub fn eta_positions(&self, s: NzClassId) -> Result<Vec<usize>> {
        let level = s.level as usize;
        self.table
            .member_ranks(s)?
            .iter()
            .map(|&r| {
                let letters = crate::word::unrank(r, level, self.table.d());
                self.fock.position(&letters)
            })
            .collect()
    }

    /// Matrix whose columns are the orthonormalized vectors
    /// eta_s / sqrt(|[s]|), aligned with the quotient-space basis order.
    pub fn orthonormal_columns(&self) -> Result<DMatrix<Complex64>> {
        let mut m = DMatrix::zeros(self.fock.dim(), self.space.dim());
        for (col, &s) in self.space.basis().iter().enumerate() {
            let size = self.table.class_size(s)? as f64;
            let value = Complex64::new(1.0 / size.sqrt(), 0.0);
            for row in self.eta_positions(s)? {
                m[(row, col)] = value;
            }
        }
        Ok(m)
    }
}

/// Compression of a full-Fock operator to the coinvariant subspace, expressed
/// in the orthonormalized eta-basis.
pub fn compress(op: &TruncatedOperator, basis: &CoinvariantBasis) -> Result<TruncatedOperator> {
    let b = basis.orthonormal_columns()?;
    if op.dim() != b.nrows() {
        return Err(Error::DimensionMismatch {
            left: op.dim(),
            right: b.nrows(),
        });
    }
    let compressed = b.adjoint() * &op.matrix * &b;
    Ok(TruncatedOperator {
        matrix: compressed,
        degree_shift: op.degree_shift,
    })
}

/// The unitary intertwining the coinvariant subspace with the quotient space:
/// eta_s scaled by |[s]| lands on x_s, so in orthonormal coordinates the s-th
/// eta column maps to the s-th y vector.
pub fn unitary_u(basis: &CoinvariantBasis, space: &SemigroupSpace) -> Result<TruncatedOperator> {
    if !same_table(basis.table(), space.table()) {
        return Err(Error::TableMismatch);
    }
    if basis.quotient_space().dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            left: basis.quotient_space().dim(),
            right: space.dim(),
        });
    }
    let n = space.dim();
    let mut m = DMatrix::zeros(n, n);
    for (col, &s) in basis.quotient_space().basis().iter().enumerate() {
        m[(space.position(s)?, col)] = Complex64::new(1.0, 0.0);
    }
    Ok(TruncatedOperator::with_shift(m, 0))
}

/// Matrix of an exact series: sum of coefficient-weighted shifts.
pub fn evaluate(element: &Element, space: &SemigroupSpace) -> Result<TruncatedOperator> {
    if !same_table(element.table(), space.table()) {
        return Err(Error::TableMismatch);
    }
    if let Some(deg) = element.degree() {
        if deg > space.level() {
            return Err(Error::LevelOverflow {
                requested: deg,
                max: space.level(),
            });
        }
    }
    let n = space.dim();
    let mut m = DMatrix::zeros(n, n);
    for (&s, coeff) in element.terms() {
        let shift = left_regular(space, s)?;
        m += shift.matrix * rc_to_c64(coeff);
    }
    Ok(TruncatedOperator {
        matrix: m,
        degree_shift: element.degree(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Presentation;
    use crate::scalar::rc_from_ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        Word::Letters(s.chars().map(|c| c.to_digit(10).unwrap()).collect())
    }

    fn nz(table: &ClassTable, s: &str) -> NzClassId {
        match table.class_of(&w(s)).unwrap() {
            ClassId::Nonzero(id) => id,
            ClassId::Zero => panic!("{s} is zero"),
        }
    }

    #[test]
    fn space_dimensions() {
        let t = ClassTable::close(&Presentation::commutator(2), 6).unwrap();
        let space = SemigroupSpace::new(&t, 6).unwrap();
        // Commutative classes at level n over two letters: n + 1 of them.
        assert_eq!(space.dim(), (0..=6).map(|n| n + 1).sum::<usize>());
        let fock = FockSpace::new(2, 6);
        assert_eq!(fock.dim(), 127);
        for pos in 0..fock.dim() {
            assert_eq!(fock.position(&fock.word_at(pos)).unwrap(), pos);
        }
    }

    #[test]
    fn left_regular_weight_example() {
        let t = ClassTable::close(&Presentation::commutator(2), 4).unwrap();
        let space = SemigroupSpace::new(&t, 4).unwrap();
        let op = left_regular(&space, nz(&t, "1")).unwrap();
        let col = space.position(nz(&t, "12")).unwrap();
        let row = space.position(nz(&t, "112")).unwrap();
        let got = op.matrix[(row, col)].re;
        assert!((got - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn left_regular_is_isometric_on_free_interior() {
        let t = ClassTable::close(&Presentation::trivial(2), 5).unwrap();
        let space = SemigroupSpace::new(&t, 5).unwrap();
        for s in t.classes_up_to(2) {
            let op = left_regular(&space, s).unwrap();
            let interior = space.positions_up_to(5 - s.level as usize);
            let restricted = op.restrict_columns(interior);
            let gram = restricted.matrix.adjoint() * &restricted.matrix;
            let eye = DMatrix::<Complex64>::identity(gram.nrows(), gram.ncols());
            assert!((gram - eye).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-14);
        }
    }

    #[test]
    fn left_regular_kills_zero_products() {
        let p = Presentation::with_zeros(2, vec![w("12")]).unwrap();
        let t = ClassTable::close(&p, 3).unwrap();
        let space = SemigroupSpace::new(&t, 3).unwrap();
        let op = left_regular(&space, nz(&t, "1")).unwrap();
        let col = space.position(nz(&t, "2")).unwrap();
        assert!(op.matrix.column(col).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn weight_contraction_inequality() {
        // ||L_s y_t|| <= ||y_t|| with equality iff |[st]| = |[t]|.
        for p in [
            Presentation::commutator(2),
            Presentation::with_zeros(2, vec![w("11")]).unwrap(),
            Presentation::new(2, vec![(w("11"), w("22"))], vec![]).unwrap(),
        ] {
            let t = ClassTable::close(&p, 5).unwrap();
            let space = SemigroupSpace::new(&t, 5).unwrap();
            for s in t.classes_up_to(2) {
                let op = left_regular(&space, s).unwrap();
                for &tt in space.basis() {
                    if s.level + tt.level > 5 {
                        continue;
                    }
                    let col = space.position(tt).unwrap();
                    let norm = op
                        .matrix
                        .column(col)
                        .iter()
                        .map(|z| z.norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    assert!(norm <= 1.0 + 1e-12);
                    if let ClassId::Nonzero(st) = t
                        .multiply(ClassId::Nonzero(s), ClassId::Nonzero(tt))
                        .unwrap()
                    {
                        let equal_sizes = t.class_size(st).unwrap() == t.class_size(tt).unwrap();
                        assert_eq!((norm - 1.0).abs() < 1e-12, equal_sizes);
                    }
                }
            }
        }
    }

    #[test]
    fn full_shift_examples() {
        let fock = FockSpace::new(2, 3);
        let op = full_shift(&fock, &w("1")).unwrap();
        let from = fock.position(&[]).unwrap();
        let to = fock.position(&[1]).unwrap();
        assert_eq!(op.matrix[(to, from)], Complex64::new(1.0, 0.0));
        assert!((operator_norm(&op).unwrap() - 1.0).abs() < 1e-12);

        // Composition law on the interior.
        let u = full_shift(&fock, &w("1")).unwrap();
        let v = full_shift(&fock, &w("2")).unwrap();
        let uv = full_shift(&fock, &w("12")).unwrap();
        let composed = u.compose(&v).unwrap();
        let interior = fock.positions_up_to(3 - 2);
        let diff = composed
            .restrict_columns(interior.clone())
            .sub(&uv.restrict_columns(interior))
            .unwrap();
        assert_eq!(diff.max_abs_entry(), 0.0);
    }

    #[test]
    fn eta_vectors_are_exactly_orthogonal_with_expected_norms() {
        let p = Presentation::new(2, vec![(w("12"), w("21"))], vec![w("111")]).unwrap();
        let t = ClassTable::close(&p, 4).unwrap();
        let basis = CoinvariantBasis::new(&t, 4).unwrap();
        // Integer inner products: member position sets must be disjoint.
        let mut seen = std::collections::BTreeSet::new();
        for &s in basis.quotient_space().basis() {
            let positions = basis.eta_positions(s).unwrap();
            assert_eq!(positions.len() as u64, t.class_size(s).unwrap());
            for p in positions {
                assert!(seen.insert(p), "eta vectors overlap");
            }
        }
        let b = basis.orthonormal_columns().unwrap();
        let gram = b.adjoint() * &b;
        let eye = DMatrix::<Complex64>::identity(gram.nrows(), gram.ncols());
        assert!((gram - eye).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-14);
    }

    #[test]
    fn compression_matches_weighted_shift_through_the_unitary() {
        for p in [
            Presentation::trivial(2),
            Presentation::commutator(2),
            Presentation::with_zeros(2, vec![w("12")]).unwrap(),
        ] {
            let t = ClassTable::close(&p, 5).unwrap();
            let basis = CoinvariantBasis::new(&t, 5).unwrap();
            let space = SemigroupSpace::new(&t, 5).unwrap();
            let u = unitary_u(&basis, &space).unwrap();

            // Unitarity is exact up to rounding.
            let gram = u.matrix.adjoint() * &u.matrix;
            let eye = DMatrix::<Complex64>::identity(gram.nrows(), gram.ncols());
            assert!((gram - eye).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);

            let fock = basis.fock().clone();
            for len in 1..=2usize {
                for r in 0..words_at_level(2, len) {
                    let word = Word::Letters(crate::word::unrank(r, len, 2));
                    let shifted = full_shift(&fock, &word).unwrap();
                    let compressed = compress(&shifted, &basis).unwrap();
                    let conjugated = u
                        .compose(&compressed)
                        .unwrap()
                        .compose(&u.adjoint())
                        .unwrap();
                    let target = match t.class_of(&word).unwrap() {
                        ClassId::Zero => {
                            TruncatedOperator::new(DMatrix::zeros(space.dim(), space.dim()))
                        }
                        ClassId::Nonzero(s) => left_regular(&space, s).unwrap(),
                    };
                    let interior = space.positions_up_to(5 - len);
                    let diff = conjugated
                        .restrict_columns(interior.clone())
                        .sub(&target.restrict_columns(interior))
                        .unwrap();
                    assert!(
                        diff.max_abs_entry() < 1e-10,
                        "unitary equivalence failed for {word} on {p:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn compression_collapses_when_everything_is_zero() {
        let p = Presentation::with_zeros(2, vec![w("1"), w("2")]).unwrap();
        let t = ClassTable::close(&p, 3).unwrap();
        let basis = CoinvariantBasis::new(&t, 3).unwrap();
        assert_eq!(basis.quotient_space().dim(), 1);
        let fock = basis.fock().clone();
        let compressed = compress(&full_shift(&fock, &w("1")).unwrap(), &basis).unwrap();
        assert_eq!(compressed.dim(), 1);
        assert_eq!(compressed.max_abs_entry(), 0.0);
    }

    #[test]
    fn operator_norm_basics() {
        let t = ClassTable::close(&Presentation::commutator(2), 4).unwrap();
        let space = SemigroupSpace::new(&t, 4).unwrap();
        let eye = TruncatedOperator::identity(space.dim());
        assert!((operator_norm(&eye).unwrap() - 1.0).abs() < 1e-12);

        let op = left_regular(&space, nz(&t, "12")).unwrap();
        let n1 = operator_norm(&op).unwrap();
        assert!(n1 <= 1.0 + 1e-12);
        let doubled = TruncatedOperator::new(&op.matrix * Complex64::new(2.0, 0.0));
        let n2 = operator_norm(&doubled).unwrap();
        assert!((n2 - 2.0 * n1).abs() < 1e-10);
    }

    #[test]
    fn contractivity_across_presentations() {
        for p in [
            Presentation::trivial(2),
            Presentation::commutator(2),
            Presentation::commutator(3),
            Presentation::with_zeros(2, vec![w("12")]).unwrap(),
        ] {
            let t = ClassTable::close(&p, 6).unwrap();
            let space = SemigroupSpace::new(&t, 6).unwrap();
            for s in t.classes_up_to(3) {
                let op = left_regular(&space, s).unwrap();
                assert!(operator_norm(&op).unwrap() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn evaluate_is_multiplicative_on_the_interior() {
        let t = ClassTable::close(&Presentation::commutator(2), 6).unwrap();
        let space = SemigroupSpace::new(&t, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let classes = t.classes_up_to(2);
        for _ in 0..8 {
            let mut a = Element::zero(&t);
            let mut b = Element::zero(&t);
            for _ in 0..3 {
                a.add_term(
                    classes[rng.gen_range(0..classes.len())],
                    rc_from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=5) as i64),
                );
                b.add_term(
                    classes[rng.gen_range(0..classes.len())],
                    rc_from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=5) as i64),
                );
            }
            let (da, db) = (a.degree().unwrap_or(0), b.degree().unwrap_or(0));
            let product = evaluate(&a.product(&b).unwrap(), &space).unwrap();
            let composed = evaluate(&a, &space)
                .unwrap()
                .compose(&evaluate(&b, &space).unwrap())
                .unwrap();
            let interior = space.positions_up_to(6 - da - db);
            let diff = product
                .restrict_columns(interior.clone())
                .sub(&composed.restrict_columns(interior))
                .unwrap();
            assert!(diff.max_abs_entry() < 1e-12);
        }
    }

    #[test]
    fn fourier_coefficients_match_matrix_inner_products() {
        let t = ClassTable::close(&Presentation::commutator(2), 4).unwrap();
        let space = SemigroupSpace::new(&t, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let classes = t.classes_up_to(3);
        for _ in 0..6 {
            let mut e = Element::zero(&t);
            for _ in 0..5 {
                e.add_term(
                    classes[rng.gen_range(0..classes.len())],
                    rc_from_ratio(rng.gen_range(-7..=7), rng.gen_range(1..=7) as i64),
                );
            }
            let m = evaluate(&e, &space).unwrap();
            let vacuum = space.position(t.identity_class()).unwrap();
            for &s in &classes {
                // a_s = |[s]| (A x_e, x_s) = sqrt(|[s]|) * M[s, e].
                let size = t.class_size(s).unwrap() as f64;
                let matrix_path = m.matrix[(space.position(s).unwrap(), vacuum)] * size.sqrt();
                let exact = rc_to_c64(&e.fourier(s));
                assert!((matrix_path - exact).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn evaluate_identity_and_overflow() {
        let t = ClassTable::close(&Presentation::commutator(2), 3).unwrap();
        let space = SemigroupSpace::new(&t, 3).unwrap();
        let eye = evaluate(&Element::identity(&t), &space).unwrap();
        let target = DMatrix::<Complex64>::identity(space.dim(), space.dim());
        assert_eq!(eye.matrix, target);

        let small = SemigroupSpace::new(&t, 1).unwrap();
        let deep = Element::from_word(&t, &w("12")).unwrap();
        assert!(matches!(
            evaluate(&deep, &small),
            Err(Error::LevelOverflow { .. })
        ));
    }

    #[test]
    fn norms_are_monotone_in_truncation_level() {
        let t = ClassTable::close(&Presentation::commutator(2), 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let classes = t.classes_up_to(2);
        for _ in 0..5 {
            let mut e = Element::zero(&t);
            for _ in 0..4 {
                e.add_term(
                    classes[rng.gen_range(0..classes.len())],
                    rc_from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=5) as i64),
                );
            }
            let mut last = 0.0f64;
            for level in 2..=6usize {
                let space = SemigroupSpace::new(&t, level).unwrap();
                let norm = operator_norm(&evaluate(&e, &space).unwrap()).unwrap();
                assert!(norm >= last - 1e-10, "norms must grow with the truncation");
                last = norm;
            }
        }
    }
}
