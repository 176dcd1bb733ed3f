//! The convolution side: coefficient functionals, the convolution product
//! induced by the comultiplication, evaluation characters, point-evaluation
//! functionals from kernel vectors, and semicharacter verification.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;
use num::complex::Complex64;
use num::{BigRational, Zero};

use crate::algebra::{same_table, Element};
use crate::congruence::{ClassId, ClassTable, NzClassId};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, SemigroupSpace, TruncatedOperator};
use crate::scalar::{rc_is_zero, rc_one, rc_real, rc_zero, Rc};
use crate::word::{unrank, words_at_level, Word};

/// A weak*-continuous functional on the polynomial model. Exact functionals
/// are finite combinations of the coefficient functionals phi_s, which pair
/// with a series by phi_s(L_u) = delta_{s,u} / |[s]|. Rank-one functionals
/// carry a pair of truncated vectors and evaluate against matrices.
#[derive(Debug, Clone)]
pub enum Functional {
    Exact {
        table: Arc<ClassTable>,
        terms: BTreeMap<NzClassId, Rc>,
    },
    RankOne {
        left: DVector<Complex64>,
        right: DVector<Complex64>,
    },
}

impl Functional {
    pub fn zero(table: &Arc<ClassTable>) -> Self {
        Functional::Exact {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The coefficient functional phi_s.
    pub fn coefficient(table: &Arc<ClassTable>, s: NzClassId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(s, rc_one());
        Functional::Exact {
            table: table.clone(),
            terms,
        }
    }

    /// The normalized idempotent psi_s = |[s]| phi_s.
    pub fn idempotent(table: &Arc<ClassTable>, s: NzClassId) -> Result<Self> {
        let size = table.class_size(s)?;
        Ok(Functional::coefficient(table, s)
            .scale(&rc_real(BigRational::from_integer(size.into()))))
    }

    /// Rank-one functional: A maps to (A left, right) in orthonormal
    /// coordinates of whichever truncated space A acts on.
    pub fn rank_one(left: DVector<Complex64>, right: DVector<Complex64>) -> Self {
        Functional::RankOne { left, right }
    }

    pub fn scale(&self, factor: &Rc) -> Functional {
        match self {
            Functional::Exact { table, terms } => {
                let mut out = BTreeMap::new();
                for (id, c) in terms {
                    let v = c.clone() * factor.clone();
                    if !rc_is_zero(&v) {
                        out.insert(*id, v);
                    }
                }
                Functional::Exact {
                    table: table.clone(),
                    terms: out,
                }
            }
            Functional::RankOne { left, right } => Functional::RankOne {
                left: left * crate::scalar::rc_to_c64(factor),
                right: right.clone(),
            },
        }
    }

    pub fn add(&self, other: &Functional) -> Result<Functional> {
        match (self, other) {
            (
                Functional::Exact {
                    table: ta,
                    terms: a,
                },
                Functional::Exact {
                    table: tb,
                    terms: b,
                },
            ) => {
                if !same_table(ta, tb) {
                    return Err(Error::TableMismatch);
                }
                let mut out = a.clone();
                for (id, c) in b {
                    let entry = out.entry(*id).or_insert_with(rc_zero);
                    *entry = entry.clone() + c.clone();
                    if rc_is_zero(entry) {
                        out.remove(id);
                    }
                }
                Ok(Functional::Exact {
                    table: ta.clone(),
                    terms: out,
                })
            }
            _ => Err(Error::RankOneFunctional),
        }
    }

    pub fn exact_terms(&self) -> Result<&BTreeMap<NzClassId, Rc>> {
        match self {
            Functional::Exact { terms, .. } => Ok(terms),
            Functional::RankOne { .. } => Err(Error::RankOneFunctional),
        }
    }

    /// Exact pairing with a series: sum of b_s a_s / |[s]|.
    pub fn apply(&self, e: &Element) -> Result<Rc> {
        match self {
            Functional::Exact { table, terms } => {
                if !same_table(table, e.table()) {
                    return Err(Error::TableMismatch);
                }
                let mut acc = rc_zero();
                for (id, b) in terms {
                    let a = e.fourier(*id);
                    if rc_is_zero(&a) {
                        continue;
                    }
                    let size = BigRational::from_integer(table.class_size(*id)?.into());
                    acc += b.clone() * a / rc_real(size);
                }
                Ok(acc)
            }
            Functional::RankOne { .. } => Err(Error::RankOneFunctional),
        }
    }

    /// Numeric pairing with a truncated matrix.
    pub fn apply_matrix(&self, op: &TruncatedOperator) -> Result<Complex64> {
        match self {
            Functional::RankOne { left, right } => {
                if left.len() != op.dim() || right.len() != op.dim() {
                    return Err(Error::DimensionMismatch {
                        left: left.len(),
                        right: op.dim(),
                    });
                }
                Ok((right.adjoint() * &op.matrix * left)[(0, 0)])
            }
            Functional::Exact { .. } => Err(Error::RankOneFunctional),
        }
    }
}

/// Convolution of two exact functionals, computed the way the product is
/// defined: evaluate the tensor against the comultiplication of every
/// monomial up to the table truncation and re-express in the phi basis.
pub fn convolve(f: &Functional, g: &Functional) -> Result<Functional> {
    let table = match f {
        Functional::Exact { table, .. } => table,
        Functional::RankOne { .. } => return Err(Error::RankOneFunctional),
    };
    match g {
        Functional::Exact { table: tg, .. } => {
            if !same_table(table, tg) {
                return Err(Error::TableMismatch);
            }
        }
        Functional::RankOne { .. } => return Err(Error::RankOneFunctional),
    }
    let mut terms = BTreeMap::new();
    for u in table.classes_up_to(table.max_level()) {
        // (f * g)(L_u) = (f x g)(L_u x L_u) = f(L_u) g(L_u); the phi_u
        // coefficient is |[u]| times that value.
        let monomial = Element::monomial(table, u, rc_one());
        let value = f.apply(&monomial)? * g.apply(&monomial)?;
        if rc_is_zero(&value) {
            continue;
        }
        let size = BigRational::from_integer(table.class_size(u)?.into());
        terms.insert(u, value * rc_real(size));
    }
    Ok(Functional::Exact {
        table: table.clone(),
        terms,
    })
}

/// The evaluation character at a nonzero class: rho_s(f) = f(L_s). These are
/// the multiplicative functionals of the convolution algebra.
#[derive(Debug, Clone, Copy)]
pub struct EvaluationCharacter {
    pub class: NzClassId,
}

impl EvaluationCharacter {
    pub fn new(class: NzClassId) -> Self {
        EvaluationCharacter { class }
    }

    pub fn apply(&self, f: &Functional) -> Result<Rc> {
        match f {
            Functional::Exact { table, .. } => {
                let monomial = Element::monomial(table, self.class, rc_one());
                f.apply(&monomial)
            }
            Functional::RankOne { .. } => Err(Error::RankOneFunctional),
        }
    }
}

/// A point of the open unit ball in C^d.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    coords: Vec<Complex64>,
}

impl BallPoint {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        let norm = coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm >= 1.0 {
            return Err(Error::PointOutsideBall(norm));
        }
        Ok(BallPoint { coords })
    }

    pub fn origin(d: u32) -> Self {
        BallPoint {
            coords: vec![Complex64::new(0.0, 0.0); d as usize],
        }
    }

    pub fn d(&self) -> u32 {
        self.coords.len() as u32
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Componentwise product, the semigroup operation of the ball.
    pub fn pointwise_product(&self, other: &BallPoint) -> Result<BallPoint> {
        if self.coords.len() != other.coords.len() {
            return Err(Error::DimensionMismatch {
                left: self.coords.len(),
                right: other.coords.len(),
            });
        }
        BallPoint::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a * b)
                .collect(),
        )
    }

    /// The product of coordinates along a word.
    pub fn word_value(&self, letters: &[u32]) -> Complex64 {
        letters
            .iter()
            .map(|&l| self.coords[(l - 1) as usize])
            .fold(Complex64::new(1.0, 0.0), |acc, z| acc * z)
    }
}

/// The truncated state vector at a ball point together with the unnormalized
/// kernel vector: the state carries the (1 - ||lambda||^2)^{1/2} prefactor,
/// the kernel is the same sum without it.
#[derive(Debug, Clone)]
pub struct KernelVectors {
    pub state: DVector<Complex64>,
    pub kernel: DVector<Complex64>,
}

pub fn kernel_vectors(lambda: &BallPoint, space: &FockSpace) -> Result<KernelVectors> {
    if lambda.d() != space.d() {
        return Err(Error::DimensionMismatch {
            left: lambda.d() as usize,
            right: space.d() as usize,
        });
    }
    let dim = space.dim();
    let mut kernel = DVector::zeros(dim);
    for pos in 0..dim {
        let word = space.word_at(pos);
        kernel[pos] = lambda.word_value(&word).conj();
    }
    let prefactor = (1.0 - lambda.norm().powi(2)).sqrt();
    let state = &kernel * Complex64::new(prefactor, 0.0);
    Ok(KernelVectors { state, kernel })
}

/// Truncated value of the point-evaluation functional on a monomial,
/// (L_u state, state), together with a geometric tail bound on the distance
/// to the untruncated value u(lambda).
pub fn point_functional_value(
    lambda: &BallPoint,
    word: &Word,
    space: &FockSpace,
) -> Result<(Complex64, f64)> {
    let letters = word.letters()?;
    word.validate_letters(space.d())?;
    let m = letters.len();
    if m > space.level() {
        return Err(Error::LevelOverflow {
            requested: m,
            max: space.level(),
        });
    }
    let vectors = kernel_vectors(lambda, space)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for pos in space.positions_up_to(space.level() - m) {
        let w = space.word_at(pos);
        let mut uw = letters.to_vec();
        uw.extend_from_slice(&w);
        acc += vectors.state[pos] * vectors.state[space.position(&uw)?].conj();
    }
    Ok((acc, point_tail_bound(lambda.norm(), space.level(), m)))
}

/// Geometric tail bound ||lambda||^{2(N-m)} / (1 - ||lambda||^2) for the
/// truncation error of a point functional on a degree-m monomial.
pub fn point_tail_bound(norm: f64, level: usize, degree: usize) -> f64 {
    if norm == 0.0 {
        return 0.0;
    }
    norm.powi(2 * (level - degree) as i32) / (1.0 - norm * norm)
}

#[derive(Debug, Clone)]
pub struct ConvolutionResidualReport {
    /// max over monomials |u| <= N-2 of the defect of
    /// phi_lambda * phi_mu = phi_{lambda mu} at truncation N.
    pub residual: f64,
    /// A priori geometric bound dominating the residual.
    pub bound: f64,
    pub monomials_checked: usize,
}

/// Compares the convolution of two point functionals with the point
/// functional of the componentwise product, over all monomials of length
/// <= N - 2, using truncated vectors throughout.
pub fn character_convolution_check(
    lambda: &BallPoint,
    mu: &BallPoint,
    space: &FockSpace,
) -> Result<ConvolutionResidualReport> {
    let product = lambda.pointwise_product(mu)?;
    let n = space.level();
    if n < 2 {
        return Err(Error::LevelOverflow {
            requested: 2,
            max: n,
        });
    }
    let d = space.d();

    let vec_l = kernel_vectors(lambda, space)?;
    let vec_m = kernel_vectors(mu, space)?;
    let vec_p = kernel_vectors(&product, space)?;

    let value = |vectors: &KernelVectors, letters: &[u32]| -> Complex64 {
        let m = letters.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for pos in space.positions_up_to(n - m) {
            let w = space.word_at(pos);
            let mut uw = letters.to_vec();
            uw.extend_from_slice(&w);
            acc += vectors.state[pos]
                * vectors.state[space.position(&uw).expect("within truncation")].conj();
        }
        acc
    };

    let mut residual = 0.0f64;
    let mut monomials = 0usize;
    for m in 0..=(n - 2) {
        for r in 0..words_at_level(d, m) {
            let letters = unrank(r, m, d);
            let lhs = value(&vec_l, &letters) * value(&vec_m, &letters);
            let rhs = value(&vec_p, &letters);
            residual = residual.max((lhs - rhs).norm());
            monomials += 1;
        }
    }

    // Tail bound: with a = r_l^{2k}, b = r_m^{2k}, c = r_p^{2k}, k = N-m+1,
    // the defect at a degree-m monomial is |u(prod)| (a + b + c + ab), and
    // |u(prod)| <= (max_i |lambda_i| max_i |mu_i|)^m.
    let sup_l = lambda.coords().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let sup_m = mu.coords().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (r_l, r_m, r_p) = (lambda.norm(), mu.norm(), product.norm());
    let mut bound = 0.0f64;
    for m in 0..=(n - 2) {
        let k = 2 * (n - m + 1) as i32;
        let tail = r_l.powi(k) + r_m.powi(k) + r_p.powi(k) + r_l.powi(k) * r_m.powi(k);
        bound = bound.max((sup_l * sup_m).powi(m as i32) * tail);
    }

    Ok(ConvolutionResidualReport {
        residual,
        bound,
        monomials_checked: monomials,
    })
}

#[derive(Debug, Clone)]
pub struct SemicharacterViolation {
    pub left: NzClassId,
    pub right: NzClassId,
    pub defect: f64,
}

#[derive(Debug, Clone)]
pub struct SemicharacterReport {
    pub multiplicative: bool,
    pub bounded: bool,
    pub violations: Vec<SemicharacterViolation>,
}

impl SemicharacterReport {
    pub fn ok(&self) -> bool {
        self.multiplicative && self.bounded
    }
}

/// Checks a candidate semicharacter: values on all nonzero classes up to the
/// table truncation, multiplicative wherever products stay nonzero and within
/// levels, vanishing products wherever the class product is zero, and bounded
/// by one in modulus.
pub fn semicharacter_check(
    gamma: &BTreeMap<NzClassId, Complex64>,
    table: &Arc<ClassTable>,
    tol: f64,
) -> Result<SemicharacterReport> {
    let classes = table.classes_up_to(table.max_level());
    for &id in &classes {
        if !gamma.contains_key(&id) {
            return Err(Error::MissingCharacterValue(id.to_string()));
        }
    }
    let mut bounded = true;
    for value in gamma.values() {
        if value.norm() > 1.0 + tol {
            bounded = false;
        }
    }
    let mut violations = Vec::new();
    for &s in &classes {
        for &t in &classes {
            if s.level as usize + t.level as usize > table.max_level() {
                continue;
            }
            let expected = match table.multiply(ClassId::Nonzero(s), ClassId::Nonzero(t))? {
                ClassId::Zero => Complex64::zero(),
                ClassId::Nonzero(st) => gamma[&st],
            };
            let defect = (gamma[&s] * gamma[&t] - expected).norm();
            if defect > tol {
                violations.push(SemicharacterViolation {
                    left: s,
                    right: t,
                    defect,
                });
            }
        }
    }
    Ok(SemicharacterReport {
        multiplicative: violations.is_empty(),
        bounded,
        violations,
    })
}

/// The rank-one form of phi_s on the quotient space: x_e against x_s.
pub fn coefficient_rank_one(space: &SemigroupSpace, s: NzClassId) -> Result<Functional> {
    let table = space.table();
    let dim = space.dim();
    let mut left = DVector::zeros(dim);
    left[space.position(table.identity_class())?] = Complex64::new(1.0, 0.0);
    let mut right = DVector::zeros(dim);
    let size = table.class_size(s)? as f64;
    right[space.position(s)?] = Complex64::new(1.0 / size.sqrt(), 0.0);
    Ok(Functional::rank_one(left, right))
}
