//! Diagonal Fourier-side multipliers: symbols on nonzero classes, the induced
//! coefficientwise scaling of series, sampled lower bounds for the multiplier
//! norm at a truncation, and the inner-product factorization certificate that
//! upper-bounds the completely bounded norm.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Element;
use crate::congruence::{ClassId, ClassTable, NzClassId};
use crate::error::{Error, Result};
use crate::fock::{evaluate, operator_norm, SemigroupSpace};
use crate::scalar::{rc_from_ratio, rc_one, rc_to_c64, Rc};

/// A multiplier symbol: one exact value per nonzero class up to the table
/// truncation, with an optional closed-form tag for reporting.
#[derive(Debug, Clone)]
pub struct MultiplierSymbol {
    table: Arc<ClassTable>,
    values: BTreeMap<NzClassId, Rc>,
    pub tag: Option<String>,
}

impl MultiplierSymbol {
    pub fn from_map(table: &Arc<ClassTable>, values: BTreeMap<NzClassId, Rc>) -> Result<Self> {
        for id in table.classes_up_to(table.max_level()) {
            if !values.contains_key(&id) {
                return Err(Error::MissingSymbolValue(id.to_string()));
            }
        }
        Ok(MultiplierSymbol {
            table: table.clone(),
            values,
            tag: None,
        })
    }

    /// The constant symbol 1: the identity multiplier.
    pub fn one(table: &Arc<ClassTable>) -> Self {
        let values = table
            .classes_up_to(table.max_level())
            .into_iter()
            .map(|id| (id, rc_one()))
            .collect();
        MultiplierSymbol {
            table: table.clone(),
            values,
            tag: Some("one".into()),
        }
    }

    /// The radial symbol lambda^{|s|}.
    pub fn geometric(table: &Arc<ClassTable>, lambda: Rc) -> Self {
        let mut values = BTreeMap::new();
        for id in table.classes_up_to(table.max_level()) {
            let mut v = rc_one();
            for _ in 0..id.level {
                v *= lambda.clone();
            }
            values.insert(id, v);
        }
        MultiplierSymbol {
            table: table.clone(),
            values,
            tag: Some(format!(
                "geometric:{}+{}i",
                crate::scalar::format_rational(&lambda.re),
                crate::scalar::format_rational(&lambda.im)
            )),
        }
    }

    /// The indicator symbol of a single class.
    pub fn indicator(table: &Arc<ClassTable>, class: NzClassId) -> Self {
        let values = table
            .classes_up_to(table.max_level())
            .into_iter()
            .map(|id| {
                (
                    id,
                    if id == class {
                        rc_one()
                    } else {
                        crate::scalar::rc_zero()
                    },
                )
            })
            .collect();
        MultiplierSymbol {
            table: table.clone(),
            values,
            tag: Some(format!("indicator:{class}")),
        }
    }

    pub fn table(&self) -> &Arc<ClassTable> {
        &self.table
    }

    pub fn value(&self, id: NzClassId) -> Result<&Rc> {
        self.values
            .get(&id)
            .ok_or_else(|| Error::MissingSymbolValue(id.to_string()))
    }

    /// Pointwise product of symbols.
    pub fn pointwise(&self, other: &MultiplierSymbol) -> Result<MultiplierSymbol> {
        let mut values = BTreeMap::new();
        for (id, v) in &self.values {
            values.insert(*id, v.clone() * other.value(*id)?.clone());
        }
        MultiplierSymbol::from_map(&self.table, values)
    }
}

/// Coefficientwise scaling of a series by the symbol; exact.
pub fn apply_multiplier(symbol: &MultiplierSymbol, e: &Element) -> Result<Element> {
    if !crate::algebra::same_table(symbol.table(), e.table()) {
        return Err(Error::TableMismatch);
    }
    let mut out = Element::zero(e.table());
    for (&id, c) in e.terms() {
        out.add_term(id, c.clone() * symbol.value(id)?.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct NormEstimate {
    /// Largest observed ratio ||M_phi A|| / ||A|| over the samples: a lower
    /// bound for the truncated multiplier norm.
    pub lower_bound: f64,
    pub samples: usize,
    pub seed: u64,
    pub level: usize,
}

/// Samples random exact polynomials and reports the largest norm ratio under
/// the multiplier at the given truncation. Deterministic in the seed.
pub fn multiplier_norm_estimate(
    symbol: &MultiplierSymbol,
    level: usize,
    samples: usize,
    seed: u64,
) -> Result<NormEstimate> {
    assert!(samples >= 1, "at least one sample required");
    let table = symbol.table();
    let space = SemigroupSpace::new(table, level)?;
    let classes = table.classes_up_to(level);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lower = 0.0f64;
    for _ in 0..samples {
        let mut e = Element::zero(table);
        let terms = rng.gen_range(1..=8usize);
        for _ in 0..terms {
            let id = classes[rng.gen_range(0..classes.len())];
            e.add_term(
                id,
                rc_from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9) as i64),
            );
        }
        if e.is_zero() {
            e = Element::identity(table);
        }
        let denominator = operator_norm(&evaluate(&e, &space)?)?;
        if denominator == 0.0 {
            continue;
        }
        let numerator = operator_norm(&evaluate(&apply_multiplier(symbol, &e)?, &space)?)?;
        lower = lower.max(numerator / denominator);
    }
    Ok(NormEstimate {
        lower_bound: lower,
        samples,
        seed,
        level,
    })
}

#[derive(Debug, Clone)]
pub struct FactorizationReport {
    pub holds: bool,
    /// sup ||f|| sup ||g||, a completely bounded norm certificate, present
    /// when the identity holds.
    pub bound: Option<f64>,
    /// Largest defect |phi(s) - <f(t), g(st)>| observed.
    pub worst_defect: f64,
}

/// Verifies the inner-product factorization phi(s) = <f(t), g(st)> over all
/// nonzero pairs with levels inside the truncation, within `tol`. Inner
/// products are linear in the first argument. On success the product of sup
/// norms is returned as a certified upper bound.
pub fn factorization_verify(
    f: &BTreeMap<NzClassId, DVector<Complex64>>,
    g: &BTreeMap<NzClassId, DVector<Complex64>>,
    symbol: &MultiplierSymbol,
    level: usize,
    tol: f64,
) -> Result<FactorizationReport> {
    let table = symbol.table();
    if level > table.max_level() {
        return Err(Error::LevelOverflow {
            requested: level,
            max: table.max_level(),
        });
    }
    let classes = table.classes_up_to(level);
    let mut dim: Option<usize> = None;
    for &id in &classes {
        for family in [&f, &g] {
            let Some(v) = family.get(&id) else {
                return Err(Error::MissingSymbolValue(id.to_string()));
            };
            match dim {
                None => dim = Some(v.len()),
                Some(k) => {
                    if v.len() != k {
                        return Err(Error::DimensionMismatch {
                            left: v.len(),
                            right: k,
                        });
                    }
                }
            }
        }
    }

    let mut worst = 0.0f64;
    for &s in &classes {
        let phi_s = rc_to_c64(symbol.value(s)?);
        for &t in &classes {
            if s.level as usize + t.level as usize > level {
                continue;
            }
            let st = match table.multiply(ClassId::Nonzero(s), ClassId::Nonzero(t))? {
                ClassId::Zero => continue,
                ClassId::Nonzero(st) => st,
            };
            let inner = g[&st].dotc(&f[&t]); // sum f_i conj(g_i)
            worst = worst.max((phi_s - inner).norm());
        }
    }

    let holds = worst <= tol;
    let bound = if holds {
        let sup_f = classes.iter().map(|id| f[id].norm()).fold(0.0, f64::max);
        let sup_g = classes.iter().map(|id| g[id].norm()).fold(0.0, f64::max);
        Some(sup_f * sup_g)
    } else {
        None
    };
    Ok(FactorizationReport {
        holds,
        bound,
        worst_defect: worst,
    })
}

/// The explicit factorization family for the radial symbol lambda^{|s|} with
/// |lambda| < 1: f(t) is a basis vector at index |t| and g(u) stacks the
/// conjugate powers lambda^{|u|-j} for j <= |u|. Certifies the bound
/// (1 - |lambda|^2)^{-1/2}.
pub fn geometric_factorization(
    table: &Arc<ClassTable>,
    lambda: Complex64,
    level: usize,
) -> (
    BTreeMap<NzClassId, DVector<Complex64>>,
    BTreeMap<NzClassId, DVector<Complex64>>,
) {
    let classes = table.classes_up_to(level);
    let dim = level + 1;
    let mut f = BTreeMap::new();
    let mut g = BTreeMap::new();
    for &id in &classes {
        let m = id.level as usize;
        let mut fv = DVector::zeros(dim);
        fv[m] = Complex64::new(1.0, 0.0);
        f.insert(id, fv);
        let mut gv = DVector::zeros(dim);
        for j in 0..=m {
            // <e_{|t|}, g(u)> must give lambda^{|u|-|t|}.
            gv[j] = lambda.powi((m - j) as i32).conj();
        }
        g.insert(id, gv);
    }
    (f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Presentation;
    use crate::scalar::rc_from_i64;
    use crate::word::Word;

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
    fn identity_and_projection_symbols() {
        let t = ClassTable::close(&Presentation::commutator(2), 4).unwrap();
        let e = Element::identity(&t)
            .add(
                &Element::from_word(&t, &w("1"))
                    .unwrap()
                    .scale(&rc_from_i64(3, 0)),
            )
            .unwrap();
        assert_eq!(apply_multiplier(&MultiplierSymbol::one(&t), &e).unwrap(), e);

        let onto_constants = MultiplierSymbol::indicator(&t, t.identity_class());
        assert_eq!(
            apply_multiplier(&onto_constants, &e).unwrap(),
            Element::identity(&t)
        );
    }

    #[test]
    fn geometric_symbol_scales_by_level() {
        let t = ClassTable::close(&Presentation::commutator(2), 3).unwrap();
        let lambda = rc_from_ratio(1, 2);
        let symbol = MultiplierSymbol::geometric(&t, lambda.clone());
        let e = Element::identity(&t)
            .add(&Element::from_word(&t, &w("1")).unwrap())
            .unwrap()
            .add(&Element::from_word(&t, &w("2")).unwrap())
            .unwrap();
        let scaled = apply_multiplier(&symbol, &e).unwrap();
        let expected = Element::identity(&t)
            .add(&Element::from_word(&t, &w("1")).unwrap().scale(&lambda))
            .unwrap()
            .add(&Element::from_word(&t, &w("2")).unwrap().scale(&lambda))
            .unwrap();
        assert_eq!(scaled, expected);
    }

    #[test]
    fn multiplier_is_linear_and_commutes_with_graded_blocks() {
        let t = ClassTable::close(&Presentation::commutator(2), 4).unwrap();
        let symbol = MultiplierSymbol::geometric(&t, rc_from_ratio(-2, 3));
        let a = Element::from_word(&t, &w("1"))
            .unwrap()
            .scale(&rc_from_i64(2, 1));
        let b = Element::from_word(&t, &w("12"))
            .unwrap()
            .scale(&rc_from_ratio(1, 5));
        let sum = a.add(&b).unwrap();
        let lhs = apply_multiplier(&symbol, &sum).unwrap();
        let rhs = apply_multiplier(&symbol, &a)
            .unwrap()
            .add(&apply_multiplier(&symbol, &b).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        for level in 0..=2usize {
            assert_eq!(
                apply_multiplier(&symbol, &sum.graded_block(level)).unwrap(),
                apply_multiplier(&symbol, &sum).unwrap().graded_block(level)
            );
        }
    }

    #[test]
    fn pointwise_product_composes() {
        let t = ClassTable::close(&Presentation::commutator(2), 4).unwrap();
        let a = MultiplierSymbol::geometric(&t, rc_from_ratio(1, 2));
        let b = MultiplierSymbol::indicator(&t, nz(&t, "12"));
        let both = a.pointwise(&b).unwrap();
        let e = Element::identity(&t)
            .add(
                &Element::from_word(&t, &w("12"))
                    .unwrap()
                    .scale(&rc_from_i64(4, 0)),
            )
            .unwrap();
        let lhs = apply_multiplier(&both, &e).unwrap();
        let rhs = apply_multiplier(&a, &apply_multiplier(&b, &e).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn identity_symbol_estimates_exactly_one() {
        let t = ClassTable::close(&Presentation::commutator(2), 5).unwrap();
        let estimate = multiplier_norm_estimate(&MultiplierSymbol::one(&t), 5, 50, 12345).unwrap();
        assert_eq!(estimate.lower_bound, 1.0);
    }

    #[test]
    fn contractive_symbols_never_exceed_one() {
        let t = ClassTable::close(&Presentation::commutator(2), 5).unwrap();
        for lambda in [rc_from_ratio(1, 2), rc_from_ratio(-3, 4), rc_from_i64(0, 1)] {
            let symbol = MultiplierSymbol::geometric(&t, lambda);
            let estimate = multiplier_norm_estimate(&symbol, 5, 100, 4242).unwrap();
            assert!(
                estimate.lower_bound <= 1.0 + 1e-9,
                "{}",
                estimate.lower_bound
            );
        }
        let indicator = MultiplierSymbol::indicator(&t, nz(&t, "1"));
        let estimate = multiplier_norm_estimate(&indicator, 5, 100, 4242).unwrap();
        assert!(estimate.lower_bound <= 1.0 + 1e-9);
    }

    #[test]
    fn constant_factorization_certifies_bound_one() {
        let t = ClassTable::close(&Presentation::commutator(2), 4).unwrap();
        let classes = t.classes_up_to(4);
        let unit: BTreeMap<_, _> = classes
            .iter()
            .map(|&id| (id, DVector::from_element(1, Complex64::new(1.0, 0.0))))
            .collect();
        let report =
            factorization_verify(&unit, &unit, &MultiplierSymbol::one(&t), 4, 1e-12).unwrap();
        assert!(report.holds);
        assert!((report.bound.unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_factorization_verifies_with_geometric_bound() {
        let t = ClassTable::close(&Presentation::commutator(2), 5).unwrap();
        let lambda = Complex64::new(0.5, 0.25);
        let symbol = MultiplierSymbol::geometric(
            &t,
            num::Complex::new(
                crate::scalar::parse_rational("1/2").unwrap(),
                crate::scalar::parse_rational("1/4").unwrap(),
            ),
        );
        let (f, g) = geometric_factorization(&t, lambda, 5);
        let report = factorization_verify(&f, &g, &symbol, 5, 1e-12).unwrap();
        assert!(report.holds, "defect {}", report.worst_defect);
        let cap = (1.0 - lambda.norm_sqr()).powf(-0.5);
        assert!(report.bound.unwrap() <= cap + 1e-12);

        // The certified bound dominates the sampled lower bound.
        let estimate = multiplier_norm_estimate(&symbol, 5, 100, 777).unwrap();
        assert!(estimate.lower_bound <= report.bound.unwrap() + 1e-6);
    }

    #[test]
    fn mismatched_symbol_fails_factorization() {
        let t = ClassTable::close(&Presentation::commutator(2), 3).unwrap();
        let mut values = BTreeMap::new();
        for (i, id) in t.classes_up_to(3).into_iter().enumerate() {
            values.insert(id, rc_from_i64(i as i64 + 2, 1));
        }
        let noisy = MultiplierSymbol::from_map(&t, values).unwrap();
        let (f, g) = geometric_factorization(&t, Complex64::new(0.5, 0.0), 3);
        let report = factorization_verify(&f, &g, &noisy, 3, 1e-12).unwrap();
        assert!(!report.holds);
        assert!(report.bound.is_none());
    }

    #[test]
    fn missing_values_and_dimension_mismatches_error() {
        let t = ClassTable::close(&Presentation::commutator(2), 3).unwrap();
        assert!(matches!(
            MultiplierSymbol::from_map(&t, BTreeMap::new()),
            Err(Error::MissingSymbolValue(_))
        ));
        let (mut f, g) = geometric_factorization(&t, Complex64::new(0.5, 0.0), 3);
        let first = *f.keys().next().unwrap();
        f.insert(first, DVector::zeros(2));
        assert!(matches!(
            factorization_verify(&f, &g, &MultiplierSymbol::one(&t), 3, 1e-12),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
