//! Aggregated invariant suite: every structural identity the workbench
//! relies on, run against one presentation and reported check by check.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Element, FreeElement};
use crate::congruence::{abelianization_check, ClassId, ClassTable, NzClassId};
use crate::error::Result;
use crate::fock::{
    compress, evaluate, full_shift, left_regular, operator_norm, unitary_u, CoinvariantBasis,
    FockSpace, SemigroupSpace, TruncatedOperator,
};
use crate::hopf::{
    coassociativity_holds, comultiplication_descends, comultiplication_is_algebra_map, comultiply,
    hopf_ideal_test, presentation_ideal_generators, semigroup_like_scan, TensorElement,
};
use crate::predual::{convolve, EvaluationCharacter, Functional};
use crate::presentation::Presentation;
use crate::scalar::rc_from_ratio;
use crate::schur::{apply_multiplier, multiplier_norm_estimate, MultiplierSymbol};
use crate::word::{unrank, words_at_level, Word};

/// Matrix identity tolerance; unitarity gets a tighter one; symbolic checks
/// are exact.
pub const MATRIX_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct InvariantResult {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub level: usize,
    pub seed: u64,
    pub checks: Vec<InvariantResult>,
    pub all_pass: bool,
}

struct Ctx {
    table: Arc<ClassTable>,
    level: usize,
    seed: u64,
    checks: Vec<InvariantResult>,
}

impl Ctx {
    fn record(&mut self, id: &str, pass: bool, detail: String) {
        self.checks.push(InvariantResult {
            id: id.to_string(),
            pass,
            detail,
        });
    }

    fn run<F: FnOnce(&mut Ctx) -> Result<(bool, String)>>(&mut self, id: &str, body: F) {
        match body(self) {
            Ok((pass, detail)) => self.record(id, pass, detail),
            Err(err) => self.record(id, false, format!("error: {err}")),
        }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt)
    }

    fn random_element(&self, max_degree: usize, terms: usize, rng: &mut ChaCha8Rng) -> Element {
        let classes = self.table.classes_up_to(max_degree);
        let mut e = Element::zero(&self.table);
        for _ in 0..terms {
            let id = classes[rng.gen_range(0..classes.len())];
            e.add_term(
                id,
                rc_from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9) as i64),
            );
        }
        e
    }

    fn random_functional(
        &self,
        max_degree: usize,
        terms: usize,
        rng: &mut ChaCha8Rng,
    ) -> Functional {
        let classes = self.table.classes_up_to(max_degree);
        let mut f = Functional::zero(&self.table);
        for _ in 0..terms {
            let id = classes[rng.gen_range(0..classes.len())];
            let coeff = rc_from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9) as i64);
            f = f
                .add(&Functional::coefficient(&self.table, id).scale(&coeff))
                .expect("same table");
        }
        f
    }
}

/// Runs the full invariant suite for one presentation at one truncation.
pub fn verify_all(presentation: &Presentation, level: usize, seed: u64) -> Result<VerifyReport> {
    let table = ClassTable::close(presentation, level)?;
    let mut ctx = Ctx {
        table,
        level,
        seed,
        checks: Vec::new(),
    };

    congruence_checks(&mut ctx, presentation);
    algebra_checks(&mut ctx);
    matrix_checks(&mut ctx);
    hopf_checks(&mut ctx, presentation);
    predual_checks(&mut ctx);
    aut_checks(&mut ctx);
    schur_checks(&mut ctx);

    let all_pass = ctx.checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        level,
        seed,
        checks: ctx.checks,
        all_pass,
    })
}

fn congruence_checks(ctx: &mut Ctx, presentation: &Presentation) {
    let oracle_level = ctx.level.min(4);
    ctx.run("congruence-oracle-agreement", |ctx| {
        let fast = &ctx.table;
        let slow = ClassTable::oracle_close(presentation, oracle_level)?;
        let ok = fast.same_partition(&slow, oracle_level);
        Ok((
            ok,
            format!("saturation oracle compared through level {oracle_level}"),
        ))
    });

    ctx.run("class-homogeneity", |ctx| {
        for n in 0..=ctx.level {
            for id in ctx.table.classes_at(n) {
                for m in ctx.table.members(id)? {
                    if m.len()? != n {
                        return Ok((false, format!("class {id} has a member of wrong length")));
                    }
                }
            }
        }
        Ok((true, "every nonzero class is length-homogeneous".into()))
    });

    ctx.run("identity-class-is-trivial", |ctx| {
        let e = ctx.table.identity_class();
        Ok((
            ctx.table.class_size(e)? == 1,
            "the empty word sits in a singleton class".into(),
        ))
    });

    ctx.run("zero-classes-absorb", |ctx| {
        let d = ctx.table.d();
        for n in 0..ctx.level {
            for r in 0..words_at_level(d, n) {
                let word = Word::Letters(unrank(r, n, d));
                if !ctx.table.class_of(&word)?.is_zero() {
                    continue;
                }
                for letter in 1..=d {
                    let appended = word.concat(&Word::from_letters([letter]));
                    let prepended = Word::from_letters([letter]).concat(&word);
                    if !ctx.table.class_of(&appended)?.is_zero()
                        || !ctx.table.class_of(&prepended)?.is_zero()
                    {
                        return Ok((false, format!("zero class leaks at {word}")));
                    }
                }
            }
        }
        Ok((true, "appending letters to zero words stays zero".into()))
    });

    ctx.run("monotone-truncation-consistency", |ctx| {
        if ctx.level == 0 {
            return Ok((true, "trivial at level 0".into()));
        }
        let smaller = ClassTable::close(presentation, ctx.level - 1)?;
        Ok((
            smaller.same_partition(&ctx.table, ctx.level - 1),
            "partitions agree with the one-level-smaller table".into(),
        ))
    });

    ctx.run("representative-independence", |ctx| {
        let half = ctx.level / 2;
        for la in 0..=half {
            for lb in 0..=(ctx.level - la).min(half) {
                for a in ctx.table.classes_at(la) {
                    for b in ctx.table.classes_at(lb) {
                        let expected = ctx
                            .table
                            .multiply(ClassId::Nonzero(a), ClassId::Nonzero(b))?;
                        for ma in ctx.table.members(a)? {
                            for mb in ctx.table.members(b)? {
                                if ctx.table.class_of(&ma.concat(&mb))? != expected {
                                    return Ok((
                                        false,
                                        format!("product of {a} and {b} depends on members"),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok((
            true,
            "class products are independent of representatives".into(),
        ))
    });

    // Only meaningful for the commutator presentation; skip silently
    // otherwise (reported as not-run rather than failed).
    if abelianization_check(&ctx.table).is_ok() {
        ctx.run("monomial-orthogonality-sizes", |ctx| {
            let report = abelianization_check(&ctx.table)?;
            Ok((
                report.all_ok,
                format!("{} classes match their multinomials", report.rows.len()),
            ))
        });
    }
}

fn algebra_checks(ctx: &mut Ctx) {
    ctx.run("product-associative-unital", |ctx| {
        let mut rng = ctx.rng(0x01);
        let one = Element::identity(&ctx.table);
        let third = ctx.level / 3;
        for _ in 0..10 {
            let a = ctx.random_element(third, 3, &mut rng);
            let b = ctx.random_element(third, 3, &mut rng);
            let c = ctx.random_element(third, 3, &mut rng);
            if a.product(&b)?.product(&c)? != a.product(&b.product(&c)?)? {
                return Ok((false, "associativity failed".into()));
            }
            if a.product(&one)? != a || one.product(&a)? != a {
                return Ok((false, "unit failed".into()));
            }
        }
        Ok((true, "10 random triples, exact".into()))
    });

    ctx.run("cesaro-block-decomposition", |ctx| {
        let mut rng = ctx.rng(0x02);
        for _ in 0..5 {
            let e = ctx.random_element(ctx.level, 6, &mut rng);
            let mut total = Element::zero(&ctx.table);
            for j in 0..=ctx.level {
                total = total.add(&e.graded_block(j))?;
            }
            if total != e {
                return Ok((false, "graded blocks do not sum back".into()));
            }
            for k in 1..=(2 * ctx.level).max(2) {
                let mut acc = Element::zero(&ctx.table);
                for j in 0..=k.min(ctx.level) {
                    let weight = num::BigRational::new(
                        num::BigInt::from((k - j) as u64),
                        num::BigInt::from(k as u64),
                    );
                    acc = acc.add(&e.graded_block(j).scale(&crate::scalar::rc_real(weight)))?;
                }
                if acc != e.cesaro(k) {
                    return Ok((false, format!("block-weighted sum differs at order {k}")));
                }
            }
        }
        Ok((
            true,
            "weighted block sums equal the partial-sum maps, exact".into(),
        ))
    });

    ctx.run("collapse-intertwines-cesaro", |ctx| {
        let mut rng = ctx.rng(0x03);
        let d = ctx.table.d();
        for _ in 0..10 {
            let mut free = FreeElement::zero(d);
            for _ in 0..6 {
                let len = rng.gen_range(0..=ctx.level);
                let word: Vec<u32> = (0..len).map(|_| rng.gen_range(1..=d)).collect();
                free.add_term(
                    word,
                    rc_from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9) as i64),
                );
            }
            for k in 1..=(ctx.level + 2) {
                if free.collapse(&ctx.table)?.cesaro(k) != free.cesaro(k).collapse(&ctx.table)? {
                    return Ok((false, "collapse does not intertwine".into()));
                }
            }
        }
        Ok((
            true,
            "free and quotient partial sums commute with collapse, exact".into(),
        ))
    });
}

fn matrix_checks(ctx: &mut Ctx) {
    ctx.run("eta-basis-orthogonal", |ctx| {
        let basis = CoinvariantBasis::new(&ctx.table, ctx.level)?;
        let mut seen = std::collections::BTreeSet::new();
        for &s in basis.quotient_space().basis() {
            let positions = basis.eta_positions(s)?;
            if positions.len() as u64 != ctx.table.class_size(s)? {
                return Ok((false, format!("norm of eta at {s} is off")));
            }
            for p in positions {
                if !seen.insert(p) {
                    return Ok((false, "eta supports overlap".into()));
                }
            }
        }
        Ok((
            true,
            "member supports are disjoint; squared norms equal class sizes".into(),
        ))
    });

    ctx.run("unitary-equivalence-interior", |ctx| {
        let basis = CoinvariantBasis::new(&ctx.table, ctx.level)?;
        let space = SemigroupSpace::new(&ctx.table, ctx.level)?;
        let u = unitary_u(&basis, &space)?;
        let gram = u.matrix.adjoint() * &u.matrix;
        let eye = nalgebra::DMatrix::<Complex64>::identity(gram.nrows(), gram.ncols());
        if (gram - eye).iter().map(|z| z.norm()).fold(0.0, f64::max) > UNITARY_TOL {
            return Ok((false, "U is not unitary".into()));
        }
        let fock = basis.fock().clone();
        let d = ctx.table.d();
        let mut worst = 0.0f64;
        for len in 1..=2usize.min(ctx.level) {
            for r in 0..words_at_level(d, len) {
                let word = Word::Letters(unrank(r, len, d));
                let compressed = compress(&full_shift(&fock, &word)?, &basis)?;
                let conjugated = u.compose(&compressed)?.compose(&u.adjoint())?;
                let target = match ctx.table.class_of(&word)? {
                    ClassId::Zero => {
                        TruncatedOperator::new(nalgebra::DMatrix::zeros(space.dim(), space.dim()))
                    }
                    ClassId::Nonzero(s) => left_regular(&space, s)?,
                };
                let interior = space.positions_up_to(ctx.level - len);
                let diff = conjugated
                    .restrict_columns(interior.clone())
                    .sub(&target.restrict_columns(interior))?;
                worst = worst.max(diff.max_abs_entry());
            }
        }
        Ok((
            worst <= MATRIX_TOL,
            format!("worst interior entry defect {worst:.3e}"),
        ))
    });

    ctx.run("generator-contractivity", |ctx| {
        let space = SemigroupSpace::new(&ctx.table, ctx.level)?;
        let mut worst = 0.0f64;
        for s in ctx.table.classes_up_to(ctx.level.min(3)) {
            worst = worst.max(operator_norm(&left_regular(&space, s)?)?);
        }
        Ok((
            worst <= 1.0 + UNITARY_TOL,
            format!("max shift norm {worst:.12}"),
        ))
    });

    ctx.run("fourier-matrix-agreement", |ctx| {
        let space = SemigroupSpace::new(&ctx.table, ctx.level)?;
        let mut rng = ctx.rng(0x04);
        let vacuum = space.position(ctx.table.identity_class())?;
        for _ in 0..5 {
            let e = ctx.random_element(ctx.level, 5, &mut rng);
            let m = evaluate(&e, &space)?;
            for s in ctx.table.classes_up_to(ctx.level) {
                let size = ctx.table.class_size(s)? as f64;
                let via_matrix = m.matrix[(space.position(s)?, vacuum)] * size.sqrt();
                let exact = crate::scalar::rc_to_c64(&e.fourier(s));
                if (via_matrix - exact).norm() > 1e-10 {
                    return Ok((false, format!("coefficient at {s} disagrees")));
                }
            }
        }
        Ok((
            true,
            "stored coefficients equal scaled vacuum matrix entries".into(),
        ))
    });

    ctx.run("cesaro-norm-decay", |ctx| {
        let space = SemigroupSpace::new(&ctx.table, ctx.level)?;
        let mut rng = ctx.rng(0x05);
        for _ in 0..5 {
            let e = ctx.random_element(ctx.level.min(4), 5, &mut rng);
            let degree = e.degree().unwrap_or(0);
            let coeff_sum: f64 = e.terms().map(|(_, c)| crate::scalar::rc_abs(c)).sum();
            for k in 1..=32usize {
                let diff = evaluate(&e.cesaro(k).sub(&e)?, &space)?;
                let bound = coeff_sum * degree as f64 / k as f64;
                if operator_norm(&diff)? > bound + 1e-9 {
                    return Ok((false, format!("decay bound violated at order {k}")));
                }
            }
        }
        Ok((
            true,
            "partial-sum defect stays within (deg/k) x coefficient mass".into(),
        ))
    });
}

fn hopf_checks(ctx: &mut Ctx, presentation: &Presentation) {
    ctx.run("coassociativity", |ctx| {
        let mut rng = ctx.rng(0x06);
        for _ in 0..50 {
            let e = ctx.random_element(ctx.level, 6, &mut rng);
            if !coassociativity_holds(&e) {
                return Ok((false, "coassociativity failed".into()));
            }
        }
        Ok((true, "50 random rational series, exact".into()))
    });

    ctx.run("comultiplication-multiplicative", |ctx| {
        let mut rng = ctx.rng(0x07);
        let half = ctx.level / 2;
        for _ in 0..20 {
            let a = ctx.random_element(half, 4, &mut rng);
            let b = ctx.random_element(half, 4, &mut rng);
            if !comultiplication_is_algebra_map(&a, &b)? {
                return Ok((false, "tensor of products differs".into()));
            }
        }
        Ok((true, "20 random pairs, exact".into()))
    });

    ctx.run("comultiplication-descends", |ctx| {
        let mut rng = ctx.rng(0x08);
        let d = ctx.table.d();
        for _ in 0..20 {
            let mut free = FreeElement::zero(d);
            for _ in 0..6 {
                let len = rng.gen_range(0..=ctx.level);
                let word: Vec<u32> = (0..len).map(|_| rng.gen_range(1..=d)).collect();
                free.add_term(
                    word,
                    rc_from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9) as i64),
                );
            }
            if !comultiplication_descends(&free, &ctx.table)? {
                return Ok((
                    false,
                    "collapse does not intertwine comultiplications".into(),
                ));
            }
        }
        Ok((
            true,
            "quotient comultiplication is well defined, exact".into(),
        ))
    });

    ctx.run("semigroup-like-classification", |ctx| {
        let degree = ctx.level.min(2);
        let found = semigroup_like_scan(&ctx.table, degree)?;
        let classes = ctx.table.classes_up_to(degree);
        let ok = found.len() == classes.len() + 1
            && found.contains(&Vec::new())
            && classes.iter().all(|id| found.contains(&vec![*id]));
        Ok((ok, format!("exhaustive 0/1 scan through degree {degree}")))
    });

    ctx.run("ideal-slices-are-indicator-coideals", |ctx| {
        let generators = presentation_ideal_generators(presentation)?;
        for degree in 0..=ctx.level.min(4) {
            let report = hopf_ideal_test(&generators, ctx.table.d(), degree, 1 << 16)?;
            if !report.coideal_in_degree {
                return Ok((false, format!("slice at degree {degree} is not a coideal")));
            }
            let expected: Vec<Vec<Word>> = ctx
                .table
                .classes_at(degree)
                .map(|id| ctx.table.members(id))
                .collect::<Result<_>>()?;
            if report.indicator_sets != expected {
                return Ok((
                    false,
                    format!("indicator sets differ from classes at degree {degree}"),
                ));
            }
        }
        Ok((
            true,
            "annihilator indicators equal the class partition per degree".into(),
        ))
    });
}

fn predual_checks(ctx: &mut Ctx) {
    ctx.run("convolution-diagonal-idempotents", |ctx| {
        let up_to = ctx.level.min(3);
        for s in ctx.table.classes_up_to(up_to) {
            for t in ctx.table.classes_up_to(up_to) {
                let psi_s = Functional::idempotent(&ctx.table, s)?;
                let psi_t = Functional::idempotent(&ctx.table, t)?;
                let prod = convolve(&psi_s, &psi_t)?;
                let expected = if s == t {
                    psi_s.clone()
                } else {
                    Functional::zero(&ctx.table)
                };
                if prod.exact_terms()? != expected.exact_terms()? {
                    return Ok((false, format!("idempotent identity fails at {s}, {t}")));
                }
            }
        }
        Ok((
            true,
            "normalized coefficient functionals are orthogonal idempotents".into(),
        ))
    });

    ctx.run("convolution-commutative-associative", |ctx| {
        let mut rng = ctx.rng(0x09);
        let third = ctx.level / 3;
        for _ in 0..8 {
            let f = ctx.random_functional(third.max(1), 3, &mut rng);
            let g = ctx.random_functional(third.max(1), 3, &mut rng);
            let h = ctx.random_functional(third.max(1), 3, &mut rng);
            let fg = convolve(&f, &g)?;
            if fg.exact_terms()? != convolve(&g, &f)?.exact_terms()? {
                return Ok((false, "commutativity failed".into()));
            }
            if convolve(&fg, &h)?.exact_terms()?
                != convolve(&f, &convolve(&g, &h)?)?.exact_terms()?
            {
                return Ok((false, "associativity failed".into()));
            }
        }
        Ok((true, "8 random triples, exact".into()))
    });

    ctx.run("evaluation-characters-multiplicative", |ctx| {
        let mut rng = ctx.rng(0x0a);
        for s in ctx.table.classes_up_to(ctx.level.min(2)) {
            let rho = EvaluationCharacter::new(s);
            for _ in 0..5 {
                let f = ctx.random_functional(ctx.level.min(2), 3, &mut rng);
                let g = ctx.random_functional(ctx.level.min(2), 3, &mut rng);
                if rho.apply(&convolve(&f, &g)?)? != rho.apply(&f)? * rho.apply(&g)? {
                    return Ok((false, format!("character at {s} is not multiplicative")));
                }
            }
        }
        Ok((
            true,
            "class evaluations are convolution characters, exact".into(),
        ))
    });
}

fn aut_checks(ctx: &mut Ctx) {
    let degenerate = crate::aut::enumerate_automorphisms(&ctx.table, ctx.level.min(2)).is_err();
    if degenerate {
        ctx.record(
            "automorphism-search",
            true,
            "skipped: level-one classes are degenerate, search rejected by design".into(),
        );
        return;
    }

    ctx.run("automorphism-group-closure", |ctx| {
        let autos = crate::aut::enumerate_automorphisms(&ctx.table, ctx.level)?;
        for a in &autos {
            if !autos.contains(&a.inverse()) {
                return Ok((false, "not closed under inverses".into()));
            }
            for b in &autos {
                if !autos.contains(&a.compose(b)) {
                    return Ok((false, "not closed under composition".into()));
                }
            }
        }
        Ok((true, format!("{} survivors form a group", autos.len())))
    });

    ctx.run("automorphism-hopf-compatible", |ctx| {
        let autos = crate::aut::enumerate_automorphisms(&ctx.table, ctx.level)?;
        let mut rng = ctx.rng(0x0b);
        let half = (ctx.level / 2).max(ctx.level.min(1));
        for sigma in &autos {
            for _ in 0..4 {
                let a = ctx.random_element(half, 4, &mut rng);
                let b = ctx.random_element(half, 4, &mut rng);
                let lhs = crate::aut::induced_automorphism(sigma, &a.product(&b)?)?;
                let rhs = crate::aut::induced_automorphism(sigma, &a)?
                    .product(&crate::aut::induced_automorphism(sigma, &b)?)?;
                if lhs != rhs {
                    return Ok((false, "relabeling is not multiplicative".into()));
                }
                let mut relabeled = TensorElement::zero(&ctx.table);
                for (&(s, u), c) in comultiply(&a).terms() {
                    let is = match crate::aut::image_class(sigma, &ctx.table, s)? {
                        ClassId::Nonzero(x) => x,
                        ClassId::Zero => return Ok((false, "image collapsed to zero".into())),
                    };
                    let iu = match crate::aut::image_class(sigma, &ctx.table, u)? {
                        ClassId::Nonzero(x) => x,
                        ClassId::Zero => return Ok((false, "image collapsed to zero".into())),
                    };
                    relabeled.add_term((is, iu), c.clone());
                }
                if relabeled != comultiply(&crate::aut::induced_automorphism(sigma, &a)?) {
                    return Ok((false, "comultiplication does not intertwine".into()));
                }
            }
        }
        Ok((true, "relabelings are Hopf-compatible, exact".into()))
    });

    ctx.run("second-quantization-conjugation", |ctx| {
        let autos = crate::aut::enumerate_automorphisms(&ctx.table, ctx.level)?;
        let fock = FockSpace::new(ctx.table.d(), ctx.level.min(4));
        let d = ctx.table.d();
        for sigma in &autos {
            let u = crate::aut::second_quantization(sigma, &fock)?;
            for len in 1..=fock.level().min(2) {
                for r in 0..words_at_level(d, len) {
                    let word = Word::Letters(unrank(r, len, d));
                    let lhs = &u.matrix * &full_shift(&fock, &word)?.matrix * u.matrix.adjoint();
                    let rhs = full_shift(&fock, &sigma.apply_word(&word))?.matrix;
                    if lhs != rhs {
                        return Ok((false, format!("conjugation differs at {word}")));
                    }
                }
            }
        }
        Ok((
            true,
            "permutation unitaries conjugate shifts exactly".into(),
        ))
    });
}

fn schur_checks(ctx: &mut Ctx) {
    ctx.run("multiplier-identity-estimate", |ctx| {
        let estimate =
            multiplier_norm_estimate(&MultiplierSymbol::one(&ctx.table), ctx.level, 25, ctx.seed)?;
        Ok((
            estimate.lower_bound == 1.0,
            format!(
                "identity symbol sampled at exactly {}",
                estimate.lower_bound
            ),
        ))
    });

    ctx.run("multiplier-pointwise-composition", |ctx| {
        let a = MultiplierSymbol::geometric(&ctx.table, rc_from_ratio(1, 2));
        let b = MultiplierSymbol::geometric(&ctx.table, rc_from_ratio(-1, 3));
        let both = a.pointwise(&b)?;
        let mut rng = ctx.rng(0x0c);
        for _ in 0..5 {
            let e = ctx.random_element(ctx.level, 5, &mut rng);
            let lhs = apply_multiplier(&both, &e)?;
            let rhs = apply_multiplier(&a, &apply_multiplier(&b, &e)?)?;
            if lhs != rhs {
                return Ok((false, "pointwise product does not compose".into()));
            }
            for j in 0..=ctx.level {
                if apply_multiplier(&a, &e.graded_block(j))?
                    != apply_multiplier(&a, &e)?.graded_block(j)
                {
                    return Ok((false, "multiplier does not respect grading".into()));
                }
            }
        }
        Ok((
            true,
            "symbols compose pointwise and respect the grading, exact".into(),
        ))
    });

    ctx.run("contractive-symbol-sampling", |ctx| {
        let symbol = MultiplierSymbol::geometric(&ctx.table, rc_from_ratio(1, 2));
        let estimate = multiplier_norm_estimate(&symbol, ctx.level, 25, ctx.seed)?;
        Ok((
            estimate.lower_bound <= 1.0 + 1e-9,
            format!("radial symbol sampled at {:.12}", estimate.lower_bound),
        ))
    });
}

/// Negative control used by tests and reports: compares the coinvariant
/// picture of one presentation against the weighted shifts of another. For
/// genuinely different congruences this must fail.
pub fn cross_table_unitary_defect(
    left: &Presentation,
    right: &Presentation,
    level: usize,
) -> Result<f64> {
    let lt = ClassTable::close(left, level)?;
    let rt = ClassTable::close(right, level)?;
    let basis = CoinvariantBasis::new(&lt, level)?;
    let space = SemigroupSpace::new(&rt, level)?;
    let fock = basis.fock().clone();
    let d = lt.d();
    let mut worst = 0.0f64;
    for r in 0..words_at_level(d, 1) {
        let word = Word::Letters(unrank(r, 1, d));
        let compressed = compress(&full_shift(&fock, &word)?, &basis)?;
        let target = match rt.class_of(&word)? {
            ClassId::Zero => {
                TruncatedOperator::new(nalgebra::DMatrix::zeros(space.dim(), space.dim()))
            }
            ClassId::Nonzero(s) => left_regular(&space, s)?,
        };
        if compressed.dim() != target.dim() {
            return Ok(f64::INFINITY);
        }
        let interior = space.positions_up_to(level - 1);
        let diff = compressed
            .restrict_columns(interior.clone())
            .sub(&target.restrict_columns(interior))?;
        worst = worst.max(diff.max_abs_entry());
    }
    Ok(worst)
}

/// Builds the semicharacter induced by coordinatewise powers of a ball point
/// on a commutator table; used by reports.
pub fn coordinate_power_character(
    table: &Arc<ClassTable>,
    lambda: &[Complex64],
) -> Result<BTreeMap<NzClassId, Complex64>> {
    let mut gamma = BTreeMap::new();
    for id in table.classes_up_to(table.max_level()) {
        let k = table.representative(id)?.multidegree(table.d())?;
        let mut v = Complex64::new(1.0, 0.0);
        for (i, &count) in k.iter().enumerate() {
            v *= lambda[i].powi(count as i32);
        }
        gamma.insert(id, v);
    }
    Ok(gamma)
}
