//! Automorphisms of the quotient induced by generator permutations: search,
//! the action on series and functionals, and second-quantization unitaries.

use std::sync::Arc;

use nalgebra::DMatrix;
use num::complex::Complex64;

use crate::algebra::Element;
use crate::congruence::{ClassId, ClassTable, NzClassId};
use crate::error::{Error, Result};
use crate::fock::{FockSpace, TruncatedOperator};
use crate::predual::Functional;
use crate::word::{unrank, words_at_level, Word};

/// A permutation of the generators 1..=d, acting on words letter by letter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GeneratorPermutation {
    /// map[i-1] is the image of generator i.
    map: Vec<u32>,
}

impl GeneratorPermutation {
    pub fn new(map: Vec<u32>) -> Result<Self> {
        let d = map.len() as u32;
        let mut seen = vec![false; map.len()];
        for &image in &map {
            if image < 1 || image > d {
                return Err(Error::LetterOutOfRange { letter: image, d });
            }
            if std::mem::replace(&mut seen[(image - 1) as usize], true) {
                return Err(Error::Invalid(format!("{map:?} is not a permutation")));
            }
        }
        Ok(GeneratorPermutation { map })
    }

    pub fn identity(d: u32) -> Self {
        GeneratorPermutation {
            map: (1..=d).collect(),
        }
    }

    pub fn d(&self) -> u32 {
        self.map.len() as u32
    }

    pub fn image(&self, letter: u32) -> u32 {
        self.map[(letter - 1) as usize]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.map
    }

    pub fn apply_letters(&self, letters: &[u32]) -> Vec<u32> {
        letters.iter().map(|&l| self.image(l)).collect()
    }

    pub fn apply_word(&self, word: &Word) -> Word {
        match word {
            Word::Zero => Word::Zero,
            Word::Letters(v) => Word::Letters(self.apply_letters(v)),
        }
    }

    /// self after other.
    pub fn compose(&self, other: &GeneratorPermutation) -> GeneratorPermutation {
        let map = other.map.iter().map(|&l| self.image(l)).collect();
        GeneratorPermutation { map }
    }

    pub fn inverse(&self) -> GeneratorPermutation {
        let mut map = vec![0u32; self.map.len()];
        for (i, &image) in self.map.iter().enumerate() {
            map[(image - 1) as usize] = i as u32 + 1;
        }
        GeneratorPermutation { map }
    }
}

fn all_permutations(d: u32) -> Vec<GeneratorPermutation> {
    let mut out = Vec::new();
    let mut current: Vec<u32> = (1..=d).collect();
    fn recurse(current: &mut Vec<u32>, k: usize, out: &mut Vec<GeneratorPermutation>) {
        if k == current.len() {
            out.push(GeneratorPermutation {
                map: current.clone(),
            });
            return;
        }
        for i in k..current.len() {
            current.swap(k, i);
            recurse(current, k + 1, out);
            current.swap(k, i);
        }
    }
    recurse(&mut current, 0, &mut out);
    out.sort();
    out
}

/// Default certification level: twice the longest generating word, at least
/// one level. Preservation at this depth, rechecked at the table truncation
/// by the caller's tests, certifies the finitely presented congruence.
pub fn default_check_level(table: &ClassTable) -> usize {
    (2 * table.presentation().max_generator_length())
        .max(1)
        .min(table.max_level())
}

/// All generator permutations whose letterwise action preserves the
/// congruence partition (classes onto classes, zeros onto zeros) on every
/// level up to `check_level`.
pub fn enumerate_automorphisms(
    table: &Arc<ClassTable>,
    check_level: usize,
) -> Result<Vec<GeneratorPermutation>> {
    let d = table.d();
    if check_level > table.max_level() {
        return Err(Error::LevelOverflow {
            requested: check_level,
            max: table.max_level(),
        });
    }
    // Level-one classes must be distinct and nonzero, otherwise generators do
    // not map to generators and the search over permutations is unsound.
    let mut level_one = std::collections::BTreeSet::new();
    for letter in 1..=d {
        match table.class_of(&Word::from_letters([letter]))? {
            ClassId::Zero => return Err(Error::DegenerateGenerators),
            ClassId::Nonzero(id) => {
                if !level_one.insert(id) {
                    return Err(Error::DegenerateGenerators);
                }
            }
        }
    }

    let mut survivors = Vec::new();
    'candidates: for sigma in all_permutations(d) {
        for n in 0..=check_level {
            let count = words_at_level(d, n);
            // The induced map must send the class of each word to the class
            // of its image, bijectively on nonzero classes, with zero flags
            // preserved in both directions.
            let mut class_map: std::collections::BTreeMap<NzClassId, NzClassId> =
                std::collections::BTreeMap::new();
            for r in 0..count {
                let letters = unrank(r, n, d);
                let source = table.class_of(&Word::Letters(letters.clone()))?;
                let target = table.class_of(&Word::Letters(sigma.apply_letters(&letters)))?;
                match (source, target) {
                    (ClassId::Zero, ClassId::Zero) => {}
                    (ClassId::Nonzero(sc), ClassId::Nonzero(tc)) => {
                        if *class_map.entry(sc).or_insert(tc) != tc {
                            continue 'candidates;
                        }
                    }
                    _ => continue 'candidates,
                }
            }
            // Injectivity on classes (sizes match because sigma permutes
            // words bijectively within a level).
            let images: std::collections::BTreeSet<_> = class_map.values().collect();
            if images.len() != class_map.len() {
                continue 'candidates;
            }
        }
        survivors.push(sigma);
    }
    Ok(survivors)
}

/// The dual action on series: relabels L_s by the image class of sigma
/// applied to a representative. Exact; degree preserving.
pub fn induced_automorphism(sigma: &GeneratorPermutation, e: &Element) -> Result<Element> {
    let table = e.table();
    let mut out = Element::zero(table);
    for (&s, c) in e.terms() {
        let rep = table.representative(s)?;
        match table.class_of(&sigma.apply_word(&rep))? {
            ClassId::Zero => {
                return Err(Error::Invalid(format!(
                    "permutation does not preserve the congruence: class {s} maps to zero"
                )))
            }
            ClassId::Nonzero(target) => out.add_term(target, c.clone()),
        }
    }
    Ok(out)
}

/// The image class of a single nonzero class under the permutation.
pub fn image_class(
    sigma: &GeneratorPermutation,
    table: &ClassTable,
    s: NzClassId,
) -> Result<ClassId> {
    let rep = table.representative(s)?;
    table.class_of(&sigma.apply_word(&rep))
}

/// The predual action: phi_s pulls back to phi over the preimage class.
/// Class sizes are preserved, so this is again a coefficient functional.
pub fn induced_predual_map(sigma: &GeneratorPermutation, f: &Functional) -> Result<Functional> {
    match f {
        Functional::Exact { table, terms } => {
            let inverse = sigma.inverse();
            let mut out = Functional::zero(table);
            for (&s, c) in terms {
                match image_class(&inverse, table, s)? {
                    ClassId::Zero => {
                        return Err(Error::Invalid(
                            "permutation does not preserve the congruence".into(),
                        ))
                    }
                    ClassId::Nonzero(target) => {
                        out = out.add(&Functional::coefficient(table, target).scale(c))?;
                    }
                }
            }
            Ok(out)
        }
        Functional::RankOne { .. } => Err(Error::RankOneFunctional),
    }
}

/// The permutation unitary on the truncated full Fock space, acting letter by
/// letter on basis words.
pub fn second_quantization(
    sigma: &GeneratorPermutation,
    space: &FockSpace,
) -> Result<TruncatedOperator> {
    if sigma.d() != space.d() {
        return Err(Error::DimensionMismatch {
            left: sigma.d() as usize,
            right: space.d() as usize,
        });
    }
    let dim = space.dim();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let word = space.word_at(col);
        let image = sigma.apply_letters(&word);
        m[(space.position(&image)?, col)] = Complex64::new(1.0, 0.0);
    }
    Ok(TruncatedOperator::with_shift(m, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::ClassTable;
    use crate::fock::{evaluate, full_shift, operator_norm, SemigroupSpace};
    use crate::hopf::{comultiply, TensorElement};
    use crate::predual::convolve;
    use crate::presentation::Presentation;
    use crate::scalar::rc_from_ratio;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        Word::Letters(s.chars().map(|c| c.to_digit(10).unwrap()).collect())
    }

    #[test]
    fn permutation_validation_and_group_ops() {
        assert!(GeneratorPermutation::new(vec![2, 1, 3]).is_ok());
        assert!(GeneratorPermutation::new(vec![1, 1]).is_err());
        assert!(GeneratorPermutation::new(vec![0, 1]).is_err());
        let sigma = GeneratorPermutation::new(vec![2, 3, 1]).unwrap();
        let tau = sigma.inverse();
        assert_eq!(sigma.compose(&tau), GeneratorPermutation::identity(3));
        assert_eq!(tau.compose(&sigma), GeneratorPermutation::identity(3));
    }

    #[test]
    fn commutator_admits_the_full_symmetric_group() {
        let t = ClassTable::close(&Presentation::commutator(3), 5).unwrap();
        let autos = enumerate_automorphisms(&t, 4).unwrap();
        assert_eq!(autos.len(), 6);
        // Closure under composition and inverses.
        for a in &autos {
            assert!(autos.contains(&a.inverse()));
            for b in &autos {
                assert!(autos.contains(&a.compose(b)));
            }
        }
        // Recheck preservation at the full truncation level.
        assert_eq!(enumerate_automorphisms(&t, 5).unwrap(), autos);
    }

    #[test]
    fn one_sided_zero_breaks_the_swap() {
        let p = Presentation::with_zeros(2, vec![w("12")]).unwrap();
        let t = ClassTable::close(&p, 4).unwrap();
        let autos = enumerate_automorphisms(&t, 4).unwrap();
        assert_eq!(autos, vec![GeneratorPermutation::identity(2)]);
    }

    #[test]
    fn free_presentation_admits_all_permutations() {
        let t = ClassTable::close(&Presentation::trivial(2), 3).unwrap();
        let autos = enumerate_automorphisms(&t, 2).unwrap();
        assert_eq!(autos.len(), 2);
    }

    #[test]
    fn degenerate_generators_are_rejected() {
        let p = Presentation::with_zeros(2, vec![w("1")]).unwrap();
        let t = ClassTable::close(&p, 2).unwrap();
        assert!(matches!(
            enumerate_automorphisms(&t, 2),
            Err(Error::DegenerateGenerators)
        ));
        let p = Presentation::new(2, vec![(w("1"), w("2"))], vec![]).unwrap();
        let t = ClassTable::close(&p, 2).unwrap();
        assert!(matches!(
            enumerate_automorphisms(&t, 2),
            Err(Error::DegenerateGenerators)
        ));
    }

    #[test]
    fn induced_map_is_an_algebra_and_coalgebra_morphism() {
        let t = ClassTable::close(&Presentation::commutator(3), 4).unwrap();
        let autos = enumerate_automorphisms(&t, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        let classes = t.classes_up_to(2);
        for sigma in &autos {
            for _ in 0..5 {
                let mut a = Element::zero(&t);
                let mut b = Element::zero(&t);
                for _ in 0..3 {
                    a.add_term(
                        classes[rng.gen_range(0..classes.len())],
                        rc_from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9) as i64),
                    );
                    b.add_term(
                        classes[rng.gen_range(0..classes.len())],
                        rc_from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9) as i64),
                    );
                }
                // Multiplicative.
                let lhs = induced_automorphism(sigma, &a.product(&b).unwrap()).unwrap();
                let rhs = induced_automorphism(sigma, &a)
                    .unwrap()
                    .product(&induced_automorphism(sigma, &b).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);

                // Compatible with the comultiplication: relabeling the
                // diagonal tensor matches the tensor of relabelings.
                let delta_then_theta = {
                    let mut out = TensorElement::zero(&t);
                    for (&(s, u), c) in comultiply(&a).terms() {
                        let is = match image_class(sigma, &t, s).unwrap() {
                            ClassId::Nonzero(x) => x,
                            ClassId::Zero => panic!("zero image"),
                        };
                        let iu = match image_class(sigma, &t, u).unwrap() {
                            ClassId::Nonzero(x) => x,
                            ClassId::Zero => panic!("zero image"),
                        };
                        out.add_term((is, iu), c.clone());
                    }
                    out
                };
                let theta_then_delta = comultiply(&induced_automorphism(sigma, &a).unwrap());
                assert_eq!(delta_then_theta, theta_then_delta);
            }
        }
    }

    #[test]
    fn identity_permutation_acts_trivially() {
        let t = ClassTable::close(&Presentation::commutator(2), 3).unwrap();
        let e = Element::from_word(&t, &w("12")).unwrap();
        let id = GeneratorPermutation::identity(2);
        assert_eq!(induced_automorphism(&id, &e).unwrap(), e);
    }

    #[test]
    fn norms_are_preserved_under_relabeling() {
        let t = ClassTable::close(&Presentation::commutator(3), 4).unwrap();
        let space = SemigroupSpace::new(&t, 4).unwrap();
        let autos = enumerate_automorphisms(&t, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        let classes = t.classes_up_to(2);
        for sigma in &autos {
            for _ in 0..3 {
                let mut e = Element::zero(&t);
                for _ in 0..4 {
                    e.add_term(
                        classes[rng.gen_range(0..classes.len())],
                        rc_from_ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9) as i64),
                    );
                }
                let before = operator_norm(&evaluate(&e, &space).unwrap()).unwrap();
                let after = operator_norm(
                    &evaluate(&induced_automorphism(sigma, &e).unwrap(), &space).unwrap(),
                )
                .unwrap();
                assert!((before - after).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn second_quantization_conjugates_shifts_exactly() {
        let space = FockSpace::new(2, 4);
        let swap = GeneratorPermutation::new(vec![2, 1]).unwrap();
        let u = second_quantization(&swap, &space).unwrap();

        // Permutation unitary: U* U = I exactly.
        let gram = u.matrix.adjoint() * &u.matrix;
        assert_eq!(
            gram,
            DMatrix::<Complex64>::identity(space.dim(), space.dim())
        );

        // U xi_12 = xi_21.
        let from = space.position(&[1, 2]).unwrap();
        let to = space.position(&[2, 1]).unwrap();
        assert_eq!(u.matrix[(to, from)], Complex64::new(1.0, 0.0));

        // Conjugation identity, exact entrywise.
        for word in [w("1"), w("2"), w("12"), w("121")] {
            let lhs = &u.matrix * &full_shift(&space, &word).unwrap().matrix * u.matrix.adjoint();
            let rhs = full_shift(&space, &swap.apply_word(&word)).unwrap().matrix;
            assert_eq!(lhs, rhs, "conjugation failed for {word}");
        }
    }

    #[test]
    fn predual_action_is_a_convolution_morphism() {
        let t = ClassTable::close(&Presentation::commutator(3), 4).unwrap();
        let autos = enumerate_automorphisms(&t, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        let classes = t.classes_up_to(2);
        for sigma in &autos {
            for _ in 0..4 {
                let mut f = Functional::zero(&t);
                let mut g = Functional::zero(&t);
                for _ in 0..3 {
                    f = f
                        .add(
                            &Functional::coefficient(&t, classes[rng.gen_range(0..classes.len())])
                                .scale(&rc_from_ratio(
                                    rng.gen_range(-9..=9),
                                    rng.gen_range(1..=9) as i64,
                                )),
                        )
                        .unwrap();
                    g = g
                        .add(
                            &Functional::coefficient(&t, classes[rng.gen_range(0..classes.len())])
                                .scale(&rc_from_ratio(
                                    rng.gen_range(-9..=9),
                                    rng.gen_range(1..=9) as i64,
                                )),
                        )
                        .unwrap();
                }
                let lhs = induced_predual_map(sigma, &convolve(&f, &g).unwrap()).unwrap();
                let rhs = convolve(
                    &induced_predual_map(sigma, &f).unwrap(),
                    &induced_predual_map(sigma, &g).unwrap(),
                )
                .unwrap();
                assert_eq!(lhs.exact_terms().unwrap(), rhs.exact_terms().unwrap());
            }
        }
    }
}
