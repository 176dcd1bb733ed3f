//! Level-by-level closure of a homogeneous congruence: the graded quotient
//! semigroup, its classes, sizes, zero detection, and class multiplication.
//!
//! Homogeneity makes each level self-contained: relation rewrites preserve
//! length and the absorbing zero is terminal, so a chain joining two words of
//! length n never leaves length n, and zero-ness of a word only depends on
//! words of its own length or shorter. `close` exploits this with one
//! union-find pass per level; `oracle_close` deliberately does not, saturating
//! pair sets to a global fixed point instead, and exists purely as an
//! independent correctness check.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{BigRational, BigUint, One};

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::word::{contains_factor, rank, unrank, words_at_level, Word};

/// Per-level word budget used by `close` unless overridden.
pub const DEFAULT_MAX_WORDS_PER_LEVEL: u64 = 1 << 20;

/// Per-level word budget for the naive oracle.
pub const ORACLE_MAX_WORDS_PER_LEVEL: u64 = 4096;

/// Identifier of a nonzero congruence class: truncation level plus the rank
/// of the class within its level (classes are ordered by canonical
/// representative, so ids are stable across runs).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NzClassId {
    pub level: u32,
    pub index: u32,
}

/// A class of the quotient semigroup: either the absorbing zero class or a
/// nonzero class addressed by [`NzClassId`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassId {
    Zero,
    Nonzero(NzClassId),
}

impl ClassId {
    pub fn nonzero(level: u32, index: u32) -> Self {
        ClassId::Nonzero(NzClassId { level, index })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ClassId::Zero)
    }
}

impl fmt::Display for NzClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ClassData {
    /// Member word ranks, ascending; the first is the canonical (lex-least)
    /// representative.
    members: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Level {
    /// Map word rank -> nonzero class index, or None for the zero class.
    class_of_word: Vec<Option<u32>>,
    classes: Vec<ClassData>,
}

/// The graded quotient semigroup of a presentation, truncated at a level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTable {
    presentation: Presentation,
    max_level: usize,
    levels: Vec<Level>,
}

fn partition_level(
    presentation: &Presentation,
    n: usize,
    zero_below: &[Vec<bool>],
    limit: u64,
) -> Result<Level> {
    let d = presentation.d();
    let count = words_at_level(d, n);
    if count > limit {
        return Err(Error::ResourceLimit {
            words: count,
            level: n,
            limit,
        });
    }
    let count = count as usize;

    // Union-find over the d^n words of length n.
    let mut parent: Vec<u32> = (0..count as u32).collect();
    fn root(parent: &mut [u32], mut i: u32) -> u32 {
        while parent[i as usize] != i {
            parent[i as usize] = parent[parent[i as usize] as usize];
            i = parent[i as usize];
        }
        i
    }
    let union = |parent: &mut [u32], a: u32, b: u32| {
        let (ra, rb) = (root(parent, a), root(parent, b));
        if ra != rb {
            // Attach the larger root under the smaller so roots stay lex-least.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent[hi as usize] = lo;
        }
    };

    // Apply every generating relation in every two-sided context of total
    // length n.
    for (u, v) in presentation.relations() {
        let lu = u.len().expect("relation words are nonzero");
        if lu > n {
            continue;
        }
        let (u, v) = (u.letters()?, v.letters()?);
        let free = n - lu;
        for left_len in 0..=free {
            let right_len = free - left_len;
            for lrank in 0..words_at_level(d, left_len) {
                let left = unrank(lrank, left_len, d);
                for rrank in 0..words_at_level(d, right_len) {
                    let right = unrank(rrank, right_len, d);
                    let mut wu = Vec::with_capacity(n);
                    wu.extend_from_slice(&left);
                    wu.extend_from_slice(u);
                    wu.extend_from_slice(&right);
                    let mut wv = Vec::with_capacity(n);
                    wv.extend_from_slice(&left);
                    wv.extend_from_slice(v);
                    wv.extend_from_slice(&right);
                    union(&mut parent, rank(&wu, d) as u32, rank(&wv, d) as u32);
                }
            }
        }
    }

    // Flag words forced to zero: those containing a declared zero word, or
    // any proper factor already known to lie in a zero class at a lower
    // level. The factor check is subsumed by relation rewriting in context
    // but costs little and keeps zero propagation an explicit fixed point
    // over levels.
    let declared: Vec<&[u32]> = presentation
        .zeros()
        .iter()
        .map(|z| z.letters().expect("zero words are letter words"))
        .collect();
    let mut flagged = vec![false; count];
    for r in 0..count as u64 {
        let letters = unrank(r, n, d);
        let mut hit = declared.iter().any(|z| contains_factor(&letters, z));
        if !hit {
            'scan: for m in 1..n {
                for start in 0..=(n - m) {
                    if zero_below[m][rank(&letters[start..start + m], d) as usize] {
                        hit = true;
                        break 'scan;
                    }
                }
            }
        }
        flagged[r as usize] = hit;
    }

    // A class containing a flagged word is entirely zero.
    let mut root_flagged = vec![false; count];
    for r in 0..count as u32 {
        if flagged[r as usize] {
            let rt = root(&mut parent, r);
            root_flagged[rt as usize] = true;
        }
    }

    // Freeze classes: group nonzero words by root, order by lex-least member.
    let mut members_of_root: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    for r in 0..count as u32 {
        let rt = root(&mut parent, r);
        if !root_flagged[rt as usize] {
            members_of_root.entry(rt).or_default().push(r as u64);
        }
    }
    let mut classes: Vec<ClassData> = members_of_root
        .into_values()
        .map(|members| ClassData { members })
        .collect();
    classes.sort_by_key(|c| c.members[0]);

    let mut class_of_word = vec![None; count];
    for (idx, class) in classes.iter().enumerate() {
        for &m in &class.members {
            class_of_word[m as usize] = Some(idx as u32);
        }
    }
    Ok(Level {
        class_of_word,
        classes,
    })
}

impl ClassTable {
    /// Computes the congruence generated by the presentation, restricted to
    /// words of length <= `max_level`.
    pub fn close(presentation: &Presentation, max_level: usize) -> Result<Arc<ClassTable>> {
        ClassTable::close_with_limit(presentation, max_level, DEFAULT_MAX_WORDS_PER_LEVEL)
    }

    pub fn close_with_limit(
        presentation: &Presentation,
        max_level: usize,
        limit: u64,
    ) -> Result<Arc<ClassTable>> {
        let mut levels: Vec<Level> = Vec::with_capacity(max_level + 1);
        let mut zero_below: Vec<Vec<bool>> = Vec::with_capacity(max_level + 1);
        for n in 0..=max_level {
            let level = partition_level(presentation, n, &zero_below, limit)?;
            zero_below.push(level.class_of_word.iter().map(|c| c.is_none()).collect());
            levels.push(level);
        }
        Ok(Arc::new(ClassTable {
            presentation: presentation.clone(),
            max_level,
            levels,
        }))
    }

    /// Same contract as `close`, computed by naive saturation over explicit
    /// word-pair sets, iterated to a global fixed point across levels.
    /// Independent oracle: no union-find, no level-locality shortcuts.
    #[allow(clippy::needless_range_loop)] // index symmetry mirrors the relation axioms
    pub fn oracle_close(presentation: &Presentation, max_level: usize) -> Result<Arc<ClassTable>> {
        let d = presentation.d();
        for n in 0..=max_level {
            let count = words_at_level(d, n);
            if count > ORACLE_MAX_WORDS_PER_LEVEL {
                return Err(Error::ResourceLimit {
                    words: count,
                    level: n,
                    limit: ORACLE_MAX_WORDS_PER_LEVEL,
                });
            }
        }

        // related[n] is the full boolean relation on level-n words; zero[n]
        // flags words equivalent to the adjoined zero.
        let mut related: Vec<Vec<Vec<bool>>> = Vec::new();
        let mut zero: Vec<Vec<bool>> = Vec::new();
        for n in 0..=max_level {
            let count = words_at_level(d, n) as usize;
            let mut rel = vec![vec![false; count]; count];
            for (i, row) in rel.iter_mut().enumerate() {
                row[i] = true;
            }
            related.push(rel);
            zero.push(vec![false; count]);
        }

        loop {
            let mut changed = false;

            // Seed pairs: every generating relation in every context.
            for n in 0..=max_level {
                for (u, v) in presentation.relations() {
                    let lu = u.len()?;
                    if lu > n {
                        continue;
                    }
                    let (u, v) = (u.letters()?, v.letters()?);
                    let free = n - lu;
                    for left_len in 0..=free {
                        let right_len = free - left_len;
                        for lrank in 0..words_at_level(d, left_len) {
                            let left = unrank(lrank, left_len, d);
                            for rrank in 0..words_at_level(d, right_len) {
                                let right = unrank(rrank, right_len, d);
                                let mut wu = left.clone();
                                wu.extend_from_slice(u);
                                wu.extend_from_slice(&right);
                                let mut wv = left.clone();
                                wv.extend_from_slice(v);
                                wv.extend_from_slice(&right);
                                let (a, b) = (rank(&wu, d) as usize, rank(&wv, d) as usize);
                                if !related[n][a][b] {
                                    related[n][a][b] = true;
                                    related[n][b][a] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                }

                // Declared zero words in every context.
                let count = words_at_level(d, n) as usize;
                for r in 0..count {
                    if zero[n][r] {
                        continue;
                    }
                    let letters = unrank(r as u64, n, d);
                    let hit = presentation.zeros().iter().any(|z| {
                        z.letters()
                            .map(|zl| contains_factor(&letters, zl))
                            .unwrap_or(false)
                    });
                    if hit {
                        zero[n][r] = true;
                        changed = true;
                    }
                }
            }

            // Transitive closure, naive triple loop per level.
            for rel in related.iter_mut() {
                let count = rel.len();
                for mid in 0..count {
                    for a in 0..count {
                        if rel[a][mid] {
                            for b in 0..count {
                                if rel[mid][b] && !rel[a][b] {
                                    rel[a][b] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
            }

            // Zero absorption: relation into zero, and zero factors in any
            // two-sided context at higher levels.
            for n in 0..=max_level {
                let count = words_at_level(d, n) as usize;
                for a in 0..count {
                    if zero[n][a] {
                        continue;
                    }
                    if (0..count).any(|b| related[n][a][b] && zero[n][b]) {
                        zero[n][a] = true;
                        changed = true;
                    }
                }
            }
            for n in 0..=max_level {
                let count = words_at_level(d, n) as usize;
                for r in 0..count {
                    if zero[n][r] {
                        continue;
                    }
                    let letters = unrank(r as u64, n, d);
                    'outer: for m in 1..n {
                        for start in 0..=(n - m) {
                            let f = rank(&letters[start..start + m], d) as usize;
                            if zero[m][f] {
                                zero[n][r] = true;
                                changed = true;
                                break 'outer;
                            }
                        }
                    }
                }
            }

            if !changed {
                break;
            }
        }

        // Freeze the partition in the same id scheme as `close`.
        let mut levels = Vec::with_capacity(max_level + 1);
        for n in 0..=max_level {
            let count = words_at_level(d, n) as usize;
            let mut class_of_word = vec![None; count];
            let mut classes: Vec<ClassData> = Vec::new();
            for a in 0..count {
                if zero[n][a] || class_of_word[a].is_some() {
                    continue;
                }
                let members: Vec<u64> = (0..count)
                    .filter(|&b| related[n][a][b] && !zero[n][b])
                    .map(|b| b as u64)
                    .collect();
                let idx = classes.len() as u32;
                for &m in &members {
                    class_of_word[m as usize] = Some(idx);
                }
                classes.push(ClassData { members });
            }
            // Scanning words in rank order already yields classes ordered by
            // lex-least member.
            levels.push(Level {
                class_of_word,
                classes,
            });
        }
        Ok(Arc::new(ClassTable {
            presentation: presentation.clone(),
            max_level,
            levels,
        }))
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn d(&self) -> u32 {
        self.presentation.d()
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// Number of nonzero classes at a level.
    pub fn class_count_at(&self, level: usize) -> usize {
        self.levels.get(level).map(|l| l.classes.len()).unwrap_or(0)
    }

    /// Ids of all nonzero classes at a level.
    pub fn classes_at(&self, level: usize) -> impl Iterator<Item = NzClassId> + '_ {
        let count = self.class_count_at(level);
        (0..count).map(move |i| NzClassId {
            level: level as u32,
            index: i as u32,
        })
    }

    /// All nonzero classes with level <= `max`, ordered by (level, index).
    pub fn classes_up_to(&self, max: usize) -> Vec<NzClassId> {
        (0..=max.min(self.max_level))
            .flat_map(|n| self.classes_at(n))
            .collect()
    }

    pub fn identity_class(&self) -> NzClassId {
        NzClassId { level: 0, index: 0 }
    }

    fn class_data(&self, id: NzClassId) -> Result<&ClassData> {
        self.levels
            .get(id.level as usize)
            .and_then(|l| l.classes.get(id.index as usize))
            .ok_or_else(|| Error::UnknownClass(id.to_string()))
    }

    /// Class of a word. Errors if the word is longer than the truncation.
    pub fn class_of(&self, word: &Word) -> Result<ClassId> {
        let letters = match word {
            Word::Zero => return Ok(ClassId::Zero),
            Word::Letters(v) => v,
        };
        word.validate_letters(self.d())?;
        let n = letters.len();
        if n > self.max_level {
            return Err(Error::LevelOverflow {
                requested: n,
                max: self.max_level,
            });
        }
        let r = rank(letters, self.d()) as usize;
        Ok(match self.levels[n].class_of_word[r] {
            None => ClassId::Zero,
            Some(idx) => ClassId::nonzero(n as u32, idx),
        })
    }

    /// Canonical representative: the lexicographically least member.
    pub fn representative(&self, id: NzClassId) -> Result<Word> {
        let data = self.class_data(id)?;
        Ok(Word::Letters(unrank(
            data.members[0],
            id.level as usize,
            self.d(),
        )))
    }

    pub fn members(&self, id: NzClassId) -> Result<Vec<Word>> {
        let data = self.class_data(id)?;
        Ok(data
            .members
            .iter()
            .map(|&r| Word::Letters(unrank(r, id.level as usize, self.d())))
            .collect())
    }

    /// Member ranks within the level, ascending.
    pub fn member_ranks(&self, id: NzClassId) -> Result<&[u64]> {
        Ok(&self.class_data(id)?.members)
    }

    /// Exact class size `|[s]|`.
    pub fn class_size(&self, id: NzClassId) -> Result<u64> {
        Ok(self.class_data(id)?.members.len() as u64)
    }

    /// Class multiplication via canonical representatives. Independent of the
    /// representative choice because the relation is a congruence.
    pub fn multiply(&self, s: ClassId, t: ClassId) -> Result<ClassId> {
        let (s, t) = match (s, t) {
            (ClassId::Zero, _) | (_, ClassId::Zero) => return Ok(ClassId::Zero),
            (ClassId::Nonzero(s), ClassId::Nonzero(t)) => (s, t),
        };
        let total = s.level as usize + t.level as usize;
        if total > self.max_level {
            return Err(Error::LevelOverflow {
                requested: total,
                max: self.max_level,
            });
        }
        let product = self.representative(s)?.concat(&self.representative(t)?);
        self.class_of(&product)
    }

    /// True when the two tables describe the same quotient (same presentation
    /// and identical partitions on the shared levels).
    pub fn same_partition(&self, other: &ClassTable, up_to: usize) -> bool {
        if self.presentation != other.presentation {
            return false;
        }
        let n = up_to.min(self.max_level).min(other.max_level);
        (0..=n).all(|lvl| self.levels[lvl] == other.levels[lvl])
    }
}

/// One row of the Drury-Arveson size report: a class, its multidegree, the
/// multinomial it must equal, and the exact squared norm of the unnormalized
/// basis vector.
#[derive(Debug, Clone)]
pub struct AbelianizationRow {
    pub id: NzClassId,
    pub representative: Word,
    pub multidegree: Vec<u32>,
    pub class_size: u64,
    pub multinomial: BigUint,
    /// (x_s, x_s) = 1/|[s]| as an exact rational.
    pub inner_product: BigRational,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct AbelianizationReport {
    pub rows: Vec<AbelianizationRow>,
    pub all_ok: bool,
}

fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// Multinomial coefficient |k|! / (k_1! ... k_d!), exact.
pub fn multinomial(k: &[u32]) -> BigUint {
    let total: u64 = k.iter().map(|&x| x as u64).sum();
    let mut num = factorial(total);
    for &part in k {
        num /= factorial(part as u64);
    }
    num
}

/// For a table built from the commutator presentation, verifies that classes
/// are exactly the multidegree fibers and that every class size equals the
/// multinomial |k|!/k!. This is the finite shadow of the monomial inner
/// product on the Drury-Arveson space.
pub fn abelianization_check(table: &ClassTable) -> Result<AbelianizationReport> {
    let d = table.d();
    let mut rows = Vec::new();
    let mut all_ok = true;
    for n in 0..=table.max_level() {
        let mut seen: BTreeMap<Vec<u32>, NzClassId> = BTreeMap::new();
        for id in table.classes_at(n) {
            let rep = table.representative(id)?;
            let degree = rep.multidegree(d)?;
            // Every member must share the representative's multidegree, and
            // distinct classes must have distinct multidegrees; otherwise the
            // table does not come from the commutator congruence.
            for m in table.members(id)? {
                if m.multidegree(d)? != degree {
                    return Err(Error::NotCommutator(format!(
                        "class {id} mixes multidegrees ({m} vs {rep})"
                    )));
                }
            }
            if let Some(prev) = seen.insert(degree.clone(), id) {
                return Err(Error::NotCommutator(format!(
                    "classes {prev} and {id} share a multidegree"
                )));
            }
            let size = table.class_size(id)?;
            let expected = multinomial(&degree);
            let ok = BigUint::from(size) == expected;
            all_ok &= ok;
            rows.push(AbelianizationRow {
                id,
                representative: rep,
                multidegree: degree,
                class_size: size,
                multinomial: expected,
                inner_product: BigRational::new(1.into(), size.into()),
                ok,
            });
        }
        // No multidegree may be missing: with d generators there are
        // C(n+d-1, d-1) fibers at level n and zero classes cannot occur.
        if table.levels[n].class_of_word.iter().any(|c| c.is_none()) {
            return Err(Error::NotCommutator(format!("zero class at level {n}")));
        }
    }
    Ok(AbelianizationReport { rows, all_ok })
}
