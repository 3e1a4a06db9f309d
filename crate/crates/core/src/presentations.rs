//! Finitely presented groups: abelianization, Tietze simplification and
//! the three-valued free-group verdict used for sector checks.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{parse_err, Error, Result};
use crate::freewords::{Letter, Word};
use crate::nielsen::FiniteAbelianGroup;
use crate::smith::{smith_normal_form, IntegerMatrix};

pub const DEFAULT_TIETZE_BUDGET: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    generator_count: usize,
    relators: Vec<Word>,
    display_names: Option<Vec<String>>,
}

impl GroupPresentation {
    /// Relators are cyclically reduced on the way in.
    pub fn new(generator_count: usize, relators: Vec<Word>) -> Result<Self> {
        let mut rels = Vec::with_capacity(relators.len());
        for r in relators {
            if r.rank() != generator_count {
                return Err(Error::RankMismatch {
                    expected: generator_count,
                    found: r.rank(),
                });
            }
            rels.push(r.cyclic_reduce());
        }
        Ok(GroupPresentation {
            generator_count,
            relators: rels,
            display_names: None,
        })
    }

    pub fn free(rank: usize) -> Self {
        GroupPresentation {
            generator_count: rank,
            relators: Vec::new(),
            display_names: None,
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.generator_count);
        self.display_names = Some(names);
        self
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn display_names(&self) -> Option<&[String]> {
        self.display_names.as_deref()
    }

    /// Rows are relators, columns generators.
    pub fn exponent_matrix(&self) -> IntegerMatrix {
        let rows: Vec<Vec<i64>> = self
            .relators
            .iter()
            .map(|r| (1..=self.generator_count).map(|k| r.exponent_sum(k)).collect())
            .collect();
        IntegerMatrix::from_rows(self.generator_count, &rows)
    }

    /// `gens <n>` followed by one relator per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("gens {}\n", self.generator_count);
        for r in &self.relators {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, head) = lines.next().ok_or_else(|| parse_err(1, "missing `gens <n>` header"))?;
        let n: usize = head
            .strip_prefix("gens ")
            .and_then(|x| x.trim().parse().ok())
            .ok_or_else(|| parse_err(ln, "expected `gens <n>`"))?;
        let mut relators = Vec::new();
        for (ln, l) in lines {
            relators.push(Word::parse(l, n).map_err(|m| parse_err(ln, m))?);
        }
        GroupPresentation::new(n, relators)
    }

    pub fn display_word(&self, w: &Word) -> String {
        match &self.display_names {
            None => w.to_string(),
            Some(names) if !w.is_empty() => w
                .letters()
                .iter()
                .map(|l| {
                    let n = &names[l.index() - 1];
                    if l.is_positive() {
                        n.clone()
                    } else {
                        format!("{n}^-1")
                    }
                })
                .collect::<Vec<_>>()
                .join(" "),
            Some(_) => "1".into(),
        }
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (1..=self.generator_count)
            .map(|k| match &self.display_names {
                Some(n) => n[k - 1].clone(),
                None => format!("g{k}"),
            })
            .collect();
        let rels: Vec<String> = self.relators.iter().map(|r| self.display_word(r)).collect();
        write!(f, "< {} | {} >", gens.join(", "), rels.join(", "))
    }
}

/// A finitely generated abelian group `Z^free_rank + Z/t1 + ... + Z/tk`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    pub fn free(rank: usize) -> Self {
        AbelianInvariants {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion.iter().map(|t| t.to_u64().expect("torsion coefficient exceeds u64")).collect()
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_free_of_rank(&self, k: usize) -> bool {
        self.free_rank == k && self.torsion.is_empty()
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.torsion.iter().map(|x| x.to_string()).collect();
        write!(f, "free_rank {} torsion [{}]", self.free_rank, t.join(", "))
    }
}

pub fn abelianization(p: &GroupPresentation) -> AbelianInvariants {
    let snf = smith_normal_form(&p.exponent_matrix());
    AbelianInvariants {
        free_rank: p.generator_count - snf.rank,
        torsion: snf.invariant_factors,
    }
}

/// One Tietze move. Generator numbers refer to the numbering in force
/// before the final compaction, which is the input numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TietzeStep {
    DropEmpty,
    Deduplicate { relator: Word },
    Eliminate { generator: usize, value: Word },
    Substitute { generator: usize, image: Word },
}

impl fmt::Display for TietzeStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TietzeStep::DropEmpty => write!(f, "drop empty relator"),
            TietzeStep::Deduplicate { relator } => write!(f, "drop duplicate relator {relator}"),
            TietzeStep::Eliminate { generator, value } => {
                write!(f, "eliminate g{generator} = {value}")
            }
            TietzeStep::Substitute { generator, image } => {
                write!(f, "change generator g{generator} -> {image}")
            }
        }
    }
}

/// Output of [`tietze_simplify`]. Besides the simplified presentation it
/// records how to translate words between the old and new generators.
#[derive(Clone, Debug)]
pub struct Simplification {
    pub presentation: GroupPresentation,
    pub trace: Vec<TietzeStep>,
    /// Image of each input generator as a word in the output generators.
    pub original_in_current: Vec<Word>,
    /// Each output generator as a word in the input generators.
    pub current_in_original: Vec<Word>,
    pub exhausted: bool,
}

impl Simplification {
    /// Rewrites a word in the input generators into the output generators.
    pub fn rewrite(&self, w: &Word) -> Word {
        w.substitute(&self.original_in_current, self.presentation.generator_count())
    }

    /// Expresses a word in the output generators in the input generators.
    pub fn lift(&self, w: &Word) -> Word {
        let n = self.original_in_current.len();
        w.substitute(&self.current_in_original, n)
    }
}

struct TietzeWork {
    n: usize,
    alive: Vec<bool>,
    relators: Vec<Word>,
    orig_in_cur: Vec<Word>,
    cur_in_orig: Vec<Word>,
    trace: Vec<TietzeStep>,
}

impl TietzeWork {
    fn substitute_everywhere(&mut self, gen: usize, image: &Word) {
        let n = self.n;
        let images: Vec<Word> = (1..=n)
            .map(|k| {
                if k == gen {
                    image.clone()
                } else {
                    Word::letter(n, Letter::pos(k))
                }
            })
            .collect();
        for r in self.relators.iter_mut() {
            *r = r.substitute(&images, n).cyclic_reduce();
        }
        for w in self.orig_in_cur.iter_mut() {
            *w = w.substitute(&images, n);
        }
    }

    fn drop_empty(&mut self) -> bool {
        if let Some(i) = self.relators.iter().position(|r| r.is_empty()) {
            self.relators.remove(i);
            self.trace.push(TietzeStep::DropEmpty);
            return true;
        }
        false
    }

    fn deduplicate(&mut self) -> bool {
        let mut seen = HashSet::new();
        for i in 0..self.relators.len() {
            if !seen.insert(self.relators[i].cyclic_canonical()) {
                let r = self.relators.remove(i);
                self.trace.push(TietzeStep::Deduplicate { relator: r });
                return true;
            }
        }
        false
    }

    /// Shortest relator first; within it, the highest generator that
    /// occurs exactly once.
    fn eliminate(&mut self) -> bool {
        let mut order: Vec<usize> = (0..self.relators.len()).collect();
        order.sort_by_key(|&i| self.relators[i].len());
        for ri in order {
            let r = &self.relators[ri];
            let candidate = (1..=self.n)
                .rev()
                .find(|&k| self.alive[k - 1] && r.occurrences(k) == 1);
            let Some(x) = candidate else { continue };
            let pos = r.letters().iter().position(|l| l.index() == x).unwrap();
            let rotated = r.rotate(pos);
            let head = rotated.letters()[0];
            let rest = Word::new(self.n, rotated.letters()[1..].to_vec()).unwrap();
            let value = if head.is_positive() { rest.invert() } else { rest };
            self.relators.remove(ri);
            self.substitute_everywhere(x, &value);
            self.alive[x - 1] = false;
            self.trace.push(TietzeStep::Eliminate { generator: x, value });
            return true;
        }
        false
    }

    fn total_length(rels: &[Word]) -> usize {
        rels.iter().map(|r| r.len()).sum()
    }

    /// Whitehead-style change of a single generator `x -> L x R` with
    /// `L`, `R` powers of one other generator, accepted only when it
    /// strictly shortens the relators.
    fn nielsen_reduce(&mut self) -> bool {
        let n = self.n;
        let current = Self::total_length(&self.relators);
        let used: Vec<usize> = (1..=n)
            .filter(|&k| self.alive[k - 1] && self.relators.iter().any(|r| r.occurrences(k) > 0))
            .collect();
        for &i in &used {
            for &j in &used {
                if i == j {
                    continue;
                }
                let xi = Letter::pos(i);
                let yj = Letter::pos(j);
                let variants: [(Vec<Letter>, Vec<Letter>); 6] = [
                    (vec![], vec![yj]),
                    (vec![], vec![yj.inverse()]),
                    (vec![yj], vec![]),
                    (vec![yj.inverse()], vec![]),
                    (vec![yj.inverse()], vec![yj]),
                    (vec![yj], vec![yj.inverse()]),
                ];
                for (left, right) in variants {
                    let mut letters = left.clone();
                    letters.push(xi);
                    letters.extend_from_slice(&right);
                    let image = Word::new(n, letters).unwrap();
                    let images: Vec<Word> = (1..=n)
                        .map(|k| if k == i { image.clone() } else { Word::letter(n, Letter::pos(k)) })
                        .collect();
                    let trial: Vec<Word> = self
                        .relators
                        .iter()
                        .map(|r| r.substitute(&images, n).cyclic_reduce())
                        .collect();
                    if Self::total_length(&trial) < current {
                        // old x = L x' R, so x' = L^-1 x R^-1 in the input generators.
                        let orig = |ls: &[Letter]| -> Word {
                            Word::new(n, ls.to_vec()).unwrap().substitute(&self.cur_in_orig_full(), n)
                        };
                        let new_xi = orig(&left)
                            .invert()
                            .concat(&self.cur_in_orig[i - 1])
                            .concat(&orig(&right).invert());
                        self.relators = trial;
                        for w in self.orig_in_cur.iter_mut() {
                            *w = w.substitute(&images, n);
                        }
                        self.cur_in_orig[i - 1] = new_xi;
                        self.trace.push(TietzeStep::Substitute { generator: i, image });
                        return true;
                    }
                }
            }
        }
        false
    }

    fn cur_in_orig_full(&self) -> Vec<Word> {
        self.cur_in_orig.clone()
    }
}

/// Simplifies `p` by free and cyclic reduction, dropping empty and
/// duplicate relators (up to rotation and inversion), eliminating a
/// generator that occurs exactly once in some relator, and, when nothing
/// else applies, a length-reducing generator change `x -> L x R`.
///
/// Each move costs one step; the best presentation reached is returned
/// when the budget runs out. The abelianization is asserted unchanged.
pub fn tietze_simplify(p: &GroupPresentation, budget: usize) -> Simplification {
    let n = p.generator_count();
    let ident: Vec<Word> = (1..=n).map(|k| Word::letter(n, Letter::pos(k))).collect();
    let mut work = TietzeWork {
        n,
        alive: vec![true; n],
        relators: p.relators().iter().map(|r| r.cyclic_reduce()).collect(),
        orig_in_cur: ident.clone(),
        cur_in_orig: ident,
        trace: Vec::new(),
    };
    let mut exhausted = false;
    loop {
        if work.trace.len() >= budget {
            exhausted = true;
            break;
        }
        if work.drop_empty() || work.deduplicate() || work.eliminate() || work.nielsen_reduce() {
            continue;
        }
        break;
    }

    // Compact the surviving generators to 1..m.
    let survivors: Vec<usize> = (1..=n).filter(|&k| work.alive[k - 1]).collect();
    let m = survivors.len();
    let mut map: Vec<Option<Letter>> = vec![None; n];
    for (new, &old) in survivors.iter().enumerate() {
        map[old - 1] = Some(Letter::pos(new + 1));
    }
    let relators: Vec<Word> = work.relators.iter().map(|r| r.relabel(&map, m)).collect();
    let original_in_current = work.orig_in_cur.iter().map(|w| w.relabel(&map, m)).collect();
    let current_in_original = survivors.iter().map(|&k| work.cur_in_orig[k - 1].clone()).collect();
    let mut presentation = GroupPresentation::new(m, relators).expect("ranks are consistent");
    if let Some(names) = p.display_names() {
        presentation = presentation.with_names(survivors.iter().map(|&k| names[k - 1].clone()).collect());
    }
    assert_eq!(
        abelianization(p),
        abelianization(&presentation),
        "Tietze moves changed the abelianization"
    );
    Simplification {
        presentation,
        trace: work.trace,
        original_in_current,
        current_in_original,
        exhausted,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectorStatus {
    Verified(usize),
    RefutedByHomology,
    Unknown,
}

impl fmt::Display for SectorStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectorStatus::Verified(k) => write!(f, "Verified({k})"),
            SectorStatus::RefutedByHomology => write!(f, "RefutedByHomology"),
            SectorStatus::Unknown => write!(f, "Unknown"),
        }
    }
}

/// Answer to "is this group free of rank k", with the evidence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorVerdict {
    status: SectorStatus,
    pub abelian: AbelianInvariants,
    pub trace: Vec<TietzeStep>,
}

impl SectorVerdict {
    /// Panics if `Verified(k)` contradicts the abelian invariants.
    pub fn new(status: SectorStatus, abelian: AbelianInvariants, trace: Vec<TietzeStep>) -> Self {
        if let SectorStatus::Verified(k) = status {
            assert!(
                abelian.is_free_of_rank(k),
                "Verified({k}) contradicts abelian invariants {abelian}"
            );
        }
        SectorVerdict {
            status,
            abelian,
            trace,
        }
    }

    pub fn status(&self) -> &SectorStatus {
        &self.status
    }

    pub fn is_verified(&self) -> bool {
        matches!(self.status, SectorStatus::Verified(_))
    }
}

pub fn verify_free_of_rank(p: &GroupPresentation, k: usize, budget: usize) -> SectorVerdict {
    let abelian = abelianization(p);
    if !abelian.is_free_of_rank(k) {
        return SectorVerdict::new(SectorStatus::RefutedByHomology, abelian, Vec::new());
    }
    let s = tietze_simplify(p, budget);
    let status = if s.presentation.relators().is_empty() && s.presentation.generator_count() == k {
        SectorStatus::Verified(k)
    } else {
        SectorStatus::Unknown
    };
    SectorVerdict::new(status, abelian, s.trace)
}

/// A homomorphism onto `targets[target]`, given by generator images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surjection {
    pub target: usize,
    pub images: Vec<Vec<u64>>,
}

impl Surjection {
    pub fn map_word(&self, group: &FiniteAbelianGroup, w: &Word) -> Vec<u64> {
        let mut acc = group.zero();
        for l in w.letters() {
            let img = &self.images[l.index() - 1];
            acc = if l.is_positive() {
                group.add(&acc, img)
            } else {
                group.sub(&acc, img)
            };
        }
        acc
    }
}

/// Brute-force enumeration of surjections onto each target, in
/// lexicographic order of the generator images.
pub fn enumerate_finite_abelian_quotients(
    p: &GroupPresentation,
    targets: &[FiniteAbelianGroup],
    max_order: u64,
) -> Result<Vec<Surjection>> {
    let mut out = Vec::new();
    for (ti, g) in targets.iter().enumerate() {
        if g.order() > max_order {
            return Err(Error::BoundExceeded {
                size: g.order() as u128,
                bound: max_order as u128,
            });
        }
        out.extend(surjections_onto(p, g, usize::MAX).into_iter().map(|images| Surjection {
            target: ti,
            images,
        }));
    }
    Ok(out)
}

/// Generator images of all surjections `p -> g`, stopping after `limit`.
pub(crate) fn surjections_onto(p: &GroupPresentation, g: &FiniteAbelianGroup, limit: usize) -> Vec<Vec<Vec<u64>>> {
    let n = p.generator_count();
    let order = g.order() as usize;
    let exps: Vec<Vec<i64>> = p
        .relators()
        .iter()
        .map(|r| (1..=n).map(|k| r.exponent_sum(k)).collect())
        .collect();
    let elements: Vec<Vec<u64>> = (0..order).map(|i| g.element(i)).collect();
    let mut out = Vec::new();
    if n == 0 {
        if order == 1 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut idx = vec![0usize; n];
    loop {
        let images: Vec<&Vec<u64>> = idx.iter().map(|&i| &elements[i]).collect();
        let satisfies = exps.iter().all(|row| {
            let mut acc = g.zero();
            for (e, img) in row.iter().zip(&images) {
                if *e != 0 {
                    acc = g.add(&acc, &g.scale(img, *e));
                }
            }
            g.is_zero(&acc)
        });
        if satisfies {
            let owned: Vec<Vec<u64>> = images.into_iter().cloned().collect();
            if g.generates(&owned) {
                out.push(owned);
                if out.len() >= limit {
                    return out;
                }
            }
        }
        // odometer, last generator fastest
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < order {
                break;
            }
            idx[pos] = 0;
        }
    }
}
