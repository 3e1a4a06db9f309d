//! Cut systems on a central surface and the diagrams built from them.
//!
//! A curve is a word in the free group of rank `2G` (the once-punctured
//! genus-`G` surface); generator `2i-1` is `a_i`, generator `2i` is `b_i`.
//! A system's standardizer carries its curves to distinct basis letters,
//! so reading another curve against it is substitution plus deletion.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::freewords::{FreeAutomorphism, Letter, Word};
use crate::presentations::{
    abelianization, verify_free_of_rank, AbelianInvariants, GroupPresentation, SectorVerdict,
};
use crate::smith::{smith_normal_form, IntegerMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceModel {
    pub genus: usize,
}

impl SurfaceModel {
    pub fn new(genus: usize) -> Self {
        SurfaceModel { genus }
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    pub fn a(&self, i: usize) -> Letter {
        assert!(i >= 1 && i <= self.genus);
        Letter::pos(2 * i - 1)
    }

    pub fn b(&self, i: usize) -> Letter {
        assert!(i >= 1 && i <= self.genus);
        Letter::pos(2 * i)
    }

    /// The symplectic partner of a basis generator.
    pub fn partner(&self, index: usize) -> usize {
        if index % 2 == 1 {
            index + 1
        } else {
            index - 1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSystem {
    label: String,
    surface: SurfaceModel,
    curves: Vec<Word>,
    standardizer: Option<FreeAutomorphism>,
    /// Basis generator each curve standardizes to.
    standard: Option<Vec<usize>>,
}

impl CutSystem {
    pub fn new(
        surface: SurfaceModel,
        label: impl Into<String>,
        curves: Vec<Word>,
        standardizer: Option<FreeAutomorphism>,
    ) -> Result<Self> {
        let label = label.into();
        let bad = |reason: String| Error::InvalidCutSystem {
            label: label.clone(),
            reason,
        };
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(bad("label must be a single non-empty token".into()));
        }
        let g = surface.genus;
        if curves.len() != g {
            return Err(bad(format!("expected {g} curves, found {}", curves.len())));
        }
        for (j, c) in curves.iter().enumerate() {
            if c.rank() != surface.rank() {
                return Err(Error::RankMismatch {
                    expected: surface.rank(),
                    found: c.rank(),
                });
            }
            if c.is_empty() || !c.is_cyclically_reduced() {
                return Err(bad(format!("curve {} must be non-empty and cyclically reduced", j + 1)));
            }
        }
        let rows: Vec<Vec<i64>> = curves
            .iter()
            .map(|c| (1..=surface.rank()).map(|k| c.exponent_sum(k)).collect())
            .collect();
        let snf = smith_normal_form(&IntegerMatrix::from_rows(surface.rank(), &rows));
        if snf.rank != g || !snf.invariant_factors.is_empty() {
            return Err(bad("curve homology classes do not span a primitive rank-G sublattice".into()));
        }
        let standard = match &standardizer {
            None => None,
            Some(phi) => {
                if phi.rank() != surface.rank() {
                    return Err(Error::RankMismatch {
                        expected: surface.rank(),
                        found: phi.rank(),
                    });
                }
                let mut letters = Vec::with_capacity(g);
                for (j, c) in curves.iter().enumerate() {
                    let img = phi.apply(c)?.cyclic_reduce();
                    match img.letters() {
                        [l] if l.is_positive() && !letters.contains(&l.index()) => letters.push(l.index()),
                        _ => {
                            return Err(bad(format!(
                                "standardizer sends curve {} to {img}, not a fresh positive letter",
                                j + 1
                            )))
                        }
                    }
                }
                Some(letters)
            }
        };
        Ok(CutSystem {
            label,
            surface,
            curves,
            standardizer,
            standard,
        })
    }

    /// The system `{a_1, ..., a_G}` with identity standardizer.
    pub fn standard_alpha(surface: SurfaceModel, label: impl Into<String>) -> Self {
        let curves = (1..=surface.genus).map(|i| Word::letter(surface.rank(), surface.a(i))).collect();
        CutSystem::new(surface, label, curves, Some(FreeAutomorphism::identity(surface.rank())))
            .expect("the standard system is a cut system")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn surface(&self) -> SurfaceModel {
        self.surface
    }

    pub fn curves(&self) -> &[Word] {
        &self.curves
    }

    pub fn standardizer(&self) -> Option<&FreeAutomorphism> {
        self.standardizer.as_ref()
    }

    pub fn standard_letters(&self) -> Option<&[usize]> {
        self.standard.as_deref()
    }

    pub fn relabeled(&self, label: impl Into<String>) -> Self {
        let mut c = self.clone();
        c.label = label.into();
        c
    }

    /// Basis generators that survive deletion, in ascending order; the
    /// `k`-th one becomes dual generator `k`.
    pub fn dual_generators(&self) -> Option<Vec<usize>> {
        let std = self.standard.as_ref()?;
        Some((1..=self.surface.rank()).filter(|k| !std.contains(k)).collect())
    }
}

/// Reads `curve` against `system`: standardize, delete the standard
/// letters, rename the survivors to dual generators, cyclically reduce.
pub fn read_against(curve: &Word, system: &CutSystem) -> Result<Word> {
    let phi = system
        .standardizer()
        .ok_or_else(|| Error::MissingStandardizer(system.label().to_string()))?;
    let std = system.standard_letters().expect("standardizer implies standard letters");
    let surface = system.surface();
    let mut map: Vec<Option<Letter>> = vec![None; surface.rank()];
    let mut next = 1;
    for (k, slot) in map.iter_mut().enumerate() {
        if !std.contains(&(k + 1)) {
            *slot = Some(Letter::pos(next));
            next += 1;
        }
    }
    Ok(phi.apply(curve)?.relabel(&map, surface.genus).cyclic_reduce())
}

/// Sign convention for the mirror image of a Heegaard diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MirrorConvention {
    /// Curves are replaced by their inverse words.
    Inverse,
    /// Every letter is inverted in place, order kept.
    LetterInverse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeometricHeegaardDiagram {
    genus: usize,
    beta: CutSystem,
    name: String,
    lens: Option<(u64, u64)>,
}

impl GeometricHeegaardDiagram {
    pub fn new(
        genus: usize,
        beta_curves: Vec<Word>,
        standardizer: Option<FreeAutomorphism>,
        name: impl Into<String>,
    ) -> Result<Self> {
        let beta = CutSystem::new(SurfaceModel::new(genus), "beta", beta_curves, standardizer)?;
        Ok(GeometricHeegaardDiagram {
            genus,
            beta,
            name: name.into(),
            lens: None,
        })
    }

    pub fn with_lens(mut self, p: u64, q: u64) -> Self {
        self.lens = Some((p, q));
        self
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lens(&self) -> Option<(u64, u64)> {
        self.lens
    }

    pub fn surface(&self) -> SurfaceModel {
        SurfaceModel::new(self.genus)
    }

    pub fn beta(&self) -> &CutSystem {
        &self.beta
    }

    pub fn beta_curves(&self) -> &[Word] {
        self.beta.curves()
    }

    pub fn standardizer(&self) -> Option<&FreeAutomorphism> {
        self.beta.standardizer()
    }

    pub fn alpha(&self) -> CutSystem {
        CutSystem::standard_alpha(self.surface(), "alpha")
    }

    /// The relators `w_j`: the beta curves read against the standard alpha system.
    pub fn relators(&self) -> Vec<Word> {
        let alpha = self.alpha();
        self.beta_curves()
            .iter()
            .map(|c| read_against(c, &alpha).expect("alpha carries a standardizer"))
            .collect()
    }

    pub fn pi1(&self) -> GroupPresentation {
        GroupPresentation::new(self.genus, self.relators()).expect("readings have rank g")
    }

    pub fn homology(&self) -> AbelianInvariants {
        abelianization(&self.pi1())
    }
}

fn shift_word(w: &Word, by: usize, rank: usize) -> Word {
    let letters = w.letters().iter().map(|l| Letter::new(l.index() + by, l.is_positive())).collect();
    Word::new(rank, letters).expect("shift stays in range")
}

pub fn connected_sum(h1: &GeometricHeegaardDiagram, h2: &GeometricHeegaardDiagram) -> GeometricHeegaardDiagram {
    let genus = h1.genus + h2.genus;
    let rank = 2 * genus;
    let mut curves: Vec<Word> = h1.beta_curves().iter().map(|c| shift_word(c, 0, rank)).collect();
    curves.extend(h2.beta_curves().iter().map(|c| shift_word(c, 2 * h1.genus, rank)));
    let std = match (h1.standardizer(), h2.standardizer()) {
        (Some(a), Some(b)) => Some(a.block_sum(b)),
        _ => None,
    };
    let name = match (h1.genus, h2.genus) {
        (0, _) => h2.name.clone(),
        (_, 0) => h1.name.clone(),
        _ => format!("{}#{}", h1.name, h2.name),
    };
    GeometricHeegaardDiagram::new(genus, curves, std, name).expect("block sum of cut systems is a cut system")
}

pub fn mirror(h: &GeometricHeegaardDiagram) -> GeometricHeegaardDiagram {
    mirror_with(h, MirrorConvention::Inverse)
}

pub fn mirror_with(h: &GeometricHeegaardDiagram, convention: MirrorConvention) -> GeometricHeegaardDiagram {
    let rank = 2 * h.genus;
    let (curves, std): (Vec<Word>, Option<FreeAutomorphism>) = match convention {
        MirrorConvention::Inverse => {
            // phi(c) = s gives (eps . phi)(c^-1) = s with eps inverting the standard letters.
            let std = h.standardizer().map(|phi| {
                let eps = FreeAutomorphism::invert_letters(rank, h.beta.standard_letters().unwrap());
                eps.compose(phi).expect("same rank")
            });
            (h.beta_curves().iter().map(|c| c.invert()).collect(), std)
        }
        MirrorConvention::LetterInverse => {
            let all: Vec<usize> = (1..=rank).collect();
            let iota = FreeAutomorphism::invert_letters(rank, &all);
            let std = h.standardizer().map(|phi| phi.compose(&iota).expect("same rank"));
            (h.beta_curves().iter().map(|c| c.letter_inverse()).collect(), std)
        }
    };
    let name = match h.name.strip_prefix('-') {
        Some(n) => n.to_string(),
        None => format!("-{}", h.name),
    };
    let mut out = GeometricHeegaardDiagram::new(h.genus, curves, std, name).expect("mirror of a cut system");
    out.lens = h.lens;
    out
}

/// Adds a handle whose new curve is the new `b` letter, so the new dual
/// generator is killed.
pub fn stabilize(h: &GeometricHeegaardDiagram) -> GeometricHeegaardDiagram {
    let one = GeometricHeegaardDiagram::new(
        1,
        vec![Word::from_signed(2, &[2])],
        Some(FreeAutomorphism::identity(2)),
        "S3",
    )
    .expect("genus-1 sphere diagram");
    let mut out = connected_sum(h, &one);
    out.name = h.name.clone();
    out.lens = h.lens;
    out
}

/// Sector readings and claimed types over an ordered list of cut systems.
///
/// `readings[(i, j)]` holds the curves of system `j` read against system
/// `i` (1-based). For a bounded diagram the last pair `(s, 1)` is the
/// boundary Heegaard diagram rather than a sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultisectionDiagram {
    surface: SurfaceModel,
    systems: Vec<CutSystem>,
    closed: bool,
    types: Vec<usize>,
    readings: BTreeMap<(usize, usize), Vec<Word>>,
}

impl MultisectionDiagram {
    pub fn new(surface: SurfaceModel, systems: Vec<CutSystem>, closed: bool, types: Vec<usize>) -> Result<Self> {
        Self::with_readings(surface, systems, closed, types, BTreeMap::new())
    }

    /// Like [`MultisectionDiagram::new`], with precomputed readings. Given
    /// readings are checked against recomputation whenever the reading
    /// system has a standardizer.
    pub fn with_readings(
        surface: SurfaceModel,
        systems: Vec<CutSystem>,
        closed: bool,
        types: Vec<usize>,
        given: BTreeMap<(usize, usize), Vec<Word>>,
    ) -> Result<Self> {
        let s = systems.len();
        if s < 3 {
            return Err(Error::InvalidDiagram(format!("need at least 3 systems, found {s}")));
        }
        for sys in &systems {
            if sys.surface() != surface {
                return Err(Error::InvalidDiagram(format!(
                    "system `{}` lives on genus {}, diagram genus is {}",
                    sys.label(),
                    sys.surface().genus,
                    surface.genus
                )));
            }
        }
        let sectors = if closed { s } else { s - 1 };
        if types.len() != sectors {
            return Err(Error::InvalidDiagram(format!(
                "{} claimed types for {sectors} sectors",
                types.len()
            )));
        }
        let mut d = MultisectionDiagram {
            surface,
            systems,
            closed,
            types,
            readings: BTreeMap::new(),
        };
        for (&(i, j), words) in &given {
            if i == 0 || j == 0 || i > s || j > s || i == j {
                return Err(Error::InvalidIndex { index: i.max(j), max: s });
            }
            if words.len() != surface.genus || words.iter().any(|w| w.rank() != surface.genus) {
                return Err(Error::InvalidDiagram(format!("reading ({i}, {j}) has the wrong shape")));
            }
            if let Ok(fresh) = d.compute_reading(i, j) {
                if !fresh.iter().zip(words).all(|(a, b)| a.cyclic_eq(b)) {
                    return Err(Error::InvalidDiagram(format!(
                        "cached reading ({i}, {j}) disagrees with recomputation"
                    )));
                }
            }
        }
        d.readings = given;
        for key in d.default_keys() {
            if d.readings.contains_key(&key) {
                continue;
            }
            if let Ok(r) = d.compute_reading(key.0, key.1) {
                d.readings.insert(key, r);
            }
        }
        Ok(d)
    }

    fn default_keys(&self) -> Vec<(usize, usize)> {
        let s = self.systems.len();
        let mut keys: Vec<(usize, usize)> = (1..s).map(|i| (i, i + 1)).collect();
        keys.extend((3..=s).map(|j| (1, j)));
        keys
    }

    fn compute_reading(&self, i: usize, j: usize) -> Result<Vec<Word>> {
        let against = &self.systems[i - 1];
        self.systems[j - 1].curves().iter().map(|c| read_against(c, against)).collect()
    }

    pub fn surface(&self) -> SurfaceModel {
        self.surface
    }

    pub fn genus(&self) -> usize {
        self.surface.genus
    }

    pub fn systems(&self) -> &[CutSystem] {
        &self.systems
    }

    pub fn system_count(&self) -> usize {
        self.systems.len()
    }

    /// 1-based.
    pub fn system(&self, i: usize) -> Result<&CutSystem> {
        self.check_index(i)?;
        Ok(&self.systems[i - 1])
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn types(&self) -> &[usize] {
        &self.types
    }

    pub fn cached_readings(&self) -> &BTreeMap<(usize, usize), Vec<Word>> {
        &self.readings
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.systems.len() {
            return Err(Error::InvalidIndex {
                index: i,
                max: self.systems.len(),
            });
        }
        Ok(())
    }

    /// Curves of system `j` read against system `i`, from the cache or
    /// recomputed.
    pub fn reading(&self, i: usize, j: usize) -> Result<Vec<Word>> {
        self.check_index(i)?;
        self.check_index(j)?;
        if let Some(r) = self.readings.get(&(i, j)) {
            return Ok(r.clone());
        }
        self.compute_reading(i, j)
    }

    /// Sector interfaces in order: `(1,2), ..., (s-1,s)` and, when closed, `(s,1)`.
    pub fn sector_pairs(&self) -> Vec<(usize, usize)> {
        let s = self.systems.len();
        let mut pairs: Vec<(usize, usize)> = (1..s).map(|i| (i, i + 1)).collect();
        if self.closed {
            pairs.push((s, 1));
        }
        pairs
    }

    pub fn boundary_pair(&self) -> Option<(usize, usize)> {
        (!self.closed).then_some((self.systems.len(), 1))
    }

    /// Presentation of the handlebody union at an interface. The wrap pair
    /// `(s, 1)` is read as system `s` against system 1.
    pub fn presentation_of_pair(&self, i: usize, j: usize) -> Result<GroupPresentation> {
        let s = self.systems.len();
        let (base, other) = if (i, j) == (s, 1) { (1, s) } else { (i, j) };
        GroupPresentation::new(self.genus(), self.reading(base, other)?)
    }

    pub fn pi1(&self) -> Result<GroupPresentation> {
        let mut relators = Vec::new();
        for j in 2..=self.systems.len() {
            relators.extend(self.reading(1, j)?);
        }
        GroupPresentation::new(self.genus(), relators)
    }

    pub fn validate(&self, budget: usize) -> Result<ValidationReport> {
        let mut sectors = Vec::new();
        for ((i, j), &k) in self.sector_pairs().into_iter().zip(&self.types) {
            let p = self.presentation_of_pair(i, j)?;
            sectors.push(SectorCheck {
                pair: (i, j),
                claimed: k,
                verdict: verify_free_of_rank(&p, k, budget),
            });
        }
        let boundary = match self.boundary_pair() {
            Some((i, j)) => Some(abelianization(&self.presentation_of_pair(i, j)?)),
            None => None,
        };
        Ok(ValidationReport { sectors, boundary })
    }

    /// Same systems under a new claimed type vector.
    pub fn with_types(&self, types: Vec<usize>) -> Result<Self> {
        Self::with_readings(self.surface, self.systems.clone(), self.closed, types, self.readings.clone())
    }
}

pub fn pi1_of_diagram(d: &MultisectionDiagram) -> Result<GroupPresentation> {
    d.pi1()
}

pub fn presentation_of_pair(d: &MultisectionDiagram, i: usize, j: usize) -> Result<GroupPresentation> {
    d.presentation_of_pair(i, j)
}

pub fn validate(d: &MultisectionDiagram, budget: usize) -> Result<ValidationReport> {
    d.validate(budget)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorCheck {
    pub pair: (usize, usize),
    pub claimed: usize,
    pub verdict: SectorVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub sectors: Vec<SectorCheck>,
    pub boundary: Option<AbelianInvariants>,
}

impl ValidationReport {
    pub fn all_verified(&self) -> bool {
        self.sectors.iter().all(|s| s.verdict.is_verified())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sectors {
            writeln!(
                f,
                "sector ({}, {}) claimed {}: {} [{}; {} steps]",
                s.pair.0,
                s.pair.1,
                s.claimed,
                s.verdict.status(),
                s.verdict.abelian,
                s.verdict.trace.len()
            )?;
        }
        if let Some(b) = &self.boundary {
            writeln!(f, "boundary: {b}")?;
        }
        write!(f, "overall: {}", if self.all_verified() { "Verified" } else { "Failed" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentations::SectorStatus;

    fn w(rank: usize, s: &[i32]) -> Word {
        Word::from_signed(rank, s)
    }

    fn lens21() -> GeometricHeegaardDiagram {
        // b b a, standardized by a -> b^-2 a
        let phi = FreeAutomorphism::with_inverse(vec![w(2, &[-2, -2, 1]), w(2, &[2])], vec![w(2, &[2, 2, 1]), w(2, &[2])])
            .unwrap();
        GeometricHeegaardDiagram::new(1, vec![w(2, &[2, 2, 1])], Some(phi), "L(2,1)").unwrap()
    }

    #[test]
    fn lens_reading_against_alpha() {
        let alpha = CutSystem::standard_alpha(SurfaceModel::new(1), "alpha");
        assert_eq!(read_against(&w(2, &[2, 2, 1]), &alpha).unwrap(), w(1, &[1, 1]));
        assert!(read_against(&w(2, &[1]), &alpha).unwrap().is_empty());
        assert_eq!(lens21().relators(), vec![w(1, &[1, 1])]);
    }

    #[test]
    fn cut_system_checks() {
        let s = SurfaceModel::new(1);
        assert!(CutSystem::new(s, "x", vec![w(2, &[1, 1])], None).is_err());
        assert!(CutSystem::new(s, "x", vec![w(2, &[1, 2, -1, -2])], None).is_err());
        assert!(CutSystem::new(s, "x", vec![], None).is_err());
        // standardizer that does not produce a letter
        let bad = FreeAutomorphism::transvection(2, 1, 2, true, false);
        assert!(CutSystem::new(s, "x", vec![w(2, &[1])], Some(bad)).is_err());
        let missing = CutSystem::new(s, "x", vec![w(2, &[1])], None).unwrap();
        assert!(matches!(read_against(&w(2, &[2]), &missing), Err(Error::MissingStandardizer(_))));
    }

    #[test]
    fn self_reading_vanishes() {
        let s = SurfaceModel::new(2);
        let phi = FreeAutomorphism::transvection(4, 1, 3, true, false);
        let sys = CutSystem::new(s, "beta", vec![w(4, &[1, -3]), w(4, &[4])], Some(phi));
        // a1 a2^-1 -> a1 under a1 -> a1 a2
        let sys = sys.unwrap();
        for c in sys.curves() {
            assert!(read_against(c, &sys).unwrap().is_empty());
        }
    }

    #[test]
    fn parallel_systems_validate() {
        let s = SurfaceModel::new(1);
        let a = CutSystem::standard_alpha(s, "a1");
        let d = MultisectionDiagram::new(s, vec![a.clone(), a.relabeled("a2"), a.relabeled("a3")], true, vec![1, 1, 1])
            .unwrap();
        let r = d.validate(100).unwrap();
        assert!(r.all_verified());
        assert_eq!(d.pi1().unwrap().generator_count(), 1);
        assert!(d.pi1().unwrap().relators().iter().all(|r| r.is_empty()));

        let refuted = d.with_types(vec![0, 1, 1]).unwrap().validate(100).unwrap();
        assert_eq!(refuted.sectors[0].verdict.status(), &SectorStatus::RefutedByHomology);
        assert!(!refuted.all_verified());
    }

    #[test]
    fn heegaard_operations() {
        let l = lens21();
        let two = connected_sum(&l, &l);
        assert_eq!(two.genus(), 2);
        assert_eq!(two.relators(), vec![w(2, &[1, 1]), w(2, &[2, 2])]);
        let empty = GeometricHeegaardDiagram::new(0, vec![], Some(FreeAutomorphism::identity(0)), "S3").unwrap();
        assert_eq!(connected_sum(&l, &empty), l);

        let m = mirror(&l);
        assert_eq!(m.relators(), vec![w(1, &[-1, -1])]);
        assert_eq!(m.homology().torsion_u64(), vec![2]);
        assert_eq!(mirror(&m).beta_curves(), l.beta_curves());

        let st = stabilize(&l);
        assert_eq!(st.relators(), vec![w(2, &[1, 1]), w(2, &[2])]);
        assert_eq!(st.homology(), l.homology());
        assert_eq!(stabilize(&st).genus(), 3);
    }
}
