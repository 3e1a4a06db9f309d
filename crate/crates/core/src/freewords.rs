//! Words in a free group of finite rank and explicit automorphisms.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::smith::{smith_normal_form, IntegerMatrix};

/// A generator or its inverse. Stored as a nonzero signed index:
/// `+k` is generator `k`, `-k` its inverse (`k` is 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i32);

impl Letter {
    pub fn new(index: usize, positive: bool) -> Letter {
        assert!(index >= 1 && index <= i32::MAX as usize, "generator index must be >= 1");
        let k = index as i32;
        Letter(if positive { k } else { -k })
    }

    pub fn pos(index: usize) -> Letter {
        Letter::new(index, true)
    }

    pub fn neg(index: usize) -> Letter {
        Letter::new(index, false)
    }

    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn sign(self) -> i64 {
        if self.0 > 0 {
            1
        } else {
            -1
        }
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "g{}", self.index())
        } else {
            write!(f, "g{}^-1", self.index())
        }
    }
}

/// Single-pass stack reduction.
pub fn free_reduce(letters: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// A freely reduced word in the free group of rank `rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(rank: usize) -> Word {
        Word {
            rank,
            letters: Vec::new(),
        }
    }

    pub fn new(rank: usize, letters: Vec<Letter>) -> Result<Word> {
        if let Some(bad) = letters.iter().find(|l| l.index() > rank) {
            return Err(Error::LetterOutOfRange {
                index: bad.index(),
                rank,
            });
        }
        Ok(Word {
            rank,
            letters: free_reduce(&letters),
        })
    }

    /// Builds a word from signed indices, e.g. `[1, -2]` for `g1 g2^-1`.
    /// Panics on out-of-range indices; meant for literals.
    pub fn from_signed(rank: usize, signed: &[i32]) -> Word {
        let letters = signed
            .iter()
            .map(|&s| Letter::new(s.unsigned_abs() as usize, s > 0))
            .collect();
        Word::new(rank, letters).expect("word literal out of range")
    }

    pub fn letter(rank: usize, l: Letter) -> Word {
        Word::new(rank, vec![l]).expect("letter out of range")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn signed(&self) -> Vec<i32> {
        self.letters.iter().map(|l| l.0).collect()
    }

    /// The same letters viewed in a free group of a different (large enough) rank.
    pub fn with_rank(&self, rank: usize) -> Result<Word> {
        Word::new(rank, self.letters.clone())
    }

    pub fn concat(&self, other: &Word) -> Word {
        debug_assert_eq!(self.rank, other.rank);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            rank: self.rank.max(other.rank),
            letters: free_reduce(&letters),
        }
    }

    pub fn invert(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Flips every sign while keeping the letter order.
    pub fn letter_inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: free_reduce(&self.letters.iter().map(|l| l.inverse()).collect::<Vec<_>>()),
        }
    }

    /// Strips matched first/last letters; the result is conjugate to `self`.
    pub fn cyclic_reduce(&self) -> Word {
        let l = &self.letters;
        let mut lo = 0;
        let mut hi = l.len();
        while hi - lo >= 2 && l[lo] == l[hi - 1].inverse() {
            lo += 1;
            hi -= 1;
        }
        Word {
            rank: self.rank,
            letters: l[lo..hi].to_vec(),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(a), Some(b)) if self.letters.len() > 1 => *a != b.inverse(),
            _ => true,
        }
    }

    pub fn exponent_sum(&self, index: usize) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.index() == index)
            .map(|l| l.sign())
            .sum()
    }

    pub fn occurrences(&self, index: usize) -> usize {
        self.letters.iter().filter(|l| l.index() == index).count()
    }

    /// Cyclic rotation by `k` positions to the left, i.e. conjugation by
    /// the first `k` letters, freely reduced.
    pub fn rotate(&self, k: usize) -> Word {
        if self.letters.is_empty() {
            return self.clone();
        }
        let mut letters = self.letters.clone();
        letters.rotate_left(k % self.letters.len());
        Word {
            rank: self.rank,
            letters: free_reduce(&letters),
        }
    }

    /// Least representative among all rotations of the cyclic reduction
    /// of `self` and of its inverse.
    pub fn cyclic_canonical(&self) -> Word {
        let base = self.cyclic_reduce();
        let inv = base.invert();
        let mut best = base.clone();
        for w in [&base, &inv] {
            for k in 0..w.len().max(1) {
                let r = w.rotate(k);
                if r.letters < best.letters {
                    best = r;
                }
            }
        }
        best
    }

    /// Equality as unoriented cyclic words (conjugacy up to inversion).
    pub fn cyclic_eq(&self, other: &Word) -> bool {
        self.cyclic_canonical().letters == other.cyclic_canonical().letters
    }

    /// Substitutes `images[k-1]` for every occurrence of generator `k`.
    pub fn substitute(&self, images: &[Word], rank: usize) -> Word {
        let mut out = Vec::new();
        for l in &self.letters {
            let img = &images[l.index() - 1];
            if l.is_positive() {
                out.extend_from_slice(&img.letters);
            } else {
                out.extend(img.letters.iter().rev().map(|x| x.inverse()));
            }
        }
        Word {
            rank,
            letters: free_reduce(&out),
        }
    }

    /// Renames generators through `map` (`map[k-1]` is the new letter for
    /// generator `k`; `None` deletes it).
    pub fn relabel(&self, map: &[Option<Letter>], rank: usize) -> Word {
        let letters: Vec<Letter> = self
            .letters
            .iter()
            .filter_map(|l| {
                map[l.index() - 1].map(|m| if l.is_positive() { m } else { m.inverse() })
            })
            .collect();
        Word {
            rank,
            letters: free_reduce(&letters),
        }
    }

    /// Parses the token grammar `g<k>` / `g<k>^-1`, with `1` for the identity.
    pub fn parse(s: &str, rank: usize) -> std::result::Result<Word, String> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::identity(rank));
        }
        if s.is_empty() {
            return Err("empty word must be written as `1`".into());
        }
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            let (body, positive) = match tok.strip_suffix("^-1") {
                Some(b) => (b, false),
                None => (tok, true),
            };
            let idx: usize = body
                .strip_prefix('g')
                .and_then(|n| n.parse().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| format!("bad token `{tok}`"))?;
            if idx > rank {
                return Err(format!("generator g{idx} exceeds rank {rank}"));
            }
            letters.push(Letter::new(idx, positive));
        }
        Ok(Word {
            rank,
            letters: free_reduce(&letters),
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Produced by a library construction from a derivation.
    BuiltIn,
    /// Supplied by the user; bijectivity is only checked on the abelianization.
    UserAsserted,
}

/// An endomorphism of the free group given by generator images, accepted
/// only if its abelianization is unimodular.
#[derive(Clone, Debug)]
pub struct FreeAutomorphism {
    rank: usize,
    images: Vec<Word>,
    provenance: Provenance,
    inverse: Option<Arc<Vec<Word>>>,
}

impl PartialEq for FreeAutomorphism {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.images == other.images
    }
}

impl Eq for FreeAutomorphism {}

impl FreeAutomorphism {
    pub fn identity(rank: usize) -> FreeAutomorphism {
        let images: Vec<Word> = (1..=rank).map(|k| Word::letter(rank, Letter::pos(k))).collect();
        FreeAutomorphism {
            rank,
            inverse: Some(Arc::new(images.clone())),
            images,
            provenance: Provenance::BuiltIn,
        }
    }

    pub fn new(images: Vec<Word>, provenance: Provenance) -> Result<FreeAutomorphism> {
        let rank = images.len();
        if let Some(w) = images.iter().find(|w| w.rank() != rank) {
            return Err(Error::RankMismatch {
                expected: rank,
                found: w.rank(),
            });
        }
        if !abelianization_unimodular(&images) {
            return Err(Error::NotUnimodular);
        }
        Ok(FreeAutomorphism {
            rank,
            images,
            provenance,
            inverse: None,
        })
    }

    /// An automorphism together with a known inverse. The pair is checked
    /// to compose to the identity on every generator, which proves
    /// bijectivity.
    pub fn with_inverse(images: Vec<Word>, inverse: Vec<Word>) -> Result<FreeAutomorphism> {
        let mut phi = FreeAutomorphism::new(images, Provenance::BuiltIn)?;
        if inverse.len() != phi.rank {
            return Err(Error::RankMismatch {
                expected: phi.rank,
                found: inverse.len(),
            });
        }
        for k in 1..=phi.rank {
            let g = Word::letter(phi.rank, Letter::pos(k));
            let there = g.substitute(&phi.images, phi.rank).substitute(&inverse, phi.rank);
            let back = g.substitute(&inverse, phi.rank).substitute(&phi.images, phi.rank);
            if there != g || back != g {
                return Err(Error::NotUnimodular);
            }
        }
        phi.inverse = Some(Arc::new(inverse));
        Ok(phi)
    }

    /// Elementary transvection `target -> target * mult^sign` (or
    /// `mult^sign * target` when `left`), all other generators fixed.
    pub fn transvection(rank: usize, target: usize, mult: usize, sign: bool, left: bool) -> Self {
        assert_ne!(target, mult);
        let build = |sgn: bool| -> Vec<Word> {
            (1..=rank)
                .map(|k| {
                    let g = Letter::pos(k);
                    if k != target {
                        return Word::letter(rank, g);
                    }
                    let m = Letter::new(mult, sgn);
                    let letters = if left { vec![m, g] } else { vec![g, m] };
                    Word::new(rank, letters).unwrap()
                })
                .collect()
        };
        FreeAutomorphism::with_inverse(build(sign), build(!sign)).expect("transvections are invertible")
    }

    /// Inverts every generator in `which` (a diagonal involution).
    pub fn invert_letters(rank: usize, which: &[usize]) -> Self {
        let images: Vec<Word> = (1..=rank)
            .map(|k| Word::letter(rank, Letter::new(k, !which.contains(&k))))
            .collect();
        FreeAutomorphism::with_inverse(images.clone(), images).expect("sign flips are involutions")
    }

    /// Sends generator `k` to the letter `perm[k-1]`.
    pub fn permutation(perm: &[Letter]) -> Result<Self> {
        let rank = perm.len();
        let images: Vec<Word> = perm.iter().map(|&l| Word::letter(rank, l)).collect();
        let mut inverse = vec![Word::identity(rank); rank];
        for (k, l) in perm.iter().enumerate() {
            inverse[l.index() - 1] = Word::letter(rank, Letter::new(k + 1, l.is_positive()));
        }
        FreeAutomorphism::with_inverse(images, inverse)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn inverse(&self) -> Option<FreeAutomorphism> {
        let inv = self.inverse.as_ref()?;
        Some(FreeAutomorphism {
            rank: self.rank,
            images: inv.as_ref().clone(),
            provenance: self.provenance,
            inverse: Some(Arc::new(self.images.clone())),
        })
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: w.rank(),
            });
        }
        Ok(w.substitute(&self.images, self.rank))
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &FreeAutomorphism) -> Result<FreeAutomorphism> {
        if other.rank != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        let images = other
            .images
            .iter()
            .map(|w| w.substitute(&self.images, self.rank))
            .collect();
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(a), Some(b)) => Some(Arc::new(
                a.iter().map(|w| w.substitute(b, self.rank)).collect::<Vec<_>>(),
            )),
            _ => None,
        };
        let provenance = if self.provenance == Provenance::BuiltIn && other.provenance == Provenance::BuiltIn {
            Provenance::BuiltIn
        } else {
            Provenance::UserAsserted
        };
        Ok(FreeAutomorphism {
            rank: self.rank,
            images,
            provenance,
            inverse,
        })
    }

    /// Block sum: `self` on generators `1..=rank`, `other` shifted above it.
    pub fn block_sum(&self, other: &FreeAutomorphism) -> FreeAutomorphism {
        let rank = self.rank + other.rank;
        let shift = |ws: &[Word], by: usize| -> Vec<Word> {
            ws.iter()
                .map(|w| {
                    let letters = w
                        .letters()
                        .iter()
                        .map(|l| Letter::new(l.index() + by, l.is_positive()))
                        .collect();
                    Word::new(rank, letters).unwrap()
                })
                .collect()
        };
        let mut images = shift(&self.images, 0);
        images.extend(shift(&other.images, self.rank));
        let inverse = match (&self.inverse, &other.inverse) {
            (Some(a), Some(b)) => {
                let mut inv = shift(a, 0);
                inv.extend(shift(b, self.rank));
                Some(Arc::new(inv))
            }
            _ => None,
        };
        let provenance = if self.provenance == Provenance::BuiltIn && other.provenance == Provenance::BuiltIn {
            Provenance::BuiltIn
        } else {
            Provenance::UserAsserted
        };
        FreeAutomorphism {
            rank,
            images,
            provenance,
            inverse,
        }
    }

    pub fn abelianized(&self) -> IntegerMatrix {
        abelian_matrix(&self.images)
    }
}

fn abelian_matrix(images: &[Word]) -> IntegerMatrix {
    let n = images.len();
    let rows: Vec<Vec<i64>> = images
        .iter()
        .map(|w| (1..=n).map(|k| w.exponent_sum(k)).collect())
        .collect();
    IntegerMatrix::from_rows(n, &rows)
}

fn abelianization_unimodular(images: &[Word]) -> bool {
    let snf = smith_normal_form(&abelian_matrix(images));
    snf.rank == images.len() && snf.diagonal().iter().all(|d| d.is_one())
}

/// Determinant of the abelianized image matrix.
pub fn abelian_determinant(phi: &FreeAutomorphism) -> BigInt {
    phi.abelianized().determinant()
}
