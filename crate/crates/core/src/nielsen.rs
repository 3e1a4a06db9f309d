//! Nielsen moves, orbit enumeration over finite abelian groups and
//! certificates separating (or connecting) generating tuples.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::freewords::{Letter, Word};
use crate::diagrams::{read_against, MultisectionDiagram};
use crate::presentations::{surjections_onto, tietze_simplify, GroupPresentation, DEFAULT_TIETZE_BUDGET};

pub const DEFAULT_TUPLE_BOUND: u64 = 1_000_000;
pub const DEFAULT_QUOTIENT_BOUND: u64 = 64;
pub const DEFAULT_SEARCH_STATES: usize = 50_000;

/// Tuple-space bound, overridable through `MULTISECT_BOUND`.
pub fn tuple_bound() -> u64 {
    std::env::var("MULTISECT_BOUND")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_TUPLE_BOUND)
}

/// `Z/d1 + ... + Z/dr` with `d1 | d2 | ... | dr`, every `di > 1`.
/// Elements are coordinate vectors; they are indexed in mixed radix with
/// the first coordinate most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        for (i, &d) in factors.iter().enumerate() {
            if d < 2 {
                return Err(Error::ShapeMismatch(format!("invariant factor {d} must exceed 1")));
            }
            if let Some(&next) = factors.get(i + 1) {
                if next % d != 0 {
                    return Err(Error::ShapeMismatch(format!("{d} does not divide {next}")));
                }
            }
        }
        Ok(FiniteAbelianGroup { factors })
    }

    /// `(Z/p)^n`.
    pub fn elementary(p: u64, n: usize) -> Result<Self> {
        Self::new(vec![p; n])
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.factors.len()]
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.factors).map(|((x, y), d)| (x + y) % d).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().zip(&self.factors).map(|(x, d)| (d - x) % d).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &[u64], k: i64) -> Vec<u64> {
        a.iter()
            .zip(&self.factors)
            .map(|(&x, &d)| {
                let r = (x as i128 * k as i128).rem_euclid(d as i128);
                r as u64
            })
            .collect()
    }

    pub fn element(&self, mut index: usize) -> Vec<u64> {
        let mut v = vec![0; self.factors.len()];
        for (slot, &d) in v.iter_mut().zip(&self.factors).rev() {
            *slot = (index as u64) % d;
            index /= d as usize;
        }
        v
    }

    pub fn index_of(&self, a: &[u64]) -> usize {
        a.iter().zip(&self.factors).fold(0usize, |acc, (&x, &d)| acc * d as usize + x as usize)
    }

    /// Generation test: for every prime `p` dividing the exponent, the
    /// images in `G / pG` must span it.
    pub fn generates(&self, elems: &[Vec<u64>]) -> bool {
        let Some(&top) = self.factors.last() else {
            return true;
        };
        for p in prime_factors(top) {
            let cols: Vec<usize> = (0..self.factors.len()).filter(|&i| self.factors[i].is_multiple_of(p)).collect();
            let mut rows: Vec<Vec<u64>> = elems.iter().map(|e| cols.iter().map(|&i| e[i] % p).collect()).collect();
            if rank_mod_p(&mut rows, p) < cols.len() {
                return false;
            }
        }
        true
    }

    /// All groups of order at most `max_order`, ordered by order and then
    /// lexicographically by invariant factors. The trivial group is left out.
    pub fn all_up_to(max_order: u64) -> Vec<FiniteAbelianGroup> {
        // chains d1 | d2 | ... with product `rest`, each factor a multiple of `prev`
        fn chains(rest: u64, prev: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            if rest == 1 {
                out.push(acc.clone());
                return;
            }
            let mut d = prev;
            while d <= rest {
                if rest.is_multiple_of(d) && (rest / d == 1 || (rest / d).is_multiple_of(d)) {
                    acc.push(d);
                    chains(rest / d, d, acc, out);
                    acc.pop();
                }
                d += prev;
            }
        }
        let mut out = Vec::new();
        for order in 2..=max_order {
            let mut lists = Vec::new();
            let mut d = 2;
            while d <= order {
                if order % d == 0 && (order / d == 1 || (order / d) % d == 0) {
                    let mut acc = vec![d];
                    chains(order / d, d, &mut acc, &mut lists);
                }
                d += 1;
            }
            lists.sort();
            out.extend(lists.into_iter().map(|factors| FiniteAbelianGroup { factors }));
        }
        out
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p as i128) as u64
}

fn rank_mod_p(rows: &mut [Vec<u64>], p: u64) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][c], p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c];
                for k in 0..cols {
                    rows[r][k] = (rows[r][k] + p * p - f * rows[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NielsenMove {
    Swap12,
    /// `(a1, ..., an) -> (a2, ..., an, a1)`
    CyclicPermute,
    Invert1,
    /// `a1 -> a1 a2`
    Multiply12,
}

impl NielsenMove {
    pub const ALL: [NielsenMove; 4] = [
        NielsenMove::Swap12,
        NielsenMove::CyclicPermute,
        NielsenMove::Invert1,
        NielsenMove::Multiply12,
    ];

    fn name(self) -> &'static str {
        match self {
            NielsenMove::Swap12 => "Swap12",
            NielsenMove::CyclicPermute => "CyclicPermute",
            NielsenMove::Invert1 => "Invert1",
            NielsenMove::Multiply12 => "Multiply12",
        }
    }

    fn needs_pair(self) -> bool {
        matches!(self, NielsenMove::Swap12 | NielsenMove::Multiply12)
    }

    /// Applies the move to a tuple in any group given by `mul` and `inv`.
    pub fn apply_with<T: Clone>(
        self,
        t: &[T],
        mul: impl Fn(&T, &T) -> T,
        inv: impl Fn(&T) -> T,
    ) -> Result<Vec<T>> {
        if self.needs_pair() && t.len() < 2 {
            return Err(Error::TupleTooShort { mv: self.name() });
        }
        let mut out = t.to_vec();
        match self {
            NielsenMove::Swap12 => out.swap(0, 1),
            NielsenMove::CyclicPermute => {
                if !out.is_empty() {
                    out.rotate_left(1)
                }
            }
            NielsenMove::Invert1 => {
                if let Some(first) = out.first_mut() {
                    *first = inv(first);
                }
            }
            NielsenMove::Multiply12 => out[0] = mul(&t[0], &t[1]),
        }
        Ok(out)
    }

    pub fn apply_words(self, t: &[Word]) -> Result<Vec<Word>> {
        self.apply_with(t, |a, b| a.concat(b), |a| a.invert())
    }
}

impl fmt::Display for NielsenMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An ordered tuple of elements generating its ambient group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingTuple {
    group: FiniteAbelianGroup,
    elements: Vec<Vec<u64>>,
}

impl GeneratingTuple {
    pub fn new(group: FiniteAbelianGroup, elements: Vec<Vec<u64>>) -> Result<Self> {
        let r = group.factors().len();
        for e in &elements {
            if e.len() != r || e.iter().zip(group.factors()).any(|(x, d)| x >= d) {
                return Err(Error::ShapeMismatch(format!("{e:?} is not an element of {group}")));
            }
        }
        if !group.generates(&elements) {
            return Err(Error::ShapeMismatch(format!("{elements:?} does not generate {group}")));
        }
        Ok(GeneratingTuple { group, elements })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn elements(&self) -> &[Vec<u64>] {
        &self.elements
    }
}

pub fn nielsen_move(t: &GeneratingTuple, mv: NielsenMove) -> Result<GeneratingTuple> {
    let g = &t.group;
    let elements = mv.apply_with(&t.elements, |a, b| g.add(a, b), |a| g.neg(a))?;
    debug_assert!(g.generates(&elements));
    Ok(GeneratingTuple {
        group: g.clone(),
        elements,
    })
}

fn encode(g: &FiniteAbelianGroup, t: &[Vec<u64>]) -> u64 {
    let order = g.order();
    t.iter().fold(0u64, |acc, e| acc * order + g.index_of(e) as u64)
}

fn decode(g: &FiniteAbelianGroup, n: usize, mut code: u64) -> Vec<Vec<u64>> {
    let order = g.order();
    let mut out = vec![Vec::new(); n];
    for slot in out.iter_mut().rev() {
        *slot = g.element((code % order) as usize);
        code /= order;
    }
    out
}

/// Partition of the generating `n`-tuples of a group into Nielsen orbits.
/// Each orbit is named by its lexicographically least member.
#[derive(Clone, Debug)]
pub struct OrbitPartition {
    group: FiniteAbelianGroup,
    n: usize,
    orbit_of: Vec<u32>,
    representatives: Vec<u64>,
    sizes: Vec<usize>,
}

const NOT_GENERATING: u32 = u32::MAX;

impl OrbitPartition {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn tuple_length(&self) -> usize {
        self.n
    }

    pub fn orbit_count(&self) -> usize {
        self.representatives.len()
    }

    pub fn orbit_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn representative(&self, orbit: usize) -> Vec<Vec<u64>> {
        decode(&self.group, self.n, self.representatives[orbit])
    }

    /// Orbit index of a tuple, `None` if it does not generate.
    pub fn orbit_index(&self, t: &[Vec<u64>]) -> Option<usize> {
        let o = self.orbit_of[encode(&self.group, t) as usize];
        (o != NOT_GENERATING).then_some(o as usize)
    }

    pub fn generating_count(&self) -> usize {
        self.sizes.iter().sum()
    }
}

pub fn orbit_enumerate(g: &FiniteAbelianGroup, n: usize) -> Result<OrbitPartition> {
    orbit_enumerate_bounded(g, n, tuple_bound())
}

pub fn orbit_enumerate_bounded(g: &FiniteAbelianGroup, n: usize, bound: u64) -> Result<OrbitPartition> {
    let total = (g.order() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > bound as u128 {
        return Err(Error::BoundExceeded { size: total, bound: bound as u128 });
    }
    let total = total as usize;
    let mut orbit_of = vec![NOT_GENERATING; total];
    let mut representatives = Vec::new();
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for code in 0..total {
        if orbit_of[code] != NOT_GENERATING {
            continue;
        }
        let t = decode(g, n, code as u64);
        if !g.generates(&t) {
            continue;
        }
        let id = representatives.len() as u32;
        representatives.push(code as u64);
        orbit_of[code] = id;
        let mut size = 1;
        queue.push_back(t);
        while let Some(cur) = queue.pop_front() {
            for mv in NielsenMove::ALL {
                let Ok(next) = mv.apply_with(&cur, |a, b| g.add(a, b), |a| g.neg(a)) else {
                    continue;
                };
                let c = encode(g, &next) as usize;
                if orbit_of[c] == NOT_GENERATING {
                    assert!(g.generates(&next), "Nielsen move left the generating set");
                    orbit_of[c] = id;
                    size += 1;
                    queue.push_back(next);
                }
            }
        }
        sizes.push(size);
    }
    Ok(OrbitPartition {
        group: g.clone(),
        n,
        orbit_of,
        representatives,
        sizes,
    })
}

/// Class of a determinant in `(Z/p)^x / {+1, -1}`, named by its smaller
/// representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeterminantClass {
    pub p: u64,
    pub rep: u64,
}

impl DeterminantClass {
    pub fn members(&self) -> Vec<u64> {
        let other = (self.p - self.rep) % self.p;
        if other == self.rep {
            vec![self.rep]
        } else {
            vec![self.rep, other]
        }
    }
}

impl fmt::Display for DeterminantClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.members().iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", m.join(","))
    }
}

fn is_elementary(g: &FiniteAbelianGroup) -> Option<u64> {
    let p = *g.factors().first()?;
    (prime_factors(p) == vec![p] && g.factors().iter().all(|&d| d == p)).then_some(p)
}

pub fn determinant_invariant(t: &GeneratingTuple) -> Result<DeterminantClass> {
    let g = t.group();
    let n = t.elements().len();
    let p = is_elementary(g)
        .filter(|_| g.factors().len() == n)
        .ok_or_else(|| Error::ShapeMismatch(format!("determinant needs (Z/p)^{n}, got {g}")))?;
    let mut m: Vec<Vec<i128>> = t.elements().iter().map(|e| e.iter().map(|&x| x as i128).collect()).collect();
    let pi = p as i128;
    let mut det: i128 = 1;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| m[r][c] % pi != 0) else {
            return Err(Error::ShapeMismatch("tuple does not generate".into()));
        };
        if piv != c {
            m.swap(piv, c);
            det = -det;
        }
        det = det * m[c][c] % pi;
        let inv = inv_mod(m[c][c].rem_euclid(pi) as u64, p) as i128;
        for r in c + 1..n {
            let f = m[r][c] * inv % pi;
            for k in c..n {
                m[r][k] = (m[r][k] - f * m[c][k]).rem_euclid(pi);
            }
        }
    }
    let d = det.rem_euclid(pi) as u64;
    Ok(DeterminantClass {
        p,
        rep: d.min(p - d),
    })
}

/// A move of the abstract search: one of the four Nielsen moves, or
/// conjugation of every entry by a letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TupleMove {
    Nielsen(NielsenMove),
    Conjugate(Letter),
}

impl TupleMove {
    pub fn apply(self, t: &[Word]) -> Result<Vec<Word>> {
        match self {
            TupleMove::Nielsen(m) => m.apply_words(t),
            TupleMove::Conjugate(l) => Ok(t
                .iter()
                .map(|w| {
                    let c = Word::letter(w.rank(), l);
                    c.concat(w).concat(&c.invert())
                })
                .collect()),
        }
    }
}

impl fmt::Display for TupleMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TupleMove::Nielsen(m) => write!(f, "{m}"),
            TupleMove::Conjugate(l) => write!(f, "Conjugate({l})"),
        }
    }
}

pub fn replay(start: &[Word], moves: &[TupleMove]) -> Result<Vec<Word>> {
    let mut cur = start.to_vec();
    for m in moves {
        cur = m.apply(&cur)?;
    }
    Ok(cur)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Distinct,
    SameOrbit,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Distinct => "Distinct",
            Verdict::SameOrbit => "SameOrbit",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitLabel {
    Lexmin(Vec<Vec<u64>>),
    Determinant(DeterminantClass),
}

impl fmt::Display for OrbitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitLabel::Lexmin(t) => write!(f, "orbit of {t:?}"),
            OrbitLabel::Determinant(c) => write!(f, "det class {c}"),
        }
    }
}

/// Images of both tuples under one surjection onto a finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientWitness {
    pub group: FiniteAbelianGroup,
    pub generator_images: Vec<Vec<u64>>,
    pub first: Vec<Vec<u64>>,
    pub second: Vec<Vec<u64>>,
    pub first_label: OrbitLabel,
    pub second_label: OrbitLabel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NielsenCertificate {
    pub verdict: Verdict,
    /// The separating quotient for `Distinct`, otherwise the first quotient
    /// in which the images agreed, if any.
    pub quotient: Option<QuotientWitness>,
    /// Moves taking the first tuple to the second, for `SameOrbit`.
    pub moves: Vec<TupleMove>,
    pub quotients_checked: usize,
    pub states_explored: usize,
}

impl NielsenCertificate {
    /// Re-derives the claim: orbit labels for `Distinct`, the move
    /// sequence for `SameOrbit`.
    pub fn verify(&self, p: &GroupPresentation, t1: &[Word], t2: &[Word]) -> bool {
        match self.verdict {
            Verdict::Distinct => {
                let Some(q) = &self.quotient else { return false };
                let map = |t: &[Word]| -> Vec<Vec<u64>> {
                    t.iter().map(|w| map_word(&q.group, &q.generator_images, w)).collect()
                };
                let satisfies = p
                    .relators()
                    .iter()
                    .all(|r| q.group.is_zero(&map_word(&q.group, &q.generator_images, r)));
                let a = map(t1);
                let b = map(t2);
                satisfies
                    && a == q.first
                    && b == q.second
                    && matches!((label_of(&q.group, &a), label_of(&q.group, &b)), (Some(x), Some(y)) if x != y)
            }
            Verdict::SameOrbit => replay(t1, &self.moves).map(|r| r == t2).unwrap_or(false),
            Verdict::Inconclusive => true,
        }
    }

    pub fn report(&self) -> String {
        let mut s = format!("verdict: {}\n", self.verdict);
        s.push_str(&format!("quotients checked: {}\n", self.quotients_checked));
        if let Some(q) = &self.quotient {
            s.push_str(&format!("quotient: {}\n", q.group));
            s.push_str(&format!("generator images: {:?}\n", q.generator_images));
            s.push_str(&format!("first tuple image: {:?} ({})\n", q.first, q.first_label));
            s.push_str(&format!("second tuple image: {:?} ({})\n", q.second, q.second_label));
        }
        if self.verdict == Verdict::SameOrbit {
            let m: Vec<String> = self.moves.iter().map(|m| m.to_string()).collect();
            s.push_str(&format!("moves: [{}]\n", m.join(", ")));
        }
        s.push_str(&format!("free search states: {}\n", self.states_explored));
        s
    }
}

fn map_word(g: &FiniteAbelianGroup, images: &[Vec<u64>], w: &Word) -> Vec<u64> {
    let mut acc = g.zero();
    for l in w.letters() {
        let img = &images[l.index() - 1];
        acc = if l.is_positive() { g.add(&acc, img) } else { g.sub(&acc, img) };
    }
    acc
}

fn label_of(g: &FiniteAbelianGroup, t: &[Vec<u64>]) -> Option<OrbitLabel> {
    if !g.generates(t) {
        return None;
    }
    if is_elementary(g).is_some() && g.factors().len() == t.len() {
        let gt = GeneratingTuple::new(g.clone(), t.to_vec()).ok()?;
        return determinant_invariant(&gt).ok().map(OrbitLabel::Determinant);
    }
    let part = orbit_enumerate_bounded(g, t.len(), tuple_bound()).ok()?;
    let idx = part.orbit_index(t)?;
    Some(OrbitLabel::Lexmin(part.representative(idx)))
}

/// Options for [`distinguish`].
#[derive(Clone, Debug)]
pub struct SearchLimits {
    pub max_quotient_order: u64,
    pub tuple_bound: u64,
    pub free_search_states: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_quotient_order: DEFAULT_QUOTIENT_BOUND,
            tuple_bound: tuple_bound(),
            free_search_states: DEFAULT_SEARCH_STATES,
        }
    }
}

pub fn distinguish(p: &GroupPresentation, t1: &[Word], t2: &[Word], limits: &SearchLimits) -> Result<NielsenCertificate> {
    if t1.len() != t2.len() {
        return Err(Error::ShapeMismatch(format!("tuple lengths {} and {}", t1.len(), t2.len())));
    }
    for w in t1.iter().chain(t2) {
        if w.rank() != p.generator_count() {
            return Err(Error::RankMismatch {
                expected: p.generator_count(),
                found: w.rank(),
            });
        }
    }
    if t1 == t2 {
        return Ok(NielsenCertificate {
            verdict: Verdict::SameOrbit,
            quotient: None,
            moves: Vec::new(),
            quotients_checked: 0,
            states_explored: 0,
        });
    }

    let gens = p.generator_count() as u32;
    let mut checked = 0;
    let mut agreeing: Option<QuotientWitness> = None;
    let mut partitions: HashMap<(FiniteAbelianGroup, usize), OrbitPartition> = HashMap::new();
    for g in FiniteAbelianGroup::all_up_to(limits.max_quotient_order) {
        // brute-force homomorphism search cost
        if (g.order() as u128).saturating_pow(gens) > limits.tuple_bound as u128 {
            continue;
        }
        for images in surjections_onto(p, &g, usize::MAX) {
            let a: Vec<Vec<u64>> = t1.iter().map(|w| map_word(&g, &images, w)).collect();
            let b: Vec<Vec<u64>> = t2.iter().map(|w| map_word(&g, &images, w)).collect();
            if !g.generates(&a) || !g.generates(&b) {
                continue;
            }
            let labels = if is_elementary(&g).is_some() && g.factors().len() == a.len() {
                let la = determinant_invariant(&GeneratingTuple::new(g.clone(), a.clone())?)?;
                let lb = determinant_invariant(&GeneratingTuple::new(g.clone(), b.clone())?)?;
                Some((OrbitLabel::Determinant(la), OrbitLabel::Determinant(lb)))
            } else {
                let key = (g.clone(), a.len());
                if !partitions.contains_key(&key) {
                    match orbit_enumerate_bounded(&g, a.len(), limits.tuple_bound) {
                        Ok(part) => {
                            partitions.insert(key.clone(), part);
                        }
                        Err(_) => continue,
                    }
                }
                let part = &partitions[&key];
                let ia = part.orbit_index(&a).expect("generating tuple has an orbit");
                let ib = part.orbit_index(&b).expect("generating tuple has an orbit");
                Some((
                    OrbitLabel::Lexmin(part.representative(ia)),
                    OrbitLabel::Lexmin(part.representative(ib)),
                ))
            };
            let Some((la, lb)) = labels else { continue };
            checked += 1;
            let witness = QuotientWitness {
                group: g.clone(),
                generator_images: images,
                first: a,
                second: b,
                first_label: la.clone(),
                second_label: lb.clone(),
            };
            if la != lb {
                return Ok(NielsenCertificate {
                    verdict: Verdict::Distinct,
                    quotient: Some(witness),
                    moves: Vec::new(),
                    quotients_checked: checked,
                    states_explored: 0,
                });
            }
            if agreeing.is_none() {
                agreeing = Some(witness);
            }
        }
    }

    let (moves, states) = free_search(t1, t2, p.generator_count(), limits.free_search_states);
    let verdict = match (&agreeing, &moves) {
        (Some(_), Some(ms)) => {
            assert_eq!(replay(t1, ms)?, t2, "move sequence failed to replay");
            Verdict::SameOrbit
        }
        _ => Verdict::Inconclusive,
    };
    Ok(NielsenCertificate {
        verdict,
        quotient: agreeing,
        moves: moves.unwrap_or_default(),
        quotients_checked: checked,
        states_explored: states,
    })
}

/// Breadth-first search in the free group for a move sequence from `t1`
/// to `t2`. Entry lengths are capped to keep the search finite.
fn free_search(t1: &[Word], t2: &[Word], rank: usize, max_states: usize) -> (Option<Vec<TupleMove>>, usize) {
    let cap = t1.iter().chain(t2).map(|w| w.len()).max().unwrap_or(0) * 2 + 4;
    let mut moves: Vec<TupleMove> = NielsenMove::ALL.iter().map(|&m| TupleMove::Nielsen(m)).collect();
    for k in 1..=rank {
        moves.push(TupleMove::Conjugate(Letter::pos(k)));
        moves.push(TupleMove::Conjugate(Letter::neg(k)));
    }
    let target = t2.to_vec();
    let mut parent: HashMap<Vec<Word>, Option<(Vec<Word>, TupleMove)>> = HashMap::new();
    parent.insert(t1.to_vec(), None);
    let mut queue = VecDeque::from([t1.to_vec()]);
    while let Some(cur) = queue.pop_front() {
        if cur == target {
            let mut path = Vec::new();
            let mut node = cur;
            while let Some(Some((prev, m))) = parent.get(&node).cloned() {
                path.push(m);
                node = prev;
            }
            path.reverse();
            return (Some(path), parent.len());
        }
        if parent.len() >= max_states {
            continue;
        }
        for &m in &moves {
            let Ok(next) = m.apply(&cur) else { continue };
            if next.iter().any(|w| w.len() > cap) || parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), Some((cur.clone(), m)));
            queue.push_back(next);
        }
    }
    (None, parent.len())
}

/// Spine generators of a sector as words in the generators of
/// [`MultisectionDiagram::pi1`]. The sector group is simplified to a free
/// basis, each basis element is lifted to a surface word through the
/// standardizer of the reading system, and then read against system 1.
pub fn spine_tuple(d: &MultisectionDiagram, sector: usize) -> Result<Vec<Word>> {
    let pairs = d.sector_pairs();
    if sector == 0 || sector > pairs.len() {
        return Err(Error::InvalidIndex {
            index: sector,
            max: pairs.len(),
        });
    }
    let (i, j) = pairs[sector - 1];
    let base = if (i, j) == (d.system_count(), 1) { 1 } else { i };
    let p = d.presentation_of_pair(i, j)?;
    let s = tietze_simplify(&p, DEFAULT_TIETZE_BUDGET);
    if !s.presentation.relators().is_empty() {
        return Err(Error::NotExpressible(sector));
    }
    let system = d.system(base)?;
    let phi = system
        .standardizer()
        .ok_or_else(|| Error::MissingStandardizer(system.label().to_string()))?;
    let rank = d.surface().rank();
    let survivors = system.dual_generators().expect("standardizer present");
    let mut lifts = Vec::with_capacity(survivors.len());
    for &e in &survivors {
        let letter = Word::letter(rank, Letter::pos(e));
        let lift = match phi.inverse() {
            Some(inv) => inv.apply(&letter)?,
            None if phi.apply(&letter)? == letter => letter,
            None => return Err(Error::NotExpressible(sector)),
        };
        lifts.push(lift);
    }
    let first = d.system(1)?;
    s.current_in_original
        .iter()
        .map(|w| read_against(&w.substitute(&lifts, rank), first))
        .collect()
}

/// Compares the spine tuples of sectors 1 and 2 inside the simplified
/// fundamental group.
pub fn flip_check(d: &MultisectionDiagram, limits: &SearchLimits) -> Result<NielsenCertificate> {
    let t1 = spine_tuple(d, 1)?;
    let t2 = spine_tuple(d, 2)?;
    let s = tietze_simplify(&d.pi1()?, DEFAULT_TIETZE_BUDGET);
    let r1: Vec<Word> = t1.iter().map(|w| s.rewrite(w)).collect();
    let r2: Vec<Word> = t2.iter().map(|w| s.rewrite(w)).collect();
    distinguish(&s.presentation, &r1, &r2, limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moves_on_pairs() {
        let g = FiniteAbelianGroup::elementary(5, 2).unwrap();
        let t = GeneratingTuple::new(g.clone(), vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(nielsen_move(&t, NielsenMove::Swap12).unwrap().elements(), &[vec![0, 1], vec![1, 0]]);
        assert_eq!(nielsen_move(&t, NielsenMove::Multiply12).unwrap().elements(), &[vec![1, 1], vec![0, 1]]);
        let twice = nielsen_move(&nielsen_move(&t, NielsenMove::Invert1).unwrap(), NielsenMove::Invert1).unwrap();
        assert_eq!(twice, t);
        let z5 = FiniteAbelianGroup::new(vec![5]).unwrap();
        let single = GeneratingTuple::new(z5, vec![vec![2]]).unwrap();
        assert!(matches!(nielsen_move(&single, NielsenMove::Swap12), Err(Error::TupleTooShort { .. })));
    }

    #[test]
    fn orbit_examples() {
        let z5 = FiniteAbelianGroup::new(vec![5]).unwrap();
        let part = orbit_enumerate(&z5, 1).unwrap();
        assert_eq!(part.orbit_count(), 2);
        assert_eq!(part.representative(0), vec![vec![1]]);
        assert_eq!(part.representative(1), vec![vec![2]]);
        assert_eq!(part.orbit_index(&[vec![4]]), Some(0));
        assert_eq!(part.orbit_index(&[vec![3]]), Some(1));
        let z2 = FiniteAbelianGroup::new(vec![2]).unwrap();
        assert_eq!(orbit_enumerate(&z2, 1).unwrap().orbit_count(), 1);
        let g = FiniteAbelianGroup::elementary(5, 2).unwrap();
        let part = orbit_enumerate(&g, 2).unwrap();
        assert_eq!(part.generating_count(), 480);
        assert_eq!(part.orbit_sizes(), &[240, 240]);
    }

    #[test]
    fn bound_is_enforced() {
        let g = FiniteAbelianGroup::elementary(7, 3).unwrap();
        assert!(matches!(orbit_enumerate_bounded(&g, 3, 1000), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn determinant_examples() {
        let g = FiniteAbelianGroup::elementary(5, 2).unwrap();
        let id = GeneratingTuple::new(g.clone(), vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(determinant_invariant(&id).unwrap().members(), vec![1, 4]);
        let t = GeneratingTuple::new(g, vec![vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(determinant_invariant(&t).unwrap().members(), vec![2, 3]);
    }

    #[test]
    fn group_catalogue() {
        let names: Vec<String> = FiniteAbelianGroup::all_up_to(8).iter().map(|g| g.to_string()).collect();
        assert_eq!(
            names,
            vec!["Z/2", "Z/3", "Z/2 + Z/2", "Z/4", "Z/5", "Z/6", "Z/7", "Z/2 + Z/2 + Z/2", "Z/2 + Z/4", "Z/8"]
        );
        assert_eq!(FiniteAbelianGroup::all_up_to(64).iter().filter(|g| g.order() == 64).count(), 11);
    }

    #[test]
    fn generation_matches_closure() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        for a in 0..8 {
            for b in 0..8 {
                let t = vec![g.element(a), g.element(b)];
                let mut seen = [false; 8];
                let mut frontier = vec![g.zero()];
                seen[0] = true;
                while let Some(x) = frontier.pop() {
                    for y in &t {
                        let z = g.add(&x, y);
                        let i = g.index_of(&z);
                        if !seen[i] {
                            seen[i] = true;
                            frontier.push(z);
                        }
                    }
                }
                assert_eq!(g.generates(&t), seen.iter().all(|&s| s), "{t:?}");
            }
        }
    }

    fn w(rank: usize, s: &[i32]) -> Word {
        Word::from_signed(rank, s)
    }

    #[test]
    fn distinguish_examples() {
        let p = GroupPresentation::new(2, vec![w(2, &[1, 2, -1, -2]), w(2, &[1; 5]), w(2, &[2; 5])]).unwrap();
        let c = distinguish(&p, &[w(2, &[1]), w(2, &[2])], &[w(2, &[1]), w(2, &[2, 2])], &SearchLimits::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Distinct);
        let q = c.quotient.as_ref().unwrap();
        assert_eq!(q.group.to_string(), "Z/5 + Z/5");
        assert!(c.verify(&p, &[w(2, &[1]), w(2, &[2])], &[w(2, &[1]), w(2, &[2, 2])]));

        let same = distinguish(&p, &[w(2, &[1])], &[w(2, &[1])], &SearchLimits::default()).unwrap();
        assert_eq!((same.verdict, same.moves.len()), (Verdict::SameOrbit, 0));

        let p5 = GroupPresentation::new(1, vec![w(1, &[1; 5])]).unwrap();
        let c = distinguish(&p5, &[w(1, &[1])], &[w(1, &[-1])], &SearchLimits::default()).unwrap();
        assert_eq!(c.verdict, Verdict::SameOrbit);
        assert_eq!(c.moves, vec![TupleMove::Nielsen(NielsenMove::Invert1)]);
        assert!(c.verify(&p5, &[w(1, &[1])], &[w(1, &[-1])]));
    }

    #[test]
    fn lens_spine_tuples() {
        use crate::constructions::{bisection_from_heegaard, double_bisection, lens_diagram};
        let b = bisection_from_heegaard(&lens_diagram(2, 1).unwrap()).unwrap();
        assert_eq!(spine_tuple(&b, 1).unwrap(), vec![w(2, &[1])]);
        assert_eq!(spine_tuple(&b, 2).unwrap(), vec![w(2, &[2])]);
        let d = double_bisection(&b).unwrap();
        assert_eq!(spine_tuple(&d, 1).unwrap(), spine_tuple(&b, 1).unwrap());
        let c = flip_check(&b, &SearchLimits::default()).unwrap();
        assert_ne!(c.verdict, Verdict::Distinct);
    }
}
