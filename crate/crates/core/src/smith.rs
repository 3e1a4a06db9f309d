//! Exact integer matrices and their Smith normal form.
//!
//! Elimination runs on `i64` with checked arithmetic and restarts on
//! [`BigInt`] the moment any intermediate value would overflow, so the
//! result is always exact.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must have `cols` entries.
    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged row {i}");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone().into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntegerMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.entries[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination. Square matrices only.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal with a
/// divisibility chain on its nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub d: IntegerMatrix,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
    /// Nonzero diagonal entries different from 1, in order.
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }
}

trait Scalar: Clone + PartialEq + fmt::Debug {
    fn s_zero() -> Self;
    fn s_one() -> Self;
    fn s_is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn checked_add(&self, o: &Self) -> Option<Self>;
    fn checked_mul(&self, o: &Self) -> Option<Self>;
    fn checked_neg(&self) -> Option<Self>;
    /// Truncated quotient and remainder.
    fn div_rem(&self, o: &Self) -> Option<(Self, Self)>;
    fn magnitude_lt(&self, o: &Self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl Scalar for i64 {
    fn s_zero() -> Self {
        0
    }
    fn s_one() -> Self {
        1
    }
    fn s_is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn checked_add(&self, o: &Self) -> Option<Self> {
        i64::checked_add(*self, *o)
    }
    fn checked_mul(&self, o: &Self) -> Option<Self> {
        i64::checked_mul(*self, *o)
    }
    fn checked_neg(&self) -> Option<Self> {
        i64::checked_neg(*self)
    }
    fn div_rem(&self, o: &Self) -> Option<(Self, Self)> {
        Some((self.checked_div(*o)?, self.checked_rem(*o)?))
    }
    fn magnitude_lt(&self, o: &Self) -> bool {
        self.unsigned_abs() < o.unsigned_abs()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn s_zero() -> Self {
        Zero::zero()
    }
    fn s_one() -> Self {
        One::one()
    }
    fn s_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn checked_add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn checked_mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn checked_neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_rem(&self, o: &Self) -> Option<(Self, Self)> {
        Some((self / o, self % o))
    }
    fn magnitude_lt(&self, o: &Self) -> bool {
        self.abs() < o.abs()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

struct Overflow;

struct Work<T> {
    rows: usize,
    cols: usize,
    d: Vec<Vec<T>>,
    u: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
}

impl<T: Scalar> Work<T> {
    fn new(a: Vec<Vec<T>>, rows: usize, cols: usize) -> Self {
        let ident = |n: usize| -> Vec<Vec<T>> {
            (0..n)
                .map(|i| (0..n).map(|j| if i == j { T::s_one() } else { T::s_zero() }).collect())
                .collect()
        };
        Work {
            rows,
            cols,
            d: a,
            u: ident(rows),
            v: ident(cols),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.d.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.d.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
    }

    /// row[dst] += c * row[src] in both D and U.
    fn add_row(&mut self, dst: usize, src: usize, c: &T) -> Result<(), Overflow> {
        for mat in [&mut self.d, &mut self.u] {
            for j in 0..mat[0].len() {
                let delta = mat[src][j].checked_mul(c).ok_or(Overflow)?;
                mat[dst][j] = mat[dst][j].checked_add(&delta).ok_or(Overflow)?;
            }
        }
        Ok(())
    }

    /// col[dst] += c * col[src] in both D and V.
    fn add_col(&mut self, dst: usize, src: usize, c: &T) -> Result<(), Overflow> {
        for mat in [&mut self.d, &mut self.v] {
            for row in mat.iter_mut() {
                let delta = row[src].checked_mul(c).ok_or(Overflow)?;
                row[dst] = row[dst].checked_add(&delta).ok_or(Overflow)?;
            }
        }
        Ok(())
    }

    fn negate_row(&mut self, i: usize) -> Result<(), Overflow> {
        for mat in [&mut self.d, &mut self.u] {
            for x in mat[i].iter_mut() {
                *x = x.checked_neg().ok_or(Overflow)?;
            }
        }
        Ok(())
    }

    /// Smallest nonzero magnitude in the trailing block, first in row-major order.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.d[i][j];
                if x.s_is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if !x.magnitude_lt(&self.d[bi][bj]) => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    fn run(&mut self) -> Result<(), Overflow> {
        let steps = self.rows.min(self.cols);
        for t in 0..steps {
            loop {
                let Some((pi, pj)) = self.find_pivot(t) else {
                    return Ok(());
                };
                if pi != t {
                    self.swap_rows(pi, t);
                }
                if pj != t {
                    self.swap_cols(pj, t);
                }
                let pivot = self.d[t][t].clone();
                let mut clean = true;
                for i in t + 1..self.rows {
                    if self.d[i][t].s_is_zero() {
                        continue;
                    }
                    let (q, r) = self.d[i][t].div_rem(&pivot).ok_or(Overflow)?;
                    self.add_row(i, t, &q.checked_neg().ok_or(Overflow)?)?;
                    if !r.s_is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..self.cols {
                    if self.d[t][j].s_is_zero() {
                        continue;
                    }
                    let (q, r) = self.d[t][j].div_rem(&pivot).ok_or(Overflow)?;
                    self.add_col(j, t, &q.checked_neg().ok_or(Overflow)?)?;
                    if !r.s_is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    continue;
                }
                let mut offender = None;
                'scan: for i in t + 1..self.rows {
                    for j in t + 1..self.cols {
                        let (_, r) = self.d[i][j].div_rem(&pivot).ok_or(Overflow)?;
                        if !r.s_is_zero() {
                            offender = Some(i);
                            break 'scan;
                        }
                    }
                }
                match offender {
                    Some(i) => self.add_row(t, i, &T::s_one())?,
                    None => break,
                }
            }
            if self.d[t][t].is_negative() {
                self.negate_row(t)?;
            }
        }
        Ok(())
    }
}

fn to_matrix<T: Scalar>(rows: &[Vec<T>], r: usize, c: usize) -> IntegerMatrix {
    let mut m = IntegerMatrix::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m.set(i, j, x.to_big());
        }
    }
    m
}

fn finish<T: Scalar>(w: Work<T>, a: &IntegerMatrix) -> SmithForm {
    let d = to_matrix(&w.d, w.rows, w.cols);
    let u = to_matrix(&w.u, w.rows, w.rows);
    let v = to_matrix(&w.v, w.cols, w.cols);
    assert_eq!(u.mul(a).mul(&v), d, "Smith form identity U*A*V = D violated");
    let diag: Vec<BigInt> = (0..w.rows.min(w.cols)).map(|i| d.get(i, i).clone()).collect();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    for pair in diag[..rank].windows(2) {
        assert!(
            (&pair[1] % &pair[0]).is_zero(),
            "divisibility chain violated: {} does not divide {}",
            pair[0],
            pair[1]
        );
    }
    let invariant_factors = diag[..rank].iter().filter(|x| !x.is_one()).cloned().collect();
    SmithForm {
        d,
        u,
        v,
        invariant_factors,
        rank,
    }
}

/// Computes the Smith normal form of `a`.
///
/// The pivot rule is deterministic: the entry of least magnitude in the
/// trailing block, first in row-major order. `U*A*V = D` and the
/// divisibility chain are checked on every call.
pub fn smith_normal_form(a: &IntegerMatrix) -> SmithForm {
    let (r, c) = (a.rows(), a.cols());
    let small: Option<Vec<Vec<i64>>> = (0..r)
        .map(|i| (0..c).map(|j| a.get(i, j).to_i64()).collect())
        .collect();
    if let Some(rows) = small {
        let mut w = Work::new(rows, r, c);
        if w.run().is_ok() {
            return finish(w, a);
        }
    }
    let rows: Vec<Vec<BigInt>> = (0..r)
        .map(|i| (0..c).map(|j| a.get(i, j).clone()).collect())
        .collect();
    let mut w = Work::new(rows, r, c);
    if w.run().is_err() {
        unreachable!("arbitrary precision arithmetic cannot overflow");
    }
    finish(w, a)
}
