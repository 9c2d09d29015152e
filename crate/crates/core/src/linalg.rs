//! Exact integer and rational linear algebra.
//!
//! Everything here is exact. Hot routines are written against [`ExactInt`](crate::exact::ExactInt) so
//! they can run on checked `i128` first and fall back to [`BigInt`] when an
//! intermediate value overflows (see [`with_fallback`](crate::exact::with_fallback)).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::with_fallback;

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for c in 0..self.cols {
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self[(r, c)])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        Ok(IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n.max(1), n.max(1)).expect("nonempty");
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let mut m = Self::identity(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = BigInt::from(e);
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut m = Self::zeros(r, c)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::RaggedRows { row: i, expected: c, found: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(v);
            }
        }
        Ok(m)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns<R: AsRef<[i64]>>(cols: &[R]) -> Result<Self> {
        Ok(Self::from_rows(cols)?.transpose())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows).expect("nonempty");
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch);
        }
        let mut out = Self::zeros(self.rows, rhs.cols)?;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * &rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::ShapeMismatch);
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Entries as `i64`, or `None` if any entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|v| v.to_i64()).collect())
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)].is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for c in 0..self.cols {
            let v = &self[(src, c)] * q;
            self[(dst, c)] -= v;
        }
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for r in 0..self.rows {
            let v = &self[(r, src)] * q;
            self[(r, dst)] -= v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -&self[(r, c)];
            self[(r, c)] = v;
        }
    }
}

/// Result of [`smith_normal_form`]: `u * m * v == d`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// The diagonal entries `d_1 | d_2 | ...` (length `min(rows, cols)`).
    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Smith normal form with smallest-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for r in t..rows {
                for c in t..cols {
                    let x = &d[(r, c)];
                    if x.is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(br, bc)| x.abs() < d[(br, bc)].abs()) {
                        best = Some((r, c));
                    }
                }
            }
            let Some((pr, pc)) = best else {
                return SmithForm { d, u, v };
            };
            d.swap_rows(t, pr);
            u.swap_rows(t, pr);
            d.swap_cols(t, pc);
            v.swap_cols(t, pc);

            let pivot = d[(t, t)].clone();
            let mut dirty = false;
            for r in t + 1..rows {
                if d[(r, t)].is_zero() {
                    continue;
                }
                let q = d[(r, t)].div_floor(&pivot);
                d.row_axpy(r, t, &q);
                u.row_axpy(r, t, &q);
                dirty |= !d[(r, t)].is_zero();
            }
            for c in t + 1..cols {
                if d[(t, c)].is_zero() {
                    continue;
                }
                let q = d[(t, c)].div_floor(&pivot);
                d.col_axpy(c, t, &q);
                v.col_axpy(c, t, &q);
                dirty |= !d[(t, c)].is_zero();
            }
            if dirty {
                continue;
            }
            // divisibility: fold an offending row into row t and go again
            let offender = (t + 1..rows).find(|&r| {
                (t + 1..cols).any(|c| !d[(r, c)].is_multiple_of(&pivot))
            });
            if let Some(r) = offender {
                let minus_one = -BigInt::one();
                d.row_axpy(t, r, &minus_one);
                u.row_axpy(t, r, &minus_one);
                continue;
            }
            if pivot.is_negative() {
                d.negate_row(t);
                u.negate_row(t);
            }
            break;
        }
    }
    SmithForm { d, u, v }
}

/// Row-style Hermite normal form: returns `(h, u)` with `u * m == h`.
///
/// Pivots are positive and entries above a pivot are reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows, m.cols);
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                if !h[(i, c)].is_zero()
                    && best.map_or(true, |b| h[(i, c)].abs() < h[(b, c)].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            u.swap_rows(r, b);
            let pivot = h[(r, c)].clone();
            let mut done = true;
            for i in r + 1..rows {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = h[(i, c)].div_floor(&pivot);
                h.row_axpy(i, r, &q);
                u.row_axpy(i, r, &q);
                done &= h[(i, c)].is_zero();
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let pivot = h[(r, c)].clone();
        for i in 0..r {
            let q = h[(i, c)].div_floor(&pivot);
            if !q.is_zero() {
                h.row_axpy(i, r, &q);
                u.row_axpy(i, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Fraction-free (Bareiss) determinant over any [`ExactInt`](crate::exact::ExactInt).
pub fn bareiss_det<T: crate::exact::ExactInt>(mut a: Vec<Vec<T>>) -> Option<T> {
    let n = a.len();
    if n == 0 {
        return Some(T::one());
    }
    let mut sign = 1;
    let mut prev = T::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Some(T::zero());
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].mul(&a[k][k])?.sub(&a[i][k].mul(&a[k][j])?)?;
                a[i][j] = t.div_exact(&prev);
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        det.neg()
    } else {
        Some(det)
    }
}

/// Exact determinant of a square matrix.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let rows: Vec<Vec<BigInt>> = (0..m.rows).map(|r| m.row(r).to_vec()).collect();
    Ok(with_fallback(
        || {
            let small: Option<Vec<Vec<i128>>> = rows
                .iter()
                .map(|r| r.iter().map(<i128 as crate::exact::ExactInt>::from_big).collect())
                .collect();
            bareiss_det(small?).map(|d| BigInt::from(d))
        },
        || bareiss_det(rows.clone()),
    ))
}

/// Determinant of a small `i64` matrix given by rows.
pub fn det_i64<R: AsRef<[i64]>>(rows: &[R]) -> BigInt {
    with_fallback(
        || {
            let a = rows
                .iter()
                .map(|r| r.as_ref().iter().map(|&x| x as i128).collect())
                .collect();
            bareiss_det::<i128>(a).map(BigInt::from)
        },
        || {
            let a = rows
                .iter()
                .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            bareiss_det::<BigInt>(a)
        },
    )
}

/// Rank of a list of `i64` vectors (fraction-free elimination).
pub fn rank_i64<R: AsRef<[i64]>>(rows: &[R]) -> usize {
    with_fallback(
        || rank_generic::<i128>(rows.iter().map(|r| r.as_ref().iter().map(|&x| x as i128).collect()).collect()),
        || rank_generic::<BigInt>(rows.iter().map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect()).collect()),
    )
}

pub(crate) fn rank_generic<T: crate::exact::ExactInt>(mut a: Vec<Vec<T>>) -> Option<usize> {
    let n = a.len();
    if n == 0 {
        return Some(0);
    }
    let m = a[0].len();
    let mut rank = 0;
    for c in 0..m {
        let Some(p) = (rank..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let g = a[rank][c].gcd(&a[i][c]);
            let f_piv = a[i][c].div_exact(&g);
            let f_row = a[rank][c].div_exact(&g);
            for j in c..m {
                a[i][j] = a[i][j].mul(&f_row)?.sub(&a[rank][j].mul(&f_piv)?)?;
            }
            reduce_row(&mut a[i])?;
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    Some(rank)
}

/// Divides a row by the gcd of its entries (sign kept).
pub(crate) fn reduce_row<T: crate::exact::ExactInt>(row: &mut [T]) -> Option<()> {
    let mut g = T::zero();
    for x in row.iter() {
        g = g.gcd(x);
    }
    if !g.is_zero() && g != T::one() {
        for x in row.iter_mut() {
            *x = x.div_exact(&g);
        }
    }
    Some(())
}

/// Divides `v` by the gcd of its entries. The sign of every entry is kept.
pub fn primitive(v: &[BigInt]) -> Result<Vec<BigInt>> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// `i64` version of [`primitive`].
pub fn primitive_i64(v: &[i64]) -> Result<Vec<i64>> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|x| x / g).collect())
}

/// A vector of exact rationals, each in lowest terms with positive denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalVector(pub Vec<BigRational>);

impl RationalVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }
}

impl std::ops::Index<usize> for RationalVector {
    type Output = BigRational;
    fn index(&self, i: usize) -> &BigRational {
        &self.0[i]
    }
}

/// Solves `m x = b` exactly for square nonsingular `m`.
pub fn solve_rational(m: &IntMatrix, b: &[BigInt]) -> Result<RationalVector> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    if b.len() != m.rows {
        return Err(Error::ShapeMismatch);
    }
    let n = m.rows;
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|r| {
            let mut row: Vec<BigRational> =
                m.row(r).iter().map(|x| BigRational::from_integer(x.clone())).collect();
            row.push(BigRational::from_integer(b[r].clone()));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).ok_or(Error::Singular)?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = a[r][c].clone();
            for j in c..=n {
                let t = &f * &a[c][j];
                a[r][j] -= t;
            }
        }
    }
    Ok(RationalVector(a.into_iter().map(|row| row[n].clone()).collect()))
}

/// Adjugate of a square matrix together with its determinant: `adj * m = det * I`.
pub(crate) fn adjugate<T: crate::exact::ExactInt>(m: &[Vec<T>]) -> Option<(Vec<Vec<T>>, T)> {
    let n = m.len();
    // Gauss-Jordan over fractions kept as (integer matrix, common denominator)
    // via Bareiss on [m | I].
    let mut a: Vec<Vec<T>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { T::one() } else { T::zero() }));
            r
        })
        .collect();
    let mut sign = 1;
    let mut prev = T::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let p = (k + 1..n).find(|&i| !a[i][k].is_zero())?;
            a.swap(k, p);
            sign = -sign;
        }
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..2 * n {
                if j == k {
                    continue;
                }
                let t = a[i][j].mul(&a[k][k])?.sub(&a[i][k].mul(&a[k][j])?)?;
                a[i][j] = t.div_exact(&prev);
            }
            a[i][k] = T::zero();
        }
        prev = a[k][k].clone();
    }
    // now a = [det*I | adj] up to the sign from row swaps
    let det = prev;
    let mut adj: Vec<Vec<T>> = a.into_iter().map(|r| r[n..].to_vec()).collect();
    let det = if sign < 0 {
        for row in adj.iter_mut() {
            for x in row.iter_mut() {
                *x = x.neg()?;
            }
        }
        det.neg()?
    } else {
        det
    };
    let _ = &mut adj;
    Some((adj, det))
}
