//! Exact bounding boxes of rational polytopes `{x : a_k . x + b_k >= 0}`.
//!
//! A small primal simplex over `BigRational` that walks from a known
//! feasible point to a vertex and then pivots with Bland's rule.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

type Q = BigRational;

fn q(v: i128) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Solves the square system `rows * x = rhs`, or `None` if singular.
fn solve(rows: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let n = rows.len();
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for j in c..=n {
                    let t = &f * &a[c][j];
                    a[r][j] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n].clone()).collect())
}

/// A nonzero vector orthogonal to all `rows` (fewer rows than columns).
fn null_vector(rows: &[Vec<Q>], dim: usize) -> Vec<Q> {
    let mut a: Vec<Vec<Q>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..dim {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free = (0..dim).find(|c| !pivots.contains(c)).expect("rows do not span");
    let mut v = vec![Q::zero(); dim];
    v[free] = q(1);
    for (i, &pc) in pivots.iter().enumerate() {
        v[pc] = -a[i][free].clone();
    }
    v
}

fn dotq(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximum of `c . x` over the bounded, nonempty system `a_k . x + b_k >= 0`,
/// starting from the feasible point `start`.
pub fn maximize(a: &[Vec<i64>], b: &[i128], c: &[i64], start: &[i64]) -> Q {
    let dim = c.len();
    let rows: Vec<Vec<Q>> = a.iter().map(|r| r.iter().map(|&v| q(v as i128)).collect()).collect();
    let consts: Vec<Q> = b.iter().map(|&v| q(v)).collect();
    let cq: Vec<Q> = c.iter().map(|&v| q(v as i128)).collect();
    let mut x: Vec<Q> = start.iter().map(|&v| q(v as i128)).collect();
    let slack = |x: &[Q], k: usize| dotq(&rows[k], x) + &consts[k];
    debug_assert!((0..rows.len()).all(|k| !slack(&x, k).is_negative()));

    // walk to a vertex
    let mut basis: Vec<usize> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let tight: Vec<Vec<Q>> = basis.iter().map(|&k| rows[k].clone()).collect();
        let mut dir = null_vector(&tight, dim);
        if dotq(&cq, &dir).is_negative() {
            dir.iter_mut().for_each(|v| *v = -v.clone());
        }
        let mut best: Option<(Q, usize)> = None;
        for k in 0..rows.len() {
            if basis.contains(&k) {
                continue;
            }
            let rate = dotq(&rows[k], &dir);
            if !rate.is_negative() {
                continue;
            }
            let t = slack(&x, k) / (-rate);
            if best.as_ref().map_or(true, |(bt, _)| t < *bt) {
                best = Some((t, k));
            }
        }
        let (t, k) = best.expect("polytope must be bounded");
        for (xi, di) in x.iter_mut().zip(&dir) {
            *xi += &t * di;
        }
        basis.push(k);
    }

    loop {
        basis.sort_unstable();
        // c = sum mu_k a_k over the basis
        let tr: Vec<Vec<Q>> = (0..dim).map(|j| basis.iter().map(|&k| rows[k][j].clone()).collect()).collect();
        let mu = solve(&tr, &cq).expect("basis rows independent");
        let Some(leave) = (0..dim).find(|&i| mu[i].is_positive()) else {
            return dotq(&cq, &x);
        };
        let brows: Vec<Vec<Q>> = basis.iter().map(|&k| rows[k].clone()).collect();
        let mut e = vec![Q::zero(); dim];
        e[leave] = q(1);
        let dir = solve(&brows, &e).expect("basis rows independent");
        let mut best: Option<(Q, usize)> = None;
        for k in 0..rows.len() {
            if basis.contains(&k) {
                continue;
            }
            let rate = dotq(&rows[k], &dir);
            if !rate.is_negative() {
                continue;
            }
            let t = slack(&x, k) / (-rate);
            if best.as_ref().map_or(true, |(bt, _)| t < *bt) {
                best = Some((t, k));
            }
        }
        let (t, enter) = best.expect("polytope must be bounded");
        for (xi, di) in x.iter_mut().zip(&dir) {
            *xi += &t * di;
        }
        basis[leave] = enter;
    }
}

/// Integer box `[lo, hi]` containing every integer point of the system.
pub fn integer_bounding_box(a: &[Vec<i64>], b: &[i128], start: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let dim = start.len();
    let mut lo = Vec::with_capacity(dim);
    let mut hi = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut c = vec![0i64; dim];
        c[i] = 1;
        let up = maximize(a, b, &c, start);
        c[i] = -1;
        let down = -maximize(a, b, &c, start);
        hi.push(floor(&up));
        lo.push(ceil(&down));
    }
    (lo, hi)
}

fn floor(v: &Q) -> i64 {
    v.numer().div_floor(v.denom()).to_i64().expect("bound fits i64")
}

fn ceil(v: &Q) -> i64 {
    v.numer().div_ceil(v.denom()).to_i64().expect("bound fits i64")
}
