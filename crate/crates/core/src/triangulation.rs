//! Placing triangulations of finite point sets.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::linalg::rank_i64;

/// Placing triangulation of `points`, inserting them in the given order.
///
/// Each simplex is a sorted list of `k + 1` indices, where `k` is the
/// dimension of the affine hull of the points. Points must be distinct.
pub fn placing(points: &[Vec<i64>]) -> Vec<Vec<usize>> {
    if points.is_empty() {
        return Vec::new();
    }
    let homog = |i: usize| {
        let mut v = points[i].clone();
        v.push(1);
        v
    };
    let mut simplices: Vec<Vec<usize>> = vec![vec![0]];
    let mut placed: Vec<usize> = vec![0];
    let mut rank = 1;
    for i in 1..points.len() {
        let mut rows: Vec<Vec<i64>> = placed.iter().map(|&p| homog(p)).collect();
        rows.push(homog(i));
        if rank_i64(&rows) > rank {
            rank += 1;
            for s in simplices.iter_mut() {
                s.push(i);
            }
        } else {
            let visible = visible_boundary_faces(points, &simplices, &points[i]);
            for mut face in visible {
                face.push(i);
                simplices.push(face);
            }
        }
        placed.push(i);
    }
    for s in simplices.iter_mut() {
        s.sort_unstable();
    }
    simplices
}

/// Boundary faces of the triangulated region that `p` sees.
fn visible_boundary_faces(points: &[Vec<i64>], simplices: &[Vec<usize>], p: &[i64]) -> Vec<Vec<usize>> {
    // face -> (count, owning simplex, apex)
    let mut faces: HashMap<Vec<usize>, (usize, usize, usize)> = HashMap::new();
    for (si, s) in simplices.iter().enumerate() {
        for (ai, &apex) in s.iter().enumerate() {
            let mut face: Vec<usize> = s.iter().enumerate().filter(|&(j, _)| j != ai).map(|(_, &v)| v).collect();
            face.sort_unstable();
            faces.entry(face).and_modify(|e| e.0 += 1).or_insert((1, si, apex));
        }
    }
    let mut out: Vec<Vec<usize>> = faces
        .into_iter()
        .filter(|(_, (count, _, _))| *count == 1)
        .filter(|(_, (_, si, apex))| {
            let s = &simplices[*si];
            let lambda = barycentric(points, s, p);
            let pos = s.iter().position(|v| v == apex).expect("apex in simplex");
            lambda[pos].is_negative()
        })
        .map(|(f, _)| f)
        .collect();
    out.sort();
    out
}

/// Affine coordinates of `p` with respect to the affinely independent
/// vertices `simplex` (p must lie in their affine hull).
pub(crate) fn barycentric(points: &[Vec<i64>], simplex: &[usize], p: &[i64]) -> Vec<BigRational> {
    let d = p.len();
    let k = simplex.len();
    // (d+1) x (k+1) augmented system, columns = homogenized vertices
    let mut a: Vec<Vec<BigRational>> = (0..=d)
        .map(|r| {
            let mut row: Vec<BigRational> = simplex
                .iter()
                .map(|&v| {
                    let x = if r < d { points[v][r] } else { 1 };
                    BigRational::from_integer(BigInt::from(x))
                })
                .collect();
            let rhs = if r < d { p[r] } else { 1 };
            row.push(BigRational::from_integer(BigInt::from(rhs)));
            row
        })
        .collect();
    let mut r = 0;
    let mut pivot_cols = Vec::with_capacity(k);
    for c in 0..k {
        let Some(pr) = (r..=d).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, pr);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..=d {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..=k {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    debug_assert_eq!(pivot_cols.len(), k, "simplex vertices must be affinely independent");
    (0..k).map(|i| a[i][k].clone()).collect()
}
