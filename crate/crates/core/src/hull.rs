//! Facets of a pointed full-dimensional cone given by generators.
//!
//! Incremental double description: facet normals play the role of extreme
//! rays of the dual cone, generators are added one at a time, and new facets
//! are formed from adjacent (cut, kept) pairs. Adjacency is the algebraic
//! rank test on the common incidence set.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact::{with_fallback, ExactInt};
use crate::linalg::{adjugate, rank_generic, reduce_row};

#[derive(Clone, Debug)]
pub struct ConeFacet {
    /// Primitive inner normal: `normal . g >= 0` for every generator.
    pub normal: Vec<BigInt>,
    /// Indices of the generators lying on the facet, ascending.
    pub incidence: Vec<usize>,
}

/// Facets of the cone spanned by `gens` (all of the same length `D`).
///
/// Fails with [`Error::DimensionDeficient`] (reporting the linear rank) if
/// the generators do not span `R^D`. The cone must be pointed.
pub fn cone_facets(gens: &[Vec<i64>]) -> Result<Vec<ConeFacet>> {
    let dim = gens.first().map_or(0, Vec::len);
    if dim == 0 {
        return Err(Error::DimensionDeficient { rank: 0, dim: 0 });
    }
    let rank = crate::linalg::rank_i64(gens);
    if rank < dim {
        return Err(Error::DimensionDeficient { rank, dim });
    }
    Ok(with_fallback(
        || double_description::<i128>(gens),
        || double_description::<BigInt>(gens),
    ))
}

struct Facet<T> {
    normal: Vec<T>,
    incidence: Vec<usize>,
}

fn dot<T: ExactInt>(a: &[T], b: &[T]) -> Option<T> {
    let mut s = T::zero();
    for (x, y) in a.iter().zip(b) {
        s = s.add(&x.mul(y)?)?;
    }
    Some(s)
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn double_description<T: ExactInt>(gens_i64: &[Vec<i64>]) -> Option<Vec<ConeFacet>> {
    let dim = gens_i64[0].len();
    let gens: Vec<Vec<T>> = gens_i64
        .iter()
        .map(|g| g.iter().map(|&x| T::from_i64(x)).collect())
        .collect();

    // greedy basis in input order
    let mut basis: Vec<usize> = Vec::with_capacity(dim);
    for (i, g) in gens.iter().enumerate() {
        let mut rows: Vec<Vec<T>> = basis.iter().map(|&b| gens[b].clone()).collect();
        rows.push(g.clone());
        if rank_generic(rows)? == basis.len() + 1 {
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        }
    }
    let m: Vec<Vec<T>> = basis.iter().map(|&b| gens[b].clone()).collect();
    let (adj, det) = adjugate(&m)?;
    let positive = det.signum() > 0;
    let mut facets: Vec<Facet<T>> = Vec::new();
    for i in 0..dim {
        let mut normal: Vec<T> = (0..dim).map(|r| adj[r][i].clone()).collect();
        if !positive {
            for x in normal.iter_mut() {
                *x = x.neg()?;
            }
        }
        reduce_row(&mut normal)?;
        let mut incidence: Vec<usize> =
            basis.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &b)| b).collect();
        incidence.sort_unstable();
        facets.push(Facet { normal, incidence });
    }

    let mut in_basis = vec![false; gens.len()];
    for &b in &basis {
        in_basis[b] = true;
    }
    for (gi, g) in gens.iter().enumerate() {
        if in_basis[gi] {
            continue;
        }
        let values: Vec<T> = facets.iter().map(|f| dot(&f.normal, g)).collect::<Option<_>>()?;
        if values.iter().all(|v| v.signum() >= 0) {
            for (f, v) in facets.iter_mut().zip(&values) {
                if v.is_zero() {
                    let at = f.incidence.partition_point(|&x| x < gi);
                    f.incidence.insert(at, gi);
                }
            }
            continue;
        }
        let mut created: Vec<Facet<T>> = Vec::new();
        for (ni, nf) in facets.iter().enumerate() {
            if values[ni].signum() >= 0 {
                continue;
            }
            for (pi, pf) in facets.iter().enumerate() {
                if values[pi].signum() <= 0 {
                    continue;
                }
                let common = intersect_sorted(&nf.incidence, &pf.incidence);
                if common.len() + 2 < dim {
                    continue;
                }
                let rows: Vec<Vec<T>> = common.iter().map(|&c| gens[c].clone()).collect();
                if rank_generic(rows)? + 2 != dim {
                    continue;
                }
                let neg_val = values[ni].neg()?;
                let mut normal: Vec<T> = Vec::with_capacity(dim);
                for k in 0..dim {
                    normal.push(values[pi].mul(&nf.normal[k])?.add(&neg_val.mul(&pf.normal[k])?)?);
                }
                reduce_row(&mut normal)?;
                let mut incidence = common;
                let at = incidence.partition_point(|&x| x < gi);
                incidence.insert(at, gi);
                created.push(Facet { normal, incidence });
            }
        }
        let mut kept: Vec<Facet<T>> = Vec::with_capacity(facets.len() + created.len());
        for (f, v) in facets.into_iter().zip(values) {
            match v.signum() {
                -1 => {}
                0 => {
                    let mut f = f;
                    let at = f.incidence.partition_point(|&x| x < gi);
                    f.incidence.insert(at, gi);
                    kept.push(f);
                }
                _ => kept.push(f),
            }
        }
        kept.extend(created);
        facets = kept;
    }
    Some(
        facets
            .into_iter()
            .map(|f| {
                let mut incidence = f.incidence;
                incidence.sort_unstable();
                ConeFacet { normal: f.normal.iter().map(ExactInt::to_big).collect(), incidence }
            })
            .collect(),
    )
}
