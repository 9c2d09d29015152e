//! Simplicial cones, their fundamental parallelepipeds, and normality.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{adjugate, smith_normal_form, IntMatrix};
use crate::polytope::{FacetForm, LatticePolytope, LatticeVector};

/// A simplicial cone `cone(g_1, ..., g_n)` in `R^n` with linearly independent
/// integer generators, prepared for exact coordinate computations.
#[derive(Clone, Debug)]
pub struct SimplicialCone {
    generators: Vec<Vec<i64>>,
    // adj * A = index * I, with A the matrix whose columns are the generators
    adj: Vec<Vec<i128>>,
    index: u64,
    // columns of U^-1 and SNF invariants: residues of Z^n / A Z^n are
    // sum r_i * cols[i] with 0 <= r_i < invariants[i]
    residue_cols: Vec<Vec<i128>>,
    invariants: Vec<u64>,
}

impl SimplicialCone {
    /// Prepares the cone spanned by `generators` (each of length `n`, `n` of them).
    pub fn new<V: AsRef<[i64]>>(generators: &[V]) -> Result<Self> {
        let n = generators.len();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let gens: Vec<Vec<i64>> = generators.iter().map(|g| g.as_ref().to_vec()).collect();
        if let Some(g) = gens.iter().find(|g| g.len() != n) {
            return Err(Error::NotSquare { rows: g.len(), cols: n });
        }
        let a = IntMatrix::from_columns(&gens)?;
        let rows = a.to_i64_rows().expect("built from i64");
        if num_traits::Zero::is_zero(&crate::linalg::det_i64(&rows)) {
            return Err(Error::Singular);
        }
        let rows128: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let (mut adj, det) = adjugate(&rows128).ok_or(Error::CoordinateOverflow)?;
        if det < 0 {
            for row in adj.iter_mut() {
                for x in row.iter_mut() {
                    *x = -*x;
                }
            }
        }
        let index = det.unsigned_abs().to_u64().ok_or(Error::CoordinateOverflow)?;

        let snf = smith_normal_form(&a);
        let u = snf.u.to_i64_rows().ok_or(Error::CoordinateOverflow)?;
        let u128: Vec<Vec<i128>> = u.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let (mut u_inv, u_det) = adjugate(&u128).ok_or(Error::CoordinateOverflow)?;
        if u_det < 0 {
            for row in u_inv.iter_mut() {
                for x in row.iter_mut() {
                    *x = -*x;
                }
            }
        }
        let mut residue_cols = Vec::new();
        let mut invariants = Vec::new();
        for (i, d) in snf.invariants().iter().enumerate() {
            let d = d.to_u64().ok_or(Error::CoordinateOverflow)?;
            if d > 1 {
                residue_cols.push((0..n).map(|r| u_inv[r][i]).collect());
                invariants.push(d);
            }
        }
        Ok(SimplicialCone { generators: gens, adj, index, residue_cols, invariants })
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    /// `|det|` of the generator matrix, the number of points of [`Self::lpar`].
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Coordinates of `x` in the generator basis, scaled by the index.
    pub fn scaled_coordinates(&self, x: &[i64]) -> Vec<i128> {
        self.adj
            .iter()
            .map(|row| row.iter().zip(x).map(|(&a, &b)| a * b as i128).sum())
            .collect()
    }

    /// Whether `x` lies in the (closed) cone.
    pub fn contains(&self, x: &[i64]) -> bool {
        self.scaled_coordinates(x).iter().all(|&c| c >= 0)
    }

    /// First scaled coordinate vector `index * l` of a parallelepiped point,
    /// in residue order, that satisfies `pred`. Points themselves are not formed.
    pub fn find_coordinates(&self, mut pred: impl FnMut(&[i128]) -> bool) -> Option<Vec<i128>> {
        let det = self.index as i128;
        let col_coords = self.column_coordinates();
        let mut counter = vec![0u64; self.invariants.len()];
        let mut mu = vec![0i128; self.dim()];
        loop {
            if pred(&mu) {
                return Some(mu);
            }
            let mut i = 0;
            loop {
                if i == counter.len() {
                    return None;
                }
                counter[i] += 1;
                for (m, c) in mu.iter_mut().zip(&col_coords[i]) {
                    *m = (*m + c) % det;
                }
                if counter[i] < self.invariants[i] {
                    break;
                }
                counter[i] = 0;
                i += 1;
            }
        }
    }

    /// The point `(1/index) sum mu_i g_i` for scaled coordinates `mu`.
    pub fn point_of(&self, mu: &[i128]) -> Vec<i64> {
        let det = self.index as i128;
        (0..self.dim())
            .map(|r| ((0..self.dim()).map(|i| self.generators[i][r] as i128 * mu[i]).sum::<i128>() / det) as i64)
            .collect()
    }

    fn column_coordinates(&self) -> Vec<Vec<i128>> {
        let det = self.index as i128;
        self.residue_cols
            .iter()
            .map(|c| self.adj.iter().map(|row| row.iter().zip(c).map(|(a, b)| a * b).sum::<i128>().rem_euclid(det)).collect())
            .collect()
    }

    /// Visits every lattice point of the semi-open parallelepiped
    /// `{sum l_i g_i : 0 <= l_i < 1}` together with its scaled coordinates
    /// `index * l`. The order follows the residue enumeration.
    pub fn for_each_lpar(&self, mut visit: impl FnMut(&[i128], &[i64])) {
        let n = self.dim();
        let det = self.index as i128;
        let col_coords = self.column_coordinates();
        let mut counter = vec![0u64; self.invariants.len()];
        let mut mu = vec![0i128; n];
        let mut y = vec![0i64; n];
        loop {
            for (r, yr) in y.iter_mut().enumerate() {
                let s: i128 = (0..n).map(|i| self.generators[i][r] as i128 * mu[i]).sum();
                *yr = (s / det) as i64;
            }
            visit(&mu, &y);
            // mixed-radix increment
            let mut i = 0;
            loop {
                if i == counter.len() {
                    return;
                }
                counter[i] += 1;
                for (m, c) in mu.iter_mut().zip(&col_coords[i]) {
                    *m = (*m + c) % det;
                }
                if counter[i] < self.invariants[i] {
                    break;
                }
                counter[i] = 0;
                // the column was added invariants[i] times, which is 0 mod A
                i += 1;
            }
        }
    }

    /// All lattice points of the semi-open parallelepiped, lexicographically sorted.
    pub fn lpar(&self) -> Vec<LatticeVector> {
        let mut out = Vec::with_capacity(self.index as usize);
        self.for_each_lpar(|_, y| out.push(LatticeVector::new(y.to_vec())));
        out.sort();
        out
    }

    /// Parallelepiped points whose coordinates sum to `deg` (for homogenized
    /// generators this is the last coordinate).
    pub fn lpar_of_coordinate_sum(&self, deg: i64) -> Vec<LatticeVector> {
        let target = deg as i128 * self.index as i128;
        let mut out = Vec::new();
        self.for_each_lpar(|mu, y| {
            if mu.iter().sum::<i128>() == target {
                out.push(LatticeVector::new(y.to_vec()));
            }
        });
        out.sort();
        out
    }
}

/// Lattice points of the semi-open parallelepiped spanned by the columns of `generators`.
pub fn lpar(generators: &IntMatrix) -> Result<SimplicialConeData> {
    if !generators.is_square() {
        return Err(Error::NotSquare { rows: generators.rows(), cols: generators.cols() });
    }
    let cols = generators.transpose().to_i64_rows().ok_or(Error::CoordinateOverflow)?;
    let cone = SimplicialCone::new(&cols)?;
    let points = cone.lpar();
    let degrees = points.iter().map(|p| *p.last().expect("nonempty")).collect();
    Ok(SimplicialConeData { cone, points, degrees })
}

/// A simplicial cone with its parallelepiped points listed.
#[derive(Clone, Debug)]
pub struct SimplicialConeData {
    pub cone: SimplicialCone,
    pub points: Vec<LatticeVector>,
    /// Last coordinate of each point (the degree for homogenized generators).
    pub degrees: Vec<i64>,
}

impl SimplicialConeData {
    pub fn index(&self) -> u64 {
        self.cone.index()
    }
}

/// Number of parallelepiped points at each height of a homogenized facet form.
pub fn lpar_height_census(data: &SimplicialConeData, f: &FacetForm) -> BTreeMap<i128, usize> {
    let mut out = BTreeMap::new();
    for p in &data.points {
        *out.entry(f.eval_homogeneous(p)).or_insert(0) += 1;
    }
    out
}

/// Outcome of a normality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalityVerdict {
    /// `(k, x)` with `x` in `L(kP)` but not in `L((k-1)P) + L(P)`.
    pub witness: Option<(u32, LatticeVector)>,
}

impl NormalityVerdict {
    pub fn is_normal(&self) -> bool {
        self.witness.is_none()
    }
}

/// Decides normality by checking `L(kP) = L((k-1)P) + L(P)` for `k = 2..d-1`.
pub fn is_normal(p: &LatticePolytope) -> NormalityVerdict {
    let d = p.dim() as i64;
    for k in 2..d {
        if let Some(x) = first_undecomposable(p, k) {
            return NormalityVerdict { witness: Some((k as u32, x)) };
        }
    }
    NormalityVerdict { witness: None }
}

/// Least `x` in `L(kP)` that is not `p + y` with `p` in `L(P)` and `y` in `L((k-1)P)`.
pub(crate) fn first_undecomposable(q: &LatticePolytope, k: i64) -> Option<LatticeVector> {
    let base = q.lattice_points();
    let prev: HashSet<LatticeVector> = q.lattice_points_dilated(k - 1).into_iter().collect();
    let pts = q.lattice_points_dilated(k);
    pts.into_par_iter().find_first(|x| !base.iter().any(|b| prev.contains(&x.sub(b))))
}

/// Literal comparison of `L(cP)` with the `c`-fold sumset of `L(P)` for
/// `c = 2..=kmax`. Only meant for small polytopes.
pub fn is_normal_bruteforce(p: &LatticePolytope, kmax: u32) -> NormalityVerdict {
    let base: Vec<LatticeVector> = p.lattice_points().to_vec();
    let mut sums: BTreeSet<LatticeVector> = base.iter().cloned().collect();
    for c in 2..=kmax {
        sums = sums.iter().flat_map(|s| base.iter().map(move |b| s.add(b))).collect();
        let target = p.lattice_points_dilated(c as i64);
        if let Some(x) = target.iter().find(|x| !sums.contains(*x)) {
            return NormalityVerdict { witness: Some((c, x.clone())) };
        }
    }
    NormalityVerdict { witness: None }
}

/// Triangulation of facet `f` obtained by placing its vertices in stored order.
pub fn placing_triangulation(p: &LatticePolytope, f: usize) -> Vec<Vec<LatticeVector>> {
    p.facet_triangulation(f)
        .into_iter()
        .map(|s| s.into_iter().map(|i| p.vertices()[i].clone()).collect())
        .collect()
}
