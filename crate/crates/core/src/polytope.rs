//! Full-dimensional lattice polytopes in `Z^d`.
//!
//! A [`LatticePolytope`] is built by [`LatticePolytope::convex_hull`] and is
//! immutable afterwards. Facets are stored as primitive integer height
//! functions so that all downstream arithmetic happens in lattice-height units.

use std::fmt;
use std::ops::Deref;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull::cone_facets;
use crate::linalg::{det_i64, rank_i64};
use crate::{lp, triangulation};

/// Largest supported vertex coordinate magnitude.
pub const COORD_LIMIT: i64 = 1 << 40;
/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 16;

/// A point of `Z^d`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(Vec<i64>);

impl LatticeVector {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticeVector(coords)
    }

    pub fn zero(dim: usize) -> Self {
        LatticeVector(vec![0; dim])
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0; dim];
        v[i] = 1;
        LatticeVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<i64> {
        self.0
    }

    pub fn add(&self, other: &[i64]) -> LatticeVector {
        LatticeVector(self.0.iter().zip(other).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &[i64]) -> LatticeVector {
        LatticeVector(self.0.iter().zip(other).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| a * k).collect())
    }

    /// Homogenized copy `(x, 1)`.
    pub fn homogenize(&self) -> Vec<i64> {
        let mut v = self.0.clone();
        v.push(1);
        v
    }
}

impl Deref for LatticeVector {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl AsRef<[i64]> for LatticeVector {
    fn as_ref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

impl<const N: usize> From<[i64; N]> for LatticeVector {
    fn from(v: [i64; N]) -> Self {
        LatticeVector(v.to_vec())
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

/// Primitive affine height function `x -> alpha . x + beta` of a facet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FacetForm {
    pub alpha: Vec<i64>,
    pub beta: i64,
}

impl FacetForm {
    #[inline]
    pub fn linear(&self, x: &[i64]) -> i128 {
        self.alpha.iter().zip(x).map(|(&a, &b)| a as i128 * b as i128).sum()
    }

    /// `ht_F(x)`.
    #[inline]
    pub fn eval(&self, x: &[i64]) -> i128 {
        self.linear(x) + self.beta as i128
    }

    /// Height of `x` against the facet of the dilation `kP`.
    #[inline]
    pub fn eval_dilated(&self, x: &[i64], k: i64) -> i128 {
        self.linear(x) + self.beta as i128 * k as i128
    }

    /// Homogenized form on `(x, deg)`.
    #[inline]
    pub fn eval_homogeneous(&self, y: &[i64]) -> i128 {
        let d = self.alpha.len();
        self.linear(&y[..d]) + self.beta as i128 * y[d] as i128
    }
}

/// Axis-aligned integer box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl IntBox {
    pub fn volume(&self) -> u128 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| if h < l { 0 } else { (h - l + 1) as u128 })
            .product()
    }
}

/// A full-dimensional lattice polytope.
#[derive(Clone)]
pub struct LatticePolytope {
    dim: usize,
    vertices: Vec<LatticeVector>,
    facets: Vec<FacetForm>,
    facet_vertices: Vec<Vec<usize>>,
    widths: Vec<i64>,
    lattice_points: OnceLock<Vec<LatticeVector>>,
    volume: OnceLock<u64>,
    multiplicities: OnceLock<Vec<u64>>,
}

impl fmt::Debug for LatticePolytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LatticePolytope")
            .field("dim", &self.dim)
            .field("vertices", &self.vertices)
            .field("facets", &self.facets.len())
            .finish()
    }
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for LatticePolytope {}

impl LatticePolytope {
    /// Convex hull of a finite set of lattice points spanning `R^d`.
    pub fn convex_hull<V: AsRef<[i64]>>(points: &[V]) -> Result<Self> {
        let first = points.first().ok_or(Error::DimensionDeficient { rank: 0, dim: 0 })?;
        let dim = first.as_ref().len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut pts: Vec<Vec<i64>> = Vec::with_capacity(points.len());
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
            }
            if p.iter().any(|x| x.abs() > COORD_LIMIT) {
                return Err(Error::CoordinateOverflow);
            }
            pts.push(p.to_vec());
        }
        pts.sort();
        pts.dedup();
        let gens: Vec<Vec<i64>> = pts
            .iter()
            .map(|p| {
                let mut g = p.clone();
                g.push(1);
                g
            })
            .collect();
        let cone = cone_facets(&gens).map_err(|e| match e {
            Error::DimensionDeficient { rank, .. } => Error::DimensionDeficient { rank: rank.saturating_sub(1), dim },
            other => other,
        })?;

        let mut forms: Vec<(FacetForm, Vec<usize>)> = Vec::with_capacity(cone.len());
        for f in cone {
            let g = f.normal[..dim].iter().fold(BigInt::from(0), |g, x| g.gcd(x));
            let to_i64 = |x: &BigInt| (x / &g).to_i64().ok_or(Error::CoordinateOverflow);
            let alpha = f.normal[..dim].iter().map(to_i64).collect::<Result<Vec<_>>>()?;
            let beta = to_i64(&f.normal[dim])?;
            forms.push((FacetForm { alpha, beta }, f.incidence));
        }

        // vertices: points whose incident facet normals have rank d
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); pts.len()];
        for (fi, (_, inc)) in forms.iter().enumerate() {
            for &p in inc {
                incident[p].push(fi);
            }
        }
        let is_vertex: Vec<bool> = (0..pts.len())
            .map(|p| {
                incident[p].len() >= dim && {
                    let rows: Vec<&[i64]> = incident[p].iter().map(|&f| forms[f].0.alpha.as_slice()).collect();
                    rank_i64(&rows) == dim
                }
            })
            .collect();
        let mut new_index = vec![usize::MAX; pts.len()];
        let mut vertices = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            if is_vertex[i] {
                new_index[i] = vertices.len();
                vertices.push(LatticeVector(p.clone()));
            }
        }
        forms.sort_by(|a, b| a.0.cmp(&b.0));
        let (facets, facet_vertices): (Vec<FacetForm>, Vec<Vec<usize>>) = forms
            .into_iter()
            .map(|(f, inc)| {
                let vs: Vec<usize> = inc.into_iter().filter(|&p| is_vertex[p]).map(|p| new_index[p]).collect();
                (f, vs)
            })
            .unzip();
        let widths = facets
            .iter()
            .map(|f| {
                let w = vertices.iter().map(|v| f.eval(v)).max().expect("nonempty");
                i64::try_from(w).map_err(|_| Error::CoordinateOverflow)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LatticePolytope {
            dim,
            vertices,
            facets,
            facet_vertices,
            widths,
            lattice_points: OnceLock::new(),
            volume: OnceLock::new(),
            multiplicities: OnceLock::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[LatticeVector] {
        &self.vertices
    }

    /// Facet height functions in lexicographic order of `(alpha, beta)`.
    pub fn facets(&self) -> &[FacetForm] {
        &self.facets
    }

    /// Indices (into [`Self::vertices`]) of the vertices of facet `f`.
    pub fn facet_vertices(&self, f: usize) -> &[usize] {
        &self.facet_vertices[f]
    }

    pub fn width_facet(&self, f: usize) -> i64 {
        self.widths[f]
    }

    pub fn widths(&self) -> &[i64] {
        &self.widths
    }

    /// Maximal facet width.
    pub fn width(&self) -> i64 {
        self.widths.iter().copied().max().unwrap_or(0)
    }

    /// Bounding box of the vertices.
    pub fn vertex_box(&self) -> IntBox {
        let lo = (0..self.dim).map(|i| self.vertices.iter().map(|v| v[i]).min().unwrap()).collect();
        let hi = (0..self.dim).map(|i| self.vertices.iter().map(|v| v[i]).max().unwrap()).collect();
        IntBox { lo, hi }
    }

    /// Whether `x` lies in `kP`.
    pub fn contains(&self, x: &[i64], k: i64) -> bool {
        self.facets.iter().all(|f| f.eval_dilated(x, k) >= 0)
    }

    /// `L(P)`, sorted lexicographically.
    pub fn lattice_points(&self) -> &[LatticeVector] {
        self.lattice_points.get_or_init(|| self.lattice_points_dilated(1))
    }

    /// `L(kP)`, sorted lexicographically.
    pub fn lattice_points_dilated(&self, k: i64) -> Vec<LatticeVector> {
        assert!(k >= 1, "dilation factor must be positive");
        let b = self.vertex_box();
        let bx = IntBox {
            lo: b.lo.iter().map(|x| x * k).collect(),
            hi: b.hi.iter().map(|x| x * k).collect(),
        };
        let consts: Vec<i128> = self.facets.iter().map(|f| f.beta as i128 * k as i128).collect();
        collect_points(&self.facets, &consts, &bx)
    }

    /// Facet indices `F` with `ht_F(z) < 0`.
    pub fn visible_facets(&self, z: &[i64]) -> Vec<usize> {
        (0..self.facets.len()).filter(|&f| self.facets[f].eval(z) < 0).collect()
    }

    /// `ht_P(z)`: zero inside `P`, otherwise the largest `-ht_F(z)`.
    pub fn height_of(&self, z: &[i64]) -> i64 {
        let m = self.facets.iter().map(|f| -f.eval(z)).max().unwrap_or(0);
        m.max(0) as i64
    }

    /// Integer box containing `{x : ht_F(x) >= -relax_F for all F}`.
    pub fn relaxed_box(&self, relax: &[i64]) -> IntBox {
        let a: Vec<Vec<i64>> = self.facets.iter().map(|f| f.alpha.clone()).collect();
        let b: Vec<i128> = self.facets.iter().zip(relax).map(|(f, &r)| f.beta as i128 + r as i128).collect();
        let (lo, hi) = lp::integer_bounding_box(&a, &b, &self.vertices[0]);
        IntBox { lo, hi }
    }

    /// Visits every lattice point with `ht_F(x) >= -relax_F` for all facets, in
    /// lexicographic order.
    pub fn for_each_relaxed_point(&self, relax: &[i64], visit: impl FnMut(&[i64])) {
        let bx = self.relaxed_box(relax);
        let consts: Vec<i128> = self.facets.iter().zip(relax).map(|(f, &r)| f.beta as i128 + r as i128).collect();
        scan_box(&self.facets, &consts, &bx, visit);
    }

    /// Lattice points with `ht_F(x) >= -relax_F`, lexicographic. The scan is
    /// split over the first coordinate across the rayon pool.
    pub fn relaxed_points(&self, relax: &[i64]) -> Vec<LatticeVector> {
        let bx = self.relaxed_box(relax);
        let consts: Vec<i128> = self.facets.iter().zip(relax).map(|(f, &r)| f.beta as i128 + r as i128).collect();
        collect_points(&self.facets, &consts, &bx)
    }

    /// The lattice stratum of height `j >= 1`.
    pub fn stratum(&self, j: i64) -> Stratum {
        assert!(j >= 1, "strata are indexed from 1");
        let relax = vec![j; self.facets.len()];
        let points = self
            .relaxed_points(&relax)
            .into_iter()
            .filter(|z| self.height_of(z) == j)
            .collect();
        Stratum { height: j, points }
    }

    /// Normalized volume `d! vol(P)`.
    pub fn normalized_volume(&self) -> u64 {
        *self.volume.get_or_init(|| {
            let pts: Vec<Vec<i64>> = self.vertices.iter().map(|v| v.0.clone()).collect();
            triangulation::placing(&pts)
                .iter()
                .map(|s| simplex_volume(&s.iter().map(|&i| pts[i].as_slice()).collect::<Vec<_>>()))
                .sum()
        })
    }

    /// Lattice-normalized `(d-1)`-volume of facet `f`.
    pub fn facet_multiplicity(&self, f: usize) -> u64 {
        self.multiplicities.get_or_init(|| (0..self.facets.len()).map(|f| self.compute_multiplicity(f)).collect())[f]
    }

    pub fn facet_multiplicities(&self) -> Vec<u64> {
        (0..self.facets.len()).map(|f| self.facet_multiplicity(f)).collect()
    }

    fn compute_multiplicity(&self, f: usize) -> u64 {
        let w = unit_preimage(&self.facets[f].alpha);
        self.facet_triangulation(f)
            .iter()
            .map(|s| {
                let rows: Vec<Vec<i64>> = s[1..]
                    .iter()
                    .map(|&v| self.vertices[v].sub(&self.vertices[s[0]]).into_inner())
                    .chain(std::iter::once(w.clone()))
                    .collect();
                det_i64(&rows).abs().to_u64().expect("volume fits u64")
            })
            .sum()
    }

    /// Placing triangulation of facet `f` as lists of vertex indices, placing
    /// the facet's vertices in stored order.
    pub fn facet_triangulation(&self, f: usize) -> Vec<Vec<usize>> {
        let ids = &self.facet_vertices[f];
        let pts: Vec<Vec<i64>> = ids.iter().map(|&i| self.vertices[i].0.clone()).collect();
        triangulation::placing(&pts)
            .into_iter()
            .map(|s| s.into_iter().map(|i| ids[i]).collect())
            .collect()
    }

    /// `conv(P, z)`.
    pub fn with_point(&self, z: &[i64]) -> Result<LatticePolytope> {
        let mut pts: Vec<Vec<i64>> = self.vertices.iter().map(|v| v.0.clone()).collect();
        pts.push(z.to_vec());
        LatticePolytope::convex_hull(&pts)
    }

    /// `P + t`.
    pub fn translate(&self, t: &[i64]) -> Result<LatticePolytope> {
        let pts: Vec<LatticeVector> = self.vertices.iter().map(|v| v.add(t)).collect();
        LatticePolytope::convex_hull(&pts)
    }

    /// `cP` as a lattice polytope.
    pub fn dilate(&self, c: i64) -> Result<LatticePolytope> {
        let pts: Vec<LatticeVector> = self.vertices.iter().map(|v| v.scale(c)).collect();
        LatticePolytope::convex_hull(&pts)
    }
}

/// Lattice points of `P` at a fixed height.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub height: i64,
    pub points: Vec<LatticeVector>,
}

/// Normalized volume of a full-dimensional simplex given by its `d+1` vertices.
pub fn simplex_volume(vertices: &[&[i64]]) -> u64 {
    let rows: Vec<Vec<i64>> = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(vertices[0]).map(|(a, b)| a - b).collect())
        .collect();
    det_i64(&rows).abs().to_u64().expect("volume fits u64")
}

/// An integer vector `w` with `alpha . w = 1` (alpha primitive).
pub fn unit_preimage(alpha: &[i64]) -> Vec<i64> {
    // extended Euclid folded across the coordinates
    let mut w = vec![0i64; alpha.len()];
    let mut g = 0i64;
    for (i, &a) in alpha.iter().enumerate() {
        if a == 0 {
            continue;
        }
        if g == 0 {
            g = a;
            w[i] = 1;
            continue;
        }
        let e = g.extended_gcd(&a);
        for x in w.iter_mut() {
            *x *= e.x;
        }
        w[i] = e.y;
        g = e.gcd;
    }
    if g < 0 {
        for x in w.iter_mut() {
            *x = -*x;
        }
    }
    debug_assert_eq!(alpha.iter().zip(&w).map(|(a, b)| a * b).sum::<i64>(), 1);
    w
}

fn collect_points(forms: &[FacetForm], consts: &[i128], bx: &IntBox) -> Vec<LatticeVector> {
    if bx.lo.iter().zip(&bx.hi).any(|(l, h)| l > h) {
        return Vec::new();
    }
    let dim = bx.lo.len();
    if dim == 1 || bx.volume() < 1 << 16 {
        let mut out = Vec::new();
        scan_box(forms, consts, bx, |x| out.push(LatticeVector(x.to_vec())));
        return out;
    }
    (bx.lo[0]..=bx.hi[0])
        .into_par_iter()
        .map(|t| {
            let mut sub = bx.clone();
            sub.lo[0] = t;
            sub.hi[0] = t;
            let mut out = Vec::new();
            scan_box(forms, consts, &sub, |x| out.push(LatticeVector(x.to_vec())));
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Visits, in lexicographic order, all integer `x` in `bx` with
/// `alpha_F . x + consts_F >= 0` for every form.
///
/// Partial sums are pruned against the best completion over the remaining
/// box coordinates; the last coordinate's range is solved exactly.
pub fn scan_box(forms: &[FacetForm], consts: &[i128], bx: &IntBox, mut visit: impl FnMut(&[i64])) {
    let dim = bx.lo.len();
    if bx.lo.iter().zip(&bx.hi).any(|(l, h)| l > h) {
        return;
    }
    // slack[level][f]: max of sum_{i >= level} alpha_i x_i over the box
    let mut slack = vec![vec![0i128; forms.len()]; dim + 1];
    for level in (0..dim).rev() {
        for (fi, f) in forms.iter().enumerate() {
            let a = f.alpha[level] as i128;
            let best = (a * bx.lo[level] as i128).max(a * bx.hi[level] as i128);
            slack[level][fi] = slack[level + 1][fi] + best;
        }
    }
    let mut x = bx.lo.clone();
    let mut partial: Vec<i128> = consts.to_vec();
    scan_level(forms, bx, &slack, 0, &mut x, &mut partial, &mut visit);
}

fn scan_level(
    forms: &[FacetForm],
    bx: &IntBox,
    slack: &[Vec<i128>],
    level: usize,
    x: &mut Vec<i64>,
    partial: &mut Vec<i128>,
    visit: &mut impl FnMut(&[i64]),
) {
    let dim = bx.lo.len();
    if level + 1 == dim {
        let mut lo = bx.lo[level] as i128;
        let mut hi = bx.hi[level] as i128;
        for (fi, f) in forms.iter().enumerate() {
            let a = f.alpha[level] as i128;
            let p = partial[fi];
            if a > 0 {
                lo = lo.max(Integer::div_ceil(&-p, &a));
            } else if a < 0 {
                hi = hi.min(Integer::div_floor(&p, &-a));
            } else if p < 0 {
                return;
            }
            if lo > hi {
                return;
            }
        }
        for t in lo..=hi {
            x[level] = t as i64;
            visit(x);
        }
        return;
    }
    'outer: for t in bx.lo[level]..=bx.hi[level] {
        for (fi, f) in forms.iter().enumerate() {
            if partial[fi] + f.alpha[level] as i128 * t as i128 + slack[level + 1][fi] < 0 {
                continue 'outer;
            }
        }
        for (fi, f) in forms.iter().enumerate() {
            partial[fi] += f.alpha[level] as i128 * t as i128;
        }
        x[level] = t;
        scan_level(forms, bx, slack, level + 1, x, partial, visit);
        for (fi, f) in forms.iter().enumerate() {
            partial[fi] -= f.alpha[level] as i128 * t as i128;
        }
    }
}

/// Unimodular `d`-simplex `conv(0, e_1, ..., e_d)`.
pub fn unit_simplex(dim: usize) -> LatticePolytope {
    let mut pts = vec![LatticeVector::zero(dim)];
    pts.extend((0..dim).map(|i| LatticeVector::unit(dim, i)));
    LatticePolytope::convex_hull(&pts).expect("unit simplex is full-dimensional")
}

/// The cube `[0, 1]^d`.
pub fn unit_cube(dim: usize) -> LatticePolytope {
    let pts: Vec<Vec<i64>> = (0..1u32 << dim)
        .map(|m| (0..dim).map(|i| ((m >> i) & 1) as i64).collect())
        .collect();
    LatticePolytope::convex_hull(&pts).expect("cube is full-dimensional")
}

/// Exact membership of `x` in `conv(points)` via a rational barycentric solve
/// over a triangulation. Test helper for small inputs.
pub fn hull_contains_bruteforce(points: &[Vec<i64>], x: &[i64]) -> bool {
    let simplices = triangulation::placing(points);
    simplices.iter().any(|s| {
        triangulation::barycentric(points, s, x).iter().all(|l| !l.is_negative())
    })
}
