//! Named polytopes and families used as fixtures and examples.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cone::is_normal;
use crate::error::{Error, Result};
use crate::jump::JumpContext;
use crate::linalg::{solve_rational, IntMatrix};
use crate::polytope::{LatticePolytope, LatticeVector};

/// `conv(+-k e1, +-(k+1) e2, +-(k^2+k+1) e3)`.
pub fn cross_polytope(k: i64) -> Result<LatticePolytope> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    let c = k * k + k + 1;
    LatticePolytope::convex_hull(&[[k, 0, 0], [-k, 0, 0], [0, k + 1, 0], [0, -k - 1, 0], [0, 0, c], [0, 0, -c]])
}

/// The jump point `(0, 1, k^2 + 1)` of height `k` over [`cross_polytope`].
pub fn cross_polytope_jump_point(k: i64) -> LatticeVector {
    LatticeVector::new(vec![0, 1, k * k + 1])
}

/// `P = conv(0, e_1, ..., e_{d-1}, -w e_d)` and `z = (1, ..., 1, (d-2) w + 1)`,
/// a jump whose height attains the general bound.
pub fn sharp_pair(d: usize, w: i64) -> Result<(LatticePolytope, LatticeVector)> {
    if d < 3 {
        return Err(Error::UnsupportedDimension(d));
    }
    if w < 1 {
        return Err(Error::InvalidArgument("w must be positive".into()));
    }
    let mut pts = vec![LatticeVector::zero(d)];
    pts.extend((0..d - 1).map(|i| LatticeVector::unit(d, i)));
    pts.push(LatticeVector::unit(d, d - 1).scale(-w));
    let p = LatticePolytope::convex_hull(&pts)?;
    let mut z = vec![1; d];
    z[d - 1] = (d as i64 - 2) * w + 1;
    Ok((p, LatticeVector::new(z)))
}

/// The pentagon `(0,0), (0,1), (1,0), (5,1), (1,5)`, whose origin is dark.
pub fn dark_vertex_polygon() -> LatticePolytope {
    LatticePolytope::convex_hull(&[[0, 0], [0, 1], [1, 0], [5, 1], [1, 5]]).expect("full-dimensional")
}

/// Whether no jump over the polygon `p` sees the vertex `v`.
///
/// Over a polygon every jump has height one, so only the first stratum is
/// searched.
pub fn is_dark_vertex(p: &LatticePolytope, v: &[i64]) -> Result<bool> {
    if p.dim() != 2 {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    if !p.vertices().iter().any(|x| x.as_ref() == v) {
        return Err(Error::InvalidArgument(format!("{} is not a vertex", LatticeVector::new(v.to_vec()))));
    }
    let ctx = JumpContext::new(p);
    Ok(!p.stratum(1).points.iter().any(|z| {
        let sees_v = p.visible_facets(z).iter().any(|&f| p.facets()[f].eval(v) == 0);
        sees_v && ctx.is_jump(z).accepted()
    }))
}

/// The empty tetrahedron `conv(0, e1, e3, q e1 + p e2 + e3)`.
pub fn empty_simplex(p: i64, q: i64) -> Result<LatticePolytope> {
    if !(1 <= q && q < p) || p.gcd(&q) != 1 {
        return Err(Error::InvalidArgument(format!("need 1 <= q < p coprime, got p={p}, q={q}")));
    }
    LatticePolytope::convex_hull(&[[0, 0, 0], [1, 0, 0], [0, 0, 1], [q, p, 1]])
}

/// `{x : sum_i (l_i(x) - c_i)^2 <= 1}` for independent rational forms `l_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipsoidSpec {
    /// Row `i` holds the coefficients of `l_i`.
    pub forms: Vec<Vec<BigRational>>,
    pub center: Vec<BigRational>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl EllipsoidSpec {
    /// The ball of radius `r` around the origin.
    pub fn ball(dim: usize, r: i64) -> Self {
        let forms = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { rat(1, r) } else { BigRational::zero() }).collect())
            .collect();
        EllipsoidSpec { forms, center: vec![BigRational::zero(); dim] }
    }

    /// Axis-aligned ellipsoid with positive rational semi-axes around a rational center.
    pub fn axis_aligned(semi_axes: &[BigRational], center: &[BigRational]) -> Result<Self> {
        if semi_axes.len() != center.len() {
            return Err(Error::ShapeMismatch);
        }
        if semi_axes.iter().any(|a| !a.is_positive()) {
            return Err(Error::InvalidArgument("semi-axes must be positive".into()));
        }
        let d = semi_axes.len();
        let forms = (0..d)
            .map(|i| (0..d).map(|j| if i == j { semi_axes[i].recip() } else { BigRational::zero() }).collect())
            .collect();
        // l_i(x) - c'_i = (x_i - center_i) / a_i
        let center = center.iter().zip(semi_axes).map(|(c, a)| c / a).collect();
        Ok(EllipsoidSpec { forms, center })
    }

    pub fn dim(&self) -> usize {
        self.forms.len()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        let mut s = BigRational::zero();
        for (row, c) in self.forms.iter().zip(&self.center) {
            let v: BigRational = row.iter().zip(x).map(|(a, &b)| a * BigInt::from(b)).sum::<BigRational>() - c;
            s += &v * &v;
        }
        s <= BigRational::one()
    }

    /// Integer box containing the ellipsoid.
    fn bounding_box(&self) -> Result<(Vec<i64>, Vec<i64>)> {
        let d = self.dim();
        if self.center.len() != d || self.forms.iter().any(|r| r.len() != d) {
            return Err(Error::ShapeMismatch);
        }
        // L = M / den with M integral; L^-1 = den M^-1
        let den = self.forms.iter().flatten().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let m_rows: Vec<Vec<i64>> = self
            .forms
            .iter()
            .map(|r| r.iter().map(|x| (x * &den).to_integer().to_i64().ok_or(Error::CoordinateOverflow)).collect())
            .collect::<Result<_>>()?;
        let m = IntMatrix::from_rows(&m_rows)?;
        // columns of M^-1
        let cols: Vec<Vec<BigRational>> = (0..d)
            .map(|j| {
                let e: Vec<BigInt> = (0..d).map(|i| BigInt::from((i == j) as i64)).collect();
                solve_rational(&m, &e).map(|v| v.0)
            })
            .collect::<Result<_>>()?;
        let den = BigRational::from_integer(den);
        let inv = |i: usize, j: usize| &cols[j][i] * &den;
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for i in 0..d {
            let c: BigRational = (0..d).map(|j| inv(i, j) * &self.center[j]).sum();
            let s: BigRational = (0..d).map(|j| inv(i, j) * inv(i, j)).sum();
            let r = BigRational::from_integer(s.ceil().to_integer().sqrt() + 1);
            lo.push((&c - &r).floor().to_integer().to_i64().ok_or(Error::CoordinateOverflow)?);
            hi.push((&c + &r).ceil().to_integer().to_i64().ok_or(Error::CoordinateOverflow)?);
        }
        Ok((lo, hi))
    }

    /// Lattice points of the ellipsoid, lexicographically.
    pub fn lattice_points(&self) -> Result<Vec<LatticeVector>> {
        let (lo, hi) = self.bounding_box()?;
        let d = self.dim();
        let mut out = Vec::new();
        let mut x = lo.clone();
        loop {
            if self.contains(&x) {
                out.push(LatticeVector::new(x.clone()));
            }
            let mut i = d;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if x[i] < hi[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = lo[i];
            }
        }
    }
}

/// Parses a comma-separated list of rationals such as `3/2,2,-1/3`.
pub fn parse_rationals(s: &str) -> Result<Vec<BigRational>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<BigRational>().map_err(|_| Error::InvalidArgument(format!("`{t}` is not a rational number")))
        })
        .collect()
}

/// Convex hull of the lattice points of an ellipsoid.
pub fn ellipsoid_hull(spec: &EllipsoidSpec) -> Result<LatticePolytope> {
    let pts = spec.lattice_points()?;
    if pts.is_empty() {
        return Err(Error::DimensionDeficient { rank: 0, dim: spec.dim() });
    }
    LatticePolytope::convex_hull(&pts)
}

/// Whether every point of `L(2P)` is a sum of two points of `L(P)`.
pub fn two_point_decomposition_check(p: &LatticePolytope) -> bool {
    let base: std::collections::HashSet<&LatticeVector> = p.lattice_points().iter().collect();
    p.lattice_points_dilated(2)
        .iter()
        .all(|y| p.lattice_points().iter().any(|w| base.contains(&y.sub(w))))
}

/// Names accepted by [`maximal_polytope`].
pub const MAXIMAL_NAMES: [&str; 3] = ["P4", "P5", "P4prime"];

/// Vertex lists of the three known maximal polytopes.
///
/// The `P5` rows were checked against its published facet widths,
/// multiplicities and lattice point count; four of them appear in print with
/// dropped commas and are recorded here in their evident form.
pub fn maximal_vertices(name: &str) -> Result<Vec<Vec<i64>>> {
    let v: Vec<Vec<i64>> = match name {
        "P4" => vec![
            vec![0, 0, 0, 0],
            vec![3, 0, 2, 0],
            vec![-2, -3, 3, -1],
            vec![10, 3, -3, -1],
            vec![0, -3, 1, -2],
            vec![2, -2, 0, -2],
            vec![-9, 4, 10, 4],
        ],
        "P5" => vec![
            vec![4, -13, -2, -1, 1],
            vec![4, 12, 13, 4, -2],
            vec![-2, 0, -8, -2, 1],
            vec![0, -2, 0, 0, 0],
            vec![27, -26, -15, -6, 3],
            vec![10, -1, -11, -4, 1],
            vec![10, -13, -2, -1, 1],
        ],
        "P4prime" | "P4'" => vec![vec![0, 3, 2, 0], vec![1, 1, 3, 2], vec![2, 3, 0, 4], vec![4, 0, 0, 2], vec![4, 4, 4, 2]],
        other => return Err(Error::UnknownPolytope(other.to_string())),
    };
    Ok(v)
}

/// One of the known maximal polytopes: `P4`, `P5` or `P4prime`.
pub fn maximal_polytope(name: &str) -> Result<LatticePolytope> {
    LatticePolytope::convex_hull(&maximal_vertices(name)?)
}

/// `P` with vertices `(0,0,2), (0,0,1), (0,1,3), (1,0,0), (2,1,2), (1,2,1)`
/// and `Q` the hull of its lattice points other than the first two vertices.
/// `Q` lies in `P`, both are normal, yet removing either vertex alone breaks
/// normality.
pub fn order_gap_example() -> (LatticePolytope, LatticePolytope) {
    let p = LatticePolytope::convex_hull(&[[0, 0, 2], [0, 0, 1], [0, 1, 3], [1, 0, 0], [2, 1, 2], [1, 2, 1]]).expect("full-dimensional");
    let q = remove_points(&p, &[&[0, 0, 2], &[0, 0, 1]]).expect("still full-dimensional");
    (p, q)
}

/// Hull of the lattice points of `p` other than `drop`.
pub fn remove_points(p: &LatticePolytope, drop: &[&[i64]]) -> Result<LatticePolytope> {
    let rest: Vec<&LatticeVector> = p.lattice_points().iter().filter(|x| !drop.contains(&x.as_ref())).collect();
    LatticePolytope::convex_hull(&rest)
}

/// Every gallery polytope by name, for the command line and the demo.
pub fn by_name(name: &str) -> Result<LatticePolytope> {
    if let Some(k) = name.strip_prefix("cross") {
        return cross_polytope(k.parse().map_err(|_| Error::UnknownPolytope(name.into()))?);
    }
    if let Some(r) = name.strip_prefix("ball") {
        let r: i64 = r.parse().map_err(|_| Error::UnknownPolytope(name.into()))?;
        return ellipsoid_hull(&EllipsoidSpec::ball(3, r));
    }
    if let Some(rest) = name.strip_prefix("empty") {
        let (p, q) = rest.split_once('-').ok_or_else(|| Error::UnknownPolytope(name.into()))?;
        let p = p.parse().map_err(|_| Error::UnknownPolytope(name.into()))?;
        let q = q.parse().map_err(|_| Error::UnknownPolytope(name.into()))?;
        return empty_simplex(p, q);
    }
    match name {
        "dark" => Ok(dark_vertex_polygon()),
        "order-gap" => Ok(order_gap_example().0),
        "order-gap-q" => Ok(order_gap_example().1),
        _ => maximal_polytope(name),
    }
}

/// Whether `p` is normal; shorthand used by the fixtures.
pub fn normal(p: &LatticePolytope) -> bool {
    is_normal(p).is_normal()
}
