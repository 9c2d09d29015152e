//! One-point extensions `conv(P, z)` that keep normality and add exactly one
//! lattice point, and the exhaustive search that certifies their absence.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::{first_undecomposable, SimplicialCone};
use crate::error::{Error, Result};
use crate::polytope::{scan_box, FacetForm, IntBox, LatticePolytope, LatticeVector};

/// A lattice point outside `P` inside the candidate region.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpCandidate {
    pub z: LatticeVector,
    /// `(facet index, -ht_F(z))` for every visible facet.
    pub facet_heights: Vec<(usize, i64)>,
    pub height: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    ExtraLatticePoint,
    NonNormal,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::ExtraLatticePoint => "extra-lattice-point",
            RejectReason::NonNormal => "non-normal",
        })
    }
}

/// Outcome of a jump test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JumpVerdict {
    Accepted,
    /// A lattice point of `conv(P, z)` other than `z` that is not in `P`.
    ExtraLatticePoint(LatticeVector),
    /// A point of `L(kQ)` that is not in `L((k-1)Q) + L(Q)`, `Q = conv(P, z)`.
    NonNormal { degree: u32, witness: LatticeVector },
}

impl JumpVerdict {
    pub fn accepted(&self) -> bool {
        matches!(self, JumpVerdict::Accepted)
    }

    pub fn reason(&self) -> Option<RejectReason> {
        match self {
            JumpVerdict::Accepted => None,
            JumpVerdict::ExtraLatticePoint(_) => Some(RejectReason::ExtraLatticePoint),
            JumpVerdict::NonNormal { .. } => Some(RejectReason::NonNormal),
        }
    }

    pub fn witness(&self) -> Option<&LatticeVector> {
        match self {
            JumpVerdict::Accepted => None,
            JumpVerdict::ExtraLatticePoint(w) | JumpVerdict::NonNormal { witness: w, .. } => Some(w),
        }
    }
}

/// Per-facet relaxation `1 + (d-2) width_F(P)` bounding the height of a jump.
pub fn candidate_bounds(p: &LatticePolytope) -> Vec<i64> {
    let d = p.dim() as i64;
    p.widths().iter().map(|w| 1 + (d - 2) * w).collect()
}

fn check_dim(p: &LatticePolytope) -> Result<()> {
    if p.dim() < 2 {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    Ok(())
}

/// The search region: every integer point `x` with `ht_F(x) >= -bound_F`.
#[derive(Clone, Debug)]
pub struct CandidateRegion {
    pub bounds: Vec<i64>,
    pub bbox: IntBox,
    consts: Vec<i128>,
}

impl CandidateRegion {
    pub fn new(p: &LatticePolytope, bounds: Vec<i64>) -> Self {
        let bbox = p.relaxed_box(&bounds);
        let consts = p.facets().iter().zip(&bounds).map(|(f, &b)| f.beta as i128 + b as i128).collect();
        CandidateRegion { bounds, bbox, consts }
    }

    /// Values of the first coordinate spanned by the region.
    pub fn slices(&self) -> std::ops::RangeInclusive<i64> {
        self.bbox.lo[0]..=self.bbox.hi[0]
    }

    /// Visits the region's points with first coordinate `t`, lexicographically.
    pub fn for_each_in_slice(&self, p: &LatticePolytope, t: i64, visit: impl FnMut(&[i64])) {
        let mut sub = self.bbox.clone();
        sub.lo[0] = t;
        sub.hi[0] = t;
        scan_box(p.facets(), &self.consts, &sub, visit);
    }
}

/// Visits the jump candidates of `P` in lexicographic order.
pub fn for_each_candidate(p: &LatticePolytope, mut visit: impl FnMut(&[i64])) -> Result<()> {
    check_dim(p)?;
    let region = CandidateRegion::new(p, candidate_bounds(p));
    for t in region.slices() {
        region.for_each_in_slice(p, t, |x| {
            if !p.contains(x, 1) {
                visit(x)
            }
        });
    }
    Ok(())
}

/// All jump candidates of `P`, lexicographically ordered.
pub fn enumerate_candidates(p: &LatticePolytope) -> Result<Vec<JumpCandidate>> {
    let mut out = Vec::new();
    for_each_candidate(p, |z| out.push(candidate(p, z)))?;
    Ok(out)
}

/// Number of jump candidates of `P`.
pub fn count_candidates(p: &LatticePolytope) -> Result<u64> {
    let mut n = 0;
    for_each_candidate(p, |_| n += 1)?;
    Ok(n)
}

fn candidate(p: &LatticePolytope, z: &[i64]) -> JumpCandidate {
    let facet_heights: Vec<(usize, i64)> =
        p.visible_facets(z).into_iter().map(|f| (f, -p.facets()[f].eval(z) as i64)).collect();
    let height = facet_heights.iter().map(|&(_, h)| h).max().unwrap_or(0);
    JumpCandidate { z: LatticeVector::new(z.to_vec()), facet_heights, height }
}

/// Per-polytope data reused across many extension tests.
pub struct JumpContext<'a> {
    p: &'a LatticePolytope,
    // homogenized vertex lists of the placing triangulation of every facet
    simplices: Vec<Vec<Vec<Vec<i64>>>>,
}

impl<'a> JumpContext<'a> {
    pub fn new(p: &'a LatticePolytope) -> Self {
        let simplices = (0..p.facets().len())
            .map(|f| {
                p.facet_triangulation(f)
                    .into_iter()
                    .map(|s| s.into_iter().map(|v| p.vertices()[v].homogenize()).collect())
                    .collect()
            })
            .collect();
        JumpContext { p, simplices }
    }

    pub fn polytope(&self) -> &LatticePolytope {
        self.p
    }

    /// Cones over `conv(Delta, z)` for the simplices of all visible facets,
    /// with `z` as the last generator.
    fn extension_cones(&self, z: &[i64]) -> Vec<(usize, SimplicialCone)> {
        let mut zh = z.to_vec();
        zh.push(1);
        let mut out = Vec::new();
        for f in self.p.visible_facets(z) {
            for s in &self.simplices[f] {
                let mut gens = s.clone();
                gens.push(zh.clone());
                out.push((f, SimplicialCone::new(&gens).expect("z is beyond the facet")));
            }
        }
        out
    }

    /// Cheap sufficient test for an extra point: a lattice point strictly
    /// inside a segment `[p, z]`, `p` in `L(P)`, that lies outside `P`.
    pub fn quick_extra_point(&self, z: &[i64]) -> Option<LatticeVector> {
        for a in self.p.lattice_points() {
            let v: Vec<i64> = z.iter().zip(a.iter()).map(|(x, y)| x - y).collect();
            let g = v.iter().fold(0i64, |g, x| g.gcd(x));
            for t in 1..g {
                let q: Vec<i64> = a.iter().zip(&v).map(|(x, y)| x + y / g * t).collect();
                if !self.p.contains(&q, 1) {
                    return Some(LatticeVector::new(q));
                }
            }
        }
        None
    }

    /// Whether `conv(P, z)` has a lattice point outside `L(P) + {z}`; stops at
    /// the first one found.
    pub fn has_extra_lattice_point(&self, z: &[i64]) -> bool {
        let d = self.p.dim();
        let mut zh = z.to_vec();
        zh.push(1);
        self.p.visible_facets(z).into_iter().any(|f| {
            self.simplices[f].iter().any(|s| {
                let mut gens = s.clone();
                gens.push(zh.clone());
                let cone = SimplicialCone::new(&gens).expect("z is beyond the facet");
                let idx = cone.index() as i128;
                cone.find_coordinates(|mu| mu[d] > 0 && mu.iter().sum::<i128>() == idx).is_some()
            })
        })
    }

    /// Lexicographically least lattice point of `conv(P, z)` outside
    /// `L(P) + {z}`, if any. `z` must lie outside `P`.
    pub fn extra_lattice_point(&self, z: &[i64]) -> Option<LatticeVector> {
        let d = self.p.dim();
        let mut best: Option<LatticeVector> = None;
        for (_, cone) in self.extension_cones(z) {
            let idx = cone.index() as i128;
            cone.for_each_lpar(|mu, y| {
                // degree one and strictly off the facet
                if mu[d] > 0 && mu.iter().sum::<i128>() == idx {
                    let x = &y[..d];
                    if best.as_ref().map_or(true, |b| x < b.as_ref()) {
                        best = Some(LatticeVector::new(x.to_vec()));
                    }
                }
            });
        }
        best
    }

    /// Lexicographically least point of `L(kQ)` that is not a sum of points of
    /// `L((k-1)Q)` and `L(Q)`, over the smallest failing `k`.
    fn nonnormal_witness(&self, q: &LatticePolytope) -> Option<(u32, LatticeVector)> {
        (2..q.dim() as i64).find_map(|k| first_undecomposable(q, k).map(|x| (k as u32, x)))
    }

    // The criteria only apply over a normal P; if P is not normal a rejection
    // need not come with a witness in conv(P, z), and `fallback` is used.
    fn reject_nonnormal(&self, z: &[i64], fallback: Option<(u32, LatticeVector)>) -> JumpVerdict {
        let q = self.p.with_point(z).expect("extension of a full-dimensional polytope");
        match self.nonnormal_witness(&q).or(fallback) {
            Some((degree, witness)) => JumpVerdict::NonNormal { degree, witness },
            None => panic!("criterion rejected {z:?} but conv(P, z) is normal; is P normal?"),
        }
    }

    /// Main criterion: with `z` moved to the origin, `L(kQ)` must not meet
    /// the complement of `(k-1)Q` and `kP` for `k = 2..d-1`.
    pub fn is_jump(&self, z: &[i64]) -> JumpVerdict {
        if let Some(w) = self.extra_lattice_point(z) {
            return JumpVerdict::ExtraLatticePoint(w);
        }
        let d = self.p.dim();
        if d < 3 {
            return JumpVerdict::Accepted;
        }
        let q = self.p.with_point(z).expect("extension of a full-dimensional polytope");
        let cones = self.extension_cones(z);
        for k in 2..d as i64 {
            for (_, cone) in &cones {
                let mut hit = None;
                let found = degree_points(cone, k, |x| {
                    // x is in k conv(Delta, z); translating z to the origin
                    // turns the (k-1)Q test into x - z in (k-1)Q
                    if self.p.contains(x, k) {
                        return false;
                    }
                    let lower: Vec<i64> = x.iter().zip(z).map(|(a, b)| a - b).collect();
                    if q.contains(&lower, k - 1) {
                        return false;
                    }
                    hit = Some((k as u32, LatticeVector::new(x.to_vec())));
                    true
                });
                if found {
                    return self.reject_nonnormal(z, hit);
                }
            }
        }
        JumpVerdict::Accepted
    }

    /// Three-dimensional criterion: enough points of `P` at each height over
    /// every visible facet whose segment to `z` crosses that facet.
    pub fn is_jump_dim3(&self, z: &[i64]) -> Result<JumpVerdict> {
        if self.p.dim() != 3 {
            return Err(Error::UnsupportedDimension(self.p.dim()));
        }
        if let Some(w) = self.extra_lattice_point(z) {
            return Ok(JumpVerdict::ExtraLatticePoint(w));
        }
        for f in self.p.visible_facets(z) {
            let form = &self.p.facets()[f];
            let h = -form.eval(z);
            let mu = self.p.facet_multiplicity(f) as usize;
            for j in 1..h {
                let count = self
                    .p
                    .lattice_points()
                    .iter()
                    .filter(|x| form.eval(x) == j && segment_meets_facet(self.p, f, x, z))
                    .count();
                if count < mu {
                    return Ok(self.reject_nonnormal(z, None));
                }
            }
        }
        Ok(JumpVerdict::Accepted)
    }

    /// Parallelepiped criterion: every `y` in the parallelepiped of
    /// `conv(Delta, z)` beyond the facet satisfies `y - (z, 1)` in `C(P)`.
    pub fn is_jump_paracrit(&self, z: &[i64]) -> JumpVerdict {
        if let Some(w) = self.extra_lattice_point(z) {
            return JumpVerdict::ExtraLatticePoint(w);
        }
        let d = self.p.dim();
        for (f, cone) in self.extension_cones(z) {
            let form = &self.p.facets()[f];
            let mut bad = false;
            cone.for_each_lpar(|_, y| {
                if bad || form.eval_homogeneous(y) >= 0 {
                    return;
                }
                let mut diff = y.to_vec();
                for i in 0..d {
                    diff[i] -= z[i];
                }
                diff[d] -= 1;
                if self.p.facets().iter().any(|g| g.eval_homogeneous(&diff) < 0) {
                    bad = true;
                }
            });
            if bad {
                return self.reject_nonnormal(z, None);
            }
        }
        JumpVerdict::Accepted
    }
}

/// Calls `test` on the first `d` coordinates of every degree-`k` lattice point
/// of `cone` (homogenized generators); returns true as soon as it does.
fn degree_points(cone: &SimplicialCone, k: i64, mut test: impl FnMut(&[i64]) -> bool) -> bool {
    let n = cone.dim();
    let d = n - 1;
    let gens = cone.generators();
    let idx = cone.index() as i128;
    let mut found = false;
    cone.for_each_lpar(|mu, y| {
        if found {
            return;
        }
        let deg = (mu.iter().sum::<i128>() / idx) as i64;
        if deg > k {
            return;
        }
        let mut x = y[..d].to_vec();
        found = add_generators(gens, (k - deg) as usize, 0, &mut x, &mut test);
    });
    found
}

fn add_generators(gens: &[Vec<i64>], left: usize, from: usize, x: &mut Vec<i64>, test: &mut impl FnMut(&[i64]) -> bool) -> bool {
    if left == 0 {
        return test(x);
    }
    let d = x.len();
    for g in from..gens.len() {
        for i in 0..d {
            x[i] += gens[g][i];
        }
        let hit = add_generators(gens, left - 1, g, x, test);
        for i in 0..d {
            x[i] -= gens[g][i];
        }
        if hit {
            return true;
        }
    }
    false
}

/// Whether the segment `[x, z]` meets facet `f` of `P` (x in `P`, z beyond `f`).
pub fn segment_meets_facet(p: &LatticePolytope, f: usize, x: &[i64], z: &[i64]) -> bool {
    let form = &p.facets()[f];
    let hx = form.eval(x);
    let hz = form.eval(z);
    debug_assert!(hx >= 0 && hz < 0);
    // crossing point x + t (z - x), t = hx / (hx - hz); scale every form by the denominator
    let den = hx - hz;
    p.facets().iter().enumerate().all(|(g, other)| {
        if g == f {
            return true;
        }
        let gx = other.eval(x);
        let gz = other.eval(z);
        gx * den + hx * (gz - gx) >= 0
    })
}

/// Whether `conv(P, z)` has exactly one more lattice point than `P`.
pub fn is_single_point_extension(p: &LatticePolytope, z: &[i64]) -> Result<bool> {
    Ok(extra_lattice_point(p, z)?.is_none())
}

/// Lexicographically least extra lattice point of `conv(P, z)`, if any.
pub fn extra_lattice_point(p: &LatticePolytope, z: &[i64]) -> Result<Option<LatticeVector>> {
    if p.contains(z, 1) {
        return Err(Error::InvalidArgument(format!("{} lies in the polytope", LatticeVector::new(z.to_vec()))));
    }
    Ok(JumpContext::new(p).extra_lattice_point(z))
}

fn outside(p: &LatticePolytope, z: &[i64]) -> Result<()> {
    if z.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), found: z.len() });
    }
    if p.contains(z, 1) {
        return Err(Error::InvalidArgument(format!("{} lies in the polytope", LatticeVector::new(z.to_vec()))));
    }
    Ok(())
}

/// Decides whether `conv(P, z)` is a jump over the normal polytope `P`.
pub fn is_jump(p: &LatticePolytope, z: &[i64]) -> Result<JumpVerdict> {
    outside(p, z)?;
    Ok(JumpContext::new(p).is_jump(z))
}

/// Three-dimensional variant of [`is_jump`].
pub fn is_jump_dim3(p: &LatticePolytope, z: &[i64]) -> Result<JumpVerdict> {
    outside(p, z)?;
    JumpContext::new(p).is_jump_dim3(z)
}

/// Parallelepiped variant of [`is_jump`].
pub fn is_jump_paracrit(p: &LatticePolytope, z: &[i64]) -> Result<JumpVerdict> {
    outside(p, z)?;
    Ok(JumpContext::new(p).is_jump_paracrit(z))
}

/// Lattice points at height one over `P`; over a normal `P` each is a jump.
pub fn height1_jumps(p: &LatticePolytope) -> Vec<LatticeVector> {
    p.stratum(1).points
}

/// `d! (vol conv(P, z) - vol P)`.
pub fn jump_volume(p: &LatticePolytope, z: &[i64]) -> Result<u64> {
    outside(p, z)?;
    Ok(p.with_point(z)?.normalized_volume() - p.normalized_volume())
}

/// Sum of the multiplicities of the facets visible from `z`.
pub fn jump_base(p: &LatticePolytope, z: &[i64]) -> Result<u64> {
    outside(p, z)?;
    Ok(p.visible_facets(z).into_iter().map(|f| p.facet_multiplicity(f)).sum())
}

/// How far [`certify_maximal`] goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertifyMode {
    /// Stop at the first accepted jump.
    Search,
    /// Examine every candidate.
    Exhaustive,
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub mode: CertifyMode,
    /// Checkpoint file; read on start if present, rewritten after each batch.
    pub checkpoint: Option<PathBuf>,
    /// First-coordinate slices scanned between checkpoints.
    pub batch_slices: usize,
    /// Override of the per-facet bounds (defaults to [`candidate_bounds`]).
    pub bounds: Option<Vec<i64>>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { mode: CertifyMode::Exhaustive, checkpoint: None, batch_slices: 8, bounds: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolytopeRecord {
    pub dim: usize,
    pub vertices: Vec<LatticeVector>,
}

impl PolytopeRecord {
    pub fn of(p: &LatticePolytope) -> Self {
        PolytopeRecord { dim: p.dim(), vertices: p.vertices().to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetBound {
    pub facet: FacetForm,
    pub width: i64,
    pub multiplicity: u64,
    pub bound: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub z: LatticeVector,
    /// `accepted`, `extra-lattice-point` or `non-normal`.
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub degree: Option<u32>,
    pub witness: Option<LatticeVector>,
}

impl VerdictRecord {
    fn new(z: LatticeVector, v: &JumpVerdict) -> Self {
        let reason = v.reason().map_or("accepted".to_string(), |r| r.to_string());
        let degree = match v {
            JumpVerdict::NonNormal { degree, .. } => Some(*degree),
            _ => None,
        };
        VerdictRecord { z, reason, degree, witness: v.witness().cloned() }
    }

    pub fn accepted(&self) -> bool {
        self.reason == "accepted"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum Conclusion {
    Maximal,
    NotMaximal { z: LatticeVector },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalityCertificate {
    pub polytope: PolytopeRecord,
    pub facet_bounds: Vec<FacetBound>,
    pub candidate_count: u64,
    pub point_filter_survivors: u64,
    pub verdicts: Vec<VerdictRecord>,
    pub conclusion: Conclusion,
}

impl MaximalityCertificate {
    pub fn is_maximal(&self) -> bool {
        self.conclusion == Conclusion::Maximal
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plain-text log: a header with the counts and one line per survivor.
    pub fn to_log(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("polytope dim={} vertices={}\n", self.polytope.dim, self.polytope.vertices.len()));
        for (i, b) in self.facet_bounds.iter().enumerate() {
            s.push_str(&format!(
                "facet {i}: alpha={} beta={} width={} mult={} bound={}\n",
                LatticeVector::new(b.facet.alpha.clone()),
                b.facet.beta,
                b.width,
                b.multiplicity,
                b.bound
            ));
        }
        s.push_str(&format!("candidates {}\n", self.candidate_count));
        s.push_str(&format!("survivors {}\n", self.point_filter_survivors));
        for v in &self.verdicts {
            let w = v.witness.as_ref().map_or("-".to_string(), |w| w.to_string());
            match v.degree {
                Some(k) => s.push_str(&format!("z={} {} k={} witness={}\n", v.z, v.reason, k, w)),
                None => s.push_str(&format!("z={} {} witness={}\n", v.z, v.reason, w)),
            }
        }
        match &self.conclusion {
            Conclusion::Maximal => s.push_str("conclusion maximal\n"),
            Conclusion::NotMaximal { z } => s.push_str(&format!("conclusion not-maximal z={z}\n")),
        }
        s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Checkpoint {
    polytope: PolytopeRecord,
    bounds: Vec<i64>,
    next_slice: i64,
    candidate_count: u64,
    survivors: Vec<LatticeVector>,
    verdicts: Vec<VerdictRecord>,
}

fn load_checkpoint(path: &Path, p: &LatticePolytope, bounds: &[i64]) -> Result<Option<Checkpoint>> {
    if !path.exists() {
        return Ok(None);
    }
    let cp: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    if cp.polytope != PolytopeRecord::of(p) || cp.bounds != bounds {
        return Err(Error::InvalidArgument(format!("checkpoint {} belongs to a different run", path.display())));
    }
    Ok(Some(cp))
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = std::fs::File::create(&tmp)?;
    f.write_all(serde_json::to_string(cp)?.as_bytes())?;
    f.sync_all()?;
    std::fs::rename(tmp, path)?;
    Ok(())
}

/// Exhaustively tests the candidates of `P` (assumed normal): point filter,
/// then the main criterion on every survivor.
pub fn certify_maximal(p: &LatticePolytope, opts: &CertifyOptions) -> Result<MaximalityCertificate> {
    check_dim(p)?;
    let bounds = opts.bounds.clone().unwrap_or_else(|| candidate_bounds(p));
    if bounds.len() != p.facets().len() || bounds.iter().any(|&b| b < 0) {
        return Err(Error::InvalidArgument("one nonnegative bound per facet is required".into()));
    }
    let ctx = JumpContext::new(p);
    let region = CandidateRegion::new(p, bounds.clone());
    let mut state = match &opts.checkpoint {
        Some(path) => load_checkpoint(path, p, &bounds)?,
        None => None,
    }
    .unwrap_or(Checkpoint {
        polytope: PolytopeRecord::of(p),
        bounds: bounds.clone(),
        next_slice: *region.slices().start(),
        candidate_count: 0,
        survivors: Vec::new(),
        verdicts: Vec::new(),
    });
    let end = *region.slices().end();
    let batch = opts.batch_slices.max(1) as i64;
    let mut accepted = state.verdicts.iter().find(|v| v.accepted()).map(|v| v.z.clone());

    while state.next_slice <= end && !(accepted.is_some() && opts.mode == CertifyMode::Search) {
        let hi = (state.next_slice + batch - 1).min(end);
        let results: Vec<(u64, Vec<(LatticeVector, JumpVerdict)>)> = (state.next_slice..=hi)
            .into_par_iter()
            .map(|t| {
                let mut count = 0u64;
                let mut survivors = Vec::new();
                region.for_each_in_slice(p, t, |z| {
                    if p.contains(z, 1) {
                        return;
                    }
                    count += 1;
                    if ctx.quick_extra_point(z).is_some() || ctx.has_extra_lattice_point(z) {
                        return;
                    }
                    survivors.push(LatticeVector::new(z.to_vec()));
                });
                let checked = survivors.into_iter().map(|z| {
                    let v = ctx.is_jump(&z);
                    (z, v)
                }).collect();
                (count, checked)
            })
            .collect();
        for (count, checked) in results {
            state.candidate_count += count;
            for (z, v) in checked {
                if v.accepted() && accepted.is_none() {
                    accepted = Some(z.clone());
                }
                state.verdicts.push(VerdictRecord::new(z.clone(), &v));
                state.survivors.push(z);
            }
        }
        state.next_slice = hi + 1;
        if let Some(path) = &opts.checkpoint {
            save_checkpoint(path, &state)?;
        }
    }

    let facet_bounds = p
        .facets()
        .iter()
        .enumerate()
        .map(|(f, form)| FacetBound {
            facet: form.clone(),
            width: p.width_facet(f),
            multiplicity: p.facet_multiplicity(f),
            bound: bounds[f],
        })
        .collect();
    let conclusion = match accepted {
        Some(z) => Conclusion::NotMaximal { z },
        None => Conclusion::Maximal,
    };
    Ok(MaximalityCertificate {
        polytope: PolytopeRecord::of(p),
        facet_bounds,
        candidate_count: state.candidate_count,
        point_filter_survivors: state.survivors.len() as u64,
        verdicts: state.verdicts,
        conclusion,
    })
}

/// Independent re-check of a rejection witness.
pub fn witness_is_valid(p: &LatticePolytope, z: &[i64], v: &JumpVerdict) -> bool {
    let Ok(q) = p.with_point(z) else { return false };
    match v {
        JumpVerdict::Accepted => true,
        JumpVerdict::ExtraLatticePoint(w) => q.contains(w, 1) && !p.contains(w, 1) && w.as_ref() != z,
        JumpVerdict::NonNormal { degree, witness } => {
            let k = *degree as i64;
            q.contains(witness, k)
                && !q.lattice_points().iter().any(|a| q.contains(&witness.sub(a), k - 1))
        }
    }
}

/// Points of `conv(P, z)` that are not in `P`, found by a box scan. Oracle
/// for small inputs.
pub fn new_points_bruteforce(p: &LatticePolytope, z: &[i64]) -> BTreeSet<LatticeVector> {
    let q = p.with_point(z).expect("extension");
    q.lattice_points().iter().filter(|x| !p.contains(x, 1)).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::is_normal;
    use crate::polytope::{unit_cube, unit_simplex};

    fn poly(v: &[&[i64]]) -> LatticePolytope {
        LatticePolytope::convex_hull(v).unwrap()
    }

    #[test]
    fn extra_point_matches_bruteforce() {
        let p = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, -1]]);
        for z in [[1, 1, 1], [1, 1, 3], [2, 2, 2], [-1, 0, 0], [3, 1, 1]] {
            let brute: Vec<_> = new_points_bruteforce(&p, &z).into_iter().filter(|x| x.as_ref() != z).collect();
            assert_eq!(extra_lattice_point(&p, &z).unwrap(), brute.first().cloned(), "{z:?}");
        }
    }

    #[test]
    fn sharp_pair_small() {
        // conv(0, e1, e2, -2 e3) and z = (1, 1, 3)
        let p = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, -2]]);
        let z = [1, 1, 3];
        assert_eq!(p.height_of(&z), 3);
        assert!(is_jump(&p, &z).unwrap().accepted());
        assert!(is_jump_dim3(&p, &z).unwrap().accepted());
        assert!(is_jump_paracrit(&p, &z).unwrap().accepted());
    }

    #[test]
    fn height_one_points_are_jumps() {
        let s = unit_simplex(3);
        let pts = height1_jumps(&s);
        assert!(!pts.is_empty());
        for z in &pts {
            assert!(is_jump(&s, z).unwrap().accepted());
        }
    }

    #[test]
    fn square_height_one_neighbours() {
        let sq = unit_cube(2);
        let pts = height1_jumps(&sq);
        assert_eq!(pts.len(), 12);
        for z in &pts {
            let brute = new_points_bruteforce(&sq, z);
            assert_eq!(brute.len(), 1);
            assert!(is_single_point_extension(&sq, z).unwrap());
            assert!(is_jump(&sq, z).unwrap().accepted());
        }
    }

    #[test]
    fn volume_and_base() {
        let s = unit_simplex(3);
        assert_eq!(jump_volume(&s, &[-1, 0, 0]).unwrap(), 1);
        assert_eq!(jump_base(&s, &[-1, 0, 0]).unwrap(), 1);
    }

    #[test]
    fn reeve_extension_is_rejected_with_valid_witness() {
        // unit simplex plus a far point gives a non-normal extension
        let p = poly(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let z = [1, 1, 5];
        let v = is_jump(&p, &z).unwrap();
        assert!(!v.accepted());
        assert!(witness_is_valid(&p, &z, &v));
    }

    #[test]
    fn square_is_not_maximal() {
        let cert = certify_maximal(&unit_cube(2), &CertifyOptions { mode: CertifyMode::Search, ..Default::default() }).unwrap();
        let Conclusion::NotMaximal { z } = &cert.conclusion else { panic!() };
        assert_eq!(unit_cube(2).height_of(z), 1);
    }

    #[test]
    fn segment_crossing() {
        let p = unit_cube(2);
        // facet x <= 1 has form -x + 1
        let f = p.facets().iter().position(|f| f.alpha == vec![-1, 0]).unwrap();
        assert!(segment_meets_facet(&p, f, &[0, 0], &[2, 1]));
        assert!(!segment_meets_facet(&p, f, &[0, 0], &[2, 5]));
        assert!(is_normal(&p).is_normal());
    }
}
