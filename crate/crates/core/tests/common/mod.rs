//! Oracles and generators shared by the integration tests. Everything here is
//! deliberately naive: box scans and literal sumsets.

#![allow(dead_code)]

use std::collections::HashSet;
use std::io::Write;

use npol::{LatticePolytope, LatticeVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Prints `criterion N ...: PASS` on success and `FAIL` when a check panics.
/// Writes to the raw stderr handle so the line shows up under the test harness.
pub struct Criterion {
    id: &'static str,
    name: &'static str,
}

impl Criterion {
    pub fn start(id: &'static str, name: &'static str) -> Self {
        Criterion { id, name }
    }
}

impl Drop for Criterion {
    fn drop(&mut self) {
        let status = if std::thread::panicking() { "FAIL" } else { "PASS" };
        let _ = writeln!(std::io::stderr().lock(), "criterion {} {}: {status}", self.id, self.name);
    }
}

/// `L(kP)` by scanning the whole box `k * vertex box` against the facet forms.
pub fn box_points(p: &LatticePolytope, k: i64) -> Vec<LatticeVector> {
    let d = p.dim();
    let lo: Vec<i64> = (0..d).map(|i| p.vertices().iter().map(|v| v[i]).min().unwrap() * k).collect();
    let hi: Vec<i64> = (0..d).map(|i| p.vertices().iter().map(|v| v[i]).max().unwrap() * k).collect();
    let mut out = Vec::new();
    let mut x = lo.clone();
    'outer: loop {
        if p.facets().iter().all(|f| f.eval_dilated(&x, k) >= 0) {
            out.push(LatticeVector::new(x.clone()));
        }
        for i in (0..d).rev() {
            if x[i] < hi[i] {
                x[i] += 1;
                continue 'outer;
            }
            x[i] = lo[i];
        }
        return out;
    }
}

/// The `k`-fold sumsets of `L(P)` for `k = 1..=kmax`.
pub fn sumsets(p: &LatticePolytope, kmax: u32) -> Vec<HashSet<LatticeVector>> {
    let base = box_points(p, 1);
    let mut out = vec![base.iter().cloned().collect::<HashSet<_>>()];
    for _ in 2..=kmax {
        let last = out.last().unwrap();
        let next = last.iter().flat_map(|s| base.iter().map(move |b| s.add(b))).collect();
        out.push(next);
    }
    out
}

/// First degree `k <= kmax` and lex least point of `L(kP)` outside the sumset.
pub fn sumset_witness(p: &LatticePolytope, kmax: u32) -> Option<(u32, LatticeVector)> {
    let sums = sumsets(p, kmax);
    (2..=kmax).find_map(|k| {
        box_points(p, k as i64).into_iter().find(|x| !sums[k as usize - 1].contains(x)).map(|x| (k, x))
    })
}

/// Normal iff generated in degrees up to `d - 1`.
pub fn normal_oracle(p: &LatticePolytope) -> bool {
    sumset_witness(p, (p.dim() as u32).saturating_sub(1).max(1)).is_none()
}

pub fn extension(p: &LatticePolytope, z: &[i64]) -> LatticePolytope {
    let mut pts: Vec<Vec<i64>> = p.vertices().iter().map(|v| v.to_vec()).collect();
    pts.push(z.to_vec());
    LatticePolytope::convex_hull(&pts).unwrap()
}

/// Lattice points of `conv(P, z)` that are not in `P`.
pub fn new_points(p: &LatticePolytope, z: &[i64]) -> Vec<LatticeVector> {
    let q = extension(p, z);
    box_points(&q, 1).into_iter().filter(|x| !p.facets().iter().all(|f| f.eval(x) >= 0)).collect()
}

/// `conv(P, z)` adds exactly `z` and is normal.
pub fn jump_oracle(p: &LatticePolytope, z: &[i64]) -> bool {
    new_points(p, z).len() == 1 && normal_oracle(&extension(p, z))
}

/// Re-validates a rejection witness of `z` over `P`.
///
/// `degree = None`: the witness is a second new lattice point of `conv(P, z)`.
/// `degree = Some(k)`: the witness lies in `L(kQ)` but not in the `k`-fold sumset of `L(Q)`.
pub fn witness_holds(p: &LatticePolytope, z: &[i64], degree: Option<u32>, w: &LatticeVector) -> bool {
    let q = extension(p, z);
    match degree {
        None => w.as_ref() != z && new_points(p, z).contains(w),
        Some(k) => {
            let in_kq = q.facets().iter().all(|f| f.eval_dilated(w, k as i64) >= 0);
            in_kq && !sumsets(&q, k)[k as usize - 1].contains(w)
        }
    }
}

/// Full-dimensional polytope spanned by `n` random points of `[lo, hi]^d`.
pub fn random_polytope(rng: &mut ChaCha8Rng, d: usize, n: usize, lo: i64, hi: i64) -> Option<LatticePolytope> {
    let pts: Vec<Vec<i64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(lo..=hi)).collect()).collect();
    LatticePolytope::convex_hull(&pts).ok()
}

/// `count` seeded normal polytopes with at most `max_points` lattice points.
pub fn normal_suite(seed: u64, count: usize, d: usize, max_points: usize) -> Vec<LatticePolytope> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = r.gen_range(d + 1..=d + 4);
        let hi = r.gen_range(1..=2);
        if let Some(p) = random_polytope(&mut r, d, n, 0, hi) {
            if p.lattice_points().len() <= max_points && npol::cone::is_normal(&p).is_normal() {
                out.push(p);
            }
        }
    }
    out
}

/// Whether `z` satisfies every per-facet height bound.
pub fn within_bounds(p: &LatticePolytope, bounds: &[i64], z: &[i64]) -> bool {
    p.facets().iter().zip(bounds).all(|(f, &b)| f.eval(z) >= -(b as i128))
}
