//! Randomized hunt for maximal normal polytopes: start polytopes, extension
//! strategies, and the restart loop.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::is_normal;
use crate::error::{Error, Result};
use crate::jump::{candidate_bounds, certify_maximal, CandidateRegion, CertifyOptions, Conclusion, JumpContext, MaximalityCertificate};
use crate::polytope::{unit_simplex, LatticePolytope, LatticeVector};

/// Seedable generator used for every random choice.
pub type SearchRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartMode {
    UnimodularWalk,
    ShrunkParallelotope,
    RandomSimplex,
}

/// Rule for choosing the next jump.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// A uniformly random height-1 point.
    Height1,
    /// The accepted jump of largest volume.
    Volume,
    /// The accepted jump maximizing the average facet multiplicity of `conv(P, z)`.
    Multiplicity,
    /// Height 1 when possible, otherwise [`SearchConfig::mixed_parameter`].
    Mixed,
}

impl Strategy {
    pub fn tag(self) -> &'static str {
        match self {
            Strategy::Height1 => "h1",
            Strategy::Volume => "vol",
            Strategy::Multiplicity => "mult",
            Strategy::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "h1" => Ok(Strategy::Height1),
            "vol" => Ok(Strategy::Volume),
            "mult" => Ok(Strategy::Multiplicity),
            "mixed" => Ok(Strategy::Mixed),
            other => Err(Error::InvalidArgument(format!("unknown strategy `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub dim: usize,
    pub seed: u64,
    /// Restart once the current polytope has more lattice points than this.
    pub max_lattice_points: usize,
    pub start_mode: StartMode,
    pub strategy: Strategy,
    /// Parametrized rule used by [`Strategy::Mixed`] when no height-1 jump exists.
    pub mixed_parameter: Strategy,
    /// Coordinate range for random simplices.
    pub coordinate_range: (i64, i64),
    /// Coordinate range for the edge vectors of random parallelotopes.
    pub edge_range: (i64, i64),
    /// Upper bound on the number of height-1 steps of a unimodular walk.
    pub max_walk_steps: usize,
    /// Height cap for parametrized steps; `None` means `1 + width(P)`.
    pub search_height_cap: Option<i64>,
    /// Number of independent runs.
    pub runs: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            dim: 3,
            seed: 0,
            max_lattice_points: 100,
            start_mode: StartMode::UnimodularWalk,
            strategy: Strategy::Mixed,
            mixed_parameter: Strategy::Volume,
            coordinate_range: (-10, 30),
            edge_range: (-2, 2),
            max_walk_steps: 10,
            search_height_cap: None,
            runs: 1,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if self.max_lattice_points < self.dim + 1 {
            return Err(Error::InvalidArgument("max_lattice_points must be at least d + 1".into()));
        }
        if self.coordinate_range.0 > self.coordinate_range.1 || self.edge_range.0 > self.edge_range.1 {
            return Err(Error::InvalidArgument("empty coordinate range".into()));
        }
        if matches!(self.mixed_parameter, Strategy::Height1 | Strategy::Mixed) {
            return Err(Error::InvalidArgument("mixed parameter must be vol or mult".into()));
        }
        Ok(())
    }

    /// Generator for run `run`, derived from the master seed.
    pub fn rng_for_run(&self, run: usize) -> SearchRng {
        let mut rng = SearchRng::seed_from_u64(self.seed);
        rng.set_stream(run as u64);
        rng
    }
}

/// The unimodular simplex extended by a random number of random height-1 jumps.
pub fn start_unimodular_walk(config: &SearchConfig, rng: &mut SearchRng) -> LatticePolytope {
    let steps = rng.gen_range(0..=config.max_walk_steps);
    let mut p = unit_simplex(config.dim);
    for _ in 0..steps {
        let stratum = p.stratum(1).points;
        let Some(z) = stratum.choose(rng) else { break };
        p = p.with_point(z).expect("extension stays full-dimensional");
    }
    p
}

/// A random lattice parallelotope `sum [0, 1] v_i` with nonsingular edges.
pub fn random_parallelotope(config: &SearchConfig, rng: &mut SearchRng) -> LatticePolytope {
    let d = config.dim;
    let (lo, hi) = config.edge_range;
    loop {
        let edges: Vec<Vec<i64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(lo..=hi)).collect()).collect();
        if crate::linalg::rank_i64(&edges) < d {
            continue;
        }
        let pts: Vec<Vec<i64>> = (0..1u32 << d)
            .map(|m| {
                let mut v = vec![0; d];
                for (i, e) in edges.iter().enumerate() {
                    if m >> i & 1 == 1 {
                        for (x, y) in v.iter_mut().zip(e) {
                            *x += y;
                        }
                    }
                }
                v
            })
            .collect();
        return LatticePolytope::convex_hull(&pts).expect("nonsingular edges");
    }
}

/// Removes vertices from `p` (re-hulling the remaining lattice points) while
/// the result stays normal and full-dimensional.
pub fn shrink(mut p: LatticePolytope, rng: &mut SearchRng) -> LatticePolytope {
    loop {
        let options: Vec<LatticePolytope> = p
            .vertices()
            .iter()
            .filter_map(|v| {
                let rest: Vec<&LatticeVector> = p.lattice_points().iter().filter(|x| *x != v).collect();
                let q = LatticePolytope::convex_hull(&rest).ok()?;
                is_normal(&q).is_normal().then_some(q)
            })
            .collect();
        if options.is_empty() {
            return p;
        }
        let i = rng.gen_range(0..options.len());
        p = options.into_iter().nth(i).expect("index in range");
    }
}

/// A random parallelotope shrunk as far as normality allows.
pub fn start_shrunk_parallelotope(config: &SearchConfig, rng: &mut SearchRng) -> LatticePolytope {
    let p = random_parallelotope(config, rng);
    shrink(p, rng)
}

/// `d + 1` random points; their hull if it is a normal full-dimensional simplex.
pub fn random_simplex(config: &SearchConfig, rng: &mut SearchRng) -> Option<LatticePolytope> {
    let (lo, hi) = config.coordinate_range;
    let pts: Vec<Vec<i64>> = (0..=config.dim).map(|_| (0..config.dim).map(|_| rng.gen_range(lo..=hi)).collect()).collect();
    let p = LatticePolytope::convex_hull(&pts).ok()?;
    (p.vertices().len() == config.dim + 1 && is_normal(&p).is_normal()).then_some(p)
}

/// One accepted extension step.
#[derive(Clone, Debug)]
pub struct Extension {
    pub z: LatticeVector,
    pub q: LatticePolytope,
    pub height: i64,
    /// Rule that produced the step (`h1`, `vol` or `mult`).
    pub tag: Strategy,
}

/// Per-facet search bounds: the full bound, capped at `cap` (default `1 + width(P)`).
pub fn search_bounds(p: &LatticePolytope, cap: Option<i64>) -> Vec<i64> {
    let cap = cap.unwrap_or(1 + p.width());
    candidate_bounds(p).into_iter().map(|b| b.min(cap)).collect()
}

/// All accepted jumps of `P` within `bounds`, lexicographically ordered.
pub fn accepted_jumps(p: &LatticePolytope, bounds: Vec<i64>) -> Vec<LatticeVector> {
    let ctx = JumpContext::new(p);
    let region = CandidateRegion::new(p, bounds);
    let slices: Vec<i64> = region.slices().collect();
    slices
        .into_par_iter()
        .map(|t| {
            let mut out = Vec::new();
            region.for_each_in_slice(p, t, |z| {
                if p.contains(z, 1) || ctx.quick_extra_point(z).is_some() || ctx.has_extra_lattice_point(z) {
                    return;
                }
                if ctx.is_jump(z).accepted() {
                    out.push(LatticeVector::new(z.to_vec()));
                }
            });
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

// average multiplicity as an exact fraction (sum, count)
fn average_multiplicity(q: &LatticePolytope) -> (u64, u64) {
    (q.facet_multiplicities().iter().sum(), q.facets().len() as u64)
}

/// Picks the jump maximizing the strategy's score; ties go to the
/// lexicographically least point.
fn best_by_parameter(p: &LatticePolytope, jumps: Vec<LatticeVector>, param: Strategy) -> Option<Extension> {
    let scored: Vec<(LatticeVector, LatticePolytope)> = jumps
        .into_par_iter()
        .map(|z| {
            let q = p.with_point(&z).expect("extension");
            (z, q)
        })
        .collect();
    let better = |a: &LatticePolytope, b: &LatticePolytope| -> Ordering {
        match param {
            Strategy::Volume => a.normalized_volume().cmp(&b.normalized_volume()),
            _ => {
                let (sa, na) = average_multiplicity(a);
                let (sb, nb) = average_multiplicity(b);
                (sa as u128 * nb as u128).cmp(&(sb as u128 * na as u128))
            }
        }
    };
    let mut best: Option<(LatticeVector, LatticePolytope)> = None;
    for (z, q) in scored {
        if best.as_ref().map_or(true, |(_, bq)| better(&q, bq) == Ordering::Greater) {
            best = Some((z, q));
        }
    }
    best.map(|(z, q)| Extension { height: p.height_of(&z), z, q, tag: param })
}

/// One step of the basic search. Returns `None` if no jump was found within
/// the search bounds.
pub fn extend_step(p: &LatticePolytope, strategy: Strategy, mixed_parameter: Strategy, cap: Option<i64>, rng: &mut SearchRng) -> Option<Extension> {
    let height1 = |rng: &mut SearchRng| {
        let pts = p.stratum(1).points;
        pts.choose(rng).map(|z| Extension {
            z: z.clone(),
            q: p.with_point(z).expect("extension"),
            height: 1,
            tag: Strategy::Height1,
        })
    };
    match strategy {
        Strategy::Height1 => height1(rng),
        Strategy::Volume | Strategy::Multiplicity => best_by_parameter(p, accepted_jumps(p, search_bounds(p, cap)), strategy),
        Strategy::Mixed => height1(rng)
            .or_else(|| best_by_parameter(p, accepted_jumps(p, search_bounds(p, cap)), mixed_parameter)),
    }
}

/// A maximal polytope found by a run, with its certificate.
#[derive(Clone, Debug)]
pub struct FoundMaximal {
    pub run: usize,
    pub polytope: LatticePolytope,
    pub certificate: MaximalityCertificate,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Number of accepted steps per jump height.
    pub jump_heights: BTreeMap<i64, u64>,
    /// Runs abandoned because the lattice point bound was exceeded.
    pub restarts: u64,
    /// Random starts rejected (degenerate or not normal).
    pub rejected_starts: u64,
}

#[derive(Clone, Debug, Default)]
pub struct SearchReport {
    pub runs_attempted: usize,
    pub maximal: Vec<FoundMaximal>,
    /// One log per run, one line per step.
    pub chains: Vec<Vec<String>>,
    pub stats: SearchStats,
}

/// Runs `config.runs` independent searches.
pub fn run_search(config: &SearchConfig) -> Result<SearchReport> {
    run_search_from(config, None)
}

/// As [`run_search`], but every run starts at `start` if given.
pub fn run_search_from(config: &SearchConfig, start: Option<&LatticePolytope>) -> Result<SearchReport> {
    config.validate()?;
    if let Some(s) = start {
        if s.dim() != config.dim {
            return Err(Error::DimensionMismatch { expected: config.dim, found: s.dim() });
        }
    }
    let mut report = SearchReport::default();
    for run in 0..config.runs {
        let mut rng = config.rng_for_run(run);
        report.runs_attempted += 1;
        let mut log = Vec::new();
        let p = match start {
            Some(s) => Some(s.clone()),
            None => match config.start_mode {
                StartMode::UnimodularWalk => Some(start_unimodular_walk(config, &mut rng)),
                StartMode::ShrunkParallelotope => Some(start_shrunk_parallelotope(config, &mut rng)),
                StartMode::RandomSimplex => random_simplex(config, &mut rng),
            },
        };
        let Some(mut p) = p else {
            report.stats.rejected_starts += 1;
            log.push("start rejected".to_string());
            report.chains.push(log);
            continue;
        };
        log.push(format!("start: vertices={} points={}", p.vertices().len(), p.lattice_points().len()));
        let mut step = 0usize;
        loop {
            if p.lattice_points().len() > config.max_lattice_points {
                report.stats.restarts += 1;
                log.push(format!("restart: {} lattice points", p.lattice_points().len()));
                break;
            }
            let ext = match extend_step(&p, config.strategy, config.mixed_parameter, config.search_height_cap, &mut rng) {
                Some(e) => Some(e),
                None => {
                    // nothing within the search bounds; certify with the full bound
                    let cert = certify_maximal(&p, &CertifyOptions::default())?;
                    match &cert.conclusion {
                        Conclusion::Maximal => {
                            log.push(format!("maximal: vertices={} points={}", p.vertices().len(), p.lattice_points().len()));
                            report.maximal.push(FoundMaximal { run, polytope: p.clone(), certificate: cert });
                            None
                        }
                        Conclusion::NotMaximal { z } => Some(Extension {
                            height: p.height_of(z),
                            q: p.with_point(z)?,
                            z: z.clone(),
                            tag: config.mixed_parameter,
                        }),
                    }
                }
            };
            let Some(ext) = ext else { break };
            step += 1;
            *report.stats.jump_heights.entry(ext.height).or_insert(0) += 1;
            log.push(format!("step {step}: z={} ht={} strategy={}", ext.z, ext.height, ext.tag));
            p = ext.q;
        }
        report.chains.push(log);
    }
    Ok(report)
}
