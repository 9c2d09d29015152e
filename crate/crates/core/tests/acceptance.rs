//! One test per acceptance criterion. Each prints `criterion N <name>: PASS|FAIL`
//! on stderr; run with `cargo test --release --test acceptance`.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use common::*;
use npol::cone::{is_normal, is_normal_bruteforce, lpar, lpar_height_census};
use npol::gallery::{self, EllipsoidSpec};
use npol::jump::{
    candidate_bounds, certify_maximal, for_each_candidate, CertifyMode, CertifyOptions, Conclusion, JumpContext,
};
use npol::linalg::{det_i64, primitive_i64, IntMatrix};
use npol::{FacetForm, LatticePolytope};

fn width_mult_multiset(p: &LatticePolytope) -> BTreeMap<(i64, u64), usize> {
    let mut m = BTreeMap::new();
    for (w, mu) in p.widths().iter().zip(p.facet_multiplicities()) {
        *m.entry((*w, mu)).or_insert(0) += 1;
    }
    m
}

fn multiset(widths: &[i64], mults: &[u64]) -> BTreeMap<(i64, u64), usize> {
    let mut m = BTreeMap::new();
    for (w, mu) in widths.iter().zip(mults) {
        *m.entry((*w, *mu)).or_insert(0) += 1;
    }
    m
}

#[test]
fn criterion_01_maximal_fixture_tables() {
    let _c = Criterion::start("1", "maximal fixtures: lattice points, widths, multiplicities");
    let cases: [(&str, usize, &[i64], &[u64]); 3] = [
        ("P4", 41, &[29, 180, 66, 8, 20, 116, 40, 91, 32, 80, 160], &[4, 1, 4, 10, 4, 1, 2, 4, 10, 4, 2]),
        ("P5", 42, &[27, 105, 24, 24, 105, 105, 48, 105, 27, 105], &[18, 9, 18, 18, 9, 9, 9, 9, 18, 9]),
        ("P4prime", 22, &[24, 48, 48, 48, 48], &[8, 4, 4, 4, 4]),
    ];
    for (name, points, widths, mults) in cases {
        let p = gallery::maximal_polytope(name).unwrap();
        assert_eq!(p.lattice_points().len(), points, "{name}");
        assert_eq!(box_points(&p, 1).len(), points, "{name} box scan");
        assert_eq!(p.facets().len(), widths.len(), "{name}");
        assert_eq!(width_mult_multiset(&p), multiset(widths, mults), "{name}");
    }
}

/// Certifies `p` exhaustively and re-validates every survivor's witness.
fn census(p: &LatticePolytope) -> npol::jump::MaximalityCertificate {
    let cert = certify_maximal(p, &CertifyOptions { mode: CertifyMode::Exhaustive, ..Default::default() }).unwrap();
    assert_eq!(cert.verdicts.len() as u64, cert.point_filter_survivors);
    for v in &cert.verdicts {
        assert!(!v.accepted(), "accepted jump {}", v.z);
        let w = v.witness.as_ref().expect("rejections carry a witness");
        assert!(witness_holds(p, &v.z, v.degree, w), "witness {w} for {}", v.z);
    }
    cert
}

#[test]
fn criterion_02_p4_census() {
    let _c = Criterion::start("2", "P4 maximality census");
    let p = gallery::maximal_polytope("P4").unwrap();
    let cert = census(&p);
    assert_eq!(cert.candidate_count, 196_697);
    assert_eq!(cert.point_filter_survivors, 84);
    assert_eq!(cert.conclusion, Conclusion::Maximal);
}

#[test]
fn criterion_03_p4prime_maximal() {
    let _c = Criterion::start("3", "P4' maximal");
    let p = gallery::maximal_polytope("P4prime").unwrap();
    let cert = census(&p);
    assert_eq!(cert.conclusion, Conclusion::Maximal);
}

#[test]
#[ignore = "about half an hour on one core; run with --ignored"]
fn criterion_04_p5_census() {
    let _c = Criterion::start("4", "P5 maximality census");
    let p = gallery::maximal_polytope("P5").unwrap();
    let checkpoint = std::env::temp_dir().join("npol-p5-census.json");
    let opts = CertifyOptions { mode: CertifyMode::Exhaustive, checkpoint: Some(checkpoint), ..Default::default() };
    let cert = certify_maximal(&p, &opts).unwrap();
    assert_eq!(cert.candidate_count, 13_525_003);
    assert_eq!(cert.point_filter_survivors, 980);
    assert_eq!(cert.conclusion, Conclusion::Maximal);
    for v in &cert.verdicts {
        assert!(!v.accepted(), "accepted jump {}", v.z);
        let w = v.witness.as_ref().expect("rejections carry a witness");
        assert!(witness_holds(&p, &v.z, v.degree, w), "witness {w} for {}", v.z);
    }
}

#[test]
fn criterion_05_cross_polytopes() {
    let _c = Criterion::start("5", "cross-polytopes k = 1, 2, 3");
    for k in 1..=3i64 {
        let p = gallery::cross_polytope(k).unwrap();
        assert!(is_normal(&p).is_normal(), "k={k}");
        assert!(normal_oracle(&p), "k={k} oracle");
        assert_eq!(p.width(), 2 * k * (k + 1) * (k * k + k + 1));
        for j in 1..k {
            assert!(p.stratum(j).points.is_empty(), "k={k} stratum {j}");
        }
        let z = gallery::cross_polytope_jump_point(k);
        assert_eq!(p.height_of(&z), k);
        assert!(p.stratum(k).points.contains(&z));
        assert_eq!(new_points(&p, &z), vec![z.clone()]);
        assert!(JumpContext::new(&p).is_jump(&z).accepted(), "k={k}");
        assert!(jump_oracle(&p, &z), "k={k} oracle");
    }
}

#[test]
fn criterion_06_sharp_bound() {
    let _c = Criterion::start("6", "sharp height bound");
    for (d, w) in [(3, 1), (3, 2), (3, 3), (4, 1), (4, 2), (5, 1)] {
        let (p, z) = gallery::sharp_pair(d, w).unwrap();
        let h = (d as i64 - 2) * w + 1;
        assert_eq!(p.height_of(&z), h, "d={d} w={w}");
        // the bound is attained over the facet from which z is highest
        let bounds = candidate_bounds(&p);
        let attained = p
            .facets()
            .iter()
            .zip(&bounds)
            .any(|(f, &b)| -f.eval(&z) == h as i128 && b == h);
        assert!(attained, "d={d} w={w}");
        assert!(JumpContext::new(&p).is_jump(&z).accepted(), "d={d} w={w}");
        assert!(jump_oracle(&p, &z), "d={d} w={w} oracle");
    }
}

#[test]
fn criterion_07_criteria_agree() {
    let _c = Criterion::start("7", "jump criteria agree");
    let mut checked = 0usize;
    for p in normal_suite(7, 200, 3, 20) {
        let ctx = JumpContext::new(&p);
        for_each_candidate(&p, |z| {
            if ctx.quick_extra_point(z).is_some() || ctx.extra_lattice_point(z).is_some() {
                return;
            }
            checked += 1;
            let a = ctx.is_jump(z).accepted();
            let b = ctx.is_jump_dim3(z).unwrap().accepted();
            let c = ctx.is_jump_paracrit(z).accepted();
            assert!(a == b && b == c, "{:?} z={z:?}: {a} {b} {c}", p.vertices());
            assert_eq!(a, jump_oracle(&p, z), "{:?} z={z:?} oracle", p.vertices());
        })
        .unwrap();
    }
    for p in normal_suite(77, 50, 4, 24) {
        let ctx = JumpContext::new(&p);
        for_each_candidate(&p, |z| {
            if ctx.quick_extra_point(z).is_some() || ctx.extra_lattice_point(z).is_some() {
                return;
            }
            checked += 1;
            assert_eq!(ctx.is_jump(z).accepted(), ctx.is_jump_paracrit(z).accepted(), "{:?} z={z:?}", p.vertices());
        })
        .unwrap();
    }
    assert!(checked > 1000, "only {checked} single-point extensions examined");
}

#[test]
fn criterion_08_normality_oracle() {
    let _c = Criterion::start("8", "normality decision vs sumsets");
    let mut r = rng(8);
    let (mut tested, mut nonnormal) = (0, 0);
    while tested < 200 {
        let d = r.gen_range(2..=4);
        let hi = r.gen_range(1..=3);
        let n = r.gen_range(d + 1..=d + 2);
        let Some(p) = random_polytope(&mut r, d, n, 0, hi) else { continue };
        if p.lattice_points().len() > 60 {
            continue;
        }
        tested += 1;
        let fast = is_normal(&p);
        let slow = sumset_witness(&p, d as u32 + 1);
        assert_eq!(fast.witness, slow, "{:?}", p.vertices());
        assert_eq!(fast, is_normal_bruteforce(&p, d as u32 + 1));
        nonnormal += usize::from(!fast.is_normal());
    }
    assert!(nonnormal > 10, "suite has only {nonnormal} nonnormal polytopes");

    // dilations by at least d - 1 and parallelotopes are always normal
    let mut r = rng(88);
    let mut dil = 0;
    while dil < 20 {
        let Some(p) = random_polytope(&mut r, 3, 4, 0, 3) else { continue };
        dil += 1;
        let c = r.gen_range(2..=3);
        assert!(is_normal(&p.dilate(c).unwrap()).is_normal(), "{c} * {:?}", p.vertices());
    }
    let mut par = 0;
    while par < 20 {
        let d = r.gen_range(2..=3);
        let edges: Vec<Vec<i64>> = (0..d).map(|_| (0..d).map(|_| r.gen_range(-2..=2)).collect()).collect();
        if det_i64(&edges) == BigInt::from(0) {
            continue;
        }
        par += 1;
        let mut verts = Vec::new();
        for mask in 0..1u32 << d {
            let mut v = vec![0i64; d];
            for (i, e) in edges.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    v.iter_mut().zip(e).for_each(|(a, b)| *a += b);
                }
            }
            verts.push(v);
        }
        let p = LatticePolytope::convex_hull(&verts).unwrap();
        assert!(is_normal(&p).is_normal(), "{edges:?}");
    }
}

/// Primitive normal of the hyperplane through the columns other than `skip`,
/// oriented positively on the skipped one. Cofactor expansion.
fn opposite_facet(gens: &[Vec<i64>], skip: usize) -> FacetForm {
    let d = gens.len();
    let others: Vec<&Vec<i64>> = gens.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, g)| g).collect();
    let normal: Vec<i64> = (0..d)
        .map(|i| {
            let minor: Vec<Vec<i64>> = (0..d - 1)
                .map(|r| (0..d).filter(|&c| c != i).map(|c| others[r][c]).collect())
                .collect();
            let m = if d == 1 { BigInt::from(1) } else { det_i64(&minor) };
            let m: i64 = m.try_into().unwrap();
            if i % 2 == 0 { m } else { -m }
        })
        .collect();
    let mut alpha = primitive_i64(&normal).unwrap();
    let s: i64 = alpha.iter().zip(&gens[skip]).map(|(a, b)| a * b).sum();
    if s < 0 {
        alpha.iter_mut().for_each(|a| *a = -*a);
    }
    // homogeneous layout: the last coordinate pairs with beta
    let beta = alpha.pop().unwrap();
    FacetForm { alpha, beta }
}

#[test]
fn criterion_09_parallelepiped_points() {
    let _c = Criterion::start("9", "parallelepiped lattice points");
    let mut r = rng(9);
    let mut tested = 0;
    while tested < 500 {
        let d = r.gen_range(1..=4);
        let gens: Vec<Vec<i64>> = (0..d).map(|_| (0..d).map(|_| r.gen_range(-6..=6)).collect()).collect();
        let det = det_i64(&gens);
        let det: i64 = det.try_into().unwrap();
        if det == 0 || det.abs() > 200 {
            continue;
        }
        tested += 1;
        let data = lpar(&IntMatrix::from_columns(&gens).unwrap()).unwrap();
        assert_eq!(data.points.len() as i64, det.abs(), "{gens:?}");
        let distinct: BTreeSet<_> = data.points.iter().collect();
        assert_eq!(distinct.len(), data.points.len());
        for skip in 0..d {
            let f = opposite_facet(&gens, skip);
            let m = f.eval_homogeneous(&gens[skip]) as i64;
            let census = lpar_height_census(&data, &f);
            let expected: BTreeMap<i128, usize> = (0..m).map(|j| (j as i128, (det.abs() / m) as usize)).collect();
            assert_eq!(census, expected, "{gens:?} facet {skip}");
        }
    }
    for p in 2..=7i64 {
        for q in 1..p {
            let Ok(s) = gallery::empty_simplex(p, q) else { continue };
            let cols: Vec<Vec<i64>> = s.vertices().iter().map(|v| v.homogenize()).collect();
            let data = lpar(&IntMatrix::from_columns(&cols).unwrap()).unwrap();
            assert_eq!(data.points.len() as i64, p);
            assert!(data.degrees.iter().all(|&k| k != 1 && k != 3), "p={p} q={q}: {:?}", data.degrees);
        }
    }
}

#[test]
fn criterion_10_height_one_jumps() {
    let _c = Criterion::start("10", "height-1 jumps");
    let mut suites = normal_suite(7, 200, 3, 20);
    suites.extend(normal_suite(77, 50, 4, 24));
    for p in &suites {
        let ctx = JumpContext::new(p);
        for z in p.stratum(1).points {
            assert!(ctx.extra_lattice_point(&z).is_none(), "{:?} z={z}", p.vertices());
            assert!(ctx.is_jump(&z).accepted(), "{:?} z={z}", p.vertices());
        }
    }
    let mut r = rng(10);
    let mut polygons = 0;
    while polygons < 50 {
        let n = r.gen_range(3..=6);
        let Some(p) = random_polytope(&mut r, 2, n, 0, 4) else { continue };
        polygons += 1;
        let ctx = JumpContext::new(&p);
        for_each_candidate(&p, |z| {
            if ctx.extra_lattice_point(z).is_none() && ctx.is_jump(z).accepted() {
                assert_eq!(p.height_of(z), 1, "{:?} z={z:?}", p.vertices());
            }
        })
        .unwrap();
    }
}

#[test]
fn criterion_11_dark_vertex() {
    let _c = Criterion::start("11", "dark vertex pentagon");
    let p = gallery::dark_vertex_polygon();
    assert!(gallery::is_dark_vertex(&p, &[0, 0]).unwrap());
    assert!(!gallery::is_dark_vertex(&p, &[1, 5]).unwrap());
    // oracle: no height-1 single-point extension sees the origin
    for z in p.stratum(1).points {
        let sees = p.facets().iter().any(|f| f.eval(&z) < 0 && f.eval(&[0, 0]) == 0);
        assert!(!(sees && new_points(&p, &z).len() == 1), "z={z}");
    }
    let cert = certify_maximal(&p, &CertifyOptions { mode: CertifyMode::Search, ..Default::default() }).unwrap();
    let Conclusion::NotMaximal { z } = cert.conclusion else { panic!("pentagon reported maximal") };
    assert!(jump_oracle(&p, &z));
}

#[test]
fn criterion_12_order_gap() {
    let _c = Criterion::start("12", "order-gap fixture");
    let (p, q) = gallery::order_gap_example();
    assert_eq!(p.lattice_points().len(), 8);
    assert!(is_normal(&p).is_normal() && normal_oracle(&p));
    assert!(is_normal(&q).is_normal() && normal_oracle(&q));
    assert!(q.lattice_points().iter().all(|x| p.contains(x, 1)));
    for v in [[0i64, 0, 2], [0, 0, 1]] {
        let r = gallery::remove_points(&p, &[&v]).unwrap();
        let Some((k, w)) = is_normal(&r).witness else { panic!("removing {v:?} kept normality") };
        let in_kr = r.facets().iter().all(|f| f.eval_dilated(&w, k as i64) >= 0);
        assert!(in_kr && !sumsets(&r, k)[k as usize - 1].contains(&w), "{v:?}: {w}");
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn criterion_13_ellipsoids() {
    let _c = Criterion::start("13", "ellipsoid hulls");
    for radius in 1..=8 {
        let spec = EllipsoidSpec::ball(3, radius);
        let p = gallery::ellipsoid_hull(&spec).unwrap();
        let brute = (-radius..=radius)
            .flat_map(|x| (-radius..=radius).flat_map(move |y| (-radius..=radius).map(move |z| x * x + y * y + z * z)))
            .filter(|&s| s <= radius * radius)
            .count();
        assert_eq!(p.lattice_points().len(), brute, "r={radius}");
        assert!(is_normal(&p).is_normal(), "r={radius}");
        assert!(gallery::two_point_decomposition_check(&p), "r={radius}");
        let ctx = JumpContext::new(&p);
        assert!(p.stratum(1).points.iter().any(|z| ctx.is_jump(z).accepted()), "r={radius}");
    }
    let mut r = rng(13);
    for _ in 0..12 {
        let axes: Vec<BigRational> = (0..3).map(|_| rat(r.gen_range(4..=16), r.gen_range(1..=4))).collect();
        let center: Vec<BigRational> = (0..3).map(|_| rat(r.gen_range(0..4), 4)).collect();
        let spec = EllipsoidSpec::axis_aligned(&axes, &center).unwrap();
        let Ok(p) = gallery::ellipsoid_hull(&spec) else { continue };
        assert!(is_normal(&p).is_normal(), "{axes:?} {center:?}");
        assert!(gallery::two_point_decomposition_check(&p), "{axes:?} {center:?}");
    }
    let b2 = gallery::ellipsoid_hull(&EllipsoidSpec::ball(3, 2)).unwrap();
    let cert = certify_maximal(&b2, &CertifyOptions::default()).unwrap();
    let max = cert.verdicts.iter().filter(|v| v.accepted()).map(|v| b2.height_of(&v.z)).max();
    assert_eq!(max, Some(2));
}

#[test]
fn criterion_14_bound_completeness() {
    let _c = Criterion::start("14", "height bound completeness");
    let mut scanned = 0u64;
    for p in normal_suite(14, 50, 3, 25) {
        let bounds = candidate_bounds(&p);
        let bx = p.relaxed_box(&bounds);
        let ctx = JumpContext::new(&p);
        // twice the candidate box, same center
        let lo: Vec<i64> = bx.lo.iter().zip(&bx.hi).map(|(l, h)| l - (h - l + 1) / 2).collect();
        let hi: Vec<i64> = bx.lo.iter().zip(&bx.hi).map(|(l, h)| h + (h - l + 1) / 2).collect();
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    let pt = [x, y, z];
                    if p.contains(&pt, 1) || within_bounds(&p, &bounds, &pt) {
                        continue;
                    }
                    scanned += 1;
                    if ctx.quick_extra_point(&pt).is_some() || ctx.extra_lattice_point(&pt).is_some() {
                        continue;
                    }
                    assert!(!ctx.is_jump(&pt).accepted(), "{:?} z={pt:?} beyond the bound", p.vertices());
                }
            }
        }
    }
    assert!(scanned > 0);
}
