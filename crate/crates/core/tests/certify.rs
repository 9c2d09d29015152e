mod common;

use npol::gallery;
use npol::jump::{certify_maximal, CertifyMode, CertifyOptions, Conclusion, MaximalityCertificate};
use npol::polytope::unit_simplex;

fn exhaustive() -> CertifyOptions {
    CertifyOptions { mode: CertifyMode::Exhaustive, ..Default::default() }
}

#[test]
fn resumed_run_matches_fresh_run() {
    let p = gallery::cross_polytope(2).unwrap();
    let fresh = certify_maximal(&p, &exhaustive()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    // a search-mode run stops after the batch holding the first jump, leaving a partial checkpoint
    let partial = CertifyOptions { mode: CertifyMode::Search, checkpoint: Some(cp.clone()), batch_slices: 1, bounds: None };
    let first = certify_maximal(&p, &partial).unwrap();
    assert!(!first.is_maximal());
    assert!(first.candidate_count < fresh.candidate_count);

    let resumed = certify_maximal(&p, &CertifyOptions { checkpoint: Some(cp), batch_slices: 3, ..exhaustive() }).unwrap();
    assert_eq!(resumed, fresh);
}

#[test]
fn checkpoint_of_another_polytope_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let opts = CertifyOptions { checkpoint: Some(cp), ..exhaustive() };
    certify_maximal(&unit_simplex(2), &opts).unwrap();
    assert!(certify_maximal(&gallery::dark_vertex_polygon(), &opts).is_err());
}

#[test]
fn certificate_json_round_trips_and_is_stable() {
    let p = gallery::cross_polytope(1).unwrap();
    let a = certify_maximal(&p, &exhaustive()).unwrap();
    let b = certify_maximal(&p, &CertifyOptions { batch_slices: 1, ..exhaustive() }).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    let back: MaximalityCertificate = serde_json::from_str(&a.to_json().unwrap()).unwrap();
    assert_eq!(back, a);
    // every height-1 point is a jump, and the conclusion names the first one found
    let Conclusion::NotMaximal { z } = &a.conclusion else { panic!() };
    assert!(a.verdicts.iter().any(|v| &v.z == z && v.accepted()));
    let log = a.to_log();
    assert!(log.starts_with("polytope dim=3 vertices=6\n"));
    assert!(log.contains(&format!("candidates {}\n", a.candidate_count)));
    assert_eq!(log.lines().filter(|l| l.starts_with("z=")).count(), a.verdicts.len());
}

#[test]
fn explicit_bounds_shrink_the_region() {
    let p = gallery::maximal_polytope("P4prime").unwrap();
    let small = CertifyOptions { bounds: Some(vec![2; p.facets().len()]), ..exhaustive() };
    let cert = certify_maximal(&p, &small).unwrap();
    assert_eq!(cert.candidate_count as usize, p.stratum(1).points.len() + p.stratum(2).points.len());
    let wrong = CertifyOptions { bounds: Some(vec![2]), ..exhaustive() };
    assert!(certify_maximal(&p, &wrong).is_err());
}
