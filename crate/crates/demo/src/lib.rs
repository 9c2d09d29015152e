//! Browser bindings: describe a polytope, list its height-one jumps, and test
//! a single point. Every function takes the plain vertex-file text and
//! returns JSON.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use npol::cone::is_normal;
use npol::jump::{self, JumpContext};
use npol::{io, LatticePolytope};

/// Most lattice points the page will enumerate before refusing.
const POINT_LIMIT: u128 = 200_000;

fn load(src: &str) -> Result<LatticePolytope, String> {
    let vertices = io::parse_text(src).map_err(|e| e.to_string())?;
    let p = LatticePolytope::convex_hull(&vertices).map_err(|e| e.to_string())?;
    if p.vertex_box().volume() > POINT_LIMIT {
        return Err("polytope too large for the demo".into());
    }
    Ok(p)
}

fn finish(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

pub fn describe_json(src: &str) -> String {
    finish(load(src).map(|p| {
        let normal = is_normal(&p);
        json!({
            "dim": p.dim(),
            "vertices": p.vertices(),
            "facets": p.facets().iter().zip(p.widths()).zip(p.facet_multiplicities())
                .map(|((f, w), m)| json!({ "alpha": f.alpha, "beta": f.beta, "width": w, "multiplicity": m }))
                .collect::<Vec<_>>(),
            "lattice_points": p.lattice_points().len(),
            "volume": p.normalized_volume(),
            "normal": normal.is_normal(),
            "witness": normal.witness.map(|(k, x)| json!({ "degree": k, "point": x })),
        })
    }))
}

pub fn height_one_jumps_json(src: &str) -> String {
    finish(load(src).and_then(|p| {
        if !is_normal(&p).is_normal() {
            return Err("polytope is not normal".into());
        }
        Ok(json!(jump::height1_jumps(&p)))
    }))
}

pub fn test_point_json(src: &str, point: &str) -> String {
    finish(load(src).and_then(|p| {
        if !is_normal(&p).is_normal() {
            return Err("polytope is not normal".into());
        }
        let z = point
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().map_err(|_| format!("`{t}` is not an integer")))
            .collect::<Result<Vec<_>, _>>()?;
        if z.len() != p.dim() {
            return Err(format!("expected {} coordinates", p.dim()));
        }
        if p.contains(&z, 1) {
            return Err("point lies in the polytope".into());
        }
        let v = JumpContext::new(&p).is_jump(&z);
        Ok(json!({
            "height": p.height_of(&z),
            "accepted": v.accepted(),
            "reason": v.reason().map(|r| r.to_string()),
            "witness": v.witness(),
        }))
    }))
}

/// Summary of the polytope: facets with widths and multiplicities, lattice
/// point count, normalized volume, normality with a witness.
#[wasm_bindgen]
pub fn describe(src: &str) -> String {
    describe_json(src)
}

/// Height-one points `z` for which `conv(P, z)` is a jump.
#[wasm_bindgen]
pub fn height_one_jumps(src: &str) -> String {
    height_one_jumps_json(src)
}

/// Verdict of the jump test for one point outside `P`.
#[wasm_bindgen]
pub fn test_point(src: &str, point: &str) -> String {
    test_point_json(src, point)
}
