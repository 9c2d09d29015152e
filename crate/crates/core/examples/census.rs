//! Exhaustive maximality census of a named polytope, with progress saved to a
//! checkpoint so an interrupted run can be resumed.
//!
//! cargo run --release --example census -- P5 /tmp/p5.checkpoint

use std::time::Instant;

use npol::gallery;
use npol::jump::{certify_maximal, CertifyMode, CertifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "P4".to_string());
    let checkpoint = args.next().map(Into::into);
    let p = gallery::by_name(&name)?;
    let start = Instant::now();
    let opts = CertifyOptions { mode: CertifyMode::Exhaustive, checkpoint, ..Default::default() };
    let cert = certify_maximal(&p, &opts)?;
    println!("{name}: {} candidates, {} survivors", cert.candidate_count, cert.point_filter_survivors);
    println!("maximal: {} ({:.1?})", cert.is_maximal(), start.elapsed());
    Ok(())
}
