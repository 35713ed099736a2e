//! Builds a deformed cube, thins the normal cones at both ends of its
//! shadow path and prints what the certificate guarantees.
//!
//! `cargo run --release -p shadowcut-core --example long_path -- 4`

use shadowcut::analysis::{check_certificate, parametric_path};
use shadowcut::constructions::{goldfarb_cube, many_from_one};

fn main() -> shadowcut::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(3);
    let g = goldfarb_cube(n, None)?;
    let path = parametric_path(&g.polytope, &g.spec)?;
    println!(
        "n = {n}: {} facets, shadow path of length {}",
        g.polytope.num_facets(),
        path.length
    );

    let inst = many_from_one(&g.polytope, &g.spec)?;
    let check = check_certificate(&inst.polytope, &inst.a, &inst.b, &inst.certificate);
    println!(
        "after thinning: {} facets, certificate {}, every shadow path from a to b has length >= {}",
        inst.polytope.num_facets(),
        if check.ok { "verified" } else { "rejected" },
        inst.certificate.alpha
    );
    Ok(())
}
