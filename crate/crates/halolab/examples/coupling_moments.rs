//! Orbit-equivalence couplings from matched tilings: the cocycle identity on
//! random triples, then Monte Carlo moments of the cocycle over a depth schedule.

use halolab::coupling::{check_cocycle_identity, estimate_moment, Couple};
use halolab::tiling::{matched_zd_tiling, BoxTiling, TilingSpec};

fn main() {
    let a = BoxTiling::adic(2, 2).unwrap();
    let b = matched_zd_tiling(&TilingSpec::Zd { d: 2, m: 2 }, 1).unwrap();
    let couple = Couple::new(a, b, 24).unwrap();

    let (rep, _) = check_cocycle_identity(&couple, 2000, 3, 2026).unwrap();
    println!(
        "Z^2 <-> Z: {} triples, {} violations, {} cofinality failures, {:.2}% truncated",
        rep.triples,
        rep.violations,
        rep.cofinality_failures,
        100.0 * rep.truncated_fraction
    );

    let depths: Vec<usize> = (4..=16).step_by(4).collect();
    let (m, _) = estimate_moment(&couple, 0, &[0.4, 0.6], 20_000, &depths, 2026, 0.01).unwrap();
    for p in [0.4, 0.6] {
        let s: Vec<String> = m.series(p).iter().map(|v| format!("{v:.3}")).collect();
        println!("E|c(e1, x)|^{p} at depths {depths:?}: {}", s.join(", "));
    }
}
