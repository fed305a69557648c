//! Isoperimetric profiles: brute-force lower bounds over connected sets, the
//! tiling lower bound, and a numerical comparison of profile curves.

use halolab::group::Zd;
use halolab::profile::{asymptotic_compare, candidate_lower_bound, iso_profile_bruteforce, ProfileCurve};
use halolab::tiling::HaloTiling;
use halolab::Halo;

fn main() {
    let sh = Halo::shuffler(Zd::new(1));
    let table = iso_profile_bruteforce(&sh, "Shuffler(Z)", 5, 5, 1_000_000).unwrap();
    for r in &table.rows {
        let (a, b) = r.profile.unwrap();
        println!("I({}) >= {a}/{b} over {} connected sets", r.n, r.sets);
    }

    let t = HaloTiling::juggler(1, 2, 1).unwrap();
    for n in 1..=3 {
        let p = candidate_lower_bound(&t, n, 100_000).unwrap();
        println!("tile level {n}: |F| = {}, ln I >= {:.3}, exact {:?}", p.size, p.ln_symbolic_bound + 0.0, p.exact_ratio);
    }

    let f = ProfileCurve::LogOverLogLog { k: 1.0 };
    let g = ProfileCurve::Power { a: 0.5 };
    let rep = asymptotic_compare(&f, &g, 10f64.ln(), 1e60f64.ln(), 200).unwrap();
    println!("{} vs {}: witness {:?} ({})", rep.f, rep.g, rep.witness, rep.note);
}
