//! Følner tilings: verify the partition of each level into shifted copies of the
//! previous one, and compare generator boundary ratios with the base box.

use halolab::tiling::{generator_ratios, verify_tiling_level, HaloTiling, Tiling, DEFAULT_ENUM_CAP};

fn main() {
    for (name, t) in [
        ("juggler(Z, r=1)", HaloTiling::juggler(1, 2, 1).unwrap()),
        ("cloner(Z, F_2)", HaloTiling::cloner(1, 2, 2).unwrap()),
    ] {
        for n in 0..2 {
            let r = verify_tiling_level(&t, n, DEFAULT_ENUM_CAP).unwrap();
            println!(
                "{name} level {n}: |F_{}| = {} = {} shifts x {} ({})",
                n + 1,
                r.next_size,
                r.shift_count,
                r.tile_size,
                if r.passed { "partition" } else { "FAILED" }
            );
        }
        println!("{name} level 3 size: {}", t.level(3).cardinality.to_decimal_string());
        for g in generator_ratios(&t, 1, DEFAULT_ENUM_CAP).unwrap() {
            println!("  generator {} ({}): ratio {} vs base {}", g.generator, g.kind, g.ratio, g.base_ratio);
        }
    }
}
