//! Property tests for isoperimetric profiles.

use halolab::group::{Group, Zd};
use halolab::halo::Halo;
use halolab::profile::{candidate_lower_bound, iso_profile_bruteforce, ProfileTable};
use halolab::tiling::HaloTiling;
use num_rational::Ratio;
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::sync::OnceLock;

const CAP: usize = 1_000_000;

fn z2_table() -> &'static ProfileTable {
    static T: OnceLock<ProfileTable> = OnceLock::new();
    T.get_or_init(|| iso_profile_bruteforce(&Zd::new(2), "Z^2", 5, 5, CAP).unwrap())
}

fn shuffler_table() -> &'static ProfileTable {
    static T: OnceLock<ProfileTable> = OnceLock::new();
    T.get_or_init(|| iso_profile_bruteforce(&Halo::shuffler(Zd::new(1)), "Shuffler(Z)", 4, 4, CAP).unwrap())
}

type P = (i64, i64);

fn nbrs(p: P) -> [P; 4] {
    [(p.0 + 1, p.1), (p.0 - 1, p.1), (p.0, p.1 + 1), (p.0, p.1 - 1)]
}

fn connected(set: &BTreeSet<P>) -> bool {
    let Some(&start) = set.iter().next() else { return true };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(p) = stack.pop() {
        for q in nbrs(p) {
            if set.contains(&q) && seen.insert(q) {
                stack.push(q);
            }
        }
    }
    seen.len() == set.len()
}

/// All `n`-subsets of the window around the origin that contain it and are
/// connected: their count and best `|A|/|∂A|`.
fn z2_oracle(n: usize) -> (usize, Ratio<u64>) {
    let r = n as i64;
    let window: Vec<P> = (-r..=r).flat_map(|x| (-r..=r).map(move |y| (x, y))).filter(|p| *p != (0, 0)).collect();
    let mut count = 0;
    let mut best = Ratio::new(0, 1);
    let mut chosen = vec![];
    fn rec(window: &[P], from: usize, left: usize, chosen: &mut Vec<P>, count: &mut usize, best: &mut Ratio<u64>) {
        if left == 0 {
            let set: BTreeSet<P> = chosen.iter().copied().chain([(0, 0)]).collect();
            if connected(&set) {
                *count += 1;
                let bd: BTreeSet<P> = set.iter().flat_map(|p| nbrs(*p)).filter(|q| !set.contains(q)).collect();
                *best = (*best).max(Ratio::new(set.len() as u64, bd.len() as u64));
            }
            return;
        }
        for i in from..window.len() {
            chosen.push(window[i]);
            rec(window, i + 1, left - 1, chosen, count, best);
            chosen.pop();
        }
    }
    rec(&window, 0, n - 1, &mut chosen, &mut count, &mut best);
    (count, best)
}

#[test]
fn z2_bruteforce_matches_subset_oracle() {
    let t = z2_table();
    for n in 1..=4 {
        let (count, best) = z2_oracle(n);
        let row = &t.rows[n - 1];
        assert_eq!(row.sets, count, "n={n}");
        assert_eq!(row.best_exact, Some((*best.numer(), *best.denom())), "n={n}");
    }
}

#[test]
fn frozen_small_profiles() {
    // Frozen from the brute-force run. Sizes up to 4 match the subset oracle; the
    // size-5 optimum is the plus pentomino with 4 tips and 4 diagonals outside.
    let z2: Vec<_> = z2_table().rows.iter().map(|r| (r.profile.unwrap(), r.sets)).collect();
    assert_eq!(z2, vec![((1, 4), 1), ((1, 3), 4), ((3, 7), 18), ((1, 2), 76), ((5, 8), 315)]);
    let sh = shuffler_table();
    assert_eq!(sh.profile(4), Some(Ratio::new(1, 2)));
    assert_eq!(sh.rows[3].sets, 82);
}

#[test]
fn tile_candidate_is_below_bruteforce() {
    let t = HaloTiling::juggler(1, 2, 1).unwrap();
    let p = candidate_lower_bound(&t, 1, 1000).unwrap();
    let (a, b) = p.exact_ratio.unwrap();
    assert_eq!(p.size, "4");
    assert!(Ratio::new(a, b) <= shuffler_table().profile(4).unwrap());
    assert!(p.ln_symbolic_bound <= (a as f64 / b as f64).ln() + 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn folner_is_the_profile_inverse(a in 1u64..12, b in 1u64..12) {
        let k = Ratio::new(a, b);
        for t in [z2_table(), shuffler_table()] {
            prop_assert_eq!(t.folner(k), t.profile_inverse(k));
            if let Some(n) = t.profile_inverse(k) {
                prop_assert!(t.profile(n).unwrap() >= k);
                prop_assert!(n == 1 || t.profile(n - 1).unwrap() < k);
            }
        }
    }

    #[test]
    fn profile_is_monotone(n in 2usize..=4) {
        for t in [z2_table(), shuffler_table()] {
            prop_assert!(t.profile(n) >= t.profile(n - 1));
        }
    }

    #[test]
    fn z_profile_is_half_the_size(n in 1usize..=7) {
        let t = iso_profile_bruteforce(&Zd::new(1), "Z", n, n, CAP).unwrap();
        prop_assert_eq!(t.profile(n), Some(Ratio::new(n as u64, 2)));
        let e = Zd::new(1).identity();
        prop_assert_eq!(t.rows[0].witness.clone(), vec![format!("{e:?}")]);
    }
}
