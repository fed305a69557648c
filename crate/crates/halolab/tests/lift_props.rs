//! Property tests for lifted couplings against the direct lamp simulation.

use halolab::group::{FiniteGroup, Group};
use halolab::lift::simulate::simulate_word;
use halolab::lift::{dyn_length, zd_couple, Coupling, GeneratorKind, LiftFamily, Lifted, PairCouple, Side};
use proptest::prelude::*;
use std::sync::Arc;

fn lifts() -> Vec<Lifted> {
    let zd = || -> Arc<dyn Coupling> { Arc::new(zd_couple(2, 1, 2, 24).unwrap()) };
    vec![
        Lifted::new(zd(), LiftFamily::Juggler { r: 1 }).unwrap(),
        Lifted::new(zd(), LiftFamily::Juggler { r: 2 }).unwrap(),
        Lifted::new(zd(), LiftFamily::Cloner { q: 2 }).unwrap(),
        Lifted::new(zd(), LiftFamily::Cloner { q: 3 }).unwrap(),
        Lifted::new(
            Arc::new(zd_couple(1, 2, 4, 20).unwrap()),
            LiftFamily::Wreath { lamp_group: FiniteGroup::cyclic(3).into() },
        )
        .unwrap(),
        Lifted::new(Arc::new(PairCouple::new(2, 1, 2, 1, 2, 20).unwrap()), LiftFamily::Juggler { r: 1 }).unwrap(),
    ]
}

fn word(len: usize, picks: &[usize], n: usize) -> Vec<usize> {
    picks.iter().take(len).map(|p| p % n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn words_match_simulation(seed in any::<u64>(), len in 1usize..=4, picks in prop::collection::vec(any::<usize>(), 4)) {
        for lift in lifts() {
            for side in [Side::H, Side::K] {
                let w = word(len, &picks, lift.group(side).generators().len());
                let r = simulate_word(&lift, side, &w, seed, 0, 2).unwrap();
                prop_assert!(r.ok(), "{} {:?} {:?}: {:?}", lift.describe(), side, w, r);
            }
        }
    }

    #[test]
    fn lifted_cocycle_identity(seed in any::<u64>(), picks in prop::collection::vec(any::<usize>(), 6)) {
        for lift in lifts() {
            let side = Side::H;
            let n = lift.group(side).generators().len();
            let (u, v) = (word(3, &picks, n), word(3, &picks[3..], n));
            let g = lift.group(side);
            let x = lift.point(seed, 1);
            let vx = lift.act(side, &g.eval_word(&g.generators(), &v), &x).unwrap();
            // Words act left to right as products; `uv` applies `v` first.
            let uv: Vec<usize> = u.iter().chain(&v).copied().collect();
            let whole = lift.word_cocycle(side, &uv, &x).unwrap();
            let k = lift.group(side.other());
            let split = k.mul(&lift.word_cocycle(side, &u, &vx).unwrap(), &lift.word_cocycle(side, &v, &x).unwrap());
            prop_assert_eq!(whole, split, "{}", lift.describe());
        }
    }

    #[test]
    fn base_generators_keep_their_length(seed in any::<u64>(), sample in 0u64..1000) {
        for lift in lifts() {
            let g = lift.group(Side::H);
            let x = lift.point(seed, sample);
            for s in g.generators() {
                let GeneratorKind::Base(b) = lift.classify(Side::H, &s).unwrap() else { continue };
                let base = lift.base().cocycle(Side::H, &b, &x).unwrap();
                let lifted = lift.cocycle(Side::H, &s, &x).unwrap();
                let (lb, _) = dyn_length(lift.base().group(Side::K), &base).unwrap();
                let (ll, _) = dyn_length(lift.group(Side::K), &lifted).unwrap();
                prop_assert_eq!(lb, ll, "{}", lift.describe());
            }
        }
    }
}
