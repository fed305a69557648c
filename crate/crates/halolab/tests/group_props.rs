//! Property tests for halo product arithmetic.

use halolab::group::{Group, Zd};
use halolab::halo::{canonical_text, Halo, HaloElem, Lamp};
use halolab::lamp::SparseVec;
use halolab::{Family, FiniteGroup, PrimeField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

type Elem = HaloElem<Vec<i64>>;

fn families() -> Vec<Halo<Zd>> {
    vec![
        Halo::new(Zd::new(2), Family::FreeAbelian),
        Halo::shuffler(Zd::new(1)),
        Halo::juggler(Zd::new(2), 2),
        Halo::cloner(Zd::new(1), PrimeField::new(2).unwrap()),
        Halo::cloner(Zd::new(2), PrimeField::new(3).unwrap()),
        Halo::wreath(Zd::new(1), FiniteGroup::cyclic(3)),
        Halo::wreath(Zd::new(1), s3()),
    ]
}

/// Sym(3) from its multiplication table, to exercise a nonabelian lamp group.
fn s3() -> FiniteGroup {
    let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    let table = perms
        .iter()
        .map(|a| perms.iter().map(|b| index([a[b[0]], a[b[1]], a[b[2]]])).collect())
        .collect();
    FiniteGroup::from_table(table).unwrap()
}

fn random(g: &Halo<Zd>, rng: &mut ChaCha8Rng) -> Elem {
    let d = g.base_group().d;
    let window: Vec<Vec<i64>> =
        (0..rng.gen_range(0..5)).map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect()).collect();
    let base = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
    g.random_element(rng, &window, base)
}

fn translate(p: &[i64], h: &[i64], sign: i64) -> Vec<i64> {
    p.iter().zip(h).map(|(a, b)| a + sign * b).collect()
}

fn lamp_points(l: &Lamp<Vec<i64>>) -> BTreeSet<Vec<i64>> {
    match l {
        Lamp::None => BTreeSet::new(),
        Lamp::Perm(s) => s.support().map(|(p, _)| p.clone()).collect(),
        Lamp::Matrix(m) => m.support().iter().cloned().collect(),
        Lamp::Func(f) => f.support().cloned().collect(),
    }
}

/// Lamp of `ab` against `σ ∘ (h·σ′)`, recomputed pointwise on the union of supports.
fn semidirect_consistent(g: &Halo<Zd>, a: &Elem, b: &Elem, ab: &Elem) -> bool {
    let h = &a.base;
    let mut pts = lamp_points(&a.lamp);
    pts.extend(lamp_points(&b.lamp).iter().map(|p| translate(p, h, 1)));
    pts.extend(lamp_points(&ab.lamp));
    match (&a.lamp, &b.lamp, &ab.lamp) {
        (Lamp::None, Lamp::None, Lamp::None) => true,
        (Lamp::Perm(s), Lamp::Perm(t), Lamp::Perm(u)) => pts.iter().all(|p| {
            (1..=g.arity()).all(|i| {
                let (q, j) = t.apply(&(translate(p, h, -1), i));
                u.apply(&(p.clone(), i)) == s.apply(&(translate(&q, h, 1), j))
            })
        }),
        (Lamp::Matrix(s), Lamp::Matrix(t), Lamp::Matrix(u)) => {
            let f = g.field().unwrap();
            pts.iter().all(|p| {
                let e: SparseVec<Vec<i64>> = [(p.clone(), 1)].into_iter().collect();
                let back: SparseVec<Vec<i64>> = e.iter().map(|(q, c)| (translate(q, h, -1), *c)).collect();
                let mid: SparseVec<Vec<i64>> = t.apply(&back, f).into_iter().map(|(q, c)| (translate(&q, h, 1), c)).collect();
                u.apply(&e, f) == s.apply(&mid, f)
            })
        }
        (Lamp::Func(s), Lamp::Func(t), Lamp::Func(u)) => {
            let gamma = g.lamp_group().unwrap();
            pts.iter()
                .all(|p| u.get(p, gamma) == gamma.mul(s.get(p, gamma), t.get(&translate(p, h, -1), gamma)))
        }
        _ => false,
    }
}

/// No stored fixed points or identity values; cloner lamps are invertible on their support.
fn minimal_support(g: &Halo<Zd>, a: &Elem) -> bool {
    match &a.lamp {
        Lamp::None => true,
        Lamp::Perm(s) => s.entries().all(|(p, q)| p != q),
        Lamp::Func(f) => {
            let id = g.lamp_group().unwrap().identity();
            f.entries().all(|(_, v)| *v != id)
        }
        Lamp::Matrix(m) => {
            let f = g.field().unwrap();
            let mat = m.matrix();
            let n = mat.dim();
            let trivial = |j: usize| (0..n).all(|i| mat.get(i, j) == u32::from(i == j) && mat.get(j, i) == u32::from(i == j));
            mat.rank(f) == n && (0..n).all(|j| !trivial(j))
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn axioms_hold(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for g in families() {
            let (a, b, c) = (random(&g, &mut rng), random(&g, &mut rng), random(&g, &mut rng));
            let e = g.identity();
            prop_assert_eq!(canonical_text(&g.mul(&g.mul(&a, &b), &c)), canonical_text(&g.mul(&a, &g.mul(&b, &c))));
            prop_assert_eq!(g.mul(&a, &g.inv(&a)), e.clone());
            prop_assert_eq!(g.mul(&g.inv(&a), &a), e.clone());
            prop_assert_eq!(g.mul(&a, &e), a.clone());
            prop_assert_eq!(g.mul(&e, &a), a);
        }
    }

    #[test]
    fn compose_is_semidirect(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for g in families() {
            let (a, b) = (random(&g, &mut rng), random(&g, &mut rng));
            prop_assert!(semidirect_consistent(&g, &a, &b, &g.mul(&a, &b)), "{} * {}", canonical_text(&a), canonical_text(&b));
        }
    }

    #[test]
    fn supports_stay_minimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for g in families() {
            let (a, b) = (random(&g, &mut rng), random(&g, &mut rng));
            for x in [a.clone(), g.mul(&a, &b), g.inv(&a), g.mul(&a, &g.inv(&a))] {
                prop_assert!(minimal_support(&g, &x), "{}", canonical_text(&x));
            }
        }
    }
}

#[test]
fn wrong_product_is_rejected() {
    let g = Halo::shuffler(Zd::new(1));
    let shift = g.base_only(vec![1]);
    let tau = g.lamp_only(g.transposition(&vec![0], 1, &vec![1], 1));
    assert!(semidirect_consistent(&g, &shift, &tau, &g.mul(&shift, &tau)));
    assert!(!semidirect_consistent(&g, &shift, &tau, &g.mul(&tau, &shift)));
}
