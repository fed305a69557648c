//! Multiplying elements of halo products: a shuffler over ℤ, a cloner over ℤ²
//! and a lamplighter, with inverses and canonical text forms.

use halolab::group::{Group, Zd};
use halolab::{canonical_text, FiniteGroup, Halo, PrimeField};

fn main() {
    let sh = Halo::shuffler(Zd::new(1));
    let shift = sh.base_only(vec![1]);
    let swap = sh.lamp_only(sh.transposition(&vec![0], 1, &vec![1], 1));
    let g = sh.mul(&shift, &swap);
    println!("shuffler: shift * swap = {}", canonical_text(&g));
    println!("shuffler: swap * shift = {}", canonical_text(&sh.mul(&swap, &shift)));
    println!("shuffler: inverse      = {}", canonical_text(&sh.inv(&g)));

    let cl = Halo::cloner(Zd::new(2), PrimeField::new(3).unwrap());
    let t = cl.lamp_only(cl.transvection(&vec![0, 0], &vec![1, 0], 2));
    let u = cl.lamp_only(cl.transvection(&vec![1, 0], &vec![1, 1], 1));
    println!("cloner: t * u = {}", canonical_text(&cl.mul(&t, &u)));
    println!("cloner: t^3   = {}", canonical_text(&cl.pow(&t, 3)));

    let ll = Halo::wreath(Zd::new(1), FiniteGroup::cyclic(2));
    let gens = ll.generators();
    let walk = ll.eval_word(&gens, &[gens.len() - 1, 0, gens.len() - 1, 0]);
    println!("lamplighter: {} generators, (lamp shift)^2 = {}", gens.len(), canonical_text(&walk));
}
