//! Terms of the integrability series for a juggler tiling matched with a box
//! tiling of ℤ², under an iterated-log gauge and a power-tower gauge.

use halolab::tiling::convergence::{convergence_check, IntegrabilityFn, Scales};
use halolab::tiling::{matched_zd_tiling, HaloTiling, Tiling, TilingSpec};

fn main() {
    let a = HaloTiling::juggler(2, 2, 1).unwrap();
    let b = matched_zd_tiling(&TilingSpec::Juggler { d: 2, m: 2, r: 1 }, 2).unwrap();
    let phi = IntegrabilityFn::IterLogRatio { k: 1, a: 0.5, b: 2.0 };
    let psi = IntegrabilityFn::PowerTower { alpha: 2.0 / 3.0 };
    let rep = convergence_check(&phi, &psi, |n| a.level(n), |n| b.level(n), 200, Scales { c_phi: 1.0, c_psi: 1e4 });
    for (name, s) in [("phi", &rep.phi), ("psi", &rep.psi)] {
        let n = s.terms.len() - 1;
        println!(
            "{name}: term[{n}] = {:.3e}, partial sum {:.6}, last ratio {:.5}, verdict {:?}",
            s.terms[n], s.partial_sums[n], s.last_ratio, s.verdict
        );
    }
}
