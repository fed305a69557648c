//! Lifting a coupling of ℤ² and ℤ to juggler and cloner products, with the
//! word-length bounds of lamp generators and a direct simulation check.

use halolab::lift::simulate::simulate_word;
use halolab::lift::{zd_couple, Coupling, LiftFamily, Lifted, Side};
use std::sync::Arc;

fn main() {
    for family in [LiftFamily::Juggler { r: 1 }, LiftFamily::Cloner { q: 2 }] {
        let base: Arc<dyn Coupling> = Arc::new(zd_couple(2, 1, 2, 24).unwrap());
        let lift = Lifted::new(base, family).unwrap();
        let gens = lift.lamp_generators(Side::H);
        let (rep, _) = lift.bound_check(Side::H, &gens, 200, 2026).unwrap();
        println!(
            "{}: {} checked, {} violations, max ratio {:.2} (factor {})",
            rep.couple,
            rep.checked,
            rep.violations,
            rep.max_ratio,
            lift.lamp_factor()
        );
        let last = gens[gens.len() - 1];
        let sim = simulate_word(&lift, Side::H, &[0, last, 1], 2026, 0, 2).unwrap();
        println!("  simulated word [0, {last}, 1]: {} probes, agrees = {}", sim.probes, sim.ok());
    }
}
