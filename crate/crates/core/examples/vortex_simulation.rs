//! Leapfrog motion in the vortex field with chart hand-overs and the energy ledger.

use locon::atlas::{cocycle, Atlas, PotentialSet, CONSTANCY_TOL};
use locon::dynamics::{energy_ledger, simulate, SimConfig};
use locon::fields::FieldOneForm;
use locon::verify::{trapped_vortex_orbit, CLOSED_ORBIT_STEPS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let at = Atlas::quadrant();
    let f = FieldOneForm::vortex();
    let ps = PotentialSet::build(&f, &at);
    let cc = cocycle(&ps, &at, 32, CONSTANCY_TOL)?;

    let cfg = SimConfig::new(f.clone(), at.clone());
    let tr = simulate(&cfg, &ps)?;
    let (a, b) = (tr.first().unwrap(), tr.last().unwrap());
    println!("benchmark: {} states, {} hand-overs", tr.states.len(), tr.transitions.len());
    println!("  p_theta {:.9} -> {:.9} (grows by T = {})", a.p_theta, b.p_theta, cfg.t_end);
    println!("  work along the path {:.9}, kinetic gain {:.9}", b.work, b.kinetic - a.kinetic);
    for t in &tr.transitions {
        println!("  t = {:>7.3}: chart {} -> {}, dE = {:+.9}", t.t, t.from.0, t.to.0, t.delta_e);
    }
    let led = energy_ledger(&tr, &f, &cc, 1e-6)?;
    println!("  max drift within a chart {:.2e}, max hand-over residual {:.2e}", led.max_segment_drift, led.max_transition_residual);

    // a closed orbit in a vortex plus a harmonic trap gains exactly one period of kinetic energy
    let tcfg = trapped_vortex_orbit(CLOSED_ORBIT_STEPS)?;
    let trap = tcfg.field.clone();
    let tps = PotentialSet::build(&trap, &tcfg.atlas);
    let orbit = simulate(&tcfg, &tps)?;
    let tcc = cocycle(&tps, &tcfg.atlas, 32, CONSTANCY_TOL)?;
    let led = energy_ledger(&orbit, &trap, &tcc, 1e-6)?;
    if let Some(l) = led.closed_loop {
        println!("\ntrapped orbit: gap {:.1e}, winding {}, dT {:.9}, expected {:.9}", l.gap, l.winding, l.delta_kinetic, l.expected);
    }
    Ok(())
}
