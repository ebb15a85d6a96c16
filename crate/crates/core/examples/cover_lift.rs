//! Lifting a trajectory to the log cover, where the vortex energy is single-valued.

use locon::atlas::{Atlas, PotentialSet};
use locon::cover::{continue_log, cover_energy, lift_trajectory, monodromy_log, sheet_of, vortex_cover_potential, LogGerm};
use locon::dynamics::{simulate, SimConfig};
use locon::fields::{FieldOneForm, PlanarPath};
use locon::Vec2;
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let at = Atlas::quadrant();
    let f = FieldOneForm::vortex();
    let mut cfg = SimConfig::new(f.clone(), at.clone());
    cfg.t_end = 10.0;
    let tr = simulate(&cfg, &PotentialSet::build(&f, &at))?;

    let lift = lift_trajectory(&tr, 0);
    for l in lift.iter().step_by(2000) {
        println!("t = {:>5.2}  u = {:+.6}  v = {:+.6}  sheet {}", l.t, l.u, l.v, sheet_of(l)?);
    }
    let ce = cover_energy(&tr, &lift, vortex_cover_potential)?;
    println!("cover energy drift over the run: {:.2e}", ce.max_drift);

    // analytic continuation of log around the origin
    let g = LogGerm::new(Complex64::new(1.0, 0.0), 0)?;
    for n in [1.0, 2.0, -1.0] {
        let loop_ = PlanarPath::circle(Vec2::ZERO, 1.0, n, 400 * n.abs() as usize);
        let h = continue_log(&g, &loop_)?;
        println!("{n:+} turns: sheet {}, log = {:.12}  (monodromy {})", h.sheet, h.value(), monodromy_log(n as i64));
    }
    Ok(())
}
