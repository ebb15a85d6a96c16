//! The line bundle glued from exp of the vortex cocycle, its holonomy, and point identification.

use locon::atlas::{cocycle, Atlas, ChartId, PotentialSet, CONSTANCY_TOL};
use locon::bundle::{canonical_point, TransitionSystem};
use locon::fields::FieldOneForm;
use locon::Vec2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let at = Atlas::quadrant();
    for f in [FieldOneForm::vortex(), FieldOneForm::radial_exact()] {
        let cc = cocycle(&PotentialSet::build(&f, &at), &at, 32, CONSTANCY_TOL)?;
        let ts = TransitionSystem::new(&cc)?;
        println!("{}:", f.name);
        for e in ts.entries() {
            println!("  t_{}{} = {:.12e}", e.i.0, e.j.0, e.t);
        }
        let cycle = [1, 2, 3, 4, 1].map(ChartId);
        println!("  log holonomy {:.12}, holonomy {:.6e}", ts.log_holonomy(&cycle)?, ts.holonomy(&cycle)?);
        let triv = ts.is_trivial()?;
        println!("  trivial: {}", triv.trivial);
        if let Some(g) = &triv.fiber_gauges {
            println!("  fiber gauges {g:?}");
        }

        // the same point of the bundle written in two charts
        let q = Vec2::new(0.0, 0.8);
        let (i, j) = (ChartId(1), ChartId(2));
        let a = 2.5;
        let p1 = canonical_point(&ts, &at, i, q, a)?;
        let p2 = canonical_point(&ts, &at, j, q, ts.t(i, j)? * a)?;
        println!("  ({}, q, {a}) -> chart {} fiber {:.9}; ({}, q, t_12 a) -> chart {} fiber {:.9}\n", i.0, p1.chart.0, p1.fiber, j.0, p2.chart.0, p2.fiber);
    }
    Ok(())
}
