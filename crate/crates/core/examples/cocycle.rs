//! Local potentials on the quadrant atlas, their transition cocycle, and classification.

use locon::atlas::{classify, cocycle, exactness_test, Atlas, ChartId, ClassifyOptions, PotentialSet, CONSTANCY_TOL, DEFAULT_OVERLAP_SAMPLES};
use locon::fields::FieldOneForm;
use locon::Vec2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let at = Atlas::quadrant();
    let f = FieldOneForm::vortex();
    let ps = PotentialSet::build(&f, &at);

    let q = Vec2::new(0.3, 1.7);
    for id in at.containing(q) {
        println!("V_{}({}, {}) = {:.12}", id.0, q.x, q.y, ps.eval(id, q)?);
    }

    let cc = cocycle(&ps, &at, DEFAULT_OVERLAP_SAMPLES, CONSTANCY_TOL)?;
    println!("\n{:>4} {:>4} {:>18} {:>10}", "i", "j", "c_ij", "spread");
    for r in cc.rows() {
        println!("{:>4} {:>4} {:>18.12} {:>10.1e}", r.i.0, r.j.0, r.c, r.spread);
    }
    let cycle = [1, 2, 3, 4, 1].map(ChartId);
    println!("\nsum around 1-2-3-4-1: {:.12}", cc.cycle_sum(&cycle)?);

    let ex = exactness_test(&cc)?;
    println!("exact: {}", ex.exact);

    for field in [FieldOneForm::vortex(), FieldOneForm::radial_exact(), FieldOneForm::x_dy()] {
        let rep = classify(&field, &at, &ClassifyOptions::default())?;
        println!("{:<14} {}", rep.field, rep.classification);
    }
    Ok(())
}
