//! Work of the vortex field around loops counts how often they wind about the origin.

use std::f64::consts::TAU;

use locon::fields::{is_closed, winding_number, work, FieldOneForm, PlanarPath, Rect};
use locon::quad::Rule;
use locon::Vec2;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = FieldOneForm::vortex();
    let closed = is_closed(&f, Rect::new(0.25, 0.25, 2.0, 2.0), 20, 1e-5, 1e-5)?;
    println!("df = 0 on {:?}: max residual {:.2e}", closed.region, closed.max_residual);

    println!("\n{:>6} {:>8} {:>18} {:>12}", "turns", "winding", "work", "work - 2 pi n");
    for turns in [-2.0, -1.0, 1.0, 3.0] {
        let c = PlanarPath::circle(Vec2::ZERO, 1.3, turns, 4000);
        let n = winding_number(&c, Vec2::ZERO)?.n;
        let w = work(&f, &c, Rule::Simpson)?;
        println!("{turns:>6} {n:>8} {w:>18.12} {:>12.2e}", w - TAU * n as f64);
    }

    // a square that misses the origin picks up nothing
    let sq = PlanarPath::polyline(
        vec![Vec2::new(1.0, 1.0), Vec2::new(2.0, 1.0), Vec2::new(2.0, 2.0), Vec2::new(1.0, 2.0), Vec2::new(1.0, 1.0)],
        800,
    );
    println!("\nsquare off the origin: winding {}, work {:.2e}", winding_number(&sq, Vec2::ZERO)?.n, work(&f, &sq, Rule::Simpson)?);

    // an exact field gives zero around any loop
    let g = FieldOneForm::radial_exact();
    let c = PlanarPath::circle(Vec2::ZERO, 1.0, 1.0, 2000);
    println!("radial-exact around the unit circle: {:.2e}", work(&g, &c, Rule::Simpson)?);
    Ok(())
}
