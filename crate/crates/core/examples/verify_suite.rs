//! Runs the built-in vortex acceptance suite and prints the table.

use locon::verify::run_all;

fn main() {
    let report = run_all(true);
    print!("{}", report.table());
    for c in &report.criteria {
        println!("criterion {:>2}: {:.2} s", c.id, c.seconds.unwrap_or(0.0));
    }
    println!("overall: {}", if report.pass { "pass" } else { "fail" });
}
