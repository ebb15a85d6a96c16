//! Acceptance gate: every criterion at its stated tolerance, one line each.
//!
//! Checks listed in `KNOWN_UNATTAINABLE` are printed as FAIL like any other.
//! The test requires them to keep failing, so a change in their status is
//! noticed rather than silently absorbed.

use std::process::Command;
use std::time::Instant;

use locon::atlas::{cocycle, Atlas, ChartId, PotentialSet, CONSTANCY_TOL};
use locon::fields::{work, FieldOneForm, PlanarPath};
use locon::quad::{gauss_legendre, Rule};
use locon::verify::{CriterionResult, Suite, CRITERIA};
use locon::Vec2;

/// `(criterion, check)` pairs that cannot pass; see the decision notes.
const KNOWN_UNATTAINABLE: [(u8, &str); 1] = [(5, "error ratio h = 1e-3 over h = 5e-4")];

/// Runtime budgets in seconds, measured on a fresh suite.
const BUDGETS: [(u8, f64); 3] = [(1, 1.0), (4, 1.0), (5, 5.0)];

fn timed(id: u8) -> (CriterionResult, f64) {
    let mut s = Suite::new();
    let t = Instant::now();
    let r = s.run(id);
    (r, t.elapsed().as_secs_f64())
}

/// Vortex period around the unit circle by 64-point Gauss-Legendre on
/// `θ ↦ f(γ(θ))·γ'(θ)`, independent of the path and quadrature modules.
fn oracle_period() -> f64 {
    let (x, w) = gauss_legendre(64);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| {
            let th = std::f64::consts::PI * (xi + 1.0);
            let (c, s) = (th.cos(), th.sin());
            let integrand = (-s) * (-s) + c * c;
            wi * std::f64::consts::PI * integrand
        })
        .sum()
}

fn main() {
    let mut lines = Vec::new();
    let mut unexpected = Vec::new();
    let mut suite = Suite::new();

    for &(id, name) in &CRITERIA {
        let (result, secs) = match BUDGETS.iter().find(|b| b.0 == id) {
            Some(_) => timed(id),
            None => {
                let t = Instant::now();
                let r = suite.run(id);
                (r, t.elapsed().as_secs_f64())
            }
        };
        let mut checks: Vec<(String, bool)> = result.checks.iter().map(|c| (c.name.clone(), c.pass)).collect();
        if let Some(&(_, budget)) = BUDGETS.iter().find(|b| b.0 == id) {
            checks.push((format!("runtime {secs:.2} s < {budget} s"), secs < budget));
        }
        match id {
            3 => {
                // cycle sum against an independent period integral
                let at = Atlas::quadrant();
                let cc = cocycle(&PotentialSet::build(&FieldOneForm::vortex(), &at), &at, 32, CONSTANCY_TOL).unwrap();
                let sum = cc.cycle_sum(&[1, 2, 3, 4, 1].map(ChartId)).unwrap();
                checks.push(("cycle sum = -(oracle period) within 1e-6".into(), (sum + oracle_period()).abs() < 1e-6));
            }
            1 => {
                let f = FieldOneForm::vortex();
                let w = work(&f, &PlanarPath::circle(Vec2::ZERO, 0.7, 2.0, 4000), Rule::Simpson).unwrap();
                checks.push(("two turns vs 2 x oracle period".into(), (w - 2.0 * oracle_period()).abs() < 1e-7));
            }
            10 => {
                let bin = env!("CARGO_BIN_EXE_locon");
                let run = || Command::new(bin).args(["verify", "--deterministic"]).output().unwrap();
                let (a, b) = (run(), run());
                checks.push(("binary verify --deterministic twice: identical stdout".into(), a.stdout == b.stdout && !a.stdout.is_empty()));
                let ja = Command::new(bin).args(["verify", "--deterministic", "--json"]).output().unwrap();
                let jb = Command::new(bin).args(["verify", "--deterministic", "--json"]).output().unwrap();
                checks.push(("binary verify --deterministic --json twice: identical".into(), ja.stdout == jb.stdout));
            }
            _ => {}
        }

        let pass = checks.iter().all(|c| c.1);
        let failing: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
        lines.push(format!(
            "{} criterion {id:>2} {name}{}",
            if pass { "PASS" } else { "FAIL" },
            if failing.is_empty() { String::new() } else { format!(" (failing: {})", failing.join("; ")) }
        ));
        for (check, ok) in &checks {
            let known = KNOWN_UNATTAINABLE.contains(&(id, check.as_str()));
            if ok == &known {
                unexpected.push(format!("criterion {id}: `{check}` {}", if *ok { "passes but is listed as unattainable" } else { "fails" }));
            }
        }
    }
    for l in &lines {
        println!("{l}");
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected results: {unexpected:#?}");
        std::process::exit(1);
    }
}
