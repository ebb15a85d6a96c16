use std::f64::consts::TAU;

use locon::atlas::{cocycle, exactness_test, Atlas, ChartId, PotentialSet, CONSTANCY_TOL};
use locon::bundle::{canonical_point, TransitionSystem};
use locon::cover::{continue_log, sheet_of, LiftState, LogGerm};
use locon::expr::{Func, Node, ScalarExpr, Var};
use locon::fields::{winding_number, work, FieldOneForm, PlanarPath};
use locon::quad::Rule;
use locon::Vec2;
use num_complex::Complex64;
use proptest::prelude::*;

fn arb_node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        (0u32..10_000, 0u32..4).prop_map(|(m, e)| Node::Num(m as f64 / 10f64.powi(e as i32))),
        Just(Node::Pi),
        Just(Node::Var(Var::X)),
        Just(Node::Var(Var::Y)),
    ];
    leaf.prop_recursive(5, 40, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Node::neg),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::div(a, b)),
            (inner.clone(), -3i32..5).prop_map(|(a, n)| Node::pow(a, n)),
            (inner.clone(), 0usize..6).prop_map(|(a, k)| {
                let f = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt, Func::Abs][k];
                Node::call(f, vec![a])
            }),
            (inner.clone(), inner).prop_map(|(a, b)| Node::call(Func::Atan2, vec![a, b])),
        ]
    })
}

fn same_eval(a: &ScalarExpr, b: &ScalarExpr, x: f64, y: f64) -> bool {
    match (a.eval(x, y), b.eval(x, y)) {
        (Ok(u), Ok(v)) => u.to_bits() == v.to_bits(),
        (Err(_), Err(_)) => true,
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_parse_roundtrip(node in arb_node(), pts in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 10)) {
        let e = ScalarExpr::from_node(node);
        let back = ScalarExpr::parse(&e.to_string()).unwrap();
        prop_assert_eq!(back.node(), e.node());
        for (x, y) in pts {
            prop_assert!(same_eval(&e, &back, x, y));
        }
    }
}

fn arb_point(r0: f64, r1: f64) -> impl Strategy<Value = Vec2> {
    (r0..r1, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, a)| Vec2::new(r * a.cos(), r * a.sin()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn work_additive_and_antisymmetric(a in arb_point(0.5, 3.0), b in arb_point(0.5, 3.0), c in arb_point(0.5, 3.0)) {
        let f = FieldOneForm::radial_exact();
        let p = PlanarPath::polyline(vec![a, b], 200);
        let q = PlanarPath::polyline(vec![b, c], 200);
        let wp = work(&f, &p, Rule::Simpson).unwrap();
        let wq = work(&f, &q, Rule::Simpson).unwrap();
        let wpq = work(&f, &p.then(&q), Rule::Simpson).unwrap();
        prop_assert!((wpq - wp - wq).abs() < 1e-10);
        prop_assert!((work(&f, &p.reversed(), Rule::Simpson).unwrap() + wp).abs() < 1e-10);
        // the exact field integrates to a potential difference
        prop_assert!((wp - (b.norm_sq() - a.norm_sq())).abs() < 1e-9);
    }

    #[test]
    fn vortex_work_counts_turns(n in -3i64..=3, r in 0.2f64..4.0, cx in -0.15f64..0.15, cy in -0.15f64..0.15) {
        let c = PlanarPath::circle(Vec2::new(cx * r, cy * r), r, n as f64, 2000 * n.unsigned_abs().max(1) as usize);
        let w = winding_number(&c, Vec2::ZERO).unwrap();
        prop_assert_eq!(w.n, n);
        let wk = work(&FieldOneForm::vortex(), &c, Rule::Simpson).unwrap();
        prop_assert!((wk - TAU * w.n as f64).abs() < 1e-7);
    }

    #[test]
    fn gauge_shift_moves_cocycle_by_coboundary(g in proptest::collection::vec(-3.0f64..3.0, 4)) {
        let at = Atlas::quadrant();
        let f = FieldOneForm::vortex();
        let ps = PotentialSet::build(&f, &at);
        let cc = cocycle(&ps, &at, 8, CONSTANCY_TOL).unwrap();
        let shifted = cocycle(&ps.gauge_shift(&g).unwrap(), &at, 8, CONSTANCY_TOL).unwrap();
        for (i, j) in cc.edges() {
            let expect = cc.c(i, j).unwrap() + g[i.0 as usize - 1] - g[j.0 as usize - 1];
            prop_assert!((shifted.c(i, j).unwrap() - expect).abs() < 1e-9);
            prop_assert_eq!(shifted.c(j, i).unwrap(), -shifted.c(i, j).unwrap());
        }
        let cycle: Vec<ChartId> = [1, 2, 3, 4, 1].map(ChartId).to_vec();
        prop_assert!((shifted.cycle_sum(&cycle).unwrap() + TAU).abs() < 1e-6);
        let ts = TransitionSystem::new(&shifted).unwrap();
        prop_assert!(!ts.is_trivial().unwrap().trivial);
        prop_assert!((ts.log_holonomy(&cycle).unwrap() - exactness_test(&shifted).unwrap().periods[0].period).abs() < 1e-9);
    }

    #[test]
    fn canonical_point_respects_equivalence(s in 0.3f64..2.0, axis in 0usize..4, a in 0.1f64..10.0) {
        let at = Atlas::quadrant();
        let ps = PotentialSet::build(&FieldOneForm::vortex(), &at);
        let ts = TransitionSystem::new(&cocycle(&ps, &at, 8, CONSTANCY_TOL).unwrap()).unwrap();
        // half-axis shared by charts i and j
        let (q, i, j) = [
            (Vec2::new(0.0, s), 1, 2),
            (Vec2::new(-s, 0.0), 2, 3),
            (Vec2::new(0.0, -s), 3, 4),
            (Vec2::new(s, 0.0), 1, 4),
        ][axis];
        let (i, j) = (ChartId(i), ChartId(j));
        let from_i = canonical_point(&ts, &at, i, q, a).unwrap();
        let from_j = canonical_point(&ts, &at, j, q, ts.t(i, j).unwrap() * a).unwrap();
        prop_assert_eq!(from_i.chart, from_j.chart);
        prop_assert!((from_i.fiber - from_j.fiber).abs() <= 1e-12 * from_i.fiber.abs());
    }

    #[test]
    fn log_continuation_is_a_groupoid(
        seed_sheet in -3i64..=3,
        steps in proptest::collection::vec((0.4f64..3.0, -1.3f64..1.3), 2..8),
        split in 1usize..7,
    ) {
        let mut v = vec![Vec2::new(1.0, 0.0)];
        let mut th = 0.0;
        for (r, d) in &steps {
            th += d;
            v.push(Vec2::new(r * th.cos(), r * th.sin()));
        }
        let k = split.min(v.len() - 2);
        let a = PlanarPath::polyline(v[..=k].to_vec(), 10 * k);
        let b = PlanarPath::polyline(v[k..].to_vec(), 10 * (v.len() - k).max(1));
        let g = LogGerm::new(Complex64::new(1.0, 0.0), seed_sheet).unwrap();
        let whole = continue_log(&g, &a.then(&b)).unwrap();
        let stepwise = continue_log(&continue_log(&g, &a).unwrap(), &b).unwrap();
        prop_assert_eq!(whole.sheet, stepwise.sheet);
        prop_assert!((whole.value() - stepwise.value()).norm() < 1e-9);
        // the imaginary part tracks the swept angle exactly up to rounding
        prop_assert!((whole.value().im - (TAU * seed_sheet as f64 + th)).abs() < 1e-9);
    }

    #[test]
    fn sheet_of_counts_whole_turns(u in -3.0f64..3.0, arg in -3.1f64..3.1, n in -5i64..=5) {
        let ls = LiftState { t: 0.0, u, v: arg + TAU * n as f64 };
        prop_assert_eq!(sheet_of(&ls).unwrap(), n);
    }
}
