//! Projection and cone-sum soundness against direct one-dimensional
//! feasibility checks, plus exact LP sanity.

use groupcast_core::geometry::lp::{maximize, LpOutcome};
use groupcast_core::geometry::{
    fm_eliminate, minkowski_sum_with_cone, ConeGenerators, FmOptions, InequalitySystem, Pruning, Var,
};
use groupcast_core::rational::{int, ratio, zero};
use groupcast_core::{EntropyExpr, Label, Rational};
use proptest::prelude::*;

fn rate(s: &str) -> Var {
    Var::Rate(Label::parse(s).unwrap())
}

type Row = (Vec<i64>, i64);

fn build(vars: &[Var], rows: &[Row]) -> InequalitySystem {
    let mut sys = InequalitySystem::new(vars.iter().copied()).unwrap();
    for (c, b) in rows {
        let terms: Vec<(Var, Rational)> = vars.iter().zip(c).map(|(v, x)| (*v, int(*x))).collect();
        sys.push_le(&terms, EntropyExpr::constant(int(*b)), "").unwrap();
    }
    sys
}

fn satisfies(sys: &InequalitySystem, point: &[(Var, Rational)]) -> bool {
    sys.rows().iter().all(|r| {
        let mut lhs = zero();
        for (v, x) in point {
            if let Some(i) = sys.index_of(*v) {
                lhs += &r.coeffs[i] * x;
            }
        }
        lhs <= *r.rhs.constant_part()
    })
}

/// Whether `{t : a_i t <= b_i}` is nonempty.
fn interval_nonempty(rows: &[(Rational, Rational)]) -> bool {
    let (mut lo, mut hi): (Option<Rational>, Option<Rational>) = (None, None);
    for (a, b) in rows {
        if *a == zero() {
            if *b < zero() {
                return false;
            }
        } else if *a > zero() {
            let t = b / a;
            hi = Some(hi.map_or(t.clone(), |h| h.min(t)));
        } else {
            let t = b / a;
            lo = Some(lo.map_or(t.clone(), |l| l.max(t)));
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) => l <= h,
        _ => true,
    }
}

fn rows_strategy(width: usize) -> impl Strategy<Value = Vec<Row>> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, width), -4i64..=6), 1..7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn elimination_is_exact_projection(rows in rows_strategy(3), probes in prop::collection::vec((-8i64..=8, -8i64..=8), 12), exact in any::<bool>()) {
        let vars = [rate("1"), rate("2"), rate("12")];
        let sys = build(&vars, &rows);
        let pruning = if exact { Pruning::Exact } else { Pruning::Syntactic };
        let proj = fm_eliminate(&sys, &[vars[2]], &FmOptions { pruning, ..FmOptions::default() }).unwrap();
        prop_assert!(proj.index_of(vars[2]).is_none());
        for (p, q) in probes {
            let (x, y) = (ratio(p, 2), ratio(q, 2));
            let restricted: Vec<(Rational, Rational)> = rows
                .iter()
                .map(|(c, b)| (int(c[2]), int(*b) - int(c[0]) * &x - int(c[1]) * &y))
                .collect();
            let in_proj = satisfies(&proj, &[(vars[0], x.clone()), (vars[1], y.clone())]);
            prop_assert_eq!(in_proj, interval_nonempty(&restricted), "point ({}, {})", x, y);
        }
    }

    #[test]
    fn cone_sum_matches_definition(rows in rows_strategy(2), probes in prop::collection::vec((-8i64..=8, -8i64..=8), 12)) {
        let vars = [rate("1"), rate("12")];
        let sys = build(&vars, &rows);
        let cone = ConeGenerators::new([(Label::parse("1").unwrap(), Label::parse("12").unwrap())]).unwrap();
        let sum = minkowski_sum_with_cone(&sys, &cone, &FmOptions::default()).unwrap();
        for (p, q) in probes {
            let (x, y) = (ratio(p, 2), ratio(q, 2));
            // (x, y) - λ(1, -1) ∈ P for some λ >= 0
            let mut restricted: Vec<(Rational, Rational)> = rows
                .iter()
                .map(|(c, b)| (int(c[1] - c[0]), int(*b) - int(c[0]) * &x - int(c[1]) * &y))
                .collect();
            restricted.push((int(-1), zero()));
            let in_sum = satisfies(&sum, &[(vars[0], x.clone()), (vars[1], y.clone())]);
            prop_assert_eq!(in_sum, interval_nonempty(&restricted), "point ({}, {})", x, y);
        }
    }

    #[test]
    fn lp_optimum_is_feasible_and_dominates(rows in rows_strategy(2), c in prop::collection::vec(-3i64..=3, 2)) {
        let mut a: Vec<Vec<Rational>> = rows.iter().map(|(r, _)| r.iter().map(|x| int(*x)).collect()).collect();
        let mut b: Vec<Rational> = rows.iter().map(|(_, x)| int(*x)).collect();
        // box |x_i| <= 5 keeps it bounded
        for i in 0..2 {
            for s in [1, -1] {
                let mut row = vec![zero(), zero()];
                row[i] = int(s);
                a.push(row);
                b.push(int(5));
            }
        }
        let c: Vec<Rational> = c.iter().map(|x| int(*x)).collect();
        let feasible = |x: &[Rational]| a.iter().zip(&b).all(|(r, bi)| &r[0] * &x[0] + &r[1] * &x[1] <= *bi);
        let grid: Vec<Vec<Rational>> = (-10..=10)
            .flat_map(|i| (-10..=10).map(move |j| vec![ratio(i, 2), ratio(j, 2)]))
            .collect();
        match maximize(&a, &b, &c) {
            LpOutcome::Optimal { value, point } => {
                prop_assert!(feasible(&point));
                prop_assert_eq!(&value, &(&c[0] * &point[0] + &c[1] * &point[1]));
                for g in grid.iter().filter(|g| feasible(g)) {
                    prop_assert!(&c[0] * &g[0] + &c[1] * &g[1] <= value);
                }
            }
            LpOutcome::Infeasible => prop_assert!(grid.iter().all(|g| !feasible(g))),
            LpOutcome::Unbounded { .. } => prop_assert!(false, "boxed LP reported unbounded"),
        }
    }
}
