use infoplan::agent::CoupledProcess;
use infoplan::agent::{brute_force_value, solve_extended, BRUTE_FORCE_NODE_CAP};
use infoplan::domains::{CellSet, Grid, Sonar, SubmarineProcess};
use infoplan::dp::SolveOptions;

fn log2(x: f64) -> f64 {
    x.log2()
}

fn three() -> SubmarineProcess {
    SubmarineProcess::new(Grid::new(3, 3).unwrap())
}

#[test]
fn three_by_three_needs_three_sweeps_from_an_edge() {
    let p = three();
    let sol = solve_extended(&p, 3, SolveOptions::default()).unwrap();
    let (v, starts) = sol.best_start().unwrap();
    assert!((v - log2(9.0)).abs() < 1e-9, "{v}");
    assert_eq!(starts, vec![2, 4, 6, 8]);
    for s in &starts {
        assert_eq!(p.grid().sonar_coverage(*s, &CellSet::empty()).0, 4);
    }
}

#[test]
fn two_sweeps_are_not_enough() {
    let sol = solve_extended(&three(), 2, SolveOptions::default()).unwrap();
    assert!(sol.best_start().unwrap().0 < log2(9.0) - 1e-6);
}

#[test]
fn symmetry_classes_share_values() {
    let p = three();
    let sol = solve_extended(&p, 3, SolveOptions::default()).unwrap();
    let x0 = CellSet::empty();
    for class in [[2, 4, 6, 8], [1, 3, 7, 9]] {
        let v0 = sol.value(0, &class[0], &x0).unwrap();
        for c in class {
            assert!((sol.value(0, &c, &x0).unwrap() - v0).abs() < 1e-12);
        }
    }
}

#[test]
fn corner_starts_fall_short_at_three_stages() {
    let p = three().with_starts(vec![1, 3, 7, 9]).unwrap();
    let v3 = solve_extended(&p, 3, SolveOptions::default())
        .unwrap()
        .best_start()
        .unwrap()
        .0;
    assert!(v3 < log2(9.0) - 1e-6, "{v3}");
    let v4 = solve_extended(&p, 4, SolveOptions::default())
        .unwrap()
        .best_start()
        .unwrap()
        .0;
    assert!((v4 - log2(9.0)).abs() < 1e-9, "{v4}");
}

/// `(x'_0, u'_0, [u'_1 options])` with controls written as cell-id offsets.
const SHIP_TABLE: [(u16, i32, [i32; 2]); 4] = [(2, 6, [-4, -2]), (4, 2, [-4, 2]), (6, -2, [-2, 4]), (8, -6, [2, 4])];

#[test]
fn optimal_controls_include_the_ship_table() {
    let p = three();
    let g = p.grid().clone();
    let sol = solve_extended(&p, 3, SolveOptions::default()).unwrap();
    for (start, u0, u1s) in SHIP_TABLE {
        let d0 = sol.decision(0, &start, &CellSet::empty()).unwrap();
        let offsets: Vec<i32> = d0.controls.iter().map(|m| m.cell_offset(3)).collect();
        assert!(offsets.contains(&u0), "start {start}: {offsets:?}");
        let next = (i32::from(start) + u0) as u16;
        // the sweep from the start came back clear
        let mask = p.transition(0, &CellSet::empty(), &start, &Sonar::Clear);
        let d1 = sol.decision(1, &next, &mask).unwrap();
        let offsets: Vec<i32> = d1.controls.iter().map(|m| m.cell_offset(3)).collect();
        for u1 in u1s {
            assert!(offsets.contains(&u1), "start {start} -> {next}: {offsets:?}");
            let mv = d1.controls.iter().find(|m| m.cell_offset(3) == u1).unwrap();
            assert_eq!(i32::from(g.destination(next, *mv).unwrap()), i32::from(next) + u1);
        }
    }
}

#[test]
fn exact_matches_decision_tree_oracle() {
    for (w, h, n_max) in [(2, 2, 3), (3, 3, 3), (2, 3, 3)] {
        let p = SubmarineProcess::new(Grid::new(w, h).unwrap());
        for n in 1..=n_max {
            let exact = solve_extended(&p, n, SolveOptions::default())
                .unwrap()
                .best_start()
                .unwrap()
                .0;
            let oracle = brute_force_value(&p, n, BRUTE_FORCE_NODE_CAP).unwrap();
            assert!((exact - oracle).abs() < 1e-9, "{w}x{h} N={n}: {exact} vs {oracle}");
        }
    }
}

#[test]
fn horizon_is_monotone() {
    let p = SubmarineProcess::new(Grid::new(3, 4).unwrap());
    let mut last = 0.0;
    for n in 1..=4 {
        let v = solve_extended(&p, n, SolveOptions::default())
            .unwrap()
            .best_start()
            .unwrap()
            .0;
        assert!(v >= last - 1e-12);
        last = v;
    }
}

#[test]
fn state_cap_is_reported() {
    let err = solve_extended(&three(), 3, SolveOptions { state_cap: 20 }).unwrap_err();
    assert_eq!(
        err,
        infoplan::Error::Resource {
            what: "reachable augmented state entries".into(),
            cap: 20
        }
    );
}
