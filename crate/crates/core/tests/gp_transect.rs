use infoplan::gp::{
    joint_path_entropy, plan_transect, plan_transect_with, posterior, stage_entropy, GpPosterior, Lattice, Lookahead,
    Point, SquaredExponential, TransectMode, TransectProblem,
};
use infoplan::rollout::{RolloutConfig, TieBreak};
use infoplan::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn se(l: f64, s: f64, n: f64) -> SquaredExponential {
    SquaredExponential::new(l, s, n).unwrap()
}

fn gram(k: &SquaredExponential, pts: &[Point]) -> DMatrix<f64> {
    DMatrix::from_fn(pts.len(), pts.len(), |i, j| {
        k.covariance(&pts[i], &pts[j]) + if i == j { k.noise_variance } else { 0.0 }
    })
}

/// Dense Schur complement `κ - pᵀ (K + σ²I)⁻¹ p`.
fn schur_variance(k: &SquaredExponential, history: &[Point], q: &Point) -> f64 {
    if history.is_empty() {
        return k.signal_variance;
    }
    let p = DVector::from_iterator(history.len(), history.iter().map(|x| k.covariance(x, q)));
    let sol = gram(k, history).lu().solve(&p).unwrap();
    k.signal_variance - p.dot(&sol)
}

fn log_det_entropy(k: &SquaredExponential, pts: &[Point]) -> f64 {
    let det = gram(k, pts).determinant();
    0.5 * (pts.len() as f64 * (2.0 * std::f64::consts::PI * std::f64::consts::E).log2() + det.log2())
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, extent: f64) -> Vec<Point> {
    (0..n)
        .map(|_| [rng.gen_range(0.0..extent), rng.gen_range(0.0..extent)])
        .collect()
}

#[test]
fn posterior_variance_matches_dense_schur_complement() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let k = se(
            rng.gen_range(0.5..3.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.01..0.5),
        );
        let n = rng.gen_range(0..=20);
        let history = random_points(&mut rng, n, 10.0);
        let mut gp = GpPosterior::new(k);
        for p in &history {
            gp.push(*p).unwrap();
        }
        let q = random_points(&mut rng, 1, 10.0)[0];
        let outcomes: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let (_, var) = posterior(&gp, &outcomes, &q).unwrap();
        let oracle = schur_variance(&k, &history, &q);
        assert!((var - oracle).abs() < 1e-10, "{var} vs {oracle}");
    }
}

#[test]
fn stage_entropies_sum_to_joint_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let k = se(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.01..0.3),
        );
        let n = rng.gen_range(1..=12);
        let path = random_points(&mut rng, n, 8.0);
        let mut gp = GpPosterior::new(k);
        let mut sum = 0.0;
        for p in &path {
            sum += stage_entropy(&gp, p).unwrap();
            gp.push(*p).unwrap();
        }
        let joint = joint_path_entropy(&k, &path).unwrap();
        assert!((sum - joint).abs() < 1e-9, "{sum} vs {joint}");
        assert!((joint - log_det_entropy(&k, &path)).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn conditioning_never_raises_variance(
        seed in any::<u64>(),
        n in 0usize..15,
        noise in 0.0f64..0.3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = se(rng.gen_range(0.3..2.0), 1.0, noise + 1e-3);
        let pts = random_points(&mut rng, n + 1, 6.0);
        let q = random_points(&mut rng, 1, 6.0)[0];
        let mut gp = GpPosterior::new(k);
        for p in &pts[..n] {
            gp.push(*p).unwrap();
        }
        let before = gp.variance(&q).unwrap();
        let after = gp.extended(pts[n]).unwrap().variance(&q).unwrap();
        prop_assert!(after <= before + 1e-12);
        prop_assert!(before <= k.signal_variance + 1e-12);
    }
}

#[test]
fn far_query_sees_the_prior() {
    let k = se(1.0, 1.0, 0.0);
    let mut gp = GpPosterior::new(k);
    for i in 0..4 {
        gp.push([i as f64, 0.0]).unwrap();
    }
    let prior = stage_entropy(&GpPosterior::new(k), &[0.0, 0.0]).unwrap();
    assert!((stage_entropy(&gp, &[3.0 + 10.0, 0.0]).unwrap() - prior).abs() < 1e-6);
}

fn problem(lattice: Lattice, kernel: SquaredExponential, horizon: usize, mode: TransectMode) -> TransectProblem {
    TransectProblem {
        lattice,
        kernel,
        horizon,
        mode,
        window: None,
    }
}

fn config(horizon: usize) -> RolloutConfig {
    let mut c = RolloutConfig::new(horizon);
    c.samples_per_control = 16;
    c.rng_seed = 3;
    c
}

/// Best joint entropy over every admissible path of `n` moves from `start`.
fn path_oracle(lattice: &Lattice, k: &SquaredExponential, start: usize, n: usize) -> Option<f64> {
    fn go(lattice: &Lattice, k: &SquaredExponential, path: &mut Vec<usize>, left: usize, best: &mut Option<f64>) {
        if left == 0 {
            let pts: Vec<Point> = path.iter().map(|w| lattice.points[*w]).collect();
            let v = log_det_entropy(k, &pts);
            *best = Some(best.map_or(v, |b| b.max(v)));
            return;
        }
        let last = *path.last().unwrap();
        for &w in &lattice.neighbors[last] {
            if k.noise_variance == 0.0 && path.contains(&w) {
                continue;
            }
            path.push(w);
            go(lattice, k, path, left - 1, best);
            path.pop();
        }
    }
    let mut best = None;
    go(lattice, k, &mut vec![start], n, &mut best);
    best
}

#[test]
fn one_move_picks_the_most_uncertain_neighbour() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let pts = random_points(&mut rng, 6, 4.0);
        let neighbors = (0..6).map(|i| (0..6).filter(|j| *j != i).collect()).collect();
        let lattice = Lattice::new(pts.clone(), neighbors).unwrap();
        let k = se(1.0, 1.0, 0.05);
        let plan = plan_transect(&problem(lattice, k, 1, TransectMode::Deterministic), 0, &config(1)).unwrap();
        let chosen = plan.steps[1].waypoint;
        let var = |w: usize| schur_variance(&k, &pts[..1], &pts[w]);
        let best = (1..6).map(var).fold(f64::NEG_INFINITY, f64::max);
        assert!((var(chosen) - best).abs() < 1e-9);
    }
}

#[test]
fn five_point_line_three_moves_matches_enumeration() {
    let k = se(1.0, 1.0, 0.0);
    let lattice = Lattice::line(5, 1.0, 2).unwrap();
    for start in 0..5 {
        let p = problem(lattice.clone(), k, 3, TransectMode::Deterministic);
        let oracle = path_oracle(&lattice, &k, start, 3).unwrap();
        let exact = plan_transect_with(&p, start, &config(3), Lookahead::Exhaustive).unwrap();
        assert!((exact.total_entropy - oracle).abs() < 1e-8, "start {start}");
        let rollout = plan_transect(&p, start, &config(3)).unwrap();
        assert!(rollout.total_entropy <= oracle + 1e-8);
    }
}

fn small_lattices() -> Vec<Lattice> {
    let mut out = Vec::new();
    for n in 2..=6 {
        for reach in 1..n {
            out.push(Lattice::line(n, 1.0, reach).unwrap());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..20 {
        let n = rng.gen_range(2..=6);
        let pts: Vec<Point> = (0..n).map(|i| [i as f64 * 0.8, rng.gen_range(0.0..2.0)]).collect();
        let neighbors = (0..n)
            .map(|i| {
                let list: Vec<usize> = (0..n).filter(|j| *j != i && rng.gen_bool(0.6)).collect();
                if list.is_empty() {
                    vec![(i + 1) % n]
                } else {
                    list
                }
            })
            .collect();
        out.push(Lattice::new(pts, neighbors).unwrap());
    }
    out
}

#[test]
fn exhaustive_lookahead_matches_path_enumeration() {
    for lattice in small_lattices() {
        for k in [se(1.0, 1.0, 0.0), se(0.7, 2.0, 0.05)] {
            for n in 1..=4 {
                for start in 0..lattice.len() {
                    let p = problem(lattice.clone(), k, n, TransectMode::Deterministic);
                    let oracle = path_oracle(&lattice, &k, start, n);
                    let plan = plan_transect_with(&p, start, &config(n), Lookahead::Exhaustive);
                    match (oracle, plan) {
                        (Some(v), Ok(plan)) => {
                            assert!((plan.total_entropy - v).abs() < 1e-8, "{lattice:?} N={n} start {start}");
                            assert!((plan.joint_entropy.unwrap() - v).abs() < 1e-8);
                        }
                        (None, Err(Error::Model(_))) => {}
                        (o, p) => panic!("{lattice:?} N={n} start {start}: oracle {o:?}, planner {p:?}"),
                    }
                }
            }
        }
    }
}

#[test]
fn two_fields_one_sensor_tracks_the_louder_field() {
    let quiet = se(1.0, 1.0, 0.0);
    let loud = se(1.0, 4.0, 0.0);
    let lattice = Lattice::grid(3, 3, 1.0).unwrap();
    let mode = TransectMode::MultiField {
        kernels: vec![quiet, loud],
        selections: vec![vec![true, false], vec![false, true]],
    };
    let multi = plan_transect_with(
        &problem(lattice.clone(), quiet, 4, mode),
        4,
        &config(4),
        Lookahead::Exhaustive,
    )
    .unwrap();
    let single = plan_transect_with(
        &problem(lattice, quiet, 4, TransectMode::Deterministic),
        4,
        &config(4),
        Lookahead::Exhaustive,
    )
    .unwrap();
    assert_eq!(multi.waypoints(), single.waypoints());
    assert!(multi.joint_entropy.is_none());
    for (m, s) in multi.steps.iter().zip(&single.steps) {
        assert_eq!(m.selection, vec![false, true]);
        assert!((m.entropy - s.entropy - 1.0).abs() < 1e-9);
    }
}

#[test]
fn zero_slip_is_deterministic_motion() {
    let k = se(1.0, 1.0, 0.02);
    let lattice = Lattice::grid(3, 3, 1.0).unwrap();
    for lookahead in [Lookahead::Rollout, Lookahead::Exhaustive] {
        let det = plan_transect_with(
            &problem(lattice.clone(), k, 3, TransectMode::Deterministic),
            0,
            &config(3),
            lookahead,
        )
        .unwrap();
        let sto = plan_transect_with(
            &problem(lattice.clone(), k, 3, TransectMode::Stochastic { slip: 0.0 }),
            0,
            &config(3),
            lookahead,
        )
        .unwrap();
        assert_eq!(det, sto);
    }
}

#[test]
fn slipping_plans_are_reproducible_and_consistent() {
    let k = se(1.0, 1.0, 0.02);
    let lattice = Lattice::grid(4, 4, 1.0).unwrap();
    let p = problem(lattice.clone(), k, 6, TransectMode::Stochastic { slip: 0.3 });
    let a = plan_transect(&p, 5, &config(6)).unwrap();
    assert_eq!(a, plan_transect(&p, 5, &config(6)).unwrap());
    for w in a.steps.windows(2) {
        assert!(lattice.neighbors[w[0].waypoint].contains(&w[1].waypoint));
        assert!(lattice.neighbors[w[0].waypoint].contains(&w[1].intended));
    }
    let sum: f64 = a.steps.iter().map(|s| s.entropy).sum();
    assert!((sum - a.total_entropy).abs() < 1e-12);
    assert!((a.joint_entropy.unwrap() - a.total_entropy).abs() < 1e-9);
    let slipped = (0..20u64)
        .map(|seed| {
            let mut c = config(6);
            c.rng_seed = seed;
            plan_transect(&p, 5, &c).unwrap()
        })
        .any(|plan| plan.steps.iter().any(|s| s.intended != s.waypoint));
    assert!(slipped);
}

#[test]
fn lowest_id_tie_break_prefers_small_waypoints() {
    // every neighbour of the centre is equally informative by symmetry
    let k = se(1.0, 1.0, 0.0);
    let lattice = Lattice::new(
        vec![[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
        vec![vec![4, 3, 2, 1], vec![0], vec![0], vec![0], vec![0]],
    )
    .unwrap();
    let p = problem(lattice, k, 1, TransectMode::Deterministic);
    let mut c = config(1);
    assert_eq!(plan_transect(&p, 0, &c).unwrap().steps[1].waypoint, 4);
    c.tie_break = TieBreak::LowestControlId;
    assert_eq!(plan_transect(&p, 0, &c).unwrap().steps[1].waypoint, 1);
}

#[test]
fn invalid_problems_are_rejected() {
    let k = se(1.0, 1.0, 0.0);
    let lattice = Lattice::line(3, 1.0, 1).unwrap();
    let c = config(2);
    assert!(matches!(
        plan_transect(
            &problem(lattice.clone(), k, 2, TransectMode::Stochastic { slip: 1.5 }),
            0,
            &c
        ),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        plan_transect(&problem(lattice.clone(), k, 2, TransectMode::Deterministic), 9, &c),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        plan_transect(&problem(lattice.clone(), k, 0, TransectMode::Deterministic), 0, &c),
        Err(Error::Domain(_))
    ));
    // a line walked without revisits runs out of waypoints
    assert!(matches!(
        plan_transect(&problem(lattice, k, 3, TransectMode::Deterministic), 0, &config(3)),
        Err(Error::Model(_))
    ));
}
