use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pareto_shape_core::multicrit::{nondominated_mask, DesignPool, EvaluatedDesign, Provenance};
use pareto_shape_core::objectives::ObjectiveVector;

use pareto_shape_core::scalarization::{
    argmin_is_pareto, argmin_over_pool, epsilon_monotonicity, pattern_search, scalarize,
    stability_sweep, ScalarizationError, ScalarizationSpec, Scalarized, SearchConfig,
};
use pareto_shape_core::Vec2;

fn weighted(w: &[f64]) -> ScalarizationSpec {
    ScalarizationSpec::WeightedSum {
        weights: w.to_vec(),
    }
}

/// Two smooth competing objectives of a coefficient pair.
fn model_objectives(c: &[f64]) -> Vec<f64> {
    let (x, y) = (c[0], c[1]);
    vec![
        (x - 1.0).powi(2) + 0.5 * y * y + 1.0,
        (x + 1.0).powi(2) + (y - 0.5).powi(2) + 2.0,
    ]
}

fn pool_from_coefficients(coefficients: &[Vec<f64>]) -> DesignPool {
    let designs = coefficients
        .iter()
        .enumerate()
        .map(|(id, c)| EvaluatedDesign {
            id,
            coefficients: c.clone(),
            objectives: ObjectiveVector::from_values(model_objectives(c)).unwrap(),
            provenance: Provenance::default(),
        })
        .collect();
    DesignPool::new(designs).unwrap()
}

fn random_coefficients(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])
        .collect()
}

fn random_pool(rng: &mut ChaCha8Rng, n: usize) -> DesignPool {
    let vectors = (0..n)
        .map(|_| {
            if rng.gen_bool(0.3) {
                vec![
                    f64::from(rng.gen_range(0..5)),
                    f64::from(rng.gen_range(0..5)),
                ]
            } else {
                vec![rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0)]
            }
        })
        .collect();
    DesignPool::from_objectives(vectors).unwrap()
}

/// Brute-force argmin of a weighted sum, ids ascending.
fn oracle_argmin(spec: &ScalarizationSpec, pool: &DesignPool) -> Vec<usize> {
    let values: Vec<(usize, f64)> = pool
        .designs()
        .iter()
        .filter_map(|d| {
            scalarize(spec, d.objectives.values())
                .value()
                .map(|v| (d.id, v))
        })
        .collect();
    let best = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * best.abs() + 1e-12;
    values
        .iter()
        .filter(|v| v.1 <= best + tol)
        .map(|v| v.0)
        .collect()
}

/// Outline of a model design: a circle whose center and radius follow the
/// coefficients.
fn outline(d: &EvaluatedDesign) -> Result<Vec<Vec2>, ScalarizationError> {
    let (cx, r) = (d.coefficients[0], 1.0 + 0.1 * d.coefficients[1]);
    Ok((0..64)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 64.0;
            Vec2::new(cx + r * t.cos(), r * t.sin())
        })
        .collect())
}

#[test]
fn scalarization_examples() {
    assert_eq!(
        scalarize(&weighted(&[1.0, 0.0]), &[3.0, 7.0]),
        Scalarized::Feasible(3.0)
    );
    assert_eq!(
        scalarize(&weighted(&[0.5, 0.5]), &[2.0, 4.0]),
        Scalarized::Feasible(3.0)
    );
    let eps = ScalarizationSpec::EpsilonConstraint {
        objective: 0,
        eps: vec![0.0, 5.0],
    };
    assert_eq!(scalarize(&eps, &[2.0, 6.0]), Scalarized::Infeasible);
    assert_eq!(scalarize(&eps, &[2.0, 5.0]), Scalarized::Feasible(2.0));
}

#[test]
fn pool_mode_search_matches_the_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let coefficients = random_coefficients(&mut rng, 100);
    let pool = pool_from_coefficients(&coefficients);
    for w in [[1.0, 0.0], [0.0, 1.0], [0.3, 0.7]] {
        let spec = weighted(&w);
        let config = SearchConfig {
            candidates: Some(coefficients.clone()),
            ..SearchConfig::default()
        };
        let mut calls = 0;
        let outcome = pattern_search(&spec, &config, |batch| {
            calls += batch.len();
            batch
                .iter()
                .map(|c| {
                    ObjectiveVector::from_values(model_objectives(c)).map_err(|e| e.to_string())
                })
                .collect()
        })
        .unwrap();
        assert_eq!(calls, 100);
        let found: Vec<Vec<f64>> = outcome
            .argmin_coefficients()
            .iter()
            .map(|c| c.to_vec())
            .collect();
        let expected: Vec<Vec<f64>> = oracle_argmin(&spec, &pool)
            .iter()
            .map(|&id| coefficients[id].clone())
            .collect();
        assert_eq!(found, expected);
        assert_eq!(
            argmin_over_pool(&spec, &pool).unwrap().members,
            oracle_argmin(&spec, &pool)
        );
    }
    // single-objective recovery is the plain pool minimum
    let j1_min = pool
        .designs()
        .iter()
        .min_by(|a, b| a.objectives.values()[0].total_cmp(&b.objectives.values()[0]))
        .unwrap()
        .id;
    assert_eq!(
        argmin_over_pool(&weighted(&[1.0, 0.0]), &pool)
            .unwrap()
            .members,
        vec![j1_min]
    );
}

#[test]
fn continuous_search_reaches_the_weighted_minimizer() {
    // minimizer of 0.5 J_1 + 0.5 J_2 is x = 0, y = 1/3
    let spec = weighted(&[0.5, 0.5]);
    let config = SearchConfig {
        lower: vec![-2.0, -2.0],
        upper: vec![2.0, 2.0],
        min_step: 1.0 / 256.0,
        ..SearchConfig::default()
    };
    let outcome = pattern_search(&spec, &config, |batch| {
        batch
            .iter()
            .map(|c| ObjectiveVector::from_values(model_objectives(c)).map_err(|e| e.to_string()))
            .collect()
    })
    .unwrap();
    let best = outcome.argmin_coefficients()[0];
    assert!(
        best[0].abs() <= 4.0 / 256.0 * 2.0 && (best[1] - 1.0 / 3.0).abs() <= 4.0 / 256.0 * 2.0,
        "{best:?}"
    );
    assert!(outcome.points.len() <= config.max_evaluations);
}

#[test]
fn vacuous_epsilon_gives_the_unconstrained_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let pool = random_pool(&mut rng, 60);
        for j in 0..2 {
            let eps = ScalarizationSpec::EpsilonConstraint {
                objective: j,
                eps: vec![10.0, 10.0],
            };
            let mut w = [0.0, 0.0];
            w[j] = 1.0;
            assert_eq!(
                argmin_over_pool(&eps, &pool).unwrap(),
                argmin_over_pool(&weighted(&w), &pool).unwrap()
            );
        }
    }
}

#[test]
fn empty_feasible_set_is_reported() {
    let pool = DesignPool::from_objectives(vec![vec![1.0, 1.0], vec![2.0, 0.5]]).unwrap();
    let spec = ScalarizationSpec::EpsilonConstraint {
        objective: 0,
        eps: vec![0.0, 0.1],
    };
    assert!(matches!(
        argmin_over_pool(&spec, &pool),
        Err(ScalarizationError::InfeasibleProblem(_))
    ));
}

#[test]
fn positive_weights_select_nondominated_designs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..150);
        let pool = random_pool(&mut rng, n);
        let spec = weighted(&[rng.gen_range(0.01..1.0), rng.gen_range(0.01..1.0)]);
        assert!(argmin_is_pareto(&spec, &pool).unwrap());
        let mask = nondominated_mask(&pool);
        for id in argmin_over_pool(&spec, &pool).unwrap().members {
            assert!(mask[id]);
        }
    }
    let pool = random_pool(&mut rng, 10);
    assert!(argmin_is_pareto(&weighted(&[1.0, 0.0]), &pool).is_err());
}

#[test]
fn epsilon_chains_are_monotone_and_nested() {
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = random_pool(&mut rng, 80);
        let mut eps = vec![5.0, 5.0];
        let mut chain = Vec::new();
        for _ in 0..10 {
            chain.push(eps.clone());
            for e in &mut eps {
                *e -= rng.gen_range(0.0..0.6);
            }
        }
        for j in 0..2 {
            let report = epsilon_monotonicity(j, &chain, &pool).unwrap();
            assert!(report.holds(), "seed {seed}: {report:?}");
            assert_eq!(report.values.len(), 10);
        }
    }
    let pool = DesignPool::from_objectives(vec![vec![1.0, 1.0]]).unwrap();
    assert!(epsilon_monotonicity(0, &[vec![0.0, 1.0], vec![0.0, 2.0]], &pool).is_err());
}

#[test]
fn epsilon_tightening_raises_the_optimum() {
    let pool =
        DesignPool::from_objectives(vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]]).unwrap();
    let chain = [vec![0.0, 10.0], vec![0.0, 2.0], vec![0.0, 0.5]];
    let report = epsilon_monotonicity(0, &chain, &pool).unwrap();
    assert_eq!(report.values, vec![Some(1.0), Some(2.0), None]);
    assert!(report.holds());
}

#[test]
fn constant_sweep_has_zero_deviation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pool = pool_from_coefficients(&random_coefficients(&mut rng, 50));
    let limit = weighted(&[0.4, 0.6]);
    let rows = stability_sweep(&vec![limit.clone(); 5], &limit, &pool, outline).unwrap();
    assert!(rows
        .iter()
        .all(|r| r.deviation == Some(0.0) && r.coefficient_deviation == Some(0.0)));
}

#[test]
fn sweep_reaches_zero_on_a_well_separated_pool() {
    // unique minimizer of the equal-weight sum: design 1
    let coefficients = vec![
        vec![1.0, 0.0],
        vec![0.0, 0.4],
        vec![-1.0, 0.5],
        vec![0.5, 1.5],
    ];
    let pool = pool_from_coefficients(&coefficients);
    let limit = weighted(&[0.5, 0.5]);
    assert_eq!(argmin_over_pool(&limit, &pool).unwrap().members, vec![1]);
    let sequence: Vec<_> = (1..=40)
        .map(|n| weighted(&[0.5 + 0.5 / n as f64, 0.5 - 0.5 / n as f64]))
        .collect();
    let rows = stability_sweep(&sequence, &limit, &pool, outline).unwrap();
    assert!(rows[0].deviation.unwrap() > 0.0);
    assert!(rows[10..].iter().all(|r| r.deviation == Some(0.0)));
}

#[test]
fn weighted_path_deviations_are_eventually_nonincreasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let pool = pool_from_coefficients(&random_coefficients(&mut rng, 200));
    let limit = weighted(&[1.0, 0.0]);
    let sequence: Vec<_> = (1..=200)
        .map(|n| weighted(&[1.0 - 1.0 / n as f64, 1.0 / n as f64]))
        .collect();
    let rows = stability_sweep(&sequence, &limit, &pool, outline).unwrap();
    let deviations: Vec<f64> = rows.iter().map(|r| r.deviation.unwrap()).collect();
    assert!(deviations.iter().all(|&d| d >= 0.0));
    let tail = &deviations[100..];
    assert!(tail.windows(2).all(|w| w[1] <= w[0]), "{tail:?}");
    assert_eq!(*deviations.last().unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn positive_scaling_keeps_the_argmin(
        seed in any::<u64>(),
        w in (0.01..1.0f64, 0.0..1.0f64),
        s in 1e-3..1e3f64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = random_pool(&mut rng, 40);
        let a = argmin_over_pool(&weighted(&[w.0, w.1]), &pool).unwrap();
        let b = argmin_over_pool(&weighted(&[s * w.0, s * w.1]), &pool).unwrap();
        prop_assert_eq!(a.members, b.members);
    }

    #[test]
    fn sweep_deviation_vanishes_on_subsets(seed in any::<u64>(), w in (0.0..1.0f64, 0.0..1.0f64)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pool = random_pool(&mut rng, 30);
        let outline_of = |d: &EvaluatedDesign| -> Result<Vec<Vec2>, ScalarizationError> {
            let v = d.objectives.values();
            Ok(vec![Vec2::new(v[0], v[1]), Vec2::new(v[0] + 1.0, v[1])])
        };
        let spec = weighted(&[w.0, w.1]);
        let limit = weighted(&[1.0, 1.0]);
        let rows = stability_sweep(std::slice::from_ref(&spec), &limit, &pool, outline_of).unwrap();
        let dev = rows[0].deviation.unwrap();
        prop_assert!(dev >= 0.0);
        let own = argmin_over_pool(&spec, &pool).unwrap().members;
        let reference = argmin_over_pool(&limit, &pool).unwrap().members;
        if own.iter().all(|id| reference.contains(id)) {
            prop_assert_eq!(dev, 0.0);
        }
    }
}
