//! Indicator kernels against the general dense rule.

use proptest::prelude::*;
use widrow_hoff::rule::{
    predict, train, LearningEvent, Precision, Signal, TrainingConfig, WeightMatrix,
};
use widrow_hoff::sparse::{
    bench_run, convert_precision, predict_sparse, train_sparse, update_sparse, Backend,
    SparseEventBatch,
};

fn batch_strategy() -> impl Strategy<Value = SparseEventBatch> {
    (
        1usize..=200,
        1usize..=200,
        1usize..=1000,
        0.005f64..0.2,
        any::<u64>(),
    )
        .prop_map(|(j, k, n, density, seed)| SparseEventBatch::random(n, j, k, density, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn sparse_training_matches_dense(batch in batch_strategy()) {
        let config = TrainingConfig::new(0.01);
        let sparse = train_sparse(&batch, &config).unwrap().weights;
        let dense = train(&batch.to_learning_events(), &config).unwrap().weights;
        prop_assert!(sparse.max_abs_diff(&dense) <= 1e-10);
    }

    #[test]
    fn benchmark_backends_agree(batch in batch_strategy()) {
        let a = bench_run(&batch, Backend::Sparse, 0.01, Precision::Double, 1).unwrap();
        let b = bench_run(&batch, Backend::Dense, 0.01, Precision::Double, 1).unwrap();
        prop_assert!(a.weights.max_abs_diff(&b.weights) <= 1e-10);
    }
}

proptest! {
    #[test]
    fn update_touches_exactly_the_active_rows(
        seed in any::<u64>(),
        active in prop::collection::btree_set(0usize..40, 0..8),
        outcomes in prop::collection::btree_set(0usize..30, 0..5),
    ) {
        let warm = SparseEventBatch::random(50, 40, 30, 0.1, seed);
        let mut w = train_sparse(&warm, &TrainingConfig::new(0.1)).unwrap().weights;
        let before: Vec<Vec<f64>> = (0..40).map(|i| w.row(i)).collect();
        let cues: Vec<usize> = active.iter().copied().collect();
        let outs: Vec<usize> = outcomes.iter().copied().collect();
        let y = predict_sparse(&cues, &w).unwrap();
        update_sparse(&mut w, &cues, &outs, 0.1).unwrap();
        let changed: Vec<usize> = (0..40).filter(|&i| w.row(i) != before[i]).collect();
        // An active row stays equal only when its error vector is zero.
        let error_is_zero = (0..30).all(|m| f64::from(u8::from(outs.contains(&m))) == y[m]);
        if error_is_zero {
            prop_assert!(changed.is_empty());
        } else {
            prop_assert_eq!(changed, cues);
        }
    }
}

#[test]
fn predict_sparse_matches_dense_predict() {
    let batch = SparseEventBatch::random(200, 50, 50, 0.1, 5);
    let w = train_sparse(&batch, &TrainingConfig::new(0.05))
        .unwrap()
        .weights;
    let probe = SparseEventBatch::random(20, 50, 50, 0.2, 6);
    for e in probe.events() {
        let dense = LearningEvent::new(Signal::indicator(50, &e.cues).unwrap(), Signal::zeros(50));
        let a = predict_sparse(&e.cues, &w).unwrap();
        let b = predict(&dense, &w).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
    assert!(predict_sparse(&[50], &w).is_err());
}

#[test]
fn one_step_from_zero() {
    let mut w = WeightMatrix::zeros(3, 2, Precision::Double);
    update_sparse(&mut w, &[1], &[0], 0.01).unwrap();
    assert_eq!(w.to_row_major(), vec![0.0, 0.0, 0.01, 0.0, 0.0, 0.0]);
}

#[test]
fn single_precision_stays_close_to_double() {
    let batch = SparseEventBatch::random(10_000, 100, 100, 0.05, 17);
    let double = train_sparse(&batch, &TrainingConfig::new(0.01))
        .unwrap()
        .weights;
    let single = train_sparse(
        &batch,
        &TrainingConfig::new(0.01).with_precision(Precision::Single),
    )
    .unwrap()
    .weights;
    assert_eq!(single.precision(), Precision::Single);
    let divergence = single.max_abs_diff(&double);
    println!("single vs double divergence: {divergence:e}");
    assert!(divergence < 1e-3);
    assert!(divergence > 0.0);
}

#[test]
fn precision_conversion() {
    let w = WeightMatrix::from_row_major(1, 2, vec![0.1, -3.0]).unwrap();
    let same = convert_precision(&w, Precision::Double).unwrap();
    assert_eq!(same.to_row_major(), w.to_row_major());
    let single = convert_precision(&w, Precision::Single).unwrap();
    assert_eq!(single.get(0, 0), f64::from(0.1f32));
    assert_ne!(single.get(0, 0), 0.1);
    let huge = WeightMatrix::from_row_major(1, 1, vec![1e300]).unwrap();
    assert!(convert_precision(&huge, Precision::Single).is_err());
}

#[test]
fn throughput_does_not_grow_with_density() {
    let (j, k, n) = (2000, 2000, 200);
    let rate = |density: f64| {
        let batch = SparseEventBatch::random(n, j, k, density, 3);
        (0..3)
            .map(|_| {
                bench_run(&batch, Backend::Sparse, 0.01, Precision::Double, 1)
                    .unwrap()
                    .report
                    .events_per_second
            })
            .fold(0.0, f64::max)
    };
    let rates: Vec<f64> = [0.001, 0.01, 0.1].into_iter().map(rate).collect();
    println!("events/s at densities 0.001, 0.01, 0.1: {rates:?}");
    for w in rates.windows(2) {
        assert!(w[1] <= w[0] * 1.1, "{rates:?}");
    }
}

#[test]
fn full_density_dense_not_much_slower() {
    let mut batch = SparseEventBatch::new(300, 300);
    let all: Vec<usize> = (0..300).collect();
    for _ in 0..100 {
        batch.push(all.clone(), all.clone()).unwrap();
    }
    let time = |backend| {
        (0..3)
            .map(|_| {
                bench_run(&batch, backend, 0.001, Precision::Double, 1)
                    .unwrap()
                    .report
                    .seconds
            })
            .fold(f64::INFINITY, f64::min)
    };
    let (dense, sparse) = (time(Backend::Dense), time(Backend::Sparse));
    println!("full density: dense {dense:.4}s, sparse {sparse:.4}s");
    assert!(dense <= 2.0 * sparse);
}
