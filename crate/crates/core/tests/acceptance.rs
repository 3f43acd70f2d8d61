//! Acceptance gate. Each criterion prints one `PASS`/`FAIL` line with the
//! measured values; tolerances are pinned below.

mod common;

use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use widrow_hoff::embeddings::{
    cosine, diversity, select_context, spearman, EmbeddingSet, SelectionMode,
};
use widrow_hoff::events::{
    build_numeric_events, build_window_events, MissingOrder, NumericColumns, NumericTable,
    OutcomeColumns, VocabMap,
};
use widrow_hoff::experiments::{
    color_label, cone_cues, gen_pupil_table, run_color_experiment, run_convergence_experiment,
    run_pupil_pipeline, Color, ColorExperimentConfig, ConeSensitivityTable, ConvergenceConfig,
    LabelIntervals, PupilConfig, PupilSpec,
};
use widrow_hoff::rule::{
    train, update_event, LearningEvent, Precision, SchedulePolicy, Signal, TrainingConfig,
    WeightMatrix,
};
use widrow_hoff::sparse::{bench_run, train_sparse, Backend, SparseEventBatch};

// Pinned tolerances and limits.
const RULE_TOL: f64 = 1e-12;
const RULE_CASES: usize = 1000;
const RULE_SECONDS: f64 = 5.0;
const CLOSED_FORM_TOL: f64 = 1e-12;
const CLOSED_FORM_STEPS: i32 = 10_000;
const CLOSED_FORM_SECONDS: f64 = 1.0;
const WORKED_TOL: f64 = 5e-4;
const COLOR_SECONDS: f64 = 5.0;
const OLS_GAP: f64 = 0.05;
const SINGLE_MAX_WEIGHT: f64 = 0.5;
const OLS_MIN_INTERCEPT: f64 = 5.0;
const SORTED_MAX_BIAS: f64 = 1.0;
const STABILITY_TOL: f64 = 1e-3;
const ADJ_R2_RANGE: (f64, f64) = (0.85, 0.95);
const CONVERGENCE_SECONDS: f64 = 60.0;
const SPARSE_DENSE_TOL: f64 = 1e-10;
const SPARSE_DENSE_BATCHES: usize = 50;
const SPARSE_DENSE_SECONDS: f64 = 30.0;
const PERF_DIM: usize = 10_000;
const PERF_DENSITY: f64 = 0.01;
const PERF_EVENTS: usize = 20;
const EMBED_SECONDS: f64 = 10.0;
const TIED_SPEARMAN: f64 = 0.9486832980505138;

/// Criteria run one at a time so runtime limits are not skewed by each other.
static SERIAL: Mutex<()> = Mutex::new(());

fn report(n: u32, name: &str, pass: bool, detail: String, elapsed: Duration) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {n:>2} {verdict} {name}: {detail} [{:.2}s]",
        elapsed.as_secs_f64()
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

#[test]
fn criterion_01_rule_correctness() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst, mut noop_exact, mut local_exact) = (0.0f64, true, true);
    for _ in 0..RULE_CASES {
        let (j, k) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let w0: Vec<f64> = (0..j * k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let c: Vec<f64> = (0..j)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    0.0
                } else {
                    rng.gen_range(-1.5..1.5)
                }
            })
            .collect();
        let t: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let gamma = rng.gen_range(0.001..0.5);

        // Elementwise: y_m = Σ_i c_i w_im; w_im += c_i γ (t_m − y_m).
        let y: Vec<f64> = (0..k)
            .map(|m| (0..j).map(|i| c[i] * w0[i * k + m]).sum())
            .collect();
        let mut w = WeightMatrix::from_row_major(j, k, w0.clone()).unwrap();
        update_event(
            &mut w,
            &LearningEvent::dense(c.clone(), t.clone()).unwrap(),
            gamma,
        )
        .unwrap();
        for i in 0..j {
            for m in 0..k {
                let expect = w0[i * k + m] + c[i] * gamma * (t[m] - y[m]);
                worst = worst.max((w.get(i, m) - expect).abs());
                if c[i] == 0.0 && w.get(i, m).to_bits() != w0[i * k + m].to_bits() {
                    local_exact = false;
                }
            }
        }

        let mut z = WeightMatrix::from_row_major(j, k, w0.clone()).unwrap();
        let silent = LearningEvent::new(Signal::zeros(j), Signal::dense(t).unwrap());
        update_event(&mut z, &silent, gamma).unwrap();
        noop_exact &= z
            .to_row_major()
            .iter()
            .zip(&w0)
            .all(|(a, b)| a.to_bits() == b.to_bits());
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= RULE_TOL && noop_exact && local_exact && secs < RULE_SECONDS;
    report(
        1,
        "rule correctness",
        pass,
        format!(
            "{RULE_CASES} cases, max |matrix − elementwise| = {worst:.1e} (≤ {RULE_TOL:e}), \
             zero-cue no-op exact = {noop_exact}, untouched rows exact = {local_exact}"
        ),
        start.elapsed(),
    );
}

#[test]
fn criterion_02_closed_form() {
    let _g = serial();
    let start = Instant::now();
    let gamma = 0.1;
    let event = LearningEvent::dense(vec![1.0], vec![1.0]).unwrap();
    let mut w = WeightMatrix::zeros(1, 1, Precision::Double);
    let mut worst = 0.0f64;
    for t in 1..=CLOSED_FORM_STEPS {
        update_event(&mut w, &event, gamma).unwrap();
        worst = worst.max((w.get(0, 0) - (1.0 - 0.9f64.powi(t))).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        2,
        "closed form 1 − 0.9^t",
        worst <= CLOSED_FORM_TOL && secs < CLOSED_FORM_SECONDS,
        format!("t ≤ {CLOSED_FORM_STEPS}, max deviation {worst:.1e} (≤ {CLOSED_FORM_TOL:e})"),
        start.elapsed(),
    );
}

#[test]
fn criterion_03_worked_wavelengths() {
    let _g = serial();
    let start = Instant::now();
    let table = ConeSensitivityTable::standard();
    let labels = LabelIntervals::default();
    let mut worst = 0.0f64;
    for (lambda, printed) in [
        (493.74, [0.044, 0.092, 0.017]),
        (462.26, [0.150, 0.017, 0.006]),
    ] {
        for (c, p) in cone_cues(lambda, &table).iter().zip(printed) {
            worst = worst.max((c - p).abs());
        }
    }
    let blue = color_label(462.26, &labels) == [1.0, 0.0, 0.0];
    let none = color_label(493.74, &labels) == [0.0, 0.0, 0.0];
    report(
        3,
        "worked cone cues",
        worst <= WORKED_TOL && blue && none,
        format!(
            "max |cue − printed| = {worst:.1e} (≤ {WORKED_TOL:e}), 462.26 → blue: {blue}, \
             493.74 → none: {none}"
        ),
        start.elapsed(),
    );
}

#[test]
fn criterion_04_color_weight_profiles() {
    let _g = serial();
    let start = Instant::now();
    let run = run_color_experiment(&ColorExperimentConfig::default()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let p = run.sign_patterns();
    let w = |cone, name| run.weight(cone, name);
    use Color::*;
    report(
        4,
        "colour weight profiles",
        p.all() && secs < COLOR_SECONDS,
        format!(
            "100000 events γ=0.1: red {} (R {:.3}, G {:.3}, B {:.3}); blue {} (R {:.3}, G {:.3}, \
             B {:.3}); green {} (R {:.3}, G {:.3}, B {:.3})",
            p.red,
            w(Red, Red),
            w(Green, Red),
            w(Blue, Red),
            p.blue,
            w(Red, Blue),
            w(Green, Blue),
            w(Blue, Blue),
            p.green,
            w(Red, Green),
            w(Green, Green),
            w(Blue, Green),
        ),
        start.elapsed(),
    );
}

#[test]
fn criterion_05_least_squares_convergence() {
    let _g = serial();
    let start = Instant::now();
    let base = ConvergenceConfig::default();
    let table = run_convergence_experiment(&base).unwrap();
    let ols = &table.ols.coefficients;
    let gap = table.shuffled_gap();
    let single_max = table.single.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let sorted_bias = table.sorted[0].abs();
    let adj = table.ols.adj_r_squared;

    // Same sample and seed, ten times the shuffled epochs.
    let events = {
        use widrow_hoff::experiments::{bias_events, gen_gaussian_data};
        let data = gen_gaussian_data(&base.data).unwrap();
        let col = |n: &str| -> Vec<f64> {
            data.numeric_column(n)
                .unwrap()
                .into_iter()
                .map(Option::unwrap)
                .collect()
        };
        let (y, x1, x2, x3) = (col("y"), col("x1"), col("x2"), col("x3"));
        let xs: Vec<Vec<f64>> = (0..y.len()).map(|r| vec![x1[r], x2[r], x3[r]]).collect();
        bias_events(&y, &xs).unwrap()
    };
    let long = train(
        &events,
        &TrainingConfig::new(base.learning_rate)
            .with_ordering(SchedulePolicy::ShuffledEpochs { seed: base.seed })
            .with_epochs(base.repeats * 10),
    )
    .unwrap()
    .weights
    .column(0);
    let moved: Vec<f64> = long
        .iter()
        .zip(&table.shuffled)
        .map(|(a, b)| (a - b).abs())
        .collect();
    let max_moved = moved.iter().fold(0.0f64, |m, d| m.max(*d));
    let secs = start.elapsed().as_secs_f64();

    let checks = [
        gap <= OLS_GAP,
        single_max < SINGLE_MAX_WEIGHT && ols[0].abs() > OLS_MIN_INTERCEPT,
        sorted_bias < SORTED_MAX_BIAS,
        max_moved <= STABILITY_TOL,
        (ADJ_R2_RANGE.0..=ADJ_R2_RANGE.1).contains(&adj),
        secs < CONVERGENCE_SECONDS,
    ];
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    report(
        5,
        "least-squares convergence",
        checks.iter().all(|&c| c),
        format!(
            "OLS ({}) adj R² {adj:.4}; shuffled×10k ({}) max gap {gap:.2e} (≤ {OLS_GAP}); \
             single max |w| {single_max:.4} (< {SINGLE_MAX_WEIGHT}); sorted |bias| \
             {sorted_bias:.4} (< {SORTED_MAX_BIAS}); 10k→100k moves ({}) max {max_moved:.2e} \
             (≤ {STABILITY_TOL:e}); checks {checks:?}",
            fmt(ols),
            fmt(&table.shuffled),
            moved
                .iter()
                .map(|x| format!("{x:.1e}"))
                .collect::<Vec<_>>()
                .join(", "),
        ),
        start.elapsed(),
    );
}

#[test]
fn criterion_06_sparse_equals_dense() {
    let _g = serial();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for b in 0..SPARSE_DENSE_BATCHES {
        let (j, k) = (rng.gen_range(1..=200), rng.gen_range(1..=200));
        let n = rng.gen_range(1..=1000);
        let density = rng.gen_range(0.005..0.2);
        let batch = SparseEventBatch::random(n, j, k, density, b as u64);
        let config = TrainingConfig::new(0.01);
        let sparse = train_sparse(&batch, &config).unwrap().weights;
        let dense = train(&batch.to_learning_events(), &config).unwrap().weights;
        worst = worst.max(sparse.max_abs_diff(&dense));
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        6,
        "sparse ≡ dense",
        worst <= SPARSE_DENSE_TOL && secs < SPARSE_DENSE_SECONDS,
        format!("{SPARSE_DENSE_BATCHES} batches, max diff {worst:.1e} (≤ {SPARSE_DENSE_TOL:e})"),
        start.elapsed(),
    );
}

#[test]
fn criterion_07_sparse_faster_than_dense() {
    let _g = serial();
    let start = Instant::now();
    let batch = SparseEventBatch::random(PERF_EVENTS, PERF_DIM, PERF_DIM, PERF_DENSITY, 7);
    let sparse = bench_run(&batch, Backend::Sparse, 0.01, Precision::Double, 1).unwrap();
    let dense = bench_run(&batch, Backend::Dense, 0.01, Precision::Double, 1).unwrap();
    let diff = sparse.weights.max_abs_diff(&dense.weights);
    let (s, d) = (sparse.report.seconds, dense.report.seconds);
    report(
        7,
        "sparse faster than dense",
        s < d && diff <= SPARSE_DENSE_TOL,
        format!(
            "j=k={PERF_DIM}, density {PERF_DENSITY}, {PERF_EVENTS} events: sparse {s:.4}s, dense \
             {d:.4}s, dense/sparse {:.1}×, weight diff {diff:.1e}",
            d / s
        ),
        start.elapsed(),
    );
}

#[test]
fn criterion_08_embedding_mechanics() {
    let _g = serial();
    let start = Instant::now();
    let mut checks = Vec::new();

    let row = WeightMatrix::from_row_major(1, 3, vec![1.0, -2.0, 0.5]).unwrap();
    checks.push(("diversity", diversity(&row) == [3.5]));

    let w = WeightMatrix::from_row_major(3, 1, vec![5.0, 1.0, 3.0]).unwrap();
    let mut top = select_context(&w, 2, &SelectionMode::MostDiverse).unwrap();
    top.sort_unstable();
    checks.push(("top-d", top == [0, 2]));

    let big: Vec<f64> = (0..400).map(|i| ((i * 37) % 101) as f64).collect();
    let wb = WeightMatrix::from_row_major(200, 2, big).unwrap();
    let pick = |seed| select_context(&wb, 20, &SelectionMode::SampleDiverse { seed }).unwrap();
    checks.push((
        "stratified seeded",
        pick(1) == pick(1) && pick(1) != pick(2),
    ));

    let cos = cosine(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
    checks.push((
        "cosine",
        (cos - 32.0 / (14.0f64 * 77.0).sqrt()).abs() <= 1e-15,
    ));

    let rho = spearman(&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
    checks.push(("spearman ties", (rho - TIED_SPEARMAN).abs() <= 1e-12));

    // Words sharing every context should end up closer than words sharing none.
    let shared = ["the", "red", "ship", "sails"];
    let other = ["a", "green", "cart", "rolls"];
    let sentences: Vec<Vec<&str>> = (0..3000)
        .map(|n| match n % 3 {
            0 => vec![shared[0], shared[1], "alpha", shared[2], shared[3]],
            1 => vec![shared[0], shared[1], "beta", shared[2], shared[3]],
            _ => vec![other[0], other[1], "gamma", other[2], other[3]],
        })
        .collect();
    let mut vocab = VocabMap::new();
    let batch = build_window_events(&sentences, &mut vocab).unwrap();
    let trained = train_sparse(&batch, &TrainingConfig::new(0.001))
        .unwrap()
        .weights;
    let set = EmbeddingSet::from_weights(
        &trained,
        &vocab.outcomes.to_vec(),
        trained.n_cues(),
        SelectionMode::MostDiverse,
        None,
    )
    .unwrap();
    let sim = |a, b| cosine(set.vector(a).unwrap(), set.vector(b).unwrap()).unwrap();
    let (ab, ac) = (sim("alpha", "beta"), sim("alpha", "gamma"));
    checks.push(("toy distributional", ab > ac));

    let secs = start.elapsed().as_secs_f64();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    report(
        8,
        "embedding mechanics",
        failed.is_empty() && secs < EMBED_SECONDS,
        format!(
            "{} fixtures, failed {failed:?}; γ=0.001 cos(alpha, beta) {ab:.3} > cos(alpha, \
             gamma) {ac:.3}",
            checks.len()
        ),
        start.elapsed(),
    );
}

#[test]
fn criterion_09_pupil_pipeline() {
    let _g = serial();
    let start = Instant::now();
    let fixture = NumericTable::from_csv_reader("x,k\n2,a\nNA,b\n4,a\n".as_bytes()).unwrap();
    let spec = NumericColumns {
        cues: vec!["x".into()],
        outcomes: OutcomeColumns::Label("k".into()),
    };
    let built = build_numeric_events(&fixture, &spec, MissingOrder::ImputeThenScale).unwrap();
    let scaled: Vec<f64> = built.cue_matrix.iter().map(|r| r[0]).collect();
    let fixture_ok = scaled
        .iter()
        .zip([0.0, -1.0, 1.0])
        .all(|(a, b)| (a - b).abs() <= 1e-15);

    let table = gen_pupil_table(&PupilSpec::default()).unwrap();
    let export = || {
        let run = run_pupil_pipeline(&table, &PupilConfig::default()).unwrap();
        let mut out = Vec::new();
        run.export_features(&mut out).unwrap();
        (run.weights.n_cues(), run.weights.n_outcomes(), out)
    };
    let (cues, outcomes, a) = export();
    let (_, _, b) = export();
    let rows = widrow_hoff::events::read_feature_csv(a.as_slice())
        .unwrap()
        .rows
        .len();
    let pass = fixture_ok && a == b && (table.n_rows(), cues, outcomes, rows) == (141, 60, 9, 141);
    report(
        9,
        "pupil pipeline",
        pass,
        format!(
            "impute-then-scale (2, NA, 4) → {scaled:?}; {}×{cues} → {outcomes} outcomes, \
             γ=0.1, deterministic export: {}, {rows} feature rows",
            table.n_rows(),
            a == b
        ),
        start.elapsed(),
    );
}

#[test]
fn criterion_10_cli_reproducibility() {
    let _g = serial();
    let start = Instant::now();
    let f = common::Fixtures::new();
    let root = f.dir.path().join("runs");
    let results: Vec<(&str, Result<(), String>)> = common::subcommand_runs(&f)
        .into_iter()
        .map(|(tag, args)| {
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            (tag, common::rerun_matches(&root, tag, &args))
        })
        .collect();
    let failed: Vec<String> = results
        .iter()
        .filter_map(|(t, r)| r.as_ref().err().map(|e| format!("{t}: {e}")))
        .collect();
    report(
        10,
        "CLI reruns bit-identical",
        failed.is_empty(),
        format!(
            "{} subcommands rerun from manifest, failures {failed:?}",
            results.len()
        ),
        start.elapsed(),
    );
}
