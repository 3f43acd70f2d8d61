use std::collections::HashSet;
use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::output::{Manifest, Staged};
use super::{
    flatten, BenchArgs, BenchBackends, Cli, CliError, ColorArgs, Command, ConvergeArgs, EmbedArgs,
    EventFormat, Imputation, KernelBackend, Ordering, PupilArgs, Script, Selection, TrainArgs,
};
use crate::embeddings::{
    diversity, evaluate_similarity, read_embeddings, read_similarity_pairs, write_embeddings,
    EmbeddingSet, OovPolicy, SelectionMode,
};
use crate::error::Error;
use crate::events::{
    build_numeric_events, build_window_events, parse_indicator_events, Alphabet, CorpusFilter,
    MissingOrder, NumericColumns, NumericTable, OutcomeColumns, VocabMap,
};
use crate::experiments::{
    gen_gaussian_data, gen_pupil_table, run_color_experiment, run_convergence_experiment,
    run_pupil_pipeline, Color, ColorBand, ColorExperimentConfig, ConeSensitivityTable,
    ConvergenceConfig, GaussianSpec, LabelIntervals, PupilConfig, PupilSpec,
};
use crate::rule::io::{write_snapshot, write_trace_tsv, write_weights_tsv};
use crate::rule::{
    max_stable_learning_rate, train, SchedulePolicy, TracePlan, Trained, TrainingConfig,
    WeightMatrix,
};
use crate::sparse::{bench_run, train_sparse, Backend, SparseEventBatch};

/// What a subcommand produced: files to write, summary numbers for the
/// manifest, and its arguments with every default resolved.
struct Product {
    staged: Staged,
    stats: serde_json::Value,
    args: indexmap::IndexMap<String, String>,
}

pub(super) fn execute(cli: &Cli) -> Result<Manifest, CliError> {
    let start = Instant::now();
    let product = match &cli.command {
        Command::Train(a) => train_cmd(a)?,
        Command::SimulateColor(a) => color_cmd(a)?,
        Command::Converge(a) => converge_cmd(a)?,
        Command::Embed(a) => embed_cmd(a)?,
        Command::Bench(a) => bench_cmd(a, cli.threads)?,
        Command::Pupil(a) => pupil_cmd(a)?,
        Command::Rerun(_) => unreachable!("handled by the caller"),
    };
    let manifest = Manifest {
        tool: "wh".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cli.command.name().into(),
        args: product.args,
        threads: cli.threads,
        out_dir: cli.out_dir.clone(),
        outputs: product.staged.names(),
        stats: product.stats,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    product.staged.commit(&cli.out_dir, &manifest)?;
    Ok(manifest)
}

fn bytes<F>(write: F) -> Result<Vec<u8>, CliError>
where
    F: FnOnce(&mut Vec<u8>) -> crate::Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("serializable");
    v.push(b'\n');
    v
}

fn list(s: &Option<String>) -> Vec<String> {
    s.iter()
        .flat_map(|s| s.split(','))
        .map(|t| t.trim().to_owned())
        .filter(|t| !t.is_empty())
        .collect()
}

fn missing_order(m: Imputation) -> MissingOrder {
    match m {
        Imputation::ImputeThenScale => MissingOrder::ImputeThenScale,
        Imputation::ScaleThenImpute => MissingOrder::ScaleThenImpute,
    }
}

fn weight_files(
    staged: &mut Staged,
    weights: &WeightMatrix,
    cues: &[String],
    outcomes: &[String],
) -> Result<(), CliError> {
    staged.add(
        "weights.tsv",
        bytes(|b| write_weights_tsv(weights, cues, outcomes, b))?,
    );
    staged.add("weights.bin", bytes(|b| write_snapshot(weights, b))?);
    Ok(())
}

fn train_cmd(a: &TrainArgs) -> Result<Product, CliError> {
    let mut a = a.clone();
    let ordering = a.ordering.unwrap_or(if a.shuffle_seed.is_some() {
        Ordering::Shuffled
    } else {
        Ordering::AsGiven
    });
    a.ordering = Some(ordering);
    let seed = *a.shuffle_seed.get_or_insert(1);
    let policy = match ordering {
        Ordering::AsGiven => SchedulePolicy::AsGiven,
        Ordering::Shuffled => SchedulePolicy::ShuffledEpochs { seed },
        Ordering::Sorted => SchedulePolicy::SortedByOutcomePerTrialRepeat { repeats: a.repeats },
    };
    let mut config = TrainingConfig::new(a.gamma)
        .with_ordering(policy)
        .with_epochs(a.epochs)
        .with_precision(a.precision);

    let watch = list(&a.watch);
    let resolve_watch = |cues: &[String], outcomes: &[String]| {
        watch
            .iter()
            .map(|w| {
                let (c, o) = w.rsplit_once(':').ok_or_else(|| {
                    CliError::Usage(format!("--watch entry {w:?} is not cue:outcome"))
                })?;
                let find = |labels: &[String], t: &str, what: &str| {
                    labels.iter().position(|l| l == t).ok_or_else(|| {
                        CliError::Usage(format!("--watch names unknown {what} {t:?}"))
                    })
                };
                Ok((find(cues, c, "cue")?, find(outcomes, o, "outcome")?))
            })
            .collect::<Result<Vec<_>, CliError>>()
    };

    let (trained, cues, outcomes, n_events, warnings): (Trained, _, _, _, Vec<String>) = match a
        .format
    {
        EventFormat::Indicator => {
            let (batch, vocab) = parse_indicator_events(&a.events)?;
            let (cues, outcomes) = (vocab.cues.to_vec(), vocab.outcomes.to_vec());
            if !watch.is_empty() {
                config = config.with_trace(TracePlan {
                    watched: resolve_watch(&cues, &outcomes)?,
                    stride: a.trace_stride,
                });
            }
            let trained = match a.backend {
                KernelBackend::Sparse => train_sparse(&batch, &config)?,
                KernelBackend::Dense => {
                    if batch.is_empty() {
                        return Err(Error::InvalidConfig("event file has no events".into()).into());
                    }
                    let mut w =
                        WeightMatrix::zeros(batch.n_cues(), batch.n_outcomes(), a.precision);
                    let trace =
                        crate::rule::train_into(&mut w, &batch.to_learning_events(), &config)?;
                    Trained { weights: w, trace }
                }
            };
            (trained, cues, outcomes, batch.len(), Vec::new())
        }
        EventFormat::Numeric => {
            let table = NumericTable::from_csv_path(&a.events)?;
            let outcome_spec =
                match (&a.label_column, list(&a.outcome_columns)) {
                    (Some(label), o) if o.is_empty() => OutcomeColumns::Label(label.clone()),
                    (None, o) if !o.is_empty() && a.numeric_outcomes => OutcomeColumns::Numeric(o),
                    (None, o) if !o.is_empty() => OutcomeColumns::Indicators(o),
                    _ => return Err(CliError::Usage(
                        "numeric events need exactly one of --label-column or --outcome-columns"
                            .into(),
                    )),
                };
            let outcome_cols: Vec<String> = match &outcome_spec {
                OutcomeColumns::Label(l) => vec![l.clone()],
                OutcomeColumns::Indicators(o) | OutcomeColumns::Numeric(o) => o.clone(),
            };
            let mut cue_cols = list(&a.cue_columns);
            if cue_cols.is_empty() {
                cue_cols = table
                    .columns()
                    .iter()
                    .filter(|c| !outcome_cols.contains(c))
                    .cloned()
                    .collect();
            }
            let columns = NumericColumns {
                cues: cue_cols,
                outcomes: outcome_spec,
            };
            let ev = build_numeric_events(&table, &columns, missing_order(a.missing_order))?;
            if !watch.is_empty() {
                config = config.with_trace(TracePlan {
                    watched: resolve_watch(&ev.cue_names, &ev.outcome_names)?,
                    stride: a.trace_stride,
                });
            }
            let trained = train(&ev.events, &config)?;
            (
                trained,
                ev.cue_names,
                ev.outcome_names,
                ev.events.len(),
                ev.warnings,
            )
        }
    };

    let mut staged = Staged::default();
    weight_files(&mut staged, &trained.weights, &cues, &outcomes)?;
    if let Some(trace) = &trained.trace {
        staged.add(
            "trace.tsv",
            bytes(|b| write_trace_tsv(trace, &cues, &outcomes, b))?,
        );
    }
    let stats = json!({
        "events": n_events,
        "cues": cues.len(),
        "outcomes": outcomes.len(),
        "warnings": warnings,
    });
    Ok(Product {
        staged,
        stats,
        args: flatten(&a),
    })
}

fn color_cmd(a: &ColorArgs) -> Result<Product, CliError> {
    let band = |color, b: super::Band| ColorBand {
        color,
        lo: b.lo,
        hi: b.hi,
        closed_hi: color == Color::Red,
    };
    let intervals = LabelIntervals {
        bands: vec![
            band(Color::Blue, a.blue),
            band(Color::Green, a.green),
            band(Color::Red, a.red),
        ],
    };
    intervals.validate()?;
    let config = ColorExperimentConfig {
        n: a.n,
        learning_rate: a.gamma,
        seed: a.seed,
        table: ConeSensitivityTable::standard(),
        intervals,
        trace_stride: a.trace_stride,
    };
    let run = run_color_experiment(&config)?;
    let names: Vec<String> = Color::ALL.iter().map(|c| c.to_string()).collect();
    let patterns = run.sign_patterns();
    let mut weights = serde_json::Map::new();
    for cone in Color::ALL {
        let row: serde_json::Map<String, serde_json::Value> = Color::ALL
            .iter()
            .map(|&name| (name.to_string(), json!(run.weight(cone, name))))
            .collect();
        weights.insert(format!("{cone}_cone"), row.into());
    }
    let summary = json!({
        "sign_patterns": patterns,
        "all_patterns_hold": patterns.all(),
        "weights": weights,
    });

    let mut staged = Staged::default();
    staged.add("trajectory.tsv", bytes(|b| run.write_trajectory_tsv(b))?);
    staged.add(
        "weights.tsv",
        bytes(|b| write_weights_tsv(&run.weights, &names, &names, b))?,
    );
    staged.add("summary.json", json_bytes(&summary));
    Ok(Product {
        staged,
        stats: summary,
        args: flatten(a),
    })
}

fn converge_cmd(a: &ConvergeArgs) -> Result<Product, CliError> {
    let config = ConvergenceConfig {
        data: GaussianSpec {
            n: a.n,
            seed: a.data_seed,
            ..GaussianSpec::default()
        },
        learning_rate: a.gamma,
        repeats: a.repeats,
        seed: a.seed,
    };
    let table = run_convergence_experiment(&config)?;
    let sample = gen_gaussian_data(&config.data)?;
    let fit = &table.ols;
    let ols = json!({
        "coefficients": fit.coefficients,
        "r_squared": fit.r_squared,
        "adj_r_squared": fit.adj_r_squared,
        "f_statistic": fit.f_statistic,
        "df_model": fit.df_model,
        "df_residual": fit.df_residual,
    });
    let mut staged = Staged::default();
    staged.add("table.tsv", bytes(|b| table.write_tsv(b))?);
    staged.add("ols.json", json_bytes(&ols));
    staged.add("sample.csv", bytes(|b| sample.write_csv(b))?);
    let stats = json!({
        "adj_r_squared": fit.adj_r_squared,
        "max_abs_shuffled_minus_ols": table.shuffled_gap(),
    });
    Ok(Product {
        staged,
        stats,
        args: flatten(a),
    })
}

fn embed_cmd(a: &EmbedArgs) -> Result<Product, CliError> {
    let (batch, vocab): (SparseEventBatch, VocabMap) = match (&a.corpus, &a.events) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let filter = CorpusFilter {
                alphabet: a.alphabet.map(|s| match s {
                    Script::Latin => Alphabet::Latin,
                    Script::Cyrillic => Alphabet::Cyrillic,
                }),
                ..CorpusFilter::default()
            };
            let sentences = filter.clean_text(&text);
            let mut vocab = VocabMap::new();
            let batch = build_window_events(&sentences, &mut vocab)?;
            (batch, vocab)
        }
        (None, Some(path)) => parse_indicator_events(path)?,
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --corpus or --events".into(),
            ))
        }
    };
    let mode = match a.selection {
        Selection::MostDiverse => SelectionMode::MostDiverse,
        Selection::SampleDiverse => SelectionMode::SampleDiverse { seed: a.seed },
        Selection::Uniform => SelectionMode::Uniform { seed: a.seed },
    };
    let pairs = a
        .gold
        .as_ref()
        .map(|p| {
            let f = File::open(p).map_err(|e| Error::io(p, e))?;
            read_similarity_pairs(BufReader::new(f), &p.display().to_string())
        })
        .transpose()?;
    let other = a
        .intersect
        .as_ref()
        .map(|p| {
            let f = File::open(p).map_err(|e| Error::io(p, e))?;
            read_embeddings(BufReader::new(f), &p.display().to_string())
        })
        .transpose()?;

    let config = TrainingConfig::new(a.gamma).with_epochs(a.epochs);
    let weights = train_sparse(&batch, &config)?.weights;
    let words = vocab.outcomes.to_vec();
    let set = EmbeddingSet::from_weights(&weights, &words, a.dim, mode, a.max_words)?;

    let div = diversity(&weights);
    let mut contexts = String::from("dimension\tcue\tdiversity\n");
    for (d, &row) in set.selection().iter().enumerate() {
        let cue = vocab.cues.token(row).unwrap_or("?");
        contexts.push_str(&format!(
            "{d}\t{cue}\t{}\n",
            crate::format_sig(div[row], 17)
        ));
    }

    let mut staged = Staged::default();
    staged.add("embeddings.txt", bytes(|b| write_embeddings(&set, b))?);
    staged.add("contexts.tsv", contexts.into_bytes());
    let mut stats = json!({
        "events": batch.len(),
        "cues": vocab.cues.len(),
        "words": set.len(),
        "dim": set.dim(),
    });
    if let Some(pairs) = pairs {
        let policy = match &other {
            Some(o) => {
                OovPolicy::IntersectionWith(o.words().iter().cloned().collect::<HashSet<_>>())
            }
            None => OovPolicy::SkipOov,
        };
        let report = evaluate_similarity(&pairs, &set, &policy)?;
        staged.add("similarity.json", json_bytes(&report));
        stats["similarity"] = json!(report);
    }
    Ok(Product {
        staged,
        stats,
        args: flatten(a),
    })
}

fn bench_cmd(a: &BenchArgs, threads: usize) -> Result<Product, CliError> {
    if !(0.0..=1.0).contains(&a.density) {
        return Err(CliError::Usage(format!(
            "--density {} is outside [0, 1]",
            a.density
        )));
    }
    let batch = SparseEventBatch::random(a.events, a.j, a.k, a.density, a.seed);
    let backends: &[Backend] = match a.backend {
        BenchBackends::Dense => &[Backend::Dense],
        BenchBackends::Sparse => &[Backend::Sparse],
        BenchBackends::Both => &[Backend::Sparse, Backend::Dense],
    };
    let mut reports = Vec::new();
    let mut finals: Vec<WeightMatrix> = Vec::new();
    for &backend in backends {
        let run = bench_run(&batch, backend, a.gamma, a.precision, threads)?;
        log::info!(
            "{backend}: {} events in {:.3} s",
            run.report.n_events,
            run.report.seconds
        );
        reports.push(run.report);
        finals.push(run.weights);
    }
    let mut summary = json!({
        "reports": reports,
        "density": batch.density(),
        "weight_sums": finals.iter().map(|w| w.to_row_major().iter().sum::<f64>()).collect::<Vec<_>>(),
    });
    if let [sparse, dense] = &reports[..] {
        summary["dense_over_sparse_seconds"] =
            json!(dense.seconds / sparse.seconds.max(f64::MIN_POSITIVE));
        summary["sparse_faster"] = json!(sparse.seconds < dense.seconds);
        summary["max_abs_diff"] = json!(finals[0].max_abs_diff(&finals[1]));
    }
    let mut staged = Staged::default();
    staged.add("bench.json", json_bytes(&summary));
    Ok(Product {
        staged,
        stats: summary,
        args: flatten(a),
    })
}

fn pupil_cmd(a: &PupilArgs) -> Result<Product, CliError> {
    let mut staged = Staged::default();
    let table = match &a.input {
        Some(path) => NumericTable::from_csv_path(path)?,
        None => {
            let t = gen_pupil_table(&PupilSpec {
                trials: a.trials,
                samples: a.samples,
                conditions: a.conditions,
                missing_rate: a.missing_rate,
                seed: a.data_seed,
            })?;
            staged.add("table.csv", bytes(|b| t.write_csv(b))?);
            t
        }
    };
    let run = run_pupil_pipeline(
        &table,
        &PupilConfig {
            learning_rate: a.gamma,
            order: missing_order(a.missing_order),
            seed: a.seed,
        },
    )?;
    staged.add("features.csv", bytes(|b| run.export_features(b))?);
    staged.add(
        "weights.tsv",
        bytes(|b| {
            write_weights_tsv(
                &run.weights,
                &run.events.cue_names,
                &run.events.outcome_names,
                b,
            )
        })?,
    );
    let stats = json!({
        "trials": table.n_rows(),
        "cues": run.events.cue_names.len(),
        "outcomes": run.events.outcome_names,
        "warnings": run.events.warnings,
        "max_stable_gamma": max_stable_learning_rate(&run.events.events),
    });
    Ok(Product {
        staged,
        stats,
        args: flatten(a),
    })
}
