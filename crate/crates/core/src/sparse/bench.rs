use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rule::{Precision, Real, Storage, WeightMatrix};

use super::{sparse_step, DensityReport, SparseEventBatch, SparseScratch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Full matrix form: `Wᵀc` over every row and a full outer-product
    /// update, zeros included.
    Dense,
    /// Active rows only.
    Sparse,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Dense => "dense",
            Backend::Sparse => "sparse",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Backend::Dense),
            "sparse" => Ok(Backend::Sparse),
            other => Err(Error::InvalidConfig(format!("unknown backend {other:?}"))),
        }
    }
}

/// Machine-readable record of one benchmark run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub backend: Backend,
    pub j: usize,
    pub k: usize,
    pub n_events: usize,
    pub density: f64,
    pub seconds: f64,
    pub events_per_second: f64,
    pub threads: usize,
    pub precision: Precision,
}

#[derive(Clone, Debug)]
pub struct BenchRun {
    pub report: BenchReport,
    pub density: DensityReport,
    pub weights: WeightMatrix,
}

/// Trains a fresh matrix on `batch` (as given, one pass) with the chosen
/// backend and times the event loop. `threads` caps the data parallelism
/// inside one event; events themselves are always processed in order.
pub fn bench_run(
    batch: &SparseEventBatch,
    backend: Backend,
    gamma: f64,
    precision: Precision,
    threads: usize,
) -> Result<BenchRun> {
    if batch.is_empty() {
        return Err(Error::InvalidConfig("benchmark batch is empty".into()));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::InvalidLearningRate(gamma));
    }
    let threads = threads.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    let mut weights = WeightMatrix::zeros(batch.n_cues(), batch.n_outcomes(), precision);
    // Touch every page up front so allocation cost stays out of the timing.
    weights.fill_zero();
    std::hint::black_box(&weights);

    let start = Instant::now();
    match backend {
        Backend::Sparse => {
            let mut scratch = SparseScratch::default();
            for event in batch.events() {
                sparse_step(
                    &mut weights,
                    &event.cues,
                    &event.outcomes,
                    gamma,
                    &mut scratch,
                )?;
            }
        }
        Backend::Dense => {
            let (j, k) = (batch.n_cues(), batch.n_outcomes());
            let parallel = threads > 1;
            pool.install(|| match &mut weights.storage {
                Storage::Double(data) => dense_loop(data, j, k, batch, gamma, parallel),
                Storage::Single(data) => dense_loop(data, j, k, batch, gamma as f32, parallel),
            })?;
        }
    }
    let seconds = start.elapsed().as_secs_f64();

    let density = batch.density();
    Ok(BenchRun {
        report: BenchReport {
            backend,
            j: batch.n_cues(),
            k: batch.n_outcomes(),
            n_events: batch.len(),
            density: density.cue_density,
            seconds,
            events_per_second: batch.len() as f64 / seconds.max(f64::MIN_POSITIVE),
            threads,
            precision,
        },
        density,
        weights,
    })
}

const COLUMN_BLOCK: usize = 256;

fn dense_loop<T: Real>(
    data: &mut [T],
    j: usize,
    k: usize,
    batch: &SparseEventBatch,
    gamma: T,
    parallel: bool,
) -> Result<()> {
    let one = T::from_f64(1.0);
    let mut cues = vec![T::ZERO; j];
    let mut targets = vec![T::ZERO; k];
    let mut err = vec![T::ZERO; k];
    for event in batch.events() {
        cues.fill(T::ZERO);
        targets.fill(T::ZERO);
        for &i in &event.cues {
            cues[i] = one;
        }
        for &m in &event.outcomes {
            targets[m] = one;
        }

        // y = Wᵀc over all rows; each column block sums rows in order so the
        // result does not depend on the thread count.
        let activation = |b: usize, block: &mut [T]| {
            block.fill(T::ZERO);
            let lo = b * COLUMN_BLOCK;
            for (i, &x) in cues.iter().enumerate() {
                let row = &data[i * k + lo..i * k + lo + block.len()];
                for (y, &w) in block.iter_mut().zip(row) {
                    *y += x * w;
                }
            }
        };
        if parallel {
            err.par_chunks_mut(COLUMN_BLOCK)
                .enumerate()
                .for_each(|(b, block)| activation(b, block));
        } else {
            err.chunks_mut(COLUMN_BLOCK)
                .enumerate()
                .for_each(|(b, block)| activation(b, block));
        }
        for (e, &t) in err.iter_mut().zip(&targets) {
            *e = t - *e;
        }

        // W += γ c eᵀ over all rows.
        let update = |(row, &x): (&mut [T], &T)| -> bool {
            let scale = x * gamma;
            let mut ok = true;
            for (w, &e) in row.iter_mut().zip(&err) {
                *w += scale * e;
                ok &= w.finite();
            }
            ok
        };
        let ok = if parallel {
            data.par_chunks_mut(k)
                .zip(cues.par_iter())
                .map(update)
                .reduce(|| true, |a, b| a && b)
        } else {
            data.chunks_mut(k)
                .zip(cues.iter())
                .map(update)
                .fold(true, std::ops::BitAnd::bitand)
        };
        if !ok {
            let at = data.iter().position(|w| !w.finite()).unwrap_or(0);
            return Err(Error::NonFiniteWeight {
                cue: at / k,
                outcome: at % k,
            });
        }
    }
    Ok(())
}
