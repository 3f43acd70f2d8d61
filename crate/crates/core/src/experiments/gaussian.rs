use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{NumericTable, Value};

/// Population of a multivariate normal sample: one criterion followed by
/// its predictors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub names: Vec<String>,
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    /// Full symmetric correlation matrix with a unit diagonal.
    pub correlation: Vec<Vec<f64>>,
    pub n: usize,
    pub seed: u64,
}

impl Default for GaussianSpec {
    /// Criterion `y` and predictors `x1..x3` with strong criterion
    /// correlations and weak predictor intercorrelations; 1000 rows.
    fn default() -> Self {
        let r = |a: f64, b: f64, c: f64, d: f64, e: f64, f: f64| {
            vec![
                vec![1.0, a, b, c],
                vec![a, 1.0, d, e],
                vec![b, d, 1.0, f],
                vec![c, e, f, 1.0],
            ]
        };
        Self {
            names: ["y", "x1", "x2", "x3"].map(String::from).to_vec(),
            means: vec![0.0, 5.0, 10.0, -2.0],
            sds: vec![1.75, 1.5, 1.25, 1.0],
            correlation: r(0.66, 0.62, 0.58, 0.15, 0.10, 0.12),
            n: 1000,
            seed: 1,
        }
    }
}

impl GaussianSpec {
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    fn check_shape(&self) -> Result<()> {
        let p = self.dim();
        let bad = |what: &'static str, found: usize| Error::DimensionMismatch {
            what,
            expected: p,
            found,
        };
        if self.names.len() != p {
            return Err(bad("variable names", self.names.len()));
        }
        if self.sds.len() != p {
            return Err(bad("standard deviations", self.sds.len()));
        }
        if self.correlation.len() != p {
            return Err(bad("correlation rows", self.correlation.len()));
        }
        for row in &self.correlation {
            if row.len() != p {
                return Err(bad("correlation columns", row.len()));
            }
        }
        for a in 0..p {
            if self.correlation[a][a] != 1.0 {
                return Err(Error::InvalidConfig(
                    "correlation diagonal must be 1".into(),
                ));
            }
            for b in 0..a {
                if self.correlation[a][b] != self.correlation[b][a] {
                    return Err(Error::InvalidConfig(
                        "correlation matrix must be symmetric".into(),
                    ));
                }
            }
        }
        if self.sds.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidConfig(
                "standard deviations must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `Σ = D R D` with `D = diag(sds)`.
    pub fn covariance(&self) -> Result<Vec<Vec<f64>>> {
        self.check_shape()?;
        let p = self.dim();
        Ok((0..p)
            .map(|a| {
                (0..p)
                    .map(|b| self.sds[a] * self.correlation[a][b] * self.sds[b])
                    .collect()
            })
            .collect())
    }

    /// Lower Cholesky factor of the covariance. Fails, naming the pivot, if
    /// the covariance is not positive definite.
    pub fn cholesky(&self) -> Result<Vec<Vec<f64>>> {
        cholesky(&self.covariance()?)
    }
}

pub fn cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let p = a.len();
    let mut l = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let pivot = a[i][i] - dot;
                if pivot.is_nan() || pivot <= 0.0 {
                    return Err(Error::NotPositiveDefinite {
                        pivot: i,
                        value: pivot,
                    });
                }
                l[i][i] = pivot.sqrt();
            } else {
                l[i][j] = (a[i][j] - dot) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Draws `spec.n` rows as `mean + L z` with `z` standard normal.
pub fn gen_gaussian_data(spec: &GaussianSpec) -> Result<NumericTable> {
    let l = spec.cholesky()?;
    let p = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut z = vec![0.0; p];
    let mut rows = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        for v in z.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let row = (0..p)
            .map(|a| {
                let x = spec.means[a] + (0..=a).map(|b| l[a][b] * z[b]).sum::<f64>();
                Value::Num(x)
            })
            .collect();
        rows.push(row);
    }
    NumericTable::new(spec.names.clone(), rows)
}
