use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinary least-squares fit with an intercept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    /// Intercept first, then one slope per predictor.
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_statistic: f64,
    pub df_model: usize,
    pub df_residual: usize,
    pub residuals: Vec<f64>,
}

/// Prepends the intercept column of ones to each predictor row.
pub fn design_with_intercept(predictors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    predictors
        .iter()
        .map(|row| std::iter::once(1.0).chain(row.iter().copied()).collect())
        .collect()
}

/// Least squares by Householder QR. `design` is row-major with the
/// intercept column of ones first.
pub fn ols_fit(design: &[Vec<f64>], y: &[f64]) -> Result<RegressionFit> {
    let n = design.len();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            what: "response",
            expected: n,
            found: y.len(),
        });
    }
    let p = design.first().map_or(0, Vec::len);
    if p == 0 || design.iter().any(|r| r.len() != p) {
        return Err(Error::InvalidConfig(
            "design rows must share a nonzero width".into(),
        ));
    }
    if n <= p {
        return Err(Error::InvalidConfig(format!(
            "need more rows than columns ({n} ≤ {p})"
        )));
    }
    if design.iter().any(|r| r[0] != 1.0) {
        return Err(Error::InvalidConfig(
            "first design column must be the intercept".into(),
        ));
    }
    for c in 1..p {
        if design.iter().zip(y).all(|(r, &v)| r[c] == v) {
            return Err(Error::ResponseInDesign { column: c });
        }
    }

    // Column-major working copy; Householder reflections applied to the
    // columns and to y.
    let mut a: Vec<Vec<f64>> = (0..p)
        .map(|c| design.iter().map(|r| r[c]).collect())
        .collect();
    let mut qty = y.to_vec();
    let scale = a
        .iter()
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    for k in 0..p {
        let norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 * scale {
            return Err(Error::RankDeficient { column: k });
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= f * vi;
            }
        };
        for col in a.iter_mut().skip(k) {
            reflect(&mut col[k..]);
        }
        reflect(&mut qty[k..]);
    }

    // Back substitution on the p×p upper triangle.
    let mut beta = vec![0.0; p];
    for row in (0..p).rev() {
        let s: f64 = (row + 1..p).map(|c| a[c][row] * beta[c]).sum();
        beta[row] = (qty[row] - s) / a[row][row];
    }

    let residuals: Vec<f64> = design
        .iter()
        .zip(y)
        .map(|(r, &v)| v - r.iter().zip(&beta).map(|(x, b)| x * b).sum::<f64>())
        .collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let df_model = p - 1;
    let df_residual = n - p;
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) as f64 / df_residual as f64;
    let f_statistic = if df_model == 0 {
        f64::NAN
    } else {
        ((tss - rss) / df_model as f64) / (rss / df_residual as f64)
    };
    Ok(RegressionFit {
        coefficients: beta,
        r_squared,
        adj_r_squared,
        f_statistic,
        df_model,
        df_residual,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_linear_data_recovered() {
        let xs: Vec<Vec<f64>> = (0..20)
            .map(|i| {
                let t = i as f64;
                vec![t, (t * 0.7).sin(), t * t / 10.0]
            })
            .collect();
        let y: Vec<f64> = xs
            .iter()
            .map(|x| -3.0 + 2.0 * x[0] - 0.5 * x[1] + 0.25 * x[2])
            .collect();
        let fit = ols_fit(&design_with_intercept(&xs), &y).unwrap();
        for (b, want) in fit.coefficients.iter().zip([-3.0, 2.0, -0.5, 0.25]) {
            assert!((b - want).abs() < 1e-10, "{:?}", fit.coefficients);
        }
    }

    #[test]
    fn simple_regression_by_hand() {
        // y = (1, 3, 2, 5) on x = (0, 1, 2, 3): slope 1.1, intercept 1.1.
        let x = design_with_intercept(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]);
        let fit = ols_fit(&x, &[1.0, 3.0, 2.0, 5.0]).unwrap();
        assert!((fit.coefficients[0] - 1.1).abs() < 1e-12);
        assert!((fit.coefficients[1] - 1.1).abs() < 1e-12);
        // TSS = 8.75, RSS = 2.7
        assert!((fit.r_squared - (1.0 - 2.7 / 8.75)).abs() < 1e-12);
        assert_eq!((fit.df_model, fit.df_residual), (1, 2));
        let f = (8.75 - 2.7) / (2.7 / 2.0);
        assert!((fit.f_statistic - f).abs() < 1e-9);
    }

    #[test]
    fn degenerate_designs() {
        let xs: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| (i * i) as f64).collect();
        assert!(matches!(
            ols_fit(&design_with_intercept(&xs), &y),
            Err(Error::RankDeficient { column: 2 })
        ));

        let xs: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![(i as f64).sqrt(), (i * i) as f64])
            .collect();
        assert!(matches!(
            ols_fit(&design_with_intercept(&xs), &y),
            Err(Error::ResponseInDesign { column: 2 })
        ));
        assert!(ols_fit(&design_with_intercept(&[vec![1.0], vec![2.0]]), &[1.0, 2.0]).is_err());
    }
}
