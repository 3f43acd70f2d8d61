use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floating-point width used for weight storage and accumulation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    Single,
    #[default]
    Double,
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Precision::Single => "single",
            Precision::Double => "double",
        })
    }
}

impl FromStr for Precision {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" | "f32" => Ok(Precision::Single),
            "double" | "f64" => Ok(Precision::Double),
            other => Err(Error::InvalidConfig(format!("unknown precision {other:?}"))),
        }
    }
}

/// Scalar type a weight matrix can be stored in.
pub(crate) trait Real:
    Copy
    + PartialEq
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::AddAssign
    + Send
    + Sync
    + 'static
{
    const ZERO: Self;
    fn from_f64(v: f64) -> Self;
    fn finite(self) -> bool;
}

impl Real for f64 {
    const ZERO: Self = 0.0;
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Real for f32 {
    const ZERO: Self = 0.0;
    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn finite(self) -> bool {
        self.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Storage {
    Double(Vec<f64>),
    Single(Vec<f32>),
}

/// Dense cue × outcome weight matrix, row-major with one row per cue.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightMatrix {
    cues: usize,
    outcomes: usize,
    pub(crate) storage: Storage,
}

impl WeightMatrix {
    pub fn zeros(cues: usize, outcomes: usize, precision: Precision) -> Self {
        let len = cues * outcomes;
        let storage = match precision {
            Precision::Double => Storage::Double(vec![0.0; len]),
            Precision::Single => Storage::Single(vec![0.0; len]),
        };
        Self {
            cues,
            outcomes,
            storage,
        }
    }

    /// Double-precision matrix from row-major values.
    pub fn from_row_major(cues: usize, outcomes: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != cues * outcomes {
            return Err(Error::DimensionMismatch {
                what: "weight values",
                expected: cues * outcomes,
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteWeight {
                cue: index / outcomes.max(1),
                outcome: index % outcomes.max(1),
            });
        }
        Ok(Self {
            cues,
            outcomes,
            storage: Storage::Double(values),
        })
    }

    pub fn n_cues(&self) -> usize {
        self.cues
    }

    pub fn n_outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn precision(&self) -> Precision {
        match self.storage {
            Storage::Double(_) => Precision::Double,
            Storage::Single(_) => Precision::Single,
        }
    }

    pub fn get(&self, cue: usize, outcome: usize) -> f64 {
        assert!(
            cue < self.cues && outcome < self.outcomes,
            "weight index out of range"
        );
        let at = cue * self.outcomes + outcome;
        match &self.storage {
            Storage::Double(v) => v[at],
            Storage::Single(v) => v[at] as f64,
        }
    }

    pub fn set(&mut self, cue: usize, outcome: usize, value: f64) {
        assert!(
            cue < self.cues && outcome < self.outcomes,
            "weight index out of range"
        );
        let at = cue * self.outcomes + outcome;
        match &mut self.storage {
            Storage::Double(v) => v[at] = value,
            Storage::Single(v) => v[at] = value as f32,
        }
    }

    pub fn row(&self, cue: usize) -> Vec<f64> {
        let range = cue * self.outcomes..(cue + 1) * self.outcomes;
        match &self.storage {
            Storage::Double(v) => v[range].to_vec(),
            Storage::Single(v) => v[range].iter().map(|&x| x as f64).collect(),
        }
    }

    pub fn column(&self, outcome: usize) -> Vec<f64> {
        (0..self.cues).map(|i| self.get(i, outcome)).collect()
    }

    /// All values widened to f64, row-major.
    pub fn to_row_major(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Double(v) => v.clone(),
            Storage::Single(v) => v.iter().map(|&x| x as f64).collect(),
        }
    }

    pub fn fill_zero(&mut self) {
        match &mut self.storage {
            Storage::Double(v) => v.fill(0.0),
            Storage::Single(v) => v.fill(0.0),
        }
    }

    /// Largest absolute elementwise difference, computed in f64.
    pub fn max_abs_diff(&self, other: &WeightMatrix) -> f64 {
        assert_eq!(
            (self.cues, self.outcomes),
            (other.cues, other.outcomes),
            "matrices differ in shape"
        );
        self.to_row_major()
            .iter()
            .zip(other.to_row_major())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub(crate) fn check_cues(&self, dim: usize) -> Result<()> {
        if dim != self.cues {
            return Err(Error::DimensionMismatch {
                what: "cue vector",
                expected: self.cues,
                found: dim,
            });
        }
        Ok(())
    }

    pub(crate) fn check_outcomes(&self, dim: usize) -> Result<()> {
        if dim != self.outcomes {
            return Err(Error::DimensionMismatch {
                what: "target vector",
                expected: self.outcomes,
                found: dim,
            });
        }
        Ok(())
    }
}

/// `out[m] = Σ x_i · W[i, m]` over the supplied nonzero cues.
#[inline]
pub(crate) fn accumulate_activation<T: Real>(
    data: &[T],
    outcomes: usize,
    cues: impl Iterator<Item = (usize, T)>,
    out: &mut [T],
) {
    out.fill(T::ZERO);
    for (i, x) in cues {
        let row = &data[i * outcomes..(i + 1) * outcomes];
        for (o, &w) in out.iter_mut().zip(row) {
            *o += x * w;
        }
    }
}

/// `W[i, :] += (x_i · γ) · err` for each supplied cue row. Stops at the first
/// row that produced a non-finite weight.
#[inline]
pub(crate) fn rank_one_update<T: Real>(
    data: &mut [T],
    outcomes: usize,
    cues: impl Iterator<Item = (usize, T)>,
    err: &[T],
    gamma: T,
) -> Result<()> {
    for (i, x) in cues {
        let scale = x * gamma;
        let row = &mut data[i * outcomes..(i + 1) * outcomes];
        let mut ok = true;
        for (w, &e) in row.iter_mut().zip(err) {
            *w += scale * e;
            ok &= w.finite();
        }
        if !ok {
            let outcome = row.iter().position(|w| !w.finite()).unwrap_or(0);
            return Err(Error::NonFiniteWeight { cue: i, outcome });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_matrix_is_zero() {
        for p in [Precision::Single, Precision::Double] {
            let w = WeightMatrix::zeros(3, 4, p);
            assert!(w.to_row_major().iter().all(|&v| v == 0.0));
            assert_eq!(w.precision(), p);
        }
    }

    #[test]
    fn rows_and_columns() {
        let w = WeightMatrix::from_row_major(2, 3, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(w.row(1), vec![4.0, 5.0, 6.0]);
        assert_eq!(w.column(2), vec![3.0, 6.0]);
        assert!(WeightMatrix::from_row_major(2, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn precision_parses() {
        assert_eq!("single".parse::<Precision>().unwrap(), Precision::Single);
        assert_eq!("double".parse::<Precision>().unwrap(), Precision::Double);
        assert!("half".parse::<Precision>().is_err());
    }
}
