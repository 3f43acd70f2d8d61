use crate::error::{Error, Result};

/// A cue or target vector of one learning event.
///
/// Stored either densely or as `(index, value)` pairs. Both forms validate
/// finiteness and range at construction, so kernels can trust them.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    dim: usize,
    repr: Repr,
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Dense(Vec<f64>),
    Sparse(Vec<(usize, f64)>),
}

impl Signal {
    pub fn dense(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput {
                what: "signal",
                index,
            });
        }
        Ok(Self {
            dim: values.len(),
            repr: Repr::Dense(values),
        })
    }

    /// Sparse signal from `(index, value)` pairs. Pairs are sorted by index;
    /// a repeated index is rejected rather than summed.
    pub fn sparse(dim: usize, mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.sort_by_key(|&(i, _)| i);
        for (n, &(index, value)) in pairs.iter().enumerate() {
            if index >= dim {
                return Err(Error::IndexOutOfRange {
                    what: "signal",
                    index,
                    dim,
                });
            }
            if !value.is_finite() {
                return Err(Error::NonFiniteInput {
                    what: "signal",
                    index,
                });
            }
            if n > 0 && pairs[n - 1].0 == index {
                return Err(Error::DuplicateIndex {
                    what: "signal",
                    index,
                });
            }
        }
        Ok(Self {
            dim,
            repr: Repr::Sparse(pairs),
        })
    }

    /// Present/absent coding: every listed index carries the value 1.
    pub fn indicator(dim: usize, active: &[usize]) -> Result<Self> {
        Self::sparse(dim, active.iter().map(|&i| (i, 1.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            repr: Repr::Sparse(Vec::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, index: usize) -> f64 {
        match &self.repr {
            Repr::Dense(v) => v.get(index).copied().unwrap_or(0.0),
            Repr::Sparse(pairs) => pairs
                .binary_search_by_key(&index, |&(i, _)| i)
                .map(|p| pairs[p].1)
                .unwrap_or(0.0),
        }
    }

    /// Nonzero entries in ascending index order.
    pub fn nonzero(&self) -> NonZero<'_> {
        match &self.repr {
            Repr::Dense(v) => NonZero::Dense(v.iter().enumerate()),
            Repr::Sparse(pairs) => NonZero::Sparse(pairs.iter()),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Dense(v) => v.clone(),
            Repr::Sparse(pairs) => {
                let mut out = vec![0.0; self.dim];
                for &(i, x) in pairs {
                    out[i] = x;
                }
                out
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.nonzero().next().is_none()
    }
}

/// Iterator over the nonzero entries of a [`Signal`].
pub enum NonZero<'a> {
    Dense(std::iter::Enumerate<std::slice::Iter<'a, f64>>),
    Sparse(std::slice::Iter<'a, (usize, f64)>),
}

impl Iterator for NonZero<'_> {
    type Item = (usize, f64);

    #[inline]
    fn next(&mut self) -> Option<(usize, f64)> {
        match self {
            NonZero::Dense(it) => it.find(|(_, &x)| x != 0.0).map(|(i, &x)| (i, x)),
            NonZero::Sparse(it) => it.find(|(_, x)| *x != 0.0).copied(),
        }
    }
}

/// One cue vector paired with one target vector.
#[derive(Clone, Debug, PartialEq)]
pub struct LearningEvent {
    pub cues: Signal,
    pub targets: Signal,
}

impl LearningEvent {
    pub fn new(cues: Signal, targets: Signal) -> Self {
        Self { cues, targets }
    }

    /// Convenience constructor for fully dense events.
    pub fn dense(cues: Vec<f64>, targets: Vec<f64>) -> Result<Self> {
        Ok(Self::new(Signal::dense(cues)?, Signal::dense(targets)?))
    }

    pub fn n_cues(&self) -> usize {
        self.cues.dim()
    }

    pub fn n_outcomes(&self) -> usize {
        self.targets.dim()
    }
}
