use crate::error::{Error, Result};

use super::event::LearningEvent;
use super::matrix::{accumulate_activation, rank_one_update, Real, Storage, WeightMatrix};

/// Net input per outcome: `y[m] = Σ_i x_i · W[i, m]`.
pub fn predict(event: &LearningEvent, weights: &WeightMatrix) -> Result<Vec<f64>> {
    weights.check_cues(event.n_cues())?;
    let k = weights.n_outcomes();
    Ok(match &weights.storage {
        Storage::Double(data) => {
            let mut out = vec![0.0; k];
            accumulate_activation(data, k, event.cues.nonzero(), &mut out);
            out
        }
        Storage::Single(data) => {
            let mut out = vec![0.0f32; k];
            accumulate_activation(
                data,
                k,
                event.cues.nonzero().map(|(i, x)| (i, x as f32)),
                &mut out,
            );
            out.into_iter().map(f64::from).collect()
        }
    })
}

/// Applies one error-correction step in place:
/// `W ← W + γ · c ⊗ (t − Wᵀc)`, with the prediction taken from the weights
/// before the update and all outcomes corrected together.
///
/// On error the matrix may have been partially updated.
pub fn update_event(weights: &mut WeightMatrix, event: &LearningEvent, gamma: f64) -> Result<()> {
    let mut scratch = Scratch::default();
    update_event_with(weights, event, gamma, &mut scratch)
}

/// Reusable buffers for the per-event activation and error vectors.
#[derive(Default)]
pub(crate) struct Scratch {
    double: Vec<f64>,
    single: Vec<f32>,
}

pub(crate) fn update_event_with(
    weights: &mut WeightMatrix,
    event: &LearningEvent,
    gamma: f64,
    scratch: &mut Scratch,
) -> Result<()> {
    if !gamma.is_finite() {
        return Err(Error::InvalidLearningRate(gamma));
    }
    weights.check_cues(event.n_cues())?;
    weights.check_outcomes(event.n_outcomes())?;
    if event.cues.is_zero() {
        return Ok(());
    }
    let k = weights.n_outcomes();
    match &mut weights.storage {
        Storage::Double(data) => step(data, k, event, gamma, &mut scratch.double, |x| x),
        Storage::Single(data) => step(data, k, event, gamma as f32, &mut scratch.single, |x| {
            x as f32
        }),
    }
}

fn step<T: Real>(
    data: &mut [T],
    k: usize,
    event: &LearningEvent,
    gamma: T,
    buf: &mut Vec<T>,
    cast: impl Fn(f64) -> T + Copy,
) -> Result<()> {
    buf.resize(k, T::ZERO);
    accumulate_activation(
        data,
        k,
        event.cues.nonzero().map(|(i, x)| (i, cast(x))),
        buf,
    );
    // Turn the activation into the error vector t − y in place; t + (−y)
    // rounds identically to t − y.
    for e in buf.iter_mut() {
        *e = T::ZERO - *e;
    }
    for (m, t) in event.targets.nonzero() {
        buf[m] = cast(t) + buf[m];
    }
    rank_one_update(
        data,
        k,
        event.cues.nonzero().map(|(i, x)| (i, cast(x))),
        buf,
        gamma,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::event::Signal;
    use crate::rule::matrix::Precision;

    #[test]
    fn zero_weights_predict_zero() {
        let w = WeightMatrix::zeros(3, 3, Precision::Double);
        let e = LearningEvent::dense(vec![0.044, 0.092, 0.017], vec![0.0; 3]).unwrap();
        assert_eq!(predict(&e, &w).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn indicator_prediction_sums_rows() {
        let w =
            WeightMatrix::from_row_major(4, 2, vec![1.0, 2.0, 10.0, 20.0, 3.0, 4.0, 100.0, 200.0])
                .unwrap();
        let e = LearningEvent::new(Signal::indicator(4, &[1, 3]).unwrap(), Signal::zeros(2));
        assert_eq!(predict(&e, &w).unwrap(), vec![110.0, 220.0]);
    }

    #[test]
    fn dimension_mismatch_names_both_dims() {
        let w = WeightMatrix::zeros(3, 2, Precision::Double);
        let e = LearningEvent::dense(vec![1.0; 4], vec![0.0; 2]).unwrap();
        let err = predict(&e, &w).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 3,
                found: 4,
                ..
            }
        ));
        assert!(err.to_string().contains('3') && err.to_string().contains('4'));
    }

    #[test]
    fn indicator_update_from_zero() {
        let mut w = WeightMatrix::zeros(4, 3, Precision::Double);
        let e = LearningEvent::new(
            Signal::indicator(4, &[0, 2]).unwrap(),
            Signal::indicator(3, &[1]).unwrap(),
        );
        update_event(&mut w, &e, 0.1).unwrap();
        for i in 0..4 {
            for m in 0..3 {
                let expected = if (i == 0 || i == 2) && m == 1 {
                    0.1
                } else {
                    0.0
                };
                assert_eq!(w.get(i, m), expected, "({i},{m})");
            }
        }
    }

    #[test]
    fn turquoise_event_from_zero_is_no_change() {
        let mut w = WeightMatrix::zeros(3, 3, Precision::Double);
        let e = LearningEvent::dense(vec![0.044, 0.092, 0.017], vec![0.0; 3]).unwrap();
        update_event(&mut w, &e, 0.1).unwrap();
        assert!(w.to_row_major().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_error_is_exact_no_op() {
        let mut w = WeightMatrix::from_row_major(2, 1, vec![0.25, 0.5]).unwrap();
        let e = LearningEvent::dense(vec![1.0, 1.0], vec![0.75]).unwrap();
        let before = w.clone();
        update_event(&mut w, &e, 0.3).unwrap();
        assert_eq!(w, before);
    }

    #[test]
    fn overflow_reports_position() {
        let mut w = WeightMatrix::zeros(2, 2, Precision::Double);
        let e = LearningEvent::dense(vec![0.0, 1e200], vec![0.0, 1e200]).unwrap();
        let err = update_event(&mut w, &e, 1e10).unwrap_err();
        assert!(matches!(err, Error::NonFiniteWeight { cue: 1, outcome: 1 }));
    }

    #[test]
    fn single_precision_step() {
        let mut w = WeightMatrix::zeros(1, 1, Precision::Single);
        let e = LearningEvent::dense(vec![1.0], vec![1.0]).unwrap();
        update_event(&mut w, &e, 0.1).unwrap();
        assert_eq!(w.get(0, 0), 0.1f32 as f64);
    }
}
