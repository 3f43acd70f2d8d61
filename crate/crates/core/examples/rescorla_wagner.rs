//! The update rule on its own: a single cue always followed by one outcome
//! approaches 1 as `1 − (1 − γ)^t`, and a blocked cue learns little once
//! another cue already predicts the outcome.

use widrow_hoff::rule::{
    predict, train, update_event, LearningEvent, TrainingConfig, WeightMatrix,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gamma = 0.1;
    let event = LearningEvent::dense(vec![1.0], vec![1.0])?;
    let mut w = WeightMatrix::from_row_major(1, 1, vec![0.0])?;
    println!("{:>4} {:>10} {:>10}", "t", "weight", "1-0.9^t");
    for t in 1..=20 {
        update_event(&mut w, &event, gamma)?;
        if t % 5 == 0 {
            println!(
                "{t:>4} {:>10.6} {:>10.6}",
                w.get(0, 0),
                1.0 - 0.9f64.powi(t)
            );
        }
    }

    // Blocking: cue A alone predicts the outcome first, then A and B
    // together. B gains almost nothing because the error is already small.
    let a_only = LearningEvent::dense(vec![1.0, 0.0], vec![1.0])?;
    let a_and_b = LearningEvent::dense(vec![1.0, 1.0], vec![1.0])?;
    let mut events = vec![a_only; 100];
    events.extend(vec![a_and_b; 100]);
    let trained = train(&events, &TrainingConfig::new(gamma))?;
    println!(
        "blocking: w(A) = {:.4}, w(B) = {:.4}",
        trained.weights.get(0, 0),
        trained.weights.get(1, 0)
    );
    let probe = LearningEvent::dense(vec![0.0, 1.0], vec![0.0])?;
    println!(
        "activation for B alone: {:.4}",
        predict(&probe, &trained.weights)?[0]
    );
    Ok(())
}
