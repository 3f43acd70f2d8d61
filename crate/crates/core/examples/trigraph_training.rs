//! Letter-trigraph cues to word outcomes: builds events from a few
//! utterances, saves and reloads them in the indicator file format, trains,
//! and shows which word each trigraph supports most.

use widrow_hoff::events::{
    read_indicator_events, trigraph_events, write_indicator_events, VocabMap,
};
use widrow_hoff::rule::{SchedulePolicy, TrainingConfig};
use widrow_hoff::sparse::train_sparse;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = "the cat sat\nthe hat\na cat and a hat\nthat cat sat on the mat\nthe rat sat";
    let utterances: Vec<Vec<&str>> = text.lines().map(|l| l.split(' ').collect()).collect();

    let mut vocab = VocabMap::new();
    let batch = trigraph_events(&utterances, &mut vocab)?;
    let mut file = Vec::new();
    write_indicator_events(&batch, &vocab, &mut file)?;
    println!("{}", String::from_utf8_lossy(&file));

    let mut reloaded_vocab = VocabMap::new();
    let reloaded = read_indicator_events(file.as_slice(), "memory", &mut reloaded_vocab)?;
    println!(
        "{} events, {} trigraph cues, {} word outcomes",
        reloaded.len(),
        reloaded_vocab.cues.len(),
        reloaded_vocab.outcomes.len()
    );

    let config = TrainingConfig::new(0.01)
        .with_epochs(200)
        .with_ordering(SchedulePolicy::ShuffledEpochs { seed: 1 });
    let w = train_sparse(&reloaded, &config)?.weights;
    for cue in ["#ca", "#ha", "#ma", "#ra", "at#"] {
        let Some(i) = reloaded_vocab.cues.index_of(cue) else {
            continue;
        };
        let row = w.row(i);
        let (best, weight) = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("at least one outcome");
        let word = reloaded_vocab.outcomes.token(best).unwrap_or("?");
        println!("{cue:>4} -> {word:<5} {weight:.3}");
    }
    Ok(())
}
