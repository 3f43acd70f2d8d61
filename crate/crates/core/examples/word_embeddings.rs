//! Word vectors from a context-window model: cleans a small corpus, trains
//! context words to predict each target word, keeps the most diverse
//! context rows as dimensions, and scores the vectors against a handful of
//! similarity judgements.

use widrow_hoff::embeddings::{
    cosine, evaluate_similarity, write_embeddings, EmbeddingSet, OovPolicy, SelectionMode,
    SimilarityPair,
};
use widrow_hoff::events::{build_window_events, CorpusFilter, VocabMap};
use widrow_hoff::rule::{SchedulePolicy, TrainingConfig};
use widrow_hoff::sparse::train_sparse;

const CORPUS: &str = "
The cat chased the mouse. The dog chased the cat. A small cat slept on the mat.
A big dog slept on the rug. The mouse ate the cheese. The rat ate the bread.
The dog barked at the mailman. The cat hissed at the dog. A rat ran from the cat.
The mouse ran from the cat. The big dog ate the bread. A small mouse ate the cheese.
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sentences = CorpusFilter::default().clean_text(&CORPUS.repeat(50));
    let mut vocab = VocabMap::new();
    let batch = build_window_events(&sentences, &mut vocab)?;
    let config = TrainingConfig::new(0.001)
        .with_epochs(20)
        .with_ordering(SchedulePolicy::ShuffledEpochs { seed: 1 });
    let w = train_sparse(&batch, &config)?.weights;
    println!(
        "{} window events, {} context words",
        batch.len(),
        w.n_cues()
    );

    let words = vocab.outcomes.to_vec();
    let set = EmbeddingSet::from_weights(&w, &words, 8, SelectionMode::MostDiverse, None)?;
    let context: Vec<&str> = set
        .selection()
        .iter()
        .filter_map(|&i| vocab.cues.token(i))
        .collect();
    println!("dimensions: {context:?}");
    for (a, b) in [("cat", "dog"), ("mouse", "rat"), ("cat", "cheese")] {
        println!(
            "cos({a}, {b}) = {:.3}",
            cosine(set.vector(a)?, set.vector(b)?)?
        );
    }

    let pair = |a: &str, b: &str, score| SimilarityPair {
        word1: a.into(),
        word2: b.into(),
        score,
    };
    let gold = [
        pair("cat", "dog", 7.0),
        pair("mouse", "rat", 8.5),
        pair("cheese", "bread", 6.0),
        pair("cat", "cheese", 1.0),
        pair("dog", "bread", 1.5),
        pair("mat", "rug", 7.5),
        pair("cat", "unicorn", 2.0),
    ];
    let report = evaluate_similarity(&gold, &set, &OovPolicy::SkipOov)?;
    println!(
        "Spearman {:.3} over {} pairs ({} out-of-vocabulary words)",
        report.score, report.n_used, report.n_oov
    );

    let mut text = Vec::new();
    write_embeddings(&set, &mut text)?;
    for line in String::from_utf8(text)?.lines().take(3) {
        println!("{line}");
    }
    Ok(())
}
