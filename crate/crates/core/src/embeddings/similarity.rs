use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::EmbeddingSet;
use crate::error::{Error, Result};

/// Minimum retained pairs for a similarity score.
const MIN_PAIRS: usize = 3;

pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            what: "vector",
            expected: u.len(),
            found: v.len(),
        });
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Ranks starting at 1; tied values share the mean of their rank span.
fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1..=end.
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Rank correlation: Pearson correlation of average ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            what: "ranked sample",
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::TooFewPairs {
            found: a.len(),
            needed: 2,
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidConfig("ranked samples must be finite".into()));
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let mean = (a.len() + 1) as f64 / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        let (dx, dy) = (x - mean, y - mean);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Gold-standard pair with a human similarity score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityPair {
    pub word1: String,
    pub word2: String,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OovPolicy {
    /// Drop pairs with a word missing from the embeddings.
    SkipOov,
    /// Also drop pairs with a word missing from another vocabulary, so
    /// several embeddings are compared on the same pairs.
    IntersectionWith(HashSet<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub score: f64,
    /// Distinct pair words that were unavailable under the policy.
    pub n_oov: usize,
    pub n_used: usize,
}

pub fn evaluate_similarity(
    pairs: &[SimilarityPair],
    embeddings: &EmbeddingSet,
    policy: &OovPolicy,
) -> Result<SimilarityReport> {
    let known = |w: &str| {
        embeddings.contains(w)
            && match policy {
                OovPolicy::SkipOov => true,
                OovPolicy::IntersectionWith(other) => other.contains(w),
            }
    };
    let mut missing = BTreeSet::new();
    let mut human = Vec::new();
    let mut model = Vec::new();
    for p in pairs {
        if !p.score.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "pair ({}, {}) has a non-finite score",
                p.word1, p.word2
            )));
        }
        let mut ok = true;
        for w in [&p.word1, &p.word2] {
            if !known(w) {
                missing.insert(w.as_str());
                ok = false;
            }
        }
        if ok {
            human.push(p.score);
            model.push(cosine(
                embeddings.vector(&p.word1)?,
                embeddings.vector(&p.word2)?,
            )?);
        }
    }
    if human.len() < MIN_PAIRS {
        return Err(Error::TooFewPairs {
            found: human.len(),
            needed: MIN_PAIRS,
        });
    }
    Ok(SimilarityReport {
        score: spearman(&human, &model)?,
        n_oov: missing.len(),
        n_used: human.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_cases() {
        let c = cosine(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert!((c - 32.0 / (14.0f64 * 77.0).sqrt()).abs() < 1e-15);
        assert!((c - 0.974_631_846).abs() < 1e-9);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 3.0]).unwrap(), 0.0);
        assert!((cosine(&[0.3, -2.0], &[0.3, -2.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            cosine(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn average_ranks_share_ties() {
        assert_eq!(
            average_ranks(&[10.0, 20.0, 20.0, 5.0]),
            vec![2.0, 3.5, 3.5, 1.0]
        );
    }

    #[test]
    fn spearman_extremes_and_errors() {
        let up = [1.0, 2.0, 3.0, 10.0];
        assert_eq!(spearman(&up, &[0.1, 0.2, 0.3, 0.4]).unwrap(), 1.0);
        assert_eq!(spearman(&up, &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert!(matches!(spearman(&up, &[1.0; 4]), Err(Error::ZeroVariance)));
        assert!(spearman(&up, &[1.0, 2.0]).is_err());
    }
}
