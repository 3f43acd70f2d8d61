use std::io::{BufRead, Write};

use super::{EmbeddingSet, SimilarityPair};
use crate::error::{Error, Result};
use crate::util::format_sig;

/// Plain-text embeddings: a `d vocab_size` header, then one line per word
/// with the token and `d` space-separated values at 9 significant digits.
pub fn write_embeddings<W: Write>(set: &EmbeddingSet, mut out: W) -> Result<()> {
    let io = |e| Error::io("<embeddings>", e);
    writeln!(out, "{} {}", set.dim(), set.len()).map_err(io)?;
    for (word, v) in set.iter() {
        if word.is_empty() || word.contains(char::is_whitespace) {
            return Err(Error::InvalidToken {
                token: word.to_owned(),
                reason: "embedding tokens must be nonempty and free of whitespace",
            });
        }
        write!(out, "{word}").map_err(io)?;
        for x in v {
            write!(out, " {}", format_sig(*x, 9)).map_err(io)?;
        }
        writeln!(out).map_err(io)?;
    }
    Ok(())
}

/// Reads the format written by [`write_embeddings`]. The header line is
/// optional, so headerless files from other tools load too.
pub fn read_embeddings<R: BufRead>(input: R, name: &str) -> Result<EmbeddingSet> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: name.to_owned(),
        line,
        message,
    };
    let mut words = Vec::new();
    let mut vectors = Vec::new();
    let mut header: Option<(usize, usize)> = None;
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io(name, e))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if n == 0 && fields.len() == 2 {
            if let (Ok(d), Ok(v)) = (fields[0].parse(), fields[1].parse()) {
                header = Some((d, v));
                continue;
            }
        }
        let values = fields[1..]
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| parse_err(n + 1, format!("bad value {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let d = header.map_or_else(|| vectors.first().map_or(values.len(), Vec::len), |h| h.0);
        if values.len() != d {
            return Err(parse_err(
                n + 1,
                format!("expected {d} values, found {}", values.len()),
            ));
        }
        words.push(fields[0].to_owned());
        vectors.push(values);
    }
    if let Some((_, v)) = header {
        if v != words.len() {
            return Err(parse_err(
                1,
                format!("header promises {v} words, file has {}", words.len()),
            ));
        }
    }
    EmbeddingSet::from_vectors(words, vectors)
}

/// Gold pairs as tab-separated `word1 word2 score`. A first line whose
/// score field is not a number is taken as a header and skipped.
pub fn read_similarity_pairs<R: BufRead>(input: R, name: &str) -> Result<Vec<SimilarityPair>> {
    let mut pairs = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io(name, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let err = |message: String| Error::Parse {
            path: name.to_owned(),
            line: n + 1,
            message,
        };
        if fields.len() < 3 {
            return Err(err(format!(
                "expected 3 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let score = match fields[2].trim().parse::<f64>() {
            Ok(s) if s.is_finite() => s,
            Ok(s) => return Err(err(format!("non-finite score {s}"))),
            Err(_) if n == 0 => continue,
            Err(e) => return Err(err(format!("bad score {:?}: {e}", fields[2]))),
        };
        pairs.push(SimilarityPair {
            word1: fields[0].trim().to_owned(),
            word2: fields[1].trim().to_owned(),
            score,
        });
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_round_trip() {
        let set = EmbeddingSet::from_vectors(
            vec!["a".into(), "b".into()],
            vec![vec![0.123456789123, -2.0], vec![1e-7, 3.5]],
        )
        .unwrap();
        let mut out = Vec::new();
        write_embeddings(&set, &mut out).unwrap();
        let text = String::from_utf8(out.clone()).unwrap();
        assert!(text.starts_with("2 2\na 1.23456789e-1 "));
        let back = read_embeddings(out.as_slice(), "mem").unwrap();
        assert_eq!(back.words(), set.words());
        assert_eq!(back.vector("a").unwrap()[0], 0.123456789);
    }

    #[test]
    fn headerless_and_malformed() {
        let set = read_embeddings("x 1 2\ny 3 4\n".as_bytes(), "mem").unwrap();
        assert_eq!(set.dim(), 2);
        assert!(read_embeddings("x 1 2\ny 3\n".as_bytes(), "mem").is_err());
        assert!(read_embeddings("2 3\nx 1 2\n".as_bytes(), "mem").is_err());
    }

    #[test]
    fn gold_pairs() {
        let p =
            read_similarity_pairs("word1\tword2\tscore\nold\tnew\t1.58\n".as_bytes(), "g").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].score, 1.58);
        let e = read_similarity_pairs("a\tb\t1\nc\td\tnope\n".as_bytes(), "g").unwrap_err();
        assert!(e.to_string().starts_with("g:2:"), "{e}");
    }
}
