use std::collections::HashMap;

use serde::Serialize;

use super::LogBase;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::lda::LdaModel;

/// Document frequencies and pairwise document co-occurrence counts for a
/// fixed set of words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceCounts {
    index: HashMap<u32, usize>,
    // k x k, symmetric; the diagonal holds document frequencies
    pairs: Vec<u64>,
    k: usize,
}

impl CooccurrenceCounts {
    fn slot(&self, w: u32) -> Result<usize> {
        self.index.get(&w).copied().ok_or(Error::UnknownWord(w))
    }

    /// Number of documents containing `w`.
    pub fn doc_frequency(&self, w: u32) -> Result<u64> {
        let i = self.slot(w)?;
        Ok(self.pairs[i * self.k + i])
    }

    /// Number of documents containing both `a` and `b`.
    pub fn co_doc_frequency(&self, a: u32, b: u32) -> Result<u64> {
        let (i, j) = (self.slot(a)?, self.slot(b)?);
        Ok(self.pairs[i * self.k + j])
    }
}

pub fn cooccurrence_counts(corpus: &Corpus, words: &[u32]) -> Result<CooccurrenceCounts> {
    let mut index = HashMap::new();
    for &w in words {
        if w as usize >= corpus.vocab_size() {
            return Err(Error::UnknownWord(w));
        }
        let next = index.len();
        index.entry(w).or_insert(next);
    }
    let k = index.len();
    let mut pairs = vec![0u64; k * k];
    let mut stamp = vec![usize::MAX; k];
    let mut present = Vec::new();
    for (d, doc) in corpus.docs().iter().enumerate() {
        present.clear();
        for t in &doc.tokens {
            if let Some(&i) = index.get(t) {
                if stamp[i] != d {
                    stamp[i] = d;
                    present.push(i);
                }
            }
        }
        for &i in &present {
            for &j in &present {
                pairs[i * k + j] += 1;
            }
        }
    }
    Ok(CooccurrenceCounts { index, pairs, k })
}

pub fn topic_coherence_co_in(
    words: &[u32],
    counts: &CooccurrenceCounts,
    base: LogBase,
) -> Result<f64> {
    let mut co = 0.0;
    for m in 1..words.len() {
        for l in 0..m {
            let joint = counts.co_doc_frequency(words[m], words[l])? as f64;
            let df = counts.doc_frequency(words[l])? as f64;
            co += base.log((joint + 1.0) / df);
        }
    }
    Ok(co)
}

/// Document co-occurrence coherence of a ranked word list:
/// sum over pairs `l < m` of `ln((T(w_m, w_l) + 1) / T(w_l))`.
pub fn topic_coherence_co(words: &[u32], counts: &CooccurrenceCounts) -> Result<f64> {
    topic_coherence_co_in(words, counts, LogBase::E)
}

/// `sqrt(| mean(x^2) - mean(x)^2 |)`, 0 for an empty slice.
pub fn coherence_sd(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean_sq = values.iter().map(|v| v * v).sum::<f64>() / n;
    let mean = values.iter().sum::<f64>() / n;
    (mean_sq - mean * mean).abs().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceReport {
    pub top_m: usize,
    pub per_topic_co: Vec<f64>,
    /// `Co_k` divided by the number of words scored for topic `k`.
    pub per_topic_col: Vec<f64>,
    pub mean_col: f64,
    pub sd: f64,
    pub mean_co: f64,
    pub sd_co: f64,
    pub word_sets: Vec<Vec<String>>,
}

impl CoherenceReport {
    pub fn from_topic_scores(top_m: usize, co: Vec<f64>, word_sets: Vec<Vec<String>>) -> Self {
        let col: Vec<f64> = co
            .iter()
            .zip(&word_sets)
            .map(|(c, ws)| {
                if ws.is_empty() {
                    0.0
                } else {
                    c / ws.len() as f64
                }
            })
            .collect();
        let mean = |v: &[f64]| {
            if v.is_empty() {
                0.0
            } else {
                v.iter().sum::<f64>() / v.len() as f64
            }
        };
        CoherenceReport {
            top_m,
            mean_col: mean(&col),
            sd: coherence_sd(&col),
            mean_co: mean(&co),
            sd_co: coherence_sd(&co),
            per_topic_co: co,
            per_topic_col: col,
            word_sets,
        }
    }
}

/// Scores each topic's `top_m` ranked words against the training corpus.
pub fn coherence_report(
    model: &LdaModel,
    corpus: &Corpus,
    top_m: usize,
) -> Result<CoherenceReport> {
    if model.corpus_hash() != corpus.content_hash() {
        return Err(Error::ArchiveMismatch(
            "model was not trained on this corpus".into(),
        ));
    }
    let summaries = model.topic_summaries(top_m)?;
    let mut all_words: Vec<u32> = summaries.iter().flat_map(|s| s.word_ids()).collect();
    all_words.sort_unstable();
    all_words.dedup();
    let counts = cooccurrence_counts(corpus, &all_words)?;
    let mut co = Vec::with_capacity(summaries.len());
    let mut word_sets = Vec::with_capacity(summaries.len());
    for s in &summaries {
        co.push(topic_coherence_co(&s.word_ids(), &counts)?);
        word_sets.push(s.entries.iter().map(|e| e.word.clone()).collect());
    }
    Ok(CoherenceReport::from_topic_scores(top_m, co, word_sets))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_corpus, WordDocument};

    fn corpus(docs: &[&[&str]]) -> Corpus {
        let docs = docs
            .iter()
            .enumerate()
            .map(|(i, ws)| WordDocument {
                id: i.to_string(),
                words: ws.iter().map(|w| w.to_string()).collect(),
            })
            .collect();
        build_corpus(docs, 1).unwrap()
    }

    #[test]
    fn cooccurrence_hand_counts() {
        let c = corpus(&[&["a", "b"], &["a"], &["a", "a"]]);
        let (a, b) = (0, 1);
        let t = cooccurrence_counts(&c, &[a, b]).unwrap();
        assert_eq!(t.doc_frequency(a).unwrap(), 3);
        assert_eq!(t.doc_frequency(b).unwrap(), 1);
        assert_eq!(t.co_doc_frequency(a, b).unwrap(), 1);
        assert_eq!(t.co_doc_frequency(b, a).unwrap(), 1);
        assert_eq!(t.co_doc_frequency(a, a).unwrap(), 3);
        assert!(matches!(
            cooccurrence_counts(&c, &[7]),
            Err(Error::UnknownWord(7))
        ));
        assert!(matches!(t.doc_frequency(5), Err(Error::UnknownWord(5))));
    }

    #[test]
    fn co_examples() {
        let c = corpus(&[&["a", "b"], &["a"], &["a"]]);
        let t = cooccurrence_counts(&c, &[0, 1]).unwrap();
        assert_eq!(topic_coherence_co(&[0], &t).unwrap(), 0.0);
        let co = topic_coherence_co(&[0, 1], &t).unwrap();
        assert!((co - (2.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((co + 0.405465).abs() < 1e-6);

        let c = corpus(&[&["a", "b"], &["b", "a"], &["a", "b"], &["a", "b"]]);
        let t = cooccurrence_counts(&c, &[0, 1]).unwrap();
        let co = topic_coherence_co(&[0, 1], &t).unwrap();
        assert!((co - 0.223144).abs() < 1e-6);
    }

    #[test]
    fn sd_formula() {
        assert_eq!(coherence_sd(&[0.0, 2.0]), 1.0);
        assert_eq!(coherence_sd(&[0.7]), 0.0);
        assert_eq!(coherence_sd(&[1.5, 1.5, 1.5]), 0.0);
        assert_eq!(coherence_sd(&[]), 0.0);
    }

    #[test]
    fn report_from_scores() {
        let r = CoherenceReport::from_topic_scores(
            2,
            vec![0.0, 4.0],
            vec![vec!["a".into(), "b".into()], vec!["c".into(), "d".into()]],
        );
        assert_eq!(r.per_topic_col, vec![0.0, 2.0]);
        assert_eq!(r.mean_col, 1.0);
        assert_eq!(r.sd, 1.0);
        assert_eq!(r.mean_co, 2.0);
        assert_eq!(r.sd_co, 2.0);
    }
}
