use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fill_conditional_weights, LdaHyperparams, LdaModel};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Collapsed Gibbs sampler that owns the model while it is being trained.
///
/// Per token the sampler works on two dense scratch rows (the current
/// document's topic counts and the current word's topic counts) scattered
/// from the sparse tables, so each draw costs O(N + nnz(word row)).
pub struct GibbsSampler {
    model: LdaModel,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
    doc_dense: Vec<u32>,
    word_dense: Vec<u32>,
    sweeps: usize,
}

impl GibbsSampler {
    /// Seeds the RNG from `hp.seed` and assigns every token a uniformly random topic.
    pub fn new(corpus: &Corpus, hp: &LdaHyperparams) -> Result<Self> {
        hp.validate()?;
        if corpus.num_docs() == 0 || corpus.num_tokens() == 0 {
            return Err(Error::EmptyCorpus);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
        let n = hp.num_topics as u32;
        let z = (0..corpus.num_tokens())
            .map(|_| rng.random_range(0..n))
            .collect();
        let model = LdaModel::from_assignments(corpus, hp, z)?;
        Ok(GibbsSampler {
            model,
            rng,
            weights: vec![0.0; hp.num_topics],
            doc_dense: vec![0; hp.num_topics],
            word_dense: vec![0; hp.num_topics],
            sweeps: 0,
        })
    }

    pub fn model(&self) -> &LdaModel {
        &self.model
    }

    pub fn sweeps_done(&self) -> usize {
        self.sweeps
    }

    pub fn into_model(self) -> LdaModel {
        self.model
    }

    /// Resamples every token once, documents in order.
    pub fn sweep(&mut self) {
        let LdaModel {
            hyperparams,
            tokens,
            offsets,
            z,
            counts,
            vocabulary,
            ..
        } = &mut self.model;
        let alpha = hyperparams.alpha;
        let beta = hyperparams.beta;
        let vocab_beta = vocabulary.len() as f64 * beta;
        let doc_dense = &mut self.doc_dense;
        let word_dense = &mut self.word_dense;
        let weights = &mut self.weights;

        for d in 0..offsets.len() - 1 {
            for &(k, c) in counts.doc_topic.row(d) {
                doc_dense[k as usize] = c;
            }
            for i in offsets[d]..offsets[d + 1] {
                let w = tokens[i] as usize;
                let old = z[i];
                doc_dense[old as usize] -= 1;
                counts.word_topic.decrement(w, old);
                counts.topic_totals[old as usize] -= 1;

                let word_row = counts.word_topic.row(w);
                for &(k, c) in word_row {
                    word_dense[k as usize] = c;
                }
                let total = fill_conditional_weights(
                    doc_dense,
                    word_dense,
                    &counts.topic_totals,
                    alpha,
                    beta,
                    vocab_beta,
                    weights,
                );
                for &(k, _) in word_row {
                    word_dense[k as usize] = 0;
                }

                let new = draw(weights, total, &mut self.rng);
                z[i] = new;
                doc_dense[new as usize] += 1;
                counts.word_topic.increment(w, new);
                counts.topic_totals[new as usize] += 1;
            }
            counts.doc_topic.set_row_from_dense(d, doc_dense);
            doc_dense.fill(0);
        }
        self.sweeps += 1;
    }
}

/// Inverse-CDF draw from unnormalized `weights` summing to `total`.
fn draw(weights: &[f64], total: f64, rng: &mut ChaCha8Rng) -> u32 {
    let mut u = rng.random::<f64>() * total;
    for (k, &w) in weights.iter().enumerate() {
        if u < w {
            return k as u32;
        }
        u -= w;
    }
    // rounding left u just past the last bucket
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0) as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draw_respects_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let k = draw(&[0.0, 2.0, 0.0, 1.0], 3.0, &mut rng);
            assert!(k == 1 || k == 3);
        }
        // total slightly above the true sum
        assert_eq!(draw(&[1.0, 0.0], 1.0 + 1e-9, &mut rng) % 2, 0);
    }

    #[test]
    fn draw_frequencies_follow_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let weights = [1.0, 3.0];
        let hits = (0..40_000)
            .filter(|_| draw(&weights, 4.0, &mut rng) == 1)
            .count();
        let frac = hits as f64 / 40_000.0;
        assert!((frac - 0.75).abs() < 0.01, "{frac}");
    }
}
