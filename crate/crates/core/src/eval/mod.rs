//! Model evaluation: normalized mutual information between two document
//! clusterings, and document co-occurrence topic coherence.

mod coherence;
mod info;

use serde_json::{json, Value};

use crate::corpus::Corpus;
use crate::error::Result;
use crate::lda::{LdaHyperparams, LdaModel};

pub use coherence::{
    coherence_report, coherence_sd, cooccurrence_counts, topic_coherence_co, topic_coherence_co_in,
    CoherenceReport, CooccurrenceCounts,
};
pub use info::{
    entropy, entropy_in, mutual_information, mutual_information_in, nmi, Clustering, LogBase,
};

pub const DEFAULT_TOP_WORDS: usize = 10;

/// The two document clusterings compared by NMI.
///
/// `assigned` puts each document in the topic holding most of its sampled
/// token assignments. `labelled` puts it in the topic most likely to have
/// generated the whole document.
pub fn document_clusterings(model: &LdaModel) -> Result<(Clustering, Clustering)> {
    let n = model.num_topics();
    let mut assigned = Vec::with_capacity(model.num_docs());
    let mut labelled = Vec::with_capacity(model.num_docs());
    for d in 0..model.num_docs() {
        assigned.push(model.majority_assignment_cluster(d)? as u32);
        labelled.push(model.posterior_label(d)? as u32);
    }
    Ok((Clustering::new(assigned, n)?, Clustering::new(labelled, n)?))
}

pub fn model_nmi(model: &LdaModel) -> Result<f64> {
    let (x, y) = document_clusterings(model)?;
    nmi(&x, &y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub nmi: f64,
    pub coherence: CoherenceReport,
    pub model: LdaHyperparams,
}

impl EvalReport {
    /// Layout of `eval.json`.
    pub fn to_json(&self) -> Value {
        let c = &self.coherence;
        let per_topic: Vec<Value> = (0..c.per_topic_co.len())
            .map(|k| {
                json!({
                    "topic": k,
                    "co": c.per_topic_co[k],
                    "col": c.per_topic_col[k],
                    "words": c.word_sets[k],
                })
            })
            .collect();
        json!({
            "nmi": self.nmi,
            "coherence": {
                "top_m": c.top_m,
                "per_topic": per_topic,
                "mean_col": c.mean_col,
                "sd": c.sd,
                "mean_co": c.mean_co,
                "sd_co": c.sd_co,
            },
            "model": self.model,
        })
    }
}

pub fn evaluate(model: &LdaModel, corpus: &Corpus, top_m: usize) -> Result<EvalReport> {
    let coherence = coherence_report(model, corpus, top_m)?;
    Ok(EvalReport {
        nmi: model_nmi(model)?,
        coherence,
        model: *model.hyperparams(),
    })
}
