//! Model archive directory: `model.json`, `assignments.bin`, `topics.tsv`,
//! `doc_topics.csv`.
//!
//! `assignments.bin` is a sequence of little-endian `u32`: the number of
//! documents, then for each document its length followed by one topic id
//! per token.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LdaHyperparams, LdaModel};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

pub const MODEL_FILE: &str = "model.json";
pub const ASSIGNMENTS_FILE: &str = "assignments.bin";
pub const TOPICS_FILE: &str = "topics.tsv";
pub const DOC_TOPICS_FILE: &str = "doc_topics.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelManifest {
    pub label: String,
    pub hyperparams: LdaHyperparams,
    pub corpus_hash: String,
    pub seed: u64,
    pub iterations: usize,
    pub num_docs: usize,
    pub num_tokens: usize,
    pub vocab_size: usize,
}

impl ModelManifest {
    pub fn of(model: &LdaModel) -> Self {
        let hp = *model.hyperparams();
        ModelManifest {
            label: hp.label("LDA"),
            hyperparams: hp,
            corpus_hash: model.corpus_hash().to_owned(),
            seed: hp.seed,
            iterations: hp.iterations,
            num_docs: model.num_docs(),
            num_tokens: model.num_tokens(),
            vocab_size: model.vocab_size(),
        }
    }
}

fn encode_assignments(model: &LdaModel) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 * (1 + model.num_docs() + model.num_tokens()));
    out.extend_from_slice(&(model.num_docs() as u32).to_le_bytes());
    for d in 0..model.num_docs() {
        let z = model.assignments(d).expect("doc in range");
        out.extend_from_slice(&(z.len() as u32).to_le_bytes());
        for &k in z {
            out.extend_from_slice(&k.to_le_bytes());
        }
    }
    out
}

fn decode_assignments(bytes: &[u8], path: &Path) -> Result<Vec<Vec<u32>>> {
    if !bytes.len().is_multiple_of(4) {
        return Err(Error::archive(path, "length is not a multiple of 4"));
    }
    let mut words = bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]));
    let truncated = || Error::archive(path, "truncated");
    let num_docs = words.next().ok_or_else(truncated)? as usize;
    let mut docs = Vec::with_capacity(num_docs);
    for _ in 0..num_docs {
        let len = words.next().ok_or_else(truncated)? as usize;
        let z: Vec<u32> = words.by_ref().take(len).collect();
        if z.len() != len {
            return Err(truncated());
        }
        docs.push(z);
    }
    if words.next().is_some() {
        return Err(Error::archive(path, "trailing data"));
    }
    Ok(docs)
}

fn render_topics(model: &LdaModel) -> String {
    let mut out = String::from("topic_id\trank\tword\tcount\n");
    let summaries = model
        .topic_summaries(model.vocab_size().max(1))
        .expect("top_m >= 1");
    for s in summaries {
        for (rank, e) in s.entries.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", s.topic_id, rank + 1, e.word, e.count);
        }
    }
    out
}

fn render_doc_topics(model: &LdaModel) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["doc_id".to_owned()];
    header.extend((0..model.num_topics()).map(|k| format!("topic_{k}")));
    w.write_record(&header).expect("in-memory write");
    for (d, id) in model.doc_ids().iter().enumerate() {
        let theta = model.doc_topic_distribution(d).expect("doc in range");
        let mut row = vec![id.clone()];
        row.extend(theta.iter().map(|p| format!("{p:.6}")));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_model_archive(model: &LdaModel, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest =
        serde_json::to_string_pretty(&ModelManifest::of(model)).expect("manifest serializes");
    write_bytes(&dir.join(MODEL_FILE), (manifest + "\n").as_bytes())?;
    write_bytes(&dir.join(ASSIGNMENTS_FILE), &encode_assignments(model))?;
    write_bytes(&dir.join(TOPICS_FILE), render_topics(model).as_bytes())?;
    write_bytes(
        &dir.join(DOC_TOPICS_FILE),
        render_doc_topics(model).as_bytes(),
    )
}

pub fn read_manifest(dir: &Path) -> Result<ModelManifest> {
    let path = dir.join(MODEL_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::archive(&path, e.to_string()))
}

/// Loads a model archive against the corpus it was trained on. The count
/// tables are rebuilt from the stored assignments.
pub fn read_model_archive(dir: &Path, corpus: &Corpus) -> Result<LdaModel> {
    let manifest = read_manifest(dir)?;
    let hash = corpus.content_hash();
    if manifest.corpus_hash != hash {
        return Err(Error::ArchiveMismatch(format!(
            "model was trained on corpus {} but the given corpus is {}",
            manifest.corpus_hash, hash
        )));
    }
    let path = dir.join(ASSIGNMENTS_FILE);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let per_doc = decode_assignments(&bytes, &path)?;
    if per_doc.len() != corpus.num_docs()
        || per_doc
            .iter()
            .zip(corpus.docs())
            .any(|(z, doc)| z.len() != doc.tokens.len())
    {
        return Err(Error::archive(
            &path,
            "document lengths do not match the corpus",
        ));
    }
    let z = per_doc.into_iter().flatten().collect();
    LdaModel::from_assignments(corpus, &manifest.hyperparams, z).map_err(|e| match e {
        Error::InvalidHyperparams(m) => Error::InvalidHyperparams(m),
        other => Error::archive(&path, other.to_string()),
    })
}
