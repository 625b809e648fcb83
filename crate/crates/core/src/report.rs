//! Parameter sweeps over (N, alpha, beta, seed) grids and the NMI and
//! coherence tables rendered from them.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::eval::{coherence_report, model_nmi};
use crate::lda::{train, LdaHyperparams};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub topic_numbers: Vec<usize>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub iterations: usize,
    pub top_m: usize,
    /// Prefix of row labels, `LDA` by default.
    pub name: String,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let empty = [
            ("topic numbers", self.topic_numbers.is_empty()),
            ("alphas", self.alphas.is_empty()),
            ("betas", self.betas.is_empty()),
            ("seeds", self.seeds.is_empty()),
        ];
        if let Some((what, _)) = empty.iter().find(|(_, e)| *e) {
            return Err(Error::InvalidConfig(format!("sweep has no {what}")));
        }
        if self.iterations < 1 {
            return Err(Error::InvalidConfig(
                "sweep iterations must be at least 1".into(),
            ));
        }
        if self.top_m < 1 {
            return Err(Error::InvalidConfig("top words must be at least 1".into()));
        }
        Ok(())
    }

    /// Grid cells ordered by (N, alpha, beta, seed).
    pub fn cells(&self, min_token_count: u32) -> Vec<LdaHyperparams> {
        let mut cells = Vec::new();
        for &num_topics in &self.topic_numbers {
            for &alpha in &self.alphas {
                for &beta in &self.betas {
                    for &seed in &self.seeds {
                        cells.push(LdaHyperparams {
                            num_topics,
                            alpha,
                            beta,
                            min_token_count,
                            iterations: self.iterations,
                            seed,
                        });
                    }
                }
            }
        }
        cells.sort_by(|a, b| {
            a.num_topics
                .cmp(&b.num_topics)
                .then(a.alpha.total_cmp(&b.alpha))
                .then(a.beta.total_cmp(&b.beta))
                .then(a.seed.cmp(&b.seed))
        });
        cells
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub label: String,
    pub hyperparams: LdaHyperparams,
    pub nmi: f64,
    pub mean_col: f64,
    pub sd: f64,
    pub seed: u64,
    pub runtime: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailedCell {
    pub label: String,
    pub hyperparams: LdaHyperparams,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Done(SweepRow),
    Failed(FailedCell),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub cells: Vec<CellOutcome>,
}

impl SweepResult {
    pub fn rows(&self) -> Vec<&SweepRow> {
        self.cells
            .iter()
            .filter_map(|c| match c {
                CellOutcome::Done(r) => Some(r),
                CellOutcome::Failed(_) => None,
            })
            .collect()
    }

    pub fn failures(&self) -> Vec<&FailedCell> {
        self.cells
            .iter()
            .filter_map(|c| match c {
                CellOutcome::Failed(f) => Some(f),
                CellOutcome::Done(_) => None,
            })
            .collect()
    }
}

/// Trains and evaluates a single grid cell.
pub fn run_cell(
    corpus: &Corpus,
    hp: &LdaHyperparams,
    top_m: usize,
    name: &str,
) -> Result<SweepRow> {
    let start = Instant::now();
    let model = train(corpus, hp)?;
    let nmi = model_nmi(&model)?;
    let coherence = coherence_report(&model, corpus, top_m)?;
    Ok(SweepRow {
        label: hp.label(name),
        hyperparams: *hp,
        nmi,
        mean_col: coherence.mean_col,
        sd: coherence.sd,
        seed: hp.seed,
        runtime: start.elapsed(),
    })
}

/// Runs every cell of the grid on up to `jobs` worker threads (0 means one
/// per core). Output order does not depend on `jobs`.
pub fn run_sweep(corpus: &Corpus, spec: &SweepSpec, jobs: usize) -> Result<SweepResult> {
    if corpus.num_docs() == 0 {
        return Err(Error::EmptyCorpus);
    }
    spec.validate()?;
    let cells = spec.cells(corpus.min_token_count());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let cells = pool.install(|| {
        cells
            .par_iter()
            .map(|hp| match run_cell(corpus, hp, spec.top_m, &spec.name) {
                Ok(row) => {
                    log::info!(
                        "{} seed {}: done in {:.2?}",
                        row.label,
                        row.seed,
                        row.runtime
                    );
                    CellOutcome::Done(row)
                }
                Err(e) => {
                    log::warn!("{} seed {}: {e}", hp.label(&spec.name), hp.seed);
                    CellOutcome::Failed(FailedCell {
                        label: hp.label(&spec.name),
                        hyperparams: *hp,
                        error: e.to_string(),
                    })
                }
            })
            .collect()
    });
    Ok(SweepResult { cells })
}

pub const SWEEP_TSV_HEADER: &str = "label\tN\talpha\tbeta\tseed\tnmi\tmean_col\tsd\truntime_s";

/// Renders `sweep.tsv`. Runtimes are written only when `record_runtime` is
/// set; otherwise the column holds `NA` so the file is reproducible.
pub fn sweep_tsv(rows: &[&SweepRow], record_runtime: bool) -> String {
    let mut out = String::from(SWEEP_TSV_HEADER);
    out.push('\n');
    for r in rows {
        let hp = &r.hyperparams;
        let runtime = if record_runtime {
            format!("{:.3}", r.runtime.as_secs_f64())
        } else {
            "NA".to_owned()
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.label, hp.num_topics, hp.alpha, hp.beta, r.seed, r.nmi, r.mean_col, r.sd, runtime
        );
    }
    out
}

pub fn failures_tsv(failures: &[&FailedCell]) -> String {
    let mut out = String::from("label\tN\talpha\tbeta\tseed\terror\n");
    for f in failures {
        let hp = &f.hyperparams;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            f.label,
            hp.num_topics,
            hp.alpha,
            hp.beta,
            hp.seed,
            f.error.replace(['\t', '\n'], " ")
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Tsv,
    Markdown,
}

/// Three decimals, with negative zero printed as `0.000`.
pub fn fmt3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".to_owned()
    } else {
        s
    }
}

fn row_labels(rows: &[&SweepRow]) -> Vec<String> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for r in rows {
        *seen.entry(r.label.as_str()).or_insert(0) += 1;
    }
    rows.iter()
        .map(|r| {
            if seen[r.label.as_str()] > 1 {
                format!("{} seed={}", r.label, r.seed)
            } else {
                r.label.clone()
            }
        })
        .collect()
}

fn render_table(
    out: &mut String,
    header: [&str; 2],
    body: &[(String, String)],
    format: TableFormat,
) {
    match format {
        TableFormat::Tsv => {
            let _ = writeln!(out, "{}\t{}", header[0], header[1]);
            for (a, b) in body {
                let _ = writeln!(out, "{a}\t{b}");
            }
        }
        TableFormat::Markdown => {
            let _ = writeln!(out, "| {} | {} |", header[0], header[1]);
            out.push_str("|---|---|\n");
            for (a, b) in body {
                let _ = writeln!(out, "| {a} | {b} |");
            }
        }
    }
}

/// NMI table (label, NMI) followed by the coherence table (label, mean ± SD
/// of the normalized per-topic coherence), separated by a blank line.
pub fn render_tables(rows: &[&SweepRow], format: TableFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    let labels = row_labels(rows);
    let nmi: Vec<(String, String)> = labels
        .iter()
        .zip(rows)
        .map(|(l, r)| (l.clone(), fmt3(r.nmi)))
        .collect();
    let co: Vec<(String, String)> = labels
        .iter()
        .zip(rows)
        .map(|(l, r)| (l.clone(), format!("{} ± {}", fmt3(r.mean_col), fmt3(r.sd))))
        .collect();
    let mut out = String::new();
    render_table(&mut out, ["LDA models", "NMI results"], &nmi, format);
    out.push('\n');
    render_table(&mut out, ["Parameters", "Co"], &co, format);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_corpus, WordDocument};

    fn row(label: &str, nmi: f64, mean_col: f64, sd: f64, seed: u64) -> SweepRow {
        SweepRow {
            label: label.into(),
            hyperparams: LdaHyperparams {
                seed,
                ..LdaHyperparams::new(15)
            },
            nmi,
            mean_col,
            sd,
            seed,
            runtime: Duration::from_millis(1500),
        }
    }

    fn spec(topics: Vec<usize>, seeds: Vec<u64>) -> SweepSpec {
        SweepSpec {
            topic_numbers: topics,
            alphas: vec![0.1],
            betas: vec![0.01],
            seeds,
            iterations: 5,
            top_m: 5,
            name: "LDA".into(),
        }
    }

    fn corpus() -> Corpus {
        let docs = ["a b c", "b c d", "d e f a", "e f"]
            .iter()
            .enumerate()
            .map(|(i, t)| WordDocument {
                id: i.to_string(),
                words: t.split(' ').map(str::to_owned).collect(),
            })
            .collect();
        build_corpus(docs, 1).unwrap()
    }

    #[test]
    fn formats_three_decimals() {
        let r = row("LDA(15, 0.1, 0.01)", 0.5401, 0.765, 0.348, 1);
        let out = render_tables(&[&r], TableFormat::Tsv).unwrap();
        assert_eq!(
            out,
            "LDA models\tNMI results\nLDA(15, 0.1, 0.01)\t0.540\n\nParameters\tCo\nLDA(15, 0.1, 0.01)\t0.765 ± 0.348\n"
        );
        let md = render_tables(&[&r], TableFormat::Markdown).unwrap();
        assert!(md.starts_with(
            "| LDA models | NMI results |\n|---|---|\n| LDA(15, 0.1, 0.01) | 0.540 |\n"
        ));
        assert!(md.contains("| LDA(15, 0.1, 0.01) | 0.765 ± 0.348 |"));
        assert!(matches!(
            render_tables(&[], TableFormat::Tsv),
            Err(Error::EmptyRows)
        ));
        assert_eq!(fmt3(-0.0001), "0.000");
    }

    #[test]
    fn repeated_labels_carry_seed() {
        let a = row("LDA(15, 0.1, 0.01)", 0.5, 0.1, 0.1, 1);
        let b = row("LDA(15, 0.1, 0.01)", 0.6, 0.1, 0.1, 2);
        let out = render_tables(&[&a, &b], TableFormat::Tsv).unwrap();
        assert!(out.contains("LDA(15, 0.1, 0.01) seed=1\t0.500"));
        assert!(out.contains("LDA(15, 0.1, 0.01) seed=2\t0.600"));
    }

    #[test]
    fn one_cell_sweep() {
        let s = SweepSpec {
            topic_numbers: vec![15],
            ..spec(vec![], vec![7])
        };
        let res = run_sweep(&corpus(), &s, 1).unwrap();
        let rows = res.rows();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].label, "LDA(15, 0.1, 0.01)");
        assert_eq!(rows[0].seed, 7);
    }

    #[test]
    fn two_seeds_two_rows() {
        let res = run_sweep(&corpus(), &spec(vec![2], vec![5, 3]), 2).unwrap();
        let rows = res.rows();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].label, rows[1].label);
        assert_eq!((rows[0].seed, rows[1].seed), (3, 5));
    }

    #[test]
    fn grid_is_ordered() {
        let s = SweepSpec {
            topic_numbers: vec![20, 10],
            alphas: vec![0.2, 0.05],
            betas: vec![0.015, 0.007],
            seeds: vec![1],
            iterations: 1,
            top_m: 1,
            name: "LDA".into(),
        };
        let cells = s.cells(5);
        assert_eq!(cells.len(), 8);
        assert_eq!(
            (cells[0].num_topics, cells[0].alpha, cells[0].beta),
            (10, 0.05, 0.007)
        );
        assert_eq!(cells[7].label("LDA"), "LDA(20, 0.2, 0.015)");
        assert!(cells.iter().all(|c| c.min_token_count == 5));
    }

    #[test]
    fn failed_cells_do_not_abort() {
        let s = SweepSpec {
            alphas: vec![-1.0, 0.1],
            ..spec(vec![2], vec![1])
        };
        let res = run_sweep(&corpus(), &s, 1).unwrap();
        assert_eq!(res.rows().len(), 1);
        assert_eq!(res.failures().len(), 1);
        assert!(res.failures()[0].error.contains("alpha"));
        assert!(failures_tsv(&res.failures()).lines().count() == 2);
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(run_sweep(&corpus(), &spec(vec![], vec![1]), 1).is_err());
    }

    #[test]
    fn tsv_runtime_column() {
        let r = row("LDA(15, 0.1, 0.01)", 0.5, 0.25, 0.125, 1);
        let t = sweep_tsv(&[&r], false);
        assert_eq!(
            t,
            format!(
                "{SWEEP_TSV_HEADER}\nLDA(15, 0.1, 0.01)\t15\t0.1\t0.01\t1\t0.5\t0.25\t0.125\tNA\n"
            )
        );
        assert!(sweep_tsv(&[&r], true).ends_with("\t1.500\n"));
    }
}
