use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Logarithm base for information quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    #[inline]
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
        }
    }
}

/// A hard assignment of documents to clusters `0..n_clusters`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    labels: Vec<u32>,
    n_clusters: usize,
}

impl Clustering {
    pub fn new(labels: Vec<u32>, n_clusters: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= n_clusters) {
            return Err(Error::InvalidConfig(format!(
                "cluster label {bad} outside 0..{n_clusters}"
            )));
        }
        Ok(Clustering { labels, n_clusters })
    }

    /// Uses `max(label) + 1` clusters.
    pub fn from_labels(labels: Vec<u32>) -> Self {
        let n_clusters = labels.iter().max().map_or(0, |&m| m as usize + 1);
        Clustering { labels, n_clusters }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.n_clusters];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

// Both entropy and mutual information evaluate p * log(n / count) terms with
// the same operation order, so I(X;X) and H(X) agree bit for bit.

pub fn entropy_in(c: &Clustering, base: LogBase) -> Result<f64> {
    if c.is_empty() {
        return Err(Error::EmptyClustering);
    }
    let n = c.len() as f64;
    Ok(c.cluster_sizes()
        .into_iter()
        .filter(|&s| s > 0)
        .map(|s| {
            let s = s as f64;
            (s / n) * base.log(n / s)
        })
        .sum())
}

/// Shannon entropy of the cluster-size distribution, in bits.
pub fn entropy(c: &Clustering) -> Result<f64> {
    entropy_in(c, LogBase::Two)
}

fn check_universe(x: &Clustering, y: &Clustering) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::MismatchedUniverse(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptyClustering);
    }
    Ok(())
}

pub fn mutual_information_in(x: &Clustering, y: &Clustering, base: LogBase) -> Result<f64> {
    check_universe(x, y)?;
    let mut joint: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (&a, &b) in x.labels().iter().zip(y.labels()) {
        *joint.entry((a, b)).or_insert(0) += 1;
    }
    let sx = x.cluster_sizes();
    let sy = y.cluster_sizes();
    let n = x.len() as f64;
    let mi: f64 = joint
        .into_iter()
        .map(|((a, b), nab)| {
            let nab = nab as f64;
            let ratio = (nab * n) / (sx[a as usize] as f64 * sy[b as usize] as f64);
            (nab / n) * base.log(ratio)
        })
        .sum();
    Ok(mi.max(0.0))
}

/// Mutual information between two clusterings of the same documents, in bits.
/// Empty contingency cells contribute nothing.
pub fn mutual_information(x: &Clustering, y: &Clustering) -> Result<f64> {
    mutual_information_in(x, y, LogBase::Two)
}

/// `2 I(X;Y) / (H(X) + H(Y))`, or 1 when both clusterings are trivial.
pub fn nmi(x: &Clustering, y: &Clustering) -> Result<f64> {
    let mi = mutual_information(x, y)?;
    let denom = entropy(x)? + entropy(y)?;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((2.0 * mi / denom).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(labels: &[u32]) -> Clustering {
        Clustering::from_labels(labels.to_vec())
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&c(&[0, 0, 1, 1])).unwrap(), 1.0);
        assert_eq!(entropy(&c(&[3, 3, 3])).unwrap(), 0.0);
        let h = entropy(&c(&[0, 0, 0, 1])).unwrap();
        let oracle = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert!((h - oracle).abs() < 1e-15);
        assert!((h - 0.811278).abs() < 1e-6);
        assert!(matches!(entropy(&c(&[])), Err(Error::EmptyClustering)));
    }

    #[test]
    fn mutual_information_examples() {
        let x = c(&[0, 0, 1, 1]);
        assert_eq!(mutual_information(&x, &x).unwrap(), entropy(&x).unwrap());
        assert_eq!(mutual_information(&x, &c(&[0, 1, 0, 1])).unwrap(), 0.0);
        let mi = mutual_information(&c(&[0, 0, 0, 1]), &c(&[0, 0, 1, 1])).unwrap();
        assert!((mi - 0.311278).abs() < 1e-6, "{mi}");
        assert!(matches!(
            mutual_information(&x, &c(&[0, 1])),
            Err(Error::MismatchedUniverse(4, 2))
        ));
    }

    #[test]
    fn nmi_examples() {
        let x = c(&[0, 0, 1, 1]);
        assert_eq!(nmi(&x, &x).unwrap(), 1.0);
        assert_eq!(nmi(&x, &c(&[0, 1, 0, 1])).unwrap(), 0.0);
        let v = nmi(&c(&[0, 0, 0, 1]), &c(&[0, 0, 1, 1])).unwrap();
        assert!((v - 0.343711).abs() < 1e-6, "{v}");
        assert_eq!(nmi(&c(&[0, 0]), &c(&[5, 5])).unwrap(), 1.0);
    }

    #[test]
    fn natural_log_variant() {
        let x = c(&[0, 0, 1, 1]);
        let h = entropy_in(&x, LogBase::E).unwrap();
        assert!((h - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn explicit_cluster_count() {
        let x = Clustering::new(vec![0, 1], 4).unwrap();
        assert_eq!(x.cluster_sizes(), vec![1, 1, 0, 0]);
        assert!(Clustering::new(vec![4], 4).is_err());
    }
}
