//! Scoring unsupervised labels against ground truth: confusion matrix,
//! Hungarian label alignment, per-class/average/overall accuracy, Cohen's
//! kappa and normalized mutual information.

use alloc::vec;
use alloc::vec::Vec;

use crate::cube::GroundTruth;
use crate::math::{ln, sqrt};
use crate::{Error, Result};

/// Counts of reference class (rows) against predicted cluster (columns).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Confusion {
    /// Reference labels in row order.
    pub classes: Vec<u32>,
    /// Predicted labels in column order.
    pub clusters: Vec<u32>,
    /// Row-major `classes.len() × clusters.len()`.
    pub counts: Vec<u64>,
}

impl Confusion {
    pub fn from_counts(rows: usize, cols: usize, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), rows * cols);
        Self {
            classes: (1..=rows as u32).collect(),
            clusters: (1..=cols as u32).collect(),
            counts,
        }
    }

    pub fn rows(&self) -> usize {
        self.classes.len()
    }

    pub fn cols(&self) -> usize {
        self.clusters.len()
    }

    #[inline]
    pub fn at(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.cols() + b]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.rows().min(self.cols()))
            .map(|a| self.at(a, a))
            .sum()
    }

    /// Reorders columns so that the cluster matched to class `a` sits in
    /// column `a`. Classes left without a cluster get an all-zero column
    /// (cluster label 0); unmatched clusters follow in their original order.
    pub fn aligned(&self, alignment: &Alignment) -> Confusion {
        let matched: Vec<usize> = alignment
            .cluster_for_class
            .iter()
            .flatten()
            .copied()
            .collect();
        let mut cols: Vec<Option<usize>> = alignment.cluster_for_class.clone();
        cols.extend((0..self.cols()).filter(|c| !matched.contains(c)).map(Some));
        let mut counts = Vec::with_capacity(self.rows() * cols.len());
        for a in 0..self.rows() {
            for c in &cols {
                counts.push(c.map_or(0, |c| self.at(a, c)));
            }
        }
        Confusion {
            classes: self.classes.clone(),
            clusters: cols
                .iter()
                .map(|c| c.map_or(0, |c| self.clusters[c]))
                .collect(),
            counts,
        }
    }
}

/// Builds the confusion matrix over pixels whose reference label is not the
/// ignore label.
pub fn confusion_matrix(pred: &[u32], gt: &GroundTruth) -> Result<Confusion> {
    if pred.len() != gt.labels.len() {
        return Err(Error::dim(alloc::format!(
            "{} predictions for {} reference labels",
            pred.len(),
            gt.labels.len()
        )));
    }
    let mut classes: Vec<u32> = Vec::new();
    let mut clusters: Vec<u32> = Vec::new();
    for (&p, &g) in pred.iter().zip(&gt.labels) {
        if g == gt.ignore_label {
            continue;
        }
        if let Err(pos) = classes.binary_search(&g) {
            classes.insert(pos, g);
        }
        if let Err(pos) = clusters.binary_search(&p) {
            clusters.insert(pos, p);
        }
    }
    if classes.is_empty() {
        return Err(Error::NothingToEvaluate);
    }
    let mut counts = vec![0u64; classes.len() * clusters.len()];
    for (&p, &g) in pred.iter().zip(&gt.labels) {
        if g == gt.ignore_label {
            continue;
        }
        let a = classes.binary_search(&g).expect("collected above");
        let b = clusters.binary_search(&p).expect("collected above");
        counts[a * clusters.len() + b] += 1;
    }
    Ok(Confusion {
        classes,
        clusters,
        counts,
    })
}

/// Class-to-cluster matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// Column index of the cluster matched to each row, if any.
    pub cluster_for_class: Vec<Option<usize>>,
}

impl Alignment {
    /// Predicted label to reference label, for relabeling predictions.
    pub fn label_map(&self, confusion: &Confusion) -> Vec<(u32, u32)> {
        self.cluster_for_class
            .iter()
            .enumerate()
            .filter_map(|(a, c)| c.map(|c| (confusion.clusters[c], confusion.classes[a])))
            .collect()
    }
}

/// Matching of clusters to classes that maximizes the matched count.
///
/// The rectangular matrix is padded with zeros to a square and solved with
/// the Hungarian algorithm. Among optimal matchings, classes are fixed in row
/// order to the cluster whose count column is lexicographically largest, so
/// the result depends only on the counts and not on the cluster labels.
pub fn align_labels(confusion: &Confusion) -> Alignment {
    let (rows, cols) = (confusion.rows(), confusion.cols());
    let n = rows.max(cols);
    let mut weight = vec![0i64; n * n];
    for a in 0..rows {
        for b in 0..cols {
            weight[a * n + b] = confusion.at(a, b) as i64;
        }
    }
    let column = |b: usize| -> Vec<u64> {
        (0..rows)
            .map(|a| if b < cols { confusion.at(a, b) } else { 0 })
            .collect()
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| column(y).cmp(&column(x)).then(x.cmp(&y)));

    let (best, mut assignment) = max_weight_matching(&weight, n);
    let forbidden = -(confusion.total() as i64) - 1;
    for a in 0..rows {
        let mut fixed = false;
        for &b in &order {
            if assignment[a] == b {
                fixed = true;
            } else if !(0..a).any(|r| assignment[r] == b) {
                let mut trial = weight.clone();
                for c in (0..n).filter(|&c| c != b) {
                    trial[a * n + c] = forbidden;
                }
                let (total, m) = max_weight_matching(&trial, n);
                if total == best {
                    weight = trial;
                    assignment = m;
                    fixed = true;
                }
            }
            if fixed {
                break;
            }
        }
        debug_assert!(fixed);
        for c in (0..n).filter(|&c| c != assignment[a]) {
            weight[a * n + c] = forbidden;
        }
    }
    Alignment {
        cluster_for_class: (0..rows)
            .map(|a| Some(assignment[a]).filter(|&b| b < cols))
            .collect(),
    }
}

fn max_weight_matching(weight: &[i64], n: usize) -> (i64, Vec<usize>) {
    let max = weight.iter().copied().max().unwrap_or(0);
    let cost: Vec<i64> = weight.iter().map(|&w| max - w).collect();
    let m = hungarian(&cost, n);
    ((0..n).map(|a| weight[a * n + m[a]]).sum(), m)
}

/// Minimum-cost perfect matching on a square integer matrix (shortest
/// augmenting paths with potentials). Returns the column of every row.
fn hungarian(cost: &[i64], n: usize) -> Vec<usize> {
    const INF: i64 = i64::MAX / 4;
    // 1-based arrays; index 0 is the virtual source.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_for_row = vec![0; n];
    for j in 1..=n {
        if p[j] != 0 {
            col_for_row[p[j] - 1] = j - 1;
        }
    }
    col_for_row
}

/// Cohen's kappa of a (square or padded) aligned confusion matrix.
pub fn kappa(confusion: &Confusion) -> f64 {
    let n = confusion.total() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let (rows, cols) = (confusion.rows(), confusion.cols());
    let po = confusion.trace() as f64 / n;
    let mut pe = 0.0;
    for a in 0..rows.min(cols) {
        let row: u64 = (0..cols).map(|b| confusion.at(a, b)).sum();
        let col: u64 = (0..rows).map(|r| confusion.at(r, a)).sum();
        pe += row as f64 * col as f64;
    }
    pe /= n * n;
    if pe >= 1.0 {
        return if po >= 1.0 { 1.0 } else { 0.0 };
    }
    (po - pe) / (1.0 - pe)
}

/// Normalized mutual information with geometric-mean normalization, natural log.
pub fn nmi_from_confusion(confusion: &Confusion) -> f64 {
    let n = confusion.total() as f64;
    if n == 0.0 {
        return 0.0;
    }
    let (rows, cols) = (confusion.rows(), confusion.cols());
    let row_sums: Vec<f64> = (0..rows)
        .map(|a| (0..cols).map(|b| confusion.at(a, b)).sum::<u64>() as f64)
        .collect();
    let col_sums: Vec<f64> = (0..cols)
        .map(|b| (0..rows).map(|a| confusion.at(a, b)).sum::<u64>() as f64)
        .collect();
    let entropy = |sums: &[f64]| -> f64 {
        sums.iter()
            .filter(|&&s| s > 0.0)
            .map(|&s| -(s / n) * ln(s / n))
            .sum()
    };
    let (hg, hp) = (entropy(&row_sums), entropy(&col_sums));
    if hg == 0.0 && hp == 0.0 {
        return 1.0;
    }
    if hg == 0.0 || hp == 0.0 {
        return 0.0;
    }
    let mut mi = 0.0;
    for a in 0..rows {
        for b in 0..cols {
            let c = confusion.at(a, b) as f64;
            if c > 0.0 {
                mi += (c / n) * ln(c * n / (row_sums[a] * col_sums[b]));
            }
        }
    }
    (mi / sqrt(hg * hp)).clamp(0.0, 1.0)
}

/// NMI between predictions and reference labels over labeled pixels.
pub fn nmi(pred: &[u32], gt: &GroundTruth) -> Result<f64> {
    Ok(nmi_from_confusion(&confusion_matrix(pred, gt)?))
}

/// All accuracy figures for one prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    /// Aligned confusion matrix.
    pub confusion: Confusion,
    /// Per-class accuracy (%) of every reference class, in row order.
    pub ua: Vec<f64>,
    pub aa: f64,
    pub oa: f64,
    pub kappa: f64,
    pub nmi: f64,
    pub n_evaluated: u64,
    /// Predicted label to matched reference label.
    pub label_map: Vec<(u32, u32)>,
}

pub fn evaluate(pred: &[u32], gt: &GroundTruth) -> Result<EvaluationReport> {
    let raw = confusion_matrix(pred, gt)?;
    let alignment = align_labels(&raw);
    let confusion = raw.aligned(&alignment);
    let n = confusion.total();
    let ua: Vec<f64> = (0..confusion.rows())
        .map(|a| {
            let row: u64 = (0..confusion.cols()).map(|b| confusion.at(a, b)).sum();
            let hit = if a < confusion.cols() {
                confusion.at(a, a)
            } else {
                0
            };
            100.0 * hit as f64 / row as f64
        })
        .collect();
    let aa = ua.iter().sum::<f64>() / ua.len() as f64;
    let oa = 100.0 * confusion.trace() as f64 / n as f64;
    Ok(EvaluationReport {
        kappa: kappa(&confusion),
        nmi: nmi_from_confusion(&raw),
        label_map: alignment.label_map(&raw),
        confusion,
        ua,
        aa,
        oa,
        n_evaluated: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction() {
        let gt = GroundTruth::new(vec![1, 1, 2, 2, 3, 3]);
        let c = confusion_matrix(&[1, 1, 2, 2, 3, 3], &gt).unwrap();
        assert_eq!(c.counts, [2, 0, 0, 0, 2, 0, 0, 0, 2]);
        assert_eq!(
            align_labels(&c).cluster_for_class,
            [Some(0), Some(1), Some(2)]
        );
        assert_eq!(kappa(&c), 1.0);
    }

    #[test]
    fn all_unlabeled_is_an_error() {
        let gt = GroundTruth::new(vec![0, 0, 0]).with_ignore_label(0);
        assert_eq!(
            confusion_matrix(&[1, 2, 1], &gt),
            Err(Error::NothingToEvaluate)
        );
    }

    #[test]
    fn hand_counted_confusion() {
        let gt = GroundTruth::new(vec![1, 1, 1, 1, 2, 2, 2, 2]);
        let pred = [1, 1, 1, 2, 1, 2, 2, 2];
        let c = confusion_matrix(&pred, &gt).unwrap();
        assert_eq!(c.counts, [3, 1, 1, 3]);
    }

    #[test]
    fn swapped_labels_are_realigned() {
        let gt = GroundTruth::new(vec![1, 1, 2, 2, 0]);
        let r = evaluate(&[2, 2, 1, 1, 1], &gt).unwrap();
        assert_eq!(r.oa, 100.0);
        assert_eq!(r.n_evaluated, 4);
        assert_eq!(r.label_map, [(2, 1), (1, 2)]);
    }

    #[test]
    fn kappa_hand_case() {
        let c = Confusion::from_counts(2, 2, vec![3, 1, 1, 3]);
        assert!((kappa(&c) - 0.5).abs() < 1e-12);
        let u = Confusion::from_counts(3, 3, vec![4; 9]);
        assert!(kappa(&u).abs() < 1e-12);
        let single = Confusion::from_counts(1, 1, vec![5]);
        assert_eq!(kappa(&single), 1.0);
    }

    #[test]
    fn nmi_cases() {
        let gt = GroundTruth::new(vec![1, 2, 1, 2]);
        assert!(nmi(&[1, 1, 2, 2], &gt).unwrap().abs() < 1e-12);
        assert!((nmi(&[5, 7, 5, 7], &gt).unwrap() - 1.0).abs() < 1e-12);
        let one = GroundTruth::new(vec![1, 1, 1]);
        assert_eq!(nmi(&[2, 2, 2], &one).unwrap(), 1.0);
        assert_eq!(nmi(&[1, 2, 2], &one).unwrap(), 0.0);
    }

    #[test]
    fn extra_clusters_count_as_errors() {
        let gt = GroundTruth::new(vec![1, 1, 1, 2, 2, 2]);
        let r = evaluate(&[1, 1, 3, 2, 2, 2], &gt).unwrap();
        assert_eq!(r.confusion.cols(), 3);
        assert!((r.oa - 500.0 / 6.0).abs() < 1e-12);
        assert!((r.ua[0] - 200.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.ua[1], 100.0);
    }

    #[test]
    fn fewer_clusters_than_classes() {
        let gt = GroundTruth::new(vec![1, 2, 3, 3]);
        let r = evaluate(&[1, 1, 2, 2], &gt).unwrap();
        // class 3 <- cluster 2 (2 hits), one of classes 1/2 <- cluster 1 (1 hit)
        assert_eq!(r.oa, 75.0);
        assert_eq!(r.ua.len(), 3);
    }
}
