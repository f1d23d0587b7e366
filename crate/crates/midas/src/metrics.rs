//! Evaluation metrics and the dataset analyses: confusion matrix,
//! unweighted/weighted average recall, per-class coexistence ratios, and
//! the clear/mixed ambiguity split with distribution-matched resampling.
//!
//! Ground truth for all metrics is the argmax of the soft label with the
//! crate-wide lowest-index tie-break. Classes absent from the evaluated
//! samples are excluded from the UAR mean rather than counted as zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::SoftLabel;
use crate::sampling::RngStream;

/// Class-by-class prediction counts; rows are true classes, columns
/// predictions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    classes: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn zeros(classes: usize) -> Result<Self> {
        if classes == 0 {
            return Err(Error::InvalidInput("confusion over zero classes".into()));
        }
        Ok(Self {
            classes,
            counts: vec![0; classes * classes],
        })
    }

    /// Builds a matrix from explicit row-major counts (used in tests and
    /// report loading).
    pub fn from_counts(classes: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != classes * classes {
            return Err(Error::ShapeMismatch(format!(
                "{} counts for a {classes}x{classes} matrix",
                counts.len()
            )));
        }
        Ok(Self { classes, counts })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn get(&self, truth: usize, pred: usize) -> u64 {
        self.counts[truth * self.classes + pred]
    }

    fn bump(&mut self, truth: usize, pred: usize) {
        self.counts[truth * self.classes + pred] += 1;
    }

    /// Row of counts for one true class.
    pub fn row(&self, truth: usize) -> &[u64] {
        &self.counts[truth * self.classes..(truth + 1) * self.classes]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes).map(|c| self.get(c, c)).sum()
    }

    /// Merges another matrix by addition (parallel partial results).
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if self.classes != other.classes {
            return Err(Error::ShapeMismatch(
                "cannot merge confusion matrices of different sizes".into(),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        Ok(())
    }
}

/// Counts prediction/truth pairs into a confusion matrix.
pub fn confusion(preds: &[usize], truths: &[usize], classes: usize) -> Result<ConfusionMatrix> {
    if preds.len() != truths.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions vs {} truths",
            preds.len(),
            truths.len()
        )));
    }
    let mut cm = ConfusionMatrix::zeros(classes)?;
    for (&p, &t) in preds.iter().zip(truths) {
        if p >= classes || t >= classes {
            return Err(Error::InvalidInput(format!(
                "class index out of range: pred {p}, truth {t}, classes {classes}"
            )));
        }
        cm.bump(t, p);
    }
    Ok(cm)
}

/// Unweighted and weighted average recall.
///
/// UAR averages per-class recall over classes with at least one true
/// sample; WAR is overall accuracy (`trace / total`).
pub fn uar_war(cm: &ConfusionMatrix) -> Result<(f64, f64)> {
    let report = EvalReport::from_confusion(cm.clone())?;
    Ok((report.uar, report.war))
}

/// Full evaluation summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    /// Per-class recall; `None` for classes with no true samples.
    pub per_class_recall: Vec<Option<f64>>,
    pub uar: f64,
    pub war: f64,
}

impl EvalReport {
    pub fn from_confusion(cm: ConfusionMatrix) -> Result<Self> {
        let total = cm.total();
        if total == 0 {
            return Err(Error::EmptyEvaluation);
        }
        let mut recalls = Vec::with_capacity(cm.classes());
        let mut sum = 0.0;
        let mut present = 0usize;
        for c in 0..cm.classes() {
            let row_total: u64 = cm.row(c).iter().sum();
            if row_total == 0 {
                recalls.push(None);
            } else {
                let r = cm.get(c, c) as f64 / row_total as f64;
                recalls.push(Some(r));
                sum += r;
                present += 1;
            }
        }
        let uar = sum / present as f64;
        let war = cm.trace() as f64 / total as f64;
        Ok(Self {
            confusion: cm,
            per_class_recall: recalls,
            uar,
            war,
        })
    }

    /// Plain-text table with per-class recall and the confusion counts.
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        let c = self.confusion.classes();
        out.push_str("class  recall    ");
        for p in 0..c {
            out.push_str(&format!("pred{p:<4}"));
        }
        out.push('\n');
        for t in 0..c {
            let recall = match self.per_class_recall[t] {
                Some(r) => format!("{r:.4}"),
                None => "  -   ".to_string(),
            };
            out.push_str(&format!("{t:<6} {recall:<9} "));
            for p in 0..c {
                out.push_str(&format!("{:<8}", self.confusion.get(t, p)));
            }
            out.push('\n');
        }
        out.push_str(&format!("UAR {:.4}  WAR {:.4}\n", self.uar, self.war));
        out
    }
}

/// Mean soft label per argmax class.
///
/// Row `c` averages the soft labels of all samples whose argmax class is
/// `c`; rows with no samples are reported as `None`. Every present row sums
/// to 1 and peaks on the diagonal, since each contributing label peaks at
/// `c`.
pub fn coexistence_matrix(labels: &[&SoftLabel]) -> Result<Vec<Option<Vec<f64>>>> {
    let first = labels.first().ok_or(Error::EmptyEvaluation)?;
    let classes = first.num_classes();
    let mut sums = vec![vec![0.0f64; classes]; classes];
    let mut counts = vec![0usize; classes];
    for label in labels {
        if label.num_classes() != classes {
            return Err(Error::ShapeMismatch(
                "labels disagree on class count".into(),
            ));
        }
        let c = label.argmax();
        counts[c] += 1;
        for (acc, &p) in sums[c].iter_mut().zip(label.probs()) {
            *acc += p;
        }
    }
    Ok(sums
        .into_iter()
        .zip(counts)
        .map(|(row, n)| {
            if n == 0 {
                None
            } else {
                Some(row.into_iter().map(|s| s / n as f64).collect())
            }
        })
        .collect())
}

/// Splits samples into the clear and mixed expression groups.
///
/// Clear means the maximum soft probability strictly exceeds `threshold`;
/// the mixed group is unrestricted and contains every sample, clear ones
/// included. Returns index lists into `labels`.
pub fn split_by_ambiguity(
    labels: &[&SoftLabel],
    threshold: f64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "ambiguity threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let clear = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| l.max_prob() > threshold)
        .map(|(i, _)| i)
        .collect();
    let mixed = (0..labels.len()).collect();
    Ok((clear, mixed))
}

/// Resamples to exact per-class counts, classes taken as the argmax of
/// each label.
///
/// Down-sampling draws uniformly without replacement. Over-sampling keeps
/// one full pass of the class and draws the remainder uniformly with
/// replacement. Returns selected indices grouped by class.
pub fn resample_to_distribution(
    labels: &[&SoftLabel],
    target_counts: &[usize],
    rng: &mut RngStream,
) -> Result<Vec<usize>> {
    use rand::Rng;

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); target_counts.len()];
    for (i, label) in labels.iter().enumerate() {
        let c = label.argmax();
        if c >= target_counts.len() {
            return Err(Error::InvalidInput(format!(
                "sample {i} has argmax class {c}, beyond the {} target classes",
                target_counts.len()
            )));
        }
        by_class[c].push(i);
    }

    let mut selected = Vec::with_capacity(target_counts.iter().sum());
    for (c, (&target, pool)) in target_counts.iter().zip(&by_class).enumerate() {
        if target == 0 {
            continue;
        }
        if pool.is_empty() {
            return Err(Error::Infeasible(format!(
                "class {c}: target {target} but no source samples"
            )));
        }
        if target <= pool.len() {
            // Partial Fisher-Yates: uniform without replacement.
            let mut pool = pool.clone();
            for k in 0..target {
                let pick = rng.random_range(k..pool.len());
                pool.swap(k, pick);
                selected.push(pool[k]);
            }
        } else {
            selected.extend_from_slice(pool);
            for _ in pool.len()..target {
                selected.push(pool[rng.random_range(0..pool.len())]);
            }
        }
    }
    Ok(selected)
}
