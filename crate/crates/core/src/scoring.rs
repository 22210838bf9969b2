//! Min–max normalization, per-model mean/variance and the xScore ranking.
//!
//! For model `i` and dataset `j` the normalized accuracy is
//! `(A[i][j] - min_j) / (max_j - min_j)`. A model's `G` is the mean of its
//! normalized row, `V` the sample variance (divisor `N - 1`) and
//! `xscore = G - lambda * V`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::{column_extrema, AccuracyMatrix, AnchorTable, DatasetId, ModelId};

/// Variance penalty weight, constrained to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Lambda(f64);

impl Lambda {
    pub const DEFAULT: Lambda = Lambda(0.5);

    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidLambda(value));
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Lambda {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Accuracy matrix mapped through a set of anchors. Values are not clipped,
/// so externally anchored models can land outside `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedMatrix {
    models: Vec<ModelId>,
    datasets: Vec<DatasetId>,
    values: Vec<f64>,
    anchors: AnchorTable,
}

impl NormalizedMatrix {
    pub fn models(&self) -> &[ModelId] {
        &self.models
    }

    pub fn datasets(&self) -> &[DatasetId] {
        &self.datasets
    }

    pub fn anchors(&self) -> &AnchorTable {
        &self.anchors
    }

    pub fn value(&self, model: usize, dataset: usize) -> f64 {
        self.values[model * self.datasets.len() + dataset]
    }

    pub fn row(&self, model: usize) -> &[f64] {
        let n = self.datasets.len();
        &self.values[model * n..(model + 1) * n]
    }
}

/// Per-model aggregate scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub model: ModelId,
    pub normalized_row: Vec<f64>,
    /// Mean of the normalized row.
    pub g: f64,
    /// Sample variance of the normalized row.
    pub v: f64,
    pub xscore: f64,
    /// 1-based position in the ranking; 0 until ranks are assigned.
    pub rank: usize,
}

impl ScoreRecord {
    fn from_row(model: ModelId, row: Vec<f64>, lambda: Lambda) -> Result<Self> {
        let n = row.len();
        if n < 2 {
            return Err(Error::TooFewDatasets(n));
        }
        let mut sum = 0.0;
        for &x in &row {
            sum += x;
        }
        let g = sum / n as f64;
        let mut ss = 0.0;
        for &x in &row {
            ss += (x - g) * (x - g);
        }
        let v = ss / (n - 1) as f64;
        Ok(Self {
            model,
            normalized_row: row,
            g,
            v,
            xscore: g - lambda.value() * v,
            rank: 0,
        })
    }
}

/// Applies the anchors to every cell of `matrix`.
pub fn normalize(matrix: &AccuracyMatrix, anchors: &AnchorTable) -> Result<NormalizedMatrix> {
    let mut bounds = Vec::with_capacity(matrix.n_datasets());
    for dataset in matrix.datasets() {
        let anchor = anchors
            .get(dataset.as_str())
            .ok_or_else(|| Error::AnchorMissing(dataset.to_string()))?;
        if anchor.max.partial_cmp(&anchor.min) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::DegenerateAnchor {
                dataset: dataset.to_string(),
                min: anchor.min,
                max: anchor.max,
            });
        }
        bounds.push((anchor.min, anchor.range()));
    }

    let mut values = Vec::with_capacity(matrix.n_models() * matrix.n_datasets());
    for i in 0..matrix.n_models() {
        values.extend(
            matrix
                .row(i)
                .iter()
                .zip(&bounds)
                .map(|(&a, &(min, range))| (a - min) / range),
        );
    }
    let anchors = anchors.restrict(matrix.datasets())?;
    Ok(NormalizedMatrix {
        models: matrix.models().to_vec(),
        datasets: matrix.datasets().to_vec(),
        values,
        anchors,
    })
}

/// Computes `G`, `V` and xScore for every model. Records come back in the
/// matrix's model order with ranks filled in.
pub fn aggregate(normalized: &NormalizedMatrix, lambda: Lambda) -> Result<Vec<ScoreRecord>> {
    let n = normalized.datasets.len();
    if n < 2 {
        return Err(Error::TooFewDatasets(n));
    }
    let mut records = normalized
        .models
        .iter()
        .enumerate()
        .map(|(i, m)| ScoreRecord::from_row(m.clone(), normalized.row(i).to_vec(), lambda))
        .collect::<Result<Vec<_>>>()?;
    assign_ranks(&mut records);
    Ok(records)
}

/// Self-anchored scoring: anchors are the matrix's own column extrema.
pub fn score_matrix(matrix: &AccuracyMatrix, lambda: Lambda) -> Result<Vec<ScoreRecord>> {
    let anchors = column_extrema(matrix)?;
    aggregate(&normalize(matrix, &anchors)?, lambda)
}

/// Descending xScore, then descending `G`, then ascending model name.
pub fn ranking_order(a: &ScoreRecord, b: &ScoreRecord) -> Ordering {
    b.xscore
        .total_cmp(&a.xscore)
        .then_with(|| b.g.total_cmp(&a.g))
        .then_with(|| a.model.cmp(&b.model))
}

/// Fills `rank` in place without reordering.
pub fn assign_ranks(records: &mut [ScoreRecord]) {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| ranking_order(&records[a], &records[b]));
    for (pos, idx) in order.into_iter().enumerate() {
        records[idx].rank = pos + 1;
    }
}

/// Sorts records best-first and numbers them `1..=K`.
pub fn rank(mut records: Vec<ScoreRecord>) -> Vec<ScoreRecord> {
    records.sort_by(ranking_order);
    for (pos, r) in records.iter_mut().enumerate() {
        r.rank = pos + 1;
    }
    records
}

/// A normalized cell that fell outside `[0, 1]` under frozen anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct Exceedance {
    pub dataset: DatasetId,
    pub accuracy: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchoredScore {
    pub record: ScoreRecord,
    /// Datasets in anchor order whose normalized value is outside `[0, 1]`.
    pub exceedances: Vec<Exceedance>,
}

impl AnchoredScore {
    pub fn out_of_range(&self) -> bool {
        !self.exceedances.is_empty()
    }
}

/// Scores a model outside the reference cohort against frozen anchors.
///
/// The model must report an accuracy for every anchored dataset and for no
/// other dataset. Columns are taken in anchor order.
pub fn score_against_anchors(
    model: ModelId,
    accuracies: &BTreeMap<DatasetId, f64>,
    anchors: &AnchorTable,
    lambda: Lambda,
) -> Result<AnchoredScore> {
    if let Some(extra) = accuracies
        .keys()
        .find(|d| anchors.get(d.as_str()).is_none())
    {
        return Err(Error::AnchorMissing(extra.to_string()));
    }
    if anchors.len() < 2 {
        return Err(Error::TooFewDatasets(anchors.len()));
    }
    let mut row = Vec::with_capacity(anchors.len());
    let mut exceedances = Vec::new();
    for anchor in anchors.entries() {
        let accuracy = *accuracies
            .get(&anchor.dataset)
            .ok_or_else(|| Error::MissingCell {
                model: model.to_string(),
                dataset: anchor.dataset.to_string(),
            })?;
        if !(0.0..=100.0).contains(&accuracy) {
            return Err(Error::OutOfRange {
                model: model.to_string(),
                dataset: anchor.dataset.to_string(),
                value: accuracy,
            });
        }
        let normalized = (accuracy - anchor.min) / anchor.range();
        if !(0.0..=1.0).contains(&normalized) {
            exceedances.push(Exceedance {
                dataset: anchor.dataset.clone(),
                accuracy,
                normalized,
            });
        }
        row.push(normalized);
    }
    let mut record = ScoreRecord::from_row(model, row, lambda)?;
    record.rank = 1;
    Ok(AnchoredScore {
        record,
        exceedances,
    })
}
