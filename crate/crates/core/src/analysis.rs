//! Single-dataset accuracy vs xScore correlation, and association between
//! binary architecture elements and xScore.
//!
//! Spearman's rho here is the Pearson correlation of average ranks, which
//! stays exact in the presence of ties. Only effect sizes are reported.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::matrix::{AccuracyMatrix, DatasetId, ModelId};
use crate::scoring::ScoreRecord;
use crate::stats;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub dataset: DatasetId,
    pub pearson_r: f64,
    pub spearman_rho: f64,
    /// xScore units per accuracy percentage point.
    pub ols_slope: f64,
    pub ols_intercept: f64,
    pub n: usize,
    /// `(accuracy, xscore, model)` in matrix order.
    pub points: Vec<(f64, f64, ModelId)>,
}

fn xscores_in_order(models: &[ModelId], records: &[ScoreRecord]) -> Result<Vec<f64>> {
    if records.len() != models.len() {
        return Err(Error::ModelSetMismatch(format!(
            "{} models but {} score records",
            models.len(),
            records.len()
        )));
    }
    let by_model: HashMap<&str, f64> = records
        .iter()
        .map(|r| (r.model.as_str(), r.xscore))
        .collect();
    models
        .iter()
        .map(|m| {
            by_model
                .get(m.as_str())
                .copied()
                .ok_or_else(|| Error::ModelSetMismatch(format!("no score record for {m}")))
        })
        .collect()
}

/// Correlates one dataset's accuracy column with xScore and fits
/// `xscore = slope * accuracy + intercept`.
pub fn correlate_accuracy_vs_xscore(
    matrix: &AccuracyMatrix,
    records: &[ScoreRecord],
    dataset: &str,
) -> Result<CorrelationReport> {
    let j = matrix
        .dataset_index(dataset)
        .ok_or_else(|| Error::UnknownDataset(dataset.to_string()))?;
    let n = matrix.n_models();
    if n < 3 {
        return Err(Error::TooFewModels {
            required: 3,
            found: n,
        });
    }
    let acc: Vec<f64> = matrix.column(j).collect();
    let xs = xscores_in_order(matrix.models(), records)?;

    let pearson_r = stats::pearson(&acc, &xs).ok_or_else(|| constant_series(&acc))?;
    let spearman_rho = stats::spearman(&acc, &xs).ok_or_else(|| constant_series(&acc))?;
    let (ols_slope, ols_intercept) =
        stats::ols(&acc, &xs).ok_or(Error::ConstantVariable("accuracy"))?;

    let points = acc
        .iter()
        .zip(&xs)
        .zip(matrix.models())
        .map(|((&a, &x), m)| (a, x, m.clone()))
        .collect();
    Ok(CorrelationReport {
        dataset: matrix.datasets()[j].clone(),
        pearson_r,
        spearman_rho,
        ols_slope,
        ols_intercept,
        n,
        points,
    })
}

fn constant_series(acc: &[f64]) -> Error {
    if acc.iter().all(|&a| a == acc[0]) {
        Error::ConstantVariable("accuracy")
    } else {
        Error::ConstantVariable("xscore")
    }
}

/// Models × architecture elements presence grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrix {
    models: Vec<ModelId>,
    elements: Vec<String>,
    flags: Vec<bool>,
}

impl ElementMatrix {
    pub fn new(models: Vec<ModelId>, elements: Vec<String>, rows: Vec<Vec<bool>>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for m in &models {
            if !seen.insert(m.as_str()) {
                return Err(Error::Duplicate {
                    kind: "model",
                    name: m.to_string(),
                });
            }
        }
        let mut seen = std::collections::HashSet::new();
        for e in &elements {
            if e.is_empty() || e.trim() != e {
                return Err(Error::InvalidId(e.clone()));
            }
            if !seen.insert(e.as_str()) {
                return Err(Error::Duplicate {
                    kind: "element",
                    name: e.clone(),
                });
            }
        }
        if rows.len() != models.len() {
            return Err(Error::ModelSetMismatch(format!(
                "{} model names but {} rows",
                models.len(),
                rows.len()
            )));
        }
        let mut flags = Vec::with_capacity(models.len() * elements.len());
        for (m, row) in models.iter().zip(rows) {
            if row.len() != elements.len() {
                return Err(Error::MissingCell {
                    model: m.to_string(),
                    dataset: format!("element row of length {}", row.len()),
                });
            }
            flags.extend(row);
        }
        Ok(Self {
            models,
            elements,
            flags,
        })
    }

    pub fn models(&self) -> &[ModelId] {
        &self.models
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn flag(&self, model: usize, element: usize) -> bool {
        self.flags[model * self.elements.len() + element]
    }

    /// Same grid with present/absent swapped for one element.
    pub fn with_inverted(&self, element: usize) -> Self {
        let mut out = self.clone();
        let e = self.elements.len();
        for i in 0..self.models.len() {
            out.flags[i * e + element] = !out.flags[i * e + element];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementAssociation {
    pub element: String,
    pub n_present: usize,
    pub n_absent: usize,
    pub mean_xscore_present: Option<f64>,
    pub mean_xscore_absent: Option<f64>,
    /// Present minus absent.
    pub difference: Option<f64>,
    /// `None` when one group is empty or all xScores are equal.
    pub point_biserial_r: Option<f64>,
}

/// Group means and point-biserial correlation of each element's presence
/// with xScore, in element order.
///
/// The correlation uses `(M1 - M0) / s * sqrt(p * q)` with `s` the
/// population standard deviation of xScore, which equals the Pearson
/// correlation of the 0/1 flag against xScore.
pub fn element_associations(
    elements: &ElementMatrix,
    records: &[ScoreRecord],
) -> Result<Vec<ElementAssociation>> {
    let xs = xscores_in_order(elements.models(), records)?;
    let k = xs.len() as f64;
    let mean_all = stats::mean(&xs);
    let sd = (xs
        .iter()
        .map(|x| (x - mean_all) * (x - mean_all))
        .sum::<f64>()
        / k)
        .sqrt();

    let mut out = Vec::with_capacity(elements.elements().len());
    for (e, name) in elements.elements().iter().enumerate() {
        let (mut sum_p, mut n_p, mut sum_a, mut n_a) = (0.0, 0usize, 0.0, 0usize);
        for (i, &x) in xs.iter().enumerate() {
            if elements.flag(i, e) {
                sum_p += x;
                n_p += 1;
            } else {
                sum_a += x;
                n_a += 1;
            }
        }
        let mean_p = (n_p > 0).then(|| sum_p / n_p as f64);
        let mean_a = (n_a > 0).then(|| sum_a / n_a as f64);
        let difference = mean_p.zip(mean_a).map(|(p, a)| p - a);
        let point_biserial_r = difference.filter(|_| sd > 0.0).map(|diff| {
            let p = n_p as f64 / k;
            let q = n_a as f64 / k;
            (diff / sd * (p * q).sqrt()).clamp(-1.0, 1.0)
        });
        out.push(ElementAssociation {
            element: name.clone(),
            n_present: n_p,
            n_absent: n_a,
            mean_xscore_present: mean_p,
            mean_xscore_absent: mean_a,
            difference,
            point_biserial_r,
        });
    }
    Ok(out)
}
