//! Accuracy matrices, normalization anchors and model metadata.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest number of models for which per-column extrema are meaningful.
pub const MIN_MODELS: usize = 2;

/// Default parameter-count ratio above which two models are flagged as not
/// comparable.
pub const DEFAULT_RATIO_THRESHOLD: f64 = 1.5;

fn check_id(name: &str) -> Result<()> {
    if name.is_empty() || name.trim() != name {
        return Err(Error::InvalidId(name.to_string()));
    }
    Ok(())
}

macro_rules! identifier {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Result<Self> {
                let name = name.into();
                check_id(&name)?;
                Ok(Self(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = Error;

            fn try_from(value: String) -> Result<Self> {
                Self::new(value)
            }
        }

        impl TryFrom<&str> for $name {
            type Error = Error;

            fn try_from(value: &str) -> Result<Self> {
                Self::new(value)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }
    };
}

identifier!(
    /// Case-sensitive model name, unique within a matrix.
    ModelId
);
identifier!(
    /// Dataset name, unique within a matrix.
    DatasetId
);

fn check_unique<'a, T: AsRef<str> + 'a>(
    kind: &'static str,
    ids: impl IntoIterator<Item = &'a T>,
) -> Result<()> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id.as_ref()) {
            return Err(Error::Duplicate {
                kind,
                name: id.as_ref().to_string(),
            });
        }
    }
    Ok(())
}

/// Dense K×N grid of accuracy percentages, models as rows and datasets as
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyMatrix {
    label: String,
    models: Vec<ModelId>,
    datasets: Vec<DatasetId>,
    values: Vec<f64>,
    params: Vec<Option<f64>>,
}

impl AccuracyMatrix {
    /// Builds a matrix from complete rows. `rows[i][j]` is the accuracy of
    /// `models[i]` on `datasets[j]`.
    pub fn from_rows(
        models: Vec<ModelId>,
        datasets: Vec<DatasetId>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_unique("model", &models)?;
        check_unique("dataset", &datasets)?;
        if models.len() < MIN_MODELS {
            return Err(Error::TooFewModels {
                required: MIN_MODELS,
                found: models.len(),
            });
        }
        if datasets.is_empty() {
            return Err(Error::TooFewDatasets(0));
        }
        if rows.len() != models.len() {
            return Err(Error::ModelSetMismatch(format!(
                "{} model names but {} rows",
                models.len(),
                rows.len()
            )));
        }
        let mut values = Vec::with_capacity(models.len() * datasets.len());
        for (model, row) in models.iter().zip(rows) {
            if row.len() < datasets.len() {
                return Err(Error::MissingCell {
                    model: model.to_string(),
                    dataset: datasets[row.len()].to_string(),
                });
            }
            if row.len() > datasets.len() {
                return Err(Error::UnknownDataset(format!(
                    "column {} in row for {}",
                    datasets.len() + 1,
                    model
                )));
            }
            for (dataset, &value) in datasets.iter().zip(&row) {
                check_accuracy(model, dataset, value)?;
            }
            values.extend(row);
        }
        let params = vec![None; models.len()];
        Ok(Self {
            label: "matrix".to_string(),
            models,
            datasets,
            values,
            params,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Attaches parameter counts (millions). Entries for models not in the
    /// matrix are ignored.
    pub fn with_params(mut self, params: &BTreeMap<ModelId, f64>) -> Self {
        for (slot, model) in self.params.iter_mut().zip(&self.models) {
            *slot = params.get(model).copied();
        }
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn models(&self) -> &[ModelId] {
        &self.models
    }

    pub fn datasets(&self) -> &[DatasetId] {
        &self.datasets
    }

    pub fn n_models(&self) -> usize {
        self.models.len()
    }

    pub fn n_datasets(&self) -> usize {
        self.datasets.len()
    }

    pub fn value(&self, model: usize, dataset: usize) -> f64 {
        self.values[model * self.datasets.len() + dataset]
    }

    pub fn row(&self, model: usize) -> &[f64] {
        let n = self.datasets.len();
        &self.values[model * n..(model + 1) * n]
    }

    pub fn column(&self, dataset: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.models.len()).map(move |i| self.value(i, dataset))
    }

    pub fn params(&self, model: usize) -> Option<f64> {
        self.params[model]
    }

    pub fn model_index(&self, model: &str) -> Option<usize> {
        self.models.iter().position(|m| m.as_str() == model)
    }

    pub fn dataset_index(&self, dataset: &str) -> Option<usize> {
        self.datasets.iter().position(|d| d.as_str() == dataset)
    }

    /// Keeps only the given columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::TooFewDatasets(0));
        }
        let datasets: Vec<DatasetId> = columns
            .iter()
            .map(|&j| {
                self.datasets
                    .get(j)
                    .cloned()
                    .ok_or_else(|| Error::UnknownDataset(format!("column index {j}")))
            })
            .collect::<Result<_>>()?;
        check_unique("dataset", &datasets)?;
        let mut values = Vec::with_capacity(self.models.len() * columns.len());
        for i in 0..self.models.len() {
            values.extend(columns.iter().map(|&j| self.value(i, j)));
        }
        Ok(Self {
            label: self.label.clone(),
            models: self.models.clone(),
            datasets,
            values,
            params: self.params.clone(),
        })
    }

    /// Keeps only the named datasets, in the given order.
    pub fn select_datasets(&self, names: &[DatasetId]) -> Result<Self> {
        let columns = names
            .iter()
            .map(|d| {
                self.dataset_index(d.as_str())
                    .ok_or_else(|| Error::UnknownDataset(d.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        self.select_columns(&columns)
    }
}

fn check_accuracy(model: &ModelId, dataset: &DatasetId, value: f64) -> Result<()> {
    if !(0.0..=100.0).contains(&value) {
        return Err(Error::OutOfRange {
            model: model.to_string(),
            dataset: dataset.to_string(),
            value,
        });
    }
    Ok(())
}

/// Assembles a dense matrix from `(model, dataset, accuracy)` records.
///
/// Rows follow the first appearance of each model and columns the first
/// appearance of each dataset.
pub fn build_matrix<I>(
    records: I,
    params: Option<&BTreeMap<ModelId, f64>>,
) -> Result<AccuracyMatrix>
where
    I: IntoIterator<Item = (ModelId, DatasetId, f64)>,
{
    let mut models: Vec<ModelId> = Vec::new();
    let mut datasets: Vec<DatasetId> = Vec::new();
    let mut model_pos: HashMap<ModelId, usize> = HashMap::new();
    let mut dataset_pos: HashMap<DatasetId, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), f64> = HashMap::new();

    for (model, dataset, value) in records {
        check_accuracy(&model, &dataset, value)?;
        let i = *model_pos.entry(model.clone()).or_insert_with(|| {
            models.push(model.clone());
            models.len() - 1
        });
        let j = *dataset_pos.entry(dataset.clone()).or_insert_with(|| {
            datasets.push(dataset.clone());
            datasets.len() - 1
        });
        if cells.insert((i, j), value).is_some() {
            return Err(Error::DuplicateCell {
                model: model.to_string(),
                dataset: dataset.to_string(),
            });
        }
    }

    if models.len() < MIN_MODELS {
        return Err(Error::TooFewModels {
            required: MIN_MODELS,
            found: models.len(),
        });
    }

    let mut rows = Vec::with_capacity(models.len());
    for (i, model) in models.iter().enumerate() {
        let mut row = Vec::with_capacity(datasets.len());
        for (j, dataset) in datasets.iter().enumerate() {
            match cells.get(&(i, j)) {
                Some(&v) => row.push(v),
                None => {
                    return Err(Error::MissingCell {
                        model: model.to_string(),
                        dataset: dataset.to_string(),
                    })
                }
            }
        }
        rows.push(row);
    }

    let matrix = AccuracyMatrix::from_rows(models, datasets, rows)?;
    Ok(match params {
        Some(p) => matrix.with_params(p),
        None => matrix,
    })
}

/// Normalization bounds for one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub dataset: DatasetId,
    pub min: f64,
    pub max: f64,
}

impl Anchor {
    pub fn range(&self) -> f64 {
        self.max - self.min
    }
}

/// Per-dataset `(min, max)` accuracy bounds used to normalize scores,
/// optionally frozen from a reference cohort.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorTable {
    entries: Vec<Anchor>,
    source: String,
}

impl AnchorTable {
    pub fn new(entries: Vec<Anchor>, source: impl Into<String>) -> Result<Self> {
        check_unique("dataset", entries.iter().map(|a| &a.dataset))?;
        for a in &entries {
            // written so that NaN bounds are rejected too
            if a.max.partial_cmp(&a.min) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::DegenerateAnchor {
                    dataset: a.dataset.to_string(),
                    min: a.min,
                    max: a.max,
                });
            }
        }
        Ok(Self {
            entries,
            source: source.into(),
        })
    }

    pub fn entries(&self) -> &[Anchor] {
        &self.entries
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, dataset: &str) -> Option<&Anchor> {
        self.entries.iter().find(|a| a.dataset.as_str() == dataset)
    }

    pub fn datasets(&self) -> impl Iterator<Item = &DatasetId> {
        self.entries.iter().map(|a| &a.dataset)
    }

    /// Anchors for a subset of datasets, in the requested order.
    pub fn restrict(&self, datasets: &[DatasetId]) -> Result<Self> {
        let entries = datasets
            .iter()
            .map(|d| {
                self.get(d.as_str())
                    .cloned()
                    .ok_or_else(|| Error::AnchorMissing(d.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries, self.source.clone())
    }
}

/// Column-wise minimum and maximum of `matrix`.
pub fn column_extrema(matrix: &AccuracyMatrix) -> Result<AnchorTable> {
    let mut entries = Vec::with_capacity(matrix.n_datasets());
    for (j, dataset) in matrix.datasets().iter().enumerate() {
        let (min, max) = matrix
            .column(j)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        if max <= min {
            return Err(Error::DegenerateColumn {
                dataset: dataset.to_string(),
                value: min,
            });
        }
        entries.push(Anchor {
            dataset: dataset.clone(),
            min,
            max,
        });
    }
    AnchorTable::new(entries, matrix.label())
}

/// A pair of models whose parameter counts differ by more than the
/// comparability threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparabilityWarning {
    pub larger: ModelId,
    pub smaller: ModelId,
    pub ratio: f64,
}

impl fmt::Display for ComparabilityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} has {:.2}x the parameters of {}; xScore comparison may be misleading",
            self.larger, self.ratio, self.smaller
        )
    }
}

/// Flags model pairs whose parameter-count ratio (larger / smaller) exceeds
/// `ratio_threshold`. Models without metadata are skipped.
pub fn validate_comparability(
    matrix: &AccuracyMatrix,
    ratio_threshold: f64,
) -> Vec<ComparabilityWarning> {
    let known: Vec<(&ModelId, f64)> = matrix
        .models()
        .iter()
        .enumerate()
        .filter_map(|(i, m)| matrix.params(i).filter(|p| *p > 0.0).map(|p| (m, p)))
        .collect();

    let mut warnings = Vec::new();
    for (a, &(model_a, pa)) in known.iter().enumerate() {
        for &(model_b, pb) in &known[a + 1..] {
            let (larger, smaller, ratio) = if pa >= pb {
                (model_a, model_b, pa / pb)
            } else {
                (model_b, model_a, pb / pa)
            };
            if ratio > ratio_threshold {
                warnings.push(ComparabilityWarning {
                    larger: larger.clone(),
                    smaller: smaller.clone(),
                    ratio,
                });
            }
        }
    }
    warnings
}
