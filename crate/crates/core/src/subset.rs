//! Exhaustive search for a small proxy set of datasets whose xScore ranking
//! reproduces the ranking obtained from the full matrix.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{AccuracyMatrix, DatasetId};
use crate::scoring::{score_matrix, Lambda, ScoreRecord};
use crate::stats;

/// Upper bound on the number of candidate subsets a search may visit.
pub const MAX_CANDIDATES: u128 = 1_000_000;

/// How closely a subset's scores track the full-matrix scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Objective {
    #[default]
    KendallTau,
    SpearmanRho,
    PairwiseAgreement,
    ScoreMae,
}

impl Objective {
    pub const ALL: [Objective; 4] = [
        Objective::KendallTau,
        Objective::SpearmanRho,
        Objective::PairwiseAgreement,
        Objective::ScoreMae,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Objective::KendallTau => "kendall_tau",
            Objective::SpearmanRho => "spearman_rho",
            Objective::PairwiseAgreement => "pairwise_agreement",
            Objective::ScoreMae => "score_mae",
        }
    }

    pub fn maximize(self) -> bool {
        !matches!(self, Objective::ScoreMae)
    }

    /// Orders fidelity values best-first.
    fn compare(self, a: f64, b: f64) -> std::cmp::Ordering {
        if self.maximize() {
            b.total_cmp(&a)
        } else {
            a.total_cmp(&b)
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Objective::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown objective {s:?} (expected one of kendall_tau, spearman_rho, pairwise_agreement, score_mae)"
                )
            })
    }
}

/// Number of `k`-subsets of `n` items, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All `k`-subsets of `datasets`, each sorted by name, in lexicographic
/// order of the sorted name tuples.
pub fn enumerate_k_subsets(datasets: &[DatasetId], k: usize) -> Result<Vec<Vec<DatasetId>>> {
    let n = datasets.len();
    if k < 1 || k > n {
        return Err(Error::BadSubsetSize { k, n, min: 1 });
    }
    let mut sorted = datasets.to_vec();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Duplicate {
            kind: "dataset",
            name: w[0].to_string(),
        });
    }

    let mut out = Vec::with_capacity(binomial(n, k).min(MAX_CANDIDATES) as usize);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| sorted[i].clone()).collect());
        // advance the rightmost index that still has room
        let Some(pos) = (0..k).rev().find(|&p| idx[p] < n - k + p) else {
            break;
        };
        idx[pos] += 1;
        for p in pos + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
    Ok(out)
}

/// Every fidelity measure for one subset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fidelity {
    pub kendall_tau: f64,
    pub spearman_rho: f64,
    pub pairwise_agreement: f64,
    pub score_mae: f64,
}

impl Fidelity {
    pub fn get(&self, objective: Objective) -> f64 {
        match objective {
            Objective::KendallTau => self.kendall_tau,
            Objective::SpearmanRho => self.spearman_rho,
            Objective::PairwiseAgreement => self.pairwise_agreement,
            Objective::ScoreMae => self.score_mae,
        }
    }
}

fn aligned_xscores(full: &[ScoreRecord], subset: &[ScoreRecord]) -> Result<(Vec<f64>, Vec<f64>)> {
    if full.len() != subset.len() {
        return Err(Error::ModelSetMismatch(format!(
            "{} full records vs {} subset records",
            full.len(),
            subset.len()
        )));
    }
    let by_model: HashMap<&str, f64> = subset
        .iter()
        .map(|r| (r.model.as_str(), r.xscore))
        .collect();
    if by_model.len() != subset.len() {
        return Err(Error::ModelSetMismatch(
            "duplicate model in subset records".into(),
        ));
    }
    let mut xs = Vec::with_capacity(full.len());
    let mut ys = Vec::with_capacity(full.len());
    for r in full {
        let y = by_model.get(r.model.as_str()).ok_or_else(|| {
            Error::ModelSetMismatch(format!("{} missing from subset records", r.model))
        })?;
        xs.push(r.xscore);
        ys.push(*y);
    }
    if xs.len() < 2 {
        return Err(Error::TooFewModels {
            required: 2,
            found: xs.len(),
        });
    }
    Ok((xs, ys))
}

/// All four fidelity measures between two score sets over the same models.
///
/// Kendall's tau is `(concordant - discordant) / C(K, 2)` with tied pairs
/// counted as neither; Spearman's rho is `1 - 6 Σd² / (K (K² - 1))` over
/// average ranks.
pub fn fidelity(full: &[ScoreRecord], subset: &[ScoreRecord]) -> Result<Fidelity> {
    let (xs, ys) = aligned_xscores(full, subset)?;
    let k = xs.len() as f64;
    let pairs = k * (k - 1.0) / 2.0;
    let (concordant, discordant) = stats::concordance(&xs, &ys);

    let rx = stats::average_ranks(&xs);
    let ry = stats::average_ranks(&ys);
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();

    let mae = xs.iter().zip(&ys).map(|(a, b)| (a - b).abs()).sum::<f64>() / k;

    Ok(Fidelity {
        kendall_tau: (concordant as f64 - discordant as f64) / pairs,
        spearman_rho: 1.0 - 6.0 * d2 / (k * (k * k - 1.0)),
        pairwise_agreement: concordant as f64 / pairs,
        score_mae: mae,
    })
}

pub fn rank_fidelity(
    full: &[ScoreRecord],
    subset: &[ScoreRecord],
    objective: Objective,
) -> Result<f64> {
    fidelity(full, subset).map(|f| f.get(objective))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetCandidate {
    /// Sorted dataset names.
    pub datasets: Vec<DatasetId>,
    /// Scores restricted to `datasets`, in the matrix's model order.
    pub records: Vec<ScoreRecord>,
    pub fidelity: Fidelity,
}

/// Every scored candidate of one size, in canonical (lexicographic) order,
/// together with the full-matrix reference scores.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSearch {
    pub k: usize,
    pub lambda: Lambda,
    pub full: Vec<ScoreRecord>,
    pub candidates: Vec<SubsetCandidate>,
}

impl SubsetSearch {
    pub fn run(matrix: &AccuracyMatrix, k: usize, lambda: Lambda) -> Result<Self> {
        let n = matrix.n_datasets();
        if k < 2 || k > n {
            return Err(Error::BadSubsetSize { k, n, min: 2 });
        }
        let count = binomial(n, k);
        if count > MAX_CANDIDATES {
            return Err(Error::SearchTooLarge(count));
        }
        let full = score_matrix(matrix, lambda)?;
        let subsets = enumerate_k_subsets(matrix.datasets(), k)?;
        let candidates = subsets
            .into_par_iter()
            .map(|datasets| {
                // keep the matrix's column order so summation order matches the full run
                let mut columns: Vec<usize> = datasets
                    .iter()
                    .filter_map(|d| matrix.dataset_index(d.as_str()))
                    .collect();
                columns.sort_unstable();
                let restricted = matrix.select_columns(&columns)?;
                let records = score_matrix(&restricted, lambda)?;
                let fidelity = fidelity(&full, &records)?;
                Ok(SubsetCandidate {
                    datasets,
                    records,
                    fidelity,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            k,
            lambda,
            full,
            candidates,
        })
    }

    /// Candidates ordered best-first under `objective`; ties keep the
    /// canonical order, i.e. the lexicographically smallest name tuple wins.
    pub fn report(&self, objective: Objective) -> SubsetReport {
        let mut candidates = self.candidates.clone();
        candidates.sort_by(|a, b| {
            objective
                .compare(a.fidelity.get(objective), b.fidelity.get(objective))
                .then_with(|| a.datasets.cmp(&b.datasets))
        });
        SubsetReport {
            k: self.k,
            objective,
            candidates,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetReport {
    pub k: usize,
    pub objective: Objective,
    /// All `C(N, k)` candidates, best first.
    pub candidates: Vec<SubsetCandidate>,
}

impl SubsetReport {
    pub fn best(&self) -> &SubsetCandidate {
        &self.candidates[0]
    }

    /// Whether the winning subset is exactly `datasets` (in any order).
    pub fn winner_is(&self, datasets: &[DatasetId]) -> bool {
        let mut want = datasets.to_vec();
        want.sort();
        self.best().datasets == want
    }
}

pub fn select_proxy_subset(
    matrix: &AccuracyMatrix,
    k: usize,
    lambda: Lambda,
    objective: Objective,
) -> Result<SubsetReport> {
    Ok(SubsetSearch::run(matrix, k, lambda)?.report(objective))
}
