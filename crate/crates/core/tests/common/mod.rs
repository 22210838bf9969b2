#![allow(dead_code)]

pub mod oracle;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use xscore::analysis::{element_associations, ElementMatrix};
use xscore::io;
use xscore::matrix::column_extrema;
use xscore::scoring::{aggregate, normalize, rank, score_matrix};
use xscore::stats;
use xscore::subset::{fidelity, select_proxy_subset};
use xscore::{AccuracyMatrix, DatasetId, Lambda, ModelId, Objective, ScoreRecord};

pub const CASES: u32 = 128;

pub fn reference_matrix() -> AccuracyMatrix {
    io::parse_accuracy_table(xscore::fixtures::ACCURACY_CSV)
        .unwrap()
        .with_label("edge_accuracy")
}

pub fn ids(names: &[&str]) -> Vec<DatasetId> {
    names.iter().map(|n| DatasetId::new(*n).unwrap()).collect()
}

pub fn grid_rows(table: &AccuracyMatrix) -> Vec<Vec<f64>> {
    (0..table.n_models())
        .map(|i| table.row(i).to_vec())
        .collect()
}

/// Deterministic runner with `CASES` cases.
pub fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases: CASES,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

/// Accuracy grid with two-decimal percentages and no constant column.
pub fn grid(
    models: std::ops::RangeInclusive<usize>,
    datasets: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (models, datasets)
        .prop_flat_map(|(k, n)| {
            prop::collection::vec(
                prop::collection::vec((0u32..=10_000).prop_map(|c| c as f64 / 100.0), n),
                k,
            )
        })
        .prop_filter("constant column", |g| {
            (0..g[0].len()).all(|j| g.iter().any(|r| r[j] != g[0][j]))
        })
}

pub fn model_names(k: usize) -> Vec<ModelId> {
    (0..k)
        .map(|i| ModelId::new(format!("m{i}")).unwrap())
        .collect()
}

pub fn dataset_names(n: usize) -> Vec<DatasetId> {
    (0..n)
        .map(|j| DatasetId::new(format!("d{j}")).unwrap())
        .collect()
}

pub fn to_matrix(g: &[Vec<f64>]) -> AccuracyMatrix {
    AccuracyMatrix::from_rows(model_names(g.len()), dataset_names(g[0].len()), g.to_vec()).unwrap()
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Result<(), TestCaseError> {
    prop_assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol})");
    Ok(())
}

/// Whether all pairwise xScore gaps exceed `gap`, so rankings are stable
/// under rounding-level perturbations.
fn separated(records: &[ScoreRecord], gap: f64) -> bool {
    let mut xs: Vec<f64> = records.iter().map(|r| r.xscore).collect();
    xs.sort_by(f64::total_cmp);
    xs.windows(2).all(|w| w[1] - w[0] > gap)
}

fn records_from(xs: &[f64]) -> Vec<ScoreRecord> {
    xs.iter()
        .enumerate()
        .map(|(i, &x)| ScoreRecord {
            model: ModelId::new(format!("m{i}")).unwrap(),
            normalized_row: vec![],
            g: x,
            v: 0.0,
            xscore: x,
            rank: 0,
        })
        .collect()
}

// ---- scoring properties ---------------------------------------------------

pub fn affine_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, usize, f64, f64)> {
    grid(2..=8, 2..=7).prop_flat_map(|g| {
        let n = g[0].len();
        (Just(g), 0..n, 0.05f64..1.0).prop_flat_map(|(g, j, a)| {
            let max_b = 100.0 - a * 100.0;
            (Just(g), Just(j), Just(a), 0.0..=max_b)
        })
    })
}

pub fn prop_affine_invariance(
    (g, j, a, b): (Vec<Vec<f64>>, usize, f64, f64),
) -> Result<(), TestCaseError> {
    let mx = to_matrix(&g);
    let mut t = g.clone();
    for row in &mut t {
        row[j] = (a * row[j] + b).clamp(0.0, 100.0);
    }
    let tx = to_matrix(&t);
    let n1 = normalize(&mx, &column_extrema(&mx).unwrap()).unwrap();
    let n2 = normalize(&tx, &column_extrema(&tx).unwrap()).unwrap();
    for i in 0..g.len() {
        for (c, (x, y)) in n1.row(i).iter().zip(n2.row(i)).enumerate() {
            close(*x, *y, 1e-12, &format!("cell ({i},{c})"))?;
        }
    }
    let r1 = aggregate(&n1, Lambda::DEFAULT).unwrap();
    let r2 = aggregate(&n2, Lambda::DEFAULT).unwrap();
    for (x, y) in r1.iter().zip(&r2) {
        close(x.g, y.g, 1e-12, "G")?;
        close(x.v, y.v, 1e-12, "V")?;
        close(x.xscore, y.xscore, 1e-12, "xscore")?;
    }
    if separated(&r1, 1e-9) {
        let ranks1: Vec<usize> = r1.iter().map(|r| r.rank).collect();
        let ranks2: Vec<usize> = r2.iter().map(|r| r.rank).collect();
        prop_assert_eq!(ranks1, ranks2);
    }
    Ok(())
}

pub fn prop_self_anchoring_bounds(g: Vec<Vec<f64>>) -> Result<(), TestCaseError> {
    let mx = to_matrix(&g);
    let nm = normalize(&mx, &column_extrema(&mx).unwrap()).unwrap();
    for j in 0..mx.n_datasets() {
        let col: Vec<f64> = (0..mx.n_models()).map(|i| nm.value(i, j)).collect();
        prop_assert!(col.iter().all(|x| (0.0..=1.0).contains(x)));
        prop_assert!(col.contains(&0.0), "column {j} has no exact 0");
        prop_assert!(col.contains(&1.0), "column {j} has no exact 1");
    }
    Ok(())
}

pub fn lambda_pair_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, f64, f64)> {
    (grid(2..=8, 2..=7), 0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(g, a, b)| (g, a.min(b), a.max(b)))
}

pub fn prop_lambda_monotone((g, lo, hi): (Vec<Vec<f64>>, f64, f64)) -> Result<(), TestCaseError> {
    let mx = to_matrix(&g);
    let r_lo = score_matrix(&mx, Lambda::new(lo).unwrap()).unwrap();
    let r_hi = score_matrix(&mx, Lambda::new(hi).unwrap()).unwrap();
    for (a, b) in r_lo.iter().zip(&r_hi) {
        prop_assert!(b.xscore <= a.xscore);
        if a.v > 1e-12 && hi - lo > 1e-6 {
            prop_assert!(b.xscore < a.xscore);
        }
        prop_assert!(a.xscore <= a.g);
    }
    Ok(())
}

pub fn prop_decomposition_identity((g, lambda): (Vec<Vec<f64>>, f64)) -> Result<(), TestCaseError> {
    let lambda = Lambda::new(lambda).unwrap();
    for r in score_matrix(&to_matrix(&g), lambda).unwrap() {
        prop_assert!((r.xscore - (r.g - lambda.value() * r.v)).abs() <= 1e-12);
        prop_assert!(r.v >= 0.0);
        let all_equal = r.normalized_row.iter().all(|&x| x == r.normalized_row[0]);
        prop_assert_eq!(all_equal, r.v == 0.0);
    }
    Ok(())
}

pub fn permutation_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>, Vec<usize>)> {
    grid(2..=8, 2..=7).prop_flat_map(|g| {
        let k = g.len();
        let n = g[0].len();
        (
            Just(g),
            Just((0..k).collect::<Vec<_>>()).prop_shuffle(),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        )
    })
}

pub fn prop_permutation_invariance(
    (g, rows, cols): (Vec<Vec<f64>>, Vec<usize>, Vec<usize>),
) -> Result<(), TestCaseError> {
    let mx = to_matrix(&g);
    let models = mx.models();
    let datasets = mx.datasets();
    let permuted = AccuracyMatrix::from_rows(
        rows.iter().map(|&i| models[i].clone()).collect(),
        cols.iter().map(|&j| datasets[j].clone()).collect(),
        rows.iter()
            .map(|&i| cols.iter().map(|&j| g[i][j]).collect())
            .collect(),
    )
    .unwrap();
    let base = score_matrix(&mx, Lambda::DEFAULT).unwrap();
    let perm = score_matrix(&permuted, Lambda::DEFAULT).unwrap();
    for r in &perm {
        let b = base.iter().find(|b| b.model == r.model).unwrap();
        close(r.g, b.g, 1e-12, "G")?;
        close(r.v, b.v, 1e-12, "V")?;
        close(r.xscore, b.xscore, 1e-12, "xscore")?;
        if separated(&base, 1e-9) {
            prop_assert_eq!(r.rank, b.rank);
        }
    }
    if separated(&base, 1e-9) {
        let order =
            |rs: Vec<ScoreRecord>| rank(rs).into_iter().map(|r| r.model).collect::<Vec<_>>();
        prop_assert_eq!(order(base), order(perm));
    }
    Ok(())
}

// ---- file formats -----------------------------------------------------------

pub fn round_trip_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<Vec<bool>>, String)> {
    grid(2..=8, 1..=7).prop_flat_map(|g| {
        let k = g.len();
        (
            Just(g),
            (1usize..=6).prop_flat_map(move |e| {
                prop::collection::vec(prop::collection::vec(any::<bool>(), e), k)
            }),
            "[a-z][a-z0-9 _-]{0,12}[a-z0-9]",
        )
    })
}

pub fn prop_round_trip(
    (g, flags, label): (Vec<Vec<f64>>, Vec<Vec<bool>>, String),
) -> Result<(), TestCaseError> {
    let mx = to_matrix(&g);
    let text = io::emit_accuracy_table(&mx);
    prop_assert_eq!(io::parse_accuracy_table(&text).unwrap(), mx.clone());

    let anchors = column_extrema(&mx.clone().with_label(label)).unwrap();
    let anchor_text = io::emit_anchor_file(&anchors);
    prop_assert_eq!(io::parse_anchor_file(&anchor_text).unwrap(), anchors);

    let elements: Vec<String> = (0..flags[0].len()).map(|e| format!("e{e}")).collect();
    let em = ElementMatrix::new(model_names(g.len()), elements, flags).unwrap();
    let em_text = io::emit_element_table(&em);
    prop_assert_eq!(io::parse_element_table(&em_text).unwrap(), em);
    Ok(())
}

// ---- oracle equivalence -----------------------------------------------------

pub fn prop_oracle_scoring((g, lambda): (Vec<Vec<f64>>, f64)) -> Result<(), TestCaseError> {
    let records = score_matrix(&to_matrix(&g), Lambda::new(lambda).unwrap()).unwrap();
    let expected = oracle::scores(&g, lambda);
    for (r, e) in records.iter().zip(&expected) {
        close(r.g, e.g, 1e-9, "G")?;
        close(r.v, e.v, 1e-9, "V")?;
        close(r.xscore, e.xscore, 1e-9, "xscore")?;
    }
    Ok(())
}

/// Score pairs drawn from a coarse grid so that ties occur.
pub fn fidelity_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=12).prop_flat_map(|k| {
        let v = prop::collection::vec((0u32..=20).prop_map(|c| c as f64 / 20.0), k);
        (v.clone(), v)
    })
}

pub fn prop_oracle_fidelity((full, sub): (Vec<f64>, Vec<f64>)) -> Result<(), TestCaseError> {
    let f = fidelity(&records_from(&full), &records_from(&sub)).unwrap();
    let o = oracle::fidelity(&full, &sub);
    close(f.kendall_tau, o.kendall_tau, 1e-9, "kendall_tau")?;
    close(f.spearman_rho, o.spearman_rho, 1e-9, "spearman_rho")?;
    close(
        f.pairwise_agreement,
        o.pairwise_agreement,
        1e-9,
        "pairwise_agreement",
    )?;
    close(f.score_mae, o.score_mae, 1e-9, "score_mae")?;
    Ok(())
}

pub fn stats_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<bool>)> {
    (
        prop::collection::vec(0.0f64..100.0, 6),
        prop::collection::vec(-1.0f64..1.0, 6),
        prop::collection::vec(any::<bool>(), 6),
    )
}

pub fn prop_oracle_statistics(
    (x, y, flags): (Vec<f64>, Vec<f64>, Vec<bool>),
) -> Result<(), TestCaseError> {
    close(
        stats::pearson(&x, &y).unwrap(),
        oracle::pearson(&x, &y),
        1e-9,
        "pearson",
    )?;
    close(
        stats::spearman(&x, &y).unwrap(),
        oracle::spearman(&x, &y),
        1e-9,
        "spearman",
    )?;
    let (slope, intercept) = stats::ols(&x, &y).unwrap();
    let (os, oi) = oracle::ols(&x, &y);
    close(slope, os, 1e-9, "slope")?;
    close(intercept, oi, 1e-9, "intercept")?;

    let em = ElementMatrix::new(
        model_names(6),
        vec!["e".into()],
        flags.iter().map(|&f| vec![f]).collect(),
    )
    .unwrap();
    let a = &element_associations(&em, &records_from(&y)).unwrap()[0];
    let n_p = flags.iter().filter(|&&f| f).count();
    prop_assert_eq!(a.n_present, n_p);
    if n_p > 0 && n_p < 6 {
        let f01: Vec<f64> = flags.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect();
        close(
            a.point_biserial_r.unwrap(),
            oracle::pearson(&f01, &y),
            1e-9,
            "point-biserial",
        )?;
        let mp = y
            .iter()
            .zip(&flags)
            .filter(|(_, &f)| f)
            .map(|(v, _)| v)
            .sum::<f64>()
            / n_p as f64;
        let ma = y
            .iter()
            .zip(&flags)
            .filter(|(_, &f)| !f)
            .map(|(v, _)| v)
            .sum::<f64>()
            / (6 - n_p) as f64;
        close(a.mean_xscore_present.unwrap(), mp, 1e-9, "mean present")?;
        close(a.mean_xscore_absent.unwrap(), ma, 1e-9, "mean absent")?;
    } else {
        prop_assert!(a.point_biserial_r.is_none());
    }
    Ok(())
}

pub fn prop_oracle_subset(g: Vec<Vec<f64>>) -> Result<(), TestCaseError> {
    let mx = to_matrix(&g);
    let names: Vec<String> = mx.datasets().iter().map(|d| d.to_string()).collect();
    for objective in Objective::ALL {
        let report = select_proxy_subset(&mx, 3, Lambda::DEFAULT, objective).unwrap();
        prop_assert_eq!(report.candidates.len(), 10);
        let (want, value) = oracle::best_subset(&g, &names, 3, 0.5, objective.name());
        let got: Vec<String> = report
            .best()
            .datasets
            .iter()
            .map(|d| d.to_string())
            .collect();
        prop_assert_eq!(&got, &want, "objective {}", objective);
        close(
            report.best().fidelity.get(objective),
            value,
            1e-9,
            objective.name(),
        )?;
    }
    Ok(())
}

/// Runs one property with the deterministic runner, panicking with the
/// minimal failing input on error.
pub fn check<S, F>(name: &str, strategy: S, test: F)
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    if let Err(e) = runner().run(&strategy, test) {
        panic!("property {name} failed: {e}");
    }
}
