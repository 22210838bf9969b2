//! Markdown reports for the subset search, anchored scoring, correlation
//! and element association commands. Every renderer is a pure function of
//! its input.

use std::fmt::Write as _;

use crate::analysis::{CorrelationReport, ElementAssociation};
use crate::io::fmt3;
use crate::matrix::{AnchorTable, DatasetId};
use crate::scoring::AnchoredScore;
use crate::subset::{Objective, SubsetSearch};

fn join(ds: &[DatasetId]) -> String {
    ds.iter()
        .map(DatasetId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Summary of the best subset per objective followed by the full candidate
/// table ordered under `primary`.
pub fn render_subset_search(
    search: &SubsetSearch,
    primary: Objective,
    reference: Option<&[DatasetId]>,
) -> String {
    let mut out = String::new();
    writeln!(out, "# Proxy subset search\n").unwrap();
    writeln!(out, "- subset size k: {}", search.k).unwrap();
    writeln!(out, "- lambda: {}", search.lambda.value()).unwrap();
    writeln!(out, "- candidates evaluated: {}", search.candidates.len()).unwrap();
    writeln!(out, "- primary objective: {primary}").unwrap();
    writeln!(
        out,
        "- kendall_tau and pairwise_agreement count tied pairs as neither concordant nor discordant"
    )
    .unwrap();
    writeln!(
        out,
        "- spearman_rho = 1 - 6 sum(d^2) / (K (K^2 - 1)) over average ranks"
    )
    .unwrap();
    writeln!(
        out,
        "- ties in fidelity go to the lexicographically smallest dataset tuple"
    )
    .unwrap();

    let mut reference_sorted = reference.map(|r| {
        let mut r = r.to_vec();
        r.sort();
        r
    });
    let reference_candidate = reference_sorted
        .as_ref()
        .and_then(|r| search.candidates.iter().find(|c| &c.datasets == r));
    if reference_sorted.is_some() && reference_candidate.is_none() {
        reference_sorted = None;
    }
    if let Some(r) = &reference_sorted {
        writeln!(out, "- reference subset: {}", join(r)).unwrap();
    }

    writeln!(out, "\n## Winners\n").unwrap();
    if reference_candidate.is_some() {
        writeln!(
            out,
            "| objective | direction | best subset | value | reference value | reference wins |"
        )
        .unwrap();
        writeln!(out, "|:---|:---|:---|---:|---:|:---|").unwrap();
    } else {
        writeln!(out, "| objective | direction | best subset | value |").unwrap();
        writeln!(out, "|:---|:---|:---|---:|").unwrap();
    }
    for objective in Objective::ALL {
        let report = search.report(objective);
        let best = report.best();
        let direction = if objective.maximize() { "max" } else { "min" };
        write!(
            out,
            "| {objective} | {direction} | {} | {} |",
            join(&best.datasets),
            fmt6(best.fidelity.get(objective))
        )
        .unwrap();
        if let (Some(rc), Some(r)) = (reference_candidate, &reference_sorted) {
            let value = rc.fidelity.get(objective);
            let wins = if report.winner_is(r) {
                "yes"
            } else if value == best.fidelity.get(objective) {
                "tied, lost tie-break"
            } else {
                "no"
            };
            write!(out, " {} | {wins} |", fmt6(value)).unwrap();
        }
        out.push('\n');
    }

    writeln!(out, "\n## Candidates by {primary}\n").unwrap();
    writeln!(
        out,
        "| # | datasets | kendall_tau | spearman_rho | pairwise_agreement | score_mae |"
    )
    .unwrap();
    writeln!(out, "|---:|:---|---:|---:|---:|---:|").unwrap();
    for (i, c) in search.report(primary).candidates.iter().enumerate() {
        writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} |",
            i + 1,
            join(&c.datasets),
            fmt6(c.fidelity.kendall_tau),
            fmt6(c.fidelity.spearman_rho),
            fmt6(c.fidelity.pairwise_agreement),
            fmt6(c.fidelity.score_mae)
        )
        .unwrap();
    }
    out
}

/// Table of models scored against frozen anchors. Cells outside `[0, 1]`
/// are marked with `*` and listed under the table.
pub fn render_anchored(scores: &[AnchoredScore], anchors: &AnchorTable) -> String {
    let mut out = String::new();
    writeln!(out, "anchors: {}\n", anchors.source()).unwrap();
    let mut header = vec!["Model".to_string()];
    header.extend(anchors.datasets().map(|d| d.to_string()));
    header.extend(["G".into(), "V".into(), "xScore".into()]);
    writeln!(out, "| {} |", header.join(" | ")).unwrap();
    let align: Vec<&str> = (0..header.len())
        .map(|c| if c == 0 { ":---" } else { "---:" })
        .collect();
    writeln!(out, "|{}|", align.join("|")).unwrap();
    for s in scores {
        let r = &s.record;
        let mut cells = vec![r.model.to_string()];
        cells.extend(r.normalized_row.iter().map(|&x| {
            if (0.0..=1.0).contains(&x) {
                fmt3(x)
            } else {
                format!("{}*", fmt3(x))
            }
        }));
        cells.extend([fmt3(r.g), fmt3(r.v), fmt3(r.xscore)]);
        writeln!(out, "| {} |", cells.join(" | ")).unwrap();
    }
    let flagged: Vec<_> = scores
        .iter()
        .flat_map(|s| s.exceedances.iter().map(move |e| (&s.record.model, e)))
        .collect();
    if !flagged.is_empty() {
        writeln!(out, "\nOutside the anchor range (not clipped):").unwrap();
        for (model, e) in flagged {
            writeln!(
                out,
                "- {model} on {}: accuracy {} -> normalized {:.4}",
                e.dataset, e.accuracy, e.normalized
            )
            .unwrap();
        }
    }
    out
}

pub fn render_correlation(report: &CorrelationReport) -> String {
    let mut out = String::new();
    writeln!(out, "# {} accuracy vs xScore\n", report.dataset).unwrap();
    writeln!(out, "- n: {}", report.n).unwrap();
    writeln!(out, "- pearson_r: {}", fmt6(report.pearson_r)).unwrap();
    writeln!(
        out,
        "- spearman_rho: {} (average ranks for ties)",
        fmt6(report.spearman_rho)
    )
    .unwrap();
    writeln!(
        out,
        "- ols: xscore = {} * accuracy + {}",
        fmt6(report.ols_slope),
        fmt6(report.ols_intercept)
    )
    .unwrap();
    writeln!(out, "\n| Model | accuracy | xScore |").unwrap();
    writeln!(out, "|:---|---:|---:|").unwrap();
    for (acc, xs, model) in &report.points {
        writeln!(out, "| {model} | {acc:.2} | {} |", fmt3(*xs)).unwrap();
    }
    out
}

pub fn render_elements(assocs: &[ElementAssociation]) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), fmt3);
    let mut out = String::new();
    writeln!(
        out,
        "| element | present | absent | mean xScore present | mean xScore absent | difference | point-biserial r |"
    )
    .unwrap();
    writeln!(out, "|:---|---:|---:|---:|---:|---:|---:|").unwrap();
    for a in assocs {
        writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} |",
            a.element,
            a.n_present,
            a.n_absent,
            opt(a.mean_xscore_present),
            opt(a.mean_xscore_absent),
            opt(a.difference),
            opt(a.point_biserial_r)
        )
        .unwrap();
    }
    out
}
