use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use xscore::analysis::{correlate_accuracy_vs_xscore, element_associations};
use xscore::io::{self, Format};
use xscore::matrix::{column_extrema, validate_comparability, DEFAULT_RATIO_THRESHOLD};
use xscore::scoring::{aggregate, normalize, rank, score_against_anchors, score_matrix};
use xscore::subset::SubsetSearch;
use xscore::{fixtures, report, AccuracyMatrix, DatasetId, Error, Lambda, Objective, Result};

#[derive(Parser)]
#[command(name = "xscore", version, about = "Cross-dataset robustness scoring")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive per-dataset anchors from an accuracy matrix and save them.
    Anchors {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Provenance label stored in the file (defaults to the matrix file stem).
        #[arg(long)]
        source: Option<String>,
    },
    /// Score and rank every model of a matrix.
    Score {
        #[arg(long)]
        matrix: PathBuf,
        /// Frozen anchors; defaults to the matrix's own column extrema.
        #[arg(long)]
        anchors: Option<PathBuf>,
        #[arg(long, default_value_t = Lambda::DEFAULT.value(), allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value = "markdown")]
        format: Format,
        /// CSV of `model,params_m` used for comparability warnings.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_RATIO_THRESHOLD)]
        ratio_threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score models outside the reference cohort against frozen anchors.
    NewModel {
        /// Accuracy CSV with one or more model rows.
        #[arg(long)]
        accuracies: PathBuf,
        #[arg(long)]
        anchors: PathBuf,
        /// Restrict scoring to these datasets (comma separated).
        #[arg(long, value_delimiter = ',')]
        datasets: Option<Vec<String>>,
        #[arg(long, default_value_t = Lambda::DEFAULT.value(), allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively search k-dataset subsets that reproduce the full ranking.
    SelectSubset {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "kendall_tau")]
        objective: Objective,
        #[arg(long, default_value_t = Lambda::DEFAULT.value(), allow_negative_numbers = true)]
        lambda: f64,
        /// Subset to compare against each objective's winner (comma separated).
        #[arg(long, value_delimiter = ',')]
        reference: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlate one dataset's accuracy with xScore.
    Correlate {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value_t = Lambda::DEFAULT.value(), allow_negative_numbers = true)]
        lambda: f64,
        /// Write the scatter plot here as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Associate architecture elements with xScore.
    Elements {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        elements: PathBuf,
        #[arg(long, default_value_t = Lambda::DEFAULT.value(), allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(
        || "matrix".to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn load_matrix(path: &Path) -> Result<AccuracyMatrix> {
    Ok(io::parse_accuracy_table(&read(path)?)?.with_label(stem(path)))
}

fn dataset_ids(names: &[String]) -> Result<Vec<DatasetId>> {
    names.iter().map(|n| DatasetId::new(n.trim())).collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Anchors {
            matrix,
            out,
            source,
        } => {
            let mut mx = load_matrix(&matrix)?;
            if let Some(source) = source {
                mx = mx.with_label(source);
            }
            write(Some(&out), &io::emit_anchor_file(&column_extrema(&mx)?))
        }
        Command::Score {
            matrix,
            anchors,
            lambda,
            format,
            params,
            ratio_threshold,
            out,
        } => {
            let lambda = Lambda::new(lambda)?;
            let mut mx = load_matrix(&matrix)?;
            if let Some(p) = params {
                mx = mx.with_params(&io::parse_params_table(&read(&p)?)?);
                for w in validate_comparability(&mx, ratio_threshold) {
                    eprintln!("warning: {w}");
                }
            }
            let records = match anchors {
                Some(a) => {
                    let anchors = io::parse_anchor_file(&read(&a)?)?;
                    aggregate(&normalize(&mx, &anchors)?, lambda)?
                }
                None => score_matrix(&mx, lambda)?,
            };
            let text = io::emit_leaderboard(&rank(records), mx.datasets(), format);
            write(out.as_deref(), &text)
        }
        Command::NewModel {
            accuracies,
            anchors,
            datasets,
            lambda,
            out,
        } => {
            let lambda = Lambda::new(lambda)?;
            let mut anchors = io::parse_anchor_file(&read(&anchors)?)?;
            if let Some(names) = &datasets {
                anchors = anchors.restrict(&dataset_ids(names)?)?;
            }
            let (columns, rows) = io::parse_accuracy_rows(&read(&accuracies)?)?;
            let mut scores = Vec::with_capacity(rows.len());
            for (model, values) in rows {
                let acc: BTreeMap<DatasetId, f64> = columns
                    .iter()
                    .cloned()
                    .zip(values)
                    .filter(|(d, _)| datasets.is_none() || anchors.get(d.as_str()).is_some())
                    .collect();
                let s = score_against_anchors(model, &acc, &anchors, lambda)?;
                for e in &s.exceedances {
                    eprintln!(
                        "warning: {} on {} normalizes to {:.4}, outside the anchor range",
                        s.record.model, e.dataset, e.normalized
                    );
                }
                scores.push(s);
            }
            write(out.as_deref(), &report::render_anchored(&scores, &anchors))
        }
        Command::SelectSubset {
            matrix,
            k,
            objective,
            lambda,
            reference,
            out,
        } => {
            let lambda = Lambda::new(lambda)?;
            let mx = load_matrix(&matrix)?;
            let reference = match reference {
                Some(names) => dataset_ids(&names)?,
                None => dataset_ids(&fixtures::PROXY_DATASETS.map(String::from))?,
            };
            let search = SubsetSearch::run(&mx, k, lambda)?;
            let text = report::render_subset_search(&search, objective, Some(&reference));
            write(out.as_deref(), &text)
        }
        Command::Correlate {
            matrix,
            dataset,
            lambda,
            svg,
            out,
        } => {
            let lambda = Lambda::new(lambda)?;
            let mx = load_matrix(&matrix)?;
            let records = score_matrix(&mx, lambda)?;
            let corr = correlate_accuracy_vs_xscore(&mx, &records, &dataset)?;
            if let Some(svg) = svg {
                write(Some(&svg), &io::emit_scatter(&corr))?;
            }
            write(out.as_deref(), &report::render_correlation(&corr))
        }
        Command::Elements {
            matrix,
            elements,
            lambda,
            out,
        } => {
            let lambda = Lambda::new(lambda)?;
            let mx = load_matrix(&matrix)?;
            let em = io::parse_element_table(&read(&elements)?)?;
            let records = score_matrix(&mx, lambda)?;
            let assoc = element_associations(&em, &records)?;
            write(out.as_deref(), &report::render_elements(&assoc))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
