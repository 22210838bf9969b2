//! Cross-dataset robustness scoring for model × dataset accuracy matrices.
//!
//! Accuracies are min–max normalized per dataset, summarized per model by
//! the mean `G` and sample variance `V` of the normalized row, and combined
//! as `xscore = G - lambda * V`. On top of that the crate provides frozen
//! anchors for scoring models outside the reference cohort, an exhaustive
//! proxy-subset search, and correlation/association statistics.
//!
//! ```
//! use xscore::{fixtures, io, scoring};
//!
//! let matrix = io::parse_accuracy_table(fixtures::ACCURACY_CSV).unwrap();
//! let ranked = scoring::rank(scoring::score_matrix(&matrix, scoring::Lambda::DEFAULT).unwrap());
//! assert_eq!(ranked[0].model.as_str(), "EfficientNet");
//! ```

pub mod analysis;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod matrix;
pub mod report;
pub mod scoring;
pub mod stats;
pub mod subset;

pub use error::{Error, Result};
pub use matrix::{AccuracyMatrix, Anchor, AnchorTable, DatasetId, ModelId};
pub use scoring::{Lambda, ScoreRecord};
pub use subset::Objective;
