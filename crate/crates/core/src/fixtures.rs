//! Reference data bundled with the crate.
//!
//! Dataset columns use kebab-case names: `cifar-10`, `imagenette-160`,
//! `cifar-100`, `ham10k`, `stanford-dogs` (printed as "Dogs"), `miniplaces`
//! and `indoor-67` (MIT Indoor-67).

/// 11 models × 7 datasets, top-1 accuracy in percent.
pub const ACCURACY_CSV: &str = include_str!("../fixtures/edge_accuracy.csv");

/// Architecture elements per model, `1` = present.
pub const ELEMENTS_CSV: &str = include_str!("../fixtures/elements.csv");

/// Average parameter counts in millions.
pub const PARAMS_CSV: &str = include_str!("../fixtures/params.csv");

/// Column extrema of [`ACCURACY_CSV`], frozen for scoring new models.
pub const ANCHORS: &str = include_str!("../fixtures/anchors.toml");

/// The reference four-dataset proxy subset.
pub const PROXY_DATASETS: [&str; 4] = ["imagenette-160", "cifar-100", "ham10k", "stanford-dogs"];
