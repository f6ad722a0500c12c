//! Outlier detection for categorical data.
//!
//! Values are nodes of a value-value graph weighted by how the presence of
//! one value influences another. A biased random walk (CBRW) or a closed-form
//! dense-subgraph walk (SDRW) turns the graph into value outlierness, which
//! then scores objects and ranks features.
//!
//! ```
//! use catout::{detect, toy, DetectorConfig, Method};
//!
//! let det = detect(&toy::dataset(), &DetectorConfig::new(Method::Cbrw)).unwrap();
//! assert_eq!(det.scores.ranking[0], 0);
//! ```

pub mod cbrw;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod factors;
pub mod pipeline;
pub mod scoring;
pub mod sdrw;
pub mod sparse;
pub mod synthetic;
pub mod toy;
pub mod value_graph;

pub use cbrw::{OutliernessVector, TransitionMatrix, WalkParams};
pub use dataset::{compute_stats, load_csv, preprocess, read_csv, CategoricalDataset, CsvOptions, FrequencyStats, LabelColumn};
pub use error::{Error, Result};
pub use evaluation::{auc, complexity_report, ComplexityReport, IndicatorParams};
pub use factors::{IntraFactor, InfluenceMatrix, LiftScaling};
pub use pipeline::{detect, select, Detection, DetectorConfig, Method, SelectionOutcome};
pub use scoring::{Engine, EngineParams, ExponentWeighting, FeatureRelevance, ObjectScores, Selection, Variant};
pub use sdrw::{PeelingResult, SdrwScoring};
pub use synthetic::{generate_synthetic, SyntheticConfig};
pub use value_graph::{Directedness, ValueGraph};
