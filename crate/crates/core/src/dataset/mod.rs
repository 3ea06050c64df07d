//! Multi-problem benchmark tables: one CSV per problem, tied together by a
//! JSON manifest.
//!
//! ```json
//! {
//!   "feature_names": ["snip", "meco"],
//!   "problems": [
//!     { "id": "nb201-cf10", "csv": "nb201-cf10.csv", "target_column": "val_acc" }
//!   ]
//! }
//! ```
//!
//! Each CSV has the header `arch_id,<feature_1>,...,<feature_d>,<target>`.
//! Targets are "higher is better"; losses must be negated before export.
//! Features are used raw, without per-problem standardization.

mod io;
mod split;

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::FeatureMatrix;

pub use io::{load_manifest, write_dataset, Manifest, ManifestProblem};
pub use split::{split_train_test, split_seed};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid manifest: {source}")]
    Manifest {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("problem `{problem}`: {path}: {source}")]
    Csv {
        problem: String,
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("problem `{problem}`: header mismatch: {detail}")]
    Header { problem: String, detail: String },
    #[error("problem `{problem}`, row {row}: duplicate arch_id `{arch_id}`")]
    DuplicateArchId {
        problem: String,
        row: usize,
        arch_id: String,
    },
    #[error("problem `{problem}`, row {row}, column `{column}`: non-finite value `{value}`")]
    NonFinite {
        problem: String,
        row: usize,
        column: String,
        value: String,
    },
    #[error("problem `{problem}`, row {row}, column `{column}`: not a number: `{value}`")]
    NotNumeric {
        problem: String,
        row: usize,
        column: String,
        value: String,
    },
    #[error("problem `{problem}`, row {row}: expected {expected} cells, found {found}")]
    RowWidth {
        problem: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid feature name `{0}` (use lowercase letters, digits and `_`)")]
    InvalidFeatureName(String),
    #[error("duplicate feature name `{0}`")]
    DuplicateFeature(String),
    #[error("dataset has no problems")]
    NoProblems,
    #[error("duplicate problem id `{0}`")]
    DuplicateProblem(String),
    #[error("problem `{problem}` has {rows} row(s); at least 2 are required")]
    TooFewRows { problem: String, rows: usize },
    #[error("train fraction {fraction} must lie strictly between 0 and 1")]
    BadFraction { fraction: f64 },
    #[error("problem `{problem}`: split leaves {train} train / {test} test rows; each side needs at least 2")]
    SplitTooSmall {
        problem: String,
        train: usize,
        test: usize,
    },
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchRecord {
    pub arch_id: String,
    pub features: Vec<f64>,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub id: String,
    pub target_name: String,
    /// Optional presentation group (e.g. a benchmark family), used by reports.
    pub group: Option<String>,
    pub rows: Vec<ArchRecord>,
}

impl Problem {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Validated multi-problem dataset. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkDataset {
    feature_names: Vec<String>,
    problems: Vec<Problem>,
}

pub(crate) fn valid_identifier(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl BenchmarkDataset {
    pub fn new(feature_names: Vec<String>, problems: Vec<Problem>) -> Result<Self, DatasetError> {
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !valid_identifier(name) {
                return Err(DatasetError::InvalidFeatureName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(DatasetError::DuplicateFeature(name.clone()));
            }
        }
        if problems.is_empty() {
            return Err(DatasetError::NoProblems);
        }
        let mut ids = HashSet::new();
        for p in &problems {
            if !ids.insert(p.id.as_str()) {
                return Err(DatasetError::DuplicateProblem(p.id.clone()));
            }
            if p.rows.len() < 2 {
                return Err(DatasetError::TooFewRows {
                    problem: p.id.clone(),
                    rows: p.rows.len(),
                });
            }
            let mut arch_ids = HashSet::new();
            for (r, rec) in p.rows.iter().enumerate() {
                if rec.features.len() != feature_names.len() {
                    return Err(DatasetError::RowWidth {
                        problem: p.id.clone(),
                        row: r + 1,
                        expected: feature_names.len(),
                        found: rec.features.len(),
                    });
                }
                if !arch_ids.insert(rec.arch_id.as_str()) {
                    return Err(DatasetError::DuplicateArchId {
                        problem: p.id.clone(),
                        row: r + 1,
                        arch_id: rec.arch_id.clone(),
                    });
                }
                let bad = rec
                    .features
                    .iter()
                    .zip(&feature_names)
                    .map(|(v, n)| (*v, n.as_str()))
                    .chain(std::iter::once((rec.target, p.target_name.as_str())))
                    .find(|(v, _)| !v.is_finite());
                if let Some((v, column)) = bad {
                    return Err(DatasetError::NonFinite {
                        problem: p.id.clone(),
                        row: r + 1,
                        column: column.to_string(),
                        value: v.to_string(),
                    });
                }
            }
        }
        Ok(BenchmarkDataset {
            feature_names,
            problems,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn problems(&self) -> &[Problem] {
        &self.problems
    }

    pub fn problem_ids(&self) -> Vec<&str> {
        self.problems.iter().map(|p| p.id.as_str()).collect()
    }

    pub fn full_view(&self) -> DatasetView<'_> {
        DatasetView {
            dataset: self,
            indices: self.problems.iter().map(|p| (0..p.len()).collect()).collect(),
            label: ViewLabel::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViewLabel {
    Train,
    Test,
    Full,
}

impl fmt::Display for ViewLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViewLabel::Train => "train",
            ViewLabel::Test => "test",
            ViewLabel::Full => "full",
        })
    }
}

impl FromStr for ViewLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(ViewLabel::Train),
            "test" => Ok(ViewLabel::Test),
            "full" => Ok(ViewLabel::Full),
            other => Err(format!("unknown view `{other}` (expected train, test or full)")),
        }
    }
}

/// Per-problem row subsets of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetView<'a> {
    dataset: &'a BenchmarkDataset,
    indices: Vec<Vec<usize>>,
    label: ViewLabel,
}

impl<'a> DatasetView<'a> {
    pub fn dataset(&self) -> &'a BenchmarkDataset {
        self.dataset
    }

    pub fn label(&self) -> ViewLabel {
        self.label
    }

    /// Row indices of problem `problem` (by position) in view order.
    pub fn indices(&self, problem: usize) -> &[usize] {
        &self.indices[problem]
    }

    /// Matrices for every problem, in dataset order.
    pub fn matrices(&self) -> Vec<ProblemMatrix> {
        (0..self.dataset.problems.len())
            .map(|i| self.matrix_at(i))
            .collect()
    }

    fn matrix_at(&self, i: usize) -> ProblemMatrix {
        let problem = &self.dataset.problems[i];
        let idx = &self.indices[i];
        let d = self.dataset.feature_names.len();
        let columns = (0..d)
            .map(|j| idx.iter().map(|&r| problem.rows[r].features[j]).collect())
            .collect();
        let features = if d == 0 {
            FeatureMatrix::empty(0)
        } else {
            FeatureMatrix::from_columns(columns).expect("columns share a length")
        };
        ProblemMatrix {
            problem_id: problem.id.clone(),
            features,
            targets: idx.iter().map(|&r| problem.rows[r].target).collect(),
            arch_ids: idx.iter().map(|&r| problem.rows[r].arch_id.clone()).collect(),
        }
    }
}

/// Feature matrix, targets and arch ids of one problem within a view.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemMatrix {
    pub problem_id: String,
    pub features: FeatureMatrix,
    pub targets: Vec<f64>,
    pub arch_ids: Vec<String>,
}

impl ProblemMatrix {
    pub fn n_rows(&self) -> usize {
        self.targets.len()
    }
}

pub fn problem_matrix(view: &DatasetView<'_>, problem_id: &str) -> Result<ProblemMatrix, DatasetError> {
    let i = view
        .dataset
        .problems
        .iter()
        .position(|p| p.id == problem_id)
        .ok_or_else(|| DatasetError::UnknownProblem(problem_id.to_string()))?;
    Ok(view.matrix_at(i))
}
