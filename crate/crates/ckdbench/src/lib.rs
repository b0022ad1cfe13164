//! From-scratch classification toolkit and benchmark harness for the UCI
//! chronic kidney disease dataset: ARFF/CSV ingestion with schema
//! validation, class-conditional mean/mode imputation, one-hot encoding,
//! twelve classifiers behind one train/predict contract (CART tree,
//! linear/quadratic discriminant analysis, linear/quadratic SVM via SMO,
//! five KNN presets, and a feedforward network trained by gradient descent
//! or Levenberg-Marquardt), a 5-fold cross-validation engine, and report
//! generation as tables and SVG charts.

pub mod bench;
pub mod classifiers;
pub mod dataset;
pub mod eval;
pub mod numkernel;
pub mod preprocess;
pub mod rng;

pub use dataset::{Dataset, Schema, Summary};
pub use preprocess::{FeatureMatrix, ImputationScope};
