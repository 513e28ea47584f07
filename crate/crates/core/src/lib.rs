//! Political-salience auditing of search-engine and LLM outputs.
//!
//! Captured results are matched against entity or issue lexicons, mapped to
//! leaning categories, counted per category and compared with external
//! benchmarks through a battery of statistical tests.

pub mod extract;
pub mod ingest;
pub mod leaning;
pub mod model;
pub mod report;
pub mod sim;
pub mod stats;
pub mod text;
