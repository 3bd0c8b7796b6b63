pub mod alignment;
pub mod cli;
pub mod combiner;
pub mod ensemble;
pub mod error;
pub mod metrics;
pub mod report;
pub mod synthetic;
pub mod treebank;
pub mod weak_parser;

pub use error::{Error, Result};
