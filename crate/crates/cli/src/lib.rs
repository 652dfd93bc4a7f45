//! Command-line front end for the license checker: configuration, the
//! pipeline behind each subcommand, report rendering, and the classifier
//! training routine used to produce the embedded model.

pub mod config;
pub mod pipeline;
pub mod report;
pub mod train;
