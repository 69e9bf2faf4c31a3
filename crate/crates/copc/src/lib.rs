//! Causal structure learning over repeated (tiered) measurements.
//!
//! The crate learns CPDAGs with the PC family of constraint-based
//! algorithms — including chronologically ordered variants (COPC) that use
//! visit times as background knowledge — and estimates lower bounds of the
//! causal effects of continuous covariates on a binary outcome via local
//! IDA with Firth-penalized logistic regression. Covariates are ranked by
//! stability selection over subsample runs with a per-comparison error
//! rate bound, and a simulation harness compares the PC and COPC variants
//! on synthetic tiered data.
//!
//! Start with the runnable examples (`cargo run --example learn_cpdag`),
//! or the `copc` binary for file-based workflows.

pub mod citest;
pub mod cli;
pub mod data;
pub mod error;
pub mod firth;
pub mod graph;
pub mod ida;
pub mod manifest;
pub mod pc;
pub mod seeds;
pub mod sim;
pub mod stability;
