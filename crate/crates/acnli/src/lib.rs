//! Std side of the toolkit: case files, JSONL datasets, CSV reports, HTTP
//! scorer and chat clients, run configuration and the `acnli` command line.
//! The algorithms live in [`acnli_core`].

pub mod case_io;
pub mod chat;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod generate;
pub mod jsonl;
pub mod manifest;
pub mod report;
pub mod scorer;

pub use acnli_core as core;
pub use error::{Error, Result};
