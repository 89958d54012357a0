//! Experiment harness, file formats and CLI for [`wavecast_core`].

pub mod cli;
pub mod config;
pub mod experiment;
pub mod fieldmap;
pub mod fit;
pub mod io;
