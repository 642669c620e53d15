//! Command-line front end: file formats, the parallel search driver, and the
//! `orthoforge` commands.

#![allow(clippy::result_large_err)]

pub mod app;
pub mod format;
pub mod parallel;
