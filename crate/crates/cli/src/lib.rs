//! Command-line tool and HTTP service for `ermodes`.

pub mod cli;
pub mod jobs;
pub mod service;
pub mod store;
