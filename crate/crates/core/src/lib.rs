pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod environment;
pub mod error;
pub mod evaluation;
pub mod experiments;
pub mod network;
pub mod seeding;
pub mod svg;
pub mod theory;
pub mod training;

pub use error::{Error, Result};
