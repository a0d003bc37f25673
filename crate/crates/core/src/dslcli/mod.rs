//! Text format for cdgas and connections, JSON reports and the `dga`
//! command line.

mod ast;
mod cli;
mod elaborate;
mod parse;
mod print;
pub mod report;

use thiserror::Error;

pub use ast::*;
pub use cli::run_cli;
pub use elaborate::{
    elaborate, expand_bases, Document, MapSpec, ModuleSpec, DEFAULT_CUTOFF, DEFAULT_WINDOW,
};
pub use parse::{parse, ParseError};
pub use print::{print, print_mod_terms, print_poly};

use crate::barhopf::BarError;
use crate::cdgacore::CdgaError;
use crate::cellconn::CellError;
use crate::minmodel::ModelError;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum DslError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("name error at {line}:{col}: {msg}")]
    Name {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("degree mismatch at {line}:{col}: {msg}")]
    DegreeMismatch {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("window: {0}")]
    Window(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Cdga(#[from] CdgaError),
    #[error(transparent)]
    Bar(#[from] BarError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cell(#[from] CellError),
}

/// Parses and elaborates in one step.
pub fn load(text: &str) -> Result<Document, DslError> {
    elaborate(&parse(text)?)
}
