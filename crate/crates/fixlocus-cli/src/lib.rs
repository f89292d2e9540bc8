//! Command-line front end for the fixed-point component counter: a
//! diff-able instance-document format, report rendering in human and
//! machine forms, and the `fixlocus` command surface.

pub mod app;
pub mod document;
pub mod report;
pub mod wordtext;

pub use app::{run, EXIT_OK, EXIT_PARSE, EXIT_VALIDATION};
pub use document::{
    lower, parse_document, render_document, DocumentError, ImageValue, InstanceDocument,
    LowerError, Lowered,
};
pub use report::{render_rational, Report, ReportParseError, ReportRow};
pub use wordtext::{parse_word, render_word, WordParseError};
