//! Text formats, the bundled dataset and on-disk stores.
pub mod dataset;
pub mod dot;
pub mod store;
pub mod text;

pub use text::{parse, serialize, OpbFile, ParseError, Style, Token};
