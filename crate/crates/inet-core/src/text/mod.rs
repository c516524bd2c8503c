//! The `.inet` textual syntax: lexing, parsing and printing.

pub mod lexer;
pub mod parser;
pub mod pretty;

pub use lexer::ParseError;
pub use parser::{parse_program, ParsedProgram};
pub use pretty::{print_net, print_notation, print_program_parts};
