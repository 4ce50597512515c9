//! DSL front-end for chowcalc: parser, program runner, and report rendering.

pub mod ast;
pub mod parser;
pub mod report;
pub mod runner;
