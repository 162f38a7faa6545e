//! Command-line front end for the `catmn` engine: a plain-text (and JSON)
//! document format for categories, functors, transformations, (co)monads
//! and fibered specs, plus the commands that verify them.

pub mod commands;
pub mod dot;
pub mod syntax;
pub mod workspace;
