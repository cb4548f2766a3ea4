//! Library surface of the command-line tool: CSV emission, single-bound
//! evaluation by name, and the figure sweep presets.

pub mod csv;
pub mod eval;
pub mod sweeps;
