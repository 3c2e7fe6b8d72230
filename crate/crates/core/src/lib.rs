//! Model checking for alternating-time logic with knowledge and uncertainty operators.

pub mod cegm;
pub mod cli;
pub mod formula;
pub mod mcheck;
pub mod sample;
pub mod scenarios;
pub mod succinct;
pub mod translate;
