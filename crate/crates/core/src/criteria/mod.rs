//! Criterion sequences and rule verdicts.

pub mod optimize;
pub mod strategy;
pub mod table;
pub mod verdict;
