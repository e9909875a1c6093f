//! LOCAL-model simulation, LCL verification and the distributed algorithms built on them.

pub mod algos;
pub mod bits;
pub mod graph;
pub mod lcl;
pub mod lll;
pub mod sim;
