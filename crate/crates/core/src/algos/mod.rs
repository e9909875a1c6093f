//! Concrete LOCAL algorithms, each available as a centralized routine and as a [`ViewAlgorithm`](crate::sim::ViewAlgorithm).

pub mod decomp;
pub mod hier;
pub mod indep;
pub mod orient;
