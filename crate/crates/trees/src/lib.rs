//! Tree LCL engine: classes and types of partially labeled trees, pumping, the hierarchy of
//! imaginary trees and the O(log n) synthesis driven by a rake/compress decomposition.

pub mod canon;
pub mod checks;
pub mod engine;
pub mod extract;
pub mod hierarchy;
pub mod ptree;
pub mod synth;

use locality_core::algos::decomp::DecompError;
use thiserror::Error;

pub use engine::{ClassId, Engine, TypeId};
pub use extract::{extract_f, ExtractConfig, Extracted, RandomizedColoring};
pub use hierarchy::{build_hierarchy, build_with_rule, search_feasible, Caps, Decision, Hierarchy, LabelRule, WParam};
pub use ptree::{PartialTree, RNode};
pub use synth::{synthesize_run, SynthReport};

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("unsupported spec {0}: the tree engine handles radius-1 star rules")]
    Unsupported(String),
    #[error("sequence of {len} trees is shorter than {need}")]
    TooShort { len: usize, need: usize },
    #[error("no repeated type along the sequence")]
    NoRepeat,
    #[error("extend needs {lo} <= x <= {hi}, got {x}")]
    BadLength { x: usize, lo: usize, hi: usize },
    #[error("tree with {0} vertices is too large")]
    TooLarge(u64),
    #[error("no extension exists")]
    NoExtension,
    #[error("w = {w} is below the required {need}")]
    WTooSmall { w: usize, need: usize },
    #[error("resource cap: {0}")]
    Cap(String),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error("{0}")]
    Other(String),
}
