//! Randomness extractors over explicit bit strings: distributions and
//! min-entropy, exact desk-scale verifiers on extractor graphs, random graph
//! existence trials, Toeplitz leftover hashing, weak designs, the
//! Reed–Solomon/Hadamard code, the Trevisan extractor, composition and
//! merging, and a combinatorial harness for conditional coding over
//! enumerable sets.
//!
//! Strings of at most 64 bits are frequently handled as `u64` indices, with
//! bit 0 of the string as the most significant bit, so numeric order is
//! lexicographic order.

pub mod bits;
pub mod combin;
pub mod compose;
pub mod design;
pub mod dist;
pub mod ecc;
pub mod error;
pub mod extractor;
pub mod formats;
pub mod graph;
pub mod hashext;
pub mod muchnik;
pub mod randgraph;
pub mod rational;
pub mod trevisan;

pub use bits::BitString;
pub use dist::{Dist, ExactDist, FlatSource};
pub use error::{Error, Result};
pub use extractor::Extractor;
pub use graph::BipartiteGraph;
pub use rational::Eps;
