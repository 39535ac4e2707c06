//! Adversary strategies and a verification harness for the on-line chain
//! partitioning game.

pub mod adversary;
pub mod arena;
pub mod builder;
pub mod order;
pub mod partition;
pub mod partitioner;
pub mod poset;
pub mod width;

pub use order::{intersect, verify_realizer, LinearOrder, Realizer};
pub use partition::{ChainPartition, ChainViolation, Color};
pub use poset::{ElementId, Poset, PosetError, Relatedness};
