pub mod cli;
pub mod ergodic;
pub mod error;
pub mod exact;
pub mod folner;
pub mod group;
pub mod inequality;
pub mod lattice;
pub mod setops;

pub use error::{LabError, Result};
pub use group::{parse_group_dsl, GroupDescriptor, GroupElement, Rank, ZdEmbedding};
