//! KD-tree accelerated neighbor search between elements.

mod kdtree;
mod measure;
mod search;

pub use kdtree::KdTree;
pub use measure::{pair_distance, sample_distance, segment_distance, ProximityMeasure};
pub use search::{
    all_neighbors, build_kdtree, curve_distance, query_neighbors, NeighborIndex, NeighborList,
    NeighborQueryConfig, Strategy,
};
