//! Hardness gadgets: tiles of unit disks whose free space behaves like a
//! graph, assembled along a rectilinear embedding of a planar cubic graph.

mod assemble;
pub mod capacity;
mod consts;
mod embed;
mod local;
mod node;
mod tile;
mod witness;

use thiserror::Error;

pub use assemble::{assemble_instance, assemble_layout, GadgetLayout, PlacedTile, TileCounts};
pub use consts::{dyadic_pitch, round_up, TileConstants, NODE_C};
pub use embed::{k4, parse_embedding, parse_graph, Embedding, EmbeddingEdge, Graph};
pub use local::{check_local_observation, LocalParams, LOCAL_CHECKS};
pub use tile::{build_tile, Port, Side, Tile, TileKind, Transform};
pub use witness::{forward_witness, forward_witness_for};

#[derive(Debug, Error)]
pub enum GadgetError {
    #[error("tile not constructible: {0}")]
    Constraint(String),
    #[error("invalid embedding: {0}")]
    Embedding(String),
    #[error("vertices {0} and {1} are adjacent, the set is not independent")]
    NotIndependent(usize, usize),
    #[error("local check {name} needs r <= 3, got {r}")]
    Scale { name: String, r: usize },
    #[error("unknown local check {0:?}")]
    UnknownCheck(String),
    #[error("cannot parse input: {0}")]
    Parse(String),
}
