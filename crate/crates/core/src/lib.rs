//! Disk repacking: decide whether `k` unit disks can be added to a packing in a
//! rectangle while relocating at most `h` of the packed disks.

pub mod par;

pub mod geom;
pub mod io;
pub mod kernel;
pub mod hole_cover;
pub mod coloring;
pub mod blueprint;
pub mod knapsack;
pub mod pipeline;
pub mod oracle;
pub mod eptas;
pub mod gadget;
