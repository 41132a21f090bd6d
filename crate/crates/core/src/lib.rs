//! Contour, join and split trees of piecewise-linear scalar fields on
//! triangulated terrains.
//!
//! The main pipeline ([`assembly::compute_contour_tree`]) unfolds
//! multi-saddles, partitions the terrain into extremum-dominant pieces by
//! alternating-direction raining, builds each piece's join tree by paint
//! spilling with binomial heaps, and glues the per-piece contour trees back
//! together. [`baseline`] holds the sort-based reference algorithms and a
//! brute-force level-set oracle.

pub mod error;
pub mod order;
pub mod mesh;
pub mod critical;
pub mod fixtures;
pub mod heap;
pub mod union_find;
pub mod tree;
pub mod painted_join;
pub mod baseline;
pub mod rain;
pub mod assembly;
pub mod decomp;
pub mod lbgen;

pub use error::{Error, Result};
pub use mesh::{load_mesh, parse_input, Input, ScalarMesh};
pub use order::{HeightOrder, OrderKey};
