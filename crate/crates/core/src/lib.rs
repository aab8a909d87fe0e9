//! Privacy-aware indoor route planning.
//!
//! The pipeline turns an annotated indoor point cloud into aligned top-view
//! and traversability grids, builds a room-level graph whose edges always
//! touch a hallway, enumerates and filters simple room routes, realizes each
//! route with grid A*, scores it against a Gaussian-modulated fast-marching
//! distance field around sensitive rooms, and picks one route either by a
//! five-run majority vote of a vision-language model or by minimum risk.

pub mod error;
pub mod field;
pub mod grid;
pub mod pipeline;
pub mod planning;
pub mod scene;
pub mod select;
pub mod topo;

pub use error::{Error, Result};
