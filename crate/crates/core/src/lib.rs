//! Reconfiguration planning for deformable quadrilateral lattice modules.
//!
//! Modules sit on the unit lattice and connect through four side slots. A
//! morph closes a loop of modules around a shared pivot (a connect) and then
//! opens one of its edges (a disconnect). This crate computes virtual graphs,
//! isomorphism chains and dependency-ordered action sequences between two
//! configurations, validates sequences, and enumerates the reachable state
//! space for small module counts.
#![no_std]

extern crate alloc;

pub mod birrt;
pub mod dir;
pub mod drtree;
pub mod embed;
pub mod error;
pub mod fan;
pub mod graph;
pub mod isomap;
pub mod lattice;
pub mod oracle;
pub mod plan;
pub mod polyomino;
pub mod validate;
pub mod vgg;

pub use dir::Dir;
pub use error::Error;
pub use graph::{Edge, SlotGraph};
pub use lattice::{Cell, Configuration, ModuleId, Symmetry};
pub use polyomino::Polyomino;
