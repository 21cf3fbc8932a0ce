//! Command-line front end, file formats and benchmark harness for
//! [`quadmorph_core`].

pub mod bench;
pub mod classify;
pub mod exit;
pub mod io;
pub mod render;
