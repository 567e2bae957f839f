//! Planar bichromatic spanning trees with a bounded longest edge.

pub mod bottleneck;
pub mod dsu;
pub mod error;
pub mod gen;
pub mod geom;
pub mod grid;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod pipeline;
pub mod stitch;
pub mod surd;
pub mod svg;
pub mod verify;
pub mod star;
pub mod trace;
pub mod world;

pub use error::{Error, Result};
pub use instance::Instance;
