pub mod cayley;
pub mod cover;
pub mod cubecomplex;
pub mod error;
pub mod gf2;
pub mod pipeline;
pub mod presentation;
pub mod relhom;
pub mod sampler;
pub mod smallcancel;
pub mod stats;
pub mod walls;
pub mod words;

pub use error::{Error, Result};
