pub mod cli;
pub mod error;
pub mod frame;
pub mod gm;
pub mod graph;
pub mod io;
pub mod lap;
pub mod matrix;
pub mod metrics;
pub mod models;
pub mod percolation;
pub mod relax;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
