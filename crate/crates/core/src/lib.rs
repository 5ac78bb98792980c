//! XOR-CSBM synthetic data, graph-convolutional ReLU networks with configurable
//! convolution placement, and a harness that checks learned behaviour against
//! closed-form thresholds.

pub mod error;
pub mod graphops;
pub mod network;
pub mod rng;
pub mod synthdata;
pub mod theory;
pub mod train;
pub mod experiment;

pub use error::{Error, Result};
