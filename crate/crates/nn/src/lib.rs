//! Complex-valued neural network core and the channel models built on it.
//!
//! The crate carries its own small autodiff-free training stack: dense real
//! and complex layers with hand-written backward passes, Adam, a checkpoint
//! format, and the model-based and black-box location-to-channel networks.

pub mod error;
pub mod gradcheck;
pub mod layers;
pub mod linalg;
pub mod loss;
pub mod models;
pub mod optim;
pub mod params;
pub mod tensor;

pub use error::{NnError, Result};
pub use models::{build_model, ChannelModel, ModelConfig, ModelGeometry, ModelKind};
pub use optim::{Adam, AdamConfig};
pub use params::ModelParams;
pub use tensor::{CMat, RMat};
