//! Location-to-channel synthesis and the approximation machinery behind
//! model-based channel learning.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] and [`scene`] describe emitters, reflectors and frequency grids.
//! * [`paths`] enumerates image-source propagation paths up to a bounce budget.
//! * [`channel`] turns path sets into antenna/frequency channel matrices and
//!   channel impulse responses.
//! * [`approx`] holds the first-order distance expansion and the per-path
//!   channel approximation built on it.
//! * [`dictionary`] builds the global steering / frequency-response / planar
//!   wavefront dictionaries and assembles channels from activation vectors.
//! * [`omp`] is a greedy sparse-coding oracle over the composite dictionary.
//! * [`dataset`] samples locations, generates channels and reads/writes the
//!   `WVFD1` binary dataset format.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod channel;
pub mod dataset;
pub mod dictionary;
pub mod error;
pub mod geometry;
pub mod omp;
pub mod paths;
pub mod scene;

pub use channel::{channel_response, impulse_response, ChannelMatrix, Tap};
pub use error::{Error, Result};
pub use geometry::{AntennaArray, FrequencyGrid, Location, SPEED_OF_LIGHT};
pub use paths::{enumerate_paths, Path, PathSet};
pub use scene::{Scene, Wall};

pub use num_complex::Complex64;
