//! Amplitude-encoding circuit synthesis for structured vectors.
//!
//! A [`Pattern`] declares a vector family and its parameters; [`encode`]
//! compiles it to a [`Circuit`] without materializing the vector, and reports
//! resource counts after lowering to `{CX, U3}`. [`predict_gates`] estimates
//! those counts from arithmetic alone, and [`mps::encode_mps`] approximately
//! loads arbitrary vectors through a truncated matrix product state.

pub mod circuit;
pub mod cli;
pub mod error;
pub mod mps;
pub mod patterns;
pub mod predict;
pub mod synth;
pub mod simulate;
pub mod transpile;

pub use circuit::{Circuit, Gate, GateKind, Op};
pub use error::{Error, Result};
pub use patterns::Pattern;
pub use predict::{predict_gates, PredictResult};
pub use synth::{encode, encode_with, EncodeOptions, EncodingInfo};

pub type C64 = num_complex::Complex64;
