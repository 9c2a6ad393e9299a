//! Cooperative multicell MISO beamforming on the Wyner model.
//!
//! The crate covers full-CSI beam design (generalized-eigenvector, eigen-,
//! and zero-forcing beamforming), random-vector-quantization limited
//! feedback with a neighbor-to-neighbor CSI exchange, analytic upper bounds
//! on the resulting sum-rate loss, the closed-form split of a feedback
//! budget between desired and interfering channel directions, and seeded
//! Monte Carlo drivers for the standard experiments.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod bitalloc;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod feedback;
pub mod numerics;
pub mod seed;

pub use beamforming::{Beamformer, RateReport, Strategy};
pub use bitalloc::{BitSplit, SplitClamp};
pub use channel::{CellParams, ChannelSet, Topology, TopologyKind};
pub use error::{Error, Result};
pub use experiments::{ExperimentSpec, FigureId, ResultTable};
pub use feedback::{Codebook, QuantizedCsi};
pub use numerics::{CMat, CVec, Complex64};
