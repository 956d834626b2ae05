//! Core algorithms for just-noticeable-difference (JND) studies of compressed video.
//!
//! The crate is `no_std` (with `alloc`) and contains no IO. It covers:
//!
//! * [`search`]: the adaptive QP search round (robust quartile-dropping and the
//!   legacy halving procedure), the clip substitution ladder and anchor selection.
//! * [`sim`]: simulated observers and multi-JND campaigns.
//! * [`stats`]: subject screening, Grubbs' outlier removal and normality tests.
//! * [`sur`]: Gaussian JND models, satisfied-user-ratio curves and dataset summaries.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dataset;
pub mod error;
pub mod qp;
pub mod search;
pub mod sim;
pub mod special;
pub mod stats;
pub mod summary;
pub mod sur;

pub use dataset::{Cell, Dataset, Record, Resolution, SampleMatrix, SequenceId};
pub use error::{Error, Result};
pub use qp::{clip_for_qp, Qp};
pub use search::{
    anchor_from_samples, next_round_config, run_round, ComparisonRequest, JndResult, Procedure, Response, RoundOutcome,
    SearchConfig, SearchState, SearchStatus,
};
