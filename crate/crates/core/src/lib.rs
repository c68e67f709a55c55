//! Finite Gabor frames and mutually unbiased bases: frame bounds, trace
//! moments of random Gabor frames and erasure-robustness audits.

// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bias;
pub mod combin;
pub mod erasure;
pub mod error;
pub mod experiments;
pub mod frameset;
pub mod gabor;
pub mod linalg;
pub mod metrics;
pub mod moments;
pub mod parse;
pub mod rng;
pub mod tolerances;
pub mod window;

pub use error::{Error, ErrorClass, Result};
pub use frameset::{FrameSet, FrameSetSpec, Side, TfPoint};
pub use gabor::{gabor_frame_operator, synthesize, tf_shift, SynthesisMatrix};
pub use linalg::{hermitian_eigenvalues, ComplexMatrix, C64};
pub use metrics::{frame_bounds, SpectrumReport};
pub use window::{Window, WindowKind};
