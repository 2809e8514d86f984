//! Scalability testing and tight-frame scaling for finite frames in `R^N`.
//!
//! A frame `Φ = {φ_i}` is scalable when nonnegative weights `u_i` make
//! `Σ u_i φ_i φ_iᵀ` a multiple of the identity. The [`programs`] module decides
//! this with linear programs over the polytope `{F(Φ)u = 0, 𝟙ᵀu = 1, u ⪰ 0}`;
//! [`barrier`] and [`auglag`] find scalings with full or minimum-norm support.

pub mod auglag;
pub mod barrier;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod fmap;
pub mod frame;
pub mod linalg;
pub mod programs;
pub mod scalar;
pub mod seed;
pub mod simplex;

pub use error::{Error, Result};
pub use fmap::{f_of_frame, f_of_vector, FMatrix};
pub use frame::{Frame, ScalingWeights};
pub use linalg::Matrix;
pub use programs::{is_scalable, Method, ScalabilityReport, ScalingOptions};
pub use scalar::Scalar;

pub type Matrix64 = Matrix<f64>;
pub type Matrix32 = Matrix<f32>;
pub type Frame64 = Frame<f64>;
pub type Frame32 = Frame<f32>;
pub type FMatrix64 = FMatrix<f64>;
pub type FMatrix32 = FMatrix<f32>;
pub type ScalingWeights64 = ScalingWeights<f64>;
pub type ScalingWeights32 = ScalingWeights<f32>;
pub type ScalabilityReport64 = ScalabilityReport<f64>;
pub type ScalabilityReport32 = ScalabilityReport<f32>;
