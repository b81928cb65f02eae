//! Vertical calculus along the Liouville foliation of `TM⁰` for a Finsler
//! manifold `(M, F)`.
//!
//! Everything is generic over the scalar ([`Real`], implemented for `f32`
//! and `f64`); the aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geometry;
pub mod jets;
pub mod leafprim;
pub mod linalg;
pub mod metrics;
pub mod sampling;
pub mod scalar;
pub mod transitions;
pub mod vcalc;
pub mod vforms;

pub use error::{GeomError, Result};
pub use geometry::{FiberJets, FrameBasis, FundamentalTensor, LiouvilleFrame, SprayData};
pub use jets::Jet3;
pub use leafprim::{LeafPath, LeafPoint, Primitive, PrimitiveRecord};
pub use metrics::{MetricKind, MetricSpec, PointTM, Poly2, QuadraticFamily};
pub use scalar::Real;
pub use transitions::{ChartPair, ChartTransition, TransitionKind};
pub use vcalc::{FormField, ScalarField};
pub use vforms::{FormCoeff, FormType, SplitForm, VerticalForm};

pub type Jet = Jet3<f64>;
pub type Point = PointTM<f64>;
pub type Metric = MetricSpec<f64>;
pub type Form = VerticalForm<f64>;
pub type JetForm = VerticalForm<Jet3<f64>>;
pub type Frame = LiouvilleFrame<f64>;
pub type Transition = ChartTransition<f64>;
pub type Field = FormField<f64>;
pub type Scalar = ScalarField<f64>;
