//! Design and analysis of soft 3D-printed propelled arms: material fitting,
//! folded-arm elastica, propeller efficiency, empirical deflection and pipe
//! attachment.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adapt;
pub mod aero;
pub mod beam;
pub mod cli;
pub mod config;
pub mod deflection;
pub mod io;
pub mod lsq;
pub mod material;
pub mod ode;
pub mod pipeline;
pub mod report;
pub mod roots;
