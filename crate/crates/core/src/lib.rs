//! Integrable magnetic geodesic flows on the sphere with a monopole-like field.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod elliptic;
pub mod fields;
pub mod geometry;
pub mod ode;
pub mod polyroots;
pub mod quad;
pub mod verify;
