#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chaos;
pub mod distribution;
pub mod error;
pub mod mc;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod tail;
pub mod vector;
