#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criterion;
pub mod entropy;
pub mod error;
pub mod figures;
pub mod model;
pub mod oracle;
pub mod verify;
