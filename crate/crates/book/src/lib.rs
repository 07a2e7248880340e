//! Compiles every chapter of the book as rustdoc so `cargo test` runs the
//! listings. One module per chapter keeps failures traceable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/pairing.md")]
pub mod pairing {}
#[doc = include_str!("../../../book/src/aggregation.md")]
pub mod aggregation {}
#[doc = include_str!("../../../book/src/sharing.md")]
pub mod sharing {}
#[doc = include_str!("../../../book/src/policies.md")]
pub mod policies {}
#[doc = include_str!("../../../book/src/access-control.md")]
pub mod access_control {}
#[doc = include_str!("../../../book/src/computation.md")]
pub mod computation {}
#[doc = include_str!("../../../book/src/cost-model.md")]
pub mod cost_model {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
