//! Multi-armed bandits whose arms are stationary φ-mixing processes.
//!
//! The crate is organised bottom-up:
//!
//! - [`mixing`]: mixing profiles and the tail sums, index maps and regret
//!   bounds derived from them.
//! - [`processes`]: seeded stationary arm generators with certified profiles.
//! - [`rewards`]: block reward functions and their exact or sampled means.
//! - [`policies`]: fixed-block, combination and restless UCB variants.
//! - [`environments`]: rested and restless simulation loops with regret
//!   accounting.
//! - [`oracle`]: ground-truth value tables and concentration experiments.
//! - [`experiments`]: configuration files, presets and seeded run matrices.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod environments;
pub mod error;
pub mod experiments;
pub mod mixing;
pub mod oracle;
pub mod policies;
pub mod processes;
pub mod rewards;

pub use error::{Error, Result};
