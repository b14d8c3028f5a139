//! Age-of-information analysis for status-updating nodes that share an
//! unreliable slotted channel.
//!
//! Two access mechanisms are covered. Under scheduled access with feedback,
//! nodes take round-robin turns and retransmit within a turn (up to a cap)
//! until the sink decodes a packet. Under slotted random access, every node
//! transmits independently each slot with its own attempt probability, and
//! simultaneous attempts collide.
//!
//! The crate provides:
//!
//! - closed-form per-node and network ages for both mechanisms ([`sf`],
//!   [`aloha`]), each backed by an independent numeric cross-check;
//! - optimizers for the protocol knobs: the turn cap sweep, the exact
//!   two-node attempt probabilities, a large-network closed form, and a
//!   fixed-point solver for the stationarity conditions ([`optimize`]);
//! - symmetric-updating analysis, where every node gets the same age, with
//!   analytic bounds on how the two mechanisms compare ([`symmetric`]);
//! - a deterministic slotted Monte Carlo simulator with empirical age and
//!   moment estimators ([`sim`]).
//!
//! The crate is `no_std`-compatible (with `alloc`): disable default features
//! and enable `libm` for float math. Everything is a pure function over
//! immutable values; all types are `Send + Sync`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod math;
pub mod model;
pub mod rng;

pub mod aloha;
pub mod optimize;
pub mod sf;
pub mod sim;
pub mod symmetric;

pub use error::Error;
pub use model::{
    age_from_moments, network_age, AgeReport, AlohaConfig, ChannelProfile, InterUpdateMoments,
    SfConfig, UNBOUNDED_AGE,
};
