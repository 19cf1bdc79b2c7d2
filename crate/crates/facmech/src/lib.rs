//! Strategyproof facility location on an interval.
//!
//! The crate models a planner placing one facility on a closed interval for
//! agents that either want it far away (type 1) or close by (type 2), each
//! possibly controlling several points. It ships:
//!
//! - the core model: profiles, lotteries, benefits, objectives ([`model`]);
//! - the mechanisms themselves, deterministic and randomized, plus a
//!   string-addressable registry ([`mechanisms`]);
//! - exact optimum oracles exploiting piecewise linearity, and a grid oracle
//!   to cross-check them ([`oracle`]);
//! - a verification toolkit: strategyproofness checking, approximation-ratio
//!   search, structural characterizations, and impossibility certificates
//!   ([`verify`]);
//! - instance generators and a JSON file format ([`instances`]);
//! - a self-contained verification suite wiring all of it together
//!   ([`suite`]).

pub mod error;
pub mod instances;
pub mod mechanisms;
pub mod model;
mod numeric;
pub mod oracle;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    benefit, expected_benefit, expected_social_benefit, multi_benefit, social_benefit, AgentReport,
    AgentType, Interval, Lottery, Objective, Profile,
};
