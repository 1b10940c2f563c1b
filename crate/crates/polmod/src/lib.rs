//! Link-level simulation library for polarized modulation over
//! dual-polarized mobile satellite channels.

pub mod analysis;
pub mod baselines;
pub mod channel;
pub mod constellation;
pub mod fec;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod pmod;
