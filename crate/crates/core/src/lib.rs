//! Exact state-vector simulation of probabilistic controlled teleportation.
//!
//! A sender teleports an unknown one- or two-qubit state to a receiver
//! through a non-maximally entangled channel whose use is gated by a
//! controller's measurement. The receiver applies one collective unitary
//! with an auxiliary qubit; measuring that qubit in `|0⟩` heralds a perfect
//! transfer.

pub mod channels;
pub mod cli;
pub mod correction;
pub mod error;
pub mod gates;
pub mod listings;
pub mod measure;
pub mod protocol;
pub mod protocol_one;
pub mod protocol_two;
pub mod qstate;
pub mod report;
pub mod sampling;
pub mod unitaries;

pub use channels::ChannelSpec;
pub use correction::{derive_correction, Pauli, PauliWord};
pub use error::{Error, Result};
pub use measure::RngStream;
pub use protocol::{Protocol, ProtocolResult};
pub use qstate::{Label, StateVector};
