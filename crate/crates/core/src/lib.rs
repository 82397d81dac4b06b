//! Weak-measurement protection of qubits and two-qubit entanglement under
//! generalized amplitude damping.

pub mod channels;
pub mod cli;
pub mod entangle;
pub mod error;
pub mod linalg;
pub mod qubit;
pub mod search;
pub mod verify;
pub mod weakmeas;

pub use error::{Error, Result};
