//! Error types shared by the protocol modules.

use thiserror::Error;

/// Input or parameter problems detected before (or while) running a protocol.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error("input length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("assignment does not match partition: {0}")]
    ProjectionMismatch(String),
}
