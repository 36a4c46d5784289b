//! Assisted rocket control: an alpha = 0 FMC autopilot that keeps the rocket
//! alive while a human nudges it with steering priors over WebSocket.

pub mod config;
pub mod server;
pub mod session;
pub mod steering;

use fmc_core::FmcError;

pub use config::SessionConfig;
pub use server::{router, serve};
pub use session::{spawn_session, Session, SessionHandle, SessionLink, TelemetryFrame};
pub use steering::{apply_steering, Direction, SteeringMessage, SteeringPrior};

/// JSON schema every outbound telemetry message satisfies.
pub const TELEMETRY_SCHEMA: &str = include_str!("../schema/telemetry.schema.json");

#[derive(Debug, thiserror::Error)]
pub enum AssistError {
    #[error("bad config: {0}")]
    Config(String),
    #[error("bad steering: {0}")]
    Steering(String),
    #[error(transparent)]
    Fmc(#[from] FmcError),
    #[error("io: {0}")]
    Io(String),
}
