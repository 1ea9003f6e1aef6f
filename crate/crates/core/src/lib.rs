//! Additive secret sharing over `Z/2^k` with multivariate Beaver products.

pub mod dealer;
pub mod engine;
pub mod error;
pub mod nonlinear;
pub mod par;
pub mod protocols;
pub mod ring;
pub mod sharing;

pub use engine::{
    run_session, Method, NetProfile, RevealTicket, RoundStats, Session, SessionConfig,
};
pub use error::{Error, Result};
pub use par::ExecMode;
pub use ring::{FixedPointCodec, Ring, RingElement, Z128, Z64};
pub use sharing::{PartyId, Scale, ShareVector, Shared};
