//! Finite-SNR execution of the phase-Markov scheme: precoding, interference
//! reconstruction and quantization, stacked MAC rate feasibility, and DoF
//! slope regression.

pub mod mac;
pub mod precoders;
pub mod quantizer;
pub mod run;

use thiserror::Error;

use crate::channel::ChannelError;
use crate::scheme::SchemeError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("estimate matrix is rank deficient after {attempts} redraw attempts")]
    RankDeficient { attempts: usize },
    #[error("SNR ladder needs >= 3 points spanning >= 3 decades (got {points} points, {decades:.2} decades)")]
    InsufficientLadder { points: usize, decades: f64 },
    #[error("need at least 20 trial phases per SNR point (got {0})")]
    TooFewTrials(usize),
    #[error("delayed-CSIT lag eta = {eta} must be smaller than the phase length T = {t_slots}")]
    EtaTooLarge { eta: usize, t_slots: usize },
    #[error("effective noise covariance is not positive definite")]
    NotPositiveDefinite,
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

pub use mac::{mac_feasibility, MacOutcome, SlotMacInput};
pub use precoders::{make_precoders, SlotSignal};
pub use quantizer::{PhaseQuantizer, SlotQuant};
pub use run::{
    run_phase, simulate_dof, simulate_dof_at, PhaseOutcome, SimOptions, SimReport, SnrPoint,
};
