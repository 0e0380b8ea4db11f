//! Degrees-of-freedom analysis and finite-SNR simulation of the symmetric
//! two-user MIMO broadcast and interference channels with imperfect current
//! and delayed transmitter-side CSI.
//!
//! The crate has three layers:
//! - region computation: outer/inner DoF bounds, baselines, corner points
//!   ([`regions`], [`geometry`]);
//! - scheme planning: power-level calibration, per-slot exponent sequences,
//!   and bit ledgers for the phase-Markov transmission scheme ([`scheme`]);
//! - verification: fading-channel synthesis ([`channel`]) and Monte Carlo
//!   rate-feasibility simulation with DoF slope regression ([`sim`]).

pub mod channel;
pub mod config;
pub mod geometry;
pub mod regions;
pub mod scheme;
pub mod sim;

pub use channel::{
    dump_block, generate_block, load_block, measured_exponent, BlockDump, ChannelError,
    ChannelSlot, LinkId,
};
pub use config::{AntennaConfig, ChannelKind, ConfigError, QualityExponents};
pub use geometry::{DofRegion, GeometryError, HalfPlane, GEOM_TOL};
pub use regions::{
    active_case, active_corner_labels, baseline_region, corner_points, delta_com, inner_region,
    outer_region,
    sufficient_delayed_threshold, BaselineMode, CornerLabel, CornerPoint, RegionCase,
};
pub use scheme::{
    build_phase_plan, calibrate, delta_bar_bound, general_dof_point, solve_delta_sequences,
    BitLedger, PhasePlan, SchemeError, SlotPower, SlotRates,
};
pub use sim::{
    mac_feasibility, make_precoders, run_phase, simulate_dof, simulate_dof_at, MacOutcome,
    PhaseOutcome, PhaseQuantizer, SimError, SimOptions, SimReport, SlotMacInput, SlotSignal,
    SnrPoint,
};
