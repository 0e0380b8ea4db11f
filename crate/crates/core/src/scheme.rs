//! Phase-Markov scheme calibration: power-level bound, corner-point settings,
//! per-slot power-exponent sequences, and the per-phase bit ledger.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{AntennaConfig, ChannelKind, QualityExponents};
use crate::regions::{self, active_corner_labels, corner_settings, CornerLabel};

pub use crate::regions::delta_com;

const SOLVE_TOL: f64 = 1e-9;

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SchemeError {
    #[error("target {target} is not active for this configuration; active set: {active:?}")]
    TargetInactive {
        target: CornerLabel,
        active: Vec<CornerLabel>,
    },
    #[error("delta_bar = {delta_bar} exceeds its bound {bound}")]
    DeltaBarOutOfRange { delta_bar: f64, bound: f64 },
    #[error("omega = {0} outside [0, 1]")]
    OmegaOutOfRange(f64),
    #[error("no per-slot power sequence satisfies {constraint}")]
    Infeasible { constraint: String },
    #[error("scheme requires N < M <= 2N after clamping (got M={m}, N={n})")]
    OutsideSchemeRegime { m: usize, n: usize },
}

/// Upper limit on the average private-symbol power exponent.
pub fn delta_bar_bound(cfg: &AntennaConfig, q: &QualityExponents) -> Result<f64, SchemeError> {
    if !cfg.scheme_regime() {
        return Err(SchemeError::OutsideSchemeRegime {
            m: cfg.effective_m(),
            n: cfg.n_rx,
        });
    }
    let m = cfg.effective_m() as f64;
    let n = cfg.n_rx as f64;
    let [a1, a2] = q.alpha_avg();
    let [b1, b2] = q.beta_avg();
    Ok(1.0_f64
        .min(b1)
        .min(b2)
        .min(n * (1.0 + a1 + a2) / (m + n))
        .min(n * (1.0 + a2) / m))
}

/// (delta_bar, omega) that steer the scheme onto `target`, provided the
/// target is an active corner point for this configuration.
pub fn calibrate(
    cfg: &AntennaConfig,
    q: &QualityExponents,
    target: CornerLabel,
) -> Result<(f64, f64), SchemeError> {
    if !cfg.scheme_regime() {
        return Err(SchemeError::OutsideSchemeRegime {
            m: cfg.effective_m(),
            n: cfg.n_rx,
        });
    }
    let active = active_corner_labels(cfg, q);
    if !active.contains(&target) {
        return Err(SchemeError::TargetInactive { target, active });
    }
    Ok(corner_settings(target, cfg, q))
}

/// DoF pair delivered for (delta_bar, omega); validates the inputs against
/// the bound before evaluating.
pub fn general_dof_point(
    cfg: &AntennaConfig,
    q: &QualityExponents,
    delta_bar: f64,
    omega: f64,
) -> Result<(f64, f64), SchemeError> {
    let bound = delta_bar_bound(cfg, q)?;
    if delta_bar < -SOLVE_TOL || delta_bar > bound + SOLVE_TOL {
        return Err(SchemeError::DeltaBarOutOfRange { delta_bar, bound });
    }
    if !(-SOLVE_TOL..=1.0 + SOLVE_TOL).contains(&omega) {
        return Err(SchemeError::OmegaOutOfRange(omega));
    }
    Ok(regions::dof_point_raw(cfg, q, delta_bar, omega))
}

/// Per-slot power exponents `delta_t` for one user, satisfying
/// `delta_t <= beta_t`, block mean `delta_bar`, and the positive-part mean
/// `(delta_bar - alpha_bar)^+`.
///
/// The positive-part constraint forces equality in the convexity bound, which
/// pins the structure: when `delta_bar > alpha_bar` every slot must sit in
/// `[alpha_t, beta_t]`, and when `delta_bar <= alpha_bar` every slot must stay
/// below `alpha_t`. A single interpolation weight then fixes the mean, so the
/// solve reduces to one scalar equation per user.
fn solve_one_user(
    alpha: &[f64],
    beta: &[f64],
    delta_bar: f64,
) -> Result<Vec<f64>, SchemeError> {
    let t = alpha.len() as f64;
    let alpha_mean = alpha.iter().sum::<f64>() / t;
    let beta_mean = beta.iter().sum::<f64>() / t;
    if delta_bar > beta_mean + SOLVE_TOL {
        return Err(SchemeError::Infeasible {
            constraint: format!(
                "mean(delta) = {delta_bar} cannot exceed mean(beta) = {beta_mean} \
                 while delta_t <= beta_t"
            ),
        });
    }
    let delta = if delta_bar > alpha_mean + SOLVE_TOL {
        // All slots at or above alpha_t, interpolated toward beta_t.
        let lambda = (delta_bar - alpha_mean) / (beta_mean - alpha_mean);
        alpha
            .iter()
            .zip(beta)
            .map(|(&a, &b)| a + lambda * (b - a))
            .collect::<Vec<f64>>()
    } else if alpha_mean > 0.0 {
        // All slots at or below alpha_t, scaled to hit the mean.
        let lambda = delta_bar / alpha_mean;
        alpha.iter().map(|&a| lambda * a).collect()
    } else {
        vec![0.0; alpha.len()]
    };
    verify_delta_sequence(&delta, alpha, beta, delta_bar)?;
    Ok(delta)
}

fn verify_delta_sequence(
    delta: &[f64],
    alpha: &[f64],
    beta: &[f64],
    delta_bar: f64,
) -> Result<(), SchemeError> {
    let t = delta.len() as f64;
    for (i, (&d, &b)) in delta.iter().zip(beta).enumerate() {
        if d > b + SOLVE_TOL {
            return Err(SchemeError::Infeasible {
                constraint: format!("delta_{i} = {d} exceeds beta_{i} = {b}"),
            });
        }
    }
    let mean = delta.iter().sum::<f64>() / t;
    if (mean - delta_bar).abs() > SOLVE_TOL {
        return Err(SchemeError::Infeasible {
            constraint: format!("mean(delta) = {mean}, wanted {delta_bar}"),
        });
    }
    let alpha_mean = alpha.iter().sum::<f64>() / t;
    let plus_mean = delta
        .iter()
        .zip(alpha)
        .map(|(&d, &a)| pos(d - a))
        .sum::<f64>()
        / t;
    let target = pos(delta_bar - alpha_mean);
    if (plus_mean - target).abs() > SOLVE_TOL {
        return Err(SchemeError::Infeasible {
            constraint: format!("mean((delta - alpha)^+) = {plus_mean}, wanted {target}"),
        });
    }
    Ok(())
}

/// Solves the per-slot exponent sequences for both users at a common mean.
pub fn solve_delta_sequences(
    q: &QualityExponents,
    t_slots: usize,
    delta_bar: f64,
) -> Result<[Vec<f64>; 2], SchemeError> {
    let d1 = solve_one_user(
        &q.alpha_slots(0, t_slots),
        &q.beta_slots(0, t_slots),
        delta_bar,
    )?;
    let d2 = solve_one_user(
        &q.alpha_slots(1, t_slots),
        &q.beta_slots(1, t_slots),
        delta_bar,
    )?;
    Ok([d1, d2])
}

/// Power exponents (base P) for the five symbol groups in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotPower {
    pub common: f64,
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

/// Normalized (prelog) rates for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotRates {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
    pub common: f64,
}

/// Per-phase bit totals in units of log P (Table-style ledger).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BitLedger {
    pub private_user1: f64,
    pub private_user2: f64,
    pub common: f64,
    pub quantized: f64,
}

/// A fully calibrated phase: slot count, power split, per-slot exponents,
/// rate tables, and the common/quantization bit budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePlan {
    pub cfg: AntennaConfig,
    pub t_slots: usize,
    pub s_phases: usize,
    pub delta_bar: f64,
    pub omega: f64,
    pub delta_seq: [Vec<f64>; 2],
    pub alpha_seq: [Vec<f64>; 2],
    pub beta_seq: [Vec<f64>; 2],
    pub power_table: Vec<SlotPower>,
    pub rate_table: Vec<SlotRates>,
    /// Per-slot normalized common-symbol capacity, N - (M-N) delta_bar.
    pub common_budget: f64,
    /// Per-slot normalized quantization load.
    pub quant_budget: f64,
    pub delta_com: f64,
    /// For the IC: normalized common bits carried by transmitter 1 and 2.
    pub ic_common_split: Option<(f64, f64)>,
    pub ledger: BitLedger,
    /// Residual |block mean - declared average| folded into sim tolerances.
    pub mean_residual: f64,
}

impl PhasePlan {
    /// Build a plan for an explicit (delta_bar, omega) pair.
    pub fn build(
        cfg: &AntennaConfig,
        q: &QualityExponents,
        delta_bar: f64,
        omega: f64,
        t_slots: usize,
        s_phases: usize,
    ) -> Result<Self, SchemeError> {
        let bound = delta_bar_bound(cfg, q)?;
        if delta_bar < -SOLVE_TOL || delta_bar > bound + SOLVE_TOL {
            return Err(SchemeError::DeltaBarOutOfRange { delta_bar, bound });
        }
        if !(-SOLVE_TOL..=1.0 + SOLVE_TOL).contains(&omega) {
            return Err(SchemeError::OmegaOutOfRange(omega));
        }
        let m = cfg.effective_m() as f64;
        let n = cfg.n_rx as f64;
        let [a1_bar, a2_bar] = q.alpha_avg();

        let delta_seq = solve_delta_sequences(q, t_slots, delta_bar)?;
        let alpha_seq = [q.alpha_slots(0, t_slots), q.alpha_slots(1, t_slots)];
        let beta_seq = [q.beta_slots(0, t_slots), q.beta_slots(1, t_slots)];

        let mut power_table = Vec::with_capacity(t_slots);
        let mut rate_table = Vec::with_capacity(t_slots);
        let common_budget = n - (m - n) * delta_bar;
        for t in 0..t_slots {
            let (d1, d2) = (delta_seq[0][t], delta_seq[1][t]);
            let (a1, a2) = (alpha_seq[0][t], alpha_seq[1][t]);
            power_table.push(SlotPower {
                common: 1.0,
                a: d2,
                a_prime: d2 - a2,
                b: d1,
                b_prime: d1 - a1,
            });
            rate_table.push(SlotRates {
                a: (m - n) * d2,
                a_prime: n * pos(d2 - a2),
                b: (m - n) * d1,
                b_prime: n * pos(d1 - a1),
                common: common_budget,
            });
        }

        let quant_budget = n * (pos(delta_bar - a1_bar) + pos(delta_bar - a2_bar));
        let dc = delta_com(cfg, q, delta_bar);
        let ic_common_split = match cfg.kind {
            ChannelKind::Ic => Some((
                omega * dc + n * pos(delta_bar - a2_bar),
                (1.0 - omega) * dc + n * pos(delta_bar - a1_bar),
            )),
            ChannelKind::Bc => None,
        };
        let tt = t_slots as f64;
        let ledger = BitLedger {
            private_user1: tt * ((m - n) * delta_bar + n * pos(delta_bar - a2_bar)),
            private_user2: tt * ((m - n) * delta_bar + n * pos(delta_bar - a1_bar)),
            common: tt * common_budget,
            quantized: tt * quant_budget,
        };

        let mean_residual = (0..2)
            .map(|i| {
                let am = alpha_seq[i].iter().sum::<f64>() / tt;
                let bm = beta_seq[i].iter().sum::<f64>() / tt;
                (am - q.alpha_avg()[i])
                    .abs()
                    .max((bm - q.beta_avg()[i]).abs())
            })
            .fold(0.0, f64::max);

        Ok(Self {
            cfg: *cfg,
            t_slots,
            s_phases,
            delta_bar,
            omega,
            delta_seq,
            alpha_seq,
            beta_seq,
            power_table,
            rate_table,
            common_budget,
            quant_budget,
            delta_com: dc,
            ic_common_split,
            ledger,
            mean_residual,
        })
    }

    /// DoF pair this plan is designed to deliver (large-S limit).
    pub fn designed_dof(&self, q: &QualityExponents) -> (f64, f64) {
        regions::dof_point_raw(&self.cfg, q, self.delta_bar, self.omega)
    }
}

/// Build a plan calibrated for a labeled corner point.
pub fn build_phase_plan(
    cfg: &AntennaConfig,
    q: &QualityExponents,
    target: CornerLabel,
    t_slots: usize,
    s_phases: usize,
) -> Result<PhasePlan, SchemeError> {
    let (delta_bar, omega) = calibrate(cfg, q, target)?;
    PhasePlan::build(cfg, q, delta_bar, omega, t_slots, s_phases)
}
