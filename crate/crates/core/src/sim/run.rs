//! Phase execution and DoF slope regression.
//!
//! A trial simulates one phase: generate the fading block, build precoders,
//! reconstruct and quantize the interference seen by each receiver, and run
//! the stacked MAC feasibility check. Rates are aggregated per SNR point and
//! regressed against log2 P.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{gaussian_matrix, generate_block, ols_slope_stderr, ChannelSlot};
use crate::config::{AntennaConfig, ChannelKind, QualityExponents};
use crate::regions::CornerLabel;
use crate::scheme::{calibrate, PhasePlan};

use super::mac::{mac_feasibility, MacOutcome, SlotMacInput};
use super::precoders::{make_precoders, SlotSignal};
use super::quantizer::PhaseQuantizer;
use super::SimError;

/// Tunables for the simulator.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SimOptions {
    /// Slots per phase.
    pub t_slots: usize,
    /// Phases per block; enters only through the (1 - 1/S) last-phase loss.
    pub s_phases: usize,
    /// Delayed-CSIT availability lag; must be smaller than `t_slots`.
    pub eta: usize,
    /// Constant backoff, in bits per slot, subtracted from the designed
    /// private rates to absorb the o(log P) terms of the log-det bounds.
    /// Defaults to 8 + 3N when unset; the common stream needs no backoff
    /// because its mutual-information constraint has order-log P slack.
    pub backoff_bits: Option<f64>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            t_slots: 8,
            s_phases: 100,
            eta: 1,
            backoff_bits: None,
        }
    }
}

impl SimOptions {
    fn backoff(&self, cfg: &AntennaConfig) -> f64 {
        self.backoff_bits.unwrap_or(8.0 + 3.0 * cfg.n_rx as f64)
    }
}

/// Everything measured while simulating a single phase.
#[derive(Debug, Clone)]
pub struct PhaseOutcome {
    pub outcomes: [MacOutcome; 2],
    /// Designed new-information bits per user for the phase (private plus
    /// the user's share of the common surplus), after backoff.
    pub designed_user_bits: [f64; 2],
    pub achieved_user_bits: [f64; 2],
    pub margin_min: [f64; 2],
    /// Quantizer bit usage per receiver; each stays within one bit of its
    /// budget thanks to the fractional-bit carry across slots.
    pub quant_bits_used: [u64; 2],
    pub quant_budget_bits: [f64; 2],
    pub distortion_mean: f64,
    pub distortion_max: f64,
    pub overloads: u64,
    pub redraws: u64,
}

/// Per-SNR aggregate over trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnrPoint {
    pub snr: f64,
    /// Bits per slot per user.
    pub designed_rate: [f64; 2],
    pub achieved_rate: [f64; 2],
    /// Worst margin over phases and constraints, per receiver (bits/phase).
    pub margin_min: [f64; 2],
    /// Fraction of phases in which every constraint margin was nonnegative.
    pub margin_nonneg_frac: [f64; 2],
    pub distortion_mean: f64,
    pub distortion_max: f64,
    pub quant_bits_used_mean: f64,
    pub quant_budget_bits: f64,
    pub overloads: u64,
    pub redraws: u64,
}

/// Simulation summary: per-SNR aggregates plus the regressed DoF slopes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimReport {
    pub cfg: AntennaConfig,
    pub target: Option<CornerLabel>,
    pub delta_bar: f64,
    pub omega: f64,
    pub designed_dof: (f64, f64),
    pub t_slots: usize,
    pub s_phases: usize,
    pub trials: usize,
    pub seed: u64,
    pub points: Vec<SnrPoint>,
    pub d_hat: [f64; 2],
    pub d_stderr: [f64; 2],
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(seed ^ splitmix64(a.wrapping_mul(0x2545F4914F6CDD1D) ^ b))
}

fn use_cols(m: &DMatrix<Complex64>, m_use: usize) -> DMatrix<Complex64> {
    if m.ncols() == m_use {
        m.clone()
    } else {
        m.columns(0, m_use).into_owned()
    }
}

/// Channel matrices relevant to one receiver in one slot, clamped to the
/// effective antenna count.
struct RxLinks {
    /// True channel carrying the receiver's own private symbols.
    h_sig: DMatrix<Complex64>,
    /// True channels carrying the common stream(s).
    h_c1: DMatrix<Complex64>,
    h_c2: Option<DMatrix<Complex64>>,
    /// Residual of the interfering link: true minus delayed estimate.
    d_int: DMatrix<Complex64>,
    /// Delayed estimate used to rebuild the interference this receiver's
    /// symbols cause at the other receiver (the extra observation rows).
    h_obs: DMatrix<Complex64>,
    /// Delayed estimate of the link that interferes with this receiver
    /// (the transmitter-side reconstruction matrix).
    h_recon: DMatrix<Complex64>,
}

fn rx_links(slot: &ChannelSlot, cfg: &AntennaConfig, r: usize) -> RxLinks {
    let mu = cfg.effective_m();
    let o = 1 - r;
    match cfg.kind {
        ChannelKind::Bc => RxLinks {
            h_sig: use_cols(&slot.h_true[r], mu),
            h_c1: use_cols(&slot.h_true[r], mu),
            h_c2: None,
            d_int: use_cols(&slot.h_true[r], mu) - use_cols(&slot.h_delayed[r], mu),
            h_obs: use_cols(&slot.h_delayed[o], mu),
            h_recon: use_cols(&slot.h_delayed[r], mu),
        },
        ChannelKind::Ic => {
            // True links: 0 = H^(11), 1 = H^(12), 2 = H^(21), 3 = H^(22).
            let (direct, cross_in, cross_out, from_tx1, from_tx2) = if r == 0 {
                (0, 1, 2, 0, 1)
            } else {
                (3, 2, 1, 2, 3)
            };
            RxLinks {
                h_sig: use_cols(&slot.h_true[direct], mu),
                h_c1: use_cols(&slot.h_true[from_tx1], mu),
                h_c2: Some(use_cols(&slot.h_true[from_tx2], mu)),
                d_int: use_cols(&slot.h_true[cross_in], mu)
                    - use_cols(&slot.h_delayed[cross_in], mu),
                h_obs: use_cols(&slot.h_delayed[cross_out], mu),
                h_recon: use_cols(&slot.h_delayed[cross_in], mu),
            }
        }
    }
}

/// Per-symbol variances for one slot.
struct SlotVars {
    sc: f64,
    sa: f64,
    sap: f64,
    sb: f64,
    sbp: f64,
}

fn slot_vars(plan: &PhasePlan, t: usize, snr: f64) -> SlotVars {
    let mu = plan.cfg.effective_m() as f64;
    let n = plan.cfg.n_rx as f64;
    let div = match plan.cfg.kind {
        ChannelKind::Bc => 8.0,
        ChannelKind::Ic => 4.0,
    };
    let p = &plan.power_table[t];
    SlotVars {
        sc: snr / (2.0 * mu),
        sa: snr.powf(p.a) / (div * (mu - n)),
        sap: snr.powf(p.a_prime) / (div * n),
        sb: snr.powf(p.b) / (div * (mu - n)),
        sbp: snr.powf(p.b_prime) / (div * n),
    }
}

fn scaled(g: &DMatrix<Complex64>, var: f64) -> DMatrix<Complex64> {
    g * Complex64::new(var.sqrt(), 0.0)
}

/// Columns [zf * sqrt(s1) | rand * sqrt(s2)] through channel `h`.
fn private_block(
    h: &DMatrix<Complex64>,
    zf: &DMatrix<Complex64>,
    rand: &DMatrix<Complex64>,
    s1: f64,
    s2: f64,
) -> DMatrix<Complex64> {
    let a = scaled(&(h * zf), s1);
    let b = scaled(&(h * rand), s2);
    let mut out = DMatrix::zeros(h.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (h.nrows(), a.ncols())).copy_from(&a);
    out.view_mut((0, a.ncols()), (h.nrows(), b.ncols()))
        .copy_from(&b);
    out
}

fn stack_rows(top: &DMatrix<Complex64>, bottom: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = top.nrows();
    let mut out = DMatrix::zeros(2 * n, top.ncols());
    out.view_mut((0, 0), (n, top.ncols())).copy_from(top);
    out.view_mut((n, 0), (n, top.ncols())).copy_from(bottom);
    out
}

/// Simulate one phase and check rate feasibility at both receivers.
pub fn run_phase(
    cfg: &AntennaConfig,
    q: &QualityExponents,
    plan: &PhasePlan,
    snr: f64,
    seed: u64,
    opts: &SimOptions,
) -> Result<PhaseOutcome, SimError> {
    let n = cfg.n_rx;
    let t_slots = plan.t_slots;
    let log2p = snr.log2();
    let backoff = opts.backoff(cfg);

    // Redraw the whole block on a rank-deficient estimate (measure-zero).
    let mut redraws = 0u64;
    let (block, signals) = loop {
        let block = generate_block(cfg, q, t_slots, snr, opts.eta, mix(seed, 1, redraws))?;
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, 2, redraws));
        let signals: Result<Vec<SlotSignal>, SimError> = block
            .iter()
            .map(|slot| make_precoders(slot, cfg, &mut rng))
            .collect();
        match signals {
            Ok(s) => break (block, s),
            Err(SimError::RankDeficient { .. }) if redraws < 64 => {
                redraws += 1;
            }
            Err(e) => return Err(e),
        }
    };

    let mut sym_rng = ChaCha8Rng::seed_from_u64(mix(seed, 3, 0));
    let mut quantizers = [PhaseQuantizer::new(), PhaseQuantizer::new()];
    let mut slot_inputs: [Vec<SlotMacInput>; 2] = [Vec::new(), Vec::new()];
    let mut distortions: Vec<f64> = Vec::new();

    for (t, (slot, sig)) in block.iter().zip(&signals).enumerate() {
        let vars = slot_vars(plan, t, snr);
        let links = [rx_links(slot, cfg, 0), rx_links(slot, cfg, 1)];
        // Own private precoder groups per receiver: (zero-forced, random,
        // variances). User 1 rides the a-symbols, user 2 the b-symbols.
        let groups = [
            (&sig.u, &sig.u_prime, vars.sa, vars.sap),
            (&sig.v, &sig.v_prime, vars.sb, vars.sbp),
        ];

        // Reconstructed interference per receiver, from delayed estimates
        // and the other receiver's symbols.
        let mut quants = Vec::with_capacity(2);
        for r in 0..2 {
            let o = 1 - r;
            let (zf, rand, s1, s2) = groups[o];
            let recon = &links[r].h_recon;
            let rv = recon * zf;
            let rvp = recon * rand;
            let x1 = gaussian_matrix(&mut sym_rng, zf.ncols(), 1, 1.0);
            let x2 = gaussian_matrix(&mut sym_rng, rand.ncols(), 1, 1.0);
            let iota: DVector<Complex64> = scaled(&rv, s1) * x1.column(0)
                + scaled(&rvp, s2) * x2.column(0);
            let comp_var: Vec<f64> = (0..n)
                .map(|k| s1 * rv.row(k).norm_squared() + s2 * rvp.row(k).norm_squared())
                .collect();
            let budget = match r {
                0 => plan.rate_table[t].b_prime,
                _ => plan.rate_table[t].a_prime,
            } * log2p;
            let iota_slice: Vec<Complex64> = iota.iter().copied().collect();
            let out = quantizers[r].quantize_slot(&iota_slice, &comp_var, budget);
            distortions.push(out.distortion);
            quants.push(out);
        }

        for r in 0..2 {
            let o = 1 - r;
            let (zf, rand, s1, s2) = groups[r];
            let (ozf, orand, os1, os2) = groups[o];
            let lr = &links[r];

            let g_private = stack_rows(
                &private_block(&lr.h_sig, zf, rand, s1, s2),
                &private_block(&lr.h_obs, zf, rand, s1, s2),
            );
            let c_top = match (&lr.h_c2, &sig.w2) {
                (Some(h2), Some(w2)) => {
                    let a = scaled(&(&lr.h_c1 * &sig.w1), vars.sc);
                    let b = scaled(&(h2 * w2), vars.sc);
                    let mut out = DMatrix::zeros(n, a.ncols() + b.ncols());
                    out.view_mut((0, 0), (n, a.ncols())).copy_from(&a);
                    out.view_mut((0, a.ncols()), (n, b.ncols())).copy_from(&b);
                    out
                }
                _ => scaled(&(&lr.h_c1 * &sig.w1), vars.sc),
            };
            let g_common = stack_rows(&c_top, &DMatrix::zeros(n, c_top.ncols()));

            // Effective noise: AWGN plus the delayed-estimate residual of the
            // interfering link plus quantization noise (own on top, the other
            // receiver's underneath).
            let dv = &lr.d_int * ozf;
            let dvp = &lr.d_int * orand;
            let residual = scaled(&dv, os1) * scaled(&dv, os1).adjoint()
                + scaled(&dvp, os2) * scaled(&dvp, os2).adjoint();
            let mut noise = DMatrix::zeros(2 * n, 2 * n);
            for k in 0..n {
                noise[(k, k)] = Complex64::new(1.0 + quants[r].model_var[k], 0.0);
                noise[(n + k, n + k)] = Complex64::new(quants[o].model_var[k].max(1e-12), 0.0);
            }
            let mut top_left = noise.view_mut((0, 0), (n, n));
            top_left += &residual;

            slot_inputs[r].push(SlotMacInput {
                g_common,
                g_private,
                noise_cov: noise,
            });
        }
    }

    // Designed loads per phase; only the private rates carry the backoff.
    let tt = t_slots as f64;
    let designed_common = tt * plan.common_budget * log2p;
    let designed_private = [0, 1].map(|r| {
        let sum: f64 = plan
            .rate_table
            .iter()
            .map(|rt| match r {
                0 => rt.a + rt.a_prime,
                _ => rt.b + rt.b_prime,
            })
            .sum();
        (sum * log2p - tt * backoff).max(0.0)
    });

    let outcomes = [
        mac_feasibility(&slot_inputs[0], designed_private[0], designed_common)?,
        mac_feasibility(&slot_inputs[1], designed_private[1], designed_common)?,
    ];

    let quant_bits_used = [quantizers[0].total_bits, quantizers[1].total_bits];
    let quant_budget_bits = [quantizers[0].total_budget, quantizers[1].total_budget];
    let overloads = quantizers[0].total_overloads + quantizers[1].total_overloads;
    let qbits_total = (quant_bits_used[0] + quant_bits_used[1]) as f64;

    // New common information left after relaying the quantization bits;
    // split (omega, 1 - omega) between the users.
    let shares = [plan.omega, 1.0 - plan.omega];
    let ach_common = outcomes[0].achieved[1].min(outcomes[1].achieved[1]);
    let new_common_ach = (ach_common - qbits_total).max(0.0);
    let new_common_des = (designed_common - qbits_total).max(0.0);
    let achieved_user_bits =
        [0, 1].map(|r| outcomes[r].achieved[0] + shares[r] * new_common_ach);
    let designed_user_bits = [0, 1].map(|r| designed_private[r] + shares[r] * new_common_des);

    let margin_min = [0, 1].map(|r| outcomes[r].margins.iter().copied().fold(f64::INFINITY, f64::min));
    let distortion_mean = distortions.iter().sum::<f64>() / distortions.len().max(1) as f64;
    let distortion_max = distortions.iter().copied().fold(0.0, f64::max);

    Ok(PhaseOutcome {
        outcomes,
        designed_user_bits,
        achieved_user_bits,
        margin_min,
        quant_bits_used,
        quant_budget_bits,
        distortion_mean,
        distortion_max,
        overloads,
        redraws,
    })
}

fn validate_ladder(snr_ladder: &[f64]) -> Result<(), SimError> {
    let max = snr_ladder.iter().copied().fold(f64::MIN, f64::max);
    let min = snr_ladder.iter().copied().fold(f64::MAX, f64::min);
    let decades = if snr_ladder.is_empty() {
        0.0
    } else {
        (max / min).log10()
    };
    if snr_ladder.len() < 3 || decades < 3.0 - 1e-9 {
        return Err(SimError::InsufficientLadder {
            points: snr_ladder.len(),
            decades,
        });
    }
    Ok(())
}

/// Monte Carlo DoF estimate at an explicit (delta_bar, omega) operating point.
#[allow(clippy::too_many_arguments)]
pub fn simulate_dof_at(
    cfg: &AntennaConfig,
    q: &QualityExponents,
    delta_bar: f64,
    omega: f64,
    target: Option<CornerLabel>,
    snr_ladder: &[f64],
    trials: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<SimReport, SimError> {
    validate_ladder(snr_ladder)?;
    if trials < 20 {
        return Err(SimError::TooFewTrials(trials));
    }
    if opts.eta >= opts.t_slots {
        return Err(SimError::EtaTooLarge {
            eta: opts.eta,
            t_slots: opts.t_slots,
        });
    }
    let mut ladder = snr_ladder.to_vec();
    ladder.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let loss = 1.0 - 1.0 / opts.s_phases as f64;
    let mut points = Vec::with_capacity(ladder.len());
    for (pi, &snr) in ladder.iter().enumerate() {
        let plan = PhasePlan::build(cfg, q, delta_bar, omega, opts.t_slots, opts.s_phases)?;
        let mut ach = [0.0f64; 2];
        let mut des = [0.0f64; 2];
        let mut margin_min = [f64::INFINITY; 2];
        let mut nonneg = [0usize; 2];
        let mut dist_sum = 0.0;
        let mut dist_max: f64 = 0.0;
        let mut qbits = 0.0;
        let mut qbudget = 0.0;
        let mut overloads = 0;
        let mut redraws = 0;
        for trial in 0..trials {
            let out = run_phase(cfg, q, &plan, snr, mix(seed, pi as u64 + 10, trial as u64), opts)?;
            for r in 0..2 {
                ach[r] += out.achieved_user_bits[r];
                des[r] += out.designed_user_bits[r];
                margin_min[r] = margin_min[r].min(out.margin_min[r]);
                nonneg[r] += usize::from(out.margin_min[r] >= 0.0);
            }
            dist_sum += out.distortion_mean;
            dist_max = dist_max.max(out.distortion_max);
            qbits += (out.quant_bits_used[0] + out.quant_bits_used[1]) as f64;
            qbudget = out.quant_budget_bits[0] + out.quant_budget_bits[1];
            overloads += out.overloads;
            redraws += out.redraws;
        }
        let norm = trials as f64 * opts.t_slots as f64;
        points.push(SnrPoint {
            snr,
            designed_rate: des.map(|x| loss * x / norm),
            achieved_rate: ach.map(|x| loss * x / norm),
            margin_min,
            margin_nonneg_frac: nonneg.map(|c| c as f64 / trials as f64),
            distortion_mean: dist_sum / trials as f64,
            distortion_max: dist_max,
            quant_bits_used_mean: qbits / trials as f64,
            quant_budget_bits: qbudget,
            overloads,
            redraws,
        });
    }

    // Regress over the top points, dropping the lowest when more than three
    // are available (constant-order terms dominate there).
    let start = usize::from(points.len() > 3);
    let mut d_hat = [0.0; 2];
    let mut d_stderr = [0.0; 2];
    for r in 0..2 {
        let pts: Vec<(f64, f64)> = points[start..]
            .iter()
            .map(|p| (p.snr.log2(), p.achieved_rate[r]))
            .collect();
        let (slope, se) = ols_slope_stderr(&pts);
        d_hat[r] = slope;
        d_stderr[r] = se;
    }

    let plan = PhasePlan::build(cfg, q, delta_bar, omega, opts.t_slots, opts.s_phases)?;
    Ok(SimReport {
        cfg: *cfg,
        target,
        delta_bar,
        omega,
        designed_dof: plan.designed_dof(q),
        t_slots: opts.t_slots,
        s_phases: opts.s_phases,
        trials,
        seed,
        points,
        d_hat,
        d_stderr,
    })
}

/// Monte Carlo DoF estimate for a calibrated corner-point target.
pub fn simulate_dof(
    cfg: &AntennaConfig,
    q: &QualityExponents,
    target: CornerLabel,
    snr_ladder: &[f64],
    trials: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<SimReport, SimError> {
    let (delta_bar, omega) = calibrate(cfg, q, target)?;
    simulate_dof_at(
        cfg,
        q,
        delta_bar,
        omega,
        Some(target),
        snr_ladder,
        trials,
        seed,
        opts,
    )
}
