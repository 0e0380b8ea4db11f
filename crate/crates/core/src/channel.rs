//! Fading-channel and CSIT-estimate generation.
//!
//! True channels are i.i.d. unit-variance circularly-symmetric complex
//! Gaussian across slots and links. Current and delayed estimates are the
//! true channel minus independent Gaussian error matrices whose entry
//! variances decay as P^-alpha and P^-beta respectively.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{AntennaConfig, ChannelKind, QualityExponents};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("need at least 2 SNR points and 1000 samples each (got {points} points, min {samples} samples)")]
    InsufficientSamples { points: usize, samples: usize },
    #[error("snr must exceed 1 (got {0})")]
    SnrTooLow(f64),
    #[error("dump parse error: {0}")]
    Dump(String),
}

/// Index of a point-to-point link within a slot.
///
/// BC: `Direct(i)` is receiver i's channel H^(i). IC: `Direct(i)` is H^(ii)
/// and `Cross(i)` is the cross link whose CSIT carries user i's exponents
/// (H^(12) for i = 0, H^(21) for i = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkId {
    Direct(usize),
    Cross(usize),
}

/// One time slot: true channels plus current and delayed CSIT estimates for
/// every link, with the exponents they were generated at.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSlot {
    pub slot_index: usize,
    pub snr: f64,
    /// BC: [H^(1), H^(2)]. IC: [H^(11), H^(12), H^(21), H^(22)].
    pub h_true: Vec<DMatrix<Complex64>>,
    pub h_current: Vec<DMatrix<Complex64>>,
    pub h_delayed: Vec<DMatrix<Complex64>>,
    /// Slot index at which the delayed estimates become available (t + eta).
    pub delayed_available_at: usize,
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

impl ChannelSlot {
    fn link_pos(&self, kind: ChannelKind, link: LinkId) -> usize {
        match (kind, link) {
            (ChannelKind::Bc, LinkId::Direct(i)) | (ChannelKind::Bc, LinkId::Cross(i)) => i,
            (ChannelKind::Ic, LinkId::Direct(i)) => 3 * i, // 0 -> H^(11), 1 -> H^(22)
            (ChannelKind::Ic, LinkId::Cross(i)) => 1 + i,  // 0 -> H^(12), 1 -> H^(21)
        }
    }

    pub fn link_true(&self, kind: ChannelKind, link: LinkId) -> &DMatrix<Complex64> {
        &self.h_true[self.link_pos(kind, link)]
    }

    pub fn link_current(&self, kind: ChannelKind, link: LinkId) -> &DMatrix<Complex64> {
        &self.h_current[self.link_pos(kind, link)]
    }

    pub fn link_delayed(&self, kind: ChannelKind, link: LinkId) -> &DMatrix<Complex64> {
        &self.h_delayed[self.link_pos(kind, link)]
    }
}

/// Complex Gaussian matrix with per-entry variance `var` (split across the
/// real and imaginary parts).
pub fn gaussian_matrix(
    rng: &mut impl Rng,
    rows: usize,
    cols: usize,
    var: f64,
) -> DMatrix<Complex64> {
    let std = (var / 2.0).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(
            std * gauss(rng),
            std * gauss(rng),
        )
    })
}

fn gauss(rng: &mut impl Rng) -> f64 {
    // Box-Muller keeps us independent of distribution-crate API churn.
    loop {
        let u: f64 = rng.gen::<f64>();
        if u > f64::MIN_POSITIVE {
            let v: f64 = rng.gen::<f64>();
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

/// Exponents for user `i` apply to the link whose CSIT matters for that
/// user: receiver i's own channel in the BC, the cross link in the IC.
fn user_of_link(kind: ChannelKind, pos: usize) -> Option<usize> {
    match (kind, pos) {
        (ChannelKind::Bc, i) => Some(i),
        (ChannelKind::Ic, 1) => Some(0), // H^(12)
        (ChannelKind::Ic, 2) => Some(1), // H^(21)
        _ => None, // IC direct links carry no useful CSIT
    }
}

/// Generate `t_slots` slots of channels and estimates, deterministic in `seed`.
pub fn generate_block(
    cfg: &AntennaConfig,
    q: &QualityExponents,
    t_slots: usize,
    snr: f64,
    eta: usize,
    seed: u64,
) -> Result<Vec<ChannelSlot>, ChannelError> {
    if snr <= 1.0 {
        return Err(ChannelError::SnrTooLow(snr));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m) = (cfg.n_rx, cfg.m_tx);
    let n_links = match cfg.kind {
        ChannelKind::Bc => 2,
        ChannelKind::Ic => 4,
    };
    let mut block = Vec::with_capacity(t_slots);
    for t in 0..t_slots {
        let alpha = [q.slot_alpha(0, t), q.slot_alpha(1, t)];
        let beta = [q.slot_beta(0, t), q.slot_beta(1, t)];
        let mut h_true = Vec::with_capacity(n_links);
        let mut h_current = Vec::with_capacity(n_links);
        let mut h_delayed = Vec::with_capacity(n_links);
        for pos in 0..n_links {
            let h = gaussian_matrix(&mut rng, n, m, 1.0);
            let (a, b) = match user_of_link(cfg.kind, pos) {
                Some(u) => (alpha[u], beta[u]),
                None => (0.0, 0.0),
            };
            let e_c = gaussian_matrix(&mut rng, n, m, snr.powf(-a));
            let e_d = gaussian_matrix(&mut rng, n, m, snr.powf(-b));
            h_current.push(&h - &e_c);
            h_delayed.push(&h - &e_d);
            h_true.push(h);
        }
        block.push(ChannelSlot {
            slot_index: t,
            snr,
            h_true,
            h_current,
            h_delayed,
            delayed_available_at: t + eta,
            alpha,
            beta,
        });
    }
    Ok(block)
}

/// Least-squares estimate of the decay exponent of a mean-squared-error
/// sequence against an SNR ladder: the slope of -log(mse) versus log P.
pub fn measured_exponent(
    mse_per_snr: &[(f64, Vec<f64>)],
) -> Result<f64, ChannelError> {
    let min_samples = mse_per_snr.iter().map(|(_, s)| s.len()).min().unwrap_or(0);
    if mse_per_snr.len() < 2 || min_samples < 1000 {
        return Err(ChannelError::InsufficientSamples {
            points: mse_per_snr.len(),
            samples: min_samples,
        });
    }
    let pts: Vec<(f64, f64)> = mse_per_snr
        .iter()
        .map(|(p, samples)| {
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            (p.ln(), -mean.ln())
        })
        .collect();
    Ok(ols_slope(&pts))
}

/// Ordinary least squares slope of y against x.
pub fn ols_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let sxx = pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    sxy / sxx
}

/// OLS slope with the standard error of the slope estimate.
pub fn ols_slope_stderr(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let slope = ols_slope(pts);
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let intercept = my - slope * mx;
    let sxx = pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    if pts.len() <= 2 {
        return (slope, 0.0);
    }
    let sse = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>();
    (slope, (sse / (n - 2.0) / sxx).sqrt())
}

// --- block dump/load ---------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MatrixDump {
    rows: usize,
    cols: usize,
    /// Row-major [re, im] pairs.
    entries: Vec<[f64; 2]>,
}

fn dump_matrix(m: &DMatrix<Complex64>) -> MatrixDump {
    MatrixDump {
        rows: m.nrows(),
        cols: m.ncols(),
        entries: (0..m.nrows())
            .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
            .map(|(r, c)| [m[(r, c)].re, m[(r, c)].im])
            .collect(),
    }
}

fn load_matrix(d: &MatrixDump) -> Result<DMatrix<Complex64>, ChannelError> {
    if d.entries.len() != d.rows * d.cols {
        return Err(ChannelError::Dump(format!(
            "matrix {}x{} with {} entries",
            d.rows,
            d.cols,
            d.entries.len()
        )));
    }
    Ok(DMatrix::from_fn(d.rows, d.cols, |r, c| {
        let e = d.entries[r * d.cols + c];
        Complex64::new(e[0], e[1])
    }))
}

#[derive(Serialize, Deserialize)]
struct SlotDump {
    slot_index: usize,
    snr: f64,
    h_true: Vec<MatrixDump>,
    h_current: Vec<MatrixDump>,
    h_delayed: Vec<MatrixDump>,
    delayed_available_at: usize,
    alpha: [f64; 2],
    beta: [f64; 2],
}

/// Self-describing block dump: header with the generating parameters plus
/// every slot's matrices.
#[derive(Serialize, Deserialize)]
pub struct BlockDump {
    pub cfg: AntennaConfig,
    pub q: QualityExponents,
    pub seed: u64,
    pub snr: f64,
    slots: Vec<SlotDump>,
}

pub fn dump_block(
    cfg: &AntennaConfig,
    q: &QualityExponents,
    seed: u64,
    block: &[ChannelSlot],
) -> BlockDump {
    BlockDump {
        cfg: *cfg,
        q: q.clone(),
        seed,
        snr: block.first().map(|s| s.snr).unwrap_or(0.0),
        slots: block
            .iter()
            .map(|s| SlotDump {
                slot_index: s.slot_index,
                snr: s.snr,
                h_true: s.h_true.iter().map(dump_matrix).collect(),
                h_current: s.h_current.iter().map(dump_matrix).collect(),
                h_delayed: s.h_delayed.iter().map(dump_matrix).collect(),
                delayed_available_at: s.delayed_available_at,
                alpha: s.alpha,
                beta: s.beta,
            })
            .collect(),
    }
}

pub fn load_block(dump: &BlockDump) -> Result<Vec<ChannelSlot>, ChannelError> {
    dump.slots
        .iter()
        .map(|s| {
            Ok(ChannelSlot {
                slot_index: s.slot_index,
                snr: s.snr,
                h_true: s.h_true.iter().map(load_matrix).collect::<Result<_, _>>()?,
                h_current: s
                    .h_current
                    .iter()
                    .map(load_matrix)
                    .collect::<Result<_, _>>()?,
                h_delayed: s
                    .h_delayed
                    .iter()
                    .map(load_matrix)
                    .collect::<Result<_, _>>()?,
                delayed_available_at: s.delayed_available_at,
                alpha: s.alpha,
                beta: s.beta,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bc32() -> AntennaConfig {
        AntennaConfig::new(3, 2, ChannelKind::Bc).unwrap()
    }

    #[test]
    fn same_seed_gives_identical_block() {
        let cfg = bc32();
        let q = QualityExponents::from_averages([0.5, 0.5], [1.0, 1.0]).unwrap();
        let b1 = generate_block(&cfg, &q, 4, 100.0, 1, 42).unwrap();
        let b2 = generate_block(&cfg, &q, 4, 100.0, 1, 42).unwrap();
        assert_eq!(b1, b2);
        let b3 = generate_block(&cfg, &q, 4, 100.0, 1, 43).unwrap();
        assert_ne!(b1, b3);
    }

    #[test]
    fn zero_alpha_means_unit_error_variance() {
        let cfg = bc32();
        let q = QualityExponents::from_averages([0.0, 0.0], [0.0, 0.0]).unwrap();
        let block = generate_block(&cfg, &q, 2000, 1e4, 1, 7).unwrap();
        let mse: f64 = block
            .iter()
            .map(|s| (&s.h_true[0] - &s.h_current[0]).norm_squared() / 6.0)
            .sum::<f64>()
            / block.len() as f64;
        assert!((0.8..1.2).contains(&mse), "mse = {mse}");
    }

    #[test]
    fn perfect_current_csit_scales_as_inverse_snr() {
        let cfg = bc32();
        let q = QualityExponents::from_averages([1.0, 1.0], [1.0, 1.0]).unwrap();
        let p = 1e4;
        let block = generate_block(&cfg, &q, 10_000, p, 1, 3).unwrap();
        let mse: f64 = block
            .iter()
            .map(|s| (&s.h_true[0] - &s.h_current[0]).norm_squared() / 6.0)
            .sum::<f64>()
            / block.len() as f64;
        assert!(
            (0.5e-4..2e-4).contains(&mse),
            "mse = {mse}, expected near 1e-4"
        );
    }

    #[test]
    fn rejects_low_snr() {
        let cfg = bc32();
        let q = QualityExponents::from_averages([0.0, 0.0], [0.0, 0.0]).unwrap();
        assert!(matches!(
            generate_block(&cfg, &q, 1, 0.5, 1, 0),
            Err(ChannelError::SnrTooLow(_))
        ));
    }

    #[test]
    fn measured_exponent_on_synthetic_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (truth, _) in [(0.5, ()), (0.0, ()), (1.0, ())] {
            let data: Vec<(f64, Vec<f64>)> = [1e2, 1e3, 1e4]
                .iter()
                .map(|&p: &f64| {
                    let var = p.powf(-truth);
                    let samples: Vec<f64> = (0..2000)
                        .map(|_| {
                            let g = gauss(&mut rng);
                            var * g * g
                        })
                        .collect();
                    (p, samples)
                })
                .collect();
            let est = measured_exponent(&data).unwrap();
            assert!(
                (est - truth).abs() < 0.05,
                "exponent {truth}: estimated {est}"
            );
        }
    }

    #[test]
    fn measured_exponent_needs_enough_samples() {
        let data = vec![(1e2, vec![1.0; 10]), (1e3, vec![1.0; 10])];
        assert!(matches!(
            measured_exponent(&data),
            Err(ChannelError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn dump_roundtrip() {
        let cfg = AntennaConfig::new(2, 1, ChannelKind::Ic).unwrap();
        let q = QualityExponents::from_averages([0.5, 0.3], [0.9, 0.8]).unwrap();
        let block = generate_block(&cfg, &q, 3, 50.0, 1, 11).unwrap();
        let dump = dump_block(&cfg, &q, 11, &block);
        let text = serde_json::to_string(&dump).unwrap();
        let parsed: BlockDump = serde_json::from_str(&text).unwrap();
        let restored = load_block(&parsed).unwrap();
        assert_eq!(block, restored);
    }
}
