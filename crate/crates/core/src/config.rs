//! Antenna configuration and CSIT quality exponents.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when validating exponent inputs.
pub const EXPONENT_TOL: f64 = 1e-12;
/// Tolerance on sequence means matching the declared averages.
pub const MEAN_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("antenna counts must be at least 1 (got M={m}, N={n})")]
    ZeroAntennas { m: usize, n: usize },
    #[error("exponent {name} = {value} outside [0, 1]")]
    ExponentOutOfRange { name: String, value: f64 },
    #[error("alpha must not exceed beta: {name} has alpha={alpha}, beta={beta}")]
    AlphaAboveBeta { name: String, alpha: f64, beta: f64 },
    #[error("users must be labeled so that alpha_bar(2) <= alpha_bar(1), got ({a1}, {a2})")]
    UserLabeling { a1: f64, a2: f64 },
    #[error("{name} sequence mean {mean} does not match declared average {avg}")]
    SequenceMeanMismatch { name: String, mean: f64, avg: f64 },
    #[error("per-slot sequences must share one length (got {0:?})")]
    SequenceLengthMismatch(Vec<usize>),
}

/// Broadcast channel (one transmitter) or interference channel (two transmitters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Bc,
    Ic,
}

/// Symmetric two-user antenna setup: M transmit antennas per transmitter,
/// N receive antennas per receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntennaConfig {
    pub m_tx: usize,
    pub n_rx: usize,
    pub kind: ChannelKind,
}

impl AntennaConfig {
    pub fn new(m_tx: usize, n_rx: usize, kind: ChannelKind) -> Result<Self, ConfigError> {
        if m_tx == 0 || n_rx == 0 {
            return Err(ConfigError::ZeroAntennas { m: m_tx, n: n_rx });
        }
        Ok(Self { m_tx, n_rx, kind })
    }

    /// M > 2N is DoF-equivalent to M = 2N, so all formulas run on this value.
    pub fn effective_m(&self) -> usize {
        self.m_tx.min(2 * self.n_rx)
    }

    /// min{M, N}, the single-user DoF cap.
    pub fn min_mn(&self) -> usize {
        self.m_tx.min(self.n_rx)
    }

    /// min{M, 2N}, evaluated on the effective M.
    pub fn min_m2n(&self) -> usize {
        self.effective_m()
    }

    /// Sum-DoF cap of the full-CSIT region for this channel kind.
    pub fn sum_dof_cap(&self) -> usize {
        let m = self.effective_m();
        let n = self.n_rx;
        match self.kind {
            ChannelKind::Bc => m.min(2 * n),
            ChannelKind::Ic => (2 * m).min(2 * n).min(m.max(n)),
        }
    }

    /// True when the scheme's working regime N < M <= 2N holds after clamping.
    pub fn scheme_regime(&self) -> bool {
        self.effective_m() > self.n_rx
    }
}

/// Current (alpha) and delayed (beta) CSIT quality exponents for both users,
/// as long-term averages plus optional per-slot sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityExponents {
    alpha_avg: [f64; 2],
    beta_avg: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha_seq: Option<[Vec<f64>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta_seq: Option<[Vec<f64>; 2]>,
}

fn check_range(name: &str, value: f64) -> Result<(), ConfigError> {
    if !(-EXPONENT_TOL..=1.0 + EXPONENT_TOL).contains(&value) {
        return Err(ConfigError::ExponentOutOfRange {
            name: name.to_string(),
            value,
        });
    }
    Ok(())
}

impl QualityExponents {
    pub fn from_averages(alpha_avg: [f64; 2], beta_avg: [f64; 2]) -> Result<Self, ConfigError> {
        Self::new(alpha_avg, beta_avg, None, None)
    }

    pub fn with_sequences(
        alpha_avg: [f64; 2],
        beta_avg: [f64; 2],
        alpha_seq: [Vec<f64>; 2],
        beta_seq: [Vec<f64>; 2],
    ) -> Result<Self, ConfigError> {
        Self::new(alpha_avg, beta_avg, Some(alpha_seq), Some(beta_seq))
    }

    /// Builds sequences from their own means.
    pub fn from_sequences(
        alpha_seq: [Vec<f64>; 2],
        beta_seq: [Vec<f64>; 2],
    ) -> Result<Self, ConfigError> {
        let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len().max(1) as f64;
        let alpha_avg = [mean(&alpha_seq[0]), mean(&alpha_seq[1])];
        let beta_avg = [mean(&beta_seq[0]), mean(&beta_seq[1])];
        Self::new(alpha_avg, beta_avg, Some(alpha_seq), Some(beta_seq))
    }

    fn new(
        alpha_avg: [f64; 2],
        beta_avg: [f64; 2],
        alpha_seq: Option<[Vec<f64>; 2]>,
        beta_seq: Option<[Vec<f64>; 2]>,
    ) -> Result<Self, ConfigError> {
        for (i, (&a, &b)) in alpha_avg.iter().zip(beta_avg.iter()).enumerate() {
            check_range(&format!("alpha_bar({})", i + 1), a)?;
            check_range(&format!("beta_bar({})", i + 1), b)?;
            if a > b + EXPONENT_TOL {
                return Err(ConfigError::AlphaAboveBeta {
                    name: format!("user {}", i + 1),
                    alpha: a,
                    beta: b,
                });
            }
        }
        if alpha_avg[1] > alpha_avg[0] + EXPONENT_TOL {
            return Err(ConfigError::UserLabeling {
                a1: alpha_avg[0],
                a2: alpha_avg[1],
            });
        }
        if let (Some(aseq), Some(bseq)) = (&alpha_seq, &beta_seq) {
            let lens = vec![
                aseq[0].len(),
                aseq[1].len(),
                bseq[0].len(),
                bseq[1].len(),
            ];
            if lens.iter().any(|&l| l != lens[0]) || lens[0] == 0 {
                return Err(ConfigError::SequenceLengthMismatch(lens));
            }
            for i in 0..2 {
                for t in 0..lens[0] {
                    let (a, b) = (aseq[i][t], bseq[i][t]);
                    check_range(&format!("alpha_{t}({})", i + 1), a)?;
                    check_range(&format!("beta_{t}({})", i + 1), b)?;
                    if a > b + EXPONENT_TOL {
                        return Err(ConfigError::AlphaAboveBeta {
                            name: format!("user {} slot {t}", i + 1),
                            alpha: a,
                            beta: b,
                        });
                    }
                }
                let am = aseq[i].iter().sum::<f64>() / lens[0] as f64;
                let bm = bseq[i].iter().sum::<f64>() / lens[0] as f64;
                if (am - alpha_avg[i]).abs() > MEAN_TOL {
                    return Err(ConfigError::SequenceMeanMismatch {
                        name: format!("alpha({})", i + 1),
                        mean: am,
                        avg: alpha_avg[i],
                    });
                }
                if (bm - beta_avg[i]).abs() > MEAN_TOL {
                    return Err(ConfigError::SequenceMeanMismatch {
                        name: format!("beta({})", i + 1),
                        mean: bm,
                        avg: beta_avg[i],
                    });
                }
            }
        } else if alpha_seq.is_some() != beta_seq.is_some() {
            return Err(ConfigError::SequenceLengthMismatch(vec![]));
        }
        Ok(Self {
            alpha_avg,
            beta_avg,
            alpha_seq,
            beta_seq,
        })
    }

    pub fn alpha_avg(&self) -> [f64; 2] {
        self.alpha_avg
    }

    pub fn beta_avg(&self) -> [f64; 2] {
        self.beta_avg
    }

    pub fn min_beta(&self) -> f64 {
        self.beta_avg[0].min(self.beta_avg[1])
    }

    pub fn has_sequences(&self) -> bool {
        self.alpha_seq.is_some()
    }

    pub fn sequence_len(&self) -> Option<usize> {
        self.alpha_seq.as_ref().map(|s| s[0].len())
    }

    /// Per-slot current exponent for user `user` (0-based); falls back to the
    /// average when no sequence was supplied.
    pub fn slot_alpha(&self, user: usize, t: usize) -> f64 {
        match &self.alpha_seq {
            Some(seq) => seq[user][t % seq[user].len()],
            None => self.alpha_avg[user],
        }
    }

    pub fn slot_beta(&self, user: usize, t: usize) -> f64 {
        match &self.beta_seq {
            Some(seq) => seq[user][t % seq[user].len()],
            None => self.beta_avg[user],
        }
    }

    /// Exponent sequences of length `t_slots` for user `user`, replicating
    /// averages when no explicit sequence exists.
    pub fn alpha_slots(&self, user: usize, t_slots: usize) -> Vec<f64> {
        (0..t_slots).map(|t| self.slot_alpha(user, t)).collect()
    }

    pub fn beta_slots(&self, user: usize, t_slots: usize) -> Vec<f64> {
        (0..t_slots).map(|t| self.slot_beta(user, t)).collect()
    }
}
