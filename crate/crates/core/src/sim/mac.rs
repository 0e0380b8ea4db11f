//! Stacked multiple-access rate feasibility for one receiver over one phase.
//!
//! Each slot contributes a 2N-dimensional observation: the received signal
//! with the receiver's own quantized interference removed on top, the other
//! receiver's quantized interference underneath. The block is diagonal
//! across slots, so mutual information decomposes into per-slot log-dets.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::SimError;

/// Effective channels and noise for one slot, already scaled by the symbol
/// standard deviations.
#[derive(Debug, Clone)]
pub struct SlotMacInput {
    /// 2N x (common dims); zero in the bottom rows.
    pub g_common: DMatrix<Complex64>,
    /// 2N x M: zero-forced group then random-precoder group.
    pub g_private: DMatrix<Complex64>,
    /// 2N x 2N Hermitian effective noise covariance.
    pub noise_cov: DMatrix<Complex64>,
}

/// Result of the three-constraint feasibility check (units: bits per phase).
#[derive(Debug, Clone, Copy)]
pub struct MacOutcome {
    /// I(private; y | common), I(common; y | private), I(both; y).
    pub mi: [f64; 3],
    /// designed private bits, designed common bits.
    pub designed: [f64; 2],
    /// mi minus the designed load, per constraint.
    pub margins: [f64; 3],
    /// Feasible (private, common) bits: the design when all margins are
    /// nonnegative, else clipped to the nearest sum-limited MAC corner.
    pub achieved: [f64; 2],
}

/// log2 det of a Hermitian positive-definite matrix via Cholesky.
fn log2_det(m: &DMatrix<Complex64>) -> Result<f64, SimError> {
    let n = m.nrows();
    let chol = m
        .clone()
        .cholesky()
        .or_else(|| {
            let ridge = DMatrix::identity(n, n) * Complex64::new(1e-12, 0.0);
            (m + ridge).cholesky()
        })
        .ok_or(SimError::NotPositiveDefinite)?;
    let l = chol.l();
    Ok(2.0 * (0..n).map(|i| l[(i, i)].re.ln()).sum::<f64>() / std::f64::consts::LN_2)
}

fn gram(g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    g * g.adjoint()
}

/// Gaussian-input mutual-information margins for the designed rate pair.
pub fn mac_feasibility(
    slots: &[SlotMacInput],
    designed_private_bits: f64,
    designed_common_bits: f64,
) -> Result<MacOutcome, SimError> {
    let mut mi = [0.0; 3];
    for s in slots {
        let base = log2_det(&s.noise_cov)?;
        let s_priv = gram(&s.g_private);
        let s_com = gram(&s.g_common);
        mi[0] += log2_det(&(&s.noise_cov + &s_priv))? - base;
        mi[1] += log2_det(&(&s.noise_cov + &s_com))? - base;
        mi[2] += log2_det(&(&s.noise_cov + s_priv + s_com))? - base;
    }
    let dp = designed_private_bits.max(0.0);
    let dc = designed_common_bits.max(0.0);
    let margins = [mi[0] - dp, mi[1] - dc, mi[2] - dp - dc];
    let ach_c = dc.min(mi[1]).max(0.0);
    let ach_p = dp.min(mi[0]).min(mi[2] - ach_c).max(0.0);
    Ok(MacOutcome {
        mi,
        designed: [dp, dc],
        margins,
        achieved: [ach_p, ach_c],
    })
}
