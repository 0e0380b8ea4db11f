//! Uniform mid-rise quantization of reconstructed interference vectors.
//!
//! The per-slot fractional bit budget is carried across the phase so the
//! phase total stays within one bit of the designed budget. Bits within a
//! slot are split as evenly as possible across the 2N real dimensions.

use num_complex::Complex64;

/// Quantized interference for one slot and one receiver.
#[derive(Debug, Clone)]
pub struct SlotQuant {
    pub quantized: Vec<Complex64>,
    /// Modeled quantization-noise variance per complex component, used as
    /// the effective-noise term in the MAC feasibility check.
    pub model_var: Vec<f64>,
    pub bits_used: u64,
    /// Mean squared error per complex component, measured on this slot.
    pub distortion: f64,
    pub overloads: u32,
}

/// Carries the fractional bit budget across a phase.
#[derive(Debug, Default)]
pub struct PhaseQuantizer {
    carry: f64,
    pub total_bits: u64,
    pub total_budget: f64,
    pub total_overloads: u64,
}

/// Quantize one real dimension with a `bits`-level uniform mid-rise
/// quantizer of range +/- 4 sigma. Zero bits maps everything to zero.
fn quantize_real(x: f64, bits: u32, sigma_r: f64) -> (f64, bool) {
    if bits == 0 || sigma_r <= 0.0 {
        return (0.0, false);
    }
    let range = 4.0 * sigma_r;
    let levels = (1u64 << bits) as f64;
    let step = 2.0 * range / levels;
    let idx = (x / step).floor();
    let max_idx = levels / 2.0 - 1.0;
    let min_idx = -levels / 2.0;
    let overload = idx > max_idx || idx < min_idx;
    let idx = idx.clamp(min_idx, max_idx);
    ((idx + 0.5) * step, overload)
}

fn model_var_real(bits: u32, sigma_r: f64) -> f64 {
    if bits == 0 {
        return sigma_r * sigma_r;
    }
    let step = 8.0 * sigma_r / (1u64 << bits) as f64;
    step * step / 12.0
}

impl PhaseQuantizer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Quantize one slot's reconstructed interference.
    ///
    /// `comp_var` is the planned variance per complex component (a function
    /// of the delayed estimates and power allocation, so the decoder can
    /// rebuild the same quantizer).
    pub fn quantize_slot(
        &mut self,
        iota: &[Complex64],
        comp_var: &[f64],
        budget_bits: f64,
    ) -> SlotQuant {
        assert_eq!(iota.len(), comp_var.len());
        let dims = 2 * iota.len();
        self.total_budget += budget_bits;
        let avail = budget_bits.max(0.0) + self.carry;
        let slot_bits = avail.floor() as u64;
        self.carry = avail - slot_bits as f64;
        self.total_bits += slot_bits;

        let base = if dims > 0 { slot_bits / dims as u64 } else { 0 };
        let rem = if dims > 0 { (slot_bits % dims as u64) as usize } else { 0 };
        let dim_bits = |d: usize| (base + u64::from(d < rem)) as u32;

        let mut quantized = Vec::with_capacity(iota.len());
        let mut model_var = Vec::with_capacity(iota.len());
        let mut distortion = 0.0;
        let mut overloads = 0;
        for (k, (&x, &var)) in iota.iter().zip(comp_var).enumerate() {
            let sigma_r = (var / 2.0).max(0.0).sqrt();
            let (b_re, b_im) = (dim_bits(2 * k), dim_bits(2 * k + 1));
            let (re, o1) = quantize_real(x.re, b_re, sigma_r);
            let (im, o2) = quantize_real(x.im, b_im, sigma_r);
            overloads += u32::from(o1) + u32::from(o2);
            let q = Complex64::new(re, im);
            distortion += (x - q).norm_sqr();
            quantized.push(q);
            model_var.push(model_var_real(b_re, sigma_r) + model_var_real(b_im, sigma_r));
        }
        self.total_overloads += overloads as u64;
        SlotQuant {
            quantized,
            model_var,
            bits_used: slot_bits,
            distortion: distortion / iota.len().max(1) as f64,
            overloads,
        }
    }
}
