//! Per-slot precoder construction: zero-forcing matrices aligned with the
//! null space of the relevant current channel estimate, plus seeded random
//! unit-column matrices known to every node.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{gaussian_matrix, ChannelSlot};
use crate::config::{AntennaConfig, ChannelKind};

use super::SimError;

/// Precoders for one slot. `u`/`u_prime` carry user 1's private symbols,
/// `v`/`v_prime` user 2's. `w2` exists only for the IC (second transmitter's
/// common precoder).
#[derive(Debug, Clone)]
pub struct SlotSignal {
    pub w1: DMatrix<Complex64>,
    pub w2: Option<DMatrix<Complex64>>,
    pub u: DMatrix<Complex64>,
    pub u_prime: DMatrix<Complex64>,
    pub v: DMatrix<Complex64>,
    pub v_prime: DMatrix<Complex64>,
}

fn normalize_columns(mut m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    for mut col in m.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col.scale_mut(1.0 / norm);
        }
    }
    m
}

fn random_unit_columns(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    normalize_columns(gaussian_matrix(rng, rows, cols, 1.0))
}

/// Orthonormal basis of the null space of `est` (an N x M matrix with
/// M > N), built by projecting random vectors onto the orthogonal
/// complement of the row space and running Gram-Schmidt.
pub fn null_space_basis(
    est: &DMatrix<Complex64>,
    dim: usize,
    rng: &mut impl Rng,
) -> Result<DMatrix<Complex64>, SimError> {
    let m = est.ncols();
    let gram = est * est.adjoint();
    let inv = gram
        .try_inverse()
        .ok_or(SimError::RankDeficient { attempts: 0 })?;
    let proj = DMatrix::identity(m, m) - est.adjoint() * inv * est;

    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::with_capacity(dim);
    let mut attempts = 0;
    while basis.len() < dim {
        attempts += 1;
        if attempts > 16 * dim {
            return Err(SimError::RankDeficient { attempts });
        }
        let mut v = &proj * gaussian_matrix(rng, m, 1, 1.0).column(0).into_owned();
        for b in &basis {
            let coef = b.dotc(&v);
            v -= b * coef;
        }
        let norm = v.norm();
        if norm < 1e-8 {
            continue;
        }
        basis.push(v / Complex64::new(norm, 0.0));
    }
    Ok(DMatrix::from_columns(&basis))
}

fn use_cols(m: &DMatrix<Complex64>, m_use: usize) -> DMatrix<Complex64> {
    if m.ncols() == m_use {
        m.clone()
    } else {
        m.columns(0, m_use).into_owned()
    }
}

/// Build the slot's precoders from the current estimates.
///
/// The zero-forcing targets are the channels through which each private
/// group would interfere: receiver 2's own channel in the BC, the cross
/// links in the IC.
pub fn make_precoders(
    slot: &ChannelSlot,
    cfg: &AntennaConfig,
    rng: &mut impl Rng,
) -> Result<SlotSignal, SimError> {
    let m_use = cfg.effective_m();
    let n = cfg.n_rx;
    let (est_u, est_v) = match cfg.kind {
        ChannelKind::Bc => (&slot.h_current[1], &slot.h_current[0]),
        ChannelKind::Ic => (&slot.h_current[2], &slot.h_current[1]),
    };
    let u = null_space_basis(&use_cols(est_u, m_use), m_use - n, rng)?;
    let v = null_space_basis(&use_cols(est_v, m_use), m_use - n, rng)?;
    let w1 = random_unit_columns(rng, m_use, m_use);
    let w2 = match cfg.kind {
        ChannelKind::Ic => Some(random_unit_columns(rng, m_use, m_use)),
        ChannelKind::Bc => None,
    };
    let u_prime = random_unit_columns(rng, m_use, n);
    let v_prime = random_unit_columns(rng, m_use, n);
    Ok(SlotSignal {
        w1,
        w2,
        u,
        u_prime,
        v,
        v_prime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_block;
    use crate::config::QualityExponents;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn null_space_of_row_vector_in_2_space() {
        let est = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = null_space_basis(&est, 1, &mut rng).unwrap();
        // Up to phase, the null space is [0, 1]^T.
        assert!(u[(0, 0)].norm() < 1e-12);
        assert!((u[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_forcing_against_estimate_not_true_channel() {
        let cfg = AntennaConfig::new(3, 2, ChannelKind::Bc).unwrap();
        let q = QualityExponents::from_averages([0.5, 0.5], [1.0, 1.0]).unwrap();
        let block = generate_block(&cfg, &q, 4, 1e3, 1, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for slot in &block {
            let sig = make_precoders(slot, &cfg, &mut rng).unwrap();
            let leak_est = (&slot.h_current[1] * &sig.u).norm() / slot.h_current[1].norm();
            assert!(leak_est < 1e-9, "estimate leakage {leak_est}");
            let leak_true = (&slot.h_true[1] * &sig.u).norm();
            assert!(leak_true > 1e-6, "true channel should leak at alpha < 1");
        }
    }

    #[test]
    fn ic_targets_cross_links() {
        let cfg = AntennaConfig::new(3, 2, ChannelKind::Ic).unwrap();
        let q = QualityExponents::from_averages([1.0, 1.0], [1.0, 1.0]).unwrap();
        let block = generate_block(&cfg, &q, 2, 1e3, 1, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let sig = make_precoders(&block[0], &cfg, &mut rng).unwrap();
        // u annihilates the estimate of H^(21), not H^(11).
        assert!((&block[0].h_current[2] * &sig.u).norm() < 1e-9);
        assert!((&block[0].h_current[0] * &sig.u).norm() > 1e-6);
        assert!((&block[0].h_current[1] * &sig.v).norm() < 1e-9);
    }

    #[test]
    fn columns_are_unit_norm() {
        let cfg = AntennaConfig::new(4, 2, ChannelKind::Bc).unwrap();
        let q = QualityExponents::from_averages([0.3, 0.3], [0.7, 0.7]).unwrap();
        let block = generate_block(&cfg, &q, 1, 1e2, 1, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sig = make_precoders(&block[0], &cfg, &mut rng).unwrap();
        for m in [&sig.w1, &sig.u, &sig.u_prime, &sig.v, &sig.v_prime] {
            for col in m.column_iter() {
                assert!((col.norm() - 1.0).abs() < 1e-12);
            }
        }
        // Orthonormal null basis.
        let gram = sig.u.adjoint() * &sig.u;
        assert!((gram - DMatrix::identity(2, 2)).norm() < 1e-10);
    }
}
