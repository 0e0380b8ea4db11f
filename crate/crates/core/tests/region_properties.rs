//! Geometry oracles for the DoF regions: the vertex enumeration must agree
//! with a brute-force grid evaluation of the defining inequalities, and the
//! regions must nest the way the bounds say they do.

use mimo_dof::{
    baseline_region, corner_points, inner_region, outer_region, sufficient_delayed_threshold,
    AntennaConfig, BaselineMode, ChannelKind, QualityExponents,
};

fn grid_configs() -> Vec<AntennaConfig> {
    let mut out = Vec::new();
    for kind in [ChannelKind::Bc, ChannelKind::Ic] {
        for m in 1..=4 {
            for n in 1..=3 {
                out.push(AntennaConfig::new(m, n, kind).unwrap());
            }
        }
    }
    out
}

fn exponent_grid() -> Vec<QualityExponents> {
    let mut out = Vec::new();
    let steps = [0.0, 0.25, 0.5, 0.75, 1.0];
    for &a1 in &steps {
        for &a2 in &steps {
            for &b1 in &steps {
                for &b2 in &steps {
                    // Labeling requires alpha2 <= alpha1 and alpha <= beta.
                    if a2 <= a1 && a1 <= b1 && a2 <= b2 {
                        out.push(QualityExponents::from_averages([a1, a2], [b1, b2]).unwrap());
                    }
                }
            }
        }
    }
    out
}

/// Direct evaluation of the bound inequalities, written out from scratch so
/// the half-plane construction has an independent oracle.
fn outer_membership(cfg: &AntennaConfig, q: &QualityExponents, d1: f64, d2: f64) -> bool {
    let k = cfg.min_mn() as f64;
    let m2n = cfg.min_m2n() as f64;
    let cap = cfg.sum_dof_cap() as f64;
    let [a1, a2] = q.alpha_avg();
    let w = (m2n - k) / m2n;
    let tol = 1e-9;
    d1 >= -tol
        && d2 >= -tol
        && d1 <= k + tol
        && d2 <= k + tol
        && d1 + d2 <= cap + tol
        && d1 / k + d2 / m2n <= 1.0 + w * a1 + tol
        && d1 / m2n + d2 / k <= 1.0 + w * a2 + tol
}

fn inner_membership(cfg: &AntennaConfig, q: &QualityExponents, d1: f64, d2: f64) -> bool {
    if !outer_membership(cfg, q, d1, d2) {
        return false;
    }
    let thr = sufficient_delayed_threshold(cfg, q);
    let mb = q.min_beta();
    if mb >= thr {
        return true;
    }
    let k = cfg.min_mn() as f64;
    let m2n = cfg.min_m2n() as f64;
    d1 + d2 <= k + (m2n - k) * mb + 1e-9
}

#[test]
fn max_weighted_matches_grid_search() {
    let weights = [(1.0, 1.0), (1.0, 0.3), (0.2, 1.0), (2.0, 1.5)];
    for cfg in grid_configs() {
        for q in [
            QualityExponents::from_averages([0.5, 0.25], [1.0, 0.75]).unwrap(),
            QualityExponents::from_averages([0.75, 0.5], [0.75, 0.5]).unwrap(),
            QualityExponents::from_averages([0.0, 0.0], [0.25, 0.25]).unwrap(),
        ] {
            let outer = outer_region(&cfg, &q).unwrap();
            let inner = inner_region(&cfg, &q).unwrap();
            let k = cfg.min_mn() as f64;
            let step = 0.02;
            let cells = (k / step).round() as usize;
            for &(w1, w2) in &weights {
                let mut best_outer = f64::MIN;
                let mut best_inner = f64::MIN;
                for i in 0..=cells {
                    for j in 0..=cells {
                        let (d1, d2) = (i as f64 * step, j as f64 * step);
                        let v = w1 * d1 + w2 * d2;
                        if outer_membership(&cfg, &q, d1, d2) {
                            best_outer = best_outer.max(v);
                        }
                        if inner_membership(&cfg, &q, d1, d2) {
                            best_inner = best_inner.max(v);
                        }
                    }
                }
                // Grid misses the true optimum by at most one cell diagonal.
                let slack = (w1 + w2) * step + 1e-9;
                let vo = outer.max_weighted(w1, w2);
                let vi = inner.max_weighted(w1, w2);
                assert!(
                    (vo - best_outer).abs() <= slack,
                    "outer {cfg:?} w=({w1},{w2}): vertices {vo}, grid {best_outer}"
                );
                assert!(
                    (vi - best_inner).abs() <= slack,
                    "inner {cfg:?} w=({w1},{w2}): vertices {vi}, grid {best_inner}"
                );
            }
        }
    }
}

#[test]
fn regions_nest_correctly() {
    for cfg in grid_configs() {
        for q in exponent_grid() {
            let outer = outer_region(&cfg, &q).unwrap();
            let inner = inner_region(&cfg, &q).unwrap();
            let full = baseline_region(&cfg, BaselineMode::FullCsit).unwrap();
            let none = baseline_region(&cfg, BaselineMode::NoCsit).unwrap();
            for &v in inner.vertices() {
                assert!(outer.contains(v, 1e-9), "inner vertex {v:?} outside outer");
                assert!(full.contains(v, 1e-9), "inner vertex {v:?} outside full-CSIT");
            }
            for &v in none.vertices() {
                // Delayed feedback never hurts relative to the no-CSIT
                // time-sharing baseline (BC case; the IC cap can exceed the
                // inner bound when M < N, where the scheme does not apply).
                if cfg.kind == ChannelKind::Bc {
                    assert!(inner.contains(v, 1e-9), "no-CSIT vertex {v:?} outside inner");
                }
            }
        }
    }
}

#[test]
fn corner_points_are_inner_vertices() {
    for cfg in grid_configs() {
        if !cfg.scheme_regime() {
            continue;
        }
        for q in exponent_grid() {
            let inner = inner_region(&cfg, &q).unwrap();
            for cp in corner_points(&cfg, &q) {
                assert!(
                    inner.contains((cp.d1, cp.d2), 1e-9),
                    "{} = ({}, {}) outside inner region for {cfg:?}",
                    cp.label,
                    cp.d1,
                    cp.d2
                );
            }
        }
    }
}

#[test]
fn vertices_satisfy_every_halfplane() {
    for cfg in grid_configs() {
        for q in exponent_grid() {
            for region in [outer_region(&cfg, &q).unwrap(), inner_region(&cfg, &q).unwrap()] {
                for &v in region.vertices() {
                    for hp in region.halfplanes() {
                        assert!(
                            hp.satisfied(v, 1e-9),
                            "vertex {v:?} violates {hp:?} for {cfg:?}"
                        );
                    }
                }
            }
        }
    }
}
