//! Acceptance suite: one test per release criterion, each printing a single
//! PASS line (run with `--nocapture` to see them). Tolerances are stated
//! inline; a failed assertion is the FAIL line.

use std::time::Instant;

use mimo_dof::{
    active_corner_labels, baseline_region, build_phase_plan, calibrate, corner_points,
    general_dof_point, generate_block, inner_region, measured_exponent, outer_region, run_phase,
    simulate_dof, sufficient_delayed_threshold, AntennaConfig, ChannelKind, CornerLabel,
    QualityExponents, SimOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bc(m: usize, n: usize) -> AntennaConfig {
    AntennaConfig::new(m, n, ChannelKind::Bc).unwrap()
}

fn q(a: [f64; 2], b: [f64; 2]) -> QualityExponents {
    QualityExponents::from_averages(a, b).unwrap()
}

fn grid_configs() -> Vec<AntennaConfig> {
    let mut out = Vec::new();
    for kind in [ChannelKind::Bc, ChannelKind::Ic] {
        for m in 2..=4 {
            for n in 1..=3 {
                out.push(AntennaConfig::new(m, n, kind).unwrap());
            }
        }
    }
    out
}

fn exponent_grid() -> Vec<QualityExponents> {
    let steps = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut out = Vec::new();
    for &a1 in &steps {
        for &a2 in &steps {
            for &b1 in &steps {
                for &b2 in &steps {
                    if a2 <= a1 && a1 <= b1 && a2 <= b2 {
                        out.push(q([a1, a2], [b1, b2]));
                    }
                }
            }
        }
    }
    out
}

fn assert_corner_set(cfg: &AntennaConfig, qq: &QualityExponents, want: &[(CornerLabel, f64, f64)]) {
    let got = corner_points(cfg, qq);
    assert_eq!(
        got.len(),
        want.len(),
        "corner count mismatch: got {got:?}, wanted {want:?}"
    );
    for &(label, d1, d2) in want {
        let cp = got
            .iter()
            .find(|c| c.label == label)
            .unwrap_or_else(|| panic!("{label} missing from {got:?}"));
        assert!(
            (cp.d1 - d1).abs() <= 1e-9 && (cp.d2 - d2).abs() <= 1e-9,
            "{label}: got ({}, {}), wanted ({d1}, {d2})",
            cp.d1,
            cp.d2
        );
    }
}

#[test]
fn criterion_01_corner_point_fixtures() {
    let start = Instant::now();
    let cfg = bc(3, 2);
    assert_corner_set(
        &cfg,
        &q([0.5, 0.5], [1.0, 1.0]),
        &[
            (CornerLabel::DStar, 2.0, 0.5),
            (CornerLabel::BStar, 0.5, 2.0),
            (CornerLabel::CStar, 1.4, 1.4),
        ],
    );
    assert_corner_set(
        &cfg,
        &q([0.8, 0.8], [1.0, 1.0]),
        &[
            (CornerLabel::DStar, 2.0, 0.8),
            (CornerLabel::BStar, 0.8, 2.0),
            (CornerLabel::EStar, 1.4, 1.6),
            (CornerLabel::FStar, 1.6, 1.4),
        ],
    );
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "took {dt:?}, budget 1 s");
    println!("PASS criterion 1: corner-point fixtures exact to 1e-9 in {dt:?}");
}

#[test]
fn criterion_02_region_coincidence_sweep() {
    let start = Instant::now();
    let mut checked = 0usize;
    for cfg in grid_configs() {
        for qq in exponent_grid() {
            let outer = outer_region(&cfg, &qq).unwrap();
            let inner = inner_region(&cfg, &qq).unwrap();
            let sufficient = qq.min_beta() >= sufficient_delayed_threshold(&cfg, &qq) - 1e-12;
            let coincide = inner.equals(&outer, 1e-9);
            assert_eq!(
                coincide, sufficient,
                "{cfg:?} alpha={:?} beta={:?}: coincide={coincide}, sufficient={sufficient}",
                qq.alpha_avg(),
                qq.beta_avg()
            );
            checked += 1;
        }
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "took {dt:?}, budget 30 s");
    println!("PASS criterion 2: inner/outer coincidence on {checked} grid cases in {dt:?}");
}

#[test]
fn criterion_03_calibration_consistency() {
    let mut checked = 0usize;
    for cfg in grid_configs() {
        if !cfg.scheme_regime() {
            continue;
        }
        for qq in exponent_grid() {
            for cp in corner_points(&cfg, &qq) {
                let (delta_bar, omega) = calibrate(&cfg, &qq, cp.label).unwrap();
                let (d1, d2) = general_dof_point(&cfg, &qq, delta_bar, omega).unwrap();
                assert!(
                    (d1 - cp.d1).abs() <= 1e-9 && (d2 - cp.d2).abs() <= 1e-9,
                    "{cfg:?} {}: calibrated to ({d1}, {d2}), corner ({}, {})",
                    cp.label,
                    cp.d1,
                    cp.d2
                );
                checked += 1;
            }
            // Every active label must calibrate even when its coordinates
            // coincide with another corner.
            for label in active_corner_labels(&cfg, &qq) {
                calibrate(&cfg, &qq, label).unwrap();
            }
        }
    }
    println!("PASS criterion 3: calibration consistent to 1e-9 on {checked} corners");
}

#[test]
fn criterion_04_baseline_reductions() {
    for cfg in grid_configs() {
        // Outside the symmetric regime of interest (M > N) the IC weighted
        // bounds sit below the cooperative sum cap, so both reductions are
        // checked for the BC everywhere and for the IC where the scheme
        // applies.
        if cfg.kind == ChannelKind::Bc || cfg.scheme_regime() {
            let full = baseline_region(&cfg, mimo_dof::BaselineMode::FullCsit).unwrap();
            let outer = outer_region(&cfg, &q([1.0, 1.0], [1.0, 1.0])).unwrap();
            assert!(
                outer.equals(&full, 0.0),
                "{cfg:?}: alpha=(1,1) does not reduce to the full-CSIT region"
            );
            let none = baseline_region(&cfg, mimo_dof::BaselineMode::NoCsit).unwrap();
            let inner = inner_region(&cfg, &q([0.0, 0.0], [0.0, 0.0])).unwrap();
            assert!(
                inner.equals(&none, 0.0),
                "{cfg:?}: alpha=beta=(0,0) does not reduce to the no-CSIT region"
            );
        }
    }
    println!("PASS criterion 4: baseline reductions exact");
}

#[test]
fn criterion_05_optimal_sum_dof_with_good_csit() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DA);
    let regimes = [(2usize, 1usize), (3, 1), (3, 2), (4, 2), (4, 3)];
    for trial in 0..20 {
        let (m, n) = regimes[trial % regimes.len()];
        for kind in [ChannelKind::Bc, ChannelKind::Ic] {
            let cfg = AntennaConfig::new(m, n, kind).unwrap();
            let m2n = cfg.min_m2n() as f64;
            let nn = n as f64;
            // alpha1 + alpha2 >= min(M, 2N)/N with alpha2 <= alpha1.
            let a1 = rng.gen_range(m2n / (2.0 * nn)..=1.0);
            let lo = (m2n / nn - a1).clamp(0.0, a1);
            let a2 = rng.gen_range(lo..=a1);
            let qq = q([a1, a2], [1.0, 1.0]);
            let thr = sufficient_delayed_threshold(&cfg, &qq);
            let b1 = rng.gen_range(thr.max(a1)..=1.0);
            let b2 = rng.gen_range(thr.max(a2)..=1.0);
            let qq = q([a1, a2], [b1, b2]);
            let sum = inner_region(&cfg, &qq).unwrap().max_weighted(1.0, 1.0);
            assert!(
                (sum - m2n).abs() <= 1e-9,
                "{cfg:?} alpha=({a1}, {a2}) beta=({b1}, {b2}): sum-DoF {sum}, wanted {m2n}"
            );
        }
    }
    println!("PASS criterion 5: 40 random good-CSIT configs reach the full sum-DoF");
}

const LADDER: [f64; 4] = [1e3, 1e4, 1e5, 1e6];

fn slope_scenarios() -> Vec<(AntennaConfig, QualityExponents, CornerLabel, (f64, f64))> {
    vec![
        (
            bc(2, 1),
            q([0.5, 0.5], [1.0, 1.0]),
            CornerLabel::CStar,
            (5.0 / 6.0, 5.0 / 6.0),
        ),
        (
            bc(3, 2),
            q([0.8, 0.8], [1.0, 1.0]),
            CornerLabel::EStar,
            (1.4, 1.6),
        ),
    ]
}

#[test]
fn criterion_06_simulated_dof_slopes() {
    let start = Instant::now();
    for (cfg, qq, target, want) in slope_scenarios() {
        let rep = simulate_dof(&cfg, &qq, target, &LADDER, 50, 2024, &SimOptions::default())
            .unwrap();
        assert!(
            (rep.d_hat[0] - want.0).abs() <= 0.15 && (rep.d_hat[1] - want.1).abs() <= 0.15,
            "{cfg:?} {target}: slopes {:?}, wanted {want:?} within 0.15",
            rep.d_hat
        );
    }
    let dt = start.elapsed();
    assert!(dt.as_secs_f64() < 600.0, "took {dt:?}, budget 10 min");
    println!("PASS criterion 6: simulated slopes within 0.15 of both corners in {dt:?}");
}

#[test]
fn criterion_07_mac_margins_nonnegative_at_high_snr() {
    for (cfg, qq, target, _) in slope_scenarios() {
        let rep = simulate_dof(&cfg, &qq, target, &LADDER, 50, 2024, &SimOptions::default())
            .unwrap();
        for point in rep.points.iter().rev().take(2) {
            for r in 0..2 {
                assert!(
                    point.margin_nonneg_frac[r] >= 0.95,
                    "{cfg:?} {target} P={}: receiver {r} feasible in only {:.0}% of phases",
                    point.snr,
                    100.0 * point.margin_nonneg_frac[r]
                );
            }
        }
    }
    println!("PASS criterion 7: all log-det margins nonnegative at the top two SNRs in >=95% of phases");
}

#[test]
fn criterion_08_quantizer_boundedness() {
    for (cfg, qq, target, _) in slope_scenarios() {
        let rep = simulate_dof(&cfg, &qq, target, &LADDER, 50, 2024, &SimOptions::default())
            .unwrap();
        for point in &rep.points {
            assert!(
                point.distortion_mean <= 10.0,
                "{cfg:?} {target} P={}: mean quantization error {}",
                point.snr,
                point.distortion_mean
            );
        }
        // Per-receiver bit usage stays within one bit of the budget per phase.
        let opts = SimOptions::default();
        let plan = build_phase_plan(&cfg, &qq, target, opts.t_slots, opts.s_phases).unwrap();
        for &snr in &LADDER {
            for seed in 0..50 {
                let out = run_phase(&cfg, &qq, &plan, snr, seed, &opts).unwrap();
                for r in 0..2 {
                    let diff = out.quant_bits_used[r] as f64 - out.quant_budget_bits[r];
                    assert!(
                        diff.abs() <= 1.0 + 1e-9,
                        "{cfg:?} {target} P={snr} seed={seed}: receiver {r} used {} of {} bits",
                        out.quant_bits_used[r],
                        out.quant_budget_bits[r]
                    );
                }
            }
        }
    }
    println!("PASS criterion 8: quantizer error <= 10 and bit usage within 1 bit per phase");
}

#[test]
fn criterion_09_exponent_fidelity() {
    let cfg = bc(3, 2);
    let qq = q([0.7, 0.4], [1.0, 0.9]);
    let ladder = [1e2, 1e3, 1e4, 1e5];
    // 4 slots x 6 entries x 420 blocks > 1e4 samples per SNR point.
    for (user, want, current) in [
        (0usize, 0.7, true),
        (1, 0.4, true),
        (0, 1.0, false),
        (1, 0.9, false),
    ] {
        let data: Vec<(f64, Vec<f64>)> = ladder
            .iter()
            .map(|&p| {
                let mut samples = Vec::new();
                for b in 0..420 {
                    let block = generate_block(&cfg, &qq, 4, p, 1, 5000 + b).unwrap();
                    for slot in &block {
                        let est = if current {
                            &slot.h_current[user]
                        } else {
                            &slot.h_delayed[user]
                        };
                        let err = &slot.h_true[user] - est;
                        samples.extend(err.iter().map(|z| z.norm_sqr()));
                    }
                }
                (p, samples)
            })
            .collect();
        assert!(data.iter().all(|(_, s)| s.len() >= 10_000));
        let got = measured_exponent(&data).unwrap();
        assert!(
            (got - want).abs() <= 0.05,
            "user {user} current={current}: measured {got}, wanted {want}"
        );
    }
    println!("PASS criterion 9: measured exponents within 0.05 of requested");
}

#[test]
fn criterion_10_ic_parity() {
    // Identical parameters: the IC plan reproduces the BC private ledger
    // exactly and splits the common load across the two transmitters.
    for (m, n, a) in [(3usize, 2usize, 0.8f64), (2, 1, 0.5), (4, 3, 0.6)] {
        let qq = q([a, a], [1.0, 1.0]);
        let cfg_bc = AntennaConfig::new(m, n, ChannelKind::Bc).unwrap();
        let cfg_ic = AntennaConfig::new(m, n, ChannelKind::Ic).unwrap();
        for label in active_corner_labels(&cfg_bc, &qq) {
            let pb = build_phase_plan(&cfg_bc, &qq, label, 8, 100).unwrap();
            let pi = build_phase_plan(&cfg_ic, &qq, label, 8, 100).unwrap();
            assert_eq!(pb.ledger.private_user1, pi.ledger.private_user1);
            assert_eq!(pb.ledger.private_user2, pi.ledger.private_user2);
            let (c1, c2) = pi.ic_common_split.unwrap();
            assert!(
                (c1 + c2 - pi.common_budget).abs() <= 1e-12,
                "common split {c1} + {c2} != budget {}",
                pi.common_budget
            );
        }
    }
    // The IC outer bound carries its own sum cap: M=2, N=3 gives 3.
    let cfg = AntennaConfig::new(2, 3, ChannelKind::Ic).unwrap();
    assert_eq!(cfg.sum_dof_cap(), 3);
    let outer = outer_region(&cfg, &q([0.5, 0.5], [1.0, 1.0])).unwrap();
    let cap = outer
        .halfplanes()
        .iter()
        .find(|hp| (hp.a - 1.0).abs() < 1e-12 && (hp.b - 1.0).abs() < 1e-12)
        .expect("sum half-plane present");
    assert!((cap.c - 3.0).abs() <= 1e-12, "IC sum cap {}", cap.c);
    println!("PASS criterion 10: IC plans match BC private ledgers; IC sum cap checks out");
}
