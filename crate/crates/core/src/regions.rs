//! DoF region construction for the two-user MIMO BC and IC: outer and inner
//! bounds under imperfect current and delayed CSIT, the perfect/no-CSIT
//! baselines, and the labeled corner points with their achieving settings.

use serde::{Deserialize, Serialize};

use crate::config::{AntennaConfig, ChannelKind, QualityExponents};
use crate::geometry::{DofRegion, GeometryError, HalfPlane, GEOM_TOL};

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Corner-point labels. Starred labels belong to the sufficient-delayed-CSIT
/// outer bound; `E`, `F`, `G` arise when delayed CSIT quality is too low.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CornerLabel {
    AStar,
    BStar,
    CStar,
    DStar,
    EStar,
    FStar,
    E,
    F,
    G,
}

impl std::fmt::Display for CornerLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CornerLabel::AStar => "A*",
            CornerLabel::BStar => "B*",
            CornerLabel::CStar => "C*",
            CornerLabel::DStar => "D*",
            CornerLabel::EStar => "E*",
            CornerLabel::FStar => "F*",
            CornerLabel::E => "E",
            CornerLabel::F => "F",
            CornerLabel::G => "G",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for CornerLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A*" | "Astar" | "astar" => Ok(CornerLabel::AStar),
            "B*" | "Bstar" | "bstar" => Ok(CornerLabel::BStar),
            "C*" | "Cstar" | "cstar" => Ok(CornerLabel::CStar),
            "D*" | "Dstar" | "dstar" => Ok(CornerLabel::DStar),
            "E*" | "Estar" | "estar" => Ok(CornerLabel::EStar),
            "F*" | "Fstar" | "fstar" => Ok(CornerLabel::FStar),
            "E" | "e" => Ok(CornerLabel::E),
            "F" | "f" => Ok(CornerLabel::F),
            "G" | "g" => Ok(CornerLabel::G),
            other => Err(format!("unknown corner label `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerPoint {
    pub label: CornerLabel,
    pub d1: f64,
    pub d2: f64,
}

/// Which regime/corner-set applies for a given configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionCase {
    /// M <= N (after clamping): CSIT plays no role.
    NoCsitNeeded,
    /// Sufficient delayed CSIT, alpha1 small, alpha sum large: D*, B*, E*, F*.
    Case1,
    /// Sufficient delayed CSIT, alpha1 small, alpha sum small: D*, B*, C*.
    Case2,
    /// Sufficient delayed CSIT, alpha1 large: B*, A*.
    Case3,
    /// Low delayed CSIT, min beta >= alpha1: D*, B*, E, F.
    Case4a,
    /// Low delayed CSIT, min beta < alpha1: B*, E, G.
    Case4b,
    /// Low delayed CSIT, alpha1 large: B*, E, G.
    Case4c,
}

impl std::fmt::Display for RegionCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegionCase::NoCsitNeeded => "no CSIT needed",
            RegionCase::Case1 => "case 1",
            RegionCase::Case2 => "case 2",
            RegionCase::Case3 => "case 3",
            RegionCase::Case4a => "case 4a",
            RegionCase::Case4b => "case 4b",
            RegionCase::Case4c => "case 4c",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMode {
    FullCsit,
    NoCsit,
}

/// Delayed-CSIT quality above which the inner bound meets the outer bound.
pub fn sufficient_delayed_threshold(cfg: &AntennaConfig, q: &QualityExponents) -> f64 {
    let m = cfg.effective_m() as f64;
    let n = cfg.n_rx as f64;
    let k = cfg.min_mn() as f64;
    let m2n = cfg.min_m2n() as f64;
    let [a1, a2] = q.alpha_avg();
    1.0_f64
        .min(m - k)
        .min(n * (1.0 + a1 + a2) / (m2n + n))
        .min(n * (1.0 + a2) / m2n)
}

fn base_halfplanes(cfg: &AntennaConfig, q: &QualityExponents) -> Vec<HalfPlane> {
    let k = cfg.min_mn() as f64;
    let m2n = cfg.min_m2n() as f64;
    let cap = cfg.sum_dof_cap() as f64;
    let [a1, a2] = q.alpha_avg();
    let w = (m2n - k) / m2n;
    vec![
        HalfPlane::new(1.0, 0.0, k).unwrap(),
        HalfPlane::new(0.0, 1.0, k).unwrap(),
        HalfPlane::new(1.0, 1.0, cap).unwrap(),
        HalfPlane::new(1.0 / k, 1.0 / m2n, 1.0 + w * a1).unwrap(),
        HalfPlane::new(1.0 / m2n, 1.0 / k, 1.0 + w * a2).unwrap(),
    ]
}

/// Outer bound: single-user caps, the cooperative sum bound, and the two
/// weighted bounds driven by the current-CSIT quality.
pub fn outer_region(cfg: &AntennaConfig, q: &QualityExponents) -> Result<DofRegion, GeometryError> {
    DofRegion::from_halfplanes(base_halfplanes(cfg, q))
}

/// Inner bound: equals the outer bound under sufficient delayed CSIT,
/// otherwise adds the delayed-quality sum bound.
pub fn inner_region(cfg: &AntennaConfig, q: &QualityExponents) -> Result<DofRegion, GeometryError> {
    let thr = sufficient_delayed_threshold(cfg, q);
    let min_beta = q.min_beta();
    let mut hps = base_halfplanes(cfg, q);
    if min_beta < thr {
        let k = cfg.min_mn() as f64;
        let m2n = cfg.min_m2n() as f64;
        hps.push(HalfPlane::new(1.0, 1.0, k + (m2n - k) * min_beta).unwrap());
    }
    DofRegion::from_halfplanes(hps)
}

/// Perfect-CSIT and no-CSIT reference regions.
pub fn baseline_region(
    cfg: &AntennaConfig,
    mode: BaselineMode,
) -> Result<DofRegion, GeometryError> {
    let k = cfg.min_mn() as f64;
    let hps = match (mode, cfg.kind) {
        (BaselineMode::FullCsit, _) => vec![
            HalfPlane::new(1.0, 0.0, k).unwrap(),
            HalfPlane::new(0.0, 1.0, k).unwrap(),
            HalfPlane::new(1.0, 1.0, cfg.sum_dof_cap() as f64).unwrap(),
        ],
        (BaselineMode::NoCsit, ChannelKind::Bc) => vec![
            HalfPlane::new(1.0, 0.0, k).unwrap(),
            HalfPlane::new(0.0, 1.0, k).unwrap(),
            HalfPlane::new(1.0, 1.0, k).unwrap(),
        ],
        (BaselineMode::NoCsit, ChannelKind::Ic) => {
            let cap = (cfg.n_rx as f64).min(2.0 * cfg.m_tx as f64);
            vec![
                HalfPlane::new(1.0, 0.0, k).unwrap(),
                HalfPlane::new(0.0, 1.0, k).unwrap(),
                HalfPlane::new(1.0, 1.0, cap).unwrap(),
            ]
        }
    };
    DofRegion::from_halfplanes(hps)
}

/// The common-symbol surplus left after the quantized interference is loaded.
pub fn delta_com(cfg: &AntennaConfig, q: &QualityExponents, delta_bar: f64) -> f64 {
    let m = cfg.effective_m() as f64;
    let n = cfg.n_rx as f64;
    let [a1, a2] = q.alpha_avg();
    n - (m - n) * delta_bar - n * pos(delta_bar - a1) - n * pos(delta_bar - a2)
}

/// DoF pair delivered by the scheme for power level `delta_bar` and
/// common-surplus split `omega` (no bound checking).
pub(crate) fn dof_point_raw(
    cfg: &AntennaConfig,
    q: &QualityExponents,
    delta_bar: f64,
    omega: f64,
) -> (f64, f64) {
    let m = cfg.effective_m() as f64;
    let n = cfg.n_rx as f64;
    let [a1, a2] = q.alpha_avg();
    let dc = delta_com(cfg, q, delta_bar);
    let d1 = (m - n) * delta_bar + n * pos(delta_bar - a2) + omega * dc;
    let d2 = (m - n) * delta_bar + n * pos(delta_bar - a1) + (1.0 - omega) * dc;
    (d1, d2)
}

/// The (delta_bar, omega) setting that lands the scheme on `label`.
pub(crate) fn corner_settings(
    label: CornerLabel,
    cfg: &AntennaConfig,
    q: &QualityExponents,
) -> (f64, f64) {
    let m = cfg.effective_m() as f64;
    let n = cfg.n_rx as f64;
    let [a1, a2] = q.alpha_avg();
    let min_beta = q.min_beta();
    match label {
        CornerLabel::EStar => (1.0, 0.0),
        CornerLabel::FStar => (1.0, 1.0),
        CornerLabel::BStar => (a2, 0.0),
        CornerLabel::DStar => (a1, 1.0),
        CornerLabel::CStar => (n * (1.0 + a1 + a2) / (m + n), 0.0),
        CornerLabel::AStar => (n * (1.0 + a2) / m, 1.0),
        CornerLabel::E => (min_beta, 0.0),
        CornerLabel::F => (min_beta, 1.0),
        CornerLabel::G => (min_beta, 1.0),
    }
}

fn case_label_sets(cfg: &AntennaConfig, q: &QualityExponents) -> Vec<(RegionCase, Vec<CornerLabel>)> {
    use CornerLabel::*;
    let m = cfg.effective_m() as f64;
    let n = cfg.n_rx as f64;
    let [a1, a2] = q.alpha_avg();
    let min_beta = q.min_beta();
    let thr = sufficient_delayed_threshold(cfg, q);
    // At case-condition ties both neighboring cases contribute; the coincident
    // points are deduplicated afterwards.
    let tie = GEOM_TOL;
    let beta_suf = min_beta >= thr - tie;
    let beta_suf_not = min_beta < thr + tie;
    let a1_small = a1 <= n * (1.0 + a2) / m + tie;
    let a1_large = a1 >= n * (1.0 + a2) / m - tie;
    let a12_large = a1 + a2 >= m / n - tie;
    let a12_small = a1 + a2 <= m / n + tie;
    let ba1_suf = min_beta >= a1 - tie;
    let ba1_not = min_beta < a1 + tie;

    let mut out = Vec::new();
    if beta_suf {
        if a1_small && a12_large {
            out.push((RegionCase::Case1, vec![DStar, BStar, EStar, FStar]));
        }
        if a1_small && a12_small {
            out.push((RegionCase::Case2, vec![DStar, BStar, CStar]));
        }
        if a1_large {
            out.push((RegionCase::Case3, vec![BStar, AStar]));
        }
    }
    if beta_suf_not {
        if a1_small && ba1_suf {
            out.push((RegionCase::Case4a, vec![DStar, BStar, E, F]));
        }
        if a1_small && ba1_not {
            out.push((RegionCase::Case4b, vec![BStar, E, G]));
        }
        if a1_large {
            out.push((RegionCase::Case4c, vec![BStar, E, G]));
        }
    }
    out
}

/// The case label reported for a configuration (ties resolved toward the
/// first matching case in a fixed order).
pub fn active_case(cfg: &AntennaConfig, q: &QualityExponents) -> RegionCase {
    if !cfg.scheme_regime() {
        return RegionCase::NoCsitNeeded;
    }
    case_label_sets(cfg, q)
        .first()
        .map(|(c, _)| *c)
        .unwrap_or(RegionCase::NoCsitNeeded)
}

/// Corner labels the scheme can be calibrated for. This is the union of the
/// active cases' label sets before coincident points are merged, so a label
/// stays targetable even when its point collapses onto another corner.
pub fn active_corner_labels(cfg: &AntennaConfig, q: &QualityExponents) -> Vec<CornerLabel> {
    if !cfg.scheme_regime() {
        return vec![CornerLabel::DStar, CornerLabel::BStar];
    }
    let mut labels: Vec<CornerLabel> = Vec::new();
    for (_, set) in case_label_sets(cfg, q) {
        for label in set {
            if !labels.contains(&label) {
                labels.push(label);
            }
        }
    }
    labels
}

/// Labeled corner points of the achievable region for the active case.
///
/// For M <= N the region is CSIT-independent and the two rectangle corners
/// are returned. At case boundaries the union of the adjacent corner sets is
/// evaluated and coincident points are merged.
pub fn corner_points(cfg: &AntennaConfig, q: &QualityExponents) -> Vec<CornerPoint> {
    let k = cfg.min_mn() as f64;
    if !cfg.scheme_regime() {
        return vec![
            CornerPoint {
                label: CornerLabel::DStar,
                d1: k,
                d2: 0.0,
            },
            CornerPoint {
                label: CornerLabel::BStar,
                d1: 0.0,
                d2: k,
            },
        ];
    }
    let mut points: Vec<CornerPoint> = Vec::new();
    for (_, labels) in case_label_sets(cfg, q) {
        for label in labels {
            let (delta_bar, omega) = corner_settings(label, cfg, q);
            let (d1, d2) = dof_point_raw(cfg, q, delta_bar, omega);
            let coincides = points
                .iter()
                .any(|p| (p.d1 - d1).hypot(p.d2 - d2) < GEOM_TOL);
            if !coincides && !points.iter().any(|p| p.label == label) {
                points.push(CornerPoint { label, d1, d2 });
            }
        }
    }
    points
}
