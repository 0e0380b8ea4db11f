//! 2-D polytope machinery for DoF regions: half-plane systems, vertex
//! enumeration, containment and equality checks.
//!
//! Regions here are small (at most ~8 half-planes), so vertices come from
//! exact pairwise intersection with feasibility filtering.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default absolute tolerance for geometric comparisons.
pub const GEOM_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("half-plane normal must be nonzero and finite (a={a}, b={b}, c={c})")]
    DegenerateHalfPlane { a: f64, b: f64, c: f64 },
    #[error("region is empty or unbounded")]
    DegenerateRegion,
}

/// The constraint `a*d1 + b*d2 <= c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Set during region construction when the constraint is tight at no vertex.
    #[serde(default)]
    pub redundant: bool,
}

impl HalfPlane {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        if (a == 0.0 && b == 0.0) || !a.is_finite() || !b.is_finite() || !c.is_finite() {
            return Err(GeometryError::DegenerateHalfPlane { a, b, c });
        }
        Ok(Self {
            a,
            b,
            c,
            redundant: false,
        })
    }

    /// Signed slack `c - (a*d1 + b*d2)`; nonnegative inside.
    pub fn slack(&self, p: (f64, f64)) -> f64 {
        self.c - (self.a * p.0 + self.b * p.1)
    }

    pub fn satisfied(&self, p: (f64, f64), tol: f64) -> bool {
        self.slack(p) >= -tol
    }
}

/// Convex bounded polytope of DoF pairs, stored both as half-planes and as the
/// counterclockwise vertex list they carve out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofRegion {
    halfplanes: Vec<HalfPlane>,
    vertices: Vec<(f64, f64)>,
}

fn intersect(h1: &HalfPlane, h2: &HalfPlane) -> Option<(f64, f64)> {
    let det = h1.a * h2.b - h2.a * h1.b;
    if det.abs() < 1e-12 {
        return None;
    }
    let d1 = (h1.c * h2.b - h2.c * h1.b) / det;
    let d2 = (h1.a * h2.c - h2.a * h1.c) / det;
    Some((d1, d2))
}

impl DofRegion {
    /// Build a region from half-planes; the nonnegativity constraints
    /// `d1 >= 0`, `d2 >= 0` are appended when missing.
    pub fn from_halfplanes(mut halfplanes: Vec<HalfPlane>) -> Result<Self, GeometryError> {
        let has_d1 = halfplanes
            .iter()
            .any(|h| h.a < 0.0 && h.b == 0.0 && h.c <= 0.0);
        let has_d2 = halfplanes
            .iter()
            .any(|h| h.a == 0.0 && h.b < 0.0 && h.c <= 0.0);
        if !has_d1 {
            halfplanes.push(HalfPlane::new(-1.0, 0.0, 0.0)?);
        }
        if !has_d2 {
            halfplanes.push(HalfPlane::new(0.0, -1.0, 0.0)?);
        }

        let mut vertices: Vec<(f64, f64)> = Vec::new();
        for i in 0..halfplanes.len() {
            for j in (i + 1)..halfplanes.len() {
                let Some(p) = intersect(&halfplanes[i], &halfplanes[j]) else {
                    continue;
                };
                if halfplanes.iter().all(|h| h.satisfied(p, GEOM_TOL)) {
                    // Adding zero folds any -0.0 coordinate into +0.0.
                    vertices.push((p.0 + 0.0, p.1 + 0.0));
                }
            }
        }
        // Dedupe coincident intersection points.
        let mut unique: Vec<(f64, f64)> = Vec::new();
        for p in vertices {
            if !unique
                .iter()
                .any(|q| (q.0 - p.0).abs() < GEOM_TOL && (q.1 - p.1).abs() < GEOM_TOL)
            {
                unique.push(p);
            }
        }
        if unique.is_empty() {
            return Err(GeometryError::DegenerateRegion);
        }
        let cx = unique.iter().map(|p| p.0).sum::<f64>() / unique.len() as f64;
        let cy = unique.iter().map(|p| p.1).sum::<f64>() / unique.len() as f64;
        unique.sort_by(|p, q| {
            let ap = (p.1 - cy).atan2(p.0 - cx);
            let aq = (q.1 - cy).atan2(q.0 - cx);
            ap.partial_cmp(&aq).unwrap()
        });

        for h in halfplanes.iter_mut() {
            h.redundant = !unique.iter().any(|&p| h.slack(p).abs() <= GEOM_TOL);
        }

        Ok(Self {
            halfplanes,
            vertices: unique,
        })
    }

    pub fn halfplanes(&self) -> &[HalfPlane] {
        &self.halfplanes
    }

    /// Vertices in counterclockwise order.
    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn contains(&self, p: (f64, f64), tol: f64) -> bool {
        self.halfplanes.iter().all(|h| h.satisfied(p, tol))
    }

    /// Set equality via mutual vertex containment.
    pub fn equals(&self, other: &DofRegion, tol: f64) -> bool {
        self.vertices.iter().all(|&v| other.contains(v, tol))
            && other.vertices.iter().all(|&v| self.contains(v, tol))
    }

    /// Maximum of `w1*d1 + w2*d2` over the region (attained at a vertex).
    pub fn max_weighted(&self, w1: f64, w2: f64) -> f64 {
        self.vertices
            .iter()
            .map(|p| w1 * p.0 + w2 * p.1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when `p` matches some vertex within `tol`.
    pub fn has_vertex(&self, p: (f64, f64), tol: f64) -> bool {
        self.vertices
            .iter()
            .any(|q| (q.0 - p.0).abs() <= tol && (q.1 - p.1).abs() <= tol)
    }

    /// Number of constraints tight at `p` within `tol`.
    pub fn tight_constraints(&self, p: (f64, f64), tol: f64) -> usize {
        self.halfplanes
            .iter()
            .filter(|h| h.slack(p).abs() <= tol)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(a: f64, b: f64, c: f64) -> HalfPlane {
        HalfPlane::new(a, b, c).unwrap()
    }

    #[test]
    fn rejects_zero_normal() {
        assert!(HalfPlane::new(0.0, 0.0, 1.0).is_err());
        assert!(HalfPlane::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn unit_square_vertices() {
        let r = DofRegion::from_halfplanes(vec![hp(1.0, 0.0, 1.0), hp(0.0, 1.0, 1.0)]).unwrap();
        assert_eq!(r.vertices().len(), 4);
        assert!(r.has_vertex((1.0, 1.0), GEOM_TOL));
        assert!(r.has_vertex((0.0, 0.0), GEOM_TOL));
        assert!(r.contains((0.5, 0.5), GEOM_TOL));
        assert!(!r.contains((1.1, 0.0), GEOM_TOL));
    }

    #[test]
    fn redundant_constraint_is_flagged() {
        let r = DofRegion::from_halfplanes(vec![
            hp(1.0, 0.0, 1.0),
            hp(0.0, 1.0, 1.0),
            hp(1.0, 1.0, 5.0),
        ])
        .unwrap();
        let slack = r
            .halfplanes()
            .iter()
            .find(|h| h.c == 5.0)
            .unwrap();
        assert!(slack.redundant);
        assert!(r.halfplanes().iter().filter(|h| !h.redundant).count() >= 4);
    }

    #[test]
    fn equality_is_reflexive_and_tolerant() {
        let r1 = DofRegion::from_halfplanes(vec![hp(1.0, 1.0, 2.0), hp(1.0, 0.0, 1.5)]).unwrap();
        let r2 = DofRegion::from_halfplanes(vec![
            hp(1.0, 1.0, 2.0),
            hp(1.0, 0.0, 1.5),
            hp(2.0, 2.0, 4.0),
        ])
        .unwrap();
        assert!(r1.equals(&r1, GEOM_TOL));
        assert!(r1.equals(&r2, GEOM_TOL));
    }

    #[test]
    fn weighted_max_hits_vertex() {
        let r = DofRegion::from_halfplanes(vec![hp(1.0, 0.0, 2.0), hp(0.0, 1.0, 1.0)]).unwrap();
        assert!((r.max_weighted(1.0, 1.0) - 3.0).abs() < 1e-12);
    }
}
