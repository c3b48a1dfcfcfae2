//! Pairwise similarity and three-building alignment predicates.

use thiserror::Error;

use crate::geometry::angle_diff_180;
use crate::proximity::{BuildingRecord, ProximityEdge};

#[derive(Debug, Error, PartialEq)]
pub enum RelationsError {
    #[error("edges do not share exactly one endpoint")]
    NotAdjacent,
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(&'static str),
}

/// Decision thresholds. Ratios are max/min (so >= 1 passes trivially equal
/// inputs), angle caps are degrees.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    /// Area ratio cap.
    pub delta1: f64,
    /// Orientation difference cap, degrees.
    pub delta2: f64,
    /// Edge-count ratio cap.
    pub delta3: f64,
    /// Spacing direction difference cap, degrees.
    pub eta1: f64,
    /// Spacing ratio cap.
    pub eta2: f64,
    /// Facing-ratio floor.
    pub eta3: f64,
    /// Spacing clamp floor, metres; short gaps count as this length.
    pub td: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            delta1: 2.0,
            delta2: 20.0,
            delta3: 1.5,
            eta1: 15.0,
            eta2: 2.0,
            eta3: 0.3,
            td: td_from_scale(DEFAULT_MAP_SCALE),
        }
    }
}

/// Default denominator of the map scale (1 : 10 000).
pub const DEFAULT_MAP_SCALE: f64 = 10_000.0;

/// Spacing clamp derived from map scale: 0.2 mm at map scale, in metres.
pub fn td_from_scale(scale: f64) -> f64 {
    0.0002 * scale
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), RelationsError> {
        let all = [
            self.delta1,
            self.delta2,
            self.delta3,
            self.eta1,
            self.eta2,
            self.eta3,
            self.td,
        ];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(RelationsError::InvalidThresholds(
                "all thresholds must be positive and finite",
            ));
        }
        if self.delta1 < 1.0 || self.delta3 < 1.0 || self.eta2 < 1.0 {
            return Err(RelationsError::InvalidThresholds(
                "ratio caps must be at least 1",
            ));
        }
        if self.eta3 > 1.0 {
            return Err(RelationsError::InvalidThresholds(
                "facing-ratio floor cannot exceed 1",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityResult {
    pub a_r: f64,
    pub o_r: f64,
    pub e_r: f64,
    pub pass: bool,
}

/// Shape similarity of two buildings: area ratio, bounding-rectangle
/// orientation difference and edge-count ratio, each against its cap.
pub fn similarity(a: &BuildingRecord, b: &BuildingRecord, t: &Thresholds) -> SimilarityResult {
    let a_r = ratio(a.area, b.area);
    let o_r = angle_diff_180(a.b_ori, b.b_ori);
    let e_r = ratio(a.edge_cnt as f64, b.edge_cnt as f64);
    SimilarityResult {
        a_r,
        o_r,
        e_r,
        pass: a_r <= t.delta1 && o_r <= t.delta2 && e_r <= t.delta3,
    }
}

#[inline]
fn ratio(a: f64, b: f64) -> f64 {
    a.max(b) / a.min(b)
}

/// Gap length with the minimum-spacing clamp applied.
#[inline]
pub fn clamp_length(le: f64, td: f64) -> f64 {
    le.max(td)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrResult {
    /// Direction difference of the two spacings, degrees.
    pub d_o: f64,
    /// Ratio of the clamped spacing lengths.
    pub d_l: f64,
    pub fr_ij: f64,
    pub fr_jk: f64,
    pub pass: bool,
}

/// Alignment test for a chain of two proximity edges sharing the middle
/// building: near-equal direction, comparable spacing, and both pairs
/// facing each other.
pub fn linear_triple(
    e_ij: &ProximityEdge,
    e_jk: &ProximityEdge,
    t: &Thresholds,
) -> Result<StrResult, RelationsError> {
    shared_endpoint(e_ij, e_jk).ok_or(RelationsError::NotAdjacent)?;
    let d_o = angle_diff_180(e_ij.e_ori, e_jk.e_ori);
    let d_l = ratio(clamp_length(e_ij.le, t.td), clamp_length(e_jk.le, t.td));
    let (fr_ij, fr_jk) = (e_ij.fr, e_jk.fr);
    Ok(StrResult {
        d_o,
        d_l,
        fr_ij,
        fr_jk,
        pass: d_o <= t.eta1 && d_l <= t.eta2 && fr_ij >= t.eta3 && fr_jk >= t.eta3,
    })
}

fn shared_endpoint(a: &ProximityEdge, b: &ProximityEdge) -> Option<u64> {
    if (a.i, a.j) == (b.i, b.j) {
        return None;
    }
    let mut shared = None;
    for x in [a.i, a.j] {
        if x == b.i || x == b.j {
            if shared.is_some() {
                return None;
            }
            shared = Some(x);
        }
    }
    shared
}

/// A two-edge chain `i - j - k` through middle building `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleChain {
    pub i: u64,
    pub j: u64,
    pub k: u64,
    /// Indexes into the edge slice the chain was built from.
    pub e_ij: usize,
    pub e_jk: usize,
}

/// All two-edge chains of the proximity graph, ends canonicalized so
/// `i < k`, sorted by `(i, j, k)`.
pub fn enumerate_adjacent_pairs(edges: &[ProximityEdge]) -> Vec<TripleChain> {
    let mut incident: std::collections::HashMap<u64, Vec<usize>> = std::collections::HashMap::new();
    for (idx, e) in edges.iter().enumerate() {
        incident.entry(e.i).or_default().push(idx);
        incident.entry(e.j).or_default().push(idx);
    }
    let mut chains = Vec::new();
    for (&j, inc) in &incident {
        for (a, &ea) in inc.iter().enumerate() {
            for &eb in &inc[a + 1..] {
                let other = |idx: usize| {
                    let e = &edges[idx];
                    if e.i == j {
                        e.j
                    } else {
                        e.i
                    }
                };
                let (mut i, mut k) = (other(ea), other(eb));
                let (mut e_ij, mut e_jk) = (ea, eb);
                if i > k {
                    std::mem::swap(&mut i, &mut k);
                    std::mem::swap(&mut e_ij, &mut e_jk);
                }
                chains.push(TripleChain { i, j, k, e_ij, e_jk });
            }
        }
    }
    chains.sort_by_key(|c| (c.i, c.j, c.k));
    chains
}
