//! Proximity graph construction.
//!
//! Buildings become nodes of a relative neighborhood graph: pair (i, j) is
//! an edge exactly when no third building k satisfies
//! `max(d(i,k), d(j,k)) < d(i,j)` (strict, so ties keep edges). Distances
//! are shortest footprint-boundary distances by default, centroid distances
//! optionally. Edges whose centroid segment properly crosses a road are
//! dropped.

use std::collections::HashMap;

use thiserror::Error;

use crate::geometry::{
    self, centroid, edge_count, facing_ratio, fold_deg_180, min_bounding_rect, min_distance,
    segment_crosses_polyline, FrCombine, GeometryError, OrientedRect, Point, Polygon, Polyline,
    COLLINEAR_TOL_DEG,
};

#[derive(Debug, Error, PartialEq)]
pub enum ProximityError {
    #[error("dataset contains no buildings")]
    EmptyDataset,
    #[error("duplicate building id {0}")]
    DuplicateId(u64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A building footprint with its derived measures.
#[derive(Debug, Clone)]
pub struct BuildingRecord {
    pub id: u64,
    pub footprint: Polygon,
    pub area: f64,
    pub centroid: Point,
    pub sbr: OrientedRect,
    /// Main-axis orientation of the bounding rectangle, degrees in [0, 180).
    pub b_ori: f64,
    pub edge_cnt: usize,
}

impl BuildingRecord {
    pub fn from_polygon(id: u64, footprint: Polygon) -> Result<Self, ProximityError> {
        Self::with_tolerance(id, footprint, COLLINEAR_TOL_DEG)
    }

    pub fn with_tolerance(
        id: u64,
        footprint: Polygon,
        collinear_tol_deg: f64,
    ) -> Result<Self, ProximityError> {
        let area = geometry::polygon_area(&footprint);
        let centroid = centroid(&footprint);
        let sbr = min_bounding_rect(&footprint);
        let edge_cnt = edge_count(&footprint, collinear_tol_deg)?;
        Ok(BuildingRecord {
            id,
            footprint,
            area,
            centroid,
            sbr,
            b_ori: sbr.axis_deg,
            edge_cnt,
        })
    }
}

/// Undirected proximity edge, endpoint ids canonicalized so `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximityEdge {
    pub i: u64,
    pub j: u64,
    /// Shortest distance between the two footprints, metres.
    pub le: f64,
    /// Centroid-to-centroid direction folded into [0, 180).
    pub e_ori: f64,
    /// Facing ratio of the two bounding rectangles.
    pub fr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RngMetric {
    Footprint,
    Centroid,
}

#[derive(Debug, Clone, Copy)]
pub struct RngOptions {
    /// Check every pair instead of Delaunay-pruned candidates.
    pub exact: bool,
    pub metric: RngMetric,
    pub fr_combine: FrCombine,
}

impl Default for RngOptions {
    fn default() -> Self {
        RngOptions {
            exact: false,
            metric: RngMetric::Footprint,
            fr_combine: FrCombine::Max,
        }
    }
}

/// Dense symmetric matrix of pairwise building distances.
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

pub fn distance_matrix(buildings: &[BuildingRecord], metric: RngMetric) -> DistanceMatrix {
    let n = buildings.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = pair_distance(&buildings[i], &buildings[j], metric);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    DistanceMatrix { n, d }
}

#[inline]
pub fn pair_distance(a: &BuildingRecord, b: &BuildingRecord, metric: RngMetric) -> f64 {
    match metric {
        RngMetric::Footprint => min_distance(&a.footprint, &b.footprint),
        RngMetric::Centroid => a.centroid.dist(&b.centroid),
    }
}

/// Attributes of the proximity edge between two buildings, endpoint order
/// canonicalized to the smaller id. Recomputing through this one path keeps
/// stored edge properties and later direct predicate evaluation bit-equal.
pub fn edge_attributes(
    a: &BuildingRecord,
    b: &BuildingRecord,
    metric: RngMetric,
    fr_combine: FrCombine,
) -> ProximityEdge {
    let (a, b) = if a.id < b.id { (a, b) } else { (b, a) };
    let dir = (b.centroid.y - a.centroid.y).atan2(b.centroid.x - a.centroid.x);
    ProximityEdge {
        i: a.id,
        j: b.id,
        le: pair_distance(a, b, metric),
        e_ori: fold_deg_180(dir.to_degrees()),
        fr: facing_ratio(&a.sbr, &b.sbr, fr_combine),
    }
}

/// Lazily memoized distances with a centroid/circumradius lower bound used
/// to skip witness candidates without touching the footprints.
struct DistCache<'a> {
    buildings: &'a [BuildingRecord],
    metric: RngMetric,
    radii: Vec<f64>,
    memo: HashMap<(u32, u32), f64>,
}

impl<'a> DistCache<'a> {
    fn new(buildings: &'a [BuildingRecord], metric: RngMetric) -> Self {
        let radii = match metric {
            RngMetric::Centroid => vec![0.0; buildings.len()],
            RngMetric::Footprint => buildings
                .iter()
                .map(|b| {
                    b.footprint
                        .ring()
                        .iter()
                        .map(|p| p.dist(&b.centroid))
                        .fold(0.0, f64::max)
                })
                .collect(),
        };
        DistCache {
            buildings,
            metric,
            radii,
            memo: HashMap::new(),
        }
    }

    #[inline]
    fn lower_bound(&self, i: usize, j: usize) -> f64 {
        let c = self.buildings[i].centroid.dist(&self.buildings[j].centroid);
        c - self.radii[i] - self.radii[j]
    }

    fn get(&mut self, i: usize, j: usize) -> f64 {
        let key = (i.min(j) as u32, i.max(j) as u32);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = pair_distance(
            &self.buildings[key.0 as usize],
            &self.buildings[key.1 as usize],
            self.metric,
        );
        self.memo.insert(key, v);
        v
    }
}

/// Builds the relative neighborhood graph over the buildings, applying the
/// road constraint, and derives per-edge attributes.
pub fn rng_build(
    buildings: &[BuildingRecord],
    roads: &[Polyline],
    opts: &RngOptions,
) -> Result<Vec<ProximityEdge>, ProximityError> {
    if buildings.is_empty() {
        return Err(ProximityError::EmptyDataset);
    }
    let mut seen = HashMap::with_capacity(buildings.len());
    for (idx, b) in buildings.iter().enumerate() {
        if seen.insert(b.id, idx).is_some() {
            return Err(ProximityError::DuplicateId(b.id));
        }
    }
    let n = buildings.len();
    let candidates: Vec<(usize, usize)> = if opts.exact || n <= 16 {
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect()
    } else {
        delaunay_candidates(buildings)
    };

    let mut cache = DistCache::new(buildings, opts.metric);
    let mut kept: Vec<(usize, usize, f64)> = Vec::new();
    for (i, j) in candidates {
        let dij = cache.get(i, j);
        let mut blocked = false;
        for k in 0..n {
            if k == i || k == j {
                continue;
            }
            if cache.lower_bound(i, k) >= dij || cache.lower_bound(j, k) >= dij {
                continue;
            }
            if cache.get(i, k) < dij && cache.get(j, k) < dij {
                blocked = true;
                break;
            }
        }
        if !blocked {
            kept.push((i, j, dij));
        }
    }

    let mut edges: Vec<ProximityEdge> = kept
        .into_iter()
        .filter(|&(i, j, _)| {
            let (ca, cb) = (&buildings[i].centroid, &buildings[j].centroid);
            !roads.iter().any(|r| segment_crosses_polyline(ca, cb, r))
        })
        .map(|(i, j, _)| edge_attributes(&buildings[i], &buildings[j], opts.metric, opts.fr_combine))
        .collect();
    edges.sort_by_key(|e| (e.i, e.j));
    Ok(edges)
}

/// Candidate pairs for the pruned mode: Delaunay edges of the centroids
/// plus every pair closer than twice either endpoint's largest Delaunay
/// neighbor distance. Nodes the triangulation dropped (duplicates,
/// degenerate input) fall back to unbounded radius.
fn delaunay_candidates(buildings: &[BuildingRecord]) -> Vec<(usize, usize)> {
    let n = buildings.len();
    let pts: Vec<delaunator::Point> = buildings
        .iter()
        .map(|b| delaunator::Point {
            x: b.centroid.x,
            y: b.centroid.y,
        })
        .collect();
    let tri = delaunator::triangulate(&pts);

    let mut set: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    let add = |a: usize, b: usize, set: &mut std::collections::HashSet<(usize, usize)>| {
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    };
    for t in tri.triangles.chunks(3) {
        add(t[0], t[1], &mut set);
        add(t[1], t[2], &mut set);
        add(t[0], t[2], &mut set);
    }
    for w in tri.hull.windows(2) {
        add(w[0], w[1], &mut set);
    }

    let mut radius = vec![0.0f64; n];
    let mut touched = vec![false; n];
    for &(a, b) in &set {
        let d = buildings[a].centroid.dist(&buildings[b].centroid);
        radius[a] = radius[a].max(d);
        radius[b] = radius[b].max(d);
        touched[a] = true;
        touched[b] = true;
    }
    for i in 0..n {
        if !touched[i] {
            radius[i] = f64::INFINITY;
        }
    }

    for i in 0..n {
        for j in i + 1..n {
            let c = buildings[i].centroid.dist(&buildings[j].centroid);
            if c < 2.0 * radius[i].max(radius[j]) {
                set.insert((i, j));
            }
        }
    }
    let mut out: Vec<(usize, usize)> = set.into_iter().collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(id: u64, cx: f64, cy: f64, side: f64) -> BuildingRecord {
        BuildingRecord::from_polygon(id, Polygon::rectangle(cx, cy, side, side, 0.0)).unwrap()
    }

    /// Brute-force restatement of the edge predicate, used as the oracle.
    fn rng_oracle(buildings: &[BuildingRecord], metric: RngMetric) -> Vec<(u64, u64)> {
        let m = distance_matrix(buildings, metric);
        let n = buildings.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let blocked = (0..n).any(|k| {
                    k != i && k != j && m.get(i, k).max(m.get(j, k)) < m.get(i, j)
                });
                if !blocked {
                    let (a, b) = (buildings[i].id, buildings[j].id);
                    edges.push((a.min(b), a.max(b)));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    fn edge_ids(edges: &[ProximityEdge]) -> Vec<(u64, u64)> {
        edges.iter().map(|e| (e.i, e.j)).collect()
    }

    fn random_instance(seed: u64, n: usize) -> Vec<BuildingRecord> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|id| {
                let cx: f64 = rng.gen_range(-200.0..200.0);
                let cy: f64 = rng.gen_range(-200.0..200.0);
                let w: f64 = rng.gen_range(4.0..14.0);
                let h: f64 = rng.gen_range(3.0..9.0);
                let rot: f64 = rng.gen_range(0.0..180.0);
                BuildingRecord::from_polygon(id as u64, Polygon::rectangle(cx, cy, w, h, rot))
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn record_measures() {
        let b = BuildingRecord::from_polygon(7, Polygon::rectangle(3.0, 4.0, 10.0, 6.0, 20.0))
            .unwrap();
        assert!((b.area - 60.0).abs() < 1e-9);
        assert!((b.b_ori - 20.0).abs() < 1e-9);
        assert_eq!(b.edge_cnt, 4);
        assert!((b.centroid.x - 3.0).abs() < 1e-9);
    }

    #[test]
    fn collinear_row_chains() {
        let bs = vec![sq(0, 0.0, 0.0, 4.0), sq(1, 10.0, 0.0, 4.0), sq(2, 20.0, 0.0, 4.0)];
        let edges = rng_build(&bs, &[], &RngOptions::default()).unwrap();
        assert_eq!(edge_ids(&edges), vec![(0, 1), (1, 2)]);
        assert!((edges[0].le - 6.0).abs() < 1e-9);
        assert!((edges[0].e_ori - 0.0).abs() < 1e-9);
        assert!((edges[0].fr - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_ties_keep_edges() {
        // centroid distances 50, 50 (exact 3-4-5 scaling) and sqrt(1000):
        // the witness matches the pair distance exactly, so nothing is cut
        let bs = vec![
            sq(0, 0.0, 0.0, 2.0),
            sq(1, 50.0, 0.0, 2.0),
            sq(2, 40.0, 30.0, 2.0),
        ];
        let opts = RngOptions {
            metric: RngMetric::Centroid,
            ..Default::default()
        };
        let edges = rng_build(&bs, &[], &opts).unwrap();
        assert_eq!(edges.len(), 3);
    }

    #[test]
    fn square_grid_has_no_diagonals() {
        let bs = vec![
            sq(0, 0.0, 0.0, 4.0),
            sq(1, 10.0, 0.0, 4.0),
            sq(2, 0.0, 10.0, 4.0),
            sq(3, 10.0, 10.0, 4.0),
        ];
        let edges = rng_build(&bs, &[], &RngOptions::default()).unwrap();
        assert_eq!(edge_ids(&edges), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
    }

    #[test]
    fn road_removes_crossing_edge() {
        let bs = vec![sq(0, 0.0, 0.0, 4.0), sq(1, 10.0, 0.0, 4.0)];
        let road = Polyline::new(vec![Point::new(5.0, -50.0), Point::new(5.0, 50.0)]).unwrap();
        let edges = rng_build(&bs, std::slice::from_ref(&road), &RngOptions::default()).unwrap();
        assert!(edges.is_empty());
        let no_road = rng_build(&bs, &[], &RngOptions::default()).unwrap();
        assert_eq!(no_road.len(), 1);
    }

    #[test]
    fn matches_oracle_on_random_instances() {
        for seed in 0..8 {
            let bs = random_instance(seed, 40);
            for metric in [RngMetric::Footprint, RngMetric::Centroid] {
                let opts = RngOptions {
                    exact: true,
                    metric,
                    ..Default::default()
                };
                let got = rng_build(&bs, &[], &opts).unwrap();
                assert_eq!(edge_ids(&got), rng_oracle(&bs, metric), "seed {seed}");
            }
        }
    }

    #[test]
    fn pruned_equals_exact() {
        for seed in 0..8 {
            let bs = random_instance(100 + seed, 80);
            let exact = rng_build(&bs, &[], &RngOptions { exact: true, ..Default::default() })
                .unwrap();
            let pruned =
                rng_build(&bs, &[], &RngOptions { exact: false, ..Default::default() }).unwrap();
            assert_eq!(edge_ids(&exact), edge_ids(&pruned), "seed {}", 100 + seed);
        }
    }

    #[test]
    fn contains_minimum_spanning_tree() {
        for seed in 20..25 {
            let bs = random_instance(seed, 30);
            let m = distance_matrix(&bs, RngMetric::Footprint);
            // Prim
            let n = bs.len();
            let mut in_tree = vec![false; n];
            let mut best = vec![(f64::INFINITY, usize::MAX); n];
            in_tree[0] = true;
            for j in 1..n {
                best[j] = (m.get(0, j), 0);
            }
            let mut mst: Vec<(u64, u64)> = Vec::new();
            for _ in 1..n {
                let (j, &(_, from)) = best
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| !in_tree[*j])
                    .min_by(|a, b| a.1 .0.partial_cmp(&b.1 .0).unwrap())
                    .unwrap();
                in_tree[j] = true;
                let (a, b) = (bs[j].id, bs[from].id);
                mst.push((a.min(b), a.max(b)));
                for k in 0..n {
                    if !in_tree[k] && m.get(j, k) < best[k].0 {
                        best[k] = (m.get(j, k), j);
                    }
                }
            }
            let edges = edge_ids(
                &rng_build(&bs, &[], &RngOptions { exact: true, ..Default::default() }).unwrap(),
            );
            for e in mst {
                assert!(edges.contains(&e), "seed {seed}: MST edge {e:?} missing");
            }
        }
    }

    #[test]
    fn point_like_rng_within_delaunay() {
        use std::collections::HashSet;
        for seed in 30..34 {
            let bs: Vec<BuildingRecord> = random_instance(seed, 25)
                .into_iter()
                .map(|b| {
                    sq(b.id, b.centroid.x, b.centroid.y, 0.01) // shrink to near-points
                })
                .collect();
            let pts: Vec<delaunator::Point> = bs
                .iter()
                .map(|b| delaunator::Point { x: b.centroid.x, y: b.centroid.y })
                .collect();
            let tri = delaunator::triangulate(&pts);
            let mut dt: HashSet<(u64, u64)> = HashSet::new();
            for t in tri.triangles.chunks(3) {
                for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                    let (x, y) = (bs[a].id, bs[b].id);
                    dt.insert((x.min(y), x.max(y)));
                }
            }
            let edges = edge_ids(
                &rng_build(&bs, &[], &RngOptions { exact: true, ..Default::default() }).unwrap(),
            );
            for e in edges {
                assert!(dt.contains(&e), "seed {seed}: RNG edge {e:?} outside Delaunay");
            }
        }
    }

    #[test]
    fn removal_only_unblocks_pairs_witnessed_by_removed() {
        for seed in 40..44 {
            let bs = random_instance(seed, 20);
            let before = rng_oracle(&bs, RngMetric::Footprint);
            let m = distance_matrix(&bs, RngMetric::Footprint);
            let removed = 7usize;
            let kept: Vec<BuildingRecord> = bs
                .iter()
                .filter(|b| b.id != bs[removed].id)
                .cloned()
                .collect();
            let after = rng_oracle(&kept, RngMetric::Footprint);
            for e in after {
                if !before.contains(&e) {
                    // every witness of this pair must have been the removed one
                    let i = bs.iter().position(|b| b.id == e.0).unwrap();
                    let j = bs.iter().position(|b| b.id == e.1).unwrap();
                    for k in 0..bs.len() {
                        if k == i || k == j {
                            continue;
                        }
                        if m.get(i, k).max(m.get(j, k)) < m.get(i, j) {
                            assert_eq!(k, removed, "seed {seed}: foreign witness survived");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn duplicate_and_empty_errors() {
        assert_eq!(
            rng_build(&[], &[], &RngOptions::default()),
            Err(ProximityError::EmptyDataset)
        );
        let bs = vec![sq(1, 0.0, 0.0, 2.0), sq(1, 10.0, 0.0, 2.0)];
        assert_eq!(
            rng_build(&bs, &[], &RngOptions::default()),
            Err(ProximityError::DuplicateId(1))
        );
    }

    #[test]
    fn single_building_has_no_edges() {
        let bs = vec![sq(0, 0.0, 0.0, 2.0)];
        assert!(rng_build(&bs, &[], &RngOptions::default()).unwrap().is_empty());
    }
}
