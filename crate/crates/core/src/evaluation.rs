//! Dataset statistics, precision/recall scoring, timing harness, and a
//! synthetic generator with known ground truth.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Polygon, Polyline};
use crate::pipeline::baseline::BaselineGraph;
use crate::pipeline::{
    build_kg, recognize_on_graph, CompiledRules, LinearPattern, PipelineError, RecognizeMode,
    RecognizeOptions, Schema,
};
use crate::proximity::{BuildingRecord, ProximityError, RngOptions};
use crate::relations::Thresholds;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("invalid spec: {0}")]
    InvalidSpec(&'static str),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DatasetStats {
    pub b_count: usize,
    /// Mean footprint area, square meters.
    pub ave_a: f64,
    /// Mean significant-edge count.
    pub ave_e: f64,
    /// Fraction of buildings with at most eight significant edges.
    pub rate_e_le8: f64,
}

pub fn dataset_stats(buildings: &[BuildingRecord]) -> Result<DatasetStats, EvalError> {
    if buildings.is_empty() {
        return Err(PipelineError::from(ProximityError::EmptyDataset).into());
    }
    let n = buildings.len() as f64;
    Ok(DatasetStats {
        b_count: buildings.len(),
        ave_a: buildings.iter().map(|b| b.area).sum::<f64>() / n,
        ave_e: buildings.iter().map(|b| b.edge_cnt as f64).sum::<f64>() / n,
        rate_e_le8: buildings.iter().filter(|b| b.edge_cnt <= 8).count() as f64 / n,
    })
}

/// How a detected pattern is matched against a ground-truth set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchCriterion {
    /// Building sets must be equal.
    Exact,
    /// Jaccard overlap of the sets must reach `tau`.
    Jaccard { tau: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PRReport {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
}

/// Standard definitions. An undefined ratio (empty denominator) scores 1.0
/// when the opposite error count is also zero, else 0.0.
pub fn pr_from_counts(tp: usize, fp: usize, fn_: usize) -> PRReport {
    let ratio = |num: usize, den: usize, other_err: usize| {
        if den == 0 {
            if other_err == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            num as f64 / den as f64
        }
    };
    PRReport {
        tp,
        fp,
        fn_,
        precision: ratio(tp, tp + fp, fn_),
        recall: ratio(tp, tp + fn_, fp),
    }
}

/// Greedy one-to-one matching of detected patterns to truth sets, best
/// overlap first. Tie order is independent of which side is which, so
/// swapping the arguments swaps precision and recall exactly.
pub fn precision_recall(
    detected: &[LinearPattern],
    truth: &[BTreeSet<u64>],
    criterion: MatchCriterion,
) -> PRReport {
    let det_sets: Vec<BTreeSet<u64>> = detected
        .iter()
        .map(|p| p.building_ids.iter().copied().collect())
        .collect();
    precision_recall_sets(&det_sets, truth, criterion)
}

/// [`precision_recall`] over plain building-id sets, for detections read
/// back from serialized output.
pub fn precision_recall_sets(
    det_sets: &[BTreeSet<u64>],
    truth: &[BTreeSet<u64>],
    criterion: MatchCriterion,
) -> PRReport {
    let mut candidates = Vec::new();
    for (di, d) in det_sets.iter().enumerate() {
        for (ti, t) in truth.iter().enumerate() {
            let inter = d.intersection(t).count();
            let union = d.len() + t.len() - inter;
            let j = if union == 0 {
                1.0
            } else {
                inter as f64 / union as f64
            };
            let ok = match criterion {
                MatchCriterion::Exact => d == t,
                MatchCriterion::Jaccard { tau } => j >= tau,
            };
            if ok {
                let (lo, hi) = if d <= t { (d, t) } else { (t, d) };
                candidates.push((j, lo.clone(), hi.clone(), di, ti));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| a.1.cmp(&b.1))
            .then_with(|| a.2.cmp(&b.2))
    });
    let mut d_used = vec![false; det_sets.len()];
    let mut t_used = vec![false; truth.len()];
    let mut tp = 0;
    for (_, _, _, di, ti) in candidates {
        if !d_used[di] && !t_used[ti] {
            d_used[di] = true;
            t_used[ti] = true;
            tp += 1;
        }
    }
    pr_from_counts(tp, det_sets.len() - tp, truth.len() - tp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Engine,
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchReport {
    pub runs: usize,
    pub min_t: f64,
    pub max_t: f64,
    pub ave_t: f64,
    pub std_t: f64,
    pub v_count: usize,
    pub e_count: usize,
}

impl BenchReport {
    fn from_times(times: &[f64], v_count: usize, e_count: usize) -> Self {
        let n = times.len() as f64;
        let ave = times.iter().sum::<f64>() / n;
        let std = if times.len() < 2 {
            0.0
        } else {
            (times.iter().map(|t| (t - ave) * (t - ave)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        BenchReport {
            runs: times.len(),
            min_t: times.iter().copied().fold(f64::INFINITY, f64::min),
            max_t: times.iter().copied().fold(0.0, f64::max),
            ave_t: ave,
            std_t: std,
            v_count,
            e_count,
        }
    }
}

/// Times the recognition phase only, wall clock, after one untimed warm-up
/// run. Graph construction and rule parsing stay outside the clock; under
/// the attribute schema the timed engine run includes the relation
/// derivation scripts, mirroring how the two schemas are accounted.
pub fn benchmark(
    buildings: &[BuildingRecord],
    roads: &[Polyline],
    t: &Thresholds,
    method: Method,
    schema: Schema,
    runs: usize,
) -> Result<BenchReport, EvalError> {
    if runs == 0 {
        return Err(EvalError::InvalidSpec("runs must be at least 1"));
    }
    let rng = RngOptions::default();
    let mut times = Vec::with_capacity(runs);
    match method {
        Method::Engine => {
            let g = build_kg(schema, buildings, roads, t, &rng)?;
            let rules = CompiledRules::render(t)?;
            let opts = RecognizeOptions {
                mode: RecognizeMode::Engine,
                ..Default::default()
            };
            for timed in std::iter::once(false).chain(std::iter::repeat(true).take(runs)) {
                let mut scratch = g.clone();
                let start = Instant::now();
                recognize_on_graph(&mut scratch, buildings, t, &opts, &rules)?;
                if timed {
                    times.push(start.elapsed().as_secs_f64());
                }
            }
            Ok(BenchReport::from_times(&times, g.node_count(), g.edge_count()))
        }
        Method::Baseline => {
            let bg = BaselineGraph::build(buildings, roads, t, &rng, schema)?;
            for timed in std::iter::once(false).chain(std::iter::repeat(true).take(runs)) {
                let start = Instant::now();
                bg.recognize(t)?;
                if timed {
                    times.push(start.elapsed().as_secs_f64());
                }
            }
            Ok(BenchReport::from_times(
                &times,
                bg.node_count(),
                bg.edge_count(),
            ))
        }
    }
}

pub const BENCH_CSV_HEADER: &str =
    "dataset,schema,method,v_count,e_count,runs,min_t,max_t,ave_t,std_t,e_rate";

pub fn bench_csv_row(
    dataset: &str,
    schema: Schema,
    method: Method,
    r: &BenchReport,
    e_rate: Option<f64>,
) -> String {
    let schema = match schema {
        Schema::Precomputed => "precomputed",
        Schema::Attributes => "attributes",
    };
    let method = match method {
        Method::Engine => "engine",
        Method::Baseline => "baseline",
    };
    let e_rate = e_rate.map_or(String::new(), |v| format!("{v:.4}"));
    format!(
        "{dataset},{schema},{method},{},{},{},{:.6},{:.6},{:.6},{:.6},{e_rate}",
        r.v_count, r.e_count, r.runs, r.min_t, r.max_t, r.ave_t, r.std_t
    )
}

/// Layout parameters for synthetic test scenes: staggered rows of identical
/// rectangles (the ground-truth patterns) plus dissimilar decoys scattered
/// around them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub rows: usize,
    pub cols: usize,
    /// Centroid spacing within a row, meters.
    pub spacing: f64,
    /// Uniform coordinate noise amplitude, meters.
    pub jitter: f64,
    /// Global rotation of the whole scene, degrees.
    pub rotation: f64,
    pub decoys: usize,
    pub seed: u64,
}

/// Base building footprint of the generator, meters. Deep enough that
/// lateral jitter of a couple meters keeps row neighbors facing each
/// other.
pub const GEN_BUILDING: (f64, f64) = (10.0, 8.0);

/// Row pitch as a multiple of the in-row spacing. Combined with the
/// half-spacing stagger of odd rows, chains that cross rows bend by at
/// least 35 degrees, so only the rows themselves are linear patterns.
const ROW_PITCH: f64 = 1.6;

/// Area multiples and orientation steps for decoys; each fails similarity
/// against the row buildings on area alone.
const DECOY_AREA: [f64; 3] = [3.0, 7.0, 16.0];

pub fn generate_synthetic(
    spec: &GenSpec,
) -> Result<(Vec<BuildingRecord>, Vec<BTreeSet<u64>>), EvalError> {
    let (w, h) = GEN_BUILDING;
    if spec.rows == 0 {
        return Err(EvalError::InvalidSpec("rows must be at least 1"));
    }
    if spec.cols < 3 {
        return Err(EvalError::InvalidSpec(
            "cols must be at least 3 for rows to be patterns",
        ));
    }
    if spec.spacing <= w {
        return Err(EvalError::InvalidSpec("spacing must exceed building width"));
    }
    if spec.jitter < 0.0 || spec.jitter >= spec.spacing / 2.0 {
        return Err(EvalError::InvalidSpec(
            "jitter must lie in [0, spacing / 2)",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (sr, cr) = spec.rotation.to_radians().sin_cos();
    let place = |x: f64, y: f64| Point::new(x * cr - y * sr, x * sr + y * cr);
    let jog = |rng: &mut ChaCha8Rng| {
        if spec.jitter > 0.0 {
            rng.gen_range(-spec.jitter..=spec.jitter)
        } else {
            0.0
        }
    };

    let row_gap = ROW_PITCH * spec.spacing;
    let mut buildings = Vec::new();
    let mut truth = Vec::new();
    // (unrotated centroid, half diagonal) of everything placed so far
    let mut placed: Vec<(Point, f64)> = Vec::new();
    let base_hd = 0.5 * (w * w + h * h).sqrt();
    for r in 0..spec.rows {
        let offset = if r % 2 == 1 { spec.spacing / 2.0 } else { 0.0 };
        let mut row_ids = BTreeSet::new();
        for c in 0..spec.cols {
            let id = (r * spec.cols + c) as u64;
            let x = c as f64 * spec.spacing + offset + jog(&mut rng);
            let y = r as f64 * row_gap + jog(&mut rng);
            let p = place(x, y);
            buildings.push(
                BuildingRecord::from_polygon(id, Polygon::rectangle(p.x, p.y, w, h, spec.rotation))
                    .map_err(PipelineError::from)?,
            );
            placed.push((Point::new(x, y), base_hd));
            row_ids.insert(id);
        }
        truth.push(row_ids);
    }

    let grid_w = (spec.cols - 1) as f64 * spec.spacing + spec.spacing / 2.0;
    let grid_h = (spec.rows - 1) as f64 * row_gap;
    let margin = 4.0 * spec.spacing + 40.0;
    for d in 0..spec.decoys {
        let id = (spec.rows * spec.cols + d) as u64;
        let scale = DECOY_AREA[rng.gen_range(0..DECOY_AREA.len())].sqrt();
        let ori = 30.0 * rng.gen_range(0..6) as f64 + spec.rotation;
        let hd = base_hd * scale;
        let mut spot = None;
        for _ in 0..200 {
            let x = rng.gen_range(-margin..grid_w + margin);
            let y = rng.gen_range(-margin..grid_h + margin);
            let clear = placed
                .iter()
                .all(|(q, qhd)| q.dist(&Point::new(x, y)) >= 1.5 * spec.spacing + hd + qhd);
            if clear {
                spot = Some(Point::new(x, y));
                break;
            }
        }
        let at = spot.ok_or(EvalError::InvalidSpec(
            "decoys do not fit with the required clearance",
        ))?;
        let p = place(at.x, at.y);
        buildings.push(
            BuildingRecord::from_polygon(id, Polygon::rectangle(p.x, p.y, w * scale, h * scale, ori))
                .map_err(PipelineError::from)?,
        );
        placed.push((at, hd));
    }
    Ok((buildings, truth))
}

/// A generator spec sized to produce exactly `n` buildings, for scaling
/// sweeps. Rows and columns grow together; the remainder becomes decoys.
pub fn scaled_spec(n: usize, seed: u64) -> Result<GenSpec, EvalError> {
    if n < 3 {
        return Err(EvalError::InvalidSpec("need at least 3 buildings"));
    }
    let rows = (((n / 2) as f64).sqrt() as usize).max(1);
    let cols = (n / rows).max(3);
    if rows * cols > n {
        return Err(EvalError::InvalidSpec("size too small for a full row"));
    }
    Ok(GenSpec {
        rows,
        cols,
        spacing: 14.0,
        jitter: 0.5,
        rotation: 0.0,
        decoys: n - rows * cols,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::recognize_linear_patterns;
    use approx::assert_abs_diff_eq;

    #[test]
    fn stats_of_one_rectangle() {
        let b =
            vec![BuildingRecord::from_polygon(0, Polygon::rectangle(0.0, 0.0, 2.0, 3.0, 0.0))
                .unwrap()];
        let s = dataset_stats(&b).unwrap();
        assert_eq!(s.b_count, 1);
        assert_abs_diff_eq!(s.ave_a, 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.ave_e, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.rate_e_le8, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn edge_rate_counts_only_simple_outlines() {
        // A rectangle and a 12-pointed sawtooth ring: 4 and 12 edges.
        let saw: Vec<Point> = (0..12)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 12.0;
                let r = if k % 2 == 0 { 10.0 } else { 6.0 };
                Point::new(r * a.cos(), r * a.sin())
            })
            .collect();
        let b = vec![
            BuildingRecord::from_polygon(0, Polygon::rectangle(0.0, 0.0, 4.0, 2.0, 0.0)).unwrap(),
            BuildingRecord::from_polygon(1, Polygon::new(saw).unwrap()).unwrap(),
        ];
        assert_eq!(b[1].edge_cnt, 12);
        let s = dataset_stats(&b).unwrap();
        assert_abs_diff_eq!(s.rate_e_le8, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.ave_e, 8.0, epsilon = 1e-12);
    }

    #[test]
    fn stats_refuse_empty_input() {
        assert_eq!(
            dataset_stats(&[]).unwrap_err(),
            EvalError::Pipeline(PipelineError::Proximity(ProximityError::EmptyDataset))
        );
    }

    #[test]
    fn published_counts_reproduce_published_rates() {
        let r = pr_from_counts(127, 5, 12);
        assert_abs_diff_eq!(r.precision, 0.96212, epsilon = 1e-5);
        assert_abs_diff_eq!(r.recall, 0.91367, epsilon = 1e-5);
    }

    #[test]
    fn empty_denominators_follow_the_convention() {
        assert_eq!(pr_from_counts(0, 0, 0).precision, 1.0);
        assert_eq!(pr_from_counts(0, 0, 0).recall, 1.0);
        assert_eq!(pr_from_counts(0, 3, 0).recall, 0.0);
        assert_eq!(pr_from_counts(0, 0, 2).precision, 0.0);
    }

    fn pat(ids: &[u64]) -> LinearPattern {
        LinearPattern {
            building_ids: ids.to_vec(),
            source_triples: vec![],
            strict_chain: true,
        }
    }

    fn set(ids: &[u64]) -> BTreeSet<u64> {
        ids.iter().copied().collect()
    }

    #[test]
    fn identical_sets_score_perfectly() {
        let detected = vec![pat(&[1, 2, 3]), pat(&[4, 5, 6, 7])];
        let truth = vec![set(&[4, 5, 6, 7]), set(&[1, 2, 3])];
        let r = precision_recall(&detected, &truth, MatchCriterion::Exact);
        assert_eq!((r.tp, r.fp, r.fn_), (2, 0, 0));
        assert_eq!((r.precision, r.recall), (1.0, 1.0));
    }

    #[test]
    fn jaccard_two_thirds_misses_the_bar() {
        let detected = vec![pat(&[1, 2, 3, 4, 5])];
        let truth = vec![set(&[1, 2, 3, 4, 6])];
        let r = precision_recall(&detected, &truth, MatchCriterion::Jaccard { tau: 0.8 });
        assert_eq!((r.tp, r.fp, r.fn_), (0, 1, 1));
        let loose = precision_recall(&detected, &truth, MatchCriterion::Jaccard { tau: 0.6 });
        assert_eq!((loose.tp, loose.fp, loose.fn_), (1, 0, 0));
    }

    #[test]
    fn matching_is_one_to_one() {
        // Two detected rows both overlap the same truth set; only one may
        // claim it.
        let detected = vec![pat(&[1, 2, 3, 4]), pat(&[1, 2, 3, 5])];
        let truth = vec![set(&[1, 2, 3, 4, 5])];
        let r = precision_recall(&detected, &truth, MatchCriterion::Jaccard { tau: 0.5 });
        assert_eq!((r.tp, r.fp, r.fn_), (1, 1, 0));
    }

    #[test]
    fn swapping_sides_swaps_the_scores() {
        let a = vec![pat(&[1, 2, 3]), pat(&[7, 8, 9]), pat(&[4, 5, 6])];
        let b = vec![set(&[1, 2, 3]), set(&[4, 5, 6, 7])];
        let fwd = precision_recall(&a, &b, MatchCriterion::Jaccard { tau: 0.7 });
        let back_pats: Vec<LinearPattern> = b
            .iter()
            .map(|s| pat(&s.iter().copied().collect::<Vec<_>>()))
            .collect();
        let back_truth: Vec<BTreeSet<u64>> =
            a.iter().map(|p| set(&p.building_ids)).collect();
        let back = precision_recall(&back_pats, &back_truth, MatchCriterion::Jaccard { tau: 0.7 });
        assert_eq!(fwd.tp, back.tp);
        assert_eq!(fwd.precision, back.recall);
        assert_eq!(fwd.recall, back.precision);
    }

    #[test]
    fn single_row_spec_gives_one_truth() {
        let spec = GenSpec {
            rows: 1,
            cols: 5,
            spacing: 14.0,
            jitter: 0.0,
            rotation: 0.0,
            decoys: 0,
            seed: 1,
        };
        let (b, truth) = generate_synthetic(&spec).unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(truth, vec![set(&[0, 1, 2, 3, 4])]);
    }

    #[test]
    fn generation_is_reproducible_per_seed() {
        let spec = GenSpec {
            rows: 2,
            cols: 4,
            spacing: 13.0,
            jitter: 1.0,
            rotation: 30.0,
            decoys: 3,
            seed: 7,
        };
        let (b1, t1) = generate_synthetic(&spec).unwrap();
        let (b2, t2) = generate_synthetic(&spec).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(b1.len(), b2.len());
        for (x, y) in b1.iter().zip(&b2) {
            assert_eq!(x.centroid, y.centroid);
        }
        let (b3, t3) = generate_synthetic(&GenSpec { seed: 8, ..spec }).unwrap();
        assert_eq!(t1, t3);
        assert!(b1.iter().zip(&b3).any(|(x, y)| x.centroid != y.centroid));
    }

    #[test]
    fn bad_specs_are_refused() {
        let good = GenSpec {
            rows: 1,
            cols: 3,
            spacing: 14.0,
            jitter: 0.0,
            rotation: 0.0,
            decoys: 0,
            seed: 0,
        };
        for (spec, what) in [
            (GenSpec { rows: 0, ..good }, "rows"),
            (GenSpec { cols: 2, ..good }, "cols"),
            (GenSpec { spacing: 9.0, ..good }, "spacing"),
            (GenSpec { jitter: 7.0, ..good }, "jitter"),
            (GenSpec { jitter: -0.1, ..good }, "jitter sign"),
        ] {
            assert!(
                matches!(generate_synthetic(&spec), Err(EvalError::InvalidSpec(_))),
                "{what} should be rejected"
            );
        }
    }

    #[test]
    fn zero_jitter_rows_recognize_perfectly() {
        let spec = GenSpec {
            rows: 3,
            cols: 10,
            spacing: 14.0,
            jitter: 0.0,
            rotation: 0.0,
            decoys: 5,
            seed: 42,
        };
        let (b, truth) = generate_synthetic(&spec).unwrap();
        assert_eq!(b.len(), 35);
        let t = Thresholds::default();
        let g = build_kg(Schema::Precomputed, &b, &[], &t, &RngOptions::default()).unwrap();
        let pats =
            recognize_linear_patterns(&g, &b, &t, &RecognizeOptions::default()).unwrap();
        let r = precision_recall(&pats, &truth, MatchCriterion::Exact);
        assert_eq!((r.precision, r.recall), (1.0, 1.0), "{pats:?}");
    }

    #[test]
    fn rotated_scene_recognizes_the_same_rows() {
        let spec = GenSpec {
            rows: 2,
            cols: 6,
            spacing: 14.0,
            jitter: 0.0,
            rotation: 37.0,
            decoys: 0,
            seed: 5,
        };
        let (b, truth) = generate_synthetic(&spec).unwrap();
        let t = Thresholds::default();
        let g = build_kg(Schema::Precomputed, &b, &[], &t, &RngOptions::default()).unwrap();
        let pats =
            recognize_linear_patterns(&g, &b, &t, &RecognizeOptions::default()).unwrap();
        let r = precision_recall(&pats, &truth, MatchCriterion::Exact);
        assert_eq!((r.precision, r.recall), (1.0, 1.0));
    }

    #[test]
    fn scaled_specs_hit_their_sizes() {
        for n in [36, 241, 685, 1295, 3566] {
            let spec = scaled_spec(n, 9).unwrap();
            assert_eq!(spec.rows * spec.cols + spec.decoys, n);
            assert!(spec.cols >= 3);
        }
        let (b, _) = generate_synthetic(&scaled_spec(36, 9).unwrap()).unwrap();
        assert_eq!(b.len(), 36);
    }

    #[test]
    fn benchmark_reports_are_coherent() {
        let (b, _) = generate_synthetic(&GenSpec {
            rows: 2,
            cols: 5,
            spacing: 14.0,
            jitter: 0.0,
            rotation: 0.0,
            decoys: 0,
            seed: 3,
        })
        .unwrap();
        let t = Thresholds::default();
        for method in [Method::Engine, Method::Baseline] {
            for schema in [Schema::Precomputed, Schema::Attributes] {
                let r = benchmark(&b, &[], &t, method, schema, 3).unwrap();
                assert_eq!(r.runs, 3);
                assert!(r.min_t <= r.ave_t && r.ave_t <= r.max_t);
                assert!(r.std_t >= 0.0);
                assert_eq!(r.v_count, 10);
                assert!(r.e_count >= 8);
            }
        }
        let single = benchmark(&b, &[], &t, Method::Baseline, Schema::Attributes, 1).unwrap();
        assert_eq!(single.std_t, 0.0);
        assert_eq!(single.min_t, single.max_t);
        assert_eq!(
            benchmark(&b, &[], &t, Method::Engine, Schema::Precomputed, 0).unwrap_err(),
            EvalError::InvalidSpec("runs must be at least 1")
        );
    }

    #[test]
    fn csv_rows_match_the_documented_header() {
        assert_eq!(
            BENCH_CSV_HEADER.split(',').count(),
            bench_csv_row(
                "d1",
                Schema::Precomputed,
                Method::Engine,
                &BenchReport {
                    runs: 2,
                    min_t: 0.5,
                    max_t: 1.5,
                    ave_t: 1.0,
                    std_t: 0.1,
                    v_count: 10,
                    e_count: 9
                },
                Some(2.5)
            )
            .split(',')
            .count()
        );
        let row = bench_csv_row(
            "d1",
            Schema::Attributes,
            Method::Baseline,
            &BenchReport {
                runs: 1,
                min_t: 0.0,
                max_t: 0.0,
                ave_t: 0.0,
                std_t: 0.0,
                v_count: 1,
                e_count: 0,
            },
            None,
        );
        assert!(row.starts_with("d1,attributes,baseline,1,0,1,"));
        assert!(row.ends_with(','), "empty e_rate column: {row}");
    }
}
