//! Planar geometry for building footprints.
//!
//! Coordinates are planar metres (projected CRS). Polygons are stored as
//! open rings (no repeated closing vertex), counter-clockwise.

use thiserror::Error;

/// Consecutive vertices closer than this are treated as duplicates.
pub const DUP_TOL: f64 = 1e-6;
/// Smallest polygon area considered non-degenerate, in square metres.
pub const MIN_AREA: f64 = 1e-9;
/// Default angular tolerance for treating consecutive edges as collinear.
pub const COLLINEAR_TOL_DEG: f64 = 1.0;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(&'static str),
    #[error("polygon ring self-intersects")]
    SelfIntersecting,
    #[error("polyline needs at least two distinct points")]
    DegeneratePolyline,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    #[inline]
    fn sub(&self, other: &Point) -> (f64, f64) {
        (self.x - other.x, self.y - other.y)
    }
}

#[inline]
fn cross(o: &Point, a: &Point, b: &Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Simple polygon, counter-clockwise open ring.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    ring: Vec<Point>,
}

impl Polygon {
    /// Validates and normalizes a ring: drops a repeated closing vertex,
    /// merges consecutive near-duplicates, enforces counter-clockwise
    /// orientation, rejects degenerate or self-intersecting input.
    pub fn new(mut ring: Vec<Point>) -> Result<Self, GeometryError> {
        if ring.len() > 1 && ring[0].dist(ring.last().unwrap()) < DUP_TOL {
            ring.pop();
        }
        let mut pts: Vec<Point> = Vec::with_capacity(ring.len());
        for p in ring {
            if pts.last().map_or(true, |q: &Point| q.dist(&p) >= DUP_TOL) {
                pts.push(p);
            }
        }
        while pts.len() > 1 && pts[0].dist(pts.last().unwrap()) < DUP_TOL {
            pts.pop();
        }
        if pts.len() < 3 {
            return Err(GeometryError::DegeneratePolygon(
                "fewer than 3 distinct vertices",
            ));
        }
        let signed = signed_area(&pts);
        if signed.abs() < MIN_AREA {
            return Err(GeometryError::DegeneratePolygon("area below 1e-9"));
        }
        if signed < 0.0 {
            pts.reverse();
        }
        let poly = Polygon { ring: pts };
        poly.check_simple()?;
        Ok(poly)
    }

    /// Axis-aligned rectangle rotated by `angle_deg` around its center.
    pub fn rectangle(cx: f64, cy: f64, width: f64, height: f64, angle_deg: f64) -> Self {
        let (s, c) = angle_deg.to_radians().sin_cos();
        let (hw, hh) = (width / 2.0, height / 2.0);
        let ring = [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)]
            .iter()
            .map(|&(x, y)| Point::new(cx + x * c - y * s, cy + x * s + y * c))
            .collect();
        Polygon::new(ring).expect("rectangle with positive extents is a valid polygon")
    }

    pub fn ring(&self) -> &[Point] {
        &self.ring
    }

    fn check_simple(&self) -> Result<(), GeometryError> {
        let n = self.ring.len();
        for i in 0..n {
            for j in i + 1..n {
                if self.ring[i].dist(&self.ring[j]) < DUP_TOL {
                    return Err(GeometryError::SelfIntersecting);
                }
            }
        }
        for i in 0..n {
            let (a, b) = (&self.ring[i], &self.ring[(i + 1) % n]);
            for j in i + 1..n {
                // skip edges sharing a vertex
                if j == i || (j + 1) % n == i || j == (i + 1) % n {
                    continue;
                }
                let (c, d) = (&self.ring[j], &self.ring[(j + 1) % n]);
                if segments_properly_intersect(a, b, c, d) {
                    return Err(GeometryError::SelfIntersecting);
                }
            }
        }
        Ok(())
    }

    /// Ray-casting point containment; boundary points count as inside.
    pub fn contains(&self, p: &Point) -> bool {
        let n = self.ring.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (&self.ring[i], &self.ring[(i + 1) % n]);
            if point_segment_distance(p, a, b) < DUP_TOL {
                return true;
            }
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn segments(&self) -> impl Iterator<Item = (&Point, &Point)> {
        let n = self.ring.len();
        (0..n).map(move |i| (&self.ring[i], &self.ring[(i + 1) % n]))
    }
}

/// Open chain of at least two distinct points (road centerline).
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    points: Vec<Point>,
}

impl Polyline {
    pub fn new(points: Vec<Point>) -> Result<Self, GeometryError> {
        let mut pts: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if pts.last().map_or(true, |q: &Point| q.dist(&p) >= DUP_TOL) {
                pts.push(p);
            }
        }
        if pts.len() < 2 {
            return Err(GeometryError::DegeneratePolyline);
        }
        Ok(Polyline { points: pts })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
}

/// Minimum-area bounding rectangle of a polygon.
///
/// `axis_deg` is the direction of the longer side folded into `[0, 180)`;
/// `half_len >= half_wid > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub center: Point,
    pub axis_deg: f64,
    pub half_len: f64,
    pub half_wid: f64,
}

impl OrientedRect {
    #[inline]
    pub fn area(&self) -> f64 {
        4.0 * self.half_len * self.half_wid
    }

    /// Half-extent of the rectangle when projected on a unit direction.
    fn support(&self, dir: (f64, f64)) -> f64 {
        let (s, c) = self.axis_deg.to_radians().sin_cos();
        let along = (c * dir.0 + s * dir.1).abs();
        let across = (-s * dir.0 + c * dir.1).abs();
        self.half_len * along + self.half_wid * across
    }
}

fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (&ring[i], &ring[(i + 1) % n]);
        s += a.x * b.y - b.x * a.y;
    }
    s / 2.0
}

/// Enclosed area in square metres (always positive for a valid polygon).
pub fn polygon_area(p: &Polygon) -> f64 {
    signed_area(&p.ring)
}

/// Area-weighted centroid.
pub fn centroid(p: &Polygon) -> Point {
    let a = signed_area(&p.ring);
    let n = p.ring.len();
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..n {
        let (u, v) = (&p.ring[i], &p.ring[(i + 1) % n]);
        let w = u.x * v.y - v.x * u.y;
        cx += (u.x + v.x) * w;
        cy += (u.y + v.y) * w;
    }
    Point::new(cx / (6.0 * a), cy / (6.0 * a))
}

/// Number of sides after dropping vertices whose adjacent edges are
/// collinear within `tol_deg`.
pub fn edge_count(p: &Polygon, tol_deg: f64) -> Result<usize, GeometryError> {
    let mut ring = p.ring.clone();
    loop {
        let n = ring.len();
        if n < 3 {
            return Err(GeometryError::DegeneratePolygon(
                "collinear simplification left fewer than 3 vertices",
            ));
        }
        let mut kept: Vec<Point> = Vec::with_capacity(n);
        for i in 0..n {
            let prev = &ring[(i + n - 1) % n];
            let cur = &ring[i];
            let next = &ring[(i + 1) % n];
            let d1 = cur.sub(prev);
            let d2 = next.sub(cur);
            let a1 = d1.1.atan2(d1.0).to_degrees();
            let a2 = d2.1.atan2(d2.0).to_degrees();
            let mut turn = (a2 - a1).rem_euclid(360.0);
            if turn > 180.0 {
                turn -= 360.0;
            }
            if turn.abs() >= tol_deg {
                kept.push(*cur);
            }
        }
        if kept.len() == ring.len() {
            return Ok(ring.len());
        }
        ring = kept;
    }
}

/// Fold an angle in degrees into `[0, 180)`.
#[inline]
pub fn fold_deg_180(a: f64) -> f64 {
    let r = a.rem_euclid(180.0);
    if r >= 180.0 {
        r - 180.0
    } else {
        r
    }
}

/// Acute difference of two undirected orientations in degrees, in `[0, 90]`.
#[inline]
pub fn angle_diff_180(a: f64, b: f64) -> f64 {
    let d = (fold_deg_180(a) - fold_deg_180(b)).abs();
    d.min(180.0 - d)
}

fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup_by(|a, b| a.dist(b) < DUP_TOL);
    if pts.len() < 3 {
        return pts;
    }
    let half = |iter: &mut dyn Iterator<Item = &Point>| {
        let mut chain: Vec<Point> = Vec::new();
        for p in iter {
            while chain.len() >= 2
                && cross(&chain[chain.len() - 2], &chain[chain.len() - 1], p) <= 0.0
            {
                chain.pop();
            }
            chain.push(*p);
        }
        chain.pop();
        chain
    };
    let mut hull = half(&mut pts.iter());
    hull.extend(half(&mut pts.iter().rev()));
    hull
}

/// Minimum-area bounding rectangle via rotating calipers over the hull:
/// the optimum is aligned with some hull edge, so each edge direction is
/// tried and the tightest box kept.
pub fn min_bounding_rect(p: &Polygon) -> OrientedRect {
    let hull = convex_hull(&p.ring);
    let n = hull.len();
    let mut best: Option<(f64, OrientedRect)> = None;
    for i in 0..n {
        let a = &hull[i];
        let b = &hull[(i + 1) % n];
        let (dx, dy) = b.sub(a);
        let len = dx.hypot(dy);
        if len < DUP_TOL {
            continue;
        }
        let u = (dx / len, dy / len);
        let v = (-u.1, u.0);
        let (mut ulo, mut uhi) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut vlo, mut vhi) = (f64::INFINITY, f64::NEG_INFINITY);
        for q in &hull {
            let pu = q.x * u.0 + q.y * u.1;
            let pv = q.x * v.0 + q.y * v.1;
            ulo = ulo.min(pu);
            uhi = uhi.max(pu);
            vlo = vlo.min(pv);
            vhi = vhi.max(pv);
        }
        let area = (uhi - ulo) * (vhi - vlo);
        if best.as_ref().map_or(true, |(ba, _)| area < *ba) {
            let cu = (ulo + uhi) / 2.0;
            let cv = (vlo + vhi) / 2.0;
            let center = Point::new(cu * u.0 + cv * v.0, cu * u.1 + cv * v.1);
            let (eu, ev) = ((uhi - ulo) / 2.0, (vhi - vlo) / 2.0);
            let theta_u = fold_deg_180(u.1.atan2(u.0).to_degrees());
            let theta_v = fold_deg_180(theta_u + 90.0);
            let rel_tol = 1e-9 * eu.max(ev);
            let rect = if (eu - ev).abs() <= rel_tol {
                // square: both axes tie, keep the smaller angle
                OrientedRect {
                    center,
                    axis_deg: theta_u.min(theta_v),
                    half_len: eu,
                    half_wid: ev,
                }
            } else if eu >= ev {
                OrientedRect {
                    center,
                    axis_deg: theta_u,
                    half_len: eu,
                    half_wid: ev,
                }
            } else {
                OrientedRect {
                    center,
                    axis_deg: theta_v,
                    half_len: ev,
                    half_wid: eu,
                }
            };
            best = Some((area, rect));
        }
    }
    best.expect("valid polygon has a non-degenerate hull").1
}

#[inline]
fn segments_properly_intersect(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let d1 = cross(a, b, c);
    let d2 = cross(a, b, d);
    let d3 = cross(c, d, a);
    let d4 = cross(c, d, b);
    (d1 > 0.0) != (d2 > 0.0)
        && (d3 > 0.0) != (d4 > 0.0)
        && d1 != 0.0
        && d2 != 0.0
        && d3 != 0.0
        && d4 != 0.0
}

fn point_segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let (abx, aby) = b.sub(a);
    let (apx, apy) = p.sub(a);
    let len2 = abx * abx + aby * aby;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0);
    p.dist(&Point::new(a.x + t * abx, a.y + t * aby))
}

fn segment_distance(a: &Point, b: &Point, c: &Point, d: &Point) -> f64 {
    if segments_properly_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Shortest distance between two footprint boundaries; zero when the
/// footprints intersect or one contains the other.
pub fn min_distance(p: &Polygon, q: &Polygon) -> f64 {
    if p.contains(&q.ring[0]) || q.contains(&p.ring[0]) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (a, b) in p.segments() {
        for (c, d) in q.segments() {
            best = best.min(segment_distance(a, b, c, d));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}

/// True when the segment `a..b` properly crosses any segment of the
/// polyline. Touching at an endpoint or running collinear does not count.
pub fn segment_crosses_polyline(a: &Point, b: &Point, line: &Polyline) -> bool {
    line.points
        .windows(2)
        .any(|w| segments_properly_intersect(a, b, &w[0], &w[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrCombine {
    Max,
    Min,
}

/// Facing ratio of two oriented rectangles.
///
/// The larger-area rectangle (ties: the first argument) fixes the frame.
/// Both rectangles are projected on its main axis and on its normal; each
/// direction scores interval overlap divided by total interval span
/// (clamped at zero), and the two scores are combined per `combine`.
pub fn facing_ratio(a: &OrientedRect, b: &OrientedRect, combine: FrCombine) -> f64 {
    let reference = if b.area() > a.area() { b } else { a };
    let th = reference.axis_deg.to_radians();
    let axes = [(th.cos(), th.sin()), (-th.sin(), th.cos())];
    let mut scores = [0.0f64; 2];
    for (k, dir) in axes.iter().enumerate() {
        let ca = a.center.x * dir.0 + a.center.y * dir.1;
        let cb = b.center.x * dir.0 + b.center.y * dir.1;
        let (ea, eb) = (a.support(*dir), b.support(*dir));
        let overlap = (ca + ea).min(cb + eb) - (ca - ea).max(cb - eb);
        let span = (ca + ea).max(cb + eb) - (ca - ea).min(cb - eb);
        scores[k] = if overlap > 0.0 && span > 0.0 {
            overlap / span
        } else {
            0.0
        };
    }
    match combine {
        FrCombine::Max => scores[0].max(scores[1]),
        FrCombine::Min => scores[0].min(scores[1]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn square(cx: f64, cy: f64, side: f64) -> Polygon {
        Polygon::rectangle(cx, cy, side, side, 0.0)
    }

    #[test]
    fn area_of_unit_square() {
        assert_abs_diff_eq!(polygon_area(&square(0.0, 0.0, 1.0)), 1.0);
    }

    #[test]
    fn area_ignores_winding() {
        let ccw = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        let cw = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(2.0, 1.0),
            Point::new(2.0, 0.0),
        ])
        .unwrap();
        assert_abs_diff_eq!(polygon_area(&ccw), 2.0);
        assert_abs_diff_eq!(polygon_area(&cw), 2.0);
    }

    #[test]
    fn collinear_ring_is_degenerate() {
        let r = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
        ]);
        assert!(matches!(r, Err(GeometryError::DegeneratePolygon(_))));
    }

    #[test]
    fn repeated_closing_vertex_is_dropped() {
        let p = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, 0.0),
        ])
        .unwrap();
        assert_eq!(p.ring().len(), 4);
    }

    #[test]
    fn bowtie_rejected() {
        let r = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 3.0),
            Point::new(3.0, 0.0),
            Point::new(0.0, 2.0),
        ]);
        assert_eq!(r, Err(GeometryError::SelfIntersecting));
    }

    #[test]
    fn centroid_of_offset_square() {
        let c = centroid(&square(3.0, -2.0, 2.0));
        assert_abs_diff_eq!(c.x, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.y, -2.0, epsilon = 1e-12);
    }

    #[test]
    fn edge_count_drops_collinear_vertices() {
        // square with a midpoint inserted on the bottom edge
        let p = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(edge_count(&p, COLLINEAR_TOL_DEG).unwrap(), 4);
    }

    #[test]
    fn edge_count_of_l_shape() {
        let p = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 0.0),
            Point::new(4.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 3.0),
            Point::new(0.0, 3.0),
        ])
        .unwrap();
        assert_eq!(edge_count(&p, COLLINEAR_TOL_DEG).unwrap(), 6);
    }

    #[test]
    fn angle_fold_and_diff() {
        assert_abs_diff_eq!(fold_deg_180(190.0), 10.0);
        assert_abs_diff_eq!(fold_deg_180(-10.0), 170.0);
        assert_abs_diff_eq!(angle_diff_180(5.0, 175.0), 10.0);
        assert_abs_diff_eq!(angle_diff_180(0.0, 90.0), 90.0);
        assert_abs_diff_eq!(angle_diff_180(10.0, 10.0), 0.0);
    }

    #[test]
    fn mbr_recovers_rotated_rectangle() {
        let p = Polygon::rectangle(5.0, 7.0, 8.0, 2.0, 30.0);
        let r = min_bounding_rect(&p);
        assert_relative_eq!(r.half_len, 4.0, max_relative = 1e-9);
        assert_relative_eq!(r.half_wid, 1.0, max_relative = 1e-9);
        assert_relative_eq!(r.axis_deg, 30.0, max_relative = 1e-9);
        assert_relative_eq!(r.center.x, 5.0, max_relative = 1e-9);
        assert_relative_eq!(r.center.y, 7.0, max_relative = 1e-9);
    }

    #[test]
    fn mbr_square_ties_to_smaller_angle() {
        let r = min_bounding_rect(&square(0.0, 0.0, 2.0));
        assert_abs_diff_eq!(r.axis_deg, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.half_len, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mbr_area_dominates_polygon_area() {
        let p = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(4.0, 1.0),
            Point::new(5.0, 4.0),
            Point::new(1.0, 3.0),
        ])
        .unwrap();
        let r = min_bounding_rect(&p);
        assert!(r.area() >= polygon_area(&p) - 1e-9);
    }

    #[test]
    fn min_distance_between_separated_squares() {
        let a = square(0.5, 0.5, 1.0);
        let b = square(4.5, 0.5, 1.0);
        assert_abs_diff_eq!(min_distance(&a, &b), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn min_distance_diagonal_squares() {
        let a = square(0.5, 0.5, 1.0);
        let b = square(2.5, 2.5, 1.0);
        assert_abs_diff_eq!(min_distance(&a, &b), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn min_distance_zero_when_overlapping_or_contained() {
        let a = square(0.0, 0.0, 4.0);
        let b = square(1.0, 0.0, 4.0);
        let inner = square(0.0, 0.0, 1.0);
        assert_eq!(min_distance(&a, &b), 0.0);
        assert_eq!(min_distance(&a, &inner), 0.0);
        assert_eq!(min_distance(&inner, &a), 0.0);
    }

    #[test]
    fn crossing_detection_is_proper_only() {
        let road = Polyline::new(vec![Point::new(0.0, -5.0), Point::new(0.0, 5.0)]).unwrap();
        let a = Point::new(-1.0, 0.0);
        let b = Point::new(1.0, 0.0);
        assert!(segment_crosses_polyline(&a, &b, &road));
        // touching the road end only
        let c = Point::new(0.0, 5.0);
        assert!(!segment_crosses_polyline(&a, &c, &road));
        // collinear overlap is not a proper crossing
        let d = Point::new(0.0, -1.0);
        let e = Point::new(0.0, 1.0);
        assert!(!segment_crosses_polyline(&d, &e, &road));
    }

    fn rect_at(cx: f64, cy: f64, hl: f64, hw: f64, axis: f64) -> OrientedRect {
        OrientedRect {
            center: Point::new(cx, cy),
            axis_deg: axis,
            half_len: hl,
            half_wid: hw,
        }
    }

    #[test]
    fn facing_ratio_identical_side_by_side() {
        // 4x2 rectangle and a copy shifted half its length along the axis:
        // main axis overlaps 2/6, the normal coincides, max picks 1.0
        let a = rect_at(0.0, 0.0, 2.0, 1.0, 0.0);
        let b = rect_at(2.0, 0.0, 2.0, 1.0, 0.0);
        assert_abs_diff_eq!(facing_ratio(&a, &b, FrCombine::Max), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            facing_ratio(&a, &b, FrCombine::Min),
            1.0 / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn facing_ratio_shifted_both_ways() {
        // shift makes both direction scores exactly 1/3
        let a = rect_at(0.0, 0.0, 2.0, 1.0, 0.0);
        let b = rect_at(2.0, 1.0, 2.0, 1.0, 0.0);
        assert_abs_diff_eq!(
            facing_ratio(&a, &b, FrCombine::Max),
            1.0 / 3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn facing_ratio_zero_when_fully_diagonal() {
        let a = rect_at(0.0, 0.0, 2.0, 1.0, 0.0);
        let b = rect_at(10.0, 10.0, 2.0, 1.0, 0.0);
        assert_eq!(facing_ratio(&a, &b, FrCombine::Max), 0.0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// Star-shaped polygon around the origin. Gap weights within a
        /// factor of two keep every angular step under half a turn, so the
        /// ring stays simple for any radii.
        fn arb_polygon() -> impl Strategy<Value = Polygon> {
            (4usize..12)
                .prop_flat_map(|n| {
                    (
                        proptest::collection::vec(0.5f64..1.0, n),
                        proptest::collection::vec(1.0f64..20.0, n),
                    )
                })
                .prop_map(|(gaps, radii)| {
                    let total: f64 = gaps.iter().sum();
                    let mut angle = 0.0;
                    let ring = gaps
                        .iter()
                        .zip(&radii)
                        .map(|(g, r)| {
                            angle += g / total * std::f64::consts::TAU;
                            Point::new(r * angle.cos(), r * angle.sin())
                        })
                        .collect();
                    Polygon::new(ring).unwrap()
                })
        }

        fn transform(p: &Polygon, dx: f64, dy: f64, rot_deg: f64) -> Polygon {
            let (s, c) = rot_deg.to_radians().sin_cos();
            Polygon::new(
                p.ring()
                    .iter()
                    .map(|q| Point::new(q.x * c - q.y * s + dx, q.x * s + q.y * c + dy))
                    .collect(),
            )
            .unwrap()
        }

        proptest! {
            #[test]
            fn area_invariant_under_rigid_motion(
                p in arb_polygon(),
                dx in -1e4f64..1e4,
                dy in -1e4f64..1e4,
                rot in 0f64..360.0,
            ) {
                let q = transform(&p, dx, dy, rot);
                prop_assert!(
                    (polygon_area(&p) - polygon_area(&q)).abs()
                        <= 1e-6 * polygon_area(&p).abs().max(1.0)
                );
            }

            #[test]
            fn edge_count_invariant_under_rigid_motion(
                p in arb_polygon(),
                dx in -1e3f64..1e3,
                dy in -1e3f64..1e3,
                rot in 0f64..360.0,
            ) {
                let q = transform(&p, dx, dy, rot);
                prop_assert_eq!(
                    edge_count(&p, COLLINEAR_TOL_DEG).unwrap(),
                    edge_count(&q, COLLINEAR_TOL_DEG).unwrap()
                );
            }

            #[test]
            fn mbr_covers_polygon(p in arb_polygon()) {
                let r = min_bounding_rect(&p);
                prop_assert!(r.area() >= polygon_area(&p) * (1.0 - 1e-9));
                prop_assert!(r.half_len >= r.half_wid);
                prop_assert!((0.0..180.0).contains(&r.axis_deg));
                // every vertex inside the box, in box coordinates
                let th = r.axis_deg.to_radians();
                for v in p.ring() {
                    let (dx, dy) = (v.x - r.center.x, v.y - r.center.y);
                    let u = dx * th.cos() + dy * th.sin();
                    let w = -dx * th.sin() + dy * th.cos();
                    prop_assert!(u.abs() <= r.half_len + 1e-6);
                    prop_assert!(w.abs() <= r.half_wid + 1e-6);
                }
            }

            #[test]
            fn min_distance_invariant_and_symmetric(
                p in arb_polygon(),
                q in arb_polygon(),
                dx in -1e3f64..1e3,
                dy in -1e3f64..1e3,
                rot in 0f64..360.0,
            ) {
                let q = transform(&q, 60.0, 0.0, 0.0); // keep them apart
                let d = min_distance(&p, &q);
                prop_assert!((d - min_distance(&q, &p)).abs() <= 1e-9);
                let (pm, qm) = (transform(&p, dx, dy, rot), transform(&q, dx, dy, rot));
                prop_assert!((d - min_distance(&pm, &qm)).abs() <= 1e-6 * d.max(1.0));
            }

            #[test]
            fn facing_ratio_bounded_and_symmetric(
                cx in -20f64..20.0, cy in -20f64..20.0,
                hl1 in 1f64..10.0, hw1 in 0.5f64..5.0,
                hl2 in 1f64..10.0, hw2 in 0.5f64..5.0,
                ax1 in 0f64..180.0, ax2 in 0f64..180.0,
            ) {
                let a = rect_at(0.0, 0.0, hl1.max(hw1), hl1.min(hw1).min(hl1.max(hw1) - 1e-9), ax1);
                let b = rect_at(cx, cy, hl2.max(hw2), hl2.min(hw2).min(hl2.max(hw2) - 1e-9), ax2);
                prop_assume!((a.area() - b.area()).abs() > 1e-9);
                for combine in [FrCombine::Max, FrCombine::Min] {
                    let f = facing_ratio(&a, &b, combine);
                    prop_assert!((0.0..=1.0).contains(&f));
                    prop_assert!((f - facing_ratio(&b, &a, combine)).abs() <= 1e-12);
                }
            }

            #[test]
            fn angle_diff_range_and_symmetry(a in -720f64..720.0, b in -720f64..720.0) {
                let d = angle_diff_180(a, b);
                prop_assert!((0.0..=90.0).contains(&d));
                prop_assert!((d - angle_diff_180(b, a)).abs() <= 1e-9);
                prop_assert!(angle_diff_180(a, a) <= 1e-9);
            }
        }
    }
}
