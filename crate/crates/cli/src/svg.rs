//! Static SVG overlay: gray footprints, red pattern lines through the
//! member centroids. The y axis is flipped so north stays up.

use std::fmt::Write;

use linea_core::{BuildingRecord, LinearPattern, Point};

pub fn render(buildings: &[BuildingRecord], patterns: &[LinearPattern]) -> String {
    let pts = || buildings.iter().flat_map(|b| b.footprint.ring().iter());
    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts() {
        min_x = min_x.min(p.x);
        min_y = min_y.min(p.y);
        max_x = max_x.max(p.x);
        max_y = max_y.max(p.y);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1.0);
    let margin = 0.04 * span;
    let flip = min_y + max_y;
    let xy = |p: &Point| (p.x, flip - p.y);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.2} {:.2} {:.2} {:.2}">"#,
        min_x - margin,
        min_y - margin,
        max_x - min_x + 2.0 * margin,
        max_y - min_y + 2.0 * margin,
    );
    for b in buildings {
        let mut d = String::new();
        for (i, p) in b.footprint.ring().iter().enumerate() {
            let (x, y) = xy(p);
            let _ = write!(d, "{}{x:.2} {y:.2} ", if i == 0 { "M" } else { "L" });
        }
        d.push('Z');
        let _ = writeln!(
            s,
            r##"  <path d="{d}" fill="#c8cdd3" stroke="#5a6069" stroke-width="{:.2}"/>"##,
            0.002 * span,
        );
    }
    for pat in patterns {
        let mut pl = String::new();
        for id in &pat.building_ids {
            let b = buildings
                .iter()
                .find(|b| b.id == *id)
                .expect("patterns only reference scene buildings");
            let (x, y) = xy(&b.centroid);
            let _ = write!(pl, "{x:.2},{y:.2} ");
        }
        let _ = writeln!(
            s,
            r##"  <polyline points="{}" fill="none" stroke="#cf2233" stroke-width="{:.2}" stroke-linecap="round"/>"##,
            pl.trim_end(),
            0.006 * span,
        );
    }
    s.push_str("</svg>\n");
    s
}
