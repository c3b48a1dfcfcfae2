//! GeoJSON subset (RFC 7946): FeatureCollections whose features are
//! Polygon buildings or LineString roads. Coordinates are taken as planar
//! meters; reprojection is out of scope.
//!
//! Buildings use the exterior ring only. The numeric `id` property names
//! a building, with the feature index as fallback.

use std::collections::BTreeSet;
use std::path::Path;

use linea_core::{BuildingRecord, LinearPattern, Point, Polyline};
use serde_json::{json, Value};

#[derive(Debug)]
pub struct Scene {
    pub buildings: Vec<BuildingRecord>,
    pub roads: Vec<Polyline>,
}

pub fn read_scene(path: &Path) -> Result<Scene, String> {
    let root = read_root(path)?;
    let mut scene = Scene {
        buildings: Vec::new(),
        roads: Vec::new(),
    };
    for (idx, feature) in features(&root, path)?.iter().enumerate() {
        let at = |msg: &str| format!("{}: feature {idx}: {msg}", path.display());
        let geom = feature
            .get("geometry")
            .filter(|g| !g.is_null())
            .ok_or_else(|| at("missing geometry"))?;
        match geom.get("type").and_then(Value::as_str) {
            Some("Polygon") => {
                let rings = geom
                    .get("coordinates")
                    .and_then(Value::as_array)
                    .ok_or_else(|| at("Polygon needs a coordinates array"))?;
                let outer = rings
                    .first()
                    .and_then(Value::as_array)
                    .ok_or_else(|| at("Polygon needs an exterior ring"))?;
                let mut ring = positions(outer).map_err(|m| at(&m))?;
                if ring.len() >= 2 && ring[0].dist(ring.last().unwrap()) < 1e-9 {
                    ring.pop();
                }
                let poly = linea_core::Polygon::new(ring).map_err(|e| at(&e.to_string()))?;
                let id = feature
                    .pointer("/properties/id")
                    .and_then(Value::as_u64)
                    .unwrap_or(idx as u64);
                scene.buildings.push(
                    BuildingRecord::from_polygon(id, poly).map_err(|e| at(&e.to_string()))?,
                );
            }
            Some("LineString") => {
                let coords = geom
                    .get("coordinates")
                    .and_then(Value::as_array)
                    .ok_or_else(|| at("LineString needs a coordinates array"))?;
                let pts = positions(coords).map_err(|m| at(&m))?;
                scene
                    .roads
                    .push(Polyline::new(pts).map_err(|e| at(&e.to_string()))?);
            }
            Some(other) => {
                return Err(at(&format!(
                    "unsupported geometry {other} (want Polygon buildings and LineString roads)"
                )))
            }
            None => return Err(at("geometry has no type")),
        }
    }
    Ok(scene)
}

/// Detected patterns written by `recognize`: one building-id set per
/// feature, geometry ignored.
pub fn read_detected(path: &Path) -> Result<Vec<BTreeSet<u64>>, String> {
    let root = read_root(path)?;
    let mut sets = Vec::new();
    for (idx, feature) in features(&root, path)?.iter().enumerate() {
        let ids = feature
            .pointer("/properties/building_ids")
            .and_then(Value::as_array)
            .ok_or_else(|| {
                format!(
                    "{}: feature {idx}: missing building_ids property",
                    path.display()
                )
            })?;
        sets.push(
            ids.iter()
                .map(|v| {
                    v.as_u64().ok_or_else(|| {
                        format!("{}: feature {idx}: non-integer building id", path.display())
                    })
                })
                .collect::<Result<_, _>>()?,
        );
    }
    Ok(sets)
}

pub fn patterns_to_geojson(patterns: &[LinearPattern], buildings: &[BuildingRecord]) -> Value {
    let centroid_of = |id: u64| {
        buildings
            .iter()
            .find(|b| b.id == id)
            .map(|b| b.centroid)
            .expect("patterns only reference scene buildings")
    };
    let features: Vec<Value> = patterns
        .iter()
        .map(|p| {
            let coords: Vec<Value> = p
                .building_ids
                .iter()
                .map(|&id| position(centroid_of(id)))
                .collect();
            json!({
                "type": "Feature",
                "geometry": { "type": "LineString", "coordinates": coords },
                "properties": { "building_ids": p.building_ids },
            })
        })
        .collect();
    collection(features)
}

pub fn scene_to_geojson(buildings: &[BuildingRecord]) -> Value {
    let features: Vec<Value> = buildings
        .iter()
        .map(|b| {
            let mut ring: Vec<Value> = b.footprint.ring().iter().copied().map(position).collect();
            ring.push(ring[0].clone());
            json!({
                "type": "Feature",
                "geometry": { "type": "Polygon", "coordinates": [ring] },
                "properties": { "id": b.id },
            })
        })
        .collect();
    collection(features)
}

fn collection(features: Vec<Value>) -> Value {
    json!({ "type": "FeatureCollection", "features": features })
}

fn position(p: Point) -> Value {
    json!([p.x, p.y])
}

fn read_root(path: &Path) -> Result<Value, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn features<'a>(root: &'a Value, path: &Path) -> Result<&'a Vec<Value>, String> {
    if root.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(format!("{}: not a FeatureCollection", path.display()));
    }
    root.get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| format!("{}: missing features array", path.display()))
}

fn positions(coords: &[Value]) -> Result<Vec<Point>, String> {
    coords
        .iter()
        .map(|pos| {
            let xy = pos.as_array().filter(|a| a.len() >= 2);
            match xy {
                Some(a) => match (a[0].as_f64(), a[1].as_f64()) {
                    (Some(x), Some(y)) => Ok(Point::new(x, y)),
                    _ => Err("non-numeric coordinate".to_string()),
                },
                None => Err("position must be [x, y]".to_string()),
            }
        })
        .collect()
}
