//! Map export: a GeoJSON FeatureCollection of detected homes (plus optional
//! per-user trace lines) and a self-contained HTML page rendering it over a
//! tile layer.
//!
//! Homes become Point features whose properties mirror the results columns;
//! trajectories become LineString features when a user has at least two
//! fixes (a one-position LineString is not valid GeoJSON). Users without a
//! detected home get no feature — they are listed in the HTML legend
//! instead. JSON maps serialize with sorted keys, so output bytes are stable
//! across runs.

use serde_json::{json, Value};

use ghost_core::model::UserTrajectory;

use crate::results::ResultRow;

/// Coordinates in GeoJSON order: longitude first.
fn position(lon: f64, lat: f64) -> Value {
    json!([lon, lat])
}

/// Build the FeatureCollection. `traces`, when given, must be sorted by
/// user id by the caller; rows are emitted in their file order.
pub fn feature_collection(rows: &[ResultRow], traces: &[UserTrajectory]) -> Value {
    let mut features = Vec::new();
    for row in rows {
        let Some(home) = &row.home else { continue };
        features.push(json!({
            "type": "Feature",
            "geometry": {
                "type": "Point",
                "coordinates": position(home.lon, home.lat),
            },
            "properties": {
                "kind": "home",
                "user_id": row.user_id,
                "inference_source": row.source,
                "refinement_method": row.refinement,
                "stay_time_s": row.stay_time_s,
                "unique_nights": row.unique_nights,
                "total_points": row.total_points,
                "algorithm": row.algorithm,
            },
        }));
    }
    for trace in traces {
        if trace.points.len() < 2 {
            continue;
        }
        let coords: Vec<Value> = trace
            .points
            .iter()
            .map(|p| position(p.lon, p.lat))
            .collect();
        features.push(json!({
            "type": "Feature",
            "geometry": {
                "type": "LineString",
                "coordinates": coords,
            },
            "properties": {
                "kind": "trace",
                "user_id": trace.user_id,
                "n_points": trace.points.len(),
            },
        }));
    }
    json!({
        "type": "FeatureCollection",
        "features": features,
    })
}

/// Users present in the results but without a mappable home.
pub fn omitted_users(rows: &[ResultRow]) -> Vec<&str> {
    rows.iter()
        .filter(|r| r.home.is_none())
        .map(|r| r.user_id.as_str())
        .collect()
}

const HTML_TEMPLATE: &str = r#"<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8"/>
<meta name="viewport" content="width=device-width, initial-scale=1.0"/>
<title>Detected home locations</title>
<link rel="stylesheet" href="https://unpkg.com/leaflet@1.9.4/dist/leaflet.css"/>
<script src="https://unpkg.com/leaflet@1.9.4/dist/leaflet.js"></script>
<style>
  html, body { height: 100%; margin: 0; }
  #map { height: 100%; }
  #legend {
    position: absolute; bottom: 12px; left: 12px; z-index: 1000;
    background: rgba(255, 255, 255, 0.92); padding: 8px 12px;
    font: 13px/1.5 sans-serif; border-radius: 4px; max-width: 320px;
  }
</style>
</head>
<body>
<div id="map"></div>
<div id="legend">__LEGEND__</div>
<script>
const DATA = __GEOJSON__;
const map = L.map('map');
L.tileLayer('https://tile.openstreetmap.org/{z}/{x}/{y}.png', {
  maxZoom: 19,
  attribution: '&copy; OpenStreetMap contributors'
}).addTo(map);
const layer = L.geoJSON(DATA, {
  pointToLayer: (feature, latlng) => L.circleMarker(latlng, {
    radius: 6, color: '#c0392b', fillColor: '#e74c3c', fillOpacity: 0.85
  }),
  style: feature => feature.geometry.type === 'LineString'
    ? { color: '#2980b9', weight: 1, opacity: 0.6 }
    : {},
  onEachFeature: (feature, l) => {
    const p = feature.properties;
    if (p.kind === 'home') {
      l.bindPopup(
        '<b>' + p.user_id + '</b><br/>algorithm: ' + p.algorithm +
        '<br/>source: ' + p.inference_source +
        '<br/>refinement: ' + p.refinement_method
      );
    }
  }
}).addTo(map);
const bounds = layer.getBounds();
if (bounds.isValid()) { map.fitBounds(bounds.pad(0.2)); } else { map.setView([0, 0], 2); }
</script>
</body>
</html>
"#;

fn escape_html(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render the HTML page with the collection embedded inline.
pub fn html_page(collection: &Value, omitted: &[&str]) -> String {
    let n_homes = collection["features"]
        .as_array()
        .map(|fs| {
            fs.iter()
                .filter(|f| f["properties"]["kind"] == "home")
                .count()
        })
        .unwrap_or(0);
    let mut legend = format!("<b>{n_homes}</b> detected home(s)");
    if !omitted.is_empty() {
        let names: Vec<String> = omitted.iter().map(|u| escape_html(u)).collect();
        legend.push_str(&format!(
            "<br/>No detected home (omitted from map): {}",
            names.join(", ")
        ));
    }
    HTML_TEMPLATE
        .replace("__GEOJSON__", &collection.to_string())
        .replace("__LEGEND__", &legend)
}
