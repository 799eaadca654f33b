//! File formats and text output.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{PointSpec, RectComplex};
use crate::engine::{GeodesicPath, QueryIndex, QueryTrace};
use crate::error::{Error, Result};
use crate::structures::QueryStructure;

pub const FORMAT_VERSION: u32 = 1;

/// A complex together with a prebuilt query structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureFile {
    pub format_version: u32,
    pub complex: RectComplex,
    pub structure: QueryStructure,
}

impl StructureFile {
    pub fn new(index: &QueryIndex) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            complex: index.complex.clone(),
            structure: index.structure.clone(),
        }
    }

    pub fn into_index(self) -> Result<QueryIndex> {
        QueryIndex::with_structure(self.complex, self.structure)
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

/// Reads a complex file; a `format_version` key is accepted and ignored.
pub fn read_complex(path: &Path) -> Result<RectComplex> {
    read_json(path)
}

/// Reads either a structure file or a bare complex, building the structure
/// in the latter case.
pub fn read_index(path: &Path) -> Result<QueryIndex> {
    let value: Value = serde_json::from_str(&read_text(path)?)?;
    if value.get("structure").is_some() {
        serde_json::from_value::<StructureFile>(value)?.into_index()
    } else {
        QueryIndex::new(serde_json::from_value(value)?, None)
    }
}

/// Serializes `value` as an object with `format_version` as its first key.
pub fn versioned(value: &impl Serialize) -> Result<Value> {
    let mut out = serde_json::Map::new();
    out.insert("format_version".into(), FORMAT_VERSION.into());
    match serde_json::to_value(value)? {
        Value::Object(map) => {
            for (k, v) in map {
                if k != "format_version" {
                    out.insert(k, v);
                }
            }
        }
        other => {
            out.insert("data".into(), other);
        }
    }
    Ok(Value::Object(out))
}

pub fn to_pretty(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&versioned(value)?)?;
    s.push('\n');
    Ok(s)
}

/// Parses `face,alpha,beta`.
pub fn parse_point(s: &str) -> std::result::Result<PointSpec, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected face,alpha,beta, got {s:?}"));
    }
    let face = parts[0].parse().map_err(|e| format!("bad face id {:?}: {e}", parts[0]))?;
    let coord = |t: &str| t.parse::<f64>().map_err(|e| format!("bad coordinate {t:?}: {e}"));
    Ok(PointSpec::new(face, coord(parts[1])?, coord(parts[2])?))
}

/// SVG drawing of the unfolded blocks with the geodesic on top.
pub fn path_svg(index: &QueryIndex, path: &GeodesicPath, trace: &QueryTrace) -> String {
    let mut pts: Vec<(f64, f64)> = path.planar.clone();
    for blk in &trace.chain.blocks {
        pts.extend(&blk.loop_points);
    }
    let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in &pts {
        lo = (lo.0.min(p.0), lo.1.min(p.1));
        hi = (hi.0.max(p.0), hi.1.max(p.1));
    }
    let span = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
    let s = 400.0 / span;
    let map = |p: (f64, f64)| (20.0 + (p.0 - lo.0) * s, 20.0 + (hi.1 - p.1) * s);
    let (w, h) = (40.0 + (hi.0 - lo.0) * s, 40.0 + (hi.1 - lo.1) * s);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.1}" height="{h:.1}">"#
    );
    if let Ok(layout) = index.interval_layout(trace) {
        for f in 0..index.complex.faces().len() {
            let c = index.complex.face(f);
            if let Some(img) = c.iter().map(|v| layout.get(v).copied()).collect::<Option<Vec<_>>>() {
                let poly: Vec<String> = img
                    .iter()
                    .map(|&p| {
                        let (x, y) = map(p);
                        format!("{x:.2},{y:.2}")
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    r##"<polygon points="{}" fill="#eef" stroke="#99c" stroke-width="0.5"/>"##,
                    poly.join(" ")
                );
            }
        }
    }
    for blk in &trace.chain.blocks {
        let poly: Vec<String> = blk
            .loop_points
            .iter()
            .map(|&p| {
                let (x, y) = map(p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="none" stroke="#333" stroke-width="1.5"/>"##,
            poly.join(" ")
        );
    }
    let line: Vec<String> = path
        .planar
        .iter()
        .map(|&p| {
            let (x, y) = map(p);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#c22" stroke-width="2"/>"##,
        line.join(" ")
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::structures::StructureKind;

    #[test]
    fn points() {
        assert_eq!(parse_point("2, 0.5,1").unwrap(), PointSpec::new(2, 0.5, 1.0));
        assert!(parse_point("1,2").is_err());
        assert!(parse_point("a,1,2").is_err());
    }

    #[test]
    fn structure_file_round_trip() {
        for kind in [StructureKind::Dense, StructureKind::TreeProduct] {
            let idx = QueryIndex::new(fixtures::fix_book(), Some(kind)).unwrap();
            let text = to_pretty(&StructureFile::new(&idx)).unwrap();
            let back: StructureFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back, StructureFile::new(&idx));
            assert_eq!(back.into_index().unwrap(), idx);
        }
    }

    #[test]
    fn versioned_first() {
        let v = versioned(&fixtures::fix_l()).unwrap();
        assert_eq!(v.as_object().unwrap().keys().next().unwrap(), "format_version");
        let k: RectComplex = serde_json::from_value(v).unwrap();
        assert_eq!(k, fixtures::fix_l());
    }
}
