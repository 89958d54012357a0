//! Output formats. Every file is written to a temporary sibling first and then
//! renamed into place, so readers never observe a partial file.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use wavecast_core::signal::FieldMap;
use wavecast_core::NodeField;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating directory {}", dir.display()))?;
    let name = path.file_name().with_context(|| format!("{} has no file name", path.display()))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let mut file = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
    file.write_all(bytes).with_context(|| format!("writing {}", tmp.display()))?;
    file.sync_all().with_context(|| format!("syncing {}", tmp.display()))?;
    drop(file);
    fs::rename(&tmp, path).with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Serializes `rows` as CSV with a header derived from the row type.
pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

#[derive(Serialize)]
struct PositionRow {
    index: usize,
    x: f64,
    y: f64,
}

/// Node positions as CSV `index,x,y`.
pub fn positions_csv(field: &NodeField) -> Result<Vec<u8>> {
    let rows: Vec<PositionRow> =
        field.positions().iter().enumerate().map(|(index, p)| PositionRow { index, x: p.x, y: p.y }).collect();
    csv_bytes(&rows)
}

#[derive(Serialize)]
struct MapRow {
    x: f64,
    y: f64,
    value: f64,
}

/// Field map as CSV `x,y,value` over cell centers, row by row.
pub fn fieldmap_csv(map: &FieldMap) -> Result<Vec<u8>> {
    let g = &map.grid;
    let mut rows = Vec::with_capacity(g.nx * g.ny);
    for iy in 0..g.ny {
        for ix in 0..g.nx {
            let c = g.cell_center(ix, iy);
            rows.push(MapRow { x: c.x, y: c.y, value: map.value(ix, iy) });
        }
    }
    csv_bytes(&rows)
}

/// Plain-text PGM (`P2`) with gray level `round(255·min(1, value/threshold))`.
/// The first image row is the largest `y`, so the picture is upright.
pub fn fieldmap_pgm(map: &FieldMap, threshold: f64) -> String {
    let g = &map.grid;
    let mut out = format!("P2\n{} {}\n255\n", g.nx, g.ny);
    for iy in (0..g.ny).rev() {
        let row: Vec<String> = (0..g.nx).map(|ix| gray_level(map.value(ix, iy), threshold).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn gray_level(value: f64, threshold: f64) -> u8 {
    if !(value > 0.0) {
        return 0;
    }
    (255.0 * (value / threshold).min(1.0)).round() as u8
}
