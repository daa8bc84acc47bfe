//! Fixed deployments read from `x_km,y_km` coordinate files.
//!
//! An optional comment line `# offset_x=<v> offset_y=<v> scale=<v>` declares
//! the affine map `p -> (p + offset) * scale` applied before windowing. Any
//! field can be overridden by the caller.

use std::path::{Path, PathBuf};

use super::{parse_kv, PointSet, Provenance};
use crate::error::{Error, Result};
use crate::window::{Point, Window};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub offset_x: f64,
    pub offset_y: f64,
    pub scale: f64,
}

impl Default for Affine {
    fn default() -> Self {
        Affine {
            offset_x: 0.0,
            offset_y: 0.0,
            scale: 1.0,
        }
    }
}

impl Affine {
    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            (p.x + self.offset_x) * self.scale,
            (p.y + self.offset_y) * self.scale,
        )
    }
}

/// Per-field overrides for the affine declared in the file header.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AffineOverride {
    pub offset_x: Option<f64>,
    pub offset_y: Option<f64>,
    pub scale: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct LoadedDeployment {
    pub points: PointSet,
    /// Rows that fell outside the window after the affine map.
    pub rejected: usize,
    pub affine: Affine,
}

impl LoadedDeployment {
    pub fn report(&self) -> String {
        format!(
            "{} points loaded, {} rejected (offset_x={} offset_y={} scale={})",
            self.points.len(),
            self.rejected,
            self.affine.offset_x,
            self.affine.offset_y,
            self.affine.scale
        )
    }
}

pub fn load_deployment(
    path: impl AsRef<Path>,
    window: Window,
    overrides: AffineOverride,
) -> Result<LoadedDeployment> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_deployment(&text, path, window, overrides)
}

/// Parses deployment text; `source` is only recorded in the provenance.
pub fn parse_deployment(
    text: &str,
    source: impl Into<PathBuf>,
    window: Window,
    overrides: AffineOverride,
) -> Result<LoadedDeployment> {
    let mut affine = header_affine(text)?;
    if let Some(v) = overrides.offset_x {
        affine.offset_x = v;
    }
    if let Some(v) = overrides.offset_y {
        affine.offset_y = v;
    }
    if let Some(v) = overrides.scale {
        affine.scale = v;
    }
    if !(affine.scale > 0.0 && affine.scale.is_finite()) {
        return Err(Error::param(
            "scale",
            format!("must be > 0, got {}", affine.scale),
        ));
    }
    let raw = parse_rows(text)?;
    let total = raw.len();
    let points: Vec<Point> = raw
        .into_iter()
        .map(|p| affine.apply(p))
        .filter(|&p| window.contains(p))
        .collect();
    let rejected = total - points.len();
    let points = PointSet::new(
        points,
        window,
        Provenance::File {
            path: source.into(),
        },
        None,
    )?;
    Ok(LoadedDeployment {
        points,
        rejected,
        affine,
    })
}

fn header_affine(text: &str) -> Result<Affine> {
    let mut affine = Affine::default();
    for (n, line) in text.lines().enumerate() {
        let Some(comment) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        for (k, v) in parse_kv(comment) {
            let slot = match k.as_str() {
                "offset_x" => &mut affine.offset_x,
                "offset_y" => &mut affine.offset_y,
                "scale" => &mut affine.scale,
                _ => continue,
            };
            *slot = v.parse().map_err(|_| Error::Parse {
                line: n + 1,
                message: format!("bad value for `{k}`: `{v}`"),
            })?;
        }
    }
    Ok(affine)
}

/// Reads the two coordinate columns. Blank lines and `#` comments are skipped;
/// an `x_km,y_km` header is accepted before the first data row.
pub(crate) fn parse_rows(text: &str) -> Result<Vec<Point>> {
    let mut points = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if points.is_empty() && line.replace(' ', "").eq_ignore_ascii_case("x_km,y_km") {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: n + 1,
            message,
        };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(err(format!("expected 2 columns, found {}", fields.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("`{s}` is not a number")))
        };
        points.push(Point::new(num(fields[0])?, num(fields[1])?));
    }
    if points.is_empty() {
        return Err(Error::Data("deployment file contains no points".into()));
    }
    Ok(points)
}
