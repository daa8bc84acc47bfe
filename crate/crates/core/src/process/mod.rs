//! Deployment point processes: Poisson, Matérn hardcore (type II), lattices
//! and fixed coordinate files.

mod deployment;
mod grid;
pub(crate) mod mhc;
mod ppp;

use std::fmt;
use std::path::PathBuf;

pub use deployment::{load_deployment, parse_deployment, Affine, AffineOverride, LoadedDeployment};
pub use grid::{generate_grid, GridLayout};
pub use mhc::{sample_mhc, sample_mhc_detailed, sample_mhc_with, MhcRealization};
pub use ppp::{sample_ppp, sample_ppp_with};

use crate::error::{Error, Result};
use crate::window::{EdgePolicy, Point, Window};

/// Parameters of a Matérn hardcore process: parent density and hardcore distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MhcParams {
    lambda_p: f64,
    d: f64,
}

impl MhcParams {
    pub fn new(lambda_p: f64, d: f64) -> Result<Self> {
        if !(lambda_p > 0.0 && lambda_p.is_finite()) {
            return Err(Error::param(
                "lambda_p",
                format!("must be > 0, got {lambda_p}"),
            ));
        }
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::param("d", format!("must be >= 0, got {d}")));
        }
        Ok(MhcParams { lambda_p, d })
    }

    /// Parent (Poisson) density, points per km².
    pub fn lambda_p(&self) -> f64 {
        self.lambda_p
    }

    /// Hardcore distance, km.
    pub fn d(&self) -> f64 {
        self.d
    }
}

impl fmt::Display for MhcParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda_p={} d={}", self.lambda_p, self.d)
    }
}

/// Where a point set came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Ppp {
        lambda: f64,
    },
    Mhc(MhcParams),
    Grid {
        requested: usize,
        columns: usize,
        rows: usize,
    },
    File {
        path: PathBuf,
    },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Ppp { lambda } => write!(f, "ppp lambda={lambda}"),
            Provenance::Mhc(p) => write!(f, "mhc lambda_p={} d={}", p.lambda_p, p.d),
            Provenance::Grid {
                requested,
                columns,
                rows,
            } => write!(
                f,
                "grid requested={requested} columns={columns} rows={rows}"
            ),
            Provenance::File { path } => write!(f, "file path={}", path.display()),
        }
    }
}

/// An immutable realization of base-station locations inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Point>,
    window: Window,
    provenance: Provenance,
    seed: Option<u64>,
}

impl PointSet {
    pub fn new(
        points: Vec<Point>,
        window: Window,
        provenance: Provenance,
        seed: Option<u64>,
    ) -> Result<Self> {
        if let Some((i, p)) = points
            .iter()
            .enumerate()
            .find(|(_, p)| !window.contains(**p))
        {
            return Err(Error::Data(format!(
                "point {i} at ({}, {}) lies outside the {}x{} window",
                p.x,
                p.y,
                window.width(),
                window.height()
            )));
        }
        Ok(PointSet {
            points,
            window,
            provenance,
            seed,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Same points viewed under a different edge policy.
    pub fn with_edge_policy(&self, edge_policy: EdgePolicy) -> Result<Self> {
        Ok(PointSet {
            window: self.window.with_edge_policy(edge_policy)?,
            ..self.clone()
        })
    }

    /// Empirical density (points per km²).
    pub fn density(&self) -> f64 {
        self.points.len() as f64 / self.window.area()
    }

    /// Smallest pairwise distance under the window metric, by exhaustive search.
    /// `None` for fewer than two points.
    pub fn min_pairwise_distance(&self) -> Option<f64> {
        let pts = &self.points;
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                best = best.min(self.window.dist2(pts[i], pts[j]));
            }
        }
        (pts.len() >= 2).then(|| best.sqrt())
    }

    /// Writes the set as `x_km,y_km` CSV preceded by one metadata comment line.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let seed = self
            .seed
            .map(|s| s.to_string())
            .unwrap_or_else(|| "none".into());
        let _ = writeln!(
            out,
            "# provenance={} window={}x{} edge={} seed={seed} count={}",
            provenance_token(&self.provenance),
            self.window.width(),
            self.window.height(),
            self.window.edge_policy(),
            self.points.len()
        );
        out.push_str("x_km,y_km\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{}", p.x, p.y);
        }
        out
    }

    /// Parses the output of [`PointSet::to_csv`], restoring window, provenance
    /// and seed from the metadata line.
    pub fn from_csv(text: &str) -> Result<Self> {
        let meta_line = text
            .lines()
            .find(|l| l.trim_start().starts_with("# provenance="))
            .ok_or_else(|| Error::Data("missing `# provenance=` metadata line".into()))?;
        let meta = parse_kv(meta_line.trim_start_matches('#'));
        let get = |k: &str| {
            meta.iter()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Data(format!("metadata is missing `{k}`")))
        };
        let (w, h) = crate::window::parse_dims(get("window")?)?;
        let edge: EdgePolicy = get("edge")?.parse()?;
        let window = Window::new(w, h, edge)?;
        let seed = match get("seed")? {
            "none" => None,
            s => Some(
                s.parse()
                    .map_err(|_| Error::Data(format!("bad seed `{s}`")))?,
            ),
        };
        let provenance = parse_provenance_token(get("provenance")?)?;
        let points = deployment::parse_rows(text)?;
        PointSet::new(points, window, provenance, seed)
    }
}

fn provenance_token(p: &Provenance) -> String {
    match p {
        Provenance::Ppp { lambda } => format!("ppp:{lambda}"),
        Provenance::Mhc(m) => format!("mhc:{}:{}", m.lambda_p, m.d),
        Provenance::Grid {
            requested,
            columns,
            rows,
        } => format!("grid:{requested}:{columns}:{rows}"),
        Provenance::File { path } => format!("file:{}", path.display()),
    }
}

fn parse_provenance_token(s: &str) -> Result<Provenance> {
    let bad = || Error::Data(format!("bad provenance `{s}`"));
    let mut parts = s.splitn(2, ':');
    let kind = parts.next().ok_or_else(bad)?;
    let rest = parts.next().ok_or_else(bad)?;
    let nums = |n: usize| -> Result<Vec<f64>> {
        let v: Vec<f64> = rest
            .split(':')
            .map(|x| x.parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        if v.len() == n {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    Ok(match kind {
        "ppp" => Provenance::Ppp {
            lambda: nums(1)?[0],
        },
        "mhc" => {
            let v = nums(2)?;
            Provenance::Mhc(MhcParams::new(v[0], v[1])?)
        }
        "grid" => {
            let v = nums(3)?;
            Provenance::Grid {
                requested: v[0] as usize,
                columns: v[1] as usize,
                rows: v[2] as usize,
            }
        }
        "file" => Provenance::File {
            path: PathBuf::from(rest),
        },
        _ => return Err(bad()),
    })
}

/// Splits `a=1 b=2` into key/value pairs.
pub(crate) fn parse_kv(s: &str) -> Vec<(String, String)> {
    s.split_whitespace()
        .filter_map(|tok| tok.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}
