//! Rectangular study regions and their distance metric.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A location in the plane, in km.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// How the finite window stands in for the infinite plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgePolicy {
    /// Opposite edges are identified; distances use the nearest periodic image.
    Toroidal,
    /// Plain Euclidean geometry. Users are only dropped at least `margin` km
    /// away from the boundary, and Matérn thinning looks at parents up to `d`
    /// outside the window.
    GuardBand { margin: f64 },
}

impl fmt::Display for EdgePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgePolicy::Toroidal => write!(f, "torus"),
            EdgePolicy::GuardBand { margin } => write!(f, "guard:{margin}"),
        }
    }
}

impl FromStr for EdgePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("torus") || s.eq_ignore_ascii_case("toroidal") {
            return Ok(EdgePolicy::Toroidal);
        }
        if let Some(m) = s.strip_prefix("guard:") {
            let margin: f64 = m
                .parse()
                .map_err(|_| Error::param("edge", format!("bad guard margin `{m}`")))?;
            return Ok(EdgePolicy::GuardBand { margin });
        }
        Err(Error::param(
            "edge",
            format!("expected `torus` or `guard:<margin>`, got `{s}`"),
        ))
    }
}

/// A `width × height` km rectangle anchored at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    width: f64,
    height: f64,
    edge_policy: EdgePolicy,
}

impl Window {
    pub fn new(width: f64, height: f64, edge_policy: EdgePolicy) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::param("width", format!("must be > 0, got {width}")));
        }
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::param("height", format!("must be > 0, got {height}")));
        }
        if let EdgePolicy::GuardBand { margin } = edge_policy {
            if !(margin >= 0.0) {
                return Err(Error::param(
                    "margin",
                    format!("must be >= 0, got {margin}"),
                ));
            }
            if 2.0 * margin >= width.min(height) {
                return Err(Error::param(
                    "margin",
                    format!("guard band {margin} leaves no interior in a {width}x{height} window"),
                ));
            }
        }
        Ok(Window {
            width,
            height,
            edge_policy,
        })
    }

    pub fn torus(width: f64, height: f64) -> Result<Self> {
        Self::new(width, height, EdgePolicy::Toroidal)
    }

    pub fn guard_band(width: f64, height: f64, margin: f64) -> Result<Self> {
        Self::new(width, height, EdgePolicy::GuardBand { margin })
    }

    /// Guard band window with the default margin of 20% of the shorter side,
    /// used for fixed deployments that cannot be wrapped.
    pub fn fixed_deployment(width: f64, height: f64) -> Result<Self> {
        Self::guard_band(width, height, 0.2 * width.min(height))
    }

    /// Square torus wide enough that nearest-image interference truncation is
    /// negligible for a process of the given density (side >= 20/sqrt(density)).
    pub fn auto_torus(density: f64) -> Result<Self> {
        if !(density > 0.0) {
            return Err(Error::param(
                "density",
                format!("must be > 0, got {density}"),
            ));
        }
        let side = (MIN_TORUS_SPACINGS / density.sqrt()).ceil().max(1.0);
        Self::torus(side, side)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn edge_policy(&self) -> EdgePolicy {
        self.edge_policy
    }

    pub fn with_edge_policy(&self, edge_policy: EdgePolicy) -> Result<Self> {
        Self::new(self.width, self.height, edge_policy)
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn is_toroidal(&self) -> bool {
        matches!(self.edge_policy, EdgePolicy::Toroidal)
    }

    /// Closed-rectangle membership.
    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    /// Displacement `b - a` under the window's metric.
    #[inline]
    pub fn displacement(&self, a: Point, b: Point) -> (f64, f64) {
        let mut dx = b.x - a.x;
        let mut dy = b.y - a.y;
        if self.is_toroidal() {
            dx = wrap(dx, self.width);
            dy = wrap(dy, self.height);
        }
        (dx, dy)
    }

    #[inline]
    pub fn dist2(&self, a: Point, b: Point) -> f64 {
        let (dx, dy) = self.displacement(a, b);
        dx * dx + dy * dy
    }

    /// Rectangle `(x0, x1, y0, y1)` in which users may be dropped.
    pub fn user_region(&self) -> (f64, f64, f64, f64) {
        match self.edge_policy {
            EdgePolicy::Toroidal => (0.0, self.width, 0.0, self.height),
            EdgePolicy::GuardBand { margin } => {
                (margin, self.width - margin, margin, self.height - margin)
            }
        }
    }
}

/// Windows narrower than this many mean spacings trigger a truncation warning.
pub const MIN_TORUS_SPACINGS: f64 = 20.0;

#[inline]
fn wrap(delta: f64, period: f64) -> f64 {
    let half = 0.5 * period;
    if delta > half {
        delta - period
    } else if delta < -half {
        delta + period
    } else {
        delta
    }
}

/// Parses `WxH` (e.g. `100x80`) into a pair of lengths.
pub fn parse_dims(s: &str) -> Result<(f64, f64)> {
    let (w, h) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::param("window", format!("expected WxH, got `{s}`")))?;
    let w: f64 = w
        .trim()
        .parse()
        .map_err(|_| Error::param("window", format!("bad width `{w}`")))?;
    let h: f64 = h
        .trim()
        .parse()
        .map_err(|_| Error::param("window", format!("bad height `{h}`")))?;
    Ok((w, h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_windows() {
        assert!(Window::torus(0.0, 1.0).is_err());
        assert!(Window::torus(1.0, -1.0).is_err());
        assert!(Window::guard_band(10.0, 10.0, -0.1).is_err());
        assert!(Window::guard_band(10.0, 10.0, 5.0).is_err());
        assert!(Window::guard_band(10.0, 10.0, 0.0).is_ok());
    }

    #[test]
    fn toroidal_distance_uses_nearest_image() {
        let w = Window::torus(10.0, 8.0).unwrap();
        let d2 = w.dist2(Point::new(0.5, 0.5), Point::new(9.5, 7.5));
        assert!((d2 - 2.0).abs() < 1e-12);
        let g = Window::guard_band(10.0, 8.0, 1.0).unwrap();
        let d2 = g.dist2(Point::new(0.5, 0.5), Point::new(9.5, 7.5));
        assert!((d2 - (81.0 + 49.0)).abs() < 1e-12);
    }

    #[test]
    fn parses_dims_and_edges() {
        assert_eq!(parse_dims("100x80").unwrap(), (100.0, 80.0));
        assert!(parse_dims("100").is_err());
        assert_eq!("torus".parse::<EdgePolicy>().unwrap(), EdgePolicy::Toroidal);
        assert_eq!(
            "guard:2.5".parse::<EdgePolicy>().unwrap(),
            EdgePolicy::GuardBand { margin: 2.5 }
        );
    }

    #[test]
    fn auto_torus_is_wide_enough() {
        let w = Window::auto_torus(1.15).unwrap();
        assert!(w.width() >= 20.0 / 1.15f64.sqrt());
    }
}
