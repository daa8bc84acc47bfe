use super::{PointSet, Provenance};
use crate::error::{Error, Result};
use crate::window::{Point, Window};

/// Shape of the lattice actually produced by [`generate_grid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridLayout {
    pub requested: usize,
    pub columns: usize,
    pub rows: usize,
    pub spacing_x: f64,
    pub spacing_y: f64,
}

impl GridLayout {
    pub fn realized(&self) -> usize {
        self.columns * self.rows
    }
}

/// Cells more elongated than this are not an acceptable lattice for a
/// factorization of the requested count.
const MAX_CELL_ASPECT: f64 = 1.5;

/// Centered rectangular lattice of (about) `n_points` points.
///
/// The count is factored as `columns × rows` so that cells are as close to
/// square as possible; each point sits at the centre of its cell, leaving half
/// a spacing to the boundary. When no factorization gives cells within a 3:2
/// aspect ratio, the nearest square-spacing lattice is used instead and its
/// count reported through the returned layout.
pub fn generate_grid(n_points: usize, window: Window) -> Result<(PointSet, GridLayout)> {
    if n_points == 0 {
        return Err(Error::param("n_points", "must be >= 1"));
    }
    let (w, h) = (window.width(), window.height());
    let aspect = |c: usize, r: usize| ((w / c as f64) / (h / r as f64)).ln().abs();

    let best = (1..=n_points)
        .filter(|c| n_points.is_multiple_of(*c))
        .map(|c| (c, n_points / c))
        .min_by(|a, b| aspect(a.0, a.1).total_cmp(&aspect(b.0, b.1)))
        .expect("1 divides n");
    let (columns, rows) = if aspect(best.0, best.1) <= MAX_CELL_ASPECT.ln() {
        best
    } else {
        let s = (window.area() / n_points as f64).sqrt();
        (
            ((w / s).round() as usize).max(1),
            ((h / s).round() as usize).max(1),
        )
    };

    let layout = GridLayout {
        requested: n_points,
        columns,
        rows,
        spacing_x: w / columns as f64,
        spacing_y: h / rows as f64,
    };
    let points = (0..columns)
        .flat_map(|i| {
            (0..rows).map(move |j| {
                Point::new(
                    (i as f64 + 0.5) * layout.spacing_x,
                    (j as f64 + 0.5) * layout.spacing_y,
                )
            })
        })
        .collect();
    let set = PointSet::new(
        points,
        window,
        Provenance::Grid {
            requested: n_points,
            columns,
            rows,
        },
        None,
    )?;
    Ok((set, layout))
}
