use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{PointSet, Provenance};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, SimRng};
use crate::window::{Point, Window};

/// Homogeneous Poisson process of density `lambda` on `window`.
pub fn sample_ppp(lambda: f64, window: Window, seed: u64) -> Result<PointSet> {
    let mut rng = stream_rng(seed, 0);
    let points = sample_ppp_with(&mut rng, lambda, &window)?;
    PointSet::new(points, window, Provenance::Ppp { lambda }, Some(seed))
}

/// Draws the point count, then the coordinates, from `rng`.
pub fn sample_ppp_with(rng: &mut SimRng, lambda: f64, window: &Window) -> Result<Vec<Point>> {
    sample_rect(rng, lambda, 0.0, 0.0, window.width(), window.height())
}

/// Poisson points on the rectangle `[x0, x0 + w) × [y0, y0 + h)`.
pub(crate) fn sample_rect(
    rng: &mut SimRng,
    lambda: f64,
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
) -> Result<Vec<Point>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", format!("must be > 0, got {lambda}")));
    }
    let count = Poisson::new(lambda * w * h)
        .map_err(|e| Error::param("lambda", e.to_string()))?
        .sample(rng) as usize;
    Ok((0..count)
        .map(|_| {
            let x = x0 + w * rng.random::<f64>();
            let y = y0 + h * rng.random::<f64>();
            Point::new(x, y)
        })
        .collect())
}
