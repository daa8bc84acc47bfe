use rand::Rng;

use super::ppp::sample_rect;
use super::{MhcParams, PointSet, Provenance};
use crate::error::Result;
use crate::rng::{stream_rng, SimRng};
use crate::spatial::CellIndex;
use crate::window::{Point, Window};

/// A Matérn hardcore sample together with the parent process it was thinned from.
#[derive(Debug, Clone)]
pub struct MhcRealization {
    /// Parent Poisson points. On a guard-band window these cover the window
    /// extended by `d` on every side.
    pub parents: Vec<Point>,
    pub marks: Vec<f64>,
    /// Indices into `parents` of the retained points that fall inside the window.
    pub retained_indices: Vec<usize>,
    pub retained: PointSet,
}

/// Matérn type II hardcore process on `window`.
pub fn sample_mhc(params: MhcParams, window: Window, seed: u64) -> Result<PointSet> {
    Ok(sample_mhc_detailed(params, window, seed)?.retained)
}

pub fn sample_mhc_detailed(params: MhcParams, window: Window, seed: u64) -> Result<MhcRealization> {
    let mut rng = stream_rng(seed, 0);
    let (parents, marks, retained_indices) = thin(&mut rng, params, &window)?;
    let points = retained_indices.iter().map(|&i| parents[i]).collect();
    let retained = PointSet::new(points, window, Provenance::Mhc(params), Some(seed))?;
    Ok(MhcRealization {
        parents,
        marks,
        retained_indices,
        retained,
    })
}

/// Retained points only, drawn from a caller-owned stream.
pub fn sample_mhc_with(rng: &mut SimRng, params: MhcParams, window: &Window) -> Result<Vec<Point>> {
    let (parents, _, kept) = thin(rng, params, window)?;
    Ok(kept.into_iter().map(|i| parents[i]).collect())
}

/// Draws the parent process and its marks, then keeps every parent whose
/// `(mark, index)` is strictly smallest among parents closer than `d`.
pub(crate) fn thin(
    rng: &mut SimRng,
    params: MhcParams,
    window: &Window,
) -> Result<(Vec<Point>, Vec<f64>, Vec<usize>)> {
    let d = params.d();
    let periodic = window.is_toroidal();
    let ext = if periodic { 0.0 } else { d };
    let bounds = (
        -ext,
        -ext,
        window.width() + 2.0 * ext,
        window.height() + 2.0 * ext,
    );
    let parents = sample_rect(
        rng,
        params.lambda_p(),
        bounds.0,
        bounds.1,
        bounds.2,
        bounds.3,
    )?;
    let marks: Vec<f64> = (0..parents.len()).map(|_| rng.random::<f64>()).collect();

    let inside = |p: Point| periodic || window.contains(p);

    if d == 0.0 {
        let kept = (0..parents.len()).filter(|&i| inside(parents[i])).collect();
        return Ok((parents, marks, kept));
    }

    let d2 = d * d;
    let index = CellIndex::build(&parents, bounds, d, periodic);
    // Copies in cell order keep each neighbourhood scan on contiguous memory.
    let order = index.items();
    let xs: Vec<f64> = order.iter().map(|&i| parents[i].x).collect();
    let ys: Vec<f64> = order.iter().map(|&i| parents[i].y).collect();
    let ms: Vec<f64> = order.iter().map(|&i| marks[i]).collect();
    let (pw, ph) = if periodic {
        (window.width(), window.height())
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    let kept = (0..parents.len())
        .filter(|&i| {
            let p = parents[i];
            if !inside(p) {
                return false;
            }
            let m = marks[i];
            let (runs, n) = index.block_runs(p);
            // Branch-free inner test: marks are random, so a short-circuit
            // comparison would mispredict about half the time.
            let mut beaten = false;
            for &(a, b) in &runs[..n] {
                for k in a..b {
                    let dx = (xs[k] - p.x).abs();
                    let dy = (ys[k] - p.y).abs();
                    let dx = dx.min(pw - dx);
                    let dy = dy.min(ph - dy);
                    let lower = (ms[k] < m) | ((ms[k] == m) & (order[k] < i));
                    beaten |= lower & (dx * dx + dy * dy < d2);
                }
            }
            !beaten
        })
        .collect();
    Ok((parents, marks, kept))
}
