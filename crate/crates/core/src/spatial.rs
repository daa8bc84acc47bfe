//! Uniform bucket grid for fixed-radius neighbour queries.

use crate::window::Point;

/// Buckets points into square-ish cells at least `radius` wide, so every
/// neighbour within `radius` of a query lies in the 3×3 block around it.
pub(crate) struct CellIndex {
    x0: f64,
    y0: f64,
    cell_w: f64,
    cell_h: f64,
    nx: usize,
    ny: usize,
    periodic: bool,
    start: Vec<usize>,
    items: Vec<usize>,
}

const MAX_CELLS_PER_AXIS: usize = 4096;

impl CellIndex {
    /// `points` must lie in `[x0, x0 + w] × [y0, y0 + h]`.
    pub(crate) fn build(
        points: &[Point],
        (x0, y0, w, h): (f64, f64, f64, f64),
        radius: f64,
        periodic: bool,
    ) -> Self {
        // Cells no smaller than `radius`, and about one point per cell at most.
        let cell = radius.max((w * h / points.len().max(1) as f64).sqrt());
        let cells = |len: f64| ((len / cell).floor() as usize).clamp(1, MAX_CELLS_PER_AXIS);
        let nx = cells(w);
        let ny = cells(h);
        let mut index = CellIndex {
            x0,
            y0,
            cell_w: w / nx as f64,
            cell_h: h / ny as f64,
            nx,
            ny,
            periodic,
            start: vec![0; nx * ny + 1],
            items: vec![0; points.len()],
        };
        let cell_of: Vec<usize> = points.iter().map(|&p| index.cell_of(p)).collect();
        for &c in &cell_of {
            index.start[c + 1] += 1;
        }
        for c in 0..nx * ny {
            index.start[c + 1] += index.start[c];
        }
        let mut fill = index.start.clone();
        for (i, &c) in cell_of.iter().enumerate() {
            index.items[fill[c]] = i;
            fill[c] += 1;
        }
        index
    }

    fn cell_coords(&self, p: Point) -> (usize, usize) {
        // Saturating casts truncate toward zero and map negatives to 0.
        let cx = (((p.x - self.x0) / self.cell_w) as usize).min(self.nx - 1);
        let cy = (((p.y - self.y0) / self.cell_h) as usize).min(self.ny - 1);
        (cx, cy)
    }

    fn cell_of(&self, p: Point) -> usize {
        let (cx, cy) = self.cell_coords(p);
        cy * self.nx + cx
    }

    fn axis_neighbours(&self, c: usize, n: usize) -> ([usize; 3], usize) {
        if n >= 3 && c >= 1 && c + 1 < n {
            return ([c - 1, c, c + 1], 3);
        }
        let mut out = [0usize; 3];
        let mut len = 0;
        for delta in [-1i64, 0, 1] {
            let raw = c as i64 + delta;
            let idx = if self.periodic {
                raw.rem_euclid(n as i64) as usize
            } else if raw < 0 || raw >= n as i64 {
                continue;
            } else {
                raw as usize
            };
            if !out[..len].contains(&idx) {
                out[len] = idx;
                len += 1;
            }
        }
        (out, len)
    }

    /// Ranges of `items` positions covering the 3×3 cell block around `p`.
    #[inline]
    pub(crate) fn block_runs(&self, p: Point) -> ([(usize, usize); 6], usize) {
        let (cx, cy) = self.cell_coords(p);
        let (ys, nys) = self.axis_neighbours(cy, self.ny);
        // Cells adjacent along x are adjacent in `items`, so each row of the
        // block is one run, or two when it wraps around the torus.
        let mut cols = [(0usize, 0usize); 2];
        let ncols = if cx >= 1 && cx + 1 < self.nx {
            cols[0] = (cx - 1, cx + 2);
            1
        } else {
            let (xs, nxs) = self.axis_neighbours(cx, self.nx);
            let lo = xs[..nxs].iter().copied().min().unwrap_or(0);
            let hi = xs[..nxs].iter().copied().max().unwrap_or(0);
            if hi + 1 - lo == nxs {
                cols[0] = (lo, hi + 1);
                1
            } else if cx == 0 {
                cols = [(0, 2), (self.nx - 1, self.nx)];
                2
            } else {
                cols = [(0, 1), (self.nx - 2, self.nx)];
                2
            }
        };
        let mut runs = [(0usize, 0usize); 6];
        let mut n = 0;
        for &y in &ys[..nys] {
            let row = y * self.nx;
            for &(a, b) in &cols[..ncols] {
                runs[n] = (self.start[row + a], self.start[row + b]);
                n += 1;
            }
        }
        (runs, n)
    }

    /// Point indices in cell order; `block_runs` ranges index into this.
    pub(crate) fn items(&self) -> &[usize] {
        &self.items
    }

    /// Calls `visit` with each point index in the 3×3 cell block around `p`
    /// until it returns `true`. Returns whether any call did.
    #[inline]
    pub(crate) fn any_candidate(&self, p: Point, mut visit: impl FnMut(usize) -> bool) -> bool {
        let (runs, n) = self.block_runs(p);
        runs[..n]
            .iter()
            .any(|&(a, b)| self.items[a..b].iter().any(|&j| visit(j)))
    }

    /// Indices of all points in the 3×3 cell block around `p`.
    #[cfg(test)]
    pub(crate) fn candidates(&self, p: Point) -> Vec<usize> {
        let mut out = Vec::new();
        self.any_candidate(p, |j| {
            out.push(j);
            false
        });
        out
    }
}
