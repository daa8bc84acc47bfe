//! Simulation-based checks of the analytical approximations: void
//! probabilities, the pair-correlation estimator for `rho2`, and the
//! nearest-station distance distribution.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::{empty_space_cdf, mhc_density, retention_probability};
use crate::error::{Error, Result};
use crate::process::{mhc::thin, MhcParams};
use crate::rng::stream_rng;
use crate::spatial::CellIndex;
use crate::stats::{ks_statistic, mean_and_se};
use crate::window::{Point, Window};

const LOCATIONS_PER_REALIZATION: usize = 16;
const MIN_REALIZATIONS: usize = 30;

/// Torus at least [`Window::auto_torus`] wide and at least `min_side` km.
pub(crate) fn validation_window(lambda_m: f64, min_side: f64) -> Result<Window> {
    let auto = Window::auto_torus(lambda_m)?;
    let side = auto.width().max(min_side.ceil());
    Window::torus(side, side)
}

fn uniform_point(rng: &mut impl Rng, w: &Window) -> Point {
    Point::new(
        w.width() * rng.random::<f64>(),
        w.height() * rng.random::<f64>(),
    )
}

/// Estimate of `P[no retained point within r of a uniform location]`.
#[derive(Debug, Clone)]
pub struct VoidEstimate {
    pub probability: f64,
    pub std_error: f64,
    /// The Poisson-style approximation `exp(-lambda_m pi r^2)`.
    pub approximation: f64,
    pub realizations: usize,
    pub warning: Option<String>,
    /// Conditional elimination statistics, one row per parent count `n`.
    pub elimination: Vec<EliminationRow>,
}

/// Among test balls holding `n` parent points, how often all `n` were thinned,
/// next to the geometric approximation `(1 - p)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationRow {
    pub n: usize,
    pub locations: u64,
    pub all_eliminated: u64,
    pub geometric: f64,
}

impl EliminationRow {
    pub fn empirical(&self) -> f64 {
        self.all_eliminated as f64 / self.locations as f64
    }
}

pub fn void_probability_empirical(
    params: MhcParams,
    r: f64,
    n_realizations: usize,
    seed: u64,
) -> Result<VoidEstimate> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be > 0, got {r}")));
    }
    if n_realizations == 0 {
        return Err(Error::param("n_realizations", "must be >= 1"));
    }
    let lambda_m = mhc_density(params);
    let window = validation_window(lambda_m, 4.0 * (r + params.d()))?;
    let r2 = r * r;

    let per_realization: Vec<(f64, Vec<(usize, bool)>)> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let (parents, _, kept) = thin(&mut rng, params, &window)?;
            let mut empty = 0usize;
            let mut balls = Vec::with_capacity(LOCATIONS_PER_REALIZATION);
            for _ in 0..LOCATIONS_PER_REALIZATION {
                let y = uniform_point(&mut rng, &window);
                let n_parents = parents.iter().filter(|&&p| window.dist2(y, p) < r2).count();
                let void = !kept.iter().any(|&k| window.dist2(y, parents[k]) < r2);
                empty += void as usize;
                balls.push((n_parents, void));
            }
            Ok((empty as f64 / LOCATIONS_PER_REALIZATION as f64, balls))
        })
        .collect::<Result<_>>()?;

    let fractions: Vec<f64> = per_realization.iter().map(|(f, _)| *f).collect();
    let (probability, std_error) = mean_and_se(&fractions);

    let q = 1.0 - retention_probability(params);
    let mut table: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for (n, void) in per_realization.iter().flat_map(|(_, b)| b.iter().copied()) {
        let e = table.entry(n).or_default();
        e.0 += 1;
        e.1 += void as u64;
    }
    let elimination = table
        .into_iter()
        .map(|(n, (locations, all_eliminated))| EliminationRow {
            n,
            locations,
            all_eliminated,
            geometric: q.powi(n as i32),
        })
        .collect();

    Ok(VoidEstimate {
        probability,
        std_error,
        approximation: (-lambda_m * PI * r2).exp(),
        realizations: n_realizations,
        warning: (n_realizations < MIN_REALIZATIONS).then(|| {
            format!("only {n_realizations} realizations; standard error is unreliable below {MIN_REALIZATIONS}")
        }),
        elimination,
    })
}

/// Pair-correlation estimate of `rho2` at one separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDensityEstimate {
    pub upsilon: f64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Ring-count estimator of the second-order product density on a torus:
/// ordered pairs with separation in `[u - h, u + h)` divided by
/// `|W| * pi((u + h)^2 - (u - h)^2)`, averaged over realizations.
pub fn pair_density_empirical(
    params: MhcParams,
    upsilons: &[f64],
    half_width: f64,
    n_realizations: usize,
    seed: u64,
) -> Result<Vec<PairDensityEstimate>> {
    if !(half_width > 0.0) {
        return Err(Error::param("half_width", "must be > 0"));
    }
    if n_realizations < 2 {
        return Err(Error::param("n_realizations", "need at least 2"));
    }
    if let Some(&u) = upsilons.iter().find(|&&u| !(u >= half_width)) {
        return Err(Error::param(
            "upsilon",
            format!("{u} is below the bin half-width"),
        ));
    }
    let reach = upsilons.iter().fold(0.0f64, |m, &u| m.max(u)) + half_width;
    let window = validation_window(mhc_density(params), 4.0 * reach)?;
    let area = window.area();
    let rings: Vec<f64> = upsilons
        .iter()
        .map(|&u| PI * ((u + half_width).powi(2) - (u - half_width).powi(2)))
        .collect();

    let per_realization: Vec<Vec<f64>> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let (parents, _, kept) = thin(&mut rng, params, &window)?;
            let pts: Vec<Point> = kept.into_iter().map(|k| parents[k]).collect();
            let index = CellIndex::build(
                &pts,
                (0.0, 0.0, window.width(), window.height()),
                reach,
                true,
            );
            let mut counts = vec![0u64; upsilons.len()];
            for (a, &p) in pts.iter().enumerate() {
                index.any_candidate(p, |b| {
                    if a != b {
                        let dist = window.dist2(p, pts[b]).sqrt();
                        for (k, &u) in upsilons.iter().enumerate() {
                            if dist >= u - half_width && dist < u + half_width {
                                counts[k] += 1;
                            }
                        }
                    }
                    false
                });
            }
            Ok(counts
                .iter()
                .zip(&rings)
                .map(|(&c, ring)| c as f64 / (area * ring))
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok(upsilons
        .iter()
        .enumerate()
        .map(|(k, &upsilon)| {
            let column: Vec<f64> = per_realization.iter().map(|row| row[k]).collect();
            let (estimate, std_error) = mean_and_se(&column);
            PairDensityEstimate {
                upsilon,
                estimate,
                std_error,
            }
        })
        .collect())
}

/// Distance from uniform locations to the nearest retained point, compared
/// with the approximate empty-space law.
#[derive(Debug, Clone)]
pub struct KsReport {
    pub statistic: f64,
    pub samples: usize,
    pub lambda_m: f64,
    /// Sorted nearest-point distances.
    pub distances: Vec<f64>,
}

pub fn nearest_distance_ks(
    params: MhcParams,
    n_realizations: usize,
    locations_per_realization: usize,
    seed: u64,
) -> Result<KsReport> {
    if n_realizations == 0 || locations_per_realization == 0 {
        return Err(Error::param("n_realizations", "need at least one sample"));
    }
    let lambda_m = mhc_density(params);
    let window = validation_window(lambda_m, 4.0 * params.d())?;
    let per_realization: Vec<Vec<f64>> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let (parents, _, kept) = thin(&mut rng, params, &window)?;
            let pts: Vec<Point> = kept.into_iter().map(|k| parents[k]).collect();
            Ok((0..locations_per_realization)
                .map(|_| {
                    let y = uniform_point(&mut rng, &window);
                    pts.iter()
                        .map(|&p| window.dist2(y, p))
                        .fold(f64::INFINITY, f64::min)
                        .sqrt()
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut distances: Vec<f64> = per_realization.into_iter().flatten().collect();
    distances.sort_by(f64::total_cmp);
    let statistic = ks_statistic(&distances, |r| empty_space_cdf(r, lambda_m));
    Ok(KsReport {
        statistic,
        samples: distances.len(),
        lambda_m,
        distances,
    })
}
