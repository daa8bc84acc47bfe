//! Monte Carlo estimation of downlink SINR coverage.
//!
//! Each trial draws a deployment (or reuses a fixed one), drops a single user
//! uniformly, attaches it to the nearest station under the window metric, and
//! draws independent exponential fading for the serving and every
//! interfering link. The resulting SINR is scored against the whole
//! threshold list, so every estimated curve is exactly nonincreasing.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::analytics::mhc_density;
use crate::error::{Error, Result};
use crate::process::{sample_mhc_with, sample_ppp_with, MhcParams, PointSet};
use crate::rng::{stream_rng, SimRng};
use crate::window::{Point, Window, MIN_TORUS_SPACINGS};

/// User-to-station distances are clamped below at this value (km).
pub const R_MIN: f64 = 1e-6;

const TRIALS_PER_CHUNK: u64 = 256;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Path loss exponent, fading rate, noise power and transmit power.
///
/// Fading powers are exponential with mean `1/gamma`, which is also the
/// transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    alpha: f64,
    gamma: f64,
    sigma2: f64,
    p_t: f64,
}

impl ChannelParams {
    /// Channel with `gamma = 1 / p_t`.
    pub fn new(alpha: f64, p_t: f64, sigma2: f64) -> Result<Self> {
        Self::with_gamma(alpha, 1.0 / p_t, sigma2, p_t)
    }

    pub fn with_gamma(alpha: f64, gamma: f64, sigma2: f64, p_t: f64) -> Result<Self> {
        if !(alpha > 2.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", format!("must be > 2, got {alpha}")));
        }
        if !(p_t > 0.0 && p_t.is_finite()) {
            return Err(Error::param("p_t", format!("must be > 0, got {p_t}")));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(Error::param(
                "sigma2",
                format!("must be >= 0, got {sigma2}"),
            ));
        }
        if !((gamma * p_t - 1.0).abs() <= 1e-12) {
            return Err(Error::param(
                "gamma",
                format!("must equal 1/p_t = {}, got {gamma}", 1.0 / p_t),
            ));
        }
        Ok(ChannelParams {
            alpha,
            gamma,
            sigma2,
            p_t,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn p_t(&self) -> f64 {
        self.p_t
    }

    /// `r^{-alpha}` from a squared distance.
    #[inline]
    pub(crate) fn path_gain(&self, r2: f64) -> f64 {
        if self.alpha == 4.0 {
            1.0 / (r2 * r2)
        } else {
            r2.powf(-0.5 * self.alpha)
        }
    }
}

/// Coverage probability against SINR threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageCurve {
    beta_db: Vec<f64>,
    p_c: Vec<f64>,
    std_err: Option<Vec<f64>>,
    label: String,
}

impl CoverageCurve {
    pub fn new(
        beta_db: Vec<f64>,
        p_c: Vec<f64>,
        std_err: Option<Vec<f64>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if beta_db.is_empty() {
            return Err(Error::param("beta_db", "threshold list is empty"));
        }
        if p_c.len() != beta_db.len() || std_err.as_ref().is_some_and(|s| s.len() != beta_db.len())
        {
            return Err(Error::Data("curve columns have different lengths".into()));
        }
        check_thresholds(&beta_db)?;
        if let Some(p) = p_c.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Data(format!(
                "coverage probability {p} outside [0, 1]"
            )));
        }
        Ok(CoverageCurve {
            beta_db,
            p_c,
            std_err,
            label: label.into(),
        })
    }

    pub fn beta_db(&self) -> &[f64] {
        &self.beta_db
    }

    pub fn p_c(&self) -> &[f64] {
        &self.p_c
    }

    pub fn std_err(&self) -> Option<&[f64]> {
        self.std_err.as_deref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.beta_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta_db.is_empty()
    }
}

fn check_thresholds(beta_db: &[f64]) -> Result<()> {
    if beta_db.is_empty() {
        return Err(Error::param("beta_db", "threshold list is empty"));
    }
    if beta_db.iter().any(|b| !b.is_finite()) || beta_db.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param(
            "beta_db",
            "thresholds must be finite and strictly increasing",
        ));
    }
    Ok(())
}

/// The default threshold grid: -10 to 30 dB in 1 dB steps.
pub fn default_beta_db() -> Vec<f64> {
    (-10..=30).map(f64::from).collect()
}

/// Where the stations of each trial come from.
#[derive(Debug, Clone)]
pub enum Deployment {
    /// A fresh Poisson realization per trial.
    Ppp { lambda: f64, window: Window },
    /// A fresh Matérn hardcore realization per trial.
    Mhc { params: MhcParams, window: Window },
    /// The same stations in every trial (lattice or coordinate file).
    Fixed(PointSet),
}

impl Deployment {
    pub fn window(&self) -> &Window {
        match self {
            Deployment::Ppp { window, .. } | Deployment::Mhc { window, .. } => window,
            Deployment::Fixed(set) => set.window(),
        }
    }

    /// Mean station density.
    pub fn density(&self) -> f64 {
        match self {
            Deployment::Ppp { lambda, .. } => *lambda,
            Deployment::Mhc { params, .. } => mhc_density(*params),
            Deployment::Fixed(set) => set.density(),
        }
    }

    pub fn default_label(&self) -> String {
        use crate::process::Provenance;
        match self {
            Deployment::Ppp { .. } => "ppp".into(),
            Deployment::Mhc { .. } => "mhc".into(),
            Deployment::Fixed(set) => match set.provenance() {
                Provenance::Grid { .. } => "grid".into(),
                Provenance::File { .. } => "file".into(),
                Provenance::Ppp { .. } => "ppp-fixed".into(),
                Provenance::Mhc(_) => "mhc-fixed".into(),
            },
        }
    }

    fn realize(&self, rng: &mut SimRng) -> Result<std::borrow::Cow<'_, [Point]>> {
        use std::borrow::Cow;
        Ok(match self {
            Deployment::Ppp { lambda, window } => {
                Cow::Owned(sample_ppp_with(rng, *lambda, window)?)
            }
            Deployment::Mhc { params, window } => {
                Cow::Owned(sample_mhc_with(rng, *params, window)?)
            }
            Deployment::Fixed(set) => Cow::Borrowed(set.points()),
        })
    }
}

impl fmt::Display for Deployment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.window();
        match self {
            Deployment::Ppp { lambda, .. } => write!(f, "ppp lambda={lambda}")?,
            Deployment::Mhc { params, .. } => write!(f, "mhc {params}")?,
            Deployment::Fixed(set) => write!(f, "{} ({} points)", set.provenance(), set.len())?,
        }
        write!(
            f,
            " window={}x{} edge={}",
            w.width(),
            w.height(),
            w.edge_policy()
        )
    }
}

/// SINR of one user and whether the serving distance hit [`R_MIN`].
#[derive(Debug, Clone, Copy, PartialEq)]
struct Link {
    sinr: f64,
    clamped: bool,
}

/// Nearest-station SINR with fresh fading. `None` for an empty deployment.
fn link_sinr(
    user: Point,
    stations: &[Point],
    window: &Window,
    ch: &ChannelParams,
    rng: &mut SimRng,
) -> Option<Link> {
    link_sinr_with(user, stations, window, ch, |_| {
        let e: f64 = Exp1.sample(rng);
        e * ch.p_t
    })
}

/// `fade(i)` supplies the fading power of station `i`; it is called for the
/// serving station first, then for the interferers in index order.
fn link_sinr_with(
    user: Point,
    stations: &[Point],
    window: &Window,
    ch: &ChannelParams,
    mut fade: impl FnMut(usize) -> f64,
) -> Option<Link> {
    let (serving, r2) = stations
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, window.dist2(user, p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    let clamped = r2 < R_MIN * R_MIN;
    let signal = fade(serving) * ch.path_gain(r2.max(R_MIN * R_MIN));
    let mut interference = 0.0;
    for (i, &p) in stations.iter().enumerate() {
        if i != serving {
            let d2 = window.dist2(user, p).max(R_MIN * R_MIN);
            interference += fade(i) * ch.path_gain(d2);
        }
    }
    Some(Link {
        sinr: signal / (ch.sigma2 + interference),
        clamped,
    })
}

/// One SINR draw for `user` against a fixed deployment.
pub fn sinr_sample(
    user: Point,
    bs: &PointSet,
    ch: &ChannelParams,
    rng: &mut SimRng,
) -> Result<f64> {
    if !bs.window().contains(user) {
        return Err(Error::Data(format!(
            "user ({}, {}) is outside the window",
            user.x, user.y
        )));
    }
    link_sinr(user, bs.points(), bs.window(), ch, rng)
        .map(|l| l.sinr)
        .ok_or_else(|| Error::Data("deployment has no base stations".into()))
}

/// Result of [`simulate_coverage`] with the bookkeeping that went into it.
#[derive(Debug, Clone)]
pub struct CoverageRun {
    pub curve: CoverageCurve,
    pub n_trials: usize,
    /// Trials whose serving distance was clamped to [`R_MIN`].
    pub clamped: u64,
    /// Trials whose realization had no stations (scored as outage).
    pub empty_realizations: u64,
    pub warnings: Vec<String>,
}

#[derive(Default)]
struct Tally {
    covered: Vec<u64>,
    clamped: u64,
    empty: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        if self.covered.is_empty() {
            return other;
        }
        for (a, b) in self.covered.iter_mut().zip(other.covered) {
            *a += b;
        }
        self.clamped += other.clamped;
        self.empty += other.empty;
        self
    }
}

/// Estimates `P[SINR >= beta]` for each threshold in `beta_db`.
///
/// Trial `i` uses stream `i` of `seed`; counts are summed, so the result does
/// not depend on the number of worker threads.
pub fn simulate_coverage(
    source: &Deployment,
    ch: &ChannelParams,
    beta_db: &[f64],
    n_trials: usize,
    seed: u64,
) -> Result<CoverageRun> {
    check_thresholds(beta_db)?;
    if n_trials == 0 {
        return Err(Error::param("n_trials", "must be >= 1"));
    }
    let window = *source.window();
    let (x0, x1, y0, y1) = window.user_region();
    let thresholds: Vec<f64> = beta_db.iter().map(|&b| db_to_linear(b)).collect();

    let mut warnings = Vec::new();
    let density = source.density();
    if window.is_toroidal() && density > 0.0 {
        let needed = MIN_TORUS_SPACINGS / density.sqrt();
        if window.width().min(window.height()) < needed {
            warnings.push(format!(
                "torus {}x{} is narrower than {needed:.2} km (20 mean spacings); interference truncation may bias the estimate",
                window.width(),
                window.height()
            ));
        }
    }
    if let Deployment::Fixed(set) = source {
        if set.is_empty() {
            return Err(Error::Data("deployment has no base stations".into()));
        }
    }

    let n = n_trials as u64;
    let chunks = n.div_ceil(TRIALS_PER_CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<Tally> {
            let mut t = Tally {
                covered: vec![0; thresholds.len()],
                ..Default::default()
            };
            for trial in c * TRIALS_PER_CHUNK..((c + 1) * TRIALS_PER_CHUNK).min(n) {
                let mut rng = stream_rng(seed, trial);
                let stations = source.realize(&mut rng)?;
                let user = Point::new(
                    x0 + (x1 - x0) * rng.random::<f64>(),
                    y0 + (y1 - y0) * rng.random::<f64>(),
                );
                let Some(link) = link_sinr(user, &stations, &window, ch, &mut rng) else {
                    t.empty += 1;
                    continue;
                };
                t.clamped += link.clamped as u64;
                for (count, &b) in t.covered.iter_mut().zip(&thresholds) {
                    if link.sinr >= b {
                        *count += 1;
                    } else {
                        break;
                    }
                }
            }
            Ok(t)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;

    let nf = n_trials as f64;
    let p_c: Vec<f64> = tally.covered.iter().map(|&k| k as f64 / nf).collect();
    let std_err = p_c.iter().map(|p| (p * (1.0 - p) / nf).sqrt()).collect();
    if tally.clamped > 0 {
        warnings.push(format!(
            "{} of {n_trials} trials clamped the serving distance to {R_MIN} km",
            tally.clamped
        ));
    }
    if tally.empty > 0 {
        warnings.push(format!(
            "{} of {n_trials} realizations had no stations and were scored as outage",
            tally.empty
        ));
    }
    Ok(CoverageRun {
        curve: CoverageCurve::new(beta_db.to_vec(), p_c, Some(std_err), source.default_label())?,
        n_trials,
        clamped: tally.clamped,
        empty_realizations: tally.empty,
        warnings,
    })
}

/// One evaluated candidate of a [`fit_mhc`] search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitCandidate {
    pub params: MhcParams,
    /// Mean squared difference to the target over its thresholds.
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct MhcFit {
    pub best: MhcParams,
    pub error: f64,
    pub table: Vec<FitCandidate>,
}

/// Exhaustive search for the Matérn parameters whose simulated coverage is
/// closest (mean squared error) to `target`.
///
/// Every candidate is simulated with the same seed. `window` defaults to a
/// torus sized per candidate with [`Window::auto_torus`]. Ties go to the
/// smaller `d`, then the smaller `lambda_p`.
pub fn fit_mhc(
    target: &CoverageCurve,
    candidates: &[MhcParams],
    ch: &ChannelParams,
    n_trials: usize,
    seed: u64,
    window: Option<Window>,
) -> Result<MhcFit> {
    if candidates.is_empty() {
        return Err(Error::param("candidates", "search grid is empty"));
    }
    let table = candidates
        .iter()
        .map(|&params| {
            let window = match window {
                Some(w) => w,
                None => Window::auto_torus(mhc_density(params))?,
            };
            let run = simulate_coverage(
                &Deployment::Mhc { params, window },
                ch,
                target.beta_db(),
                n_trials,
                seed,
            )?;
            let error = run
                .curve
                .p_c()
                .iter()
                .zip(target.p_c())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                / target.len() as f64;
            Ok(FitCandidate { params, error })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = table
        .iter()
        .min_by(|a, b| {
            a.error
                .total_cmp(&b.error)
                .then(a.params.d().total_cmp(&b.params.d()))
                .then(a.params.lambda_p().total_cmp(&b.params.lambda_p()))
        })
        .copied()
        .expect("nonempty");
    Ok(MhcFit {
        best: best.params,
        error: best.error,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{PointSet, Provenance};

    fn unit_channel(sigma2: f64) -> ChannelParams {
        ChannelParams::new(4.0, 1.0, sigma2).unwrap()
    }

    #[test]
    fn channel_validation() {
        assert!(ChannelParams::new(2.0, 1.0, 0.1).is_err());
        assert!(ChannelParams::new(4.0, 0.0, 0.1).is_err());
        assert!(ChannelParams::new(4.0, 1.0, -0.1).is_err());
        assert!(ChannelParams::with_gamma(4.0, 2.0, 0.1, 1.0).is_err());
        let ch = ChannelParams::new(4.0, 2.0, 0.2).unwrap();
        assert_eq!(ch.gamma(), 0.5);
    }

    #[test]
    fn curve_validation() {
        assert!(CoverageCurve::new(vec![], vec![], None, "x").is_err());
        assert!(CoverageCurve::new(vec![1.0, 0.0], vec![0.5, 0.5], None, "x").is_err());
        assert!(CoverageCurve::new(vec![0.0], vec![1.5], None, "x").is_err());
        assert!(CoverageCurve::new(vec![0.0, 1.0], vec![0.5], None, "x").is_err());
    }

    #[test]
    fn empty_deployment_is_a_data_error() {
        let w = Window::torus(10.0, 10.0).unwrap();
        let empty = PointSet::new(vec![], w, Provenance::Ppp { lambda: 1.0 }, None).unwrap();
        let mut rng = stream_rng(0, 0);
        assert!(matches!(
            sinr_sample(Point::new(1.0, 1.0), &empty, &unit_channel(0.1), &mut rng),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn coincident_user_is_clamped() {
        let w = Window::torus(10.0, 10.0).unwrap();
        let set = PointSet::new(
            vec![Point::new(5.0, 5.0)],
            w,
            Provenance::Ppp { lambda: 1.0 },
            None,
        )
        .unwrap();
        let mut rng = stream_rng(0, 0);
        let link = link_sinr(
            Point::new(5.0, 5.0),
            set.points(),
            &w,
            &unit_channel(0.1),
            &mut rng,
        )
        .unwrap();
        assert!(link.clamped);
        assert!(link.sinr.is_finite() && link.sinr > 1e20);
    }

    #[test]
    fn single_station_noise_only_law() {
        // P[SINR >= beta] = exp(-gamma beta sigma2 r^alpha) at fixed r.
        let w = Window::guard_band(10.0, 10.0, 0.0).unwrap();
        let set = PointSet::new(
            vec![Point::new(5.0, 5.0)],
            w,
            Provenance::Ppp { lambda: 1.0 },
            None,
        )
        .unwrap();
        let ch = unit_channel(0.5);
        let user = Point::new(5.8, 5.0);
        let beta = 2.0;
        let n = 200_000;
        let hits = (0..n)
            .filter(|&i| sinr_sample(user, &set, &ch, &mut stream_rng(3, i)).unwrap() >= beta)
            .count();
        let p = hits as f64 / n as f64;
        let expect = (-beta * 0.5 * 0.8f64.powi(4)).exp();
        let se = (expect * (1.0 - expect) / n as f64).sqrt();
        assert!((p - expect).abs() < 3.0 * se, "{p} vs {expect}");
    }

    #[test]
    fn equidistant_pair_without_noise() {
        // SINR = h/g, so P[SINR >= beta] = 1/(1 + beta).
        let w = Window::guard_band(10.0, 10.0, 0.0).unwrap();
        let set = PointSet::new(
            vec![Point::new(4.0, 5.0), Point::new(6.0, 5.0)],
            w,
            Provenance::Ppp { lambda: 1.0 },
            None,
        )
        .unwrap();
        let ch = unit_channel(0.0);
        let user = Point::new(5.0, 5.0);
        let n = 200_000;
        for beta in [0.5, 1.0, 3.0] {
            let hits = (0..n)
                .filter(|&i| sinr_sample(user, &set, &ch, &mut stream_rng(8, i)).unwrap() >= beta)
                .count();
            let p = hits as f64 / n as f64;
            let expect = 1.0 / (1.0 + beta);
            let se = (expect * (1.0 - expect) / n as f64).sqrt();
            assert!(
                (p - expect).abs() < 3.0 * se,
                "beta {beta}: {p} vs {expect}"
            );
        }
    }

    #[test]
    fn removing_nearest_interferer_never_hurts() {
        let w = Window::torus(12.0, 12.0).unwrap();
        let ch = unit_channel(0.1);
        let user = Point::new(6.0, 6.0);
        for seed in 0..50 {
            let pts = crate::process::sample_ppp(1.0, w, seed)
                .unwrap()
                .points()
                .to_vec();
            if pts.len() < 3 {
                continue;
            }
            // One fade per station, kept when another station is removed.
            let mut rng = stream_rng(seed, 1);
            let fades: Vec<f64> = (0..pts.len()).map(|_| Exp1.sample(&mut rng)).collect();
            let full = link_sinr_with(user, &pts, &w, &ch, |i| fades[i])
                .unwrap()
                .sinr;

            let mut order: Vec<usize> = (0..pts.len()).collect();
            order.sort_by(|&a, &b| w.dist2(user, pts[a]).total_cmp(&w.dist2(user, pts[b])));
            let keep: Vec<usize> = (0..pts.len()).filter(|&i| i != order[1]).collect();
            let reduced: Vec<Point> = keep.iter().map(|&i| pts[i]).collect();
            let less = link_sinr_with(user, &reduced, &w, &ch, |i| fades[keep[i]])
                .unwrap()
                .sinr;
            assert!(less >= full, "seed {seed}: {less} < {full}");
        }
    }

    #[test]
    fn limits_and_monotonicity() {
        let w = Window::torus(15.0, 15.0).unwrap();
        let src = Deployment::Mhc {
            params: MhcParams::new(2.0, 0.4).unwrap(),
            window: w,
        };
        let run = simulate_coverage(&src, &unit_channel(0.1), &[-60.0, 0.0, 10.0, 60.0], 4000, 1)
            .unwrap();
        let p = run.curve.p_c();
        let se = run.curve.std_err().unwrap();
        assert!(p[0] >= 1.0 - 3.0 * se[0].max(1.0 / 4000.0));
        assert!(p[3] <= 3.0 * se[3].max(1.0 / 4000.0));
        assert!(p.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn zero_trials_and_empty_grid_rejected() {
        let src = Deployment::Ppp {
            lambda: 1.0,
            window: Window::torus(10.0, 10.0).unwrap(),
        };
        assert!(simulate_coverage(&src, &unit_channel(0.1), &[0.0], 0, 1).is_err());
        assert!(simulate_coverage(&src, &unit_channel(0.1), &[], 10, 1).is_err());
    }

    #[test]
    fn seed_determinism_and_scale_invariance() {
        let w = Window::torus(20.0, 20.0).unwrap();
        let src = Deployment::Mhc {
            params: MhcParams::new(1.0, 0.5).unwrap(),
            window: w,
        };
        let beta = default_beta_db();
        let a = simulate_coverage(&src, &unit_channel(0.1), &beta, 3000, 9).unwrap();
        let b = simulate_coverage(&src, &unit_channel(0.1), &beta, 3000, 9).unwrap();
        assert_eq!(a.curve, b.curve);
        let scaled = ChannelParams::new(4.0, 4.0, 0.4).unwrap();
        let c = simulate_coverage(&src, &scaled, &beta, 3000, 9).unwrap();
        assert_eq!(a.curve.p_c(), c.curve.p_c());
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let src = Deployment::Ppp {
            lambda: 1.0,
            window: Window::torus(20.0, 20.0).unwrap(),
        };
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    simulate_coverage(&src, &unit_channel(0.1), &[-5.0, 0.0, 5.0], 2000, 4).unwrap()
                })
        };
        assert_eq!(run(1).curve, run(3).curve);
    }

    #[test]
    fn fit_degenerate_and_self_fit() {
        let ch = unit_channel(0.1);
        let truth = MhcParams::new(2.0, 0.4).unwrap();
        let beta: Vec<f64> = (-10..=20).step_by(2).map(f64::from).collect();
        let torus = Window::torus(14.0, 14.0).unwrap();
        let simulate = |params, n, seed| {
            let dep = Deployment::Mhc {
                params,
                window: torus,
            };
            simulate_coverage(&dep, &ch, &beta, n, seed).unwrap().curve
        };

        let target = simulate(truth, 3000, 5);
        let single = fit_mhc(
            &target,
            &[MhcParams::new(1.0, 0.2).unwrap()],
            &ch,
            500,
            1,
            None,
        )
        .unwrap();
        assert_eq!(single.best, MhcParams::new(1.0, 0.2).unwrap());
        assert_eq!(single.table.len(), 1);
        assert_eq!(single.error, single.table[0].error);

        // Same seed and trial count reproduce the target exactly.
        let grid: Vec<MhcParams> = [1.0, 2.0, 4.0]
            .iter()
            .flat_map(|&l| [0.0, 0.4, 0.8].map(|d| MhcParams::new(l, d).unwrap()))
            .collect();
        let fit = fit_mhc(&target, &grid, &ch, 3000, 5, Some(torus)).unwrap();
        assert_eq!(fit.best, truth);
        assert_eq!(fit.error, 0.0);

        // Independent streams: the hardcore distance is still recovered while
        // the curves are well separated (they flatten out for d above ~0.6).
        let truth = MhcParams::new(2.0, 0.2).unwrap();
        let target = simulate(truth, 20_000, 77);
        let grid = [0.0, 0.2, 0.4].map(|d| MhcParams::new(2.0, d).unwrap());
        let fit = fit_mhc(&target, &grid, &ch, 10_000, 5, Some(torus)).unwrap();
        assert_eq!(fit.best, truth, "table: {:?}", fit.table);

        assert!(fit_mhc(&target, &[], &ch, 10, 1, None).is_err());
    }
}
