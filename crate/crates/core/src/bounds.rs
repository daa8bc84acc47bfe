//! Quadrature lower bounds on Matérn hardcore coverage.
//!
//! Both bounds share the same outer integral
//!
//! `P_c >= ∫ f(r) exp(-gamma beta sigma^2 r^alpha) exp(-(mu1 + mu2)) dr`
//!
//! over the nearest-station distance `r`, with `f` the empty-space density.
//! `mu1 + mu2 = lambda_m^{-1} ∫∫ Delta(r, v, theta) rho2(v) v dv dtheta` is the
//! reduced Campbell integral of the per-interferer penalty `Delta`; `mu1`
//! covers `d <= v < 2d`, where `rho2` is nontrivial, and `mu2` the constant
//! tail. The two kinds differ only in `Delta`:
//!
//! * [`BoundKind::Theorem1`]: `ln(1 + beta q)` (Jensen's inequality),
//! * [`BoundKind::Proposition1`]: `beta q / (1 + beta q)` (PGFL-style inequality),
//!
//! with `q = (r^2 / R^2)^{alpha/2}` and `R^2 = v^2 + r^2 - 2 r v cos(theta - phi)`
//! the squared user-to-interferer distance.
//!
//! Every integral uses the composite trapezoidal rule. The user angle `phi`
//! enters only through `theta - phi`, so the outer bound fixes `phi = 0`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::analytics::{empty_space_pdf, validation_window, SecondOrderDensity};
use crate::coverage::{db_to_linear, ChannelParams, CoverageCurve};
use crate::error::{Error, Result};
use crate::process::mhc::thin;
use crate::process::MhcParams;
use crate::rng::stream_rng;
use crate::window::Point;

/// Squared distances below this are clamped before use.
pub const R2_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// `Delta = ln(1 + beta q)`.
    Theorem1,
    /// `Delta = beta q / (1 + beta q)`; never looser than `Theorem1`.
    Proposition1,
}

impl BoundKind {
    pub const ALL: [BoundKind; 2] = [BoundKind::Theorem1, BoundKind::Proposition1];

    /// `Delta` as a function of `x = beta q`.
    #[inline]
    fn penalty(self, x: f64) -> f64 {
        match self {
            BoundKind::Theorem1 => x.ln_1p(),
            BoundKind::Proposition1 => x / (1.0 + x),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::Theorem1 => "theorem1",
            BoundKind::Proposition1 => "proposition1",
        })
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem1" => Ok(BoundKind::Theorem1),
            "proposition1" => Ok(BoundKind::Proposition1),
            _ => Err(Error::param(
                "kind",
                format!("expected theorem1 or proposition1, got {s:?}"),
            )),
        }
    }
}

/// Lower limit of the interferer distance `v` for a given `theta - phi`.
///
/// Every interferer must be at least as far from the user as the serving
/// station, i.e. `R >= r`, which is `v >= 2 r cos(theta - phi)` when the
/// cosine is positive and no constraint otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Exclusion {
    /// `max(0, 2 r cos(theta - phi))`: exactly the region `R >= r`.
    #[default]
    Geometric,
    /// `|2 r cos(theta - phi)|`: also removes the mirror-image region behind
    /// the serving station, which drops real interferers and inflates the
    /// bound.
    Symmetric,
}

impl fmt::Display for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exclusion::Geometric => "geometric",
            Exclusion::Symmetric => "symmetric",
        })
    }
}

impl FromStr for Exclusion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "geometric" => Ok(Exclusion::Geometric),
            "symmetric" => Ok(Exclusion::Symmetric),
            _ => Err(Error::param(
                "exclusion",
                format!("expected geometric or symmetric, got {s:?}"),
            )),
        }
    }
}

impl Exclusion {
    #[inline]
    fn lower(self, r: f64, cos: f64) -> f64 {
        match self {
            Exclusion::Geometric => (2.0 * r * cos).max(0.0),
            Exclusion::Symmetric => (2.0 * r * cos).abs(),
        }
    }
}

/// Grid sizes and truncation settings for the bound quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Nodes in `r` on `[0, r_max]`, graded as `r = r_max s^2` so they
    /// cluster near 0.
    pub n_r: usize,
    /// Nodes over one full period of `theta`.
    pub n_theta: usize,
    /// Nodes in each of the three `v` segments (hardcore ring, near tail,
    /// log-spaced far tail).
    pub n_upsilon: usize,
    /// Truncation of the `r` integral; `None` means `5 / sqrt(pi lambda_m)`.
    pub r_max: Option<f64>,
    /// The `v` integral is cut where the analytic tail estimate drops below
    /// this fraction of the accumulated `mu2`.
    pub upsilon_tail_tol: f64,
    pub exclusion: Exclusion,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            n_r: 128,
            n_theta: 256,
            n_upsilon: 256,
            r_max: None,
            upsilon_tail_tol: 1e-4,
            exclusion: Exclusion::Geometric,
        }
    }
}

impl QuadConfig {
    pub const MIN_NODES: usize = 16;

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [
            ("n_r", self.n_r),
            ("n_theta", self.n_theta),
            ("n_upsilon", self.n_upsilon),
        ] {
            if n < Self::MIN_NODES {
                return Err(Error::param(
                    name,
                    format!("must be >= {}, got {n}", Self::MIN_NODES),
                ));
            }
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::param("r_max", format!("must be > 0, got {r}")));
            }
        }
        let tol = self.upsilon_tail_tol;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::param(
                "upsilon_tail_tol",
                format!("must be in (0, 1), got {tol}"),
            ));
        }
        Ok(())
    }

    /// Same settings with every grid count multiplied by `factor`.
    pub fn scaled(self, factor: usize) -> Self {
        QuadConfig {
            n_r: self.n_r * factor,
            n_theta: self.n_theta * factor,
            n_upsilon: self.n_upsilon * factor,
            ..self
        }
    }

    /// The `r` truncation actually used for a process of density `lambda_m`.
    pub fn r_max_for(&self, lambda_m: f64) -> f64 {
        self.r_max.unwrap_or_else(|| 5.0 / (PI * lambda_m).sqrt())
    }
}

/// `Delta(r, v, theta - phi)` for one interferer.
///
/// A nonpositive `R^2` (interferer on top of the user) is clamped to
/// [`R2_EPS`].
pub fn delta(
    kind: BoundKind,
    r: f64,
    upsilon: f64,
    theta_minus_phi: f64,
    beta: f64,
    alpha: f64,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::param("r", format!("must be > 0, got {r}")));
    }
    if !(upsilon > 0.0) {
        return Err(Error::param(
            "upsilon",
            format!("must be > 0, got {upsilon}"),
        ));
    }
    if !(beta >= 0.0) {
        return Err(Error::param("beta", format!("must be >= 0, got {beta}")));
    }
    if !(alpha > 2.0) {
        return Err(Error::param("alpha", format!("must be > 2, got {alpha}")));
    }
    let r2x = upsilon * upsilon + r * r - 2.0 * r * upsilon * theta_minus_phi.cos();
    Ok(kind.penalty(beta * ratio_power(r * r, r2x.max(R2_EPS), alpha)))
}

/// `(a / b)^{alpha/2}`.
#[inline]
fn ratio_power(a: f64, b: f64, alpha: f64) -> f64 {
    let x = a / b;
    if alpha == 4.0 {
        x * x
    } else {
        x.powf(0.5 * alpha)
    }
}

/// Composite trapezoid nodes on `[a, b]`, passed to `visit(x, weight)`.
#[inline]
fn trapezoid(a: f64, b: f64, n: usize, mut visit: impl FnMut(f64, f64)) {
    let h = (b - a) / (n - 1) as f64;
    for i in 0..n {
        let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
        visit(a + h * i as f64, w);
    }
}

/// `mu1`, `mu2` and the truncation bookkeeping for one `r`, for every
/// threshold at once.
#[derive(Debug, Clone, Default)]
struct MuAtR {
    mu1: Vec<f64>,
    mu2: Vec<f64>,
    /// Analytic estimate of the dropped part of `mu2`, per threshold.
    tail: Vec<f64>,
    upsilon_max: f64,
    clamped: usize,
}

/// Everything about one bound evaluation that does not change with `r`.
struct Integrand<'a> {
    kind: BoundKind,
    alpha: f64,
    betas: &'a [f64],
    rho: SecondOrderDensity,
    quad: QuadConfig,
}

impl Integrand<'_> {
    /// `theta` nodes as `(theta - phi, weight)` pairs. With `fold`, nodes
    /// that mirror each other about `theta - phi = 0` are merged, which is
    /// exact for the periodic trapezoid rule when `phi` is itself a node
    /// offset (we only fold at `phi = 0`).
    fn theta_nodes(&self, phi: f64, fold: bool) -> Vec<(f64, f64)> {
        let n = self.quad.n_theta;
        let h = 2.0 * PI / n as f64;
        if fold {
            (0..=n / 2)
                .map(|k| {
                    let mult = if k == 0 || 2 * k == n { 1.0 } else { 2.0 };
                    (h * k as f64, mult * h)
                })
                .collect()
        } else {
            (0..n).map(|k| (h * k as f64 - phi, h)).collect()
        }
    }

    /// Adds `w rho(v) v Delta_beta(v)` for every threshold into `acc`.
    #[inline]
    fn accumulate(
        &self,
        r: f64,
        v: f64,
        cos: f64,
        weight: f64,
        acc: &mut [f64],
        clamped: &mut usize,
    ) {
        let r2x = v * v + r * r - 2.0 * r * v * cos;
        let r2x = if r2x < R2_EPS {
            *clamped += 1;
            R2_EPS
        } else {
            r2x
        };
        let q = ratio_power(r * r, r2x, self.alpha);
        let w = weight * self.rho.eval(v) * v;
        if w == 0.0 {
            return;
        }
        for (a, &beta) in acc.iter_mut().zip(self.betas) {
            *a += w * self.kind.penalty(beta * q);
        }
    }

    fn mu(&self, r: f64, phi: f64, fold: bool) -> MuAtR {
        let d = self.rho.params().d();
        let lambda_m = self.rho.lambda_m();
        let nb = self.betas.len();
        let n = self.quad.n_upsilon;
        let mut out = MuAtR {
            mu1: vec![0.0; nb],
            mu2: vec![0.0; nb],
            tail: vec![0.0; nb],
            upsilon_max: 0.0,
            clamped: 0,
        };
        let beta_max = self.betas.iter().copied().fold(0.0, f64::max);
        // Tail truncation is sized against the smaller of the two penalties
        // at the largest threshold, where the relative tail is largest, so a
        // single `v` grid serves every threshold and both kinds.
        let mut probe_mu2 = 0.0;
        let thetas = self.theta_nodes(phi, fold);
        let mut far_start = Vec::with_capacity(thetas.len());

        for &(t, wt) in &thetas {
            let cos = t.cos();
            let a = self.quad.exclusion.lower(r, cos);
            let lo = d.max(a);
            let hi = (2.0 * d).max(a);
            if d > 0.0 && hi > lo {
                trapezoid(lo, hi, n, |v, w| {
                    self.accumulate(r, v, cos, w * wt, &mut out.mu1, &mut out.clamped)
                });
            }
            let span = 2.0 * (r + d);
            trapezoid(hi, hi + span, n, |v, w| {
                self.accumulate(r, v, cos, w * wt, &mut out.mu2, &mut out.clamped);
                let r2x = (v * v + r * r - 2.0 * r * v * cos).max(R2_EPS);
                let x = beta_max * ratio_power(r * r, r2x, self.alpha);
                probe_mu2 += w * wt * v * lambda_m * lambda_m * BoundKind::Proposition1.penalty(x);
            });
            far_start.push(hi + span);
        }
        probe_mu2 /= lambda_m;

        // Beyond v_max the penalty is at most beta (r/v)^alpha, whose
        // integral against lambda_m^2 v dv dtheta / lambda_m is the tail below.
        let alpha = self.alpha;
        let tail_at = |beta: f64, v: f64| {
            2.0 * PI * lambda_m * beta * r.powf(alpha) * v.powf(2.0 - alpha) / (alpha - 2.0)
        };
        let start_max = far_start.iter().copied().fold(0.0, f64::max);
        let upsilon_max = if probe_mu2 > 0.0 {
            let target = self.quad.upsilon_tail_tol * probe_mu2;
            (tail_at(beta_max, 1.0) / target).powf(1.0 / (alpha - 2.0))
        } else {
            start_max
        };
        out.upsilon_max = upsilon_max;

        let rho_tail = lambda_m * lambda_m;
        for (&(t, wt), &start) in thetas.iter().zip(&far_start) {
            if start >= upsilon_max {
                continue;
            }
            let cos = t.cos();
            trapezoid(start.ln(), upsilon_max.ln(), n, |s, w| {
                let v = s.exp();
                // dv = v ds
                let r2x = v * v + r * r - 2.0 * r * v * cos;
                let q = ratio_power(r * r, r2x.max(R2_EPS), alpha);
                let base = w * wt * rho_tail * v * v;
                for (m, &beta) in out.mu2.iter_mut().zip(self.betas) {
                    *m += base * self.kind.penalty(beta * q);
                }
            });
        }

        for k in 0..nb {
            out.mu1[k] /= lambda_m;
            out.mu2[k] /= lambda_m;
            out.tail[k] = tail_at(self.betas[k], upsilon_max);
        }
        out
    }
}

/// `(mu1, mu2)` at user distance `r` and angle `phi`, integrating `theta`
/// over a full period.
pub fn mu_integrals(
    kind: BoundKind,
    r: f64,
    phi: f64,
    beta: f64,
    ch: &ChannelParams,
    params: MhcParams,
    quad: &QuadConfig,
) -> Result<(f64, f64)> {
    quad.validate()?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be > 0, got {r}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::param("beta", format!("must be >= 0, got {beta}")));
    }
    if !(ch.alpha() > 2.0) {
        return Err(Error::param(
            "alpha",
            "the interference integral diverges for alpha <= 2",
        ));
    }
    let betas = [beta];
    let integrand = Integrand {
        kind,
        alpha: ch.alpha(),
        betas: &betas,
        rho: SecondOrderDensity::new(params),
        quad: *quad,
    };
    let mu = integrand.mu(r, phi, false);
    Ok((mu.mu1[0], mu.mu2[0]))
}

/// A bound curve with its quadrature diagnostics.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub curve: CoverageCurve,
    pub kind: BoundKind,
    pub quad: QuadConfig,
    pub r_max: f64,
    /// Largest `tail / mu2` over every evaluated `(r, beta)`.
    pub max_tail_ratio: f64,
    /// Range of the `v` truncation point over `r`.
    pub upsilon_max: (f64, f64),
    /// Quadrature nodes whose `R^2` had to be clamped to [`R2_EPS`].
    pub clamped: usize,
}

/// Lower bound on MHC coverage at each threshold in `beta_db`.
pub fn coverage_bound(
    kind: BoundKind,
    ch: &ChannelParams,
    params: MhcParams,
    beta_db: &[f64],
    quad: &QuadConfig,
) -> Result<CoverageCurve> {
    Ok(coverage_bound_detailed(kind, ch, params, beta_db, quad)?.curve)
}

pub fn coverage_bound_detailed(
    kind: BoundKind,
    ch: &ChannelParams,
    params: MhcParams,
    beta_db: &[f64],
    quad: &QuadConfig,
) -> Result<BoundReport> {
    quad.validate()?;
    if beta_db.is_empty() || beta_db.iter().any(|b| !b.is_finite()) {
        return Err(Error::param(
            "beta_db",
            "thresholds must be finite and nonempty",
        ));
    }
    let betas: Vec<f64> = beta_db.iter().map(|&b| db_to_linear(b)).collect();
    let rho = SecondOrderDensity::new(params);
    let lambda_m = rho.lambda_m();
    let r_max = quad.r_max_for(lambda_m);
    let integrand = Integrand {
        kind,
        alpha: ch.alpha(),
        betas: &betas,
        rho,
        quad: *quad,
    };
    let noise = ch.gamma() * ch.sigma2();
    let alpha = ch.alpha();

    // r = r_max s^2 with a uniform trapezoid grid in s; the s = 0 node
    // carries zero weight since f(0) = 0.
    let ns = quad.n_r;
    let hs = 1.0 / (ns - 1) as f64;
    let per_r: Vec<(Vec<f64>, MuAtR)> = (1..ns)
        .into_par_iter()
        .map(|i| {
            let s = hs * i as f64;
            let r = r_max * s * s;
            let ws = if i == ns - 1 { 0.5 * hs } else { hs };
            let jac = 2.0 * r_max * s;
            let mu = integrand.mu(r, 0.0, true);
            let base = ws * jac * empty_space_pdf(r, lambda_m);
            let ra = r.powf(alpha);
            let vals = betas
                .iter()
                .enumerate()
                .map(|(k, &beta)| base * (-noise * beta * ra - mu.mu1[k] - mu.mu2[k]).exp())
                .collect();
            (vals, mu)
        })
        .collect();

    let mut p_c = vec![0.0; betas.len()];
    let mut max_tail_ratio: f64 = 0.0;
    let mut clamped = 0;
    let mut vmax = (f64::INFINITY, 0.0f64);
    for (vals, mu) in &per_r {
        for (p, v) in p_c.iter_mut().zip(vals) {
            *p += v;
        }
        for (t, m) in mu.tail.iter().zip(&mu.mu2) {
            if *m > 0.0 {
                max_tail_ratio = max_tail_ratio.max(t / m);
            }
        }
        clamped += mu.clamped;
        vmax = (vmax.0.min(mu.upsilon_max), vmax.1.max(mu.upsilon_max));
    }
    // The exact integrand never exceeds the empty-space density, so values
    // above 1 are pure quadrature error.
    for p in &mut p_c {
        *p = p.clamp(0.0, 1.0);
    }
    Ok(BoundReport {
        curve: CoverageCurve::new(beta_db.to_vec(), p_c, None, kind.to_string())?,
        kind,
        quad: *quad,
        r_max,
        max_tail_ratio,
        upsilon_max: vmax,
        clamped,
    })
}

/// Monte Carlo estimates of both sides of
/// `E[prod (1 - Delta_x)] >= exp(-E[sum Delta_x])` under the Palm distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conjecture1Report {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_std_err: f64,
    pub rhs_std_err: f64,
    /// Standard error of `lhs - rhs`, accounting for both sides being
    /// estimated from the same realizations (much smaller than
    /// [`Conjecture1Report::combined_std_err`]).
    pub diff_std_err: f64,
    pub realizations: usize,
}

impl Conjecture1Report {
    /// `(lhs - rhs) / diff_std_err`.
    pub fn z_score(&self) -> f64 {
        (self.lhs - self.rhs) / self.diff_std_err
    }

    /// `sqrt(lhs_std_err^2 + rhs_std_err^2)`, ignoring the correlation
    /// between the two sides.
    pub fn combined_std_err(&self) -> f64 {
        self.lhs_std_err.hypot(self.rhs_std_err)
    }
}

/// Estimates both sides of the product/exponential inequality for
/// `Delta_x = beta q_x / (1 + beta q_x)`.
///
/// Each realization is an MHC sample on a torus. One retained point is
/// picked uniformly as the typical point and the user is placed at
/// distance `r` from it in a uniform direction; every other retained point
/// contributes a `Delta_x`. Averages are weighted by the realization's point
/// count, which turns the uniform pick into the Palm distribution of the
/// stationary process on the torus.
///
/// For a Poisson process both sides agree exactly. For hardcore processes
/// the sum of penalties fluctuates less than under Poisson, and the
/// left-hand side can fall below the right; use [`Conjecture1Report::z_score`]
/// rather than assuming the inequality.
pub fn conjecture1_check(
    params: MhcParams,
    ch: &ChannelParams,
    beta: f64,
    r: f64,
    n_realizations: usize,
    seed: u64,
) -> Result<Conjecture1Report> {
    if n_realizations < 100 {
        return Err(Error::param(
            "n_realizations",
            format!("need at least 100, got {n_realizations}"),
        ));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::param("beta", format!("must be >= 0, got {beta}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("must be > 0, got {r}")));
    }
    let lambda_m = SecondOrderDensity::new(params).lambda_m();
    let window = validation_window(lambda_m, 10.0 * r)?;
    let alpha = ch.alpha();

    let samples: Vec<(f64, f64, f64)> = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let (parents, _, kept) = thin(&mut rng, params, &window)?;
            if kept.is_empty() {
                return Ok((0.0, 0.0, 0.0));
            }
            let serving_idx = kept[rng.random_range(0..kept.len())];
            let serving = parents[serving_idx];
            let phi = 2.0 * PI * rng.random::<f64>();
            let user = Point::new(
                (serving.x + r * phi.cos()).rem_euclid(window.width()),
                (serving.y + r * phi.sin()).rem_euclid(window.height()),
            );
            let (mut prod, mut sum) = (1.0, 0.0);
            for &k in &kept {
                if k == serving_idx {
                    continue;
                }
                let r2x = window.dist2(user, parents[k]);
                let bq = beta * ratio_power(r * r, r2x.max(R2_EPS), alpha);
                prod /= 1.0 + bq;
                sum += bq / (1.0 + bq);
            }
            Ok((kept.len() as f64, prod, sum))
        })
        .collect::<Result<_>>()?;

    let total: f64 = samples.iter().map(|s| s.0).sum();
    if total == 0.0 {
        return Err(Error::Data("every realization was empty".into()));
    }
    let lhs = samples.iter().map(|s| s.0 * s.1).sum::<f64>() / total;
    let mean_sum = samples.iter().map(|s| s.0 * s.2).sum::<f64>() / total;
    let rhs = (-mean_sum).exp();
    // Linearized variances of the count-weighted ratio estimators.
    let ratio_se = |f: &dyn Fn(&(f64, f64, f64)) -> f64| {
        (samples.iter().map(|s| f(s).powi(2)).sum::<f64>()).sqrt() / total
    };
    let lhs_std_err = ratio_se(&|s| s.0 * (s.1 - lhs));
    let rhs_std_err = rhs * ratio_se(&|s| s.0 * (s.2 - mean_sum));
    let diff_std_err = ratio_se(&|s| s.0 * ((s.1 - lhs) + rhs * (s.2 - mean_sum)));
    Ok(Conjecture1Report {
        lhs,
        rhs,
        lhs_std_err,
        rhs_std_err,
        diff_std_err,
        realizations: n_realizations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn channel(sigma2: f64) -> ChannelParams {
        ChannelParams::new(4.0, 1.0, sigma2).unwrap()
    }

    /// `sqrt(b) (pi/2 - atan(1/sqrt(b)))`: the Poisson interference integral
    /// for `alpha = 4` with exclusion at the serving distance.
    fn ppp_rho(beta: f64) -> f64 {
        beta.sqrt() * (0.5 * PI - (1.0 / beta.sqrt()).atan())
    }

    /// Exact Poisson coverage, `∫ pi lambda exp(-pi lambda u (1 + rho) - beta sigma2 u^2) du`.
    fn ppp_coverage(lambda: f64, beta: f64, sigma2: f64) -> f64 {
        let a = PI * lambda * (1.0 + ppp_rho(beta));
        let n = 200_000;
        let u_max = 40.0 / a;
        let mut total = 0.0;
        trapezoid(0.0, u_max, n, |u, w| {
            total += w * PI * lambda * (-a * u - beta * sigma2 * u * u).exp()
        });
        total
    }

    #[test]
    fn delta_worked_example() {
        let t = delta(BoundKind::Theorem1, 1.0, 2.0, PI / 2.0, 1.0, 4.0).unwrap();
        let p = delta(BoundKind::Proposition1, 1.0, 2.0, PI / 2.0, 1.0, 4.0).unwrap();
        assert!((t - 1.04f64.ln()).abs() < 1e-12);
        assert!((t - 0.03922).abs() < 5e-6);
        assert!((p - 1.0 / 26.0).abs() < 1e-12);
        assert!(p <= t);
    }

    #[test]
    fn delta_limits_and_errors() {
        for kind in BoundKind::ALL {
            assert_eq!(delta(kind, 0.7, 1.3, 0.4, 0.0, 4.0).unwrap(), 0.0);
            assert!(delta(kind, 0.7, 1e6, 0.4, 10.0, 4.0).unwrap() < 1e-20);
            assert!(delta(kind, 0.0, 1.0, 0.0, 1.0, 4.0).is_err());
            assert!(delta(kind, 1.0, 0.0, 0.0, 1.0, 4.0).is_err());
            assert!(delta(kind, 1.0, 1.0, 0.0, 1.0, 2.0).is_err());
            // Interferer exactly on the user: clamped, finite.
            assert!(delta(kind, 1.0, 1.0, 0.0, 1.0, 4.0).unwrap().is_finite());
        }
    }

    proptest! {
        #[test]
        fn proposition_penalty_never_exceeds_jensen(
            r in 0.01f64..5.0,
            v in 0.01f64..20.0,
            t in 0.0f64..(2.0 * PI),
            beta_db in -20.0f64..40.0,
            alpha in 2.1f64..6.0,
        ) {
            let beta = db_to_linear(beta_db);
            let th = delta(BoundKind::Theorem1, r, v, t, beta, alpha).unwrap();
            let pr = delta(BoundKind::Proposition1, r, v, t, beta, alpha).unwrap();
            prop_assert!(pr >= 0.0);
            prop_assert!(pr <= th);
        }
    }

    #[test]
    fn quad_config_validation_and_parsing() {
        assert!(QuadConfig::default().validate().is_ok());
        let bad = [
            QuadConfig {
                n_r: 15,
                ..Default::default()
            },
            QuadConfig {
                n_theta: 4,
                ..Default::default()
            },
            QuadConfig {
                n_upsilon: 0,
                ..Default::default()
            },
            QuadConfig {
                r_max: Some(0.0),
                ..Default::default()
            },
            QuadConfig {
                upsilon_tail_tol: 1.0,
                ..Default::default()
            },
        ];
        for q in bad {
            assert!(q.validate().is_err(), "{q:?}");
        }
        assert_eq!(QuadConfig::default().scaled(2).n_theta, 512);
        assert_eq!(
            "theorem1".parse::<BoundKind>().unwrap(),
            BoundKind::Theorem1
        );
        assert!("jensen".parse::<BoundKind>().is_err());
        assert_eq!(
            "symmetric".parse::<Exclusion>().unwrap(),
            Exclusion::Symmetric
        );
        assert_eq!(Exclusion::default().to_string(), "geometric");
    }

    #[test]
    fn mu_vanishes_without_threshold() {
        let params = MhcParams::new(2.0, 0.4).unwrap();
        for kind in BoundKind::ALL {
            let (m1, m2) = mu_integrals(
                kind,
                0.3,
                0.0,
                0.0,
                &channel(0.1),
                params,
                &QuadConfig::default(),
            )
            .unwrap();
            assert_eq!((m1, m2), (0.0, 0.0));
        }
    }

    #[test]
    fn mu_reduces_to_poisson_campbell_integral() {
        let params = MhcParams::new(1.5, 0.0).unwrap();
        let q = QuadConfig::default();
        for (r, beta) in [(0.2, 1.0), (0.6, 10.0), (1.1, 0.1)] {
            let (m1, m2) = mu_integrals(
                BoundKind::Proposition1,
                r,
                0.0,
                beta,
                &channel(0.0),
                params,
                &q,
            )
            .unwrap();
            assert_eq!(m1, 0.0);
            let exact = PI * 1.5 * r * r * ppp_rho(beta);
            assert!(
                (m2 - exact).abs() < 1e-3 * exact,
                "r={r} beta={beta}: {m2} vs {exact}"
            );
        }
    }

    #[test]
    fn mu_is_invariant_to_user_angle() {
        let params = MhcParams::new(3.0, 0.5).unwrap();
        let q = QuadConfig::default();
        for kind in BoundKind::ALL {
            for r in [0.1, 0.3, 0.7] {
                let a = mu_integrals(kind, r, 0.0, 10.0, &channel(0.1), params, &q).unwrap();
                let b = mu_integrals(kind, r, PI / 3.0, 10.0, &channel(0.1), params, &q).unwrap();
                let (sa, sb) = (a.0 + a.1, b.0 + b.1);
                assert!((sa - sb).abs() < 2e-3 * sa, "{kind} r={r}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn folded_theta_grid_matches_full_period() {
        let params = MhcParams::new(2.0, 0.4).unwrap();
        let betas = [0.5, 3.0];
        let integrand = Integrand {
            kind: BoundKind::Theorem1,
            alpha: 4.0,
            betas: &betas,
            rho: SecondOrderDensity::new(params),
            quad: QuadConfig {
                n_theta: 64,
                ..Default::default()
            },
        };
        for r in [0.05, 0.35, 0.9] {
            let full = integrand.mu(r, 0.0, false);
            let fold = integrand.mu(r, 0.0, true);
            for k in 0..2 {
                let (a, b) = (full.mu1[k] + full.mu2[k], fold.mu1[k] + fold.mu2[k]);
                assert!((a - b).abs() < 1e-12 * a, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn poisson_limit_matches_closed_form() {
        let params = MhcParams::new(3.0, 0.0).unwrap();
        let beta_db = [-10.0, 0.0, 10.0, 20.0];
        let curve = coverage_bound(
            BoundKind::Proposition1,
            &channel(0.1),
            params,
            &beta_db,
            &QuadConfig::default(),
        )
        .unwrap();
        for (&b, &p) in beta_db.iter().zip(curve.p_c()) {
            let exact = ppp_coverage(3.0, db_to_linear(b), 0.1);
            assert!((p - exact).abs() < 1e-3, "{b} dB: {p} vs {exact}");
        }
    }

    #[test]
    fn bound_limits_and_ordering() {
        let params = MhcParams::new(2.0, 0.4).unwrap();
        let q = QuadConfig {
            n_r: 48,
            n_theta: 64,
            n_upsilon: 48,
            ..Default::default()
        };
        let low = coverage_bound(BoundKind::Theorem1, &channel(0.0), params, &[-60.0], &q).unwrap();
        assert!(low.p_c()[0] > 0.999, "{:?}", low.p_c());

        let beta_db: Vec<f64> = (-10..=30).step_by(5).map(f64::from).collect();
        let report =
            coverage_bound_detailed(BoundKind::Theorem1, &channel(0.1), params, &beta_db, &q)
                .unwrap();
        let th = report.curve;
        let pr =
            coverage_bound(BoundKind::Proposition1, &channel(0.1), params, &beta_db, &q).unwrap();
        assert_eq!(th.label(), "theorem1");
        assert_eq!(pr.label(), "proposition1");
        assert!(th.std_err().is_none());
        for (a, b) in th.p_c().iter().zip(pr.p_c()) {
            assert!(a <= b);
        }
        assert!(th.p_c().windows(2).all(|w| w[1] <= w[0]));
        assert!(report.max_tail_ratio <= q.upsilon_tail_tol);
        assert_eq!(report.clamped, 0);
    }

    #[test]
    fn symmetric_exclusion_is_looser() {
        let params = MhcParams::new(3.0, 0.5).unwrap();
        let q = QuadConfig {
            n_r: 48,
            n_theta: 64,
            n_upsilon: 48,
            ..Default::default()
        };
        let sym = QuadConfig {
            exclusion: Exclusion::Symmetric,
            ..q
        };
        let a = coverage_bound(
            BoundKind::Proposition1,
            &channel(0.1),
            params,
            &[0.0, 10.0],
            &q,
        )
        .unwrap();
        let b = coverage_bound(
            BoundKind::Proposition1,
            &channel(0.1),
            params,
            &[0.0, 10.0],
            &sym,
        )
        .unwrap();
        assert!(a.p_c().iter().zip(b.p_c()).all(|(x, y)| x < y));
    }

    #[test]
    fn conjecture_check_basics() {
        let params = MhcParams::new(1.0, 0.3).unwrap();
        assert!(conjecture1_check(params, &channel(0.1), 1.0, 0.3, 99, 1).is_err());
        let zero = conjecture1_check(params, &channel(0.1), 0.0, 0.3, 100, 1).unwrap();
        assert_eq!((zero.lhs, zero.rhs), (1.0, 1.0));
        let a = conjecture1_check(params, &channel(0.1), 1.0, 0.3, 200, 4).unwrap();
        let b = conjecture1_check(params, &channel(0.1), 1.0, 0.3, 200, 4).unwrap();
        assert_eq!(a, b);
        assert!(a.lhs > 0.0 && a.lhs < 1.0 && a.rhs > 0.0 && a.rhs < 1.0);
        assert!(a.diff_std_err > 0.0);
    }
}
