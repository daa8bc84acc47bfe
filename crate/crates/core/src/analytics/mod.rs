//! Closed-form quantities of the Matérn hardcore process and the
//! empty-space approximation built on them.

mod empirical;

use std::f64::consts::PI;

pub(crate) use empirical::validation_window;
pub use empirical::{
    nearest_distance_ks, pair_density_empirical, void_probability_empirical, EliminationRow,
    KsReport, PairDensityEstimate, VoidEstimate,
};

use crate::error::{Error, Result};
use crate::process::MhcParams;

/// `lambda_p * pi * d^2`, the expected number of parent points in a hardcore disc.
fn disc_load(params: MhcParams) -> f64 {
    params.lambda_p() * PI * params.d() * params.d()
}

/// Probability that a parent point survives the thinning:
/// `(1 - exp(-t)) / t` with `t = lambda_p * pi * d^2`, and 1 at `d = 0`.
pub fn retention_probability(params: MhcParams) -> f64 {
    let t = disc_load(params);
    if t == 0.0 {
        1.0
    } else {
        -(-t).exp_m1() / t
    }
}

/// Density of the retained process, `lambda_m = p * lambda_p`.
pub fn mhc_density(params: MhcParams) -> f64 {
    retention_probability(params) * params.lambda_p()
}

/// Area of the union of two radius-`d` discs whose centres are `upsilon` apart.
pub fn union_area(upsilon: f64, d: f64) -> Result<f64> {
    if !(upsilon >= 0.0) {
        return Err(Error::param(
            "upsilon",
            format!("must be >= 0, got {upsilon}"),
        ));
    }
    if !(d >= 0.0) {
        return Err(Error::param("d", format!("must be >= 0, got {d}")));
    }
    Ok(union_area_unchecked(upsilon, d))
}

#[inline]
pub(crate) fn union_area_unchecked(upsilon: f64, d: f64) -> f64 {
    let d2 = d * d;
    if upsilon >= 2.0 * d {
        return 2.0 * PI * d2;
    }
    2.0 * PI * d2 - 2.0 * d2 * (upsilon / (2.0 * d)).acos()
        + upsilon * (d2 - 0.25 * upsilon * upsilon).max(0.0).sqrt()
}

/// Second-order product density of a Matérn type II process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderDensity {
    params: MhcParams,
    lambda_m: f64,
    /// `1 - exp(-lambda_p pi d^2)`
    survive_term: f64,
    disc: f64,
}

impl SecondOrderDensity {
    pub fn new(params: MhcParams) -> Self {
        SecondOrderDensity {
            params,
            lambda_m: mhc_density(params),
            survive_term: -(-disc_load(params)).exp_m1(),
            disc: PI * params.d() * params.d(),
        }
    }

    pub fn params(&self) -> MhcParams {
        self.params
    }

    pub fn lambda_m(&self) -> f64 {
        self.lambda_m
    }

    /// `rho2(upsilon)`: zero below `d`, `lambda_m^2` from `2d` on, and
    /// `[2V(1 - e^{-lambda_p pi d^2}) - 2 pi d^2 (1 - e^{-lambda_p V})] / [pi d^2 V (V - pi d^2)]`
    /// in between, where `V` is [`union_area`].
    #[inline]
    pub fn eval(&self, upsilon: f64) -> f64 {
        let d = self.params.d();
        if upsilon < d {
            0.0
        } else if upsilon >= 2.0 * d {
            self.lambda_m * self.lambda_m
        } else {
            self.eval_mid(union_area_unchecked(upsilon, d))
        }
    }

    /// The `d <= upsilon < 2d` branch as a function of the union area `v`.
    #[inline]
    pub(crate) fn eval_mid(&self, v: f64) -> f64 {
        let a = self.disc;
        let lost = -(-self.params.lambda_p() * v).exp_m1();
        (2.0 * v * self.survive_term - 2.0 * a * lost) / (a * v * (v - a))
    }
}

pub fn second_order_density(upsilon: f64, params: MhcParams) -> Result<f64> {
    if !(upsilon >= 0.0) {
        return Err(Error::param(
            "upsilon",
            format!("must be >= 0, got {upsilon}"),
        ));
    }
    Ok(SecondOrderDensity::new(params).eval(upsilon))
}

/// Approximate density of the distance to the nearest base station,
/// `2 pi lambda_m r exp(-pi lambda_m r^2)`.
#[inline]
pub fn empty_space_pdf(r: f64, lambda_m: f64) -> f64 {
    2.0 * PI * lambda_m * r * (-PI * lambda_m * r * r).exp()
}

/// `1 - exp(-pi lambda_m r^2)`.
#[inline]
pub fn empty_space_cdf(r: f64, lambda_m: f64) -> f64 {
    -(-PI * lambda_m * r * r).exp_m1()
}

/// Inverse of [`empty_space_cdf`] for `q` in `[0, 1)`.
pub fn empty_space_quantile(q: f64, lambda_m: f64) -> f64 {
    (-(-q).ln_1p() / (PI * lambda_m)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(l: f64, d: f64) -> MhcParams {
        MhcParams::new(l, d).unwrap()
    }

    #[test]
    fn retention_values() {
        assert_eq!(retention_probability(p(1.0, 0.0)), 1.0);
        // t = pi/4; value from the closed form evaluated independently in f64.
        let t = PI / 4.0;
        let expect = (1.0 - (-t).exp()) / t;
        assert!((retention_probability(p(1.0, 0.5)) - expect).abs() < 1e-15);
        assert!((retention_probability(p(1.0, 0.5)) - 0.692_721_090_5).abs() < 1e-9);
        assert!(retention_probability(p(1e9, 0.5)) < 1e-8);
    }

    #[test]
    fn density_limits() {
        assert!((mhc_density(p(1.0, 0.5)) - 0.692_721_090_5).abs() < 1e-9);
        assert_eq!(mhc_density(p(2.5, 0.0)), 2.5);
        let sat = 1.0 / (PI * 0.25);
        assert!((mhc_density(p(1e6, 0.5)) - sat).abs() < 1e-9);
        assert!(mhc_density(p(1e6, 0.5)) <= sat);
        assert!(mhc_density(p(20.0, 0.5)) < sat);
    }

    #[test]
    fn union_area_values() {
        assert!((union_area(1.0, 0.5).unwrap() - 2.0 * PI * 0.25).abs() < 1e-15);
        assert!((union_area(0.0, 0.7).unwrap() - PI * 0.49).abs() < 1e-14);
        assert!((union_area(1.0, 1.0).unwrap() - 5.054_815_608_3).abs() < 1e-9);
        assert!(union_area(-0.1, 1.0).is_err());
        assert!(union_area(0.1, -1.0).is_err());
    }

    #[test]
    fn union_area_matches_dart_throwing() {
        // Two unit discs at distance 1 inside [-1, 2] x [-1, 1].
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(99, 0);
        let n = 2_000_000;
        let hits = (0..n)
            .filter(|_| {
                let x = -1.0 + 3.0 * rng.random::<f64>();
                let y = -1.0 + 2.0 * rng.random::<f64>();
                x * x + y * y <= 1.0 || (x - 1.0).powi(2) + y * y <= 1.0
            })
            .count();
        let frac = hits as f64 / n as f64;
        let est = 6.0 * frac;
        let se = 6.0 * (frac * (1.0 - frac) / n as f64).sqrt();
        assert!(
            (est - union_area(1.0, 1.0).unwrap()).abs() < 4.0 * se,
            "{est} ± {se}"
        );
    }

    #[test]
    fn rho2_branches() {
        let params = p(1.0, 0.5);
        let lm = mhc_density(params);
        assert_eq!(second_order_density(0.25, params).unwrap(), 0.0);
        assert_eq!(second_order_density(1.0, params).unwrap(), lm * lm);
        assert_eq!(second_order_density(5.0, params).unwrap(), lm * lm);
        let eps = 1e-8 * 0.5;
        let below = second_order_density(1.0 - eps, params).unwrap();
        assert!(((below - lm * lm) / (lm * lm)).abs() < 1e-6);
        assert!(second_order_density(-1.0, params).is_err());
    }

    #[test]
    fn empty_space_distribution() {
        let lm = mhc_density(p(1.0, 0.5));
        let median = empty_space_quantile(0.5, lm);
        assert!((median - (2f64.ln() / (PI * lm)).sqrt()).abs() < 1e-15);
        assert!((median - 0.5644).abs() < 1e-4);
        assert!((empty_space_cdf(median, lm) - 0.5).abs() < 1e-15);
        assert_eq!(empty_space_cdf(0.0, lm), 0.0);
        // Normalization by the composite trapezoidal rule on [0, 10].
        let n = 20_000;
        let h = 10.0 / n as f64;
        let total: f64 = (0..=n)
            .map(|i| {
                let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                w * empty_space_pdf(i as f64 * h, lm)
            })
            .sum::<f64>()
            * h;
        assert!((total - 1.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn retention_identity(lp in 0.01f64..50.0, d in 0.0f64..3.0) {
            let params = p(lp, d);
            let t = lp * PI * d * d;
            let lhs = retention_probability(params) * t;
            let rhs = -(-t).exp_m1();
            prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs.max(1e-300));
        }

        #[test]
        fn union_area_monotone(d in 0.01f64..5.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let v_lo = union_area(lo * 2.0 * d, d).unwrap();
            let v_hi = union_area(hi * 2.0 * d, d).unwrap();
            prop_assert!(v_lo <= v_hi + 1e-12 * v_hi);
            prop_assert!(v_hi <= 2.0 * PI * d * d * (1.0 + 1e-12));
        }

        #[test]
        fn rho2_nonnegative(lp in 0.05f64..10.0, d in 0.01f64..2.0, u in 0.0f64..3.0) {
            let v = second_order_density(u * d, p(lp, d)).unwrap();
            prop_assert!(v >= 0.0);
            if u < 1.0 { prop_assert_eq!(v, 0.0); }
        }

        #[test]
        fn rho2_continuous_at_two_d(lp in 0.05f64..10.0, d in 0.01f64..2.0) {
            let params = p(lp, d);
            let lm = mhc_density(params);
            let v = second_order_density(2.0 * d - 1e-8 * d, params).unwrap();
            prop_assert!(((v - lm * lm) / (lm * lm)).abs() < 1e-6);
        }

        #[test]
        fn empty_space_cdf_monotone(lm in 0.01f64..10.0, a in 0.0f64..5.0, b in 0.0f64..5.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(empty_space_cdf(lo, lm) <= empty_space_cdf(hi, lm));
            prop_assert!(empty_space_cdf(hi, lm) <= 1.0);
        }
    }
}
