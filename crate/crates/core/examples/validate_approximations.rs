//! How well the Poisson-style approximations describe a hardcore process:
//! density, nearest-station distance, pair density, void probability and
//! the product/exponential inequality.
//!
//! ```text
//! cargo run --release --example validate_approximations
//! ```

use stochgeo::analytics::{
    empty_space_quantile, mhc_density, nearest_distance_ks, pair_density_empirical,
    void_probability_empirical, SecondOrderDensity,
};
use stochgeo::bounds::conjecture1_check;
use stochgeo::coverage::ChannelParams;
use stochgeo::MhcParams;

fn main() -> stochgeo::Result<()> {
    println!("nearest-station distance vs 1 - exp(-pi lambda_m r^2), lambda_p = 2");
    for d in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5] {
        let params = MhcParams::new(2.0, d)?;
        let ks = nearest_distance_ks(params, 300, 32, 1)?;
        println!(
            "  d={d:.1} lambda_m={:.4} KS={:.4}",
            mhc_density(params),
            ks.statistic
        );
    }

    let params = MhcParams::new(1.0, 0.5)?;
    let rho = SecondOrderDensity::new(params);
    let ups: Vec<f64> = [0.55, 0.7, 0.85, 0.95, 1.2].to_vec();
    println!("pair density, lambda_p=1 d=0.5");
    for e in pair_density_empirical(params, &ups, 0.01, 300, 2)? {
        println!(
            "  v={:.2} analytic={:.4} empirical={:.4} +- {:.4}",
            e.upsilon,
            rho.eval(e.upsilon),
            e.estimate,
            e.std_error
        );
    }

    let r = empty_space_quantile(0.5, mhc_density(params));
    let void = void_probability_empirical(params, r, 300, 3)?;
    println!(
        "void probability at r={r:.3}: empirical {:.4} +- {:.4}, approximation {:.4}",
        void.probability, void.std_error, void.approximation
    );

    let ch = ChannelParams::new(4.0, 1.0, 0.0)?;
    for d in [1e-3, 0.3] {
        let rep = conjecture1_check(MhcParams::new(1.0, d)?, &ch, 1.0, 0.3, 5_000, 4)?;
        println!(
            "E[prod(1-D)] vs exp(-E[sum D]) at d={d}: {:.4} vs {:.4}, z={:.1}",
            rep.lhs,
            rep.rhs,
            rep.z_score()
        );
    }
    Ok(())
}
