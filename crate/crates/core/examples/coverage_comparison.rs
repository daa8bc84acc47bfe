//! Coverage of a Poisson deployment, a hardcore deployment and a square
//! lattice at the same density, for an interference-limited channel with
//! Rayleigh fading.
//!
//! ```text
//! cargo run --release --example coverage_comparison [trials]
//! ```

use stochgeo::analytics::mhc_density;
use stochgeo::cli::matched_grid;
use stochgeo::coverage::{simulate_coverage, ChannelParams, Deployment};
use stochgeo::{MhcParams, Window};

fn main() -> stochgeo::Result<()> {
    let trials: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_000);
    let params = MhcParams::new(2.0, 0.4)?;
    let lambda_m = mhc_density(params);
    let ch = ChannelParams::new(4.0, 1.0, 0.1)?;
    let beta_db: Vec<f64> = (-10..=20).step_by(2).map(f64::from).collect();

    let deployments = [
        Deployment::Ppp {
            lambda: lambda_m,
            window: Window::auto_torus(lambda_m)?,
        },
        Deployment::Mhc {
            params,
            window: Window::auto_torus(lambda_m)?,
        },
        Deployment::Fixed(matched_grid(24, lambda_m)?),
    ];
    let curves = deployments
        .iter()
        .enumerate()
        .map(|(i, dep)| Ok(simulate_coverage(dep, &ch, &beta_db, trials, 1 + i as u64)?.curve))
        .collect::<stochgeo::Result<Vec<_>>>()?;

    println!("density {lambda_m:.4} per km^2, {trials} trials per curve");
    println!("{:>7} {:>8} {:>8} {:>8}", "beta_dB", "ppp", "mhc", "grid");
    for (i, b) in beta_db.iter().enumerate() {
        println!(
            "{b:>7} {:>8.4} {:>8.4} {:>8.4}",
            curves[0].p_c()[i],
            curves[1].p_c()[i],
            curves[2].p_c()[i]
        );
    }
    Ok(())
}
