//! Both analytic lower bounds against simulated hardcore coverage, with the
//! quadrature diagnostics.
//!
//! ```text
//! cargo run --release --example bounds_vs_simulation [trials]
//! ```

use stochgeo::analytics::mhc_density;
use stochgeo::bounds::{coverage_bound_detailed, BoundKind, QuadConfig};
use stochgeo::coverage::{simulate_coverage, ChannelParams, Deployment};
use stochgeo::{MhcParams, Window};

fn main() -> stochgeo::Result<()> {
    let trials: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20_000);
    let params = MhcParams::new(3.0, 0.5)?;
    let ch = ChannelParams::new(4.0, 1.0, 0.1)?;
    let beta_db: Vec<f64> = (-10..=20).step_by(2).map(f64::from).collect();
    let quad = QuadConfig::default();

    let lambda_m = mhc_density(params);
    let dep = Deployment::Mhc {
        params,
        window: Window::auto_torus(lambda_m)?,
    };
    let sim = simulate_coverage(&dep, &ch, &beta_db, trials, 1)?.curve;
    let reports = BoundKind::ALL
        .iter()
        .map(|&k| coverage_bound_detailed(k, &ch, params, &beta_db, &quad))
        .collect::<stochgeo::Result<Vec<_>>>()?;

    for r in &reports {
        println!(
            "{}: r_max {:.3} km, largest tail/integral {:.1e}",
            r.kind, r.r_max, r.max_tail_ratio
        );
    }
    println!(
        "{:>7} {:>10} {:>9} {:>12}",
        "beta_dB", "simulated", "theorem1", "proposition1"
    );
    for (i, b) in beta_db.iter().enumerate() {
        println!(
            "{b:>7} {:>10.4} {:>9.4} {:>12.4}",
            sim.p_c()[i],
            reports[0].curve.p_c()[i],
            reports[1].curve.p_c()[i]
        );
    }
    for r in &reports {
        let gap: f64 = sim
            .p_c()
            .iter()
            .zip(r.curve.p_c())
            .map(|(s, b)| (s - b).abs())
            .sum::<f64>()
            / beta_db.len() as f64;
        println!(
            "mean gap to {}: {:.2} percentage points",
            r.kind,
            100.0 * gap
        );
    }
    Ok(())
}
