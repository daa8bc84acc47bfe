//! Fits hardcore parameters to a deployment file. No real deployment ships
//! with the crate, so this builds a synthetic one: a hexagonal-ish lattice
//! with random site displacements and dropped sites, written to a temporary
//! CSV and loaded back like user data.
//!
//! ```text
//! cargo run --release --example fit_deployment [deployment.csv]
//! ```

use rand::Rng;
use stochgeo::coverage::{fit_mhc, simulate_coverage, ChannelParams, Deployment};
use stochgeo::process::{load_deployment, AffineOverride};
use stochgeo::rng::stream_rng;
use stochgeo::{MhcParams, Window};

fn synthetic_deployment(width: f64, height: f64, spacing: f64) -> String {
    let mut rng = stream_rng(2024, 0);
    let mut out = String::from("# synthetic perturbed lattice\nx_km,y_km\n");
    let row_height = spacing * 0.866;
    let rows = (height / row_height) as usize;
    let cols = (width / spacing) as usize;
    for j in 0..rows {
        for i in 0..cols {
            if rng.random::<f64>() < 0.15 {
                continue;
            }
            let shift = if j % 2 == 1 { 0.5 * spacing } else { 0.0 };
            let x = (i as f64 + 0.25) * spacing + shift + rng.random_range(-0.3..0.3) * spacing;
            let y = (j as f64 + 0.5) * row_height + rng.random_range(-0.3..0.3) * spacing;
            if (0.0..width).contains(&x) && (0.0..height).contains(&y) {
                out.push_str(&format!("{x},{y}\n"));
            }
        }
    }
    out
}

fn main() -> stochgeo::Result<()> {
    let (width, height) = (30.0, 24.0);
    let path = match std::env::args().nth(1) {
        Some(p) => std::path::PathBuf::from(p),
        None => {
            let p = std::env::temp_dir().join("stochgeo_synthetic_deployment.csv");
            std::fs::write(&p, synthetic_deployment(width, height, 0.9))
                .map_err(|e| stochgeo::Error::Data(e.to_string()))?;
            p
        }
    };
    let window = Window::fixed_deployment(width, height)?;
    let loaded = load_deployment(&path, window, AffineOverride::default())?;
    println!("{} ({})", loaded.report(), path.display());

    let ch = ChannelParams::new(4.0, 1.0, 0.1)?;
    let beta_db: Vec<f64> = (-10..=20).step_by(2).map(f64::from).collect();
    let trials = 5_000;
    let target =
        simulate_coverage(&Deployment::Fixed(loaded.points), &ch, &beta_db, trials, 1)?.curve;

    let mut candidates = Vec::new();
    for lambda_p in [1.0, 1.5, 2.0, 2.5, 3.0] {
        for d in [0.0, 0.2, 0.4, 0.6, 0.8] {
            candidates.push(MhcParams::new(lambda_p, d)?);
        }
    }
    let fit = fit_mhc(&target, &candidates, &ch, trials, 2, None)?;
    println!(
        "best lambda_p={} d={} (mean squared error {:.2e})",
        fit.best.lambda_p(),
        fit.best.d(),
        fit.error
    );
    let mut table = fit.table.clone();
    table.sort_by(|a, b| a.error.total_cmp(&b.error));
    for row in table.iter().take(5) {
        println!(
            "  lambda_p={:<4} d={:<4} mse={:.2e}",
            row.params.lambda_p(),
            row.params.d(),
            row.error
        );
    }
    Ok(())
}
