//! Draws one realization of each deployment model on the same window and
//! prints summary statistics, then writes the hardcore sample as CSV.
//!
//! ```text
//! cargo run --example sample_realization [output.csv]
//! ```

use stochgeo::analytics::{mhc_density, retention_probability};
use stochgeo::process::{generate_grid, sample_mhc_detailed, sample_ppp};
use stochgeo::{MhcParams, Window};

fn main() -> stochgeo::Result<()> {
    let params = MhcParams::new(2.0, 0.4)?;
    let window = Window::torus(20.0, 20.0)?;
    let seed = 7;

    let ppp = sample_ppp(params.lambda_p(), window, seed)?;
    let mhc = sample_mhc_detailed(params, window, seed)?;
    let (grid, layout) = generate_grid(24, Window::fixed_deployment(100.0, 80.0)?)?;

    println!("window 20x20 km torus, seed {seed}");
    println!(
        "ppp   lambda=2        points={:4} density={:.4}",
        ppp.len(),
        ppp.density()
    );
    println!(
        "mhc   lambda_p=2 d=0.4 parents={:4} kept={:4} density={:.4} (expected {:.4}, retention {:.4})",
        mhc.parents.len(),
        mhc.retained.len(),
        mhc.retained.density(),
        mhc_density(params),
        retention_probability(params)
    );
    println!(
        "      closest pair {:.4} km",
        mhc.retained.min_pairwise_distance().unwrap_or(f64::NAN)
    );
    println!(
        "grid  24 points on 100x80 km: {}x{} lattice, spacing {:.2}x{:.2} km",
        layout.columns, layout.rows, layout.spacing_x, layout.spacing_y
    );
    for p in grid.points().iter().take(3) {
        println!("      ({:.3}, {:.3})", p.x, p.y);
    }

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, mhc.retained.to_csv())
            .map_err(|e| stochgeo::Error::Data(e.to_string()))?;
        println!("wrote {path}");
    }
    Ok(())
}
