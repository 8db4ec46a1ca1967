//! Flat-mode gap certificates for the first gap `(π, 3π)` of a one-dimensional
//! well over a logarithmic coupling sweep.

use std::f64::consts::PI;

use semigap::gap_certificate::{
    certificate_sweep, log_spaced, loglog_slope, optimal_kappa, CertificateProblem, CutoffProfile,
    EstimatorMode, GapInterval,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = CertificateProblem {
        metric_bound: [1.0, 1.0],
        morse_constant: 4.0,
        spectral_bottom: [0.0, 0.0],
        mode: EstimatorMode::Flat,
    };
    let kappa = 0.1;
    let gap = GapInterval::new(PI, 3.0 * PI)?;
    let sweep = certificate_sweep(
        &problem,
        kappa,
        &CutoffProfile::default(),
        gap,
        &log_spaced(1e-4, 1e-1, 7),
    )?;
    for row in &sweep.rows {
        match (row.certified, row.a2, row.b2) {
            (true, Some(a2), Some(b2)) => {
                println!("μ = {:.1e}: certified ({a2:.5}, {b2:.5})", row.mu)
            }
            _ => println!(
                "μ = {:.1e}: refused, {}",
                row.mu,
                row.reason.clone().unwrap_or_default()
            ),
        }
    }
    let points: Vec<(f64, f64)> = sweep
        .rows
        .iter()
        .filter_map(|r| r.a2.map(|a2| (r.mu, a2 - PI)))
        .collect();
    println!(
        "slope of a₂ − a₁: {:.4} (leading order {:.4})",
        loglog_slope(&points),
        1.0 - 2.0 * kappa
    );
    let (k, s) = optimal_kappa();
    println!("general mode: best κ = {k}, rate μ^{s:.3}");
    Ok(())
}
