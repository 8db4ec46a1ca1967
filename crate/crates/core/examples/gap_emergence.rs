//! Bloch bands of `μ(−d²/dx²) + μ⁻¹V` with a periodic single well, compared
//! with the model levels π, 3π, 5π as the coupling decreases.

use semigap::lattice_sim::{gap_emergence_sweep, LatticeConfig, PotentialSpec, TrigTerm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = LatticeConfig::new_1d(128, 0.05);
    cfg.potential = PotentialSpec::Trig {
        constant: 0.625,
        terms: vec![
            TrigTerm {
                amplitude: -2.0 / 3.0,
                frequency: vec![1],
                phase: 0.0,
            },
            TrigTerm {
                amplitude: 1.0 / 24.0,
                frequency: vec![2],
                phase: 0.0,
            },
        ],
    };
    cfg.wells = vec![vec![0.0]];
    cfg.k_points = 16;
    let sweep = gap_emergence_sweep(&cfg, &[0.2, 0.1, 0.05], 17.0)?;
    println!(
        "model levels below the cutoff: {:?}",
        sweep.model_eigenvalues
    );
    for row in &sweep.rows {
        println!("μ = {}: band centres {:?}", row.mu, row.band_centers);
        for g in &row.gaps {
            println!(
                "    gap ({:.4}, {:.4}): IDS {}/{}, model count {}",
                g.a, g.b, g.ids_numerator, g.ids_denominator, g.model_count
            );
        }
    }
    println!("gaps open from μ = {:?}", sweep.threshold_mu);
    Ok(())
}
