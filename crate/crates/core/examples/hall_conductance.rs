//! Chern numbers of the Harper bands at flux 1/3 by link variables and by the
//! Kubo commutator trace.

use semigap::lattice_sim::{
    gap_midpoint, hall_conductance, subband_cherns, HallOptions, LatticeConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let harper = LatticeConfig::harper(1, 3);
    let opts = HallOptions {
        kubo_grid: 12,
        ..HallOptions::default()
    };
    for gap in 0..2 {
        let lambda = gap_midpoint(&harper, gap)?;
        let r = hall_conductance(&harper, lambda, &opts)?;
        println!(
            "gap {gap} at λ = {lambda:.5}: link variables {:.6}, Kubo {:.6}, agree = {}",
            r.chern_a, r.chern_b, r.agree
        );
    }
    let sub = subband_cherns(&harper, 24)?;
    println!(
        "subband Chern numbers {:?}, sum {:.2e}",
        sub.cherns, sub.sum
    );
    Ok(())
}
