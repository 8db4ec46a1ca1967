//! Pairs the area cocycle with the lowest Harper band at flux 1/3 and compares
//! the result with the link-variable Chern number of the same projection.

use semigap::cocycle_pairing::{
    build_area_cocycle, pair_with_projection_within, projection_defect, SymplecticData,
};
use semigap::lattice_sim::{
    gap_midpoint, link_variable_chern, projection_element, spectral_projection_on_grid,
    LatticeConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let harper = LatticeConfig::harper(1, 3);
    let lambda = gap_midpoint(&harper, 0)?;
    let grid = 64;
    let projection = spectral_projection_on_grid(&harper, lambda, 1e-6, grid)?;
    println!(
        "λ = {lambda:.6}, rank of the band projection = {}",
        projection.rank
    );
    println!(
        "link-variable Chern number: {:.6}",
        link_variable_chern(&projection.frames, grid)
    );

    let area = build_area_cocycle(&SymplecticData::planar())?;
    for radius in [4, 6, 8, 10] {
        let p = projection_element(&projection, 2, radius)?;
        let (idempotency, adjoint) = projection_defect(&p)?;
        let pairing = pair_with_projection_within(&area, &p, 1e-1)?;
        println!(
            "radius {radius:>2}: |p² − p| = {idempotency:.2e}, |p* − p| = {adjoint:.1e}, pairing = {pairing:.6}"
        );
    }
    Ok(())
}
