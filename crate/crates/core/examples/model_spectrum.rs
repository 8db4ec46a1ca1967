//! Levels and gaps of a two-well model operator, with the finite-difference
//! check of one well.

use nalgebra::{dmatrix, DMatrix};
use num_complex::Complex64;
use semigap::model_operator::{
    counting_function, model_gaps, model_levels, mu_invariance_check, well_frequencies, FdOptions,
    WellSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let anisotropic = WellSpec::new(
        dmatrix![1.0, 0.0; 0.0, 1.0],
        dmatrix![1.0, 0.0; 0.0, 4.0],
        DMatrix::zeros(1, 1),
    )?;
    let spin =
        DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.5]).map(|x| Complex64::new(x, 0.0));
    let tilted = WellSpec::new(
        dmatrix![2.0, 0.3; 0.3, 1.0],
        dmatrix![1.0, 0.0; 0.0, 1.0],
        spin,
    )?;
    let wells = [anisotropic, tilted];
    for (i, w) in wells.iter().enumerate() {
        println!("well {i}: frequencies {:?}", well_frequencies(w)?);
    }

    let spectrum = model_levels(&wells, 8.0)?;
    for l in &spectrum.levels {
        println!("level {:>9.5} × {}", l.value, l.multiplicity);
    }
    for g in model_gaps(&spectrum)? {
        println!(
            "gap ({:.5}, {:.5}) with {} states below",
            g.a,
            g.b,
            counting_function(&spectrum, g.midpoint())?
        );
    }

    let report = mu_invariance_check(
        &wells[0],
        &[0.5, 1.0, 2.0],
        &FdOptions::two_dimensional(),
        2e-3,
    )?;
    println!("closed form {:?}", report.closed_form);
    for row in &report.rows {
        println!(
            "μ = {}: deviation from closed form {:.2e}, from μ = 1 {:.2e}",
            row.mu, row.max_deviation_from_closed_form, row.max_deviation_from_unit_coupling
        );
    }
    Ok(())
}
