//! Magnetic multiplier at flux 1/3: the δ-relation, a small identity suite and
//! the ν-norms of a random element.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semigap::twisted_algebra::{
    identity_suite, random_element, AlgebraElement, LandauGauge, Multiplier, SuiteOptions,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sigma = Multiplier::magnetic(1, 3, LandauGauge::LandauX)?;
    let (a, b) = ([1, 0], [0, 1]);
    println!("σ(e₁, e₂) = {:.6}", sigma.phase(&a, &b));
    println!("σ(e₂, e₁) = {:.6}", sigma.phase(&b, &a));

    let one = Complex64::new(1.0, 0.0);
    let da = AlgebraElement::scalar_delta(sigma.clone(), &a, one);
    let db = AlgebraElement::scalar_delta(sigma.clone(), &b, one);
    let commutator = da.convolve(&db)?.sub(&db.convolve(&da)?)?;
    println!("‖δ₁δ₂ − δ₂δ₁‖₁ = {:.6}", commutator.nu_norm(0.0));

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = random_element(&mut rng, &sigma, 2, 5, 3);
    println!(
        "ν₀(f) = {:.6}, ν₂(f) = {:.6}",
        f.nu_norm(0.0),
        f.nu_norm(2.0)
    );
    println!("Tr_Γ(f*f) = {:.6}", f.involute().convolve(&f)?.trace().re);

    let opts = SuiteOptions {
        cases: 200,
        ..SuiteOptions::default()
    };
    let report = identity_suite(&sigma, &opts, &mut rng)?;
    println!(
        "identity suite over {} cases: pass = {}, associativity {:.2e}, traciality {:.2e}",
        report.cases, report.pass, report.associativity, report.traciality
    );
    Ok(())
}
