use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::{AlgebraElement, Multiplier};

/// Uniform lattice point in the box `[−radius, radius]^rank`.
pub fn random_point<R: Rng>(rng: &mut R, rank: usize, radius: i64) -> Vec<i64> {
    (0..rank).map(|_| rng.gen_range(-radius..=radius)).collect()
}

/// Block with real and imaginary parts uniform in `[−1, 1]`.
pub fn random_block<R: Rng>(rng: &mut R, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
    })
}

/// Element with at most `support` points drawn from the box of the given radius.
pub fn random_element<R: Rng>(
    rng: &mut R,
    multiplier: &Multiplier,
    fiber_dim: usize,
    support: usize,
    radius: i64,
) -> AlgebraElement {
    let blocks: Vec<(Vec<i64>, DMatrix<Complex64>)> = (0..support)
        .map(|_| {
            (
                random_point(rng, multiplier.rank(), radius),
                random_block(rng, fiber_dim),
            )
        })
        .collect();
    AlgebraElement::from_blocks(multiplier.clone(), fiber_dim, blocks)
        .expect("sampled blocks have matching shapes")
}
