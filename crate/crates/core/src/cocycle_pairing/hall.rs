use num_complex::Complex64;

use super::cyclic::CyclicCocycle;
use super::group::SymplecticData;
use super::PairingError;
use crate::twisted_algebra::AlgebraElement;

/// The Hall cocycle `tr_K = Σⱼ c_{j,j+g}` with
/// `c_{j,k}(T₀,T₁,T₂) = Tr_Γ(T₀ (δⱼT₁ δ_kT₂ − δ_kT₁ δⱼT₂))`.
///
/// The derivation `δⱼ = i[Ωⱼ, ·]` acts on finitely supported elements by
/// the position-difference weight `(δⱼT)(γ) = i ξⱼ(γ) T(γ)`.
pub struct HallCocycle {
    xi: SymplecticData,
}

pub fn hall_cocycle(xi: &SymplecticData) -> Result<HallCocycle, PairingError> {
    if xi.genus_dim() % 2 != 0 {
        return Err(PairingError::OddGenus(xi.genus_dim()));
    }
    Ok(HallCocycle { xi: xi.clone() })
}

impl HallCocycle {
    pub fn symplectic_data(&self) -> &SymplecticData {
        &self.xi
    }

    /// `δⱼ(T)`.
    pub fn derivation(&self, j: usize, t: &AlgebraElement) -> AlgebraElement {
        let blocks = t.blocks().iter().map(|(g, b)| {
            let w = Complex64::new(0.0, self.xi.component(j, g));
            (g.clone(), b * w)
        });
        AlgebraElement::from_blocks(t.multiplier().clone(), t.fiber_dim(), blocks)
            .expect("derivation preserves shape")
    }

    pub fn component(
        &self,
        j: usize,
        k: usize,
        t0: &AlgebraElement,
        t1: &AlgebraElement,
        t2: &AlgebraElement,
    ) -> Result<Complex64, PairingError> {
        let a = self.derivation(j, t1).convolve(&self.derivation(k, t2))?;
        let b = self.derivation(k, t1).convolve(&self.derivation(j, t2))?;
        Ok(t0.convolve(&a.sub(&b)?)?.trace())
    }
}

impl CyclicCocycle for HallCocycle {
    fn degree(&self) -> usize {
        2
    }

    fn eval(&self, args: &[&AlgebraElement]) -> Result<Complex64, PairingError> {
        if args.len() != 3 {
            return Err(PairingError::Arity {
                expected: 3,
                found: args.len(),
            });
        }
        if args[0].rank() != self.xi.rank() {
            return Err(PairingError::Shape(format!(
                "ξ is defined on ℤ^{} but elements live over ℤ^{}",
                self.xi.rank(),
                args[0].rank()
            )));
        }
        let g = self.xi.genus();
        let mut total = Complex64::default();
        for j in 0..g {
            total += self.component(j, j + g, args[0], args[1], args[2])?;
        }
        Ok(total)
    }
}
