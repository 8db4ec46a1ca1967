use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sample::{random_block, random_element, random_point};
use super::{AlgebraElement, AlgebraError, Multiplier};

/// Size of the random identity suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteOptions {
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default = "default_support")]
    pub max_support: usize,
    #[serde(default = "default_fiber")]
    pub max_fiber: usize,
    /// Coordinates of support points are drawn from `[−radius, radius]`.
    #[serde(default = "default_radius")]
    pub radius: i64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_cases() -> usize {
    1000
}
fn default_support() -> usize {
    6
}
fn default_fiber() -> usize {
    3
}
fn default_radius() -> i64 {
    3
}
fn default_tolerance() -> f64 {
    1e-12
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            cases: default_cases(),
            max_support: default_support(),
            max_fiber: default_fiber(),
            radius: default_radius(),
            tolerance: default_tolerance(),
        }
    }
}

/// Largest defect of every algebraic identity over the random cases.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub pass: bool,
    pub cases: usize,
    pub tolerance: f64,
    pub associativity: f64,
    pub involution_antimultiplicative: f64,
    pub involution_involutive: f64,
    pub delta_relation: f64,
    pub delta_unitarity: f64,
    pub traciality: f64,
    /// Most negative value of `Re Tr_Γ(f* f)`, clamped at zero.
    pub positivity_violation: f64,
    pub identity_unit: f64,
    /// Largest deviation of the untwisted product from a plain double sum; zero means exact.
    pub untwisted_degeneration: f64,
}

fn defect(a: &AlgebraElement, b: &AlgebraElement) -> Result<f64, AlgebraError> {
    Ok(a.sub(b)?.nu_norm(0.0))
}

fn plain_product(f: &AlgebraElement, g: &AlgebraElement) -> BTreeMap<Vec<i64>, DMatrix<Complex64>> {
    let mut out: BTreeMap<Vec<i64>, DMatrix<Complex64>> = BTreeMap::new();
    for (a, x) in f.blocks() {
        for (b, y) in g.blocks() {
            let s: Vec<i64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
            let prod = x * y;
            match out.get_mut(&s) {
                Some(m) => *m += &prod,
                None => {
                    out.insert(s, prod);
                }
            }
        }
    }
    out
}

fn plain_mismatch(f: &AlgebraElement, g: &AlgebraElement) -> Result<f64, AlgebraError> {
    let twisted = f.convolve(g)?;
    let mut worst = 0.0f64;
    for (gamma, block) in plain_product(f, g) {
        let other = twisted
            .block(&gamma)
            .cloned()
            .unwrap_or_else(|| DMatrix::zeros(block.nrows(), block.ncols()));
        worst = worst.max((block - other).iter().fold(0.0f64, |m, z| m.max(z.norm())));
    }
    Ok(worst)
}

/// Runs associativity, involution, δ-relation, traciality and positivity
/// checks on random elements with the given multiplier, plus the comparison
/// of the untwisted product with the plain group algebra.
pub fn identity_suite<R: Rng>(
    multiplier: &Multiplier,
    opts: &SuiteOptions,
    rng: &mut R,
) -> Result<IdentityReport, AlgebraError> {
    if opts.max_support == 0 || opts.max_fiber == 0 {
        return Err(AlgebraError::Shape(
            "suite needs positive support and fiber sizes".into(),
        ));
    }
    let rank = multiplier.rank();
    let trivial = Multiplier::trivial(rank);
    let mut r = IdentityReport {
        pass: false,
        cases: opts.cases,
        tolerance: opts.tolerance,
        associativity: 0.0,
        involution_antimultiplicative: 0.0,
        involution_involutive: 0.0,
        delta_relation: 0.0,
        delta_unitarity: 0.0,
        traciality: 0.0,
        positivity_violation: 0.0,
        identity_unit: 0.0,
        untwisted_degeneration: 0.0,
    };
    for _ in 0..opts.cases {
        let n = rng.gen_range(1..=opts.max_fiber);
        let draw = |rng: &mut R| {
            let s = rng.gen_range(1..=opts.max_support);
            random_element(rng, multiplier, n, s, opts.radius)
        };
        let (f, g, h) = (draw(rng), draw(rng), draw(rng));
        let fg = f.convolve(&g)?;
        r.associativity = r
            .associativity
            .max(defect(&fg.convolve(&h)?, &f.convolve(&g.convolve(&h)?)?)?);
        r.involution_antimultiplicative = r.involution_antimultiplicative.max(defect(
            &fg.involute(),
            &g.involute().convolve(&f.involute())?,
        )?);
        r.involution_involutive = r
            .involution_involutive
            .max(defect(&f.involute().involute(), &f)?);
        r.traciality = r
            .traciality
            .max((fg.trace() - g.convolve(&f)?.trace()).norm());
        r.positivity_violation = r
            .positivity_violation
            .max((-f.involute().convolve(&f)?.trace().re).max(0.0));
        let one = AlgebraElement::identity(multiplier.clone(), n);
        r.identity_unit = r
            .identity_unit
            .max(defect(&one.convolve(&f)?, &f)?)
            .max(defect(&f.convolve(&one)?, &f)?);

        let (a, b) = (
            random_point(rng, rank, opts.radius),
            random_point(rng, rank, opts.radius),
        );
        let block = random_block(rng, 1)[(0, 0)];
        let da = AlgebraElement::scalar_delta(multiplier.clone(), &a, Complex64::new(1.0, 0.0));
        let db = AlgebraElement::scalar_delta(multiplier.clone(), &b, block);
        let ab: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let expected = AlgebraElement::scalar_delta(
            multiplier.clone(),
            &ab,
            block * multiplier.phase(&a, &b).conj(),
        );
        r.delta_relation = r.delta_relation.max(defect(&da.convolve(&db)?, &expected)?);
        let unit = AlgebraElement::identity(multiplier.clone(), 1);
        r.delta_unitarity = r
            .delta_unitarity
            .max(defect(&da.involute().convolve(&da)?, &unit)?);

        let s = rng.gen_range(1..=opts.max_support);
        let p = random_element(rng, &trivial, n, s, opts.radius);
        let q = random_element(rng, &trivial, n, s, opts.radius);
        r.untwisted_degeneration = r.untwisted_degeneration.max(plain_mismatch(&p, &q)?);
    }
    let t = opts.tolerance;
    r.pass = r.associativity < t
        && r.involution_antimultiplicative < t
        && r.involution_involutive < t
        && r.delta_relation < t
        && r.delta_unitarity < t
        && r.traciality < t
        && r.positivity_violation < t
        && r.identity_unit < t
        && r.untwisted_degeneration == 0.0;
    Ok(r)
}
