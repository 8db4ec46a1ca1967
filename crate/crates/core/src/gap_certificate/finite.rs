use nalgebra::DMatrix;
use num_complex::Complex64;

use super::CertificateError;

fn check_localization(
    alpha: f64,
    lambda: f64,
    gamma: f64,
    lambda0: f64,
) -> Result<(), CertificateError> {
    if !(alpha > lambda + gamma) {
        return Err(CertificateError::Invalid(format!(
            "need α > λ + γ, got α = {alpha}, λ + γ = {}",
            lambda + gamma
        )));
    }
    if !(lambda >= lambda0) {
        return Err(CertificateError::Invalid(format!(
            "need λ ≥ λ0, got λ = {lambda}, λ0 = {lambda0}"
        )));
    }
    Ok(())
}

/// Lower bound `(α − λ − γ)/(α − λ₀)` of `‖JE(λ)u‖² / ‖E(λ)u‖²`.
pub fn localization_coefficient(
    alpha: f64,
    lambda: f64,
    gamma: f64,
    lambda0: f64,
) -> Result<f64, CertificateError> {
    check_localization(alpha, lambda, gamma, lambda0)?;
    Ok((alpha - lambda - gamma) / (alpha - lambda0))
}

/// Upper bound `(λ + γ − λ₀)/(α − λ₀)` of `‖J'E(λ)u‖² / ‖E(λ)u‖²`.
pub fn outside_fraction(
    alpha: f64,
    lambda: f64,
    gamma: f64,
    lambda0: f64,
) -> Result<f64, CertificateError> {
    check_localization(alpha, lambda, gamma, lambda0)?;
    Ok((lambda + gamma - lambda0) / (alpha - lambda0))
}

/// Upper bound `λ + γ − λ₀(λ + γ − λ₀)/(α − λ₀)` of `(AJE(λ)u, JE(λ)u)/‖E(λ)u‖²`.
pub fn localized_energy_bound(
    alpha: f64,
    lambda: f64,
    gamma: f64,
    lambda0: f64,
) -> Result<f64, CertificateError> {
    check_localization(alpha, lambda, gamma, lambda0)?;
    Ok(lambda + gamma - lambda0 * (lambda + gamma - lambda0) / (alpha - lambda0))
}

fn diag(v: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        v.len(),
        v.iter().map(|&x| Complex64::new(x, 0.0)),
    ))
}

fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `[X, [X, A]]`.
pub fn double_commutator(x: &DMatrix<Complex64>, a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let c = x * a - a * x;
    x * &c - c * x
}

/// Frobenius defect of `A = JAJ + J'AJ' + ½[J,[J,A]] + ½[J',[J',A]]` for
/// diagonal `J, J'` with `J² + J'² = I`.
pub fn ims_decomposition_check(
    a: &DMatrix<Complex64>,
    j: &[f64],
    jp: &[f64],
) -> Result<f64, CertificateError> {
    let n = a.nrows();
    if a.ncols() != n || j.len() != n || jp.len() != n {
        return Err(CertificateError::Invalid(
            "matrix and cutoffs must share one dimension".into(),
        ));
    }
    let pou = j
        .iter()
        .zip(jp)
        .map(|(x, y)| (x * x + y * y - 1.0).abs())
        .fold(0.0, f64::max);
    if pou > 1e-12 {
        return Err(CertificateError::Invalid(format!(
            "J² + J'² = I violated by {pou:.3e}"
        )));
    }
    let (jm, jpm) = (diag(j), diag(jp));
    let half = Complex64::new(0.5, 0.0);
    let rebuilt = &jm * a * &jm
        + &jpm * a * &jpm
        + double_commutator(&jm, a) * half
        + double_commutator(&jpm, a) * half;
    Ok(frobenius(&(rebuilt - a)))
}

fn rank_of_projection(p: &DMatrix<Complex64>) -> usize {
    p.trace().re.round().max(0.0) as usize
}

/// Partial isometry `U` from the polar decomposition of `T`, with `U*U = P`
/// and `UU* = Q`.
pub fn mv_equivalence_finite(
    p: &DMatrix<Complex64>,
    q: &DMatrix<Complex64>,
    t: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>, CertificateError> {
    let n = p.nrows();
    if [p.ncols(), q.nrows(), q.ncols(), t.nrows(), t.ncols()]
        .iter()
        .any(|&d| d != n)
    {
        return Err(CertificateError::Invalid(
            "P, Q and T must be square of one size".into(),
        ));
    }
    let scale = frobenius(t).max(1.0);
    if frobenius(&(q * t * p - t)) > 1e-10 * scale {
        return Err(CertificateError::Invalid(
            "T does not satisfy QTP = T".into(),
        ));
    }
    let (rp, rq) = (rank_of_projection(p), rank_of_projection(q));
    if rp != rq {
        return Err(CertificateError::NoEquivalence(format!(
            "rank P = {rp} differs from rank Q = {rq}"
        )));
    }
    let svd = t.clone().svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let kept: Vec<usize> = idx
        .iter()
        .cloned()
        .filter(|&i| svd.singular_values[i] > 1e-10)
        .collect();
    if kept.len() != rp {
        return Err(CertificateError::NoEquivalence(format!(
            "T has {} singular values above 1e-10 but rank P = {rp}",
            kept.len()
        )));
    }
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    for &i in &kept {
        out += u.column(i) * vt.row(i);
    }
    Ok(out)
}
