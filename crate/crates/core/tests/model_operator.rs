use nalgebra::DMatrix;
use num_complex::Complex64;

use semigap::model_operator::{
    counting_function, fd_eigenvalues, hermite_levels, model_gaps, model_levels, well_frequencies,
    FdOptions, Level, MatrixWellSpec, ModelError, WellSpec,
};

fn diag(values: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(values))
}

fn well(metric: &[f64], hessian: &[f64]) -> WellSpec {
    WellSpec::new(diag(metric), diag(hessian), DMatrix::zeros(1, 1)).unwrap()
}

fn levels(wells: &[WellSpec], cutoff: f64) -> Vec<(f64, usize)> {
    model_levels(wells, cutoff)
        .unwrap()
        .levels
        .iter()
        .map(|l| (l.value, l.multiplicity))
        .collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1.0))
}

#[test]
fn frequency_examples() {
    assert!(close(
        &well_frequencies(&well(&[1.0], &[1.0])).unwrap(),
        &[1.0],
        1e-14
    ));
    assert!(close(
        &well_frequencies(&well(&[1.0, 1.0], &[1.0, 4.0])).unwrap(),
        &[1.0, 2.0],
        1e-14
    ));
    assert!(close(
        &well_frequencies(&well(&[4.0], &[1.0])).unwrap(),
        &[2.0],
        1e-14
    ));
}

#[test]
fn finite_differences_reproduce_the_oscillator() {
    let opts = FdOptions {
        half_width: Some(10.0),
        count: 5,
        ..FdOptions::one_dimensional()
    };
    let e = fd_eigenvalues(&well(&[1.0], &[1.0]), 1.0, &opts).unwrap();
    assert!(close(&e, &[1.0, 3.0, 5.0, 7.0, 9.0], 1e-3), "{e:?}");
    let e = fd_eigenvalues(&well(&[4.0], &[1.0]), 1.0, &opts).unwrap();
    assert!(close(&e, &[2.0, 6.0, 10.0, 14.0, 18.0], 1e-3), "{e:?}");
}

#[test]
fn frequencies_are_congruence_invariant() {
    let g = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
    let w = DMatrix::from_row_slice(2, 2, &[1.5, -0.4, -0.4, 0.8]);
    let q = DMatrix::from_row_slice(2, 2, &[1.2, 0.5, -0.3, 0.9]);
    let qinv = q.clone().try_inverse().unwrap();
    let base =
        well_frequencies(&WellSpec::new(g.clone(), w.clone(), DMatrix::zeros(1, 1)).unwrap())
            .unwrap();
    let moved = WellSpec::new(
        &q * g * q.transpose(),
        qinv.transpose() * w * &qinv,
        DMatrix::zeros(1, 1),
    )
    .unwrap();
    assert!(close(&well_frequencies(&moved).unwrap(), &base, 1e-12));
}

#[test]
fn level_examples() {
    assert_eq!(
        levels(&[well(&[1.0, 1.0], &[1.0, 1.0])], 7.0),
        vec![(2.0, 1), (4.0, 2), (6.0, 3)]
    );
    let fiber = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(10.0, 0.0),
        ],
    );
    let split = WellSpec::new(diag(&[1.0]), diag(&[1.0]), fiber).unwrap();
    assert_eq!(levels(&[split], 6.0), vec![(1.0, 1), (3.0, 1), (5.0, 1)]);
    let one = well(&[1.0], &[1.0]);
    let doubled = levels(&[one.clone(), one.clone()], 8.0);
    for ((v1, m1), (v2, m2)) in levels(&[one], 8.0).into_iter().zip(doubled) {
        assert_eq!((v1, 2 * m1), (v2, m2));
    }
}

#[test]
fn gaps_ignore_multiplicity() {
    let odd = model_levels(&[well(&[1.0], &[1.0])], 5.5).unwrap();
    let gaps: Vec<(f64, f64)> = model_gaps(&odd)
        .unwrap()
        .iter()
        .map(|g| (g.a, g.b))
        .collect();
    assert_eq!(gaps, vec![(1.0, 3.0), (3.0, 5.0)]);
    let even = model_levels(&[well(&[1.0, 1.0], &[1.0, 1.0])], 6.5).unwrap();
    let gaps: Vec<(f64, f64)> = model_gaps(&even)
        .unwrap()
        .iter()
        .map(|g| (g.a, g.b))
        .collect();
    assert_eq!(gaps, vec![(2.0, 4.0), (4.0, 6.0)]);
}

#[test]
fn counting_examples() {
    let s = model_levels(&[well(&[1.0], &[1.0])], 10.0).unwrap();
    assert_eq!(counting_function(&s, 4.0).unwrap(), 2);
    assert_eq!(counting_function(&s, 0.5).unwrap(), 0);
    assert!(matches!(
        counting_function(&s, 11.0),
        Err(ModelError::AboveCutoff { .. })
    ));
    let s = model_levels(&[well(&[1.0, 1.0], &[1.0, 1.0])], 10.0).unwrap();
    assert_eq!(counting_function(&s, 5.0).unwrap(), 3);
}

#[test]
fn levels_are_strictly_increasing() {
    let s = model_levels(
        &[well(&[1.0, 2.0], &[0.7, 1.3]), well(&[1.0], &[2.0])],
        25.0,
    )
    .unwrap();
    assert!(s.levels.windows(2).all(|w| w[0].value < w[1].value));
    assert!(s.levels.iter().all(|l: &Level| l.multiplicity >= 1));
}

#[test]
fn invalid_wells_are_rejected() {
    assert!(matches!(
        WellSpec::new(diag(&[1.0]), diag(&[-1.0]), DMatrix::zeros(1, 1)),
        Err(ModelError::NotSpd(_))
    ));
    let skew = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    assert!(matches!(
        WellSpec::new(diag(&[1.0]), diag(&[1.0]), skew),
        Err(ModelError::NotHermitian(_))
    ));
}

#[test]
fn hermite_truncation_agrees_with_closed_form_for_scalar_hessian() {
    let one = Complex64::new(1.0, 0.0);
    let w = MatrixWellSpec {
        metric: diag(&[1.0]),
        hessian_fiber: vec![DMatrix::from_diagonal_element(2, 2, one)],
        fiber_endo: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
        ])),
    };
    let approx = hermite_levels(&w, 30, 12.0).unwrap();
    assert!(!approx.exact);
    let exact = WellSpec::new(diag(&[1.0]), diag(&[1.0]), w.fiber_endo.clone()).unwrap();
    let reference = model_levels(&[exact], approx.cutoff).unwrap();
    let a: Vec<f64> = approx.levels.iter().map(|l| l.value).collect();
    let b: Vec<f64> = reference.levels.iter().map(|l| l.value).collect();
    assert!(close(&a, &b, 1e-8), "{a:?} vs {b:?}");
}
