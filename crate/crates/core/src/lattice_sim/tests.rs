use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::*;
use crate::linalg::{dense_eigh, CsrMatrix};
use crate::twisted_algebra::{LandauGauge, Multiplier};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn sorted_union(cfg: &LatticeConfig, kappas: &[[f64; 2]]) -> Vec<f64> {
    let mut all = Vec::new();
    for &k in kappas {
        all.extend(dense_eigh(&assemble(cfg, k).unwrap().to_dense()).values);
    }
    all.sort_by(f64::total_cmp);
    all
}

#[test]
fn free_fiber_matches_discrete_dispersion() {
    let m = 32;
    let cfg = LatticeConfig::new_1d(m, 1.0);
    let h = 1.0 / m as f64;
    for &kappa in &[0.0, 0.7, 2.0] {
        let got = dense_eigh(&assemble(&cfg, [kappa, 0.0]).unwrap().to_dense()).values;
        let mut want: Vec<f64> = (0..m as i64)
            .map(|n| 4.0 / (h * h) * ((2.0 * PI * n as f64 + kappa) * h / 2.0).sin().powi(2))
            .collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-9 * w.max(1.0), "{g} vs {w}");
        }
        let low = (want[0] - kappa * kappa).abs();
        assert!(low < 1e-2 * kappa.max(1e-3).powi(2) + 1e-12);
    }
}

#[test]
fn free_plane_has_constant_ground_state() {
    let cfg = LatticeConfig::new_2d(16, 1.0, None);
    let e = dense_eigh(&assemble(&cfg, [0.0, 0.0]).unwrap().to_dense());
    assert!(e.values[0].abs() < 1e-10);
    let v = e.vectors.column(0);
    let phase = v[0] / v[0].norm();
    for z in v.iter() {
        assert!((z / phase - c(1.0 / 16.0)).norm() < 1e-10);
    }
}

#[test]
fn operators_are_hermitian() {
    let mut cfg = LatticeConfig::new_2d(16, 0.3, Some(Flux { p: 1, q: 3 }));
    cfg.potential = PotentialSpec::sin_squared(2, 1.0);
    cfg.endomorphism = Some(HermitianSpec {
        re: vec![vec![0.5, 0.1], vec![0.1, -0.2]],
        im: Some(vec![vec![0.0, 0.3], vec![-0.3, 0.0]]),
    });
    let h = assemble(&cfg, [0.4, 1.9]).unwrap();
    assert!(h.hermiticity_defect() < 1e-13);
}

#[test]
fn landau_gauges_give_identical_torus_spectra() {
    let n = 2usize;
    let grid = |a: usize, b: usize| -> Vec<[f64; 2]> {
        let mut v = Vec::new();
        for j in 0..b {
            for i in 0..a {
                v.push([
                    2.0 * PI * i as f64 / a as f64,
                    2.0 * PI * j as f64 / b as f64,
                ]);
            }
        }
        v
    };
    let x = LatticeConfig::harper(1, 3);
    let y = LatticeConfig {
        gauge: LandauGauge::LandauY,
        ..x.clone()
    };
    let sx = sorted_union(&x, &grid(n, 3 * n));
    let sy = sorted_union(&y, &grid(3 * n, n));
    assert_eq!(sx.len(), sy.len());
    for (a, b) in sx.iter().zip(&sy) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }

    let mut fx = LatticeConfig::new_2d(16, 0.5, Some(Flux { p: 1, q: 3 }));
    fx.potential = PotentialSpec::sin_squared(2, 1.0);
    let fy = LatticeConfig {
        gauge: LandauGauge::LandauY,
        ..fx.clone()
    };
    let ex = sorted_union(&fx, &grid(1, 3));
    let ey = sorted_union(&fy, &grid(3, 1));
    for (a, b) in ex.iter().zip(&ey) {
        assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "{a} vs {b}");
    }
}

#[test]
fn gauge_data_reproduces_the_multiplier_and_field() {
    for gauge in [LandauGauge::LandauX, LandauGauge::LandauY] {
        let mut cfg = LatticeConfig::harper(2, 5);
        cfg.gauge = gauge;
        let g = GaugeData::from_config(&cfg).unwrap();
        let m: Multiplier = g.multiplier().unwrap();
        for a in -3..=3 {
            for b in -3..=3 {
                let (u, v) = ([a, b], [b - a, a + 2 * b]);
                assert!((g.sigma(u, v) - m.phase(&u, &v)).norm() < 1e-12);
            }
        }
        assert!(g.curl_defect(40, 40, 1.0 / 8.0) < 1e-12);
        assert_eq!(g.psi([0.0, 0.0], [0.3, 0.7]), 0.0);
    }
}

fn dense(m: &CsrMatrix) -> DMatrix<Complex64> {
    m.to_dense()
}

#[test]
fn magnetic_translations_form_a_projective_representation() {
    for cfg in [
        LatticeConfig {
            supercell: Some(vec![3, 3]),
            ..LatticeConfig::harper(1, 3)
        },
        {
            let mut f = LatticeConfig::new_2d(16, 0.7, Some(Flux { p: 1, q: 3 }));
            f.potential = PotentialSpec::sin_squared(2, 2.0);
            f.supercell = Some(vec![3, 3]);
            f
        },
    ] {
        let kappa = [0.3, 1.1];
        let t = |g: [i64; 2]| magnetic_translation(&cfg, g, kappa).unwrap();
        let id = CsrMatrix::identity(t([0, 0]).dim());
        assert!(t([0, 0]).sub(&id).max_abs() < 1e-14);
        let (t1, t2) = (t([1, 0]), t([0, 1]));
        let comm = t1.matmul(&t2).matmul(&t1.adjoint()).matmul(&t2.adjoint());
        let want = id.scale(Complex64::from_polar(1.0, 2.0 * PI / 3.0));
        assert!(comm.sub(&want).max_abs() < 1e-12);
        let g = GaugeData::from_config(&cfg).unwrap();
        for (a, b) in [([1, 0], [0, 1]), ([2, 1], [1, 2]), ([-1, 1], [1, 1])] {
            let lhs = t(a).matmul(&t(b));
            let rhs = t([a[0] + b[0], a[1] + b[1]]).scale(g.sigma(a, b));
            assert!(lhs.sub(&rhs).max_abs() < 1e-12);
        }
        assert!(t1.matmul(&t1.adjoint()).sub(&id).max_abs() < 1e-13);
        let h = assemble(&cfg, kappa).unwrap();
        for gen in [[1, 0], [0, 1]] {
            let tg = t(gen);
            let comm = h.matmul(&tg).sub(&tg.matmul(&h));
            assert!(
                dense(&comm).norm() < 1e-11 * (1.0 + h.max_abs()),
                "{}",
                dense(&comm).norm()
            );
        }
    }
}

#[test]
fn translations_off_the_magnetic_lattice_are_rejected() {
    let cfg = LatticeConfig::harper(1, 3);
    assert!(matches!(
        magnetic_translation(&cfg, [1, 0], [0.0, 0.0]),
        Err(LatticeError::IncompatibleTranslation(_))
    ));
    assert!(magnetic_translation(&cfg, [1, 3], [0.0, 0.0]).is_err());
    assert!(magnetic_translation(&cfg, [0, 1], [0.0, 0.0]).is_ok());
    assert!(magnetic_translation(&cfg, [3, 1], [0.0, 0.0]).is_ok());
}

#[test]
fn sparse_bands_match_dense_oracle() {
    let mut cfg = LatticeConfig::new_1d(512, 1.0);
    cfg.potential = PotentialSpec::sin_squared(1, 4.0 * PI * PI);
    cfg.wells = vec![vec![0.0]];
    cfg.bands = Some(6);
    cfg.k_points = 3;
    let bs = bloch_spectrum(&cfg).unwrap();
    for (k, e) in bs.k_points.iter().zip(&bs.energies) {
        let oracle = dense_eigh(&assemble(&cfg, *k).unwrap().to_dense()).values;
        for (a, b) in e.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }
}

#[test]
fn free_line_has_no_gaps() {
    let mut cfg = LatticeConfig::new_1d(32, 1.0);
    cfg.k_points = 64;
    cfg.bands = Some(6);
    let bs = bloch_spectrum(&cfg).unwrap();
    assert!(bs.gaps.is_empty(), "{:?}", bs.gaps);
    assert_eq!(bs.ids(-1.0), Some(0.0));
}

#[test]
fn hofstadter_third_has_three_subbands_and_two_gaps() {
    let bs = bloch_spectrum(&LatticeConfig::harper(1, 3)).unwrap();
    assert_eq!(bs.band_count(), 3);
    assert_eq!(bs.gaps.len(), 2);
    assert_eq!(bs.cells_per_supercell, 3);
    let ids: Vec<(u64, u64)> = bs
        .gaps
        .iter()
        .map(|g| bs.ids_count(g.midpoint()).unwrap())
        .collect();
    let k = bs.k_points.len() as u64;
    assert_eq!(ids, vec![(k, 3 * k), (2 * k, 3 * k)]);
    let mut prev = 0.0;
    for (_, v) in bs.ids_samples(-1.0, 6.5, 200) {
        assert!(v >= prev);
        prev = v;
    }
}

#[test]
fn projections_are_idempotent_and_match_riesz() {
    let cfg = LatticeConfig::harper(1, 3);
    let zero = spectral_projection(&cfg, -1.0, 1e-6).unwrap();
    assert_eq!(zero.rank, 0);
    assert_eq!(zero.projector(0).norm(), 0.0);
    let bs = bloch_spectrum(&cfg).unwrap();
    let p = spectral_projection(&cfg, bs.gaps[0].midpoint(), 1e-6).unwrap();
    assert_eq!(p.rank, 1);
    let r = p.report();
    assert!(r.max_idempotency_defect < 1e-11 && r.max_hermiticity_defect < 1e-11);
    for i in [0, 5, 17] {
        assert!(riesz_cross_check(&cfg, &p, i, 64).unwrap() < 1e-8);
    }
    assert!(riesz_cross_check(&cfg, &zero, 3, 64).unwrap() < 1e-8);
    let inside = 0.5 * (bs.edges()[0].0 + bs.edges()[0].1);
    assert!(matches!(
        spectral_projection(&cfg, inside, 1e-6),
        Err(LatticeError::InsideBand { .. }) | Err(LatticeError::RankJump { .. })
    ));
}

#[test]
fn zero_field_has_zero_chern_number() {
    let mut cfg = LatticeConfig::new_2d(16, 1.0, None);
    cfg.potential = PotentialSpec::sin_squared(2, 40.0);
    cfg.wells = vec![vec![0.0, 0.0]];
    cfg.bands = Some(4);
    cfg.k_points = 4;
    let lambda = gap_midpoint(&cfg, 0).unwrap();
    let opts = HallOptions {
        grid: 24,
        kubo_grid: 8,
        ..HallOptions::default()
    };
    let r = hall_conductance(&cfg, lambda, &opts).unwrap();
    assert!(r.chern_a.abs() < 0.01 && r.chern_b.abs() < 0.01, "{r:?}");
}

#[test]
fn config_errors_are_reported() {
    let mut cfg = LatticeConfig::new_1d(8, 1.0);
    assert!(matches!(
        cfg.validate(),
        Err(LatticeError::GridTooCoarse(8))
    ));
    cfg.points_per_cell = 16;
    cfg.mu = 0.0;
    assert!(cfg.validate().is_err());
    let mut bad = LatticeConfig::harper(1, 3);
    bad.supercell = Some(vec![2, 1]);
    assert!(matches!(
        bad.validate(),
        Err(LatticeError::IncommensurateFlux { .. })
    ));
    bad.flux = Some(Flux { p: 1, q: 0 });
    assert!(bad.validate().is_err());
    let mut neg = LatticeConfig::new_1d(16, 1.0);
    neg.potential = PotentialSpec::Trig {
        constant: 0.0,
        terms: vec![TrigTerm {
            amplitude: 1.0,
            frequency: vec![1],
            phase: 0.0,
        }],
    };
    assert!(matches!(
        neg.validate(),
        Err(LatticeError::NegativePotential { .. })
    ));
    let mut well = LatticeConfig::new_1d(16, 1.0);
    well.potential = PotentialSpec::sin_squared(1, 1.0);
    well.wells = vec![vec![0.25]];
    assert!(matches!(well.validate(), Err(LatticeError::BadWell { .. })));
}

#[test]
fn gaussian_wells_have_analytic_hessians() {
    let p = PotentialSpec::Gaussian {
        depth: 3.0,
        width: 0.2,
        centers: vec![vec![0.0, 0.0], vec![0.5, 0.5]],
    };
    for x in [[0.0, 0.0], [0.5, 0.5]] {
        let h = p.hessian(&x);
        let mut num = DMatrix::zeros(2, 2);
        let e = 1e-4;
        for i in 0..2 {
            for j in 0..2 {
                let f = |a: f64, b: f64| {
                    let mut y = x.to_vec();
                    y[i] += a;
                    y[j] += b;
                    p.eval(&y)
                };
                num[(i, j)] = (f(e, e) - f(e, -e) - f(-e, e) + f(-e, -e)) / (4.0 * e * e);
            }
        }
        assert!((h - num).norm() < 1e-4);
        assert!(p.eval(&x).abs() < 1e-15);
    }
}

#[test]
fn localization_defect_decreases_with_coupling() {
    let mut cfg = LatticeConfig::new_1d(256, 0.02);
    cfg.potential = PotentialSpec::sin_squared(1, 1.0);
    cfg.wells = vec![vec![0.0]];
    cfg.k_points = 4;
    let rows = localization_sweep(&cfg, &[0.02, 0.01, 0.005, 0.002], 0.4).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].defect < w[0].defect, "{rows:?}");
    }
    assert!(rows.last().unwrap().defect < 1e-2);
}
