//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semigap::cocycle_pairing::{
    build_area_cocycle, eval_tau_c_tr, hall_cocycle, pair_with_projection, verify_cyclic,
    verify_group_cocycle, CyclicCocycle, SymplecticData, TauC,
};
use semigap::gap_certificate::{
    b1_from_b2, b2_of, certificate_sweep, certify_gap, convergence_rate, estimate_parameters,
    localization_coefficient, log_spaced, loglog_slope, optimal_kappa, CertificateParams,
    CertificateProblem, CutoffProfile, EstimatorMode, GapInterval,
};
use semigap::lattice_sim::{
    gap_emergence_sweep, gap_midpoint, hall_conductance, model_gap_midpoint, subband_cherns,
    GapSweep, HallOptions, LatticeConfig, PotentialSpec, TrigTerm,
};
use semigap::model_operator::{mu_invariance_check, FdOptions, WellSpec};
use semigap::twisted_algebra::{
    identity_suite, random_element, AlgebraElement, LandauGauge, Multiplier, SuiteOptions,
};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    check(
        elapsed.as_secs_f64() < limit_s as f64,
        format!("runtime {elapsed:.1?} exceeds {limit_s} s"),
    )
}

/// Twisted convolution written out from `δ_a δ_b = σ̄(a,b) δ_{a+b}`.
fn naive_product(f: &AlgebraElement, g: &AlgebraElement) -> BTreeMap<Vec<i64>, DMatrix<Complex64>> {
    let sigma = f.multiplier();
    let mut out: BTreeMap<Vec<i64>, DMatrix<Complex64>> = BTreeMap::new();
    for (a, x) in f.blocks() {
        for (b, y) in g.blocks() {
            let s: Vec<i64> = a.iter().zip(b).map(|(p, q)| p + q).collect();
            let term = x * y * sigma.phase(a, b).conj();
            let n = term.nrows();
            *out.entry(s).or_insert_with(|| DMatrix::zeros(n, n)) += term;
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let sigma = Multiplier::magnetic(1, 3, LandauGauge::LandauX).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let opts = SuiteOptions {
        cases: 1000,
        max_support: 6,
        max_fiber: 3,
        radius: 3,
        tolerance: 1e-12,
    };
    let r = identity_suite(&sigma, &opts, &mut rng).map_err(|e| e.to_string())?;
    let worst = [
        r.associativity,
        r.involution_antimultiplicative,
        r.involution_involutive,
        r.delta_relation,
        r.delta_unitarity,
        r.traciality,
        r.positivity_violation,
        r.identity_unit,
    ]
    .into_iter()
    .fold(0.0f64, f64::max);
    check(
        r.pass && worst < 1e-12,
        format!("identity defect {worst:.3e}"),
    )?;
    check(
        r.untwisted_degeneration == 0.0,
        format!("untwisted mismatch {:.3e}", r.untwisted_degeneration),
    )?;

    let mut oracle = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=3);
        let f = {
            let k = rng.gen_range(1..=6);
            random_element(&mut rng, &sigma, n, k, 3)
        };
        let g = {
            let k = rng.gen_range(1..=6);
            random_element(&mut rng, &sigma, n, k, 3)
        };
        let prod = f.convolve(&g).map_err(|e| e.to_string())?;
        for (gamma, block) in naive_product(&f, &g) {
            let other = prod
                .block(&gamma)
                .cloned()
                .unwrap_or_else(|| DMatrix::zeros(n, n));
            oracle = oracle.max((block - other).iter().fold(0.0f64, |m, z| m.max(z.norm())));
        }
    }
    check(
        oracle < 1e-12,
        format!("product differs from the written-out convolution by {oracle:.3e}"),
    )?;
    within(start.elapsed(), 10)?;
    Ok(format!(
        "max identity defect {worst:.2e}, untwisted exact, convolution oracle {oracle:.1e}"
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let area = build_area_cocycle(&SymplecticData::planar()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let tuples: Vec<Vec<Vec<i64>>> = (0..500)
        .map(|_| {
            (0..3)
                .map(|_| vec![rng.gen_range(-6..=6), rng.gen_range(-6..=6)])
                .collect()
        })
        .collect();
    let group = verify_group_cocycle(&area, &tuples);
    check(
        group.pass,
        format!("group cocycle defect {:.3e}", group.max_identity_defect),
    )?;
    for t in &tuples {
        let (m, n) = (&t[0], &t[1]);
        let expected = -((m[0] * n[1] - m[1] * n[0]) as f64);
        let value = area.eval(&[m.as_slice(), n.as_slice()]);
        check(
            value == expected,
            format!("Ψ({m:?}, {n:?}) = {value}, expected {expected}"),
        )?;
    }

    let sigma = Multiplier::magnetic(1, 3, LandauGauge::LandauX).map_err(|e| e.to_string())?;
    let samples: Vec<Vec<AlgebraElement>> = (0..500)
        .map(|_| {
            let n = rng.gen_range(1..=2);
            (0..4)
                .map(|_| {
                    let k = rng.gen_range(1..=5);
                    random_element(&mut rng, &sigma, n, k, 2)
                })
                .collect()
        })
        .collect();
    let rep = verify_cyclic(
        &TauC {
            cocycle: area.clone(),
        },
        &samples,
        1e-10,
    )
    .map_err(|e| e.to_string())?;
    check(
        rep.pass && rep.max_cyclic_defect < 1e-10 && rep.max_hochschild_defect < 1e-10,
        format!(
            "cyclic {:.3e}, Hochschild {:.3e}",
            rep.max_cyclic_defect, rep.max_hochschild_defect
        ),
    )?;

    for rank in 0..=3usize {
        let diag = DMatrix::from_fn(3, 3, |i, j| {
            Complex64::new(if i == j && i < rank { 1.0 } else { 0.0 }, 0.0)
        });
        let p = AlgebraElement::delta(sigma.clone(), &[0, 0], diag);
        let pairing = pair_with_projection(&area, &p).map_err(|e| e.to_string())?;
        check(
            pairing == 0.0,
            format!("pairing with I⊗P of rank {rank} is {pairing}"),
        )?;
        let trace = p.trace();
        check(
            trace.re == rank as f64 && trace.im == 0.0,
            format!("Tr_Γ(I⊗P) = {trace} for rank {rank}"),
        )?;
    }
    within(start.elapsed(), 10)?;
    Ok(format!(
        "cyclic {:.1e}, Hochschild {:.1e}, vanishing pairing and trace = rank exact",
        rep.max_cyclic_defect, rep.max_hochschild_defect
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let xi = SymplecticData::planar();
    let area = build_area_cocycle(&xi).map_err(|e| e.to_string())?;
    let hall = hall_cocycle(&xi).map_err(|e| e.to_string())?;
    let sigma = Multiplier::magnetic(1, 3, LandauGauge::LandauX).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(1..=2);
        let t: Vec<AlgebraElement> = (0..3)
            .map(|_| {
                let k = rng.gen_range(1..=5);
                random_element(&mut rng, &sigma, n, k, 2)
            })
            .collect();
        let args: Vec<&AlgebraElement> = t.iter().collect();
        let a = hall.eval(&args).map_err(|e| e.to_string())?;
        let b = eval_tau_c_tr(&area, &args).map_err(|e| e.to_string())?;
        worst = worst.max((a - b).norm() / b.norm().max(1.0));
    }
    check(worst < 1e-10, format!("tr_K − τ_Ψ#Tr = {worst:.3e}"))?;
    within(start.elapsed(), 10)?;
    Ok(format!(
        "max relative disagreement {worst:.2e} over 200 triples"
    ))
}

fn random_spd(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let q =
        SymmetricEigen::new(DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0))).eigenvectors;
    let q = if d == 1 { DMatrix::identity(1, 1) } else { q };
    let diag = DMatrix::from_fn(
        d,
        d,
        |i, j| if i == j { rng.gen_range(lo..hi) } else { 0.0 },
    );
    let m = &q * diag * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Lowest `count` values of `Σ ωⱼ(2nⱼ+1)` by brute-force enumeration.
fn oscillator_oracle(g: &DMatrix<f64>, w: &DMatrix<f64>, count: usize) -> Vec<f64> {
    let ge = SymmetricEigen::new(g.clone());
    let root = &ge.eigenvectors
        * DMatrix::from_diagonal(&ge.eigenvalues.map(f64::sqrt))
        * ge.eigenvectors.transpose();
    let omega: Vec<f64> = SymmetricEigen::new(&root * w * &root)
        .eigenvalues
        .iter()
        .map(|l| l.sqrt())
        .collect();
    let mut values = Vec::new();
    let n = 12i32;
    match omega.len() {
        1 => values.extend((0..n).map(|k| omega[0] * (2 * k + 1) as f64)),
        _ => {
            for a in 0..n {
                for b in 0..n {
                    values.push(omega[0] * (2 * a + 1) as f64 + omega[1] * (2 * b + 1) as f64);
                }
            }
        }
    }
    values.sort_by(f64::total_cmp);
    values.truncate(count);
    values
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let (mut worst_closed, mut worst_mu) = (0.0f64, 0.0f64);
    for i in 0..10 {
        let d = if i < 5 { 1 } else { 2 };
        let g = random_spd(&mut rng, d, 0.5, 2.0);
        let w = random_spd(&mut rng, d, 0.5, 3.0);
        let oracle = oscillator_oracle(&g, &w, 5);
        let well = WellSpec::new(g, w, DMatrix::zeros(1, 1)).map_err(|e| e.to_string())?;
        let opts = if d == 1 {
            FdOptions::one_dimensional()
        } else {
            FdOptions::two_dimensional()
        };
        let report =
            mu_invariance_check(&well, &[0.5, 1.0, 2.0], &opts, 2e-3).map_err(|e| e.to_string())?;
        check(report.pass, format!("well {i}: μ-invariance check failed"))?;
        for (c, o) in report.closed_form.iter().zip(&oracle) {
            check(
                (c - o).abs() < 1e-12 * o,
                format!("well {i}: closed form {c} differs from oracle {o}"),
            )?;
        }
        for row in &report.rows {
            for (e, o) in row.eigenvalues.iter().zip(&oracle) {
                worst_closed = worst_closed.max((e - o).abs() / o);
            }
            worst_mu = worst_mu.max(row.max_deviation_from_unit_coupling);
        }
        let unit = report
            .rows
            .iter()
            .find(|r| r.mu == 1.0)
            .ok_or("missing μ = 1 row")?;
        let rel = unit
            .eigenvalues
            .iter()
            .zip(&oracle)
            .map(|(e, o)| (e - o).abs() / o)
            .fold(0.0f64, f64::max);
        check(
            rel < 1e-3,
            format!("well {i} (d = {d}): finite differences off by {rel:.3e}"),
        )?;
    }
    check(
        worst_closed < 2e-3,
        format!("μ-rescaled spectra off by {worst_closed:.3e}"),
    )?;
    check(
        worst_mu < 2e-3,
        format!("μ-invariance defect {worst_mu:.3e}"),
    )?;
    within(start.elapsed(), 30)?;
    Ok(format!(
        "10 wells: finite differences vs closed form {worst_closed:.2e}, across μ ∈ {{0.5, 1, 2}} {worst_mu:.1e}"
    ))
}

fn random_params(rng: &mut ChaCha8Rng) -> CertificateParams {
    CertificateParams {
        lambda01: -rng.gen_range(0.0..2.0),
        lambda02: -rng.gen_range(0.0..2.0),
        alpha1: rng.gen_range(5.0..60.0),
        alpha2: rng.gen_range(5.0..60.0),
        beta1: rng.gen_range(1.0..1.5),
        beta2: rng.gen_range(1.0..1.5),
        gamma1: rng.gen_range(0.0..2.0),
        gamma2: rng.gen_range(0.0..2.0),
        eps1: rng.gen_range(0.0..0.5),
        eps2: rng.gen_range(0.0..0.5),
        rho: rng.gen_range(1.0..1.3),
    }
}

fn hermitian(rng: &mut ChaCha8Rng, diag: &[f64], coupling: f64) -> DMatrix<Complex64> {
    let n = diag.len();
    let x = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let mut h = (&x + x.adjoint()) * Complex64::new(0.5 * coupling, 0.0);
    for i in 0..n {
        h[(i, i)] += Complex64::new(diag[i], 0.0);
    }
    h
}

fn min_eig(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

fn op_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |a, l| a.max(l.abs()))
}

/// One random instance of the localisation proposition in dimension 40;
/// returns `(coefficient, smallest ‖JE(λ)u‖²/‖E(λ)u‖²)` when the hypotheses hold.
fn localization_instance(rng: &mut ChaCha8Rng) -> Option<(f64, f64)> {
    let n = 40;
    let inner = rng.gen_range(4..12);
    let transition = rng.gen_range(2..8);
    let mut diag = Vec::with_capacity(n);
    let mut j = Vec::with_capacity(n);
    for i in 0..n {
        if i < inner {
            diag.push(rng.gen_range(-1.0..3.0));
            j.push(1.0);
        } else if i < inner + transition {
            diag.push(rng.gen_range(5.0..20.0));
            j.push(rng.gen_range(0.05..0.95));
        } else {
            diag.push(rng.gen_range(20.0..40.0));
            j.push(0.0);
        }
    }
    let coupling = rng.gen_range(0.05..1.0);
    let a = hermitian(rng, &diag, coupling);
    let jp: Vec<f64> = j.iter().map(|x: &f64| (1.0 - x * x).sqrt()).collect();
    let jm = DMatrix::from_fn(n, n, |r, c| {
        Complex64::new(if r == c { j[r] } else { 0.0 }, 0.0)
    });
    let jpm = DMatrix::from_fn(n, n, |r, c| {
        Complex64::new(if r == c { jp[r] } else { 0.0 }, 0.0)
    });
    let dc = |x: &DMatrix<Complex64>| {
        let c = x * &a - &a * x;
        x * &c - c * x
    };
    let gamma = op_norm(&dc(&jm)).max(op_norm(&dc(&jpm)));
    let lambda0 = min_eig(&a).min(0.0);
    let support: Vec<usize> = (0..n).filter(|&i| jp[i] > 0.0).collect();
    let compressed = DMatrix::from_fn(support.len(), support.len(), |r, c| {
        a[(support[r], support[c])]
    });
    let alpha = min_eig(&compressed);
    if !(alpha > 0.0) {
        return None;
    }
    let lambda = lambda0 + rng.gen_range(0.0..1.0) * (alpha - gamma - lambda0);
    if !(alpha > lambda + gamma) {
        return None;
    }
    let coeff = localization_coefficient(alpha, lambda, gamma, lambda0).ok()?;
    let eig = a.clone().symmetric_eigen();
    let cols: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] <= lambda).collect();
    if cols.is_empty() {
        return Some((coeff, 1.0));
    }
    let e = DMatrix::from_fn(n, cols.len(), |r, c| eig.eigenvectors[(r, cols[c])]);
    let ratio = min_eig(&(e.adjoint() * &jm * &jm * &e));
    Some((coeff, ratio))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut accepted, mut worst) = (0, 0.0f64);
    while accepted < 1000 {
        let p = random_params(&mut rng);
        let b1 = rng.gen_range(0.5..20.0);
        let Ok(b2) = b2_of(&p, b1) else { continue };
        if !(p.alpha2 > b2 + p.gamma2) {
            continue;
        }
        let back = b1_from_b2(&p, b2).map_err(|e| e.to_string())?;
        worst = worst.max((back - b1).abs() / b1.abs().max(1.0));
        accepted += 1;
    }
    check(
        worst < 1e-10,
        format!("round trip b₁ → b₂ → b₁ off by {worst:.3e}"),
    )?;

    let (mut instances, mut margin) = (0, f64::INFINITY);
    let mut attempts = 0;
    while instances < 100 {
        attempts += 1;
        if attempts > 10_000 {
            return Err("could not generate 100 admissible localisation instances".into());
        }
        if let Some((coeff, ratio)) = localization_instance(&mut rng) {
            check(
                ratio >= coeff - 1e-12,
                format!("localisation bound violated: {ratio} < {coeff}"),
            )?;
            margin = margin.min(ratio - coeff);
            instances += 1;
        }
    }

    let steps = 500_000;
    let (mut best_k, mut best_s) = (0.0, f64::NEG_INFINITY);
    for i in 0..=steps {
        let k = 0.5 * i as f64 / steps as f64;
        let s = convergence_rate(k);
        if s > best_s {
            best_s = s;
            best_k = k;
        }
    }
    check(
        (best_k - 0.4).abs() < 1e-4 && (best_s - 0.2).abs() < 1e-4,
        format!("grid search gave κ = {best_k}, s = {best_s}"),
    )?;
    let (k, s) = optimal_kappa();
    check(
        (k - 0.4).abs() < 1e-4 && (s - 0.2).abs() < 1e-12,
        format!("optimal_kappa() = ({k}, {s})"),
    )?;
    within(start.elapsed(), 30)?;
    Ok(format!(
        "round trip {worst:.1e} on 1000 sets, localisation slack ≥ {margin:.2e} on 100 instances, κ* = {best_k}, s* = {best_s:.4}"
    ))
}

const FLAT_KAPPA: f64 = 0.1;
const MORSE_CONSTANT: f64 = 4.0;

fn flat_problem() -> CertificateProblem {
    CertificateProblem {
        metric_bound: [1.0, 1.0],
        morse_constant: MORSE_CONSTANT,
        spectral_bottom: [0.0, 0.0],
        mode: EstimatorMode::Flat,
    }
}

/// `V = s + s²/3` with `s = sin²πx`: `V ≥ 4x²` on the cell and `V = π²x² + O(x⁶)`.
fn single_well_lattice() -> LatticeConfig {
    let mut cfg = LatticeConfig::new_1d(256, 0.02);
    cfg.potential = PotentialSpec::Trig {
        constant: 0.625,
        terms: vec![
            TrigTerm {
                amplitude: -2.0 / 3.0,
                frequency: vec![1],
                phase: 0.0,
            },
            TrigTerm {
                amplitude: 1.0 / 24.0,
                frequency: vec![2],
                phase: 0.0,
            },
        ],
    };
    cfg.wells = vec![vec![0.0]];
    cfg.k_points = 32;
    cfg
}

fn criteria_6_and_7() -> (Outcome, Outcome) {
    let start = Instant::now();
    let sweep = match gap_emergence_sweep(&single_well_lattice(), &[0.08, 0.04, 0.02], 17.0) {
        Ok(s) => s,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let sweep_time = start.elapsed();
    (
        criterion_6(&sweep, sweep_time),
        criterion_7(&sweep, sweep_time),
    )
}

fn criterion_6(sweep: &GapSweep, sweep_time: Duration) -> Outcome {
    let start = Instant::now();
    let row = sweep
        .rows
        .iter()
        .find(|r| r.mu == 0.02)
        .ok_or("no row at μ = 0.02")?;
    check(
        row.band_centers.len() >= 3,
        format!("only {} band centres", row.band_centers.len()),
    )?;
    let mut worst = 0.0f64;
    for (n, c) in row.band_centers.iter().take(3).enumerate() {
        let level = (2 * n + 1) as f64 * PI;
        worst = worst.max((c - level).abs());
        check(
            (c - level).abs() < 0.2,
            format!("band centre {c} is not within 0.2 of {level}"),
        )?;
    }
    let below = row.gaps.iter().filter(|g| g.b < 5.0 * PI).count();
    check(below >= 2, format!("{below} gaps below 5π"))?;
    let observed = row
        .gaps
        .iter()
        .find(|g| g.a < 2.0 * PI && 2.0 * PI < g.b)
        .ok_or("no gap around 2π")?;

    let profile = CutoffProfile::default();
    let params = estimate_parameters(0.02, FLAT_KAPPA, &profile, &flat_problem())
        .map_err(|e| e.to_string())?;
    let model_gap = GapInterval::new(PI, 3.0 * PI).map_err(|e| e.to_string())?;
    let cert = certify_gap(&params, &model_gap).map_err(|r| r.to_string())?;
    check(cert.a < cert.b, "empty certificate")?;
    check(
        observed.a <= cert.a && cert.b <= observed.b,
        format!(
            "certificate ({}, {}) not inside observed gap ({}, {})",
            cert.a, cert.b, observed.a, observed.b
        ),
    )?;

    let mus = log_spaced(1e-4, 1e-1, 13);
    let cs = certificate_sweep(&flat_problem(), FLAT_KAPPA, &profile, model_gap, &mus)
        .map_err(|e| e.to_string())?;
    let grad = profile.sup_gradient_sq();
    let mut points = Vec::new();
    for r in &cs.rows {
        let a2 = r.a2.ok_or_else(|| format!("no a₂ at μ = {}", r.mu))?;
        let t = r.mu.powf(1.0 - 2.0 * FLAT_KAPPA);
        let (alpha, gamma) = (MORSE_CONSTANT / t, 2.0 * t * grad);
        let s = PI + gamma;
        let oracle = s + s * s / (alpha - s);
        check(
            (a2 - oracle).abs() < 1e-12 * oracle,
            format!("a₂({}) = {a2}, hand formula {oracle}", r.mu),
        )?;
        points.push((r.mu, a2 - PI));
    }
    let slope = loglog_slope(&points);
    let expected = 1.0 - 2.0 * FLAT_KAPPA;
    check(
        (slope - expected).abs() < 0.1,
        format!("slope {slope:.4}, expected {expected} ± 0.1"),
    )?;
    within(sweep_time + start.elapsed(), 300)?;
    Ok(format!(
        "centres within {worst:.3} of π, 3π, 5π; {below} gaps below 5π; certificate ({:.4}, {:.4}) ⊂ ({:.4}, {:.4}); slope {slope:.3} vs {expected}",
        cert.a, cert.b, observed.a, observed.b
    ))
}

fn criterion_7(sweep: &GapSweep, sweep_time: Duration) -> Outcome {
    let mut rows: Vec<_> = sweep.rows.iter().collect();
    rows.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    let mut checked = 0;
    for row in rows.iter().take(2) {
        check(!row.gaps.is_empty(), format!("no gaps at μ = {}", row.mu))?;
        for g in &row.gaps {
            let mid = 0.5 * (g.a + g.b);
            let count = (0..)
                .take_while(|n| ((2 * n + 1) as f64) * PI < mid)
                .count() as u64;
            check(
                g.ids_numerator % g.ids_denominator == 0
                    && g.ids_numerator / g.ids_denominator == count,
                format!(
                    "μ = {}: IDS {}/{} at {mid} but {count} model states",
                    row.mu, g.ids_numerator, g.ids_denominator
                ),
            )?;
            check(
                g.trace_equals_rank && g.model_count as u64 == count,
                format!("μ = {}: trace ≠ rank", row.mu),
            )?;
            checked += 1;
        }
    }
    within(sweep_time, 300)?;
    Ok(format!(
        "{checked} gaps at μ ∈ {{{}, {}}} have integer IDS equal to the model count",
        rows[0].mu, rows[1].mu
    ))
}

/// Chern number of the gap below `r` subbands at flux `p/q` from the
/// Diophantine equation `r = q s + p t` with `|t| ≤ q/2`.
fn tknn(p: i64, q: i64, r: i64) -> i64 {
    (-q..=q)
        .find(|t| 2 * t.abs() <= q && (r - p * t).rem_euclid(q) == 0)
        .expect("solvable")
}

fn deep_wells() -> LatticeConfig {
    let mut cfg = LatticeConfig::new_2d(16, 0.05, Some(semigap::lattice_sim::Flux { p: 1, q: 3 }));
    cfg.potential = PotentialSpec::sin_squared(2, 1.0);
    cfg.wells = vec![vec![0.0, 0.0]];
    cfg.k_points = 4;
    cfg
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let harper = LatticeConfig::harper(1, 3);
    let opts = HallOptions::default();
    let lambda = gap_midpoint(&harper, 0).map_err(|e| e.to_string())?;
    let r = hall_conductance(&harper, lambda, &opts).map_err(|e| e.to_string())?;
    let expected = tknn(1, 3, 1) as f64;
    check(
        expected == 1.0,
        format!("Diophantine oracle gave {expected}"),
    )?;
    check(
        (r.chern_a - r.chern_b).abs() < 0.01,
        format!("methods disagree: {} vs {}", r.chern_a, r.chern_b),
    )?;
    check(
        (r.chern_a - expected).abs() < 0.01 && (r.chern_b - expected).abs() < 0.01,
        format!("Harper Chern numbers {} and {}", r.chern_a, r.chern_b),
    )?;

    let sub = subband_cherns(&harper, 24).map_err(|e| e.to_string())?;
    check(sub.sum.abs() < 0.01, format!("subband sum {}", sub.sum))?;
    let oracle_sub: Vec<f64> = (1..=3)
        .map(|r| {
            (tknn(1, 3, r.min(2)) * (r < 3) as i64 - tknn(1, 3, r - 1) * (r > 1) as i64) as f64
        })
        .collect();
    for (c, o) in sub.cherns.iter().zip(&oracle_sub) {
        check(
            (c - o).abs() < 0.01,
            format!(
                "subband Chern numbers {:?}, expected {oracle_sub:?}",
                sub.cherns
            ),
        )?;
    }

    let wells = deep_wells();
    let deep_opts = HallOptions {
        kubo_grid: 12,
        ..HallOptions::default()
    };
    let lambda = model_gap_midpoint(&wells, 0, 14.0).map_err(|e| e.to_string())?;
    let d = hall_conductance(&wells, lambda, &deep_opts).map_err(|e| e.to_string())?;
    check(
        (d.chern_a - d.chern_b).abs() < 0.01,
        format!(
            "deep wells: methods disagree: {} vs {}",
            d.chern_a, d.chern_b
        ),
    )?;
    check(
        d.chern_a.abs() < 0.01 && d.chern_b.abs() < 0.01,
        format!("deep wells: Chern {} and {}", d.chern_a, d.chern_b),
    )?;
    within(start.elapsed(), 600)?;
    Ok(format!(
        "Harper: {:.4} / {:.4}; deep wells at μ = {}: {:.1e} / {:.1e}; subbands {:?} sum {:.1e}",
        r.chern_a,
        r.chern_b,
        d.mu,
        d.chern_a,
        d.chern_b,
        sub.cherns.iter().map(|c| c.round()).collect::<Vec<_>>(),
        sub.sum
    ))
}

const DETERMINISM_CONFIGS: [(&str, &str); 6] = [
    (
        "validate-algebra",
        "seed = 5\n[algebra]\ncases = 100\n[algebra.multiplier]\nkind = \"magnetic\"\np = 2\nq = 5\n",
    ),
    (
        "pair-cocycle",
        "seed = 6\n[cocycle]\nsamples = 50\nhall_samples = 30\n[cocycle.cocycle]\nkind = \"area\"\nxi = [[1.0, 0.0], [0.0, 1.0]]\n\
         [cocycle.multiplier]\nkind = \"magnetic\"\np = 1\nq = 3\n[cocycle.pairing]\nflux = { p = 1, q = 3 }\ngrid = 32\nradius = 10\n",
    ),
    (
        "model-spectrum",
        "[model]\ncutoff = 12.0\nmu_check = [0.5, 1.0, 2.0]\n[[model.wells]]\nmetric = [[1.0]]\nhessian_half = [[2.0]]\n\
         [[model.wells]]\nmetric = [[1.0]]\nhessian_half = [[0.5]]\nfiber = { re = [[0.0, 1.0], [1.0, 0.0]] }\n",
    ),
    (
        "gap-certify",
        "[certify]\nkappa = 0.1\nmodel_gap = [3.141592653589793, 9.42477796076938]\nmorse_constant = 4.0\n\
         [certify.couplings]\nsweep = { from = 1e-4, to = 1e-1, count = 7 }\n",
    ),
    (
        "simulate",
        "seed = 9\n[simulate]\ncutoff = 10.0\nids_points = 50\nlocalization_kappa = 0.3\n[simulate.couplings]\nlist = [0.2, 0.1]\n\
         [simulate.lattice]\ndimension = 1\npoints_per_cell = 64\nmu = 0.1\nk_points = 8\nwells = [[0.0]]\n\
         [simulate.lattice.potential]\nkind = \"trig\"\nconstant = 0.5\nterms = [{ amplitude = -0.5, frequency = [1] }]\n",
    ),
    (
        "hall",
        "[hall]\nsubband_grid = 12\n[hall.target]\ngap_index = 0\n[hall.options]\ngrid = 12\nkubo_grid = 12\n\
         [hall.lattice]\ndimension = 2\npoints_per_cell = 1\ndiscretization = \"tight-binding\"\nmu = 1.0\nflux = { p = 1, q = 3 }\n",
    ),
];

fn run_cli(command: &str, config: &Path, out: &Path) -> i32 {
    semigap::cli::run([
        "semigap",
        command,
        "--config",
        config.to_str().expect("utf-8 path"),
        "--out",
        out.to_str().expect("utf-8 path"),
    ])
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        let bytes = std::fs::read(entry.path()).map_err(|e| e.to_string())?;
        files.push((entry.file_name().to_string_lossy().into_owned(), bytes));
    }
    files.sort();
    Ok(files)
}

fn criterion_9() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (command, text) in DETERMINISM_CONFIGS {
        let config = tmp.path().join(format!("{command}.toml"));
        std::fs::write(&config, text).map_err(|e| e.to_string())?;
        let (first, second) = (
            tmp.path().join(format!("{command}-1")),
            tmp.path().join(format!("{command}-2")),
        );
        let codes = (
            run_cli(command, &config, &first),
            run_cli(command, &config, &second),
        );
        check(codes == (0, 0), format!("{command}: exit codes {codes:?}"))?;
        let (a, b) = (read_dir_sorted(&first)?, read_dir_sorted(&second)?);
        check(!a.is_empty(), format!("{command}: no outputs"))?;
        check(a == b, format!("{command}: outputs differ between runs"))?;
        for (name, bytes) in &a {
            let text = String::from_utf8_lossy(bytes);
            check(
                text.contains("config_hash"),
                format!("{command}: {name} does not embed the configuration hash"),
            )?;
        }
        compared += a.len();
    }
    Ok(format!(
        "{compared} artifacts byte-identical across two runs of all six subcommands"
    ))
}

fn report(n: &str, outcome: Outcome, elapsed: Duration, failures: &mut usize) {
    match outcome {
        Ok(detail) => println!("PASS criterion {n}: {detail} [{elapsed:.1?}]"),
        Err(detail) => {
            *failures += 1;
            println!("FAIL criterion {n}: {detail} [{elapsed:.1?}]");
        }
    }
}

fn guarded<T>(f: impl FnOnce() -> T) -> Result<T, String> {
    catch_unwind(AssertUnwindSafe(f)).map_err(|e| {
        e.downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default()
    })
}

fn main() {
    let mut failures = 0;
    let single: [(&str, fn() -> Outcome); 5] = [
        ("1", criterion_1),
        ("2", criterion_2),
        ("3", criterion_3),
        ("4", criterion_4),
        ("5", criterion_5),
    ];
    for (n, f) in single {
        let start = Instant::now();
        let outcome = guarded(f).and_then(|o| o);
        report(n, outcome, start.elapsed(), &mut failures);
    }
    let start = Instant::now();
    let (c6, c7) = guarded(criteria_6_and_7).unwrap_or_else(|e| (Err(e.clone()), Err(e)));
    let elapsed = start.elapsed();
    report("6", c6, elapsed, &mut failures);
    report("7", c7, elapsed, &mut failures);
    for (n, f) in [("8", criterion_8 as fn() -> Outcome), ("9", criterion_9)] {
        let start = Instant::now();
        let outcome = guarded(f).and_then(|o| o);
        report(n, outcome, start.elapsed(), &mut failures);
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
