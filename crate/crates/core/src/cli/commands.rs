use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{CocycleSpec, HallTarget, RunConfig, WellEntry};
use super::output::{cell, opt_cell, Artifacts};
use super::Failure;
use crate::cocycle_pairing::{
    build_area_cocycle, hall_cocycle, pair_with_projection, pair_with_projection_within,
    verify_cyclic, verify_group_cocycle, CocycleReport, CyclicCocycle, CyclicReport, GroupCocycle,
    PairingError, SymplecticData, TauC,
};
use crate::gap_certificate::{
    certificate_sweep, convergence_rate, loglog_slope, optimal_kappa, CertificateError,
    CertificateProblem, CertificateSweep, CutoffProfile, GapInterval,
};
use crate::lattice_sim::{
    bloch_spectrum, gap_emergence_sweep, gap_midpoint, hall_conductance, link_variable_chern,
    localization_sweep, model_gap_midpoint, projection_element, spectral_projection_on_grid,
    subband_cherns, GapSweep, HallResult, LatticeConfig, LatticeError, LocalizationRow,
    SubbandCherns,
};
use crate::model_operator::{
    counting_function, model_gaps, model_levels, mu_invariance_check, well_frequencies, FdOptions,
    ModelError, MuInvarianceReport, WellSpec,
};
use crate::twisted_algebra::{
    identity_suite, random_element, random_point, validate_multiplier, AlgebraElement,
    AlgebraError, IdentityReport, Multiplier, MultiplierReport, SuiteOptions,
};

fn lattice_err(e: LatticeError) -> Failure {
    match e {
        LatticeError::Config(_)
        | LatticeError::GridTooCoarse(_)
        | LatticeError::IncommensurateFlux { .. }
        | LatticeError::NegativePotential { .. }
        | LatticeError::BadWell { .. }
        | LatticeError::IncompatibleTranslation(_) => Failure::Config(e.to_string()),
        LatticeError::NoConvergence { .. } | LatticeError::Linalg(_) => {
            Failure::hypothesis("solver_failure", e.to_string())
        }
        LatticeError::InsideBand { .. } => Failure::hypothesis("lambda_not_in_gap", e.to_string()),
        LatticeError::RankJump { .. } => Failure::hypothesis("rank_jump", e.to_string()),
        LatticeError::NoSuchGap { .. } => Failure::hypothesis("no_such_gap", e.to_string()),
        LatticeError::Model(m) => model_err(m),
    }
}

fn model_err(e: ModelError) -> Failure {
    match e {
        ModelError::NotSpd(_)
        | ModelError::NotHermitian(_)
        | ModelError::Shape(_)
        | ModelError::AboveCutoff { .. } => Failure::Config(e.to_string()),
        ModelError::Incomplete => Failure::hypothesis("incomplete_spectrum", e.to_string()),
        ModelError::Linalg(_) => Failure::hypothesis("solver_failure", e.to_string()),
    }
}

fn cert_err(e: CertificateError) -> Failure {
    match e {
        CertificateError::Invalid(_) | CertificateError::KappaOutOfRange { .. } => {
            Failure::Config(e.to_string())
        }
        CertificateError::Refused(r) => Failure::hypothesis("certificate_refused", r.to_string()),
        CertificateError::NoEquivalence(_) => Failure::hypothesis("no_equivalence", e.to_string()),
    }
}

fn pairing_err(e: PairingError) -> Failure {
    match e {
        PairingError::NotProjection { .. } => {
            Failure::hypothesis("projection_defect", e.to_string())
        }
        _ => Failure::Config(e.to_string()),
    }
}

fn algebra_err(e: AlgebraError) -> Failure {
    Failure::Config(e.to_string())
}

fn missing(section: &str) -> Failure {
    Failure::Config(format!("the configuration has no [{section}] section"))
}

/// Fails with a configuration error when the subcommand's section is absent.
pub(super) fn check_section(command: &str, cfg: &RunConfig) -> Result<(), Failure> {
    let present = match command {
        "validate-algebra" => cfg.algebra.is_some(),
        "pair-cocycle" => cfg.cocycle.is_some(),
        "model-spectrum" => cfg.model.is_some(),
        "gap-certify" => cfg.certify.is_some(),
        "simulate" => cfg.simulate.is_some(),
        _ => cfg.hall.is_some(),
    };
    let name = match command {
        "validate-algebra" => "algebra",
        "pair-cocycle" => "cocycle",
        "model-spectrum" => "model",
        "gap-certify" => "certify",
        "simulate" => "simulate",
        _ => "hall",
    };
    if present {
        Ok(())
    } else {
        Err(missing(name))
    }
}

fn check_row(name: &str, value: f64, tol: f64, pass: bool) -> Vec<String> {
    vec![name.to_string(), cell(value), cell(tol), cell(pass)]
}

const CHECK_HEADER: [&str; 4] = ["check", "value", "tolerance", "pass"];

#[derive(Serialize)]
struct MultiplierEcho {
    rank: usize,
    numerators: Vec<i64>,
    denominator: i64,
}

impl From<&Multiplier> for MultiplierEcho {
    fn from(m: &Multiplier) -> Self {
        Self {
            rank: m.rank(),
            numerators: m.numerators().to_vec(),
            denominator: m.denominator(),
        }
    }
}

#[derive(Serialize)]
struct AlgebraSummary {
    multiplier: MultiplierEcho,
    multiplier_report: MultiplierReport,
    identities: IdentityReport,
}

pub(super) fn validate_algebra(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), Failure> {
    let sec = cfg.algebra.as_ref().ok_or_else(|| missing("algebra"))?;
    let m = sec.multiplier.build()?;
    let tol = cfg.tolerances.algebra;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let triples: Vec<[Vec<i64>; 3]> = (0..sec.cases.max(1))
        .map(|_| {
            [
                random_point(&mut rng, m.rank(), sec.radius),
                random_point(&mut rng, m.rank(), sec.radius),
                random_point(&mut rng, m.rank(), sec.radius),
            ]
        })
        .collect();
    let mrep = validate_multiplier(&m, &triples, tol);
    let opts = SuiteOptions {
        cases: sec.cases,
        max_support: sec.max_support,
        max_fiber: sec.max_fiber,
        radius: sec.radius,
        tolerance: tol,
    };
    let irep = identity_suite(&m, &opts, &mut rng).map_err(algebra_err)?;
    let checks = [
        ("multiplier_unimodularity", mrep.max_unimodularity_defect),
        ("multiplier_normalization", mrep.max_normalization_defect),
        ("multiplier_cocycle", mrep.max_cocycle_defect),
        ("associativity", irep.associativity),
        (
            "involution_antimultiplicative",
            irep.involution_antimultiplicative,
        ),
        ("involution_involutive", irep.involution_involutive),
        ("delta_relation", irep.delta_relation),
        ("delta_unitarity", irep.delta_unitarity),
        ("traciality", irep.traciality),
        ("positivity_violation", irep.positivity_violation),
        ("identity_unit", irep.identity_unit),
    ];
    let mut rows: Vec<Vec<String>> = checks
        .iter()
        .map(|&(n, v)| check_row(n, v, tol, v <= tol))
        .collect();
    rows.push(check_row(
        "untwisted_degeneration",
        irep.untwisted_degeneration,
        0.0,
        irep.untwisted_degeneration == 0.0,
    ));
    art.csv("checks.csv", &CHECK_HEADER, &rows)?;
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| r[3] == "false")
        .map(|r| r[0].clone())
        .collect();
    let failure = (!failed.is_empty()).then(|| {
        let code = if mrep.pass {
            "identity_violation"
        } else {
            "multiplier_invalid"
        };
        Failure::hypothesis(code, format!("failed checks: {}", failed.join(", ")))
    });
    let summary = AlgebraSummary {
        multiplier: (&m).into(),
        multiplier_report: mrep,
        identities: irep,
    };
    art.summary(&summary, failure.as_ref())?;
    failure.map_or(Ok(()), Err)
}

fn build_cocycle(spec: &CocycleSpec) -> Result<(GroupCocycle, Option<SymplecticData>), Failure> {
    match spec {
        CocycleSpec::Linear { v } => {
            if v.is_empty() {
                return Err(Failure::Config(
                    "linear cocycle needs a nonempty vector".into(),
                ));
            }
            Ok((GroupCocycle::linear(v.clone()), None))
        }
        CocycleSpec::Area { xi } => {
            let rank = xi.first().map_or(0, |r| r.len());
            if rank == 0 {
                return Err(Failure::Config("ξ needs at least one column".into()));
            }
            let data = SymplecticData::new(rank, xi.clone()).map_err(pairing_err)?;
            Ok((build_area_cocycle(&data).map_err(pairing_err)?, Some(data)))
        }
        CocycleSpec::Table {
            rank,
            degree,
            radius,
            normalized,
            entries,
        } => {
            let mut values = BTreeMap::new();
            for e in entries {
                if e.args.len() != *degree || e.args.iter().any(|g| g.len() != *rank) {
                    return Err(Failure::Config(format!(
                        "table entry {:?} does not match rank and degree",
                        e.args
                    )));
                }
                values.insert(e.args.clone(), e.value);
            }
            Ok((
                GroupCocycle::table(*rank, *degree, *radius, values, *normalized),
                None,
            ))
        }
    }
}

#[derive(Serialize)]
struct PairingOutcome {
    flux: [i64; 2],
    lambda: f64,
    grid: usize,
    radius: i64,
    idempotency_defect: f64,
    adjoint_defect: f64,
    pairing: f64,
    link_variable_chern: f64,
    agree: bool,
}

#[derive(Serialize)]
struct CocycleSummary {
    degree: usize,
    rank: usize,
    group_report: CocycleReport,
    cyclic_report: Option<CyclicReport>,
    vanishing_pairing: Option<f64>,
    trace_minus_rank: f64,
    hall_agreement: Option<f64>,
    pairing: Option<PairingOutcome>,
}

fn diagonal_projection<R: Rng>(rng: &mut R, n: usize) -> (DMatrix<Complex64>, usize) {
    let mut diag: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.5) { 1.0 } else { 0.0 })
        .collect();
    diag[0] = 1.0;
    let rank = diag.iter().filter(|&&d| d == 1.0).count();
    (
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::default()
            }
        }),
        rank,
    )
}

pub(super) fn pair_cocycle(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), Failure> {
    let sec = cfg.cocycle.as_ref().ok_or_else(|| missing("cocycle"))?;
    let (c, xi) = build_cocycle(&sec.cocycle)?;
    let m = match &sec.multiplier {
        Some(s) => s.build()?,
        None => Multiplier::trivial(c.rank),
    };
    if m.rank() != c.rank {
        return Err(Failure::Config(format!(
            "multiplier rank {} differs from cocycle rank {}",
            m.rank(),
            c.rank
        )));
    }
    if sec.max_support == 0 || sec.max_fiber == 0 {
        return Err(Failure::Config(
            "max_support and max_fiber must be positive".into(),
        ));
    }
    let tol = cfg.tolerances.cocycle;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tuples: Vec<Vec<Vec<i64>>> = (0..sec.samples.max(1))
        .map(|_| {
            (0..=c.degree)
                .map(|_| random_point(&mut rng, c.rank, sec.radius))
                .collect()
        })
        .collect();
    let group_report = verify_group_cocycle(&c, &tuples);
    let mut rows = vec![
        check_row(
            "group_cocycle_identity",
            group_report.max_identity_defect,
            tol,
            group_report.max_identity_defect < tol,
        ),
        check_row(
            "normalization",
            group_report.max_normalization_defect,
            tol,
            group_report.normalization_ok,
        ),
        check_row(
            "polynomial_bound_ratio",
            group_report.max_bound_ratio,
            1.0,
            group_report.bound_ok,
        ),
    ];

    let draw = |rng: &mut ChaCha8Rng, n: usize| {
        let s = rng.gen_range(1..=sec.max_support);
        random_element(rng, &m, n, s, sec.radius)
    };
    let (mut cyclic_report, mut vanishing) = (None, None);
    let (p0, rank) = diagonal_projection(&mut rng, sec.max_fiber);
    let trace_minus_rank = AlgebraElement::delta(m.clone(), &vec![0; c.rank], p0.clone())
        .trace()
        .re
        - rank as f64;
    rows.push(check_row(
        "trace_equals_rank",
        trace_minus_rank,
        0.0,
        trace_minus_rank == 0.0,
    ));
    if c.normalized {
        let tau = TauC { cocycle: c.clone() };
        let samples: Vec<Vec<AlgebraElement>> = (0..sec.samples)
            .map(|_| {
                let n = rng.gen_range(1..=sec.max_fiber);
                (0..c.degree + 2).map(|_| draw(&mut rng, n)).collect()
            })
            .collect();
        let rep = verify_cyclic(&tau, &samples, tol).map_err(pairing_err)?;
        rows.push(check_row(
            "cyclicity",
            rep.max_cyclic_defect,
            tol,
            rep.max_cyclic_defect <= tol,
        ));
        rows.push(check_row(
            "hochschild",
            rep.max_hochschild_defect,
            tol,
            rep.max_hochschild_defect <= tol,
        ));
        cyclic_report = Some(rep);
        if c.degree % 2 == 0 {
            let p = AlgebraElement::delta(m.clone(), &vec![0; c.rank], p0);
            let v = pair_with_projection(&c, &p).map_err(pairing_err)?;
            rows.push(check_row("vanishing_pairing", v, 0.0, v == 0.0));
            vanishing = Some(v);
        }
    }

    let mut hall_agreement = None;
    if let Some(data) = &xi {
        let hall = hall_cocycle(data).map_err(pairing_err)?;
        let mut worst = 0.0f64;
        for _ in 0..sec.hall_samples {
            let n = rng.gen_range(1..=sec.max_fiber);
            let t: Vec<AlgebraElement> = (0..3).map(|_| draw(&mut rng, n)).collect();
            let args: Vec<&AlgebraElement> = t.iter().collect();
            let a = hall.eval(&args).map_err(pairing_err)?;
            let b = crate::cocycle_pairing::eval_tau_c_tr(&c, &args).map_err(pairing_err)?;
            worst = worst.max((a - b).norm());
        }
        rows.push(check_row(
            "hall_cocycle_equals_area_pairing",
            worst,
            tol,
            worst <= tol,
        ));
        hall_agreement = Some(worst);
    }

    let mut pairing = None;
    let mut pairing_failure = None;
    if let Some(ps) = &sec.pairing {
        if xi.is_none() || c.rank != 2 {
            return Err(Failure::Config(
                "projection pairing needs an area cocycle on ℤ²".into(),
            ));
        }
        let lattice = LatticeConfig::harper(ps.flux.p, ps.flux.q);
        let lambda = gap_midpoint(&lattice, 0).map_err(lattice_err)?;
        let proj =
            spectral_projection_on_grid(&lattice, lambda, 1e-6, ps.grid).map_err(lattice_err)?;
        let chern = link_variable_chern(&proj.frames, ps.grid);
        let element = projection_element(&proj, 2, ps.radius).map_err(lattice_err)?;
        let (idem, adj) =
            crate::cocycle_pairing::projection_defect(&element).map_err(pairing_err)?;
        match pair_with_projection_within(&c, &element, cfg.tolerances.projection) {
            Ok(value) => {
                let agree = (value - chern).abs() < cfg.tolerances.chern;
                rows.push(check_row(
                    "pairing_minus_chern",
                    value - chern,
                    cfg.tolerances.chern,
                    agree,
                ));
                pairing = Some(PairingOutcome {
                    flux: [ps.flux.p, ps.flux.q],
                    lambda,
                    grid: ps.grid,
                    radius: ps.radius,
                    idempotency_defect: idem,
                    adjoint_defect: adj,
                    pairing: value,
                    link_variable_chern: chern,
                    agree,
                });
            }
            Err(e) => pairing_failure = Some(pairing_err(e)),
        }
    }
    art.csv("checks.csv", &CHECK_HEADER, &rows)?;
    let failed: Vec<String> = rows
        .iter()
        .filter(|r| r[3] == "false")
        .map(|r| r[0].clone())
        .collect();
    let failure = pairing_failure.or_else(|| {
        (!failed.is_empty()).then(|| {
            Failure::hypothesis(
                "cocycle_check_failed",
                format!("failed checks: {}", failed.join(", ")),
            )
        })
    });
    let summary = CocycleSummary {
        degree: c.degree,
        rank: c.rank,
        group_report,
        cyclic_report,
        vanishing_pairing: vanishing,
        trace_minus_rank,
        hall_agreement,
        pairing,
    };
    art.summary(&summary, failure.as_ref())?;
    failure.map_or(Ok(()), Err)
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, Failure> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Failure::Config(format!(
            "{what} must be a nonempty square matrix"
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn well_spec(e: &WellEntry) -> Result<WellSpec, Failure> {
    let fiber = match &e.fiber {
        Some(h) => h.to_matrix().map_err(lattice_err)?,
        None => DMatrix::zeros(1, 1),
    };
    WellSpec::new(
        matrix(&e.metric, "metric")?,
        matrix(&e.hessian_half, "hessian_half")?,
        fiber,
    )
    .map_err(model_err)
}

#[derive(Serialize)]
struct GapRow {
    a: f64,
    b: f64,
    count_below: usize,
}

#[derive(Serialize)]
struct ModelSummary {
    frequencies: Vec<Vec<f64>>,
    volume_normalised: Vec<bool>,
    spectrum: crate::model_operator::ModelSpectrum,
    gaps: Vec<GapRow>,
    mu_invariance: Option<MuInvarianceReport>,
}

pub(super) fn model_spectrum(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), Failure> {
    let sec = cfg.model.as_ref().ok_or_else(|| missing("model"))?;
    if sec.wells.is_empty() {
        return Err(Failure::Config("the model needs at least one well".into()));
    }
    let wells: Vec<WellSpec> = sec.wells.iter().map(well_spec).collect::<Result<_, _>>()?;
    let spectrum = model_levels(&wells, sec.cutoff).map_err(model_err)?;
    let gaps: Vec<GapRow> = model_gaps(&spectrum)
        .map_err(model_err)?
        .into_iter()
        .map(|g| {
            Ok(GapRow {
                a: g.a,
                b: g.b,
                count_below: counting_function(&spectrum, g.midpoint()).map_err(model_err)?,
            })
        })
        .collect::<Result<_, Failure>>()?;
    let frequencies = wells
        .iter()
        .map(|w| well_frequencies(w).map_err(model_err))
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<String>> = spectrum
        .levels
        .iter()
        .map(|l| vec![cell(l.value), cell(l.multiplicity)])
        .collect();
    art.csv("levels.csv", &["level", "multiplicity"], &rows)?;
    let rows: Vec<Vec<String>> = gaps
        .iter()
        .map(|g| vec![cell(g.a), cell(g.b), cell(g.count_below)])
        .collect();
    art.csv("gaps.csv", &["a", "b", "count_below"], &rows)?;
    let mu_invariance = if sec.mu_check.is_empty() {
        None
    } else {
        let opts = match wells[0].dim() {
            1 => FdOptions::one_dimensional(),
            2 => FdOptions::two_dimensional(),
            d => {
                return Err(Failure::Config(format!(
                    "the invariance check supports dimensions 1 and 2, got {d}"
                )))
            }
        };
        Some(
            mu_invariance_check(&wells[0], &sec.mu_check, &opts, cfg.tolerances.model)
                .map_err(model_err)?,
        )
    };
    let failure = match &mu_invariance {
        Some(r) if !r.pass => Some(Failure::hypothesis(
            "mu_invariance",
            format!("spectra of K(μ) deviate by more than {}", r.tolerance),
        )),
        _ => None,
    };
    let summary = ModelSummary {
        frequencies,
        volume_normalised: wells.iter().map(|w| w.volume_normalised()).collect(),
        spectrum,
        gaps,
        mu_invariance,
    };
    art.summary(&summary, failure.as_ref())?;
    failure.map_or(Ok(()), Err)
}

#[derive(Serialize)]
struct CertifySummary {
    sweep: CertificateSweep,
    /// Least-squares slope of `ln(a₂ − a₁)` against `ln μ` over certified rows.
    slope: Option<f64>,
    expected_slope: f64,
    optimal_kappa: (f64, f64),
}

pub(super) fn gap_certify(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), Failure> {
    let sec = cfg.certify.as_ref().ok_or_else(|| missing("certify"))?;
    let gap = GapInterval::new(sec.model_gap[0], sec.model_gap[1]).map_err(cert_err)?;
    let mus = sec.couplings.resolve()?;
    if mus.is_empty() {
        return Err(Failure::Config(
            "gap-certify needs couplings (list, sweep or --mu-sweep)".into(),
        ));
    }
    let problem = CertificateProblem {
        metric_bound: sec.metric_bound,
        morse_constant: sec.morse_constant,
        spectral_bottom: sec.spectral_bottom,
        mode: sec.mode(),
    };
    let profile = CutoffProfile {
        samples: sec.profile_samples,
    };
    let sweep = certificate_sweep(&problem, sec.kappa, &profile, gap, &mus).map_err(cert_err)?;
    let rows: Vec<Vec<String>> = sweep
        .rows
        .iter()
        .map(|r| {
            vec![
                cell(r.mu),
                opt_cell(r.a2),
                opt_cell(r.b2),
                cell(r.certified),
                r.reason.clone().unwrap_or_default(),
            ]
        })
        .collect();
    art.csv(
        "sweep.csv",
        &["mu", "a2", "b2", "certified", "reason"],
        &rows,
    )?;
    let points: Vec<(f64, f64)> = sweep
        .rows
        .iter()
        .filter(|r| r.certified)
        .filter_map(|r| r.a2.map(|a2| (r.mu, a2 - gap.a)))
        .collect();
    let slope = (points.len() >= 2).then(|| loglog_slope(&points));
    let expected_slope = match problem.mode {
        crate::gap_certificate::EstimatorMode::Flat => 1.0 - 2.0 * sec.kappa,
        _ => convergence_rate(sec.kappa),
    };
    let failure = sweep.first_certified_mu.is_none().then(|| {
        let last = sweep
            .rows
            .last()
            .and_then(|r| r.reason.clone())
            .unwrap_or_default();
        Failure::hypothesis(
            "no_certified_coupling",
            format!("no coupling certified; last refusal: {last}"),
        )
    });
    let summary = CertifySummary {
        sweep,
        slope,
        expected_slope,
        optimal_kappa: optimal_kappa(),
    };
    art.summary(&summary, failure.as_ref())?;
    failure.map_or(Ok(()), Err)
}

#[derive(Serialize)]
struct BaseGap {
    a: f64,
    b: f64,
    bands_below: usize,
    ids: f64,
}

#[derive(Serialize)]
struct SimulateSummary {
    mu: f64,
    band_count: usize,
    k_points: usize,
    cells_per_supercell: usize,
    gaps: Vec<BaseGap>,
    sweep: Option<GapSweep>,
    localization: Option<Vec<LocalizationRow>>,
}

pub(super) fn simulate(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), Failure> {
    let sec = cfg.simulate.as_ref().ok_or_else(|| missing("simulate"))?;
    let lattice = &sec.lattice;
    lattice.validate().map_err(lattice_err)?;
    let mus = sec.couplings.resolve()?;
    let bs = bloch_spectrum(lattice).map_err(lattice_err)?;
    let mut rows = Vec::new();
    for (i, (k, e)) in bs.k_points.iter().zip(&bs.energies).enumerate() {
        for (n, x) in e.iter().enumerate() {
            rows.push(vec![cell(i), cell(k[0]), cell(k[1]), cell(n), cell(x)]);
        }
    }
    art.csv(
        "bands.csv",
        &["k_index", "k1", "k2", "band", "energy"],
        &rows,
    )?;
    let lo = bs
        .energies
        .iter()
        .flatten()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let hi = bs.complete_below();
    let rows: Vec<Vec<String>> = if hi > lo {
        bs.ids_samples(lo, hi - 1e-9 * hi.abs().max(1.0), sec.ids_points)
            .iter()
            .map(|(l, v)| vec![cell(l), cell(v)])
            .collect()
    } else {
        Vec::new()
    };
    art.csv("ids.csv", &["lambda", "ids"], &rows)?;

    let sweep = match sec.cutoff {
        Some(cutoff) => {
            let list = if mus.is_empty() {
                vec![lattice.mu]
            } else {
                mus.clone()
            };
            Some(gap_emergence_sweep(lattice, &list, cutoff).map_err(lattice_err)?)
        }
        None => None,
    };
    let mut rows = Vec::new();
    match &sweep {
        Some(s) => {
            for r in &s.rows {
                for g in &r.gaps {
                    rows.push(vec![
                        cell(r.mu),
                        cell(g.a),
                        cell(g.b),
                        cell(g.ids),
                        cell(g.trace_equals_rank),
                    ]);
                }
            }
        }
        None => {
            for g in &bs.gaps {
                rows.push(vec![
                    cell(lattice.mu),
                    cell(g.a),
                    cell(g.b),
                    cell(g.ids),
                    String::new(),
                ]);
            }
        }
    }
    art.csv(
        "gaps.csv",
        &["mu", "a", "b", "ids_value", "model_match"],
        &rows,
    )?;

    let localization = match sec.localization_kappa {
        Some(kappa) => {
            let list = if mus.is_empty() {
                vec![lattice.mu]
            } else {
                mus.clone()
            };
            let rows = localization_sweep(lattice, &list, kappa).map_err(lattice_err)?;
            let csv: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![cell(r.mu), cell(r.defect)])
                .collect();
            art.csv("localization.csv", &["mu", "defect"], &csv)?;
            Some(rows)
        }
        None => None,
    };
    let failure = sweep.as_ref().and_then(|s| {
        let smallest = s.rows.iter().min_by(|a, b| a.mu.total_cmp(&b.mu))?;
        smallest
            .gaps
            .iter()
            .find(|g| !g.trace_equals_rank)
            .map(|g| {
                Failure::hypothesis(
                    "trace_rank_mismatch",
                    format!(
                        "at μ = {} the gap ({}, {}) has IDS {}/{} but model count {}",
                        smallest.mu, g.a, g.b, g.ids_numerator, g.ids_denominator, g.model_count
                    ),
                )
            })
    });
    let summary = SimulateSummary {
        mu: lattice.mu,
        band_count: bs.band_count(),
        k_points: bs.k_points.len(),
        cells_per_supercell: bs.cells_per_supercell,
        gaps: bs
            .gaps
            .iter()
            .map(|g| BaseGap {
                a: g.a,
                b: g.b,
                bands_below: g.bands_below,
                ids: g.ids,
            })
            .collect(),
        sweep,
        localization,
    };
    art.summary(&summary, failure.as_ref())?;
    failure.map_or(Ok(()), Err)
}

fn hall_energy(target: &HallTarget, lattice: &LatticeConfig) -> Result<f64, Failure> {
    match (target.lambda, target.gap_index, target.model_gap) {
        (Some(l), None, None) => Ok(l),
        (None, Some(i), None) => gap_midpoint(lattice, i).map_err(lattice_err),
        (None, None, Some(i)) => {
            let cutoff = target.model_cutoff.ok_or_else(|| {
                Failure::Config("target.model_gap needs target.model_cutoff".into())
            })?;
            model_gap_midpoint(lattice, i, cutoff).map_err(lattice_err)
        }
        _ => Err(Failure::Config(
            "set exactly one of target.lambda, target.gap_index, target.model_gap".into(),
        )),
    }
}

#[derive(Serialize)]
struct HallSummary {
    results: Vec<HallResult>,
    subbands: Option<SubbandCherns>,
}

pub(super) fn hall(cfg: &RunConfig, art: &mut Artifacts) -> Result<(), Failure> {
    let sec = cfg.hall.as_ref().ok_or_else(|| missing("hall"))?;
    sec.lattice.validate().map_err(lattice_err)?;
    let mus = sec.couplings.resolve()?;
    let list = if mus.is_empty() {
        vec![sec.lattice.mu]
    } else {
        mus
    };
    let mut results = Vec::with_capacity(list.len());
    for mu in list {
        let mut lattice = sec.lattice.clone();
        lattice.mu = mu;
        let lambda = hall_energy(&sec.target, &lattice)?;
        results.push(hall_conductance(&lattice, lambda, &sec.options).map_err(lattice_err)?);
    }
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| vec![cell(r.mu), cell(r.lambda), cell(r.chern_a), cell(r.chern_b)])
        .collect();
    art.csv("hall.csv", &["mu", "lambda", "chern_a", "chern_b"], &rows)?;
    let subbands = match sec.subband_grid {
        Some(n) => Some(subband_cherns(&sec.lattice, n).map_err(lattice_err)?),
        None => None,
    };
    let failure = if let Some(r) = results.iter().find(|r| !r.agree) {
        Some(Failure::hypothesis(
            "methods_disagree",
            format!(
                "at μ = {}: link variables give {}, Kubo trace gives {}",
                r.mu, r.chern_a, r.chern_b
            ),
        ))
    } else if let Some(r) = results.iter().find(|r| !r.integer) {
        Some(Failure::hypothesis(
            "not_integer",
            format!(
                "at μ = {} the Chern numbers {} and {} are not integers",
                r.mu, r.chern_a, r.chern_b
            ),
        ))
    } else {
        match &subbands {
            Some(s) if s.sum.abs() >= cfg.tolerances.chern => Some(Failure::hypothesis(
                "sum_rule",
                format!("subband Chern numbers sum to {}", s.sum),
            )),
            _ => None,
        }
    };
    art.summary(&HallSummary { results, subbands }, failure.as_ref())?;
    failure.map_or(Ok(()), Err)
}
