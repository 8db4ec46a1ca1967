//! TOML run configuration. Every table rejects unknown keys, energies are in
//! the units of the Hamiltonian, lengths in unit cells and flux in flux
//! quanta per unit cell.

use serde::{Deserialize, Serialize};

use crate::gap_certificate::{log_spaced, EstimatorMode};
use crate::lattice_sim::{Flux, HallOptions, HermitianSpec, LatticeConfig};
use crate::twisted_algebra::{LandauGauge, Multiplier};

use super::Failure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Seed of every random sample drawn by the run.
    #[serde(default)]
    pub seed: u64,
    /// Directory receiving the artifacts; `--out` takes precedence. Not part of the hash.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub algebra: Option<AlgebraSection>,
    #[serde(default)]
    pub cocycle: Option<CocycleSection>,
    #[serde(default)]
    pub model: Option<ModelSection>,
    #[serde(default)]
    pub certify: Option<CertifySection>,
    #[serde(default)]
    pub simulate: Option<SimulateSection>,
    #[serde(default)]
    pub hall: Option<HallSection>,
}

/// Pass/fail thresholds shared by the subcommands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Largest admissible defect of an algebra identity.
    #[serde(default = "tol_algebra")]
    pub algebra: f64,
    /// Largest admissible cocycle, cyclicity or `tr_K` defect.
    #[serde(default = "tol_cocycle")]
    pub cocycle: f64,
    /// Projection defect accepted for truncated band projections.
    #[serde(default = "tol_projection")]
    pub projection: f64,
    /// Agreement and integrality of Chern numbers (dimensionless).
    #[serde(default = "tol_chern")]
    pub chern: f64,
    /// Relative deviation allowed in the coupling-invariance check.
    #[serde(default = "tol_model")]
    pub model: f64,
}

fn tol_algebra() -> f64 {
    1e-12
}
fn tol_cocycle() -> f64 {
    1e-10
}
fn tol_projection() -> f64 {
    1e-3
}
fn tol_chern() -> f64 {
    0.01
}
fn tol_model() -> f64 {
    2e-3
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebra: tol_algebra(),
            cocycle: tol_cocycle(),
            projection: tol_projection(),
            chern: tol_chern(),
            model: tol_model(),
        }
    }
}

/// Phase twist of the algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MultiplierSpec {
    Trivial {
        rank: usize,
    },
    /// Uniform field with `p/q` flux quanta per unit cell on `ℤ²`.
    Magnetic {
        p: i64,
        q: i64,
        #[serde(default = "default_gauge")]
        gauge: LandauGauge,
    },
    /// `Θ = numerators / denominator`, row-major `rank × rank`.
    Rational {
        rank: usize,
        numerators: Vec<i64>,
        denominator: i64,
    },
}

fn default_gauge() -> LandauGauge {
    LandauGauge::LandauX
}

impl MultiplierSpec {
    pub fn build(&self) -> Result<Multiplier, Failure> {
        let m = match self {
            Self::Trivial { rank } => Ok(Multiplier::trivial(*rank)),
            Self::Magnetic { p, q, gauge } => Multiplier::magnetic(*p, *q, *gauge),
            Self::Rational {
                rank,
                numerators,
                denominator,
            } => Multiplier::new(*rank, numerators.clone(), *denominator),
        };
        let m = m.map_err(|e| Failure::Config(e.to_string()))?;
        if m.rank() == 0 {
            return Err(Failure::Config("multiplier rank must be positive".into()));
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSection {
    pub multiplier: MultiplierSpec,
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default = "default_support")]
    pub max_support: usize,
    #[serde(default = "default_fiber")]
    pub max_fiber: usize,
    /// Support points are drawn from the box `[−radius, radius]^rank`.
    #[serde(default = "default_radius")]
    pub radius: i64,
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

/// Group cocycle on `ℤ^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CocycleSpec {
    /// `c(γ) = ⟨v, γ⟩`.
    Linear { v: Vec<f64> },
    /// Area cocycle of `ξ`, a `2g × d` matrix of periods.
    Area { xi: Vec<Vec<f64>> },
    /// Explicit values on tuples with every argument of ℓ¹ length at most `radius`.
    Table {
        rank: usize,
        degree: usize,
        radius: u64,
        #[serde(default)]
        normalized: bool,
        entries: Vec<TableEntry>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub args: Vec<Vec<i64>>,
    pub value: f64,
}

/// Harper band projection paired with the cocycle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairingSpec {
    pub flux: Flux,
    /// Momenta per axis of the grid sampling the projection.
    #[serde(default = "default_pairing_grid")]
    pub grid: usize,
    /// Box half width of the truncated projection, in magnetic cells.
    #[serde(default = "default_pairing_radius")]
    pub radius: i64,
}

fn default_pairing_grid() -> usize {
    64
}
fn default_pairing_radius() -> i64 {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CocycleSection {
    pub cocycle: CocycleSpec,
    /// Multiplier of the random algebra elements; trivial when absent.
    #[serde(default)]
    pub multiplier: Option<MultiplierSpec>,
    /// Random tuples for the group and cyclic identities.
    #[serde(default = "default_cocycle_samples")]
    pub samples: usize,
    /// Random triples comparing `tr_K` with `τ_Ψ#Tr` (area cocycles only).
    #[serde(default = "default_hall_samples")]
    pub hall_samples: usize,
    #[serde(default = "default_cocycle_support")]
    pub max_support: usize,
    #[serde(default = "default_cocycle_fiber")]
    pub max_fiber: usize,
    #[serde(default = "default_cocycle_radius")]
    pub radius: i64,
    #[serde(default)]
    pub pairing: Option<PairingSpec>,
}

fn default_cocycle_samples() -> usize {
    500
}
fn default_hall_samples() -> usize {
    200
}
fn default_cocycle_support() -> usize {
    5
}
fn default_cocycle_fiber() -> usize {
    2
}
fn default_cocycle_radius() -> i64 {
    2
}

/// One Morse well: inverse metric `G`, half Hessian `W` and fiber endomorphism `B̄`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellEntry {
    pub metric: Vec<Vec<f64>>,
    /// `W = ½∇²V` at the well, energy per squared length.
    pub hessian_half: Vec<Vec<f64>>,
    /// Hermitian `B̄` in energy units; zero on a one-dimensional fiber when absent.
    #[serde(default)]
    pub fiber: Option<HermitianSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// Energy cutoff `Λ` of the enumeration.
    pub cutoff: f64,
    pub wells: Vec<WellEntry>,
    /// Couplings for the finite-difference invariance check of the first well.
    #[serde(default)]
    pub mu_check: Vec<f64>,
}

/// Log-spaced couplings from `from` to `to`, both included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

/// Explicit coupling list, log-spaced sweep, or neither.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couplings {
    #[serde(default)]
    pub list: Vec<f64>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

impl Couplings {
    pub fn resolve(&self) -> Result<Vec<f64>, Failure> {
        let mut out = self.list.clone();
        if let Some(s) = &self.sweep {
            if !(s.from > 0.0 && s.to > 0.0) || s.count == 0 {
                return Err(Failure::Config(
                    "coupling sweep needs positive bounds and count".into(),
                ));
            }
            out.extend(log_spaced(s.from, s.to, s.count));
        }
        if let Some(bad) = out.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
            return Err(Failure::Config(format!(
                "couplings must be positive, got {bad}"
            )));
        }
        Ok(out)
    }

    /// Applies `--mu-sweep A:B`, keeping the configured count.
    pub fn override_range(&mut self, from: f64, to: f64, default_count: usize) {
        let count = self.sweep.as_ref().map_or(default_count, |s| s.count);
        self.list.clear();
        self.sweep = Some(SweepSpec { from, to, count });
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Flat,
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    /// Cutoff exponent: wells are cut off at radius `μ^κ`.
    pub kappa: f64,
    /// Model gap `(a₁, b₁)`, energy.
    pub model_gap: [f64; 2],
    /// Upper bounds of the principal symbols of both operators on unit covectors.
    #[serde(default = "unit_pair")]
    pub metric_bound: [f64; 2],
    /// `c₀` in `V ≥ c₀|x − x̄|²` near the wells, energy per squared length.
    pub morse_constant: f64,
    /// Lower bounds of both spectra, energy.
    #[serde(default)]
    pub spectral_bottom: [f64; 2],
    #[serde(default = "default_estimator")]
    pub estimator: EstimatorKind,
    /// `(C_ρ, C_β, C_ε)` of the general estimator.
    #[serde(default = "unit_triple")]
    pub constants: [f64; 3],
    /// Sample points of the cutoff profile on `[1, 2]`.
    #[serde(default = "default_profile_samples")]
    pub profile_samples: usize,
    #[serde(default)]
    pub couplings: Couplings,
}

fn unit_pair() -> [f64; 2] {
    [1.0, 1.0]
}
fn unit_triple() -> [f64; 3] {
    [1.0, 1.0, 1.0]
}
fn default_estimator() -> EstimatorKind {
    EstimatorKind::Flat
}
fn default_profile_samples() -> usize {
    10_000
}

impl CertifySection {
    pub fn mode(&self) -> EstimatorMode {
        match self.estimator {
            EstimatorKind::Flat => EstimatorMode::Flat,
            EstimatorKind::General => {
                let [c_rho, c_beta, c_eps] = self.constants;
                EstimatorMode::General {
                    c_rho,
                    c_beta,
                    c_eps,
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub lattice: LatticeConfig,
    /// Energy cutoff `Λ` of the gap-emergence comparison; needs declared wells.
    #[serde(default)]
    pub cutoff: Option<f64>,
    #[serde(default)]
    pub couplings: Couplings,
    /// Number of IDS samples across the computed spectrum.
    #[serde(default = "default_ids_points")]
    pub ids_points: usize,
    /// Cutoff exponent of the localisation sweep; skipped when absent.
    #[serde(default)]
    pub localization_kappa: Option<f64>,
}

fn default_ids_points() -> usize {
    200
}

/// Energy at which the Hall conductance is evaluated; exactly one field is set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HallTarget {
    /// Explicit energy inside a gap.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Index of a detected gap of the band structure at each coupling.
    #[serde(default)]
    pub gap_index: Option<usize>,
    /// Index of a gap of the model operator of the declared wells.
    #[serde(default)]
    pub model_gap: Option<usize>,
    /// Enumeration cutoff for `model_gap`, energy.
    #[serde(default)]
    pub model_cutoff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HallSection {
    pub lattice: LatticeConfig,
    pub target: HallTarget,
    #[serde(default)]
    pub options: HallOptions,
    #[serde(default)]
    pub couplings: Couplings,
    /// Also compute the Chern number of every isolated subband on this grid.
    #[serde(default)]
    pub subband_grid: Option<usize>,
}
