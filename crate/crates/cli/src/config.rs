//! Versioned JSON experiment configuration.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "experiment": { "kind": "solve" },
//!   "domain": { "n": 1, "resolution": 128 },
//!   "rhs": { "kind": "trig_poly", "amplitude": 0.3, "frequencies": [[1, 0]] },
//!   "solver": { "newton_tol": 1e-10 },
//!   "params": { "K": 5.0 },
//!   "output_dir": "out",
//!   "seed": 7
//! }
//! ```
//!
//! Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use malab_core::moduli::ModulusOfContinuity;
use malab_core::{make_domain, CompanionMap, Domain, ParamOverrides, RhsSpec, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs: Option<RhsSpec>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub params: ParamOverrides,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Replaces the seed of a Weierstrass right-hand side.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub n: usize,
    pub resolution: usize,
}

fn default_seeds() -> u64 {
    3
}

fn default_radii() -> Vec<f64> {
    (2..=6).map(|k| 2f64.powi(-k)).collect()
}

fn default_chi() -> f64 {
    4.0 / 3.0
}

fn one() -> f64 {
    1.0
}

fn default_qs() -> Vec<f64> {
    vec![9.0, 16.0, 100.0]
}

fn default_family() -> Vec<ModulusOfContinuity> {
    vec![
        ModulusOfContinuity::Hoelder { a: 1.0, alpha: 0.25 },
        ModulusOfContinuity::Hoelder { a: 1.0, alpha: 0.5 },
        ModulusOfContinuity::Hoelder { a: 1.0, alpha: 1.0 },
        ModulusOfContinuity::Linear { l: 1.0 },
        ModulusOfContinuity::LogPower { a: 1.0, beta: 0.5 },
        ModulusOfContinuity::LogPower { a: 1.0, beta: 0.75 },
        ModulusOfContinuity::LogPower { a: 1.0, beta: 1.0 },
    ]
}

fn default_ps() -> Vec<f64> {
    vec![2.0, 4.0, 8.0, 16.0]
}

fn default_eps() -> Vec<f64> {
    vec![0.01, 0.02, 0.04]
}

fn default_kmax() -> u32 {
    8
}

fn default_skoda_ps() -> Vec<f64> {
    vec![1.0, 2.0, 4.0]
}

fn default_maps() -> Vec<CompanionMap> {
    vec![CompanionMap::LogShift, CompanionMap::Power { s: 0.5 }]
}

fn default_dims() -> Vec<usize> {
    vec![2, 3, 4]
}

fn default_annuli() -> u32 {
    8
}

fn default_samples() -> usize {
    100
}

/// Experiment kind and its own options.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Solve {
        /// Also evaluate the residual on the half-cell shifted grids
        /// (manufactured right-hand sides only).
        #[serde(default)]
        refine: bool,
    },
    MollifySweep {
        /// Corpus size; seeds are `seed, seed + 1, ...`.
        #[serde(default = "default_seeds")]
        seeds: u64,
        #[serde(default = "default_radii")]
        radii: Vec<f64>,
        /// Reference modulus; the empirical modulus of each field when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modulus: Option<ModulusOfContinuity>,
    },
    ModuliCheck {
        #[serde(default = "default_family")]
        moduli: Vec<ModulusOfContinuity>,
        #[serde(default = "default_chi")]
        chi: f64,
        #[serde(default = "one")]
        c4: f64,
        #[serde(default = "default_qs")]
        qs: Vec<f64>,
    },
    GradientLadder {
        /// Weierstrass level counts to compare.
        refinements: Vec<u32>,
        #[serde(default = "default_ps")]
        ps: Vec<f64>,
        #[serde(default = "default_eps")]
        eps: Vec<f64>,
        #[serde(default = "default_kmax")]
        kmax: u32,
    },
    DiffIneq,
    SkodaCompanion {
        #[serde(default = "default_skoda_ps")]
        ps: Vec<f64>,
        #[serde(default = "default_maps")]
        maps: Vec<CompanionMap>,
    },
    Pogorelov {
        #[serde(default = "default_dims")]
        dims: Vec<usize>,
        #[serde(default = "default_annuli")]
        annuli: u32,
        #[serde(default = "default_samples")]
        samples: usize,
    },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Solve { .. } => "solve",
            Experiment::MollifySweep { .. } => "mollify_sweep",
            Experiment::ModuliCheck { .. } => "moduli_check",
            Experiment::GradientLadder { .. } => "gradient_ladder",
            Experiment::DiffIneq => "diff_ineq",
            Experiment::SkodaCompanion { .. } => "skoda_companion",
            Experiment::Pogorelov { .. } => "pogorelov",
        }
    }

    fn needs_rhs(&self) -> bool {
        !matches!(self, Experiment::ModuliCheck { .. } | Experiment::Pogorelov { .. })
    }
}

fn invalid(key: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        key: Some(key.to_string()),
        message: msg.into(),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let key = if path == "." || path.is_empty() {
                None
            } else {
                Some(path)
            };
            CliError::Config {
                key,
                message: inner.to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            key: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The right-hand side with the experiment seed applied.
    pub fn effective_rhs(&self) -> Option<RhsSpec> {
        let mut rhs = self.rhs.clone()?;
        if let (RhsSpec::Weierstrass { seed, .. }, Some(s)) = (&mut rhs, self.seed) {
            *seed = s;
        }
        Some(rhs)
    }

    pub fn effective_seed(&self) -> u64 {
        match (&self.rhs, self.seed) {
            (_, Some(s)) => s,
            (Some(RhsSpec::Weierstrass { seed, .. }), None) => *seed,
            _ => 0,
        }
    }

    pub fn domain(&self) -> Result<Domain, CliError> {
        let spec = self.domain.ok_or_else(|| invalid("domain", "missing domain"))?;
        make_domain(spec.n, spec.resolution).map_err(|e| invalid("domain", e.to_string()))
    }

    /// Checks everything that can be checked without running the experiment.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(invalid(
                "schema_version",
                format!("unsupported schema_version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        self.solver
            .validate()
            .map_err(|e| invalid("solver", e.to_string()))?;
        if self.experiment.needs_rhs() {
            let d = self.domain()?;
            let rhs = self.rhs.as_ref().ok_or_else(|| invalid("rhs", "missing rhs"))?;
            if let RhsSpec::Manufactured { potential } = rhs {
                potential
                    .check(&d)
                    .map_err(|e| invalid("rhs.potential", e.to_string()))?;
            }
        }
        let positive = |key: &str, v: &[f64]| {
            if v.is_empty() || v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                Err(invalid(key, "expected a nonempty list of positive numbers"))
            } else {
                Ok(())
            }
        };
        match &self.experiment {
            Experiment::Solve { .. } | Experiment::DiffIneq => {}
            Experiment::MollifySweep { seeds, radii, .. } => {
                if *seeds == 0 {
                    return Err(invalid("experiment.seeds", "need at least one seed"));
                }
                positive("experiment.radii", radii)?;
                if !matches!(self.rhs, Some(RhsSpec::Weierstrass { .. })) {
                    return Err(invalid("rhs.kind", "mollify_sweep needs a weierstrass rhs"));
                }
            }
            Experiment::ModuliCheck { moduli, chi, c4, qs } => {
                if moduli.is_empty() {
                    return Err(invalid("experiment.moduli", "empty modulus list"));
                }
                if !(*chi > 1.0) {
                    return Err(invalid("experiment.chi", "chi must exceed 1"));
                }
                if !(*c4 > 0.0) {
                    return Err(invalid("experiment.c4", "c4 must be positive"));
                }
                positive("experiment.qs", qs)?;
            }
            Experiment::GradientLadder {
                refinements,
                ps,
                eps,
                kmax,
            } => {
                if refinements.is_empty() {
                    return Err(invalid("experiment.refinements", "empty refinement list"));
                }
                if !matches!(self.rhs, Some(RhsSpec::Weierstrass { .. })) {
                    return Err(invalid("rhs.kind", "gradient_ladder needs a weierstrass rhs"));
                }
                positive("experiment.ps", ps)?;
                positive("experiment.eps", eps)?;
                if *kmax < 4 {
                    return Err(invalid("experiment.kmax", "kmax must be at least 4"));
                }
            }
            Experiment::SkodaCompanion { ps, maps } => {
                positive("experiment.ps", ps)?;
                for m in maps {
                    m.validate()
                        .map_err(|e| invalid("experiment.maps", e.to_string()))?;
                }
            }
            Experiment::Pogorelov {
                dims,
                annuli,
                samples,
            } => {
                if dims.is_empty() || dims.iter().any(|n| !(2..=4).contains(n)) {
                    return Err(invalid("experiment.dims", "dimensions must lie in 2..=4"));
                }
                if *annuli < 4 {
                    return Err(invalid("experiment.annuli", "need at least 4 annuli"));
                }
                if *samples == 0 {
                    return Err(invalid("experiment.samples", "need at least one sample"));
                }
            }
        }
        Ok(())
    }
}
