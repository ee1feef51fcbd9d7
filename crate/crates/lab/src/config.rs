//! Experiment configuration: one TOML file with nested sections, every key
//! with a documented default, unknown keys rejected. Command-line flags
//! override file values.

use crate::error::{LabError, Result};
use rbm_core::{EnsembleConfig, EnsembleParams, Real};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Dos,
    Locmoments,
    VolumeDiff,
    Les,
    WegnerMinami,
    Identities,
    Decoupling,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::Dos => "dos",
            ExperimentKind::Locmoments => "locmoments",
            ExperimentKind::VolumeDiff => "volume-diff",
            ExperimentKind::Les => "les",
            ExperimentKind::WegnerMinami => "wegner-minami",
            ExperimentKind::Identities => "identities",
            ExperimentKind::Decoupling => "decoupling",
        }
    }
}

/// DOS experiment parameters (defaults in parentheses).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DosParams {
    /// energy grid start (-3.0)
    pub e_min: Real,
    /// energy grid end (3.0)
    pub e_max: Real,
    /// energy grid step (0.25)
    pub e_step: Real,
    /// ε ladder for the resolvent estimator ([0.2, 0.1, 0.05])
    pub eps_ladder: Vec<Real>,
    /// Monte Carlo samples for the resolvent estimator (2000)
    pub samples: usize,
    /// samples for the histogram estimator (1000)
    pub hist_samples: usize,
    /// histogram bin width; 0 selects the Freedman–Diaconis rule (0.0)
    pub bin_width: Real,
    /// highest trace moment (4)
    pub p_max: u32,
    /// use only the center diagonal entry (infinite-volume variant) (false)
    pub center_only: bool,
}

impl Default for DosParams {
    fn default() -> Self {
        DosParams {
            e_min: -3.0,
            e_max: 3.0,
            e_step: 0.25,
            eps_ladder: vec![0.2, 0.1, 0.05],
            samples: 2000,
            hist_samples: 1000,
            bin_width: 0.0,
            p_max: 4,
            center_only: false,
        }
    }
}

impl DosParams {
    pub fn grid(&self) -> Vec<Real> {
        let mut grid = Vec::new();
        let mut e = self.e_min;
        while e <= self.e_max + 1e-12 {
            grid.push(e);
            e += self.e_step;
        }
        grid
    }
}

/// Localization-moment experiment parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LocMomentsParams {
    /// fractional power s ∈ (0,1) (0.3)
    pub s: Real,
    /// energy E of the shift (0.0)
    pub e0: Real,
    /// imaginary part ε ≥ 0 of the shift (0.0)
    pub eps: Real,
    /// profile center index, absolute (0)
    pub center: i64,
    /// largest index distance (30)
    pub max_distance: usize,
    /// Monte Carlo samples (10000)
    pub samples: usize,
    /// smallest distance used by the decay fit (5)
    pub fit_min_distance: usize,
    /// samples for the spectral-averaging grid (2000)
    pub sa_samples: usize,
}

impl Default for LocMomentsParams {
    fn default() -> Self {
        LocMomentsParams {
            s: 0.3,
            e0: 0.0,
            eps: 0.0,
            center: 0,
            max_distance: 30,
            samples: 10_000,
            fit_min_distance: 5,
            sa_samples: 2000,
        }
    }
}

/// Volume-difference experiment parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct VolumeDiffParams {
    /// fractional power s ∈ (0, 1/9) (0.1 is rejected; default 0.05)
    pub s: Real,
    /// shift energy (0.0)
    pub e0: Real,
    /// shift imaginary part (1.0)
    pub eps: Real,
    /// diagonal index j, absolute (0)
    pub j: i64,
    /// small half-sizes M, coupled to the ensemble half-size N ([10, 20, 40])
    pub m_ladder: Vec<usize>,
    /// Monte Carlo samples (10000)
    pub samples: usize,
}

impl Default for VolumeDiffParams {
    fn default() -> Self {
        VolumeDiffParams {
            s: 0.05,
            e0: 0.0,
            eps: 1.0,
            j: 0,
            m_ladder: vec![10, 20, 40],
            samples: 10_000,
        }
    }
}

/// Local-eigenvalue-statistics experiment parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct LesParams {
    /// window center energy E₀ (0.0)
    pub e0: Real,
    /// expected count λ in the count window (1.0)
    pub lambda_target: Real,
    /// realizations per size (20000)
    pub realizations: usize,
    /// block-superposition exponent α ∈ (0,1) (0.5)
    pub alpha: Real,
    /// samples for the ε-ladder intensity estimate (200000)
    pub intensity_samples: usize,
    /// λ of the wider window used for the gap statistic (20.0)
    pub gap_lambda: Real,
    /// compare against the block-superposed process (true)
    pub block_compare: bool,
    /// persist per-realization point lists as JSON-lines (false)
    pub persist_points: bool,
}

impl Default for LesParams {
    fn default() -> Self {
        LesParams {
            e0: 0.0,
            lambda_target: 1.0,
            realizations: 20_000,
            alpha: 0.5,
            intensity_samples: 200_000,
            gap_lambda: 20.0,
            block_compare: true,
            persist_points: false,
        }
    }
}

/// Eigenvalue-count bound experiment parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct WegnerMinamiParams {
    /// interval center (0.0)
    pub center: Real,
    /// interval widths ([0.005, 0.01, 0.02])
    pub widths: Vec<Real>,
    /// Monte Carlo samples (10000)
    pub samples: usize,
}

impl Default for WegnerMinamiParams {
    fn default() -> Self {
        WegnerMinamiParams {
            center: 0.0,
            widths: vec![0.005, 0.01, 0.02],
            samples: 10_000,
        }
    }
}

/// Identity-check parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct IdentitiesParams {
    /// random normal pairs for the semigroup checks (100)
    pub pairs: usize,
    /// resolvent-integral residual tolerance (1e-6)
    pub resolvent_tol: Real,
    /// semigroup identity residual tolerance (1e-8)
    pub duhamel_tol: Real,
}

impl Default for IdentitiesParams {
    fn default() -> Self {
        IdentitiesParams {
            pairs: 100,
            resolvent_tol: 1e-6,
            duhamel_tol: 1e-8,
        }
    }
}

/// Decoupling-check parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct DecouplingParams {
    /// s values for the lower check ([0.3, 0.5])
    pub lower_s: Vec<Real>,
    /// s for the upper check, must be < 1/2 (0.3)
    pub upper_s: Real,
    /// η grid ([10, 20, 50, 100])
    pub eta_grid: Vec<Real>,
    /// β grid (-3..=3 step 1)
    pub beta_grid: Vec<Real>,
}

impl Default for DecouplingParams {
    fn default() -> Self {
        DecouplingParams {
            lower_s: vec![0.3, 0.5],
            upper_s: 0.3,
            eta_grid: vec![10.0, 20.0, 50.0, 100.0],
            beta_grid: (-3..=3).map(|b| b as Real).collect(),
        }
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

/// Full experiment configuration. Serializes to a single TOML document and
/// round-trips bit-exactly.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// output directory ("results")
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// worker threads; 0 uses the machine parallelism (0)
    #[serde(default)]
    pub workers: usize,
    pub ensemble: EnsembleParams,
    #[serde(default)]
    pub dos: DosParams,
    #[serde(default)]
    pub locmoments: LocMomentsParams,
    #[serde(default)]
    pub volume_diff: VolumeDiffParams,
    #[serde(default)]
    pub les: LesParams,
    #[serde(default)]
    pub wegner_minami: WegnerMinamiParams,
    #[serde(default)]
    pub identities: IdentitiesParams,
    #[serde(default)]
    pub decoupling: DecouplingParams,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, ensemble: EnsembleParams) -> Self {
        ExperimentConfig {
            kind,
            out: default_out(),
            workers: 0,
            ensemble,
            dos: DosParams::default(),
            locmoments: LocMomentsParams::default(),
            volume_diff: VolumeDiffParams::default(),
            les: LesParams::default(),
            wegner_minami: WegnerMinamiParams::default(),
            identities: IdentitiesParams::default(),
            decoupling: DecouplingParams::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn build_ensemble(&self) -> Result<EnsembleConfig<Real>> {
        self.ensemble
            .build()
            .map_err(|e| LabError::Config(e.to_string()))
    }
}
