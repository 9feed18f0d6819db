//! Scenario configuration, presets and the pipeline runs behind each subcommand.

use crate::CliError;
use photon_wigner::flat_sr::{aberration_angle, wigner_angle_flat, Boost};
use photon_wigner::geodesics::{photon_momentum, photon_trajectory, PhotonKind, PhotonScenario, Trajectory};
use photon_wigner::geometry::inner;
use photon_wigner::quantum::{evolve_bell_pair_finite, BellPair};
use photon_wigner::tetrads::{
    FffLField, FirstOrderFffLField, RadialFermiWalkerField, RadialFffField, StationaryField, TetradField,
};
use photon_wigner::wigner::{accumulate_along_trajectory, psi_tilde_at, WignerResult, WignerSample};
use photon_wigner::{FourVector, MetricConfig, SpacetimePoint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::f64::consts::FRAC_PI_2;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObserverKind {
    Stationary,
    RadialFreefall,
    Orbiting,
    OrbitingFirstOrder,
    RadialFermiWalker,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObserverConfig {
    pub kind: ObserverKind,
    pub l_obs: f64,
    /// Weight of the ingoing null leg for the radial Fermi-Walker frame.
    pub alpha: f64,
    /// Radius where the orbiting frame rotation vanishes (defaults to r_start).
    pub phi_zero_at: Option<f64>,
}

impl Default for ObserverConfig {
    fn default() -> Self {
        Self { kind: ObserverKind::Stationary, l_obs: 0.0, alpha: 0.5, phi_zero_at: None }
    }
}

/// Whether ψ̃ is accumulated along a trajectory or evaluated at the start event only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Evaluation {
    #[default]
    Trajectory,
    Event,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FlatCase {
    /// Boost along the photon direction.
    Collinear,
    /// Boost with speed 0.6 along ŷ for a photon along x̂.
    InPlane,
    /// Small boost along (0, sin θ, cos θ) for a photon in the x-y plane.
    Oblique,
    /// Boost and direction taken from the configuration.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlatConfig {
    pub case: FlatCase,
    pub boost_direction: [f64; 3],
    pub rapidity: f64,
    pub k_hat: [f64; 3],
}

impl Default for FlatConfig {
    fn default() -> Self {
        Self::case(FlatCase::InPlane)
    }
}

impl FlatConfig {
    pub fn case(case: FlatCase) -> Self {
        match case {
            FlatCase::Collinear => Self { case, boost_direction: [0.0, 0.0, 1.0], rapidity: 1.0, k_hat: [0.0, 0.0, 1.0] },
            FlatCase::InPlane => Self { case, boost_direction: [0.0, 1.0, 0.0], rapidity: -0.6f64.atanh(), k_hat: [1.0, 0.0, 0.0] },
            FlatCase::Oblique => {
                let (th, ph) = (1.0f64, 0.5f64);
                Self { case, boost_direction: [0.0, th.sin(), th.cos()], rapidity: 1e-4, k_hat: [ph.cos(), ph.sin(), 0.0] }
            }
            FlatCase::Custom => Self { case, ..Self::case(FlatCase::InPlane) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub b_values: Vec<f64>,
    pub l_values: Vec<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { b_values: vec![0.0, 0.5, 1.0, 1.5, 2.0], l_values: vec![0.0, 0.25, 0.5] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairConfig {
    pub lambda1: i8,
    pub lambda2: i8,
    pub sign: i8,
}

impl Default for PairConfig {
    fn default() -> Self {
        Self { lambda1: 1, lambda2: -1, sign: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: OutputFormat,
    pub path: Option<String>,
}

/// Complete run description. Lengths are in the same units as r_s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub metric: MetricConfig,
    pub observer: ObserverConfig,
    pub photon: PhotonScenario,
    pub r_start: f64,
    pub r_end: f64,
    pub step: f64,
    pub max_steps: usize,
    /// Start angles; default to the plane of the photon kind.
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub evaluation: Evaluation,
    pub flat: FlatConfig,
    pub sweep: SweepConfig,
    pub pair: PairConfig,
    pub output: OutputConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            metric: MetricConfig::schwarzschild(1.0),
            observer: ObserverConfig::default(),
            photon: PhotonScenario::radial(1.0),
            r_start: 10.0,
            r_end: 2.0,
            step: 1e-3,
            max_steps: 1_000_000,
            theta: None,
            phi: None,
            evaluation: Evaluation::Trajectory,
            flat: FlatConfig::default(),
            sweep: SweepConfig::default(),
            pair: PairConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

pub const PRESETS: [&str; 7] = [
    "radial-stationary",
    "radial-freefall",
    "equatorial-orbiting",
    "cross-plane",
    "flat-collinear",
    "flat-in-plane",
    "flat-oblique",
];

pub fn preset(name: &str) -> Result<ScenarioConfig, CliError> {
    let base = ScenarioConfig::default();
    let cfg = match name {
        "radial-stationary" => base,
        "radial-freefall" => ScenarioConfig {
            observer: ObserverConfig { kind: ObserverKind::RadialFreefall, ..ObserverConfig::default() },
            ..base
        },
        "equatorial-orbiting" => ScenarioConfig {
            observer: ObserverConfig { kind: ObserverKind::Orbiting, l_obs: 0.5, ..ObserverConfig::default() },
            photon: PhotonScenario::new(PhotonKind::EquatorialWithB, 2.0, 1.0),
            r_end: 3.0,
            ..base
        },
        "cross-plane" => ScenarioConfig {
            observer: ObserverConfig { kind: ObserverKind::OrbitingFirstOrder, l_obs: 1e-3, ..ObserverConfig::default() },
            photon: PhotonScenario::new(PhotonKind::PolarPlaneFirstOrder, 1e-3, 1.0),
            r_start: 5.0,
            evaluation: Evaluation::Event,
            sweep: SweepConfig { b_values: vec![0.0, 5e-4, 1e-3], l_values: vec![0.0, 5e-4, 1e-3] },
            ..base
        },
        "flat-collinear" => ScenarioConfig { flat: FlatConfig::case(FlatCase::Collinear), ..base },
        "flat-in-plane" => ScenarioConfig { flat: FlatConfig::case(FlatCase::InPlane), ..base },
        "flat-oblique" => ScenarioConfig { flat: FlatConfig::case(FlatCase::Oblique), ..base },
        _ => return Err(CliError::config(format!("unknown preset {name:?}; expected one of {}", PRESETS.join(", ")))),
    };
    Ok(cfg)
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, p) => *b = p,
    }
}

/// Applies a JSON configuration file on top of `base`; fields absent from the file keep their base values.
pub fn load_config(base: ScenarioConfig, path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let patch: Value = serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let mut value = serde_json::to_value(&base).map_err(|e| CliError::config(e.to_string()))?;
    merge(&mut value, patch);
    serde_json::from_value(value).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.metric.validate()?;
        self.photon.validate()?;
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(CliError::config(format!("step must be positive, got {}", self.step)));
        }
        let floor = self.metric.rs() * (1.0 + self.metric.guard);
        if !(self.r_start > floor) {
            return Err(CliError::config(format!("r_start = {} must exceed r_s(1 + guard) = {floor}", self.r_start)));
        }
        if self.evaluation == Evaluation::Trajectory && !(self.r_end > floor) {
            return Err(CliError::config(format!("r_end = {} must exceed r_s(1 + guard) = {floor}", self.r_end)));
        }
        Ok(())
    }

    pub fn field(&self) -> Box<dyn TetradField> {
        let o = &self.observer;
        match o.kind {
            ObserverKind::Stationary => Box::new(StationaryField),
            ObserverKind::RadialFreefall => Box::new(RadialFffField),
            ObserverKind::Orbiting => {
                Box::new(FffLField { l_obs: o.l_obs, r_start: o.phi_zero_at.unwrap_or(self.r_start) })
            }
            ObserverKind::OrbitingFirstOrder => Box::new(FirstOrderFffLField { l_obs: o.l_obs }),
            ObserverKind::RadialFermiWalker => Box::new(RadialFermiWalkerField { alpha: o.alpha }),
        }
    }

    pub fn start_point(&self, r: f64) -> Result<SpacetimePoint, CliError> {
        let default_phi = match self.photon.kind {
            PhotonKind::PolarPlaneWithB | PhotonKind::PolarPlaneFirstOrder => FRAC_PI_2,
            _ => 0.0,
        };
        Ok(SpacetimePoint::new(0.0, r, self.theta.unwrap_or(FRAC_PI_2), self.phi.unwrap_or(default_phi))?)
    }

    pub fn trajectory(&self) -> Result<Trajectory, CliError> {
        let x0 = self.start_point(self.r_start)?;
        Ok(photon_trajectory(&self.metric, &self.photon, &x0, self.step, self.r_end, self.max_steps)?)
    }
}

/// ψ̃ profile and ψ_total for one scenario. In event mode the result holds the
/// single start event and ψ_total is zero.
pub fn schwarzschild_psi(cfg: &ScenarioConfig) -> Result<WignerResult, CliError> {
    cfg.validate()?;
    let field = cfg.field();
    match cfg.evaluation {
        Evaluation::Trajectory => Ok(accumulate_along_trajectory(&cfg.metric, &cfg.trajectory()?, field.as_ref())?),
        Evaluation::Event => {
            let x = cfg.start_point(cfg.r_start)?;
            let k = FourVector::contravariant(photon_momentum(&cfg.metric, &cfg.photon, &x)?);
            let (psi_tilde, k_local) = psi_tilde_at(&cfg.metric, field.as_ref(), &x, &k)?;
            let null_residual = inner(&cfg.metric, &x, &k, &k)?.abs() / (k.components[0] * k.components[0]);
            let identity = std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }));
            Ok(WignerResult {
                psi_total: 0.0,
                samples: vec![WignerSample {
                    xi: 0.0,
                    r: x.r(),
                    theta: x.theta(),
                    phi: x.phi(),
                    psi_tilde,
                    psi_cumulative: 0.0,
                    n_local: k_local.direction(),
                    null_residual,
                }],
                frame_transform: identity,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub b_ph: f64,
    pub l_obs: f64,
    pub psi_total: f64,
    /// ψ̃ at the start event.
    pub psi_tilde_start: f64,
    pub max_abs_psi_tilde: f64,
    pub samples: usize,
}

/// Runs every (b, l) cell of the grid in parallel; rows come back in grid order, b outermost.
pub fn sweep(cfg: &ScenarioConfig, threads: Option<usize>) -> Result<Vec<SweepCell>, CliError> {
    cfg.validate()?;
    let cells: Vec<(f64, f64)> = cfg
        .sweep
        .b_values
        .iter()
        .flat_map(|&b| cfg.sweep.l_values.iter().map(move |&l| (b, l)))
        .collect();
    let run = || {
        cells
            .par_iter()
            .map(|&(b, l)| {
                let mut c = cfg.clone();
                c.photon.b_ph = b;
                c.observer.l_obs = l;
                let res = schwarzschild_psi(&c)?;
                Ok(SweepCell {
                    b_ph: b,
                    l_obs: l,
                    psi_total: res.psi_total,
                    psi_tilde_start: res.samples.first().map_or(0.0, |s| s.psi_tilde),
                    max_abs_psi_tilde: res.max_abs_psi_tilde(),
                    samples: res.samples.len(),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::config(e.to_string()))?
            .install(run),
        None => run(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatReport {
    pub case: FlatCase,
    pub boost_direction: [f64; 3],
    pub rapidity: f64,
    pub k_hat: [f64; 3],
    pub psi: f64,
    /// Unsigned angle between k̂ and the boosted direction.
    pub aberration: f64,
}

pub fn flat_wigner(flat: &FlatConfig) -> Result<FlatReport, CliError> {
    let boost = Boost::new(flat.boost_direction, flat.rapidity)?;
    Ok(FlatReport {
        case: flat.case,
        boost_direction: boost.direction,
        rapidity: boost.rapidity,
        k_hat: flat.k_hat,
        psi: wigner_angle_flat(&boost, flat.k_hat)?,
        aberration: aberration_angle(&boost, flat.k_hat)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellReport {
    pub lambda1: i8,
    pub lambda2: i8,
    pub sign: i8,
    pub psi1: f64,
    pub psi2: f64,
    pub relative_phase_re: f64,
    pub relative_phase_im: f64,
    pub phase_deviation: f64,
}

/// Photon 1 runs inbound from r_start to r_end, photon 2 outbound from r_end to r_start.
pub fn bell_evolve(cfg: &ScenarioConfig) -> Result<BellReport, CliError> {
    cfg.validate()?;
    if cfg.evaluation == Evaluation::Event {
        return Err(CliError::config("bell-evolve needs trajectory evaluation".into()));
    }
    let state = BellPair::new(cfg.pair.lambda1, cfg.pair.lambda2, cfg.pair.sign)?;
    let first = cfg.trajectory()?;
    let mut back = cfg.clone();
    back.photon = back.photon.outbound();
    let x0 = back.start_point(cfg.r_end)?;
    let second = photon_trajectory(&cfg.metric, &back.photon, &x0, cfg.step, cfg.r_start, cfg.max_steps)?;
    let field = cfg.field();
    let out = evolve_bell_pair_finite(&cfg.metric, &state, &first, &second, field.as_ref())?;
    Ok(BellReport {
        lambda1: state.lambda1,
        lambda2: state.lambda2,
        sign: state.sign,
        psi1: out.psi1,
        psi2: out.psi2,
        relative_phase_re: out.relative_phase.re,
        relative_phase_im: out.relative_phase.im,
        phase_deviation: (out.relative_phase - 1.0).norm(),
    })
}
