//! Closed-form photon momenta, effective potentials and a fixed-step RK4
//! geodesic integrator.

use crate::error::{Error, Result};
use crate::geometry::{christoffel_at, metric_at, MetricConfig, SpacetimePoint, Variance, VectorField, R, THETA};
use num_dual::{Dual64, DualNum};
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhotonKind {
    /// Radial motion, no angular momentum.
    RadialEquatorial,
    /// Equatorial orbit with impact parameter b (angular momentum along φ).
    EquatorialWithB,
    /// Orbit in the φ = π/2 plane with impact parameter b (angular momentum along θ).
    PolarPlaneWithB,
    /// The polar-plane momentum truncated at first order in b.
    PolarPlaneFirstOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RadialDirection {
    #[default]
    Inbound,
    Outbound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonScenario {
    pub kind: PhotonKind,
    #[serde(default)]
    pub b_ph: f64,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default)]
    pub direction: RadialDirection,
}

fn one() -> f64 {
    1.0
}

impl PhotonScenario {
    pub fn radial(omega: f64) -> Self {
        Self { kind: PhotonKind::RadialEquatorial, b_ph: 0.0, omega, direction: RadialDirection::Inbound }
    }

    pub fn new(kind: PhotonKind, b_ph: f64, omega: f64) -> Self {
        Self { kind, b_ph, omega, direction: RadialDirection::Inbound }
    }

    pub fn outbound(mut self) -> Self {
        self.direction = RadialDirection::Outbound;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) {
            return Err(Error::InvalidInput(format!("omega must be positive, got {}", self.omega)));
        }
        if !(self.b_ph >= 0.0) {
            return Err(Error::InvalidInput(format!("b_ph must be >= 0, got {}", self.b_ph)));
        }
        Ok(())
    }

    /// Exact momentum components as dual numbers (for exact derivatives).
    pub fn momentum_generic<D: DualNum<Primitive = f64> + Copy>(&self, rs: f64, r: D, theta: D) -> Result<[D; 4]> {
        let f = -(r.recip() * rs) + 1.0;
        let z = D::from(0.0);
        let w = self.omega;
        let sign = match self.direction {
            RadialDirection::Inbound => -1.0,
            RadialDirection::Outbound => 1.0,
        };
        let radial = |b: f64| -> Result<D> {
            let radicand = -(f * (b * b) / (r * r)) + 1.0;
            if radicand.re() < 0.0 {
                return Err(Error::TurningPointReached { r: r.re(), radicand: radicand.re() });
            }
            Ok(radicand.sqrt() * (sign * w))
        };
        let b = self.b_ph;
        let kt = f.recip() * w;
        Ok(match self.kind {
            PhotonKind::RadialEquatorial => [kt, D::from(sign * w), z, z],
            PhotonKind::EquatorialWithB => {
                let s = theta.sin();
                [kt, radial(b)?, z, (r * r * s * s).recip() * (b * w)]
            }
            PhotonKind::PolarPlaneWithB => [kt, radial(b)?, (r * r).recip() * (b * w), z],
            PhotonKind::PolarPlaneFirstOrder => [kt, D::from(sign * w), (r * r).recip() * (b * w), z],
        })
    }
}

/// Photon momentum of the scenario at x (contravariant components).
pub fn photon_momentum(cfg: &MetricConfig, scenario: &PhotonScenario, x: &SpacetimePoint) -> Result<[f64; 4]> {
    cfg.check_outside(x)?;
    scenario.momentum_generic(cfg.rs(), x.r(), x.theta())
}

/// The scenario's momentum as a vector field with exact derivatives.
#[derive(Debug, Clone, Copy)]
pub struct PhotonField {
    pub scenario: PhotonScenario,
}

impl VectorField for PhotonField {
    fn variance(&self) -> Variance {
        Variance::Contravariant
    }

    fn value(&self, cfg: &MetricConfig, x: &SpacetimePoint) -> Result<[f64; 4]> {
        photon_momentum(cfg, &self.scenario, x)
    }

    fn derivative_along(&self, cfg: &MetricConfig, x: &SpacetimePoint, dir: &[f64; 4]) -> Result<[f64; 4]> {
        cfg.check_outside(x)?;
        let r = Dual64::new(x.r(), dir[R]);
        let theta = Dual64::new(x.theta(), dir[THETA]);
        Ok(self.scenario.momentum_generic(cfg.rs(), r, theta)?.map(|d| d.eps))
    }
}

/// W_eff(r) = (1/r²)(1 − r_s/r) and the capture threshold b² = 27M².
pub fn photon_effective_potential(cfg: &MetricConfig, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("r must be positive, got {r}")));
    }
    let m = cfg.mass();
    Ok(((1.0 - cfg.rs() / r) / (r * r), 27.0 * m * m))
}

/// V_eff = −M/r + l²/(2r²) − M l²/r³ per unit mass.
pub fn observer_effective_potential(cfg: &MetricConfig, r: f64, l_obs: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::InvalidInput(format!("r must be positive, got {r}")));
    }
    let m = cfg.mass();
    let l2 = l_obs * l_obs;
    Ok(-m / r + l2 / (2.0 * r * r) - m * l2 / (r * r * r))
}

/// Infalling u^r = −(r_s/r − l²(1 − r_s/r)/r²)^{1/2} for an observer released from rest at infinity.
pub fn observer_radial_velocity(cfg: &MetricConfig, r: f64, l_obs: f64) -> Result<f64> {
    let rs = cfg.rs();
    let radicand = rs / r - l_obs * l_obs * (1.0 - rs / r) / (r * r);
    if radicand < 0.0 {
        return Err(Error::TurningPoint { r, radicand });
    }
    Ok(-radicand.sqrt())
}

/// Four-velocity (1/f, u^r, 0, l/r²) of the equatorial infalling observer.
pub fn observer_four_velocity(cfg: &MetricConfig, r: f64, l_obs: f64) -> Result<[f64; 4]> {
    let ur = observer_radial_velocity(cfg, r, l_obs)?;
    Ok([1.0 / (1.0 - cfg.rs() / r), ur, 0.0, l_obs / (r * r)])
}

/// Outermost root of the photon radicand 1 − b²(1 − r_s/r)/r², if b² exceeds 27M².
pub fn turning_radius(cfg: &MetricConfig, b_ph: f64) -> Option<f64> {
    let rs = cfg.rs();
    let radicand = |r: f64| 1.0 - b_ph * b_ph * (1.0 - rs / r) / (r * r);
    let m = cfg.mass();
    if b_ph * b_ph <= 27.0 * m * m || rs == 0.0 && b_ph == 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (1.5 * rs, b_ph.max(1.5 * rs) * 2.0);
    if radicand(lo) >= 0.0 {
        return None;
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if radicand(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeodesicKind {
    Null,
    Timelike,
}

impl GeodesicKind {
    fn norm(self) -> f64 {
        match self {
            GeodesicKind::Null => 0.0,
            GeodesicKind::Timelike => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Completed,
    RadiusReached,
    HorizonApproach,
    CoordinateAxis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub xi: f64,
    pub x: SpacetimePoint,
    pub k: [f64; 4],
    /// g(k, k) minus its target (0 for null, 1 for timelike).
    pub constraint: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: GeodesicKind,
    pub samples: Vec<TrajectorySample>,
    pub stop: StopReason,
    /// Indices of samples right after k^r changed sign.
    pub turning_points: Vec<usize>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_relative_constraint(&self) -> f64 {
        self.samples.iter().map(|s| s.constraint.abs() / (s.k[0] * s.k[0])).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let io = |e: csv::Error| Error::InvalidInput(format!("csv write failed: {e}"));
        w.write_record(["xi", "t", "r", "theta", "phi", "kt", "kr", "ktheta", "kphi", "null_residual"])
            .map_err(io)?;
        for s in &self.samples {
            let c = s.x.coords;
            let row = [s.xi, c[0], c[1], c[2], c[3], s.k[0], s.k[1], s.k[2], s.k[3], s.constraint];
            w.write_record(row.iter().map(|v| crate::format_sig17(*v))).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(format!("csv flush failed: {e}")))?;
        Ok(())
    }
}

fn constraint(cfg: &MetricConfig, x: &SpacetimePoint, k: &[f64; 4], kind: GeodesicKind) -> Result<f64> {
    let g = metric_at(cfg, x)?;
    Ok((0..4).map(|i| g[(i, i)] * k[i] * k[i]).sum::<f64>() - kind.norm())
}

type State = [f64; 8];

fn rhs(cfg: &MetricConfig, y: &State) -> Result<State> {
    let x = SpacetimePoint { coords: [y[0], y[1], y[2], y[3]] };
    if !(y[1] > cfg.rs()) {
        return Err(Error::HorizonApproach { r: y[1] });
    }
    let k = [y[4], y[5], y[6], y[7]];
    let acc = christoffel_at(cfg, &x)?.contract(&k, &k);
    Ok([k[0], k[1], k[2], k[3], -acc[0], -acc[1], -acc[2], -acc[3]])
}

fn rk4_step(cfg: &MetricConfig, y: &State, h: f64) -> Result<State> {
    let add = |a: &State, b: &State, s: f64| -> State { std::array::from_fn(|i| a[i] + s * b[i]) };
    let k1 = rhs(cfg, y)?;
    let k2 = rhs(cfg, &add(y, &k1, h / 2.0))?;
    let k3 = rhs(cfg, &add(y, &k2, h / 2.0))?;
    let k4 = rhs(cfg, &add(y, &k3, h))?;
    Ok(std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

/// Fixed-step RK4 for dx/dξ = k, dk/dξ = −Γ(k, k), for `n_steps` steps.
pub fn integrate_geodesic(
    cfg: &MetricConfig,
    x0: &SpacetimePoint,
    k0: &[f64; 4],
    d_xi: f64,
    n_steps: usize,
    kind: GeodesicKind,
) -> Result<Trajectory> {
    integrate_until(cfg, x0, k0, d_xi, n_steps, kind, |_| false)
}

/// Relative distance above r_s inside which loss of step resolution ends the
/// integration as a horizon approach instead of a drift error.
pub const NEAR_HORIZON: f64 = 0.05;

/// As `integrate_geodesic`, stopping after the first sample for which `stop` holds.
pub fn integrate_until(
    cfg: &MetricConfig,
    x0: &SpacetimePoint,
    k0: &[f64; 4],
    d_xi: f64,
    max_steps: usize,
    kind: GeodesicKind,
    stop: impl Fn(&TrajectorySample) -> bool,
) -> Result<Trajectory> {
    if !(d_xi > 0.0) {
        return Err(Error::InvalidInput(format!("d_xi must be positive, got {d_xi}")));
    }
    if cfg.in_guard_band(x0.r()) || x0.r() <= cfg.rs() {
        return Err(Error::HorizonApproach { r: x0.r() });
    }
    let c0 = constraint(cfg, x0, k0, kind)?;
    if c0.abs() > 1e-10 * k0[0] * k0[0] {
        return Err(Error::ConstraintDrift { xi: 0.0, residual: c0 });
    }
    let mut samples = vec![TrajectorySample { xi: 0.0, x: *x0, k: *k0, constraint: c0 }];
    let mut turning_points = Vec::new();
    let mut y: State = [x0.coords[0], x0.coords[1], x0.coords[2], x0.coords[3], k0[0], k0[1], k0[2], k0[3]];
    let mut reason = StopReason::Completed;
    if stop(&samples[0]) {
        reason = StopReason::RadiusReached;
    } else {
        for i in 1..=max_steps {
            let next = match rk4_step(cfg, &y, d_xi) {
                Ok(n) => n,
                Err(Error::HorizonApproach { .. } | Error::HorizonSingularity { .. }) => {
                    reason = StopReason::HorizonApproach;
                    break;
                }
                Err(Error::CoordinateSingularity { .. }) => {
                    reason = StopReason::CoordinateAxis;
                    break;
                }
                Err(e) => return Err(e),
            };
            if cfg.in_guard_band(next[1]) || next[1] <= cfg.rs() {
                reason = StopReason::HorizonApproach;
                break;
            }
            if !(next[2] > 0.0 && next[2] < std::f64::consts::PI) {
                reason = StopReason::CoordinateAxis;
                break;
            }
            let x = SpacetimePoint { coords: [next[0], next[1], next[2], next[3]] };
            let k = [next[4], next[5], next[6], next[7]];
            let c = constraint(cfg, &x, &k, kind)?;
            let xi = i as f64 * d_xi;
            if c.abs() > 1e-6 * k[0] * k[0] {
                if cfg.rs() > 0.0 && next[1] < cfg.rs() * (1.0 + NEAR_HORIZON) {
                    reason = StopReason::HorizonApproach;
                    break;
                }
                return Err(Error::ConstraintDrift { xi, residual: c });
            }
            if k[1].signum() != y[5].signum() && y[5] != 0.0 {
                turning_points.push(samples.len());
            }
            y = next;
            samples.push(TrajectorySample { xi, x, k, constraint: c });
            if stop(samples.last().unwrap()) {
                reason = StopReason::RadiusReached;
                break;
            }
        }
    }
    Ok(Trajectory { kind, samples, stop: reason, turning_points })
}

/// Null geodesic of a scenario from r_start, stopped once r ≤ r_end (or after `max_steps`).
pub fn photon_trajectory(
    cfg: &MetricConfig,
    scenario: &PhotonScenario,
    x0: &SpacetimePoint,
    d_xi: f64,
    r_end: f64,
    max_steps: usize,
) -> Result<Trajectory> {
    let k0 = photon_momentum(cfg, scenario, x0)?;
    let inbound = x0.r() > r_end;
    integrate_until(cfg, x0, &k0, d_xi, max_steps, GeodesicKind::Null, |s| {
        if inbound {
            s.x.r() <= r_end
        } else {
            s.x.r() >= r_end
        }
    })
}

/// e_ph = (1 − r_s/r) k^t.
pub fn conserved_energy(cfg: &MetricConfig, x: &SpacetimePoint, k: &[f64; 4]) -> f64 {
    (1.0 - cfg.rs() / x.r()) * k[0]
}

/// l_ph = r² sin²θ k^φ.
pub fn conserved_angular_momentum(x: &SpacetimePoint, k: &[f64; 4]) -> f64 {
    let s = x.theta().sin();
    x.r() * x.r() * s * s * k[3]
}
