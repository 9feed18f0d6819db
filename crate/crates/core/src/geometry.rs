//! Schwarzschild metric in (t, r, θ, φ), signature (+,−,−,−), G = c = 1.

use crate::error::{Error, Result};
use nalgebra::Matrix4;
use num_dual::Dual64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

pub const T: usize = 0;
pub const R: usize = 1;
pub const THETA: usize = 2;
pub const PHI: usize = 3;

/// Relative step used for central differences of user-supplied fields.
pub const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub r_s: f64,
    #[serde(default)]
    pub flat_limit: bool,
    /// Points with |r − r_s| < guard·r_s are rejected.
    #[serde(default = "default_guard")]
    pub guard: f64,
}

fn default_guard() -> f64 {
    1e-6
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self::schwarzschild(1.0)
    }
}

impl MetricConfig {
    pub fn schwarzschild(r_s: f64) -> Self {
        Self { r_s, flat_limit: false, guard: default_guard() }
    }

    pub fn flat() -> Self {
        Self { r_s: 0.0, flat_limit: true, guard: default_guard() }
    }

    /// Schwarzschild radius actually used (0 in the flat limit).
    pub fn rs(&self) -> f64 {
        if self.flat_limit {
            0.0
        } else {
            self.r_s
        }
    }

    pub fn mass(&self) -> f64 {
        self.rs() / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_s >= 0.0) || !self.r_s.is_finite() {
            return Err(Error::InvalidInput(format!("r_s must be >= 0, got {}", self.r_s)));
        }
        if !(self.guard >= 0.0) {
            return Err(Error::InvalidInput(format!("guard must be >= 0, got {}", self.guard)));
        }
        Ok(())
    }

    pub fn in_guard_band(&self, r: f64) -> bool {
        let rs = self.rs();
        rs > 0.0 && (r - rs).abs() < self.guard * rs
    }

    /// Rejects points where the metric or its inverse is singular.
    pub fn check(&self, x: &SpacetimePoint) -> Result<()> {
        if self.in_guard_band(x.r()) {
            return Err(Error::HorizonSingularity { r: x.r(), r_s: self.rs() });
        }
        if x.theta().sin() == 0.0 {
            return Err(Error::CoordinateSingularity { theta: x.theta() });
        }
        Ok(())
    }

    pub fn check_outside(&self, x: &SpacetimePoint) -> Result<()> {
        if x.r() <= self.rs() {
            return Err(Error::InsideHorizon { r: x.r(), r_s: self.rs() });
        }
        self.check(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub coords: [f64; 4],
}

impl SpacetimePoint {
    /// Validating constructor; φ is wrapped into [0, 2π).
    pub fn new(t: f64, r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidInput(format!("r must be positive, got {r}")));
        }
        if !(theta > 0.0 && theta < PI) {
            return Err(Error::CoordinateSingularity { theta });
        }
        Ok(Self::from_coords([t, r, theta, phi]))
    }

    pub fn from_coords(c: [f64; 4]) -> Self {
        let mut phi = c[PHI].rem_euclid(TAU);
        if phi >= TAU {
            phi = 0.0;
        }
        Self { coords: [c[T], c[R], c[THETA], phi] }
    }

    /// Equatorial point at (t = 0, r, π/2, φ).
    pub fn equatorial(r: f64, phi: f64) -> Result<Self> {
        Self::new(0.0, r, PI / 2.0, phi)
    }

    pub fn t(&self) -> f64 {
        self.coords[T]
    }
    pub fn r(&self) -> f64 {
        self.coords[R]
    }
    pub fn theta(&self) -> f64 {
        self.coords[THETA]
    }
    pub fn phi(&self) -> f64 {
        self.coords[PHI]
    }

    /// Coordinates shifted by ε·dir as dual numbers, for exact directional derivatives.
    pub fn dual_along(&self, dir: &[f64; 4]) -> [Dual64; 4] {
        std::array::from_fn(|i| Dual64::new(self.coords[i], dir[i]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Contravariant,
    Covariant,
}

impl Variance {
    pub fn name(self) -> &'static str {
        match self {
            Variance::Contravariant => "contravariant",
            Variance::Covariant => "covariant",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourVector {
    pub components: [f64; 4],
    pub variance: Variance,
}

impl FourVector {
    pub fn contravariant(components: [f64; 4]) -> Self {
        Self { components, variance: Variance::Contravariant }
    }

    pub fn covariant(components: [f64; 4]) -> Self {
        Self { components, variance: Variance::Covariant }
    }

    pub fn zero(variance: Variance) -> Self {
        Self { components: [0.0; 4], variance }
    }

    pub fn expect(&self, variance: Variance) -> Result<()> {
        if self.variance != variance {
            return Err(Error::VarianceMismatch { expected: variance.name(), got: self.variance.name() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &FourVector) -> Result<FourVector> {
        other.expect(self.variance)?;
        Ok(Self {
            components: std::array::from_fn(|i| self.components[i] + other.components[i]),
            variance: self.variance,
        })
    }

    pub fn try_sub(&self, other: &FourVector) -> Result<FourVector> {
        self.try_add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> FourVector {
        Self { components: self.components.map(|c| c * s), variance: self.variance }
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn lower(&self, cfg: &MetricConfig, x: &SpacetimePoint) -> Result<FourVector> {
        self.expect(Variance::Contravariant)?;
        let g = metric_diagonal(cfg, x)?;
        Ok(Self::covariant(std::array::from_fn(|i| g[i] * self.components[i])))
    }

    pub fn raise(&self, cfg: &MetricConfig, x: &SpacetimePoint) -> Result<FourVector> {
        self.expect(Variance::Covariant)?;
        let g = metric_diagonal(cfg, x)?;
        Ok(Self::contravariant(std::array::from_fn(|i| self.components[i] / g[i])))
    }
}

impl std::ops::Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        self.scale(-1.0)
    }
}

impl std::ops::Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        self.scale(s)
    }
}

fn metric_diagonal(cfg: &MetricConfig, x: &SpacetimePoint) -> Result<[f64; 4]> {
    cfg.check(x)?;
    let r = x.r();
    let f = 1.0 - cfg.rs() / r;
    let s = x.theta().sin();
    Ok([f, -1.0 / f, -r * r, -r * r * s * s])
}

pub fn metric_at(cfg: &MetricConfig, x: &SpacetimePoint) -> Result<Matrix4<f64>> {
    let d = metric_diagonal(cfg, x)?;
    Ok(Matrix4::from_diagonal(&d.into()))
}

pub fn metric_inverse_at(cfg: &MetricConfig, x: &SpacetimePoint) -> Result<Matrix4<f64>> {
    let d = metric_diagonal(cfg, x)?;
    Ok(Matrix4::from_diagonal(&d.map(|v| 1.0 / v).into()))
}

/// Γ^μ_{αβ} stored as `gamma[μ][α][β]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    pub gamma: [[[f64; 4]; 4]; 4],
}

impl Christoffel {
    pub fn get(&self, mu: usize, a: usize, b: usize) -> f64 {
        self.gamma[mu][a][b]
    }

    /// Γ^μ_{αβ} u^α v^β.
    pub fn contract(&self, u: &[f64; 4], v: &[f64; 4]) -> [f64; 4] {
        std::array::from_fn(|mu| {
            let mut s = 0.0;
            for a in 0..4 {
                if u[a] == 0.0 {
                    continue;
                }
                for b in 0..4 {
                    s += self.gamma[mu][a][b] * u[a] * v[b];
                }
            }
            s
        })
    }
}

pub fn christoffel_at(cfg: &MetricConfig, x: &SpacetimePoint) -> Result<Christoffel> {
    cfg.check(x)?;
    let rs = cfg.rs();
    let r = x.r();
    let f = 1.0 - rs / r;
    let (s, c) = x.theta().sin_cos();
    let mut g = [[[0.0; 4]; 4]; 4];
    let mut set = |mu: usize, a: usize, b: usize, v: f64| {
        g[mu][a][b] = v;
        g[mu][b][a] = v;
    };
    set(T, T, R, rs / (2.0 * r * r * f));
    set(R, T, T, rs * f / (2.0 * r * r));
    set(R, R, R, -rs / (2.0 * r * r * f));
    set(R, THETA, THETA, -r * f);
    set(R, PHI, PHI, -r * f * s * s);
    set(THETA, R, THETA, 1.0 / r);
    set(THETA, PHI, PHI, -s * c);
    set(PHI, R, PHI, 1.0 / r);
    set(PHI, THETA, PHI, c / s);
    Ok(Christoffel { gamma: g })
}

/// Christoffel symbols from central differences of `metric_at`; a cross-check only.
pub fn christoffel_fd(cfg: &MetricConfig, x: &SpacetimePoint, h_rel: f64) -> Result<Christoffel> {
    cfg.check(x)?;
    let ginv = metric_inverse_at(cfg, x)?;
    let mut dg = [Matrix4::<f64>::zeros(); 4];
    for (b, slot) in dg.iter_mut().enumerate().skip(1).take(2) {
        let h = h_rel * x.coords[b].abs().max(1.0);
        let mut plus = x.coords;
        let mut minus = x.coords;
        plus[b] += h;
        minus[b] -= h;
        let gp = metric_at(cfg, &SpacetimePoint::from_coords(plus))?;
        let gm = metric_at(cfg, &SpacetimePoint::from_coords(minus))?;
        *slot = (gp - gm) / (2.0 * h);
    }
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for mu in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for sg in 0..4 {
                    s += ginv[(mu, sg)] * (dg[b][(sg, a)] + dg[a][(sg, b)] - dg[sg][(a, b)]);
                }
                gamma[mu][a][b] = 0.5 * s;
            }
        }
    }
    Ok(Christoffel { gamma })
}

/// g_{μν} u^μ v^ν for two contravariant vectors, or g^{μν} u_μ v_ν for two covariant ones.
pub fn inner(cfg: &MetricConfig, x: &SpacetimePoint, u: &FourVector, v: &FourVector) -> Result<f64> {
    v.expect(u.variance)?;
    let g = metric_diagonal(cfg, x)?;
    Ok((0..4)
        .map(|i| match u.variance {
            Variance::Contravariant => g[i] * u.components[i] * v.components[i],
            Variance::Covariant => u.components[i] * v.components[i] / g[i],
        })
        .sum())
}

/// A vector field that can be differentiated along a direction.
///
/// The default derivative uses central differences with step
/// `FD_STEP · max(1, |x^β|)` per coordinate; closed-form fields override it
/// with exact dual-number derivatives.
pub trait VectorField {
    fn variance(&self) -> Variance;

    fn value(&self, cfg: &MetricConfig, x: &SpacetimePoint) -> Result<[f64; 4]>;

    /// d^β ∂_β V at x.
    fn derivative_along(&self, cfg: &MetricConfig, x: &SpacetimePoint, dir: &[f64; 4]) -> Result<[f64; 4]> {
        central_difference(cfg, x, dir, |y| self.value(cfg, y))
    }
}

/// d^β ∂_β F(x) by per-coordinate central differences.
pub fn central_difference<const N: usize>(
    cfg: &MetricConfig,
    x: &SpacetimePoint,
    dir: &[f64; 4],
    mut f: impl FnMut(&SpacetimePoint) -> Result<[f64; N]>,
) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    for b in 0..4 {
        if dir[b] == 0.0 {
            continue;
        }
        let h = FD_STEP * x.coords[b].abs().max(1.0);
        let mut plus = x.coords;
        let mut minus = x.coords;
        plus[b] += h;
        minus[b] -= h;
        if b == R && (cfg.in_guard_band(plus[R]) || cfg.in_guard_band(minus[R]) || minus[R] <= 0.0) {
            return Err(Error::StepTooLarge { r: x.r(), h });
        }
        if b == THETA && (minus[THETA] <= 0.0 || plus[THETA] >= PI) {
            return Err(Error::StepTooLarge { r: x.r(), h });
        }
        let vp = f(&SpacetimePoint::from_coords(plus))?;
        let vm = f(&SpacetimePoint::from_coords(minus))?;
        for i in 0..N {
            out[i] += dir[b] * (vp[i] - vm[i]) / (2.0 * h);
        }
    }
    Ok(out)
}

/// Closure-backed vector field differentiated by central differences.
pub struct FnField<F> {
    pub f: F,
    pub variance: Variance,
}

impl<F> FnField<F>
where
    F: Fn(&MetricConfig, &SpacetimePoint) -> Result<[f64; 4]>,
{
    pub fn contravariant(f: F) -> Self {
        Self { f, variance: Variance::Contravariant }
    }

    pub fn covariant(f: F) -> Self {
        Self { f, variance: Variance::Covariant }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(&MetricConfig, &SpacetimePoint) -> Result<[f64; 4]>,
{
    fn variance(&self) -> Variance {
        self.variance
    }

    fn value(&self, cfg: &MetricConfig, x: &SpacetimePoint) -> Result<[f64; 4]> {
        (self.f)(cfg, x)
    }
}

/// Covariant derivative of a field value along `dir`, given the partial derivative term.
pub fn covariant_from_partial(
    gamma: &Christoffel,
    dir: &[f64; 4],
    value: &[f64; 4],
    partial: &[f64; 4],
    variance: Variance,
) -> [f64; 4] {
    match variance {
        Variance::Contravariant => {
            let conn = gamma.contract(dir, value);
            std::array::from_fn(|nu| partial[nu] + conn[nu])
        }
        Variance::Covariant => std::array::from_fn(|nu| {
            let mut s = partial[nu];
            for sg in 0..4 {
                for b in 0..4 {
                    s -= gamma.gamma[sg][b][nu] * dir[b] * value[sg];
                }
            }
            s
        }),
    }
}

/// k^β ∇_β V at x, with the variance of the result matching the field.
pub fn directional_covariant_derivative(
    cfg: &MetricConfig,
    x: &SpacetimePoint,
    direction: &FourVector,
    field: &dyn VectorField,
) -> Result<FourVector> {
    direction.expect(Variance::Contravariant)?;
    let gamma = christoffel_at(cfg, x)?;
    let value = field.value(cfg, x)?;
    let partial = field.derivative_along(cfg, x, &direction.components)?;
    let variance = field.variance();
    Ok(FourVector {
        components: covariant_from_partial(&gamma, &direction.components, &value, &partial, variance),
        variance,
    })
}
