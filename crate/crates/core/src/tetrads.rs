//! Observer tetrads. Row â of `legs` holds e_â^μ; local axes are ordered
//! (t̂, θ̂, φ̂, r̂) = (0̂, 1̂, 2̂, 3̂).

use crate::error::{Error, Result};
use crate::geodesics::observer_radial_velocity;
use crate::geometry::{
    central_difference, christoffel_at, inner, metric_at, FnField, FourVector, MetricConfig, SpacetimePoint,
    Variance, VectorField, THETA,
};
use nalgebra::Matrix4;
use num_dual::{Dual64, DualNum};
use serde::{Deserialize, Serialize};

pub fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&[1.0, -1.0, -1.0, -1.0].into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TetradKind {
    Stationary,
    RadialFFF,
    FFFWithL,
    FFFWithLFirstOrder,
    RadialFermiWalker,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TetradParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_obs: Option<f64>,
    #[serde(rename = "Phi", skip_serializing_if = "Option::is_none")]
    pub phi_rotation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "TetradRecord", from = "TetradRecord")]
pub struct Tetrad {
    pub legs: Matrix4<f64>,
    pub point: SpacetimePoint,
    pub kind: TetradKind,
    pub params: TetradParams,
}

#[derive(Serialize, Deserialize)]
struct TetradRecord {
    kind: TetradKind,
    point: [f64; 4],
    legs: Vec<f64>,
    params: TetradParams,
}

impl From<Tetrad> for TetradRecord {
    fn from(t: Tetrad) -> Self {
        let legs = (0..4).flat_map(|a| (0..4).map(move |m| (a, m))).map(|(a, m)| t.legs[(a, m)]).collect();
        Self { kind: t.kind, point: t.point.coords, legs, params: t.params }
    }
}

impl From<TetradRecord> for Tetrad {
    fn from(rec: TetradRecord) -> Self {
        let mut legs = Matrix4::zeros();
        for (i, v) in rec.legs.iter().take(16).enumerate() {
            legs[(i / 4, i % 4)] = *v;
        }
        Self { legs, point: SpacetimePoint::from_coords(rec.point), kind: rec.kind, params: rec.params }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalVector {
    pub components: [f64; 4],
    pub variance: Variance,
}

impl LocalVector {
    pub fn contravariant(components: [f64; 4]) -> Self {
        Self { components, variance: Variance::Contravariant }
    }

    pub fn covariant(components: [f64; 4]) -> Self {
        Self { components, variance: Variance::Covariant }
    }

    /// Flips the variance with η; the same operation both ways.
    pub fn toggled(&self) -> Self {
        let c = self.components;
        let variance = match self.variance {
            Variance::Contravariant => Variance::Covariant,
            Variance::Covariant => Variance::Contravariant,
        };
        Self { components: [c[0], -c[1], -c[2], -c[3]], variance }
    }

    pub fn as_contravariant(&self) -> Self {
        match self.variance {
            Variance::Contravariant => *self,
            Variance::Covariant => self.toggled(),
        }
    }

    pub fn as_covariant(&self) -> Self {
        match self.variance {
            Variance::Covariant => *self,
            Variance::Contravariant => self.toggled(),
        }
    }

    /// η_âb̂ u^â v^b̂, converting variances as needed.
    pub fn eta_inner(&self, other: &LocalVector) -> f64 {
        let u = self.as_contravariant().components;
        let v = other.as_contravariant().components;
        u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]
    }

    /// Unit propagation direction n^î = k^î / |k⃗| of a contravariant momentum.
    pub fn direction(&self) -> [f64; 3] {
        let k = self.as_contravariant().components;
        let norm = (k[1] * k[1] + k[2] * k[2] + k[3] * k[3]).sqrt();
        [k[1] / norm, k[2] / norm, k[3] / norm]
    }
}

impl Tetrad {
    /// Wraps arbitrary legs after checking orthonormality to `tol`.
    pub fn custom(cfg: &MetricConfig, point: SpacetimePoint, legs: Matrix4<f64>, tol: f64) -> Result<Tetrad> {
        let t = Tetrad { legs, point, kind: TetradKind::Custom, params: TetradParams::default() };
        let res = t.orthonormality_residual(cfg)?;
        if res > tol {
            return Err(Error::InvalidInput(format!("custom tetrad is not orthonormal (residual {res:e})")));
        }
        Ok(t)
    }

    /// max |e g eᵀ − η|.
    pub fn orthonormality_residual(&self, cfg: &MetricConfig) -> Result<f64> {
        let g = metric_at(cfg, &self.point)?;
        let m = self.legs * g * self.legs.transpose() - eta();
        Ok(m.amax())
    }

    /// (e⁻¹)_ν^b̂ as a matrix indexed [ν][b̂].
    pub fn inverse(&self) -> Result<Matrix4<f64>> {
        self.legs
            .try_inverse()
            .ok_or_else(|| Error::DegenerateTransform("tetrad legs are singular".into()))
    }

    pub fn leg(&self, a: usize) -> FourVector {
        FourVector::contravariant(std::array::from_fn(|m| self.legs[(a, m)]))
    }

    pub fn project_to_local(&self, v: &FourVector) -> Result<LocalVector> {
        let c = nalgebra::Vector4::from(v.components);
        let out = match v.variance {
            Variance::Contravariant => self.inverse()?.transpose() * c,
            Variance::Covariant => self.legs * c,
        };
        Ok(LocalVector { components: out.into(), variance: v.variance })
    }

    pub fn unproject(&self, v: &LocalVector) -> Result<FourVector> {
        let c = nalgebra::Vector4::from(v.components);
        let out = match v.variance {
            Variance::Contravariant => self.legs.transpose() * c,
            Variance::Covariant => self.inverse()? * c,
        };
        Ok(FourVector { components: out.into(), variance: v.variance })
    }
}

fn c<D: DualNum<Primitive = f64> + Copy>(v: f64) -> D {
    D::from(v)
}

/// The angular-momentum observers orbit in the equatorial plane; their legs
/// are only orthonormal there.
fn check_equatorial(theta: f64) -> Result<()> {
    if (theta - std::f64::consts::FRAC_PI_2).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("angular-momentum tetrads need theta = pi/2, got {theta}")));
    }
    Ok(())
}

fn horizon_factor<D: DualNum<Primitive = f64> + Copy>(rs: f64, r: D) -> D {
    -(r.recip() * rs) + 1.0
}

pub fn stationary_legs<D: DualNum<Primitive = f64> + Copy>(rs: f64, r: D, theta: D) -> [[D; 4]; 4] {
    let f = horizon_factor(rs, r);
    let z = c::<D>(0.0);
    [
        [f.sqrt().recip(), z, z, z],
        [z, z, r.recip(), z],
        [z, z, z, (r * theta.sin()).recip()],
        [z, f.sqrt(), z, z],
    ]
}

pub fn radial_fff_legs<D: DualNum<Primitive = f64> + Copy>(rs: f64, r: D, theta: D) -> [[D; 4]; 4] {
    let f = horizon_factor(rs, r);
    let v = (r.recip() * rs).sqrt();
    let z = c::<D>(0.0);
    [
        [f.recip(), -v, z, z],
        [z, z, r.recip(), z],
        [z, z, z, (r * theta.sin()).recip()],
        [-v / f, c(1.0), z, z],
    ]
}

/// Equatorial free-fall observer with angular momentum `l` and spatial rotation `phi_rot`.
///
/// `ur` must be the (negative) radial velocity at `r`.
pub fn fff_l_legs<D: DualNum<Primitive = f64> + Copy>(rs: f64, l: f64, r: D, theta: D, ur: D, phi_rot: D) -> [[D; 4]; 4] {
    let f = horizon_factor(rs, r);
    let s = theta.sin();
    let z = c::<D>(0.0);
    let srr = (r * rs).sqrt();
    let rot_r = [
        -(r.recip() * rs).sqrt() / f,
        -(r / rs).sqrt() * ur,
        z,
        -(srr * r).recip() * l / s,
    ];
    let rot_b = [z, f * l / srr, z, -ur / (srr * s)];
    let (sp, cp) = phi_rot.sin_cos();
    let mix = |a: &[D; 4], b: &[D; 4], ca: D, cb: D| -> [D; 4] { std::array::from_fn(|i| a[i] * ca + b[i] * cb) };
    [
        [f.recip(), ur, z, (r * r * s * s).recip() * l],
        [z, z, r.recip(), z],
        mix(&rot_b, &rot_r, cp, -sp),
        mix(&rot_r, &rot_b, cp, sp),
    ]
}

/// Expansion of the angular-momentum tetrad to first order in `l`.
pub fn fff_l_first_order_legs<D: DualNum<Primitive = f64> + Copy>(rs: f64, l: f64, r: D, theta: D) -> [[D; 4]; 4] {
    let f = horizon_factor(rs, r);
    let s = theta.sin();
    let v = (r.recip() * rs).sqrt();
    let srr = (r * rs).sqrt();
    let z = c::<D>(0.0);
    [
        [f.recip(), -v, z, (r * r * s * s).recip() * l],
        [z, z, r.recip(), z],
        [-(r * f).recip() * l, (-(r.recip() * rs) + 2.0) * l / srr, z, (r * s).recip()],
        [-v / f, c(1.0), z, -(srr * r * s).recip() * (2.0 * l)],
    ]
}

/// Radially accelerated frame built from the ingoing null field k = (1/f, −1, 0, 0)
/// and the outgoing null field m = (1, f, 0, 0), both parallel along k:
/// e_0̂ = αk + βm, e_3̂ = −αk + βm with αβ = 1/4.
pub fn radial_fermi_walker_legs<D: DualNum<Primitive = f64> + Copy>(rs: f64, alpha: f64, r: D, theta: D) -> [[D; 4]; 4] {
    let f = horizon_factor(rs, r);
    let beta = 0.25 / alpha;
    let z = c::<D>(0.0);
    [
        [f.recip() * alpha + beta, -c::<D>(alpha) + f * beta, z, z],
        [z, z, r.recip(), z],
        [z, z, z, (r * theta.sin()).recip()],
        [-f.recip() * alpha + beta, f * beta + alpha, z, z],
    ]
}

fn to_matrix(m: [[Dual64; 4]; 4]) -> (Matrix4<f64>, Matrix4<f64>) {
    let value = Matrix4::from_fn(|a, mu| m[a][mu].re);
    let deriv = Matrix4::from_fn(|a, mu| m[a][mu].eps);
    (value, deriv)
}

/// A tetrad assigned to every point of a region.
pub trait TetradField: Sync {
    fn kind(&self) -> TetradKind;

    fn params(&self) -> TetradParams {
        TetradParams::default()
    }

    fn legs(&self, cfg: &MetricConfig, x: &SpacetimePoint) -> Result<Matrix4<f64>>;

    /// d^β ∂_β e_â^μ; central differences unless overridden.
    fn legs_derivative(&self, cfg: &MetricConfig, x: &SpacetimePoint, dir: &[f64; 4]) -> Result<Matrix4<f64>> {
        let flat = central_difference::<16>(cfg, x, dir, |y| {
            let m = self.legs(cfg, y)?;
            Ok(std::array::from_fn(|i| m[(i / 4, i % 4)]))
        })?;
        Ok(Matrix4::from_fn(|a, mu| flat[4 * a + mu]))
    }

    fn tetrad(&self, cfg: &MetricConfig, x: &SpacetimePoint) -> Result<Tetrad> {
        Ok(Tetrad { legs: self.legs(cfg, x)?, point: *x, kind: self.kind(), params: self.params() })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StationaryField;

#[derive(Debug, Clone, Copy, Default)]
pub struct RadialFffField;

#[derive(Debug, Clone, Copy)]
pub struct FirstOrderFffLField {
    pub l_obs: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RadialFermiWalkerField {
    pub alpha: f64,
}

impl Default for RadialFermiWalkerField {
    fn default() -> Self {
        Self { alpha: 0.5 }
    }
}

/// Equatorial free-fall observers with angular momentum; the spatial rotation
/// Φ(r) is integrated from Φ(r_start) = 0.
#[derive(Debug, Clone, Copy)]
pub struct FffLField {
    pub l_obs: f64,
    pub r_start: f64,
}

macro_rules! closed_form_field {
    ($ty:ty, $kind:expr, |$s:ident, $cfg:ident, $x:ident| $body:expr) => {
        impl $ty {
            fn dual_legs(&self, $cfg: &MetricConfig, $x: [Dual64; 4]) -> Result<[[Dual64; 4]; 4]> {
                let $s = self;
                $body
            }
        }

        impl TetradField for $ty {
            fn kind(&self) -> TetradKind {
                $kind
            }

            fn params(&self) -> TetradParams {
                self.field_params()
            }

            fn legs(&self, cfg: &MetricConfig, x: &SpacetimePoint) -> Result<Matrix4<f64>> {
                cfg.check_outside(x)?;
                Ok(to_matrix(self.dual_legs(cfg, x.dual_along(&[0.0; 4]))?).0)
            }

            fn legs_derivative(&self, cfg: &MetricConfig, x: &SpacetimePoint, dir: &[f64; 4]) -> Result<Matrix4<f64>> {
                cfg.check_outside(x)?;
                Ok(to_matrix(self.dual_legs(cfg, x.dual_along(dir))?).1)
            }
        }
    };
}

impl StationaryField {
    fn field_params(&self) -> TetradParams {
        TetradParams::default()
    }
}

impl RadialFffField {
    fn field_params(&self) -> TetradParams {
        TetradParams::default()
    }
}

impl FirstOrderFffLField {
    fn field_params(&self) -> TetradParams {
        TetradParams { l_obs: Some(self.l_obs), phi_rotation: None }
    }
}

impl RadialFermiWalkerField {
    fn field_params(&self) -> TetradParams {
        TetradParams::default()
    }
}

impl FffLField {
    fn field_params(&self) -> TetradParams {
        TetradParams { l_obs: Some(self.l_obs), phi_rotation: None }
    }

    /// dΦ/dr = −l / (2 r² u^r).
    pub fn phi_rate(&self, cfg: &MetricConfig, r: f64) -> Result<f64> {
        let ur = observer_radial_velocity(cfg, r, self.l_obs)?;
        if ur == 0.0 {
            return Err(Error::TurningPoint { r, radicand: 0.0 });
        }
        Ok(-self.l_obs / (2.0 * r * r * ur))
    }

    /// Φ(r) by composite Simpson quadrature from r_start.
    pub fn phi_rotation(&self, cfg: &MetricConfig, r: f64) -> Result<f64> {
        let span = r - self.r_start;
        if span == 0.0 || self.l_obs == 0.0 {
            return Ok(0.0);
        }
        let n = 2 * ((span.abs() / 0.02).ceil() as usize).max(8);
        let h = span / n as f64;
        let mut sum = self.phi_rate(cfg, self.r_start)? + self.phi_rate(cfg, r)?;
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * self.phi_rate(cfg, self.r_start + i as f64 * h)?;
        }
        Ok(sum * h / 3.0)
    }
}

closed_form_field!(StationaryField, TetradKind::Stationary, |_s, cfg, x| Ok(stationary_legs(
    cfg.rs(),
    x[1],
    x[THETA]
)));

closed_form_field!(RadialFffField, TetradKind::RadialFFF, |_s, cfg, x| Ok(radial_fff_legs(
    cfg.rs(),
    x[1],
    x[THETA]
)));

closed_form_field!(FirstOrderFffLField, TetradKind::FFFWithLFirstOrder, |s, cfg, x| {
    if cfg.rs() == 0.0 {
        return Err(Error::InvalidInput("free-fall tetrads need r_s > 0".into()));
    }
    check_equatorial(x[THETA].re)?;
    Ok(fff_l_first_order_legs(cfg.rs(), s.l_obs, x[1], x[THETA]))
});

closed_form_field!(RadialFermiWalkerField, TetradKind::RadialFermiWalker, |s, cfg, x| Ok(
    radial_fermi_walker_legs(cfg.rs(), s.alpha, x[1], x[THETA])
));

closed_form_field!(FffLField, TetradKind::FFFWithL, |s, cfg, x| {
    if cfg.rs() == 0.0 {
        return Err(Error::InvalidInput("free-fall tetrads need r_s > 0".into()));
    }
    check_equatorial(x[THETA].re)?;
    let r0 = x[1].re;
    let ur0 = observer_radial_velocity(cfg, r0, s.l_obs)?;
    // u^r and Φ are functions of r only; their first-order dual parts are exact.
    let dr = x[1].eps;
    let dur = (cfg.rs() / (r0 * r0) * (-1.0) + s.l_obs * s.l_obs * (2.0 / r0.powi(3) - 3.0 * cfg.rs() / r0.powi(4)))
        / (2.0 * ur0);
    let ur = Dual64::new(ur0, dur * dr);
    let phi = Dual64::new(s.phi_rotation(cfg, r0)?, s.phi_rate(cfg, r0)? * dr);
    Ok(fff_l_legs(cfg.rs(), s.l_obs, x[1], x[THETA], ur, phi))
});

/// Closure-backed tetrad field (kind `Custom`), differentiated by central differences.
pub struct FnTetradField<F> {
    pub f: F,
}

impl<F> TetradField for FnTetradField<F>
where
    F: Fn(&MetricConfig, &SpacetimePoint) -> Result<Matrix4<f64>> + Sync,
{
    fn kind(&self) -> TetradKind {
        TetradKind::Custom
    }

    fn legs(&self, cfg: &MetricConfig, x: &SpacetimePoint) -> Result<Matrix4<f64>> {
        (self.f)(cfg, x)
    }
}

pub fn stationary_tetrad(cfg: &MetricConfig, x: &SpacetimePoint) -> Result<Tetrad> {
    StationaryField.tetrad(cfg, x)
}

pub fn radial_fff_tetrad(cfg: &MetricConfig, x: &SpacetimePoint) -> Result<Tetrad> {
    RadialFffField.tetrad(cfg, x)
}

/// Angular-momentum free-fall tetrad at one point with a caller-supplied rotation Φ.
pub fn fff_l_tetrad(cfg: &MetricConfig, x: &SpacetimePoint, l_obs: f64, phi_rotation: f64) -> Result<Tetrad> {
    cfg.check_outside(x)?;
    if cfg.rs() == 0.0 {
        return Err(Error::InvalidInput("free-fall tetrads need r_s > 0".into()));
    }
    check_equatorial(x.theta())?;
    let ur = observer_radial_velocity(cfg, x.r(), l_obs)?;
    let m = fff_l_legs(cfg.rs(), l_obs, x.r(), x.theta(), ur, phi_rotation);
    Ok(Tetrad {
        legs: Matrix4::from_fn(|a, mu| m[a][mu]),
        point: *x,
        kind: TetradKind::FFFWithL,
        params: TetradParams { l_obs: Some(l_obs), phi_rotation: Some(phi_rotation) },
    })
}

pub fn fff_l_first_order_tetrad(cfg: &MetricConfig, x: &SpacetimePoint, l_obs: f64) -> Result<Tetrad> {
    FirstOrderFffLField { l_obs }.tetrad(cfg, x)
}

/// ∇_dir e_â^ν for all legs, row â.
pub fn legs_covariant_derivative(
    cfg: &MetricConfig,
    field: &dyn TetradField,
    x: &SpacetimePoint,
    dir: &[f64; 4],
) -> Result<Matrix4<f64>> {
    let legs = field.legs(cfg, x)?;
    let mut d = field.legs_derivative(cfg, x, dir)?;
    let gamma = christoffel_at(cfg, x)?;
    for a in 0..4 {
        let leg: [f64; 4] = std::array::from_fn(|m| legs[(a, m)]);
        let conn = gamma.contract(dir, &leg);
        for nu in 0..4 {
            d[(a, nu)] += conn[nu];
        }
    }
    Ok(d)
}

fn row(m: &Matrix4<f64>, a: usize) -> FourVector {
    FourVector::contravariant(std::array::from_fn(|mu| m[(a, mu)]))
}

/// Euclidean norm of a world vector's components in the local frame.
fn local_norm(tet: &Tetrad, v: &FourVector) -> Result<f64> {
    let l = tet.project_to_local(v)?;
    Ok(l.components.iter().map(|c| c * c).sum::<f64>().sqrt())
}

/// a = ∇_u u for u = e_0̂ of the field, and ‖a‖ = (−a·a)^{1/2}.
pub fn acceleration_of_worldline(
    cfg: &MetricConfig,
    field: &dyn TetradField,
    x: &SpacetimePoint,
) -> Result<(FourVector, f64)> {
    let legs = field.legs(cfg, x)?;
    let u: [f64; 4] = std::array::from_fn(|m| legs[(0, m)]);
    let d = legs_covariant_derivative(cfg, field, x, &u)?;
    let a = row(&d, 0);
    let norm2 = -inner(cfg, x, &a, &a)?;
    Ok((a, norm2.max(0.0).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransportMode {
    Parallel,
    FermiWalker,
}

/// Per-point, per-leg residual norms of the chosen transport law along a worldline.
pub fn transport_residual(
    cfg: &MetricConfig,
    worldline: &[SpacetimePoint],
    field: &dyn TetradField,
    mode: TransportMode,
) -> Result<Vec<[f64; 4]>> {
    worldline
        .iter()
        .map(|x| {
            let tet = field.tetrad(cfg, x)?;
            let u = tet.leg(0);
            let d = legs_covariant_derivative(cfg, field, x, &u.components)?;
            let acc = row(&d, 0);
            let mut out = [0.0; 4];
            for (a, slot) in out.iter_mut().enumerate() {
                let grad = row(&d, a);
                let res = match mode {
                    TransportMode::Parallel => grad,
                    TransportMode::FermiWalker => {
                        let s = tet.leg(a);
                        let us = inner(cfg, x, &u, &s)?;
                        let as_ = inner(cfg, x, &acc, &s)?;
                        grad.try_sub(&acc.scale(us))?.try_add(&u.scale(as_))?
                    }
                };
                *slot = local_norm(&tet, &res)?;
            }
            Ok(out)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroWignerSample {
    pub r: f64,
    /// ‖∇_k e_â‖ per leg.
    pub transport_along_k: [f64; 4],
    /// (∇_k∇_u s)·u + (∇_k∇_u u)·s for s = e_1̂, e_2̂, e_3̂.
    pub projected_identity: [f64; 3],
    /// (∇_k∇_u s)·s′ + (∇_k∇_u s′)·s for the pairs (1̂,2̂), (1̂,3̂), (2̂,3̂).
    pub antisymmetric_identity: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroWignerReport {
    pub samples: Vec<ZeroWignerSample>,
    pub max_transport_along_k: f64,
    pub max_projected_identity: f64,
    pub max_antisymmetric_identity: f64,
}

/// Numerical checks of the sufficient condition ∇_k e_â = 0 and the two
/// second-derivative identities it implies, at each worldline point.
pub fn zero_wigner_frame_checks(
    cfg: &MetricConfig,
    worldline: &[SpacetimePoint],
    field: &dyn TetradField,
    photon: &dyn VectorField,
) -> Result<ZeroWignerReport> {
    // V_a(y) = ∇_u e_â at y, with u = e_0̂(y).
    let grad_u = |a: usize| {
        FnField::contravariant(move |cfg: &MetricConfig, y: &SpacetimePoint| {
            let legs = field.legs(cfg, y)?;
            let u: [f64; 4] = std::array::from_fn(|m| legs[(0, m)]);
            let d = legs_covariant_derivative(cfg, field, y, &u)?;
            Ok(std::array::from_fn(|m| d[(a, m)]))
        })
    };
    let mut samples = Vec::with_capacity(worldline.len());
    for x in worldline {
        let tet = field.tetrad(cfg, x)?;
        let k = FourVector::contravariant(photon.value(cfg, x)?);
        let dk = legs_covariant_derivative(cfg, field, x, &k.components)?;
        let mut transport_along_k = [0.0; 4];
        for (a, slot) in transport_along_k.iter_mut().enumerate() {
            *slot = local_norm(&tet, &row(&dk, a))?;
        }
        let mut second = Vec::with_capacity(4);
        for a in 0..4 {
            second.push(crate::geometry::directional_covariant_derivative(cfg, x, &k, &grad_u(a))?);
        }
        let u = tet.leg(0);
        let mut projected_identity = [0.0; 3];
        for s in 1..4 {
            projected_identity[s - 1] = inner(cfg, x, &second[s], &u)? + inner(cfg, x, &second[0], &tet.leg(s))?;
        }
        let mut antisymmetric_identity = [0.0; 3];
        for (i, (a, b)) in [(1, 2), (1, 3), (2, 3)].into_iter().enumerate() {
            antisymmetric_identity[i] =
                inner(cfg, x, &second[a], &tet.leg(b))? + inner(cfg, x, &second[b], &tet.leg(a))?;
        }
        samples.push(ZeroWignerSample { r: x.r(), transport_along_k, projected_identity, antisymmetric_identity });
    }
    let max_of = |f: &dyn Fn(&ZeroWignerSample) -> f64| samples.iter().map(f).fold(0.0, f64::max);
    let max_transport_along_k = max_of(&|s| s.transport_along_k.iter().fold(0.0, |m, v| m.max(*v)));
    let max_projected_identity = max_of(&|s| s.projected_identity.iter().fold(0.0, |m, v| m.max(v.abs())));
    let max_antisymmetric_identity = max_of(&|s| s.antisymmetric_identity.iter().fold(0.0, |m, v| m.max(v.abs())));
    Ok(ZeroWignerReport { samples, max_transport_along_k, max_projected_identity, max_antisymmetric_identity })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> MetricConfig {
        MetricConfig::schwarzschild(1.0)
    }

    fn eq(r: f64) -> SpacetimePoint {
        SpacetimePoint::equatorial(r, 0.0).unwrap()
    }

    #[test]
    fn stationary_substitution() {
        let t = stationary_tetrad(&cfg(), &eq(2.0)).unwrap();
        assert_relative_eq!(t.legs[(0, 0)], 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(t.legs[(3, 1)], 0.5f64.sqrt(), max_relative = 1e-15);
        assert!(t.orthonormality_residual(&cfg()).unwrap() < 1e-14);
        let far = stationary_tetrad(&cfg(), &eq(1e12)).unwrap();
        assert_relative_eq!(far.legs[(0, 0)], 1.0, epsilon = 1e-11);
        assert_relative_eq!(far.legs[(3, 1)], 1.0, epsilon = 1e-11);
    }

    #[test]
    fn radial_fff_substitution() {
        let t = radial_fff_tetrad(&cfg(), &eq(4.0)).unwrap();
        assert_relative_eq!(t.legs[(0, 0)], 4.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(t.legs[(0, 1)], -0.5, max_relative = 1e-15);
        assert!(t.orthonormality_residual(&cfg()).unwrap() < 1e-14);
    }

    #[test]
    fn inside_horizon_rejected() {
        let x = SpacetimePoint::equatorial(0.5, 0.0).unwrap();
        assert!(matches!(stationary_tetrad(&cfg(), &x), Err(Error::InsideHorizon { .. })));
    }

    #[test]
    fn fff_l_reduces_to_radial() {
        let a = fff_l_tetrad(&cfg(), &eq(6.0), 0.0, 0.0).unwrap();
        let b = radial_fff_tetrad(&cfg(), &eq(6.0)).unwrap();
        assert!((a.legs - b.legs).amax() < 1e-15);
        let c = fff_l_first_order_tetrad(&cfg(), &eq(6.0), 0.0).unwrap();
        assert!((c.legs - b.legs).amax() < 1e-15);
    }

    #[test]
    fn fff_l_orthonormal() {
        let field = FffLField { l_obs: 0.1, r_start: 12.0 };
        let x = eq(10.0);
        let phi = field.phi_rotation(&cfg(), 10.0).unwrap();
        let t = fff_l_tetrad(&cfg(), &x, 0.1, phi).unwrap();
        assert!(t.orthonormality_residual(&cfg()).unwrap() < 1e-12);
        assert!(field.tetrad(&cfg(), &x).unwrap().orthonormality_residual(&cfg()).unwrap() < 1e-12);
    }

    #[test]
    fn fff_l_turning_point() {
        let x = eq(1.5);
        assert!(matches!(fff_l_tetrad(&cfg(), &x, 3.0, 0.0), Err(Error::TurningPoint { .. })));
    }

    #[test]
    fn first_order_residual_is_quadratic() {
        let x = eq(10.0);
        let r1 = fff_l_first_order_tetrad(&cfg(), &x, 1e-3).unwrap().orthonormality_residual(&cfg()).unwrap();
        let r2 = fff_l_first_order_tetrad(&cfg(), &x, 2e-3).unwrap().orthonormality_residual(&cfg()).unwrap();
        assert!(r1 < 10.0 * 1e-6);
        assert_relative_eq!(r2 / r1, 4.0, max_relative = 1e-3);
        let t = fff_l_first_order_tetrad(&cfg(), &x, 0.3).unwrap();
        assert_eq!(t.legs[(2, 3)], 0.1);
    }

    #[test]
    fn projection_of_own_time_axis() {
        let t = radial_fff_tetrad(&cfg(), &eq(3.0)).unwrap();
        let u = t.project_to_local(&t.leg(0)).unwrap();
        for (i, v) in u.components.iter().enumerate() {
            assert!((v - if i == 0 { 1.0 } else { 0.0 }).abs() < 1e-14);
        }
    }

    #[test]
    fn radial_photon_points_inward() {
        let t = stationary_tetrad(&cfg(), &eq(4.0)).unwrap();
        let k = FourVector::contravariant([1.0 / 0.75, -1.0, 0.0, 0.0]);
        let l = t.project_to_local(&k).unwrap();
        let s = 0.75f64.sqrt().recip();
        assert_relative_eq!(l.components[0], s, max_relative = 1e-15);
        assert_relative_eq!(l.components[3], -s, max_relative = 1e-15);
        assert_eq!(l.direction(), [0.0, 0.0, -1.0]);
    }

    #[test]
    fn stationary_acceleration() {
        for r in [1.5, 3.0, 100.0] {
            let (_, a) = acceleration_of_worldline(&cfg(), &StationaryField, &eq(r)).unwrap();
            let expect = 0.5 / (r * r) / (1.0 - 1.0 / r).sqrt();
            assert_relative_eq!(a, expect, max_relative = 1e-12);
        }
        let (_, a) = acceleration_of_worldline(&cfg(), &StationaryField, &eq(100.0)).unwrap();
        assert!((a / 0.5e-4 - 1.0).abs() < 6e-3);
        let (_, near) = acceleration_of_worldline(&cfg(), &StationaryField, &eq(1.0 + 1e-5)).unwrap();
        assert!(near > 1e2);
    }

    #[test]
    fn free_fall_is_unaccelerated_and_parallel() {
        let line: Vec<_> = (0..20).map(|i| eq(8.0 - 0.3 * i as f64)).collect();
        let res = transport_residual(&cfg(), &line, &RadialFffField, TransportMode::Parallel).unwrap();
        assert!(res.iter().flatten().all(|v| *v < 1e-12));
        let (_, a) = acceleration_of_worldline(&cfg(), &RadialFffField, &eq(5.0)).unwrap();
        assert!(a < 1e-12);
    }

    #[test]
    fn stationary_fermi_walker() {
        let line: Vec<_> = (0..10).map(|i| eq(2.0 + i as f64)).collect();
        let fw = transport_residual(&cfg(), &line, &StationaryField, TransportMode::FermiWalker).unwrap();
        assert!(fw.iter().flatten().all(|v| *v < 1e-12), "{fw:?}");
        let par = transport_residual(&cfg(), &line, &StationaryField, TransportMode::Parallel).unwrap();
        assert!(par[0][0] > 1e-3);
    }

    #[test]
    fn custom_field_fd_matches_exact() {
        let custom = FnTetradField { f: |cfg: &MetricConfig, y: &SpacetimePoint| RadialFffField.legs(cfg, y) };
        let x = SpacetimePoint::new(0.0, 5.0, 1.2, 0.1).unwrap();
        let dir = [1.0, -0.8, 0.01, 0.02];
        let exact = RadialFffField.legs_derivative(&cfg(), &x, &dir).unwrap();
        let fd = custom.legs_derivative(&cfg(), &x, &dir).unwrap();
        assert!((exact - fd).amax() < 1e-9);
    }

    #[test]
    fn tetrad_json_round_trip() {
        let t = fff_l_tetrad(&cfg(), &eq(7.0), 0.2, 0.05).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["legs"].as_array().unwrap().len(), 16);
        assert_eq!(v["params"]["l_obs"], 0.2);
        let back: Tetrad = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn radial_fermi_walker_frame() {
        let field = RadialFermiWalkerField::default();
        let line: Vec<_> = (0..10).map(|i| eq(2.5 + 0.7 * i as f64)).collect();
        for x in &line {
            assert!(field.tetrad(&cfg(), x).unwrap().orthonormality_residual(&cfg()).unwrap() < 1e-13);
        }
        let fw = transport_residual(&cfg(), &line, &field, TransportMode::FermiWalker).unwrap();
        assert!(fw.iter().flatten().all(|v| *v < 1e-12));
        let (_, a) = acceleration_of_worldline(&cfg(), &field, &line[0]).unwrap();
        assert!(a > 1e-3);
    }
}
