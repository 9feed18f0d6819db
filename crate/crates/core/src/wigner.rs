//! Tetrad rotation χ, local Lorentz generators, the SL(2,C) little group and
//! the Wigner phase accumulated along a photon trajectory.
//!
//! Sign convention: ψ is the angle by which the linear polarization rotates
//! (φ' = φ + ψ). The raw angle 2·arg S₁₁ of the little-group element has the
//! opposite sign and is negated everywhere a ψ is reported.

use crate::error::{Error, Result};
use crate::geodesics::Trajectory;
use crate::geometry::{FourVector, MetricConfig, SpacetimePoint, Variance};
use crate::tetrads::{eta, legs_covariant_derivative, LocalVector, TetradField};
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Below this value of 1 + n³ the problem is conjugated by a π rotation about x̂.
pub const ANTIPODAL_SWITCH: f64 = 1e-6;
/// Below this value of 1 + n³ the standard boost is undefined.
pub const ANTIPODAL_LIMIT: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn cx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The Pauli matrices with σ₀ = I.
pub fn sigma(a: usize) -> Matrix2<Complex64> {
    let (o, z) = (cx(1.0), cx(0.0));
    match a {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -I, I, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("sigma index {a} out of range"),
    }
}

/// χ_â^b̂ = (∇_k e_â^ν)(e⁻¹)_ν^b̂.
pub fn chi_matrix(
    cfg: &MetricConfig,
    field: &dyn TetradField,
    k: &FourVector,
    x: &SpacetimePoint,
) -> Result<Matrix4<f64>> {
    k.expect(Variance::Contravariant)?;
    let d = legs_covariant_derivative(cfg, field, x, &k.components)?;
    let inv = field
        .legs(cfg, x)?
        .try_inverse()
        .ok_or_else(|| Error::DegenerateTransform("tetrad legs are singular".into()))?;
    Ok(d * inv)
}

/// λ in three index placements. `covariant` acts on covariant local
/// components (δk_â = λ_â^b̂ k_b̂ dξ); `mixed` = ηλη acts on contravariant ones;
/// `lowered` = η·mixed is antisymmetric for an orthonormal tetrad field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalLorentzGenerator {
    pub covariant: Matrix4<f64>,
    pub mixed: Matrix4<f64>,
    pub lowered: Matrix4<f64>,
    pub d_xi: f64,
}

impl LocalLorentzGenerator {
    pub fn from_mixed(mixed: Matrix4<f64>, d_xi: f64) -> Self {
        let e = eta();
        Self { covariant: e * mixed * e, mixed, lowered: e * mixed, d_xi }
    }

    pub fn from_lowered(lowered: Matrix4<f64>, d_xi: f64) -> Self {
        Self::from_mixed(eta() * lowered, d_xi)
    }

    pub fn zero() -> Self {
        Self::from_mixed(Matrix4::zeros(), 0.0)
    }

    /// I + λ^â_b̂ dξ acting on contravariant local vectors.
    pub fn llt(&self) -> Matrix4<f64> {
        Matrix4::identity() + self.mixed * self.d_xi
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        (self.lowered + self.lowered.transpose()).amax()
    }

    pub fn norm(&self) -> f64 {
        self.mixed.norm()
    }
}

pub fn lambda_from_chi(chi: &Matrix4<f64>, d_xi: f64) -> LocalLorentzGenerator {
    let e = eta();
    LocalLorentzGenerator { covariant: *chi, mixed: e * chi * e, lowered: chi * e, d_xi }
}

/// K = k^â σ_â.
pub fn k_matrix(k_local: &LocalVector) -> Result<Matrix2<Complex64>> {
    let k = k_local.as_contravariant().components;
    check_forward_null(&k)?;
    Ok(Matrix2::new(
        cx(k[0] + k[3]),
        Complex64::new(k[1], -k[2]),
        Complex64::new(k[1], k[2]),
        cx(k[0] - k[3]),
    ))
}

fn check_forward_null(k: &[f64; 4]) -> Result<()> {
    let spatial = (k[1] * k[1] + k[2] * k[2] + k[3] * k[3]).sqrt();
    if !(k[0] > 0.0) || spatial == 0.0 {
        return Err(Error::NonNull(format!("k = {k:?} is not forward-pointing")));
    }
    let norm = k[0] * k[0] - spatial * spatial;
    if norm.abs() > 1e-10 * k[0] * k[0] {
        return Err(Error::NonNull(format!("k·k = {norm:e}")));
    }
    Ok(())
}

/// Inverse of `k_matrix`: k^â = ½ tr(σ_â K).
pub fn k_from_matrix(k: &Matrix2<Complex64>) -> LocalVector {
    LocalVector::contravariant(std::array::from_fn(|a| 0.5 * (sigma(a) * k).trace().re))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl2c(pub Matrix2<Complex64>);

impl Sl2c {
    pub fn identity() -> Self {
        Self(Matrix2::identity())
    }

    pub fn alpha(&self) -> Complex64 {
        self.0[(0, 0)]
    }
    pub fn beta(&self) -> Complex64 {
        self.0[(0, 1)]
    }
    pub fn gamma(&self) -> Complex64 {
        self.0[(1, 0)]
    }
    pub fn delta(&self) -> Complex64 {
        self.0[(1, 1)]
    }

    pub fn det(&self) -> Complex64 {
        self.alpha() * self.delta() - self.beta() * self.gamma()
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse(&self) -> Self {
        let d = self.det();
        Self(Matrix2::new(self.delta() / d, -self.beta() / d, -self.gamma() / d, self.alpha() / d))
    }

    pub fn compose(&self, other: &Sl2c) -> Sl2c {
        Sl2c(self.0 * other.0)
    }

    /// K → A K A†.
    pub fn act(&self, k_local: &LocalVector) -> Result<LocalVector> {
        let k = k_matrix(k_local)?;
        Ok(k_from_matrix(&(self.0 * k * self.0.adjoint())))
    }

    /// Λ^â_b̂ = ½ tr(σ_â A σ_b̂ A†).
    pub fn lorentz_matrix(&self) -> Matrix4<f64> {
        let ad = self.0.adjoint();
        Matrix4::from_fn(|a, b| 0.5 * (sigma(a) * self.0 * sigma(b) * ad).trace().re)
    }

    /// σ₁ A σ₁: conjugation by the π rotation about x̂.
    pub fn flipped(&self) -> Sl2c {
        Sl2c(sigma(1) * self.0 * sigma(1))
    }

    /// exp(−iθ n̂·σ/2): a counter-clockwise rotation by θ about n̂.
    pub fn rotation(axis: [f64; 3], theta: f64) -> Sl2c {
        let (s, c) = (theta / 2.0).sin_cos();
        let gen = sigma(1) * cx(axis[0]) + sigma(2) * cx(axis[1]) + sigma(3) * cx(axis[2]);
        Sl2c(Matrix2::identity() * cx(c) - gen * (I * s))
    }

    /// cosh(ξ/2) + sinh(ξ/2) ê·σ: an active boost of rapidity ξ along ê.
    pub fn boost(dir: [f64; 3], rapidity: f64) -> Sl2c {
        let (s, c) = ((rapidity / 2.0).sinh(), (rapidity / 2.0).cosh());
        let gen = sigma(1) * cx(dir[0]) + sigma(2) * cx(dir[1]) + sigma(3) * cx(dir[2]);
        Sl2c(Matrix2::identity() * cx(c) + gen * cx(s))
    }
}

/// Unit direction and 1 + n³ of a forward momentum.
fn unit_direction(k: &[f64; 4]) -> Result<[f64; 3]> {
    let spatial = (k[1] * k[1] + k[2] * k[2] + k[3] * k[3]).sqrt();
    if !(k[0] > 0.0) || spatial == 0.0 {
        return Err(Error::NonNull(format!("k = {k:?} is not forward-pointing")));
    }
    Ok([k[1] / spatial, k[2] / spatial, k[3] / spatial])
}

/// A_k = U(n̂)·diag(√k⁰, 1/√k⁰), with U the SU(2) image of the minimal rotation ẑ → n̂.
pub fn standard_boost_sl2c(k_local: &LocalVector) -> Result<Sl2c> {
    let k = k_local.as_contravariant().components;
    check_forward_null(&k)?;
    let n = unit_direction(&k)?;
    let p = 1.0 + n[2];
    if p <= ANTIPODAL_LIMIT {
        return Err(Error::AntipodalDirection { one_plus_n3: p });
    }
    let np = Complex64::new(n[0], n[1]);
    let s = (2.0 * p).sqrt();
    let w = k[0].sqrt();
    Ok(Sl2c(Matrix2::new(cx(p * w / s), -np.conj() / (s * w), np * (w / s), cx(p / (s * w)))))
}

/// Coefficients a, b, c of the transformed momentum: k'⁰ = (a/2)k⁰,
/// n'³ = 2b/a − 1, n'⁺ = 2c/a.
pub fn lt_coefficients(a_mat: &Sl2c, n: [f64; 3]) -> (f64, f64, Complex64) {
    let (al, be, ga, de) = (a_mat.alpha(), a_mat.beta(), a_mat.gamma(), a_mat.delta());
    let p = 1.0 + n[2];
    let q = 1.0 - n[2];
    let np = Complex64::new(n[0], n[1]);
    let nm = np.conj();
    let a = (al.norm_sqr() + ga.norm_sqr()) * p
        + (be.norm_sqr() + de.norm_sqr()) * q
        + ((al * be.conj() + ga * de.conj()) * nm).re * 2.0;
    let b = al.norm_sqr() * p + be.norm_sqr() * q + (al * be.conj() * nm).re * 2.0;
    let c = al.conj() * ga * p + be.conj() * de * q + be.conj() * ga * nm + al.conj() * de * np;
    (a, b, c)
}

pub fn transform_local_momentum(a: f64, b: f64, c: Complex64, k_local: &LocalVector) -> Result<LocalVector> {
    if !(a > 0.0) {
        return Err(Error::DegenerateTransform(format!("a = {a} must be positive")));
    }
    let k0 = k_local.as_contravariant().components[0];
    let k0p = 0.5 * a * k0;
    let n3 = 2.0 * b / a - 1.0;
    let np = c * (2.0 / a);
    Ok(LocalVector::contravariant([k0p, k0p * np.re, k0p * np.im, k0p * n3]))
}

/// Standard boost with the south-pole convention: for 1 + n³ < `ANTIPODAL_SWITCH`
/// the frame is (−iσ₁)·A_{Pk} with P the π rotation about x̂.
pub fn helicity_frame_sl2c(k_local: &LocalVector) -> Result<Sl2c> {
    let k = k_local.as_contravariant();
    let n = unit_direction(&k.components)?;
    if 1.0 + n[2] < ANTIPODAL_SWITCH {
        let flip = Sl2c(sigma(1) * -I);
        Ok(flip.compose(&standard_boost_sl2c(&flip_local(&k))?))
    } else {
        standard_boost_sl2c(&k)
    }
}

/// The raw angle 2·arg z from the closed-form a, b, c expression.
pub fn closed_form_raw_angle(a_mat: &Sl2c, n: [f64; 3]) -> f64 {
    let (a, b, c) = lt_coefficients(a_mat, n);
    let p = 1.0 + n[2];
    let np = Complex64::new(n[0], n[1]);
    let num = (a_mat.alpha() * p + a_mat.beta() * np) * b + (a_mat.gamma() * p + a_mat.delta() * np) * c.conj();
    2.0 * (num / (a * (b * p).sqrt())).arg()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LittleGroupElement {
    pub psi: f64,
    /// Upper-right entry of S.
    pub z: Complex64,
    pub k_prime: LocalVector,
    pub s_matrix: Sl2c,
    /// |S₂₁| + ||S₁₁| − 1|: zero for a little-group element.
    pub triangularity_residual: f64,
}

/// S = A_{k'}⁻¹ A A_k and its Wigner angle ψ = −2·arg S₁₁.
pub fn little_group_element(a_mat: &Sl2c, k_local: &LocalVector) -> Result<LittleGroupElement> {
    let k = k_local.as_contravariant();
    check_forward_null(&k.components)?;
    let n = unit_direction(&k.components)?;
    let (a, b, c) = lt_coefficients(a_mat, n);
    let k_prime = transform_local_momentum(a, b, c, &k)?;
    let s = helicity_frame_sl2c(&k_prime)?.inverse().compose(a_mat).compose(&helicity_frame_sl2c(&k)?);
    let triangularity_residual = s.gamma().norm() + (s.alpha().norm() - 1.0).abs();
    Ok(LittleGroupElement { psi: -2.0 * s.alpha().arg(), z: s.beta(), k_prime, s_matrix: s, triangularity_residual })
}

fn flip_local(k: &LocalVector) -> LocalVector {
    let c = k.components;
    LocalVector { components: [c[0], c[1], -c[2], -c[3]], variance: k.variance }
}

/// Ã from the lowered generator L (inverse of `lowered_from_tilde`).
pub fn tilde_from_lowered(l: &Matrix4<f64>) -> Matrix2<Complex64> {
    let al = Complex64::new(l[(0, 3)], -l[(1, 2)]) * 0.5;
    let be = Complex64::new(l[(0, 1)] - l[(3, 1)], -(l[(0, 2)] + l[(2, 3)])) * 0.5;
    let ga = Complex64::new(l[(0, 1)] + l[(3, 1)], l[(0, 2)] - l[(2, 3)]) * 0.5;
    Matrix2::new(al, be, ga, -al)
}

/// L_âb̂ = ½ Σ_ĉ η_âĉ tr(σ_b̂σ_ĉÃ + σ_ĉσ_b̂Ã†).
pub fn lowered_from_tilde(at: &Matrix2<Complex64>) -> Matrix4<f64> {
    let e = eta();
    let ad = at.adjoint();
    Matrix4::from_fn(|a, b| {
        (0..4)
            .map(|c| 0.5 * e[(a, c)] * (sigma(b) * sigma(c) * at + sigma(c) * sigma(b) * ad).trace().re)
            .sum()
    })
}

/// A = I + Ã dξ.
pub fn infinitesimal_sl2c_from_lambda(gen: &LocalLorentzGenerator) -> Sl2c {
    Sl2c(Matrix2::identity() + tilde_from_lowered(&gen.lowered) * cx(gen.d_xi))
}

/// First-order coefficient of the raw phase factor z for A = I + Ã dξ.
/// Its imaginary part is half the raw angle rate; its real part vanishes for
/// a Lorentz generator.
pub fn first_order_phase(gen: &LocalLorentzGenerator, k_local: &LocalVector) -> Result<Complex64> {
    let k = k_local.as_contravariant();
    let n = unit_direction(&k.components)?;
    let (mixed, n) = if 1.0 + n[2] < ANTIPODAL_SWITCH {
        let p = Matrix4::from_diagonal(&[1.0, 1.0, -1.0, -1.0].into());
        (p * gen.mixed * p, [n[0], -n[1], -n[2]])
    } else {
        (gen.mixed, n)
    };
    let t = tilde_from_lowered(&(eta() * mixed));
    let (al, be, ga, de) = (t[(0, 0)], t[(0, 1)], t[(1, 0)], t[(1, 1)]);
    let p = 1.0 + n[2];
    let q = 1.0 - n[2];
    let m = Complex64::new(n[0], n[1]);
    let db = 2.0 * al.re * p + 2.0 * (be * m).re;
    let da = 2.0 * al.re * p + 2.0 * de.re * q + 2.0 * ((be + ga.conj()) * m).re;
    let dc = ga * p + be.conj() * q + (al.conj() + de) * m;
    let dn = (al * p + be * m) * p + db * p + (ga * p + de * m) * m.conj() + m * dc.conj();
    Ok(dn / (2.0 * p) - da / 2.0 - db / (2.0 * p))
}

/// ψ̃ with e^{iψ/2} ≈ 1 + iψ̃ dξ/2, in the polarization-rotation sign convention.
pub fn infinitesimal_wigner_angle(gen: &LocalLorentzGenerator, k_local: &LocalVector) -> Result<f64> {
    Ok(-2.0 * first_order_phase(gen, k_local)?.im)
}

/// ψ̃ at one event for the tetrad field and world momentum k.
pub fn psi_tilde_at(
    cfg: &MetricConfig,
    field: &dyn TetradField,
    x: &SpacetimePoint,
    k: &FourVector,
) -> Result<(f64, LocalVector)> {
    let chi = chi_matrix(cfg, field, k, x)?;
    let gen = lambda_from_chi(&chi, 0.0);
    let tet = field.tetrad(cfg, x)?;
    let k_local = tet.project_to_local(k)?;
    Ok((infinitesimal_wigner_angle(&gen, &k_local)?, k_local))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerSample {
    pub xi: f64,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub psi_tilde: f64,
    pub psi_cumulative: f64,
    pub n_local: [f64; 3],
    pub null_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerResult {
    pub psi_total: f64,
    pub samples: Vec<WignerSample>,
    /// Time-ordered product of local Lorentz transformations (row-major).
    pub frame_transform: [[f64; 4]; 4],
}

impl WignerResult {
    pub fn frame_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.frame_transform[i][j])
    }

    pub fn max_abs_psi_tilde(&self) -> f64 {
        self.samples.iter().map(|s| s.psi_tilde.abs()).fold(0.0, f64::max)
    }
}

/// Largest ‖λ‖dξ allowed along a trajectory.
pub const MAX_GENERATOR_STEP: f64 = 1e-3;

/// Accumulates ψ̃ along the trajectory (trapezoid rule) and the ordered
/// product of exp(λ̄ dξ), with later steps multiplied on the left.
pub fn accumulate_along_trajectory(
    cfg: &MetricConfig,
    trajectory: &Trajectory,
    field: &dyn TetradField,
) -> Result<WignerResult> {
    let n = trajectory.samples.len();
    let mut psis = Vec::with_capacity(n);
    let mut gens = Vec::with_capacity(n);
    let mut dirs = Vec::with_capacity(n);
    for s in &trajectory.samples {
        let k = FourVector::contravariant(s.k);
        let chi = chi_matrix(cfg, field, &k, &s.x)?;
        let gen = lambda_from_chi(&chi, 0.0);
        let k_local = field.tetrad(cfg, &s.x)?.project_to_local(&k)?;
        psis.push(infinitesimal_wigner_angle(&gen, &k_local)?);
        dirs.push(k_local.direction());
        gens.push(gen.mixed);
    }
    let mut frame = Matrix4::<f64>::identity();
    let mut total = 0.0;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            let d_xi = trajectory.samples[i].xi - trajectory.samples[i - 1].xi;
            for j in [i - 1, i] {
                let v = gens[j].norm() * d_xi;
                if v > MAX_GENERATOR_STEP {
                    return Err(Error::StepTooCoarse { index: j, value: v });
                }
            }
            total += 0.5 * (psis[i - 1] + psis[i]) * d_xi;
            let mean = (gens[i - 1] + gens[i]) * (0.5 * d_xi);
            frame = mean.exp() * frame;
        }
        let s = &trajectory.samples[i];
        samples.push(WignerSample {
            xi: s.xi,
            r: s.x.r(),
            theta: s.x.theta(),
            phi: s.x.phi(),
            psi_tilde: psis[i],
            psi_cumulative: total,
            n_local: dirs[i],
            null_residual: s.constraint,
        });
    }
    Ok(WignerResult {
        psi_total: total,
        samples,
        frame_transform: std::array::from_fn(|i| std::array::from_fn(|j| frame[(i, j)])),
    })
}

/// Reference closed form (b l / r³)(1 + (3/2)√(r/r_s) − (5/4)√(r_s/r)) for the
/// cross-plane scenario; not used by the pipeline.
pub fn cross_plane_closed_form(cfg: &MetricConfig, r: f64, b_ph: f64, l_obs: f64) -> Result<f64> {
    let rs = cfg.rs();
    if !(r > rs) || rs == 0.0 {
        return Err(Error::InsideHorizon { r, r_s: rs });
    }
    Ok(b_ph * l_obs / r.powi(3) * (1.0 + 1.5 * (r / rs).sqrt() - 1.25 * (rs / r).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::{photon_momentum, PhotonScenario};
    use crate::tetrads::{FnTetradField, StationaryField};
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn lk(c: [f64; 4]) -> LocalVector {
        LocalVector::contravariant(c)
    }

    fn close(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>, tol: f64) -> bool {
        (a - b).iter().all(|v| v.norm() < tol)
    }

    #[test]
    fn k_matrix_standard_and_antipodal() {
        let k = k_matrix(&lk([1.0, 0.0, 0.0, 1.0])).unwrap();
        assert!(close(&k, &Matrix2::new(cx(2.0), cx(0.0), cx(0.0), cx(0.0)), 1e-15));
        let k = k_matrix(&lk([1.0, 0.0, 0.0, -1.0])).unwrap();
        assert!(close(&k, &Matrix2::new(cx(0.0), cx(0.0), cx(0.0), cx(2.0)), 1e-15));
        assert!(matches!(k_matrix(&lk([1.0, 0.5, 0.0, 0.0])), Err(Error::NonNull(_))));
        assert!(matches!(k_matrix(&lk([-1.0, 1.0, 0.0, 0.0])), Err(Error::NonNull(_))));
    }

    #[test]
    fn standard_boost_cases() {
        let a = standard_boost_sl2c(&lk([4.0, 0.0, 0.0, 4.0])).unwrap();
        assert!(close(&a.0, &Matrix2::new(cx(2.0), cx(0.0), cx(0.0), cx(0.5)), 1e-15));
        let a = standard_boost_sl2c(&lk([1.0, 1.0, 0.0, 0.0])).unwrap();
        let h = 0.5f64.sqrt();
        assert!(close(&a.0, &Matrix2::new(cx(h), cx(-h), cx(h), cx(h)), 1e-15));
        assert!(matches!(
            standard_boost_sl2c(&lk([1.0, 0.0, 0.0, -1.0])),
            Err(Error::AntipodalDirection { .. })
        ));
    }

    #[test]
    fn identity_little_group() {
        let k = lk([1.0, 0.6, -0.8, 0.0]);
        let s = little_group_element(&Sl2c::identity(), &k).unwrap();
        assert!(s.psi.abs() < 1e-15);
        for i in 0..4 {
            assert!((s.k_prime.components[i] - k.components[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn z_rotation_gives_rotation_angle() {
        let k = lk([1.0, 0.0, 0.0, 1.0]);
        let s = little_group_element(&Sl2c::rotation([0.0, 0.0, 1.0], 0.7), &k).unwrap();
        assert_relative_eq!(s.psi, 0.7, max_relative = 1e-14);
        assert!(s.triangularity_residual < 1e-12);
        assert_relative_eq!(s.k_prime.components[3], 1.0, max_relative = 1e-14);
        // diag(e^{iθ/2}, e^{-iθ/2}) is the clockwise rotation.
        let cw = Sl2c(Matrix2::new(Complex64::from_polar(1.0, 0.35), cx(0.0), cx(0.0), Complex64::from_polar(1.0, -0.35)));
        assert_relative_eq!(little_group_element(&cw, &k).unwrap().psi, -0.7, max_relative = 1e-14);
    }

    #[test]
    fn collinear_boost_has_no_angle() {
        let k = lk([1.0, 0.0, 0.0, 1.0]);
        let s = little_group_element(&Sl2c::boost([0.0, 0.0, 1.0], 0.9), &k).unwrap();
        assert!(s.psi.abs() < 1e-15);
        assert_relative_eq!(s.k_prime.components[0], 0.9f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn transform_identity_and_scaling() {
        let k = lk([1.0, 0.6, 0.0, 0.8]);
        let n = k.direction();
        let (a, b, c) = lt_coefficients(&Sl2c::identity(), n);
        assert_eq!(a, 2.0);
        assert_relative_eq!(b, 1.8, max_relative = 1e-15);
        let kp = transform_local_momentum(a, b, c, &k).unwrap();
        for i in 0..4 {
            assert!((kp.components[i] - k.components[i]).abs() < 1e-15);
        }
        let big = lk(k.components.map(|v| 2.0 * v));
        let kp2 = transform_local_momentum(a, b, c, &big).unwrap();
        assert_eq!(kp2.components[0], 2.0 * kp.components[0]);
        assert!(transform_local_momentum(0.0, b, c, &k).is_err());
    }

    #[test]
    fn rotation_generator_maps_to_alpha() {
        let rate = 0.3;
        let mut l = Matrix4::zeros();
        l[(1, 2)] = -rate;
        l[(2, 1)] = rate;
        let d_xi = 1e-4;
        let gen = LocalLorentzGenerator::from_lowered(l, d_xi);
        let a = infinitesimal_sl2c_from_lambda(&gen);
        assert!((a.alpha() - Complex64::new(1.0, rate * d_xi / 2.0)).norm() < 1e-16);
        let exact = Matrix2::new(
            Complex64::from_polar(1.0, rate * d_xi / 2.0),
            cx(0.0),
            cx(0.0),
            Complex64::from_polar(1.0, -rate * d_xi / 2.0),
        );
        assert!(close(&a.0, &exact, (rate * d_xi).powi(2)));
        assert_eq!(infinitesimal_sl2c_from_lambda(&LocalLorentzGenerator::zero()), Sl2c::identity());
    }

    #[test]
    fn eq_round_trip_on_basis() {
        for i in 0..4 {
            for j in (i + 1)..4 {
                let mut l = Matrix4::zeros();
                l[(i, j)] = 1.0;
                l[(j, i)] = -1.0;
                let back = lowered_from_tilde(&tilde_from_lowered(&l));
                assert!((back - l).amax() < 1e-15, "{i}{j}");
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let chi = Matrix4::from_fn(|i, j| (i as f64 + 1.0) * 0.1 - j as f64 * 0.37);
        let g = lambda_from_chi(&chi, 0.1);
        let back = LocalLorentzGenerator::from_mixed(g.mixed, 0.1);
        assert_eq!(back.covariant, chi);
        assert_eq!(LocalLorentzGenerator::from_lowered(g.lowered, 0.1).covariant, chi);
        assert_eq!(lambda_from_chi(&Matrix4::zeros(), 0.1).llt(), Matrix4::identity());
    }

    #[test]
    fn first_order_matches_finite_extrapolation() {
        let mut l = Matrix4::zeros();
        let vals = [(0, 1, 0.3), (0, 2, -0.2), (0, 3, 0.5), (1, 2, 0.7), (1, 3, -0.4), (2, 3, 0.25)];
        for (i, j, v) in vals {
            l[(i, j)] = v;
            l[(j, i)] = -v;
        }
        let k = lk([1.0, 0.48, -0.6, 0.64]);
        let rate = infinitesimal_wigner_angle(&LocalLorentzGenerator::from_lowered(l, 0.0), &k).unwrap();
        let phase = first_order_phase(&LocalLorentzGenerator::from_lowered(l, 0.0), &k).unwrap();
        assert!(phase.re.abs() < 1e-12);
        let finite = |h: f64| {
            let gen = LocalLorentzGenerator::from_lowered(l, h);
            let mut a = infinitesimal_sl2c_from_lambda(&gen);
            let det = a.det().sqrt();
            a.0 /= det;
            little_group_element(&a, &k).unwrap().psi / h
        };
        let h = 1e-4;
        let extrap = (4.0 * (finite(h) + finite(-h)) / 2.0 - (finite(2.0 * h) + finite(-2.0 * h)) / 2.0) / 3.0;
        assert_relative_eq!(rate, extrap, max_relative = 1e-8);
    }

    #[test]
    fn z_rotation_rate() {
        let rate = 0.45;
        let mut l = Matrix4::zeros();
        // δk¹ = −rate·k², δk² = rate·k¹: counter-clockwise.
        l[(1, 2)] = rate;
        l[(2, 1)] = -rate;
        let gen = LocalLorentzGenerator::from_lowered(l, 0.0);
        assert_eq!(gen.mixed[(2, 1)], rate);
        let psi = infinitesimal_wigner_angle(&gen, &lk([1.0, 0.0, 0.0, 1.0])).unwrap();
        assert_relative_eq!(psi, rate, max_relative = 1e-14);
        let south = infinitesimal_wigner_angle(&gen, &lk([1.0, 0.0, 0.0, -1.0])).unwrap();
        assert_relative_eq!(south, -rate, max_relative = 1e-14);
    }

    #[test]
    fn flat_constant_tetrad_chi_vanishes() {
        let cfg = MetricConfig::flat();
        let x = SpacetimePoint::new(0.0, 3.0, 1.0, 0.5).unwrap();
        // Cartesian axes written in spherical components: a constant frame.
        let field = FnTetradField {
            f: |_: &MetricConfig, y: &SpacetimePoint| {
                let (st, ct) = y.theta().sin_cos();
                let (sp, cp) = y.phi().sin_cos();
                let r = y.r();
                Ok(Matrix4::new(
                    1.0, 0.0, 0.0, 0.0,
                    0.0, st * cp, ct * cp / r, -sp / (r * st),
                    0.0, st * sp, ct * sp / r, cp / (r * st),
                    0.0, ct, -st / r, 0.0,
                ))
            },
        };
        let k = FourVector::contravariant([1.0, 0.3, 0.1, -0.05]);
        let chi = chi_matrix(&cfg, &field, &k, &x).unwrap();
        assert!(chi.amax() < 1e-9);
    }

    #[test]
    fn stationary_radial_chi_is_boost_only() {
        let cfg = MetricConfig::schwarzschild(1.0);
        let x = SpacetimePoint::new(0.0, 4.0, FRAC_PI_2, 0.0).unwrap();
        let k = FourVector::contravariant(photon_momentum(&cfg, &PhotonScenario::radial(1.0), &x).unwrap());
        let chi = chi_matrix(&cfg, &StationaryField, &k, &x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if !((i == 0 || i == 3) && (j == 0 || j == 3) && i != j) {
                    assert!(chi[(i, j)].abs() < 1e-15, "{i}{j} {}", chi[(i, j)]);
                }
            }
        }
        assert!(chi[(0, 3)].abs() > 1e-3);
    }

    #[test]
    fn closed_form_reference() {
        let cfg = MetricConfig::schwarzschild(1.0);
        let v = cross_plane_closed_form(&cfg, 10.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(v, 1e-3 * (1.0 + 1.5 * 10f64.sqrt() - 1.25 / 10f64.sqrt()), max_relative = 1e-15);
        assert_relative_eq!(v, 5.3481e-3, max_relative = 1e-4);
        assert_eq!(cross_plane_closed_form(&cfg, 10.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(cross_plane_closed_form(&cfg, 10.0, 1.0, -1.0).unwrap(), -v);
    }
}
