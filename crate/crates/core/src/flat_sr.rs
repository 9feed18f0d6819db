//! Flat-spacetime polarization vectors and Wigner angles for single boosts.
//!
//! Active transformations throughout. The polarization angle φ of a linear
//! polarization vector is measured in the helicity frame R(k̂), so that a
//! transformation rotates it to φ' = φ + ψ.

use crate::error::{Error, Result};
use crate::tetrads::LocalVector;
use crate::wigner::{little_group_element, Sl2c, ANTIPODAL_SWITCH};
use nalgebra::{Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance for agreement of the polarization and SL(2,C) routes.
pub const ROUTE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boost {
    pub direction: [f64; 3],
    pub rapidity: f64,
}

impl Boost {
    /// Normalizes `direction`; a zero direction is only accepted with zero rapidity.
    pub fn new(direction: [f64; 3], rapidity: f64) -> Result<Self> {
        let n = Vector3::from(direction).norm();
        if !rapidity.is_finite() || !n.is_finite() || (n == 0.0 && rapidity != 0.0) {
            return Err(Error::InvalidInput(format!("boost direction {direction:?}, rapidity {rapidity}")));
        }
        let direction = if n == 0.0 { [0.0, 0.0, 1.0] } else { direction.map(|c| c / n) };
        Ok(Self { direction, rapidity })
    }

    /// Boost by speed `beta` with the appendix sign convention tanh ξ = −β.
    pub fn with_speed(direction: [f64; 3], beta: f64) -> Result<Self> {
        if !(beta.abs() < 1.0) {
            return Err(Error::InvalidInput(format!("speed {beta} must be below 1")));
        }
        Self::new(direction, -beta.atanh())
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let e = Vector3::from(self.direction);
        let (sh, ch) = (self.rapidity.sinh(), self.rapidity.cosh());
        let mut m = Matrix4::identity();
        m[(0, 0)] = ch;
        for i in 0..3 {
            m[(0, i + 1)] = sh * e[i];
            m[(i + 1, 0)] = sh * e[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] += (ch - 1.0) * e[i] * e[j];
            }
        }
        m
    }

    pub fn sl2c(&self) -> Sl2c {
        Sl2c::boost(self.direction, self.rapidity)
    }
}

fn unit(v: [f64; 3]) -> Result<Vector3<f64>> {
    let v = Vector3::from(v);
    let n = v.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("direction norm {n} is not 1")));
    }
    Ok(v / n)
}

fn minimal_rotation(k: &Vector3<f64>) -> Matrix3<f64> {
    let z = Vector3::z();
    let axis = z.cross(k);
    let s = axis.norm();
    let c = k.z;
    if s == 0.0 {
        return Matrix3::identity();
    }
    let a = axis / s;
    let kx = a.cross_matrix();
    Matrix3::identity() + kx * s + kx * kx * (1.0 - c)
}

/// Rotation taking ẑ to k̂: the minimal rotation about ẑ×k̂. Within
/// 1 + k̂³ < 10⁻⁶ it is the π rotation about x̂ times the minimal rotation to
/// the reflected direction, so k̂ = −ẑ gives diag(1, −1, −1).
pub fn rotation_to_direction(k_hat: [f64; 3]) -> Result<Matrix3<f64>> {
    let k = unit(k_hat)?;
    if 1.0 + k.z < ANTIPODAL_SWITCH {
        let flip = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0));
        Ok(flip * minimal_rotation(&(flip * k)))
    } else {
        Ok(minimal_rotation(&k))
    }
}

/// The spatial rotation embedded in a 4×4 Lorentz matrix.
pub fn rotation_4x4(r: &Matrix3<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(1, 1).copy_from(r);
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polarization4Vector {
    pub components: [Complex64; 4],
}

impl Polarization4Vector {
    /// Minkowski product ε·k with a real vector.
    pub fn dot_k(&self, k: &[f64; 4]) -> Complex64 {
        let c = &self.components;
        c[0] * k[0] - c[1] * k[1] - c[2] * k[2] - c[3] * k[3]
    }

    /// ε·ε* (−1 for a normalized transverse vector).
    pub fn norm_sqr(&self) -> f64 {
        let c = &self.components;
        c[0].norm_sqr() - c[1].norm_sqr() - c[2].norm_sqr() - c[3].norm_sqr()
    }

    fn spatial(&self) -> [Complex64; 3] {
        [self.components[1], self.components[2], self.components[3]]
    }

    fn from_spatial(v: [Complex64; 3]) -> Self {
        Self { components: [Complex64::new(0.0, 0.0), v[0], v[1], v[2]] }
    }
}

fn rotate(r: &Matrix3<f64>, v: [Complex64; 3]) -> [Complex64; 3] {
    std::array::from_fn(|i| (0..3).map(|j| v[j] * r[(i, j)]).sum())
}

/// ε_± = R(k̂)(0, 1, ∓i, 0)/√2.
pub fn helicity_polarization(k_hat: [f64; 3], helicity: i8) -> Result<Polarization4Vector> {
    let sign = match helicity {
        1 => -1.0,
        -1 => 1.0,
        _ => return Err(Error::InvalidInput(format!("helicity must be ±1, got {helicity}"))),
    };
    let r = rotation_to_direction(k_hat)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = [Complex64::new(s, 0.0), Complex64::new(0.0, sign * s), Complex64::new(0.0, 0.0)];
    Ok(Polarization4Vector::from_spatial(rotate(&r, v)))
}

/// R(k̂)(0, cos φ, sin φ, 0).
pub fn linear_polarization(k_hat: [f64; 3], phi: f64) -> Result<Polarization4Vector> {
    let r = rotation_to_direction(k_hat)?;
    let v = [Complex64::new(phi.cos(), 0.0), Complex64::new(phi.sin(), 0.0), Complex64::new(0.0, 0.0)];
    Ok(Polarization4Vector::from_spatial(rotate(&r, v)))
}

/// Λε − ((Λε)⁰/(Λk)⁰)Λk: the transformed vector in the gauge with zero time component.
pub fn transform_polarization(
    lambda: &Matrix4<f64>,
    eps: &Polarization4Vector,
    k: &[f64; 4],
) -> Result<Polarization4Vector> {
    let lk: [f64; 4] = std::array::from_fn(|i| (0..4).map(|j| lambda[(i, j)] * k[j]).sum());
    if lk[0] == 0.0 {
        return Err(Error::DegenerateTransform("(Λk)⁰ = 0".into()));
    }
    let le: [Complex64; 4] = std::array::from_fn(|i| (0..4).map(|j| eps.components[j] * lambda[(i, j)]).sum());
    let g = le[0] / lk[0];
    let mut out: [Complex64; 4] = std::array::from_fn(|i| le[i] - g * lk[i]);
    out[0] = Complex64::new(0.0, 0.0);
    Ok(Polarization4Vector { components: out })
}

fn wrap(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI { PI } else { w }
}

/// Angle of a linear polarization in the helicity frame of k̂', in (−π, π].
pub fn extract_polarization_angle(eps: &Polarization4Vector, k_hat: [f64; 3]) -> Result<f64> {
    let k = unit(k_hat)?;
    let v = eps.spatial();
    let overlap = (0..3).map(|i| v[i] * k[i]).sum::<Complex64>().norm() + eps.components[0].norm();
    if overlap > 1e-10 {
        return Err(Error::NonTransverse { overlap });
    }
    let r = rotation_to_direction(k_hat)?;
    let local = rotate(&r.transpose(), v);
    Ok(wrap(local[1].re.atan2(local[0].re)))
}

/// Local photon momentum (1, k̂).
fn unit_momentum(k: &Vector3<f64>) -> [f64; 4] {
    [1.0, k.x, k.y, k.z]
}

/// Unsigned angle between k̂ and its boosted direction.
pub fn aberration_angle(boost: &Boost, k_hat: [f64; 3]) -> Result<f64> {
    let k = unit(k_hat)?;
    let lk = boost.matrix() * nalgebra::Vector4::from(unit_momentum(&k));
    let kp = Vector3::new(lk[1], lk[2], lk[3]);
    Ok(k.cross(&kp).norm().atan2(k.dot(&kp)))
}

/// ψ from the polarization route: φ' − φ for a linear polarization at φ = 0.
pub fn polarization_route(lambda: &Matrix4<f64>, k_hat: [f64; 3]) -> Result<f64> {
    let k = unit(k_hat)?;
    let km = unit_momentum(&k);
    let eps = linear_polarization(k_hat, 0.0)?;
    let out = transform_polarization(lambda, &eps, &km)?;
    let lk = lambda * nalgebra::Vector4::from(km);
    let kp = Vector3::new(lk[1], lk[2], lk[3]).normalize();
    extract_polarization_angle(&out, kp.into())
}

/// ψ from the SL(2,C) little group element.
pub fn spinor_route(a: &Sl2c, k_hat: [f64; 3]) -> Result<f64> {
    let k = unit(k_hat)?;
    Ok(wrap(little_group_element(a, &LocalVector::contravariant(unit_momentum(&k)))?.psi))
}

/// Wigner angle of a boost for a photon along k̂, checked across both routes.
pub fn wigner_angle_flat(boost: &Boost, k_hat: [f64; 3]) -> Result<f64> {
    let polarization = polarization_route(&boost.matrix(), k_hat)?;
    let spinor = spinor_route(&boost.sl2c(), k_hat)?;
    if wrap(polarization - spinor).abs() > ROUTE_TOLERANCE {
        return Err(Error::RouteMismatch { polarization, spinor });
    }
    Ok(polarization)
}
