//! Invariant checks behind the `validate` subcommand. Inputs are fixed so the
//! report is reproducible.

use nalgebra::Matrix4;
use num_complex::Complex64;
use photon_wigner::flat_sr::{aberration_angle, wigner_angle_flat, Boost};
use photon_wigner::geodesics::{
    conserved_angular_momentum, conserved_energy, integrate_geodesic, photon_momentum, photon_trajectory,
    GeodesicKind, PhotonKind, PhotonScenario,
};
use photon_wigner::quantum::{
    evolve_bell_pair_finite, reduced_density_single, transform_reduced_single, transform_two_photon_reduced,
    two_photon_reduced, BellPair, HelicityStructure, PairSample, PhotonWavePacket, PsiSample, TwoPhotonState,
};
use photon_wigner::tetrads::{
    acceleration_of_worldline, eta, transport_residual, FffLField, FirstOrderFffLField, RadialFermiWalkerField,
    RadialFffField, StationaryField, TetradField, TransportMode,
};
use photon_wigner::wigner::{
    accumulate_along_trajectory, cross_plane_closed_form, infinitesimal_sl2c_from_lambda, infinitesimal_wigner_angle,
    little_group_element, lowered_from_tilde, psi_tilde_at, tilde_from_lowered, LocalLorentzGenerator, Sl2c,
};
use photon_wigner::{FourVector, LocalVector, MetricConfig, Result, SpacetimePoint};
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = Result<(bool, String)>;

fn cfg() -> MetricConfig {
    MetricConfig::schwarzschild(1.0)
}

fn eq(r: f64) -> Result<SpacetimePoint> {
    SpacetimePoint::equatorial(r, 0.0)
}

/// Nearly uniform unit vectors on a Fibonacci spiral.
fn directions(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let s = (1.0 - z * z).sqrt();
            let p = golden * i as f64;
            [s * p.cos(), s * p.sin(), z]
        })
        .collect()
}

fn radial_zero() -> Check {
    let tr = photon_trajectory(&cfg(), &PhotonScenario::radial(1.0), &eq(10.0)?, 1e-3, 2.0, 20_000)?;
    let fields: [&dyn TetradField; 2] = [&StationaryField, &RadialFffField];
    let mut tilde = 0.0f64;
    let mut total = 0.0f64;
    for f in fields {
        let res = accumulate_along_trajectory(&cfg(), &tr, f)?;
        tilde = tilde.max(res.max_abs_psi_tilde());
        total = total.max(res.psi_total.abs());
    }
    Ok((tilde < 1e-9 && total < 1e-8, format!("max |psi~| {tilde:.1e}, max |psi_total| {total:.1e}")))
}

fn equatorial_zero() -> Check {
    let sc = PhotonScenario::new(PhotonKind::EquatorialWithB, 2.0, 1.0);
    let tr = photon_trajectory(&cfg(), &sc, &eq(10.0)?, 1e-3, 3.0, 20_000)?;
    let res = accumulate_along_trajectory(&cfg(), &tr, &FffLField { l_obs: 0.5, r_start: 10.0 })?;
    Ok((res.psi_total.abs() < 1e-7, format!("|psi_total| {:.1e}", res.psi_total.abs())))
}

fn cross_plane_ratio(r: f64, eps: f64) -> Result<f64> {
    let x = SpacetimePoint::new(0.0, r, FRAC_PI_2, FRAC_PI_2)?;
    let sc = PhotonScenario::new(PhotonKind::PolarPlaneFirstOrder, eps, 1.0);
    let k = FourVector::contravariant(photon_momentum(&cfg(), &sc, &x)?);
    Ok(psi_tilde_at(&cfg(), &FirstOrderFffLField { l_obs: eps }, &x, &k)?.0 / (eps * eps))
}

fn cross_plane() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for r in [5.0, 10.0, 20.0] {
        let (coarse, fine) = (cross_plane_ratio(r, 1e-3)?, cross_plane_ratio(r, 1e-4)?);
        let closed = cross_plane_closed_form(&cfg(), r, 1.0, 1.0)?;
        let consistency = (coarse / fine - 1.0).abs();
        let magnitude = (fine.abs() / closed.abs() - 1.0).abs();
        ok &= consistency < 1e-3 && magnitude < 1e-6 && fine != 0.0;
        notes.push(format!("r={r}: {fine:.8e}, ratio to closed form {:.8}", fine / closed));
    }
    Ok((ok, notes.join("; ")))
}

fn flat_cases() -> Check {
    let mut collinear = 0.0f64;
    for (i, d) in directions(24).into_iter().enumerate() {
        let b = Boost::new(d, -2.5 + 0.2 * i as f64)?;
        collinear = collinear.max(wigner_angle_flat(&b, [0.0, 0.0, 1.0])?.abs());
    }
    let b = Boost::with_speed([0.0, 1.0, 0.0], 0.6)?;
    let in_plane = (wigner_angle_flat(&b, [1.0, 0.0, 0.0])? + aberration_angle(&b, [1.0, 0.0, 0.0])?).abs();
    let d = 1e-4;
    let mut oblique = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            let (th, ph) = (0.1 + 0.5 * i as f64, 0.3 + 1.0 * j as f64);
            let psi = wigner_angle_flat(&Boost::new([0.0, th.sin(), th.cos()], d)?, [ph.cos(), ph.sin(), 0.0])?;
            oblique = oblique.max((psi - d * th.sin() * ph.cos()).abs());
        }
    }
    Ok((
        collinear < 1e-10 && in_plane < 1e-9 && oblique < 1e-7,
        format!("collinear {collinear:.1e}, in-plane |psi + aberration| {in_plane:.1e}, oblique {oblique:.1e}"),
    ))
}

fn sl2c_structure() -> Check {
    let dirs = directions(20);
    let mut det = 0.0f64;
    let mut det_inf = 0.0f64;
    let mut homo = 0.0f64;
    let mut tri = 0.0f64;
    let mut round = 0.0f64;
    let mut freq = 0.0f64;
    for (i, n) in dirs.iter().enumerate() {
        let m = dirs[(i * 7 + 3) % dirs.len()];
        let a = Sl2c::boost(*n, 1.5 - 0.15 * i as f64).compose(&Sl2c::rotation(m, 0.3 * i as f64 - 2.0));
        let b = Sl2c::boost(m, 0.1 * i as f64);
        det = det.max((a.det() - 1.0).norm());
        let (l, r) = (a.compose(&b).lorentz_matrix(), a.lorentz_matrix() * b.lorentz_matrix());
        homo = homo.max((l - r).amax() / l.amax());
        let k = LocalVector::contravariant([2.0, 2.0 * m[0], 2.0 * m[1], 2.0 * m[2]]);
        tri = tri.max(little_group_element(&a, &k)?.triangularity_residual);

        let mut low = Matrix4::zeros();
        let mut c = 0;
        for p in 0..4 {
            for q in (p + 1)..4 {
                c += 1;
                low[(p, q)] = ((i * 6 + c) as f64).sin();
                low[(q, p)] = -low[(p, q)];
            }
        }
        let gen = LocalLorentzGenerator::from_lowered(low, 1e-4);
        round = round.max((lowered_from_tilde(&tilde_from_lowered(&gen.lowered)) - gen.lowered).amax());
        let step = gen.norm() * gen.d_xi;
        det_inf = det_inf.max((infinitesimal_sl2c_from_lambda(&gen).det() - 1.0).norm() / (step * step));
        if 1.0 + n[2] > 1e-3 {
            let p1 = infinitesimal_wigner_angle(&gen, &LocalVector::contravariant([1.0, n[0], n[1], n[2]]))?;
            let p2 = infinitesimal_wigner_angle(&gen, &LocalVector::contravariant([1e3, 1e3 * n[0], 1e3 * n[1], 1e3 * n[2]]))?;
            freq = freq.max((p1 - p2).abs() / p1.abs().max(1e-300));
        }
    }
    Ok((
        det < 1e-10 && det_inf <= 10.0 && homo < 1e-10 && tri < 1e-9 && round < 1e-12 && freq < 1e-12,
        format!("det {det:.1e}, infinitesimal det/step^2 {det_inf:.2}, homomorphism {homo:.1e}, |S21| {tri:.1e}, round trip {round:.1e}, frequency {freq:.1e}"),
    ))
}

fn tetrads() -> Check {
    let c = cfg();
    let fffl = FffLField { l_obs: 0.5, r_start: 10.0 };
    let fw = RadialFermiWalkerField::default();
    let fields: [&dyn TetradField; 4] = [&StationaryField, &RadialFffField, &fffl, &fw];
    let mut ortho = 0.0f64;
    for f in fields {
        for r in [1.5, 2.0, 3.0, 5.0, 10.0, 50.0] {
            ortho = ortho.max(f.tetrad(&c, &eq(r)?)?.orthonormality_residual(&c)?);
        }
    }
    let line = (0..40).map(|i| eq(10.0 - 0.2 * i as f64)).collect::<Result<Vec<_>>>()?;
    let mut parallel = 0.0f64;
    let fff: [&dyn TetradField; 2] = [&RadialFffField, &fffl];
    for f in fff {
        for res in transport_residual(&c, &line, f, TransportMode::Parallel)? {
            parallel = parallel.max(res.iter().copied().fold(0.0, f64::max));
        }
    }
    let mut fermi = 0.0f64;
    for res in transport_residual(&c, &line, &fw, TransportMode::FermiWalker)? {
        fermi = fermi.max(res.iter().copied().fold(0.0, f64::max));
    }
    let mut accel = 0.0f64;
    for r in [1.5, 3.0, 10.0, 100.0] {
        let (_, a) = acceleration_of_worldline(&c, &StationaryField, &eq(r)?)?;
        accel = accel.max((a / (c.mass() / (r * r) / (1.0 - c.rs() / r).sqrt()) - 1.0).abs());
    }
    Ok((
        ortho < 1e-12 && parallel < 1e-7 && fermi < 1e-6 && accel < 1e-6,
        format!("orthonormality {ortho:.1e}, parallel {parallel:.1e}, Fermi-Walker {fermi:.1e}, acceleration {accel:.1e}"),
    ))
}

fn quantum() -> Check {
    let mut valid = true;
    let mut covariance = 0.0f64;
    for i in 0..8 {
        let phi = -PI + 0.8 * i as f64;
        let packet = PhotonWavePacket::gaussian([0.0, 0.0, 1.0], phi, 5.0, 0.5, 32)?;
        let rho = reduced_density_single(&packet);
        valid &= rho.validate().is_ok();
        for psi in [-1.3, 0.2, 2.9] {
            let out = transform_reduced_single(&rho, psi)?;
            valid &= out.validate().is_ok();
            let want = reduced_density_single(&PhotonWavePacket { polarization_angle: phi + psi, ..packet.clone() });
            covariance = covariance.max((&out.entries - &want.entries).iter().map(|c| c.norm()).fold(0.0, f64::max));
        }
    }
    let sc = PhotonScenario::new(PhotonKind::EquatorialWithB, 2.0, 1.0);
    let field = FffLField { l_obs: 0.5, r_start: 10.0 };
    let inbound = photon_trajectory(&cfg(), &sc, &eq(10.0)?, 1e-3, 3.0, 20_000)?;
    let outbound = photon_trajectory(&cfg(), &sc.outbound(), &eq(3.0)?, 1e-3, 10.0, 20_000)?;
    let bell = evolve_bell_pair_finite(&cfg(), &BellPair::new(1, -1, 1)?, &inbound, &outbound, &field)?;
    let bell_dev = (bell.relative_phase - 1.0).norm();

    let sample = PairSample {
        k1: 1.0,
        n1: [0.0, 0.0, 1.0],
        k2: 1.0,
        n2: [0.0, 0.0, -1.0],
        amplitude: Complex64::new(1.0, 0.0),
        weight: 1.0,
    };
    let state = TwoPhotonState::new(HelicityStructure::BellPhaseForm { phi1: 0.3, phi2: -0.1 }, vec![sample], false)?;
    valid &= two_photon_reduced(&state)?.validate().is_ok();
    let a = PsiSample { n1: [0.0, 0.0, 1.0], n2: [0.0, 0.0, -1.0], weight: 0.5, psi1: 0.2, psi2: 0.1 };
    let b = PsiSample { psi1: 0.2 + FRAC_PI_2, ..a };
    let ev = transform_two_photon_reduced(&state, &[a, b])?.eigenvalues();
    let ev_err = ev.iter().zip([0.0, 0.0, 0.5, 0.5]).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    Ok((
        valid && covariance < 1e-12 && bell_dev < 1e-7 && ev_err < 1e-10,
        format!("covariance {covariance:.1e}, Bell |phase - 1| {bell_dev:.1e}, dephased eigenvalues {ev_err:.1e}"),
    ))
}

fn geodesics() -> Check {
    let c = cfg();
    let sc = PhotonScenario::new(PhotonKind::EquatorialWithB, 3.0, 1.0);
    let x0 = eq(20.0)?;
    let k0 = photon_momentum(&c, &sc, &x0)?;
    let tr = integrate_geodesic(&c, &x0, &k0, 1e-3, 10_000, GeodesicKind::Null)?;
    let (e0, l0) = (conserved_energy(&c, &x0, &k0), conserved_angular_momentum(&x0, &k0));
    let drift = tr
        .samples
        .iter()
        .map(|s| {
            (conserved_energy(&c, &s.x, &s.k) / e0 - 1.0).abs().max((conserved_angular_momentum(&s.x, &s.k) / l0 - 1.0).abs())
        })
        .fold(0.0, f64::max);
    let null = tr.max_relative_constraint();
    let t_error = |d_xi: f64| -> Result<f64> {
        let x0 = eq(10.0)?;
        let k0 = photon_momentum(&c, &PhotonScenario::radial(1.0), &x0)?;
        let n = (5.0 / d_xi).round() as usize;
        let tr = integrate_geodesic(&c, &x0, &k0, d_xi, n, GeodesicKind::Null)?;
        let r = 10.0 - n as f64 * d_xi;
        let exact = (10.0 - r) + (9.0 / (r - 1.0)).ln();
        Ok((tr.samples.last().map_or(f64::NAN, |s| s.x.t()) - exact).abs())
    };
    let ratio = t_error(0.2)? / t_error(0.1)?;
    Ok((
        null < 1e-8 && drift < 1e-9 && (12.0..=20.0).contains(&ratio),
        format!("null {null:.1e}, conserved drift {drift:.1e}, RK4 halving ratio {ratio:.2}"),
    ))
}

fn frame_lorentz() -> Check {
    let c = cfg();
    let sc = PhotonScenario::new(PhotonKind::EquatorialWithB, 3.0, 1.0);
    let x0 = eq(20.0)?;
    let tr = integrate_geodesic(&c, &x0, &photon_momentum(&c, &sc, &x0)?, 1e-3, 10_000, GeodesicKind::Null)?;
    let m = accumulate_along_trajectory(&c, &tr, &FffLField { l_obs: 0.5, r_start: 20.0 })?.frame_matrix();
    let residual = (m.transpose() * eta() * m - eta()).amax();
    Ok((residual < 1e-8, format!("eta residual after 10^4 steps {residual:.1e}")))
}

pub fn run_all() -> Vec<CheckOutcome> {
    let checks: [(&'static str, fn() -> Check); 9] = [
        ("radial photons have zero Wigner angle", radial_zero),
        ("equatorial photon and observer", equatorial_zero),
        ("cross-plane first-order angle", cross_plane),
        ("flat-spacetime boost cases", flat_cases),
        ("SL(2,C) structure", sl2c_structure),
        ("tetrads and transport", tetrads),
        ("helicity density matrices", quantum),
        ("geodesic integration quality", geodesics),
        ("frame transform stays Lorentz", frame_lorentz),
    ];
    checks
        .into_iter()
        .map(|(name, check)| match check() {
            Ok((passed, detail)) => CheckOutcome { name, passed, detail },
            Err(e) => CheckOutcome { name, passed: false, detail: format!("error: {e}") },
        })
        .collect()
}
