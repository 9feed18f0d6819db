use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64;
use photon_wigner::flat_sr::{
    extract_polarization_angle, linear_polarization, polarization_route, spinor_route, transform_polarization,
    wigner_angle_flat, Boost, Polarization4Vector,
};
use photon_wigner::geodesics::{
    integrate_geodesic, photon_momentum, GeodesicKind, PhotonField, PhotonKind, PhotonScenario,
};
use photon_wigner::geometry::directional_covariant_derivative;
use photon_wigner::quantum::{reduced_density_single, transform_reduced_single, HelicityDensityMatrix, PhotonWavePacket};
use photon_wigner::tetrads::{
    eta, FffLField, RadialFermiWalkerField, RadialFffField, StationaryField, TetradField,
};
use photon_wigner::wigner::{
    accumulate_along_trajectory, chi_matrix, infinitesimal_sl2c_from_lambda, infinitesimal_wigner_angle,
    lambda_from_chi, little_group_element, LocalLorentzGenerator, Sl2c,
};
use photon_wigner::{FourVector, LocalVector, MetricConfig, SpacetimePoint};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, PI};

fn cfg() -> MetricConfig {
    MetricConfig::schwarzschild(1.0)
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

fn unit() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, 0.0..2.0 * PI).prop_map(|(z, p)| {
        let s = (1.0 - z * z).sqrt();
        [s * p.cos(), s * p.sin(), z]
    })
}

fn sl2c() -> impl Strategy<Value = Sl2c> {
    (unit(), -2.0f64..2.0, unit(), -PI..PI)
        .prop_map(|(d, x, a, t)| Sl2c::boost(d, x).compose(&Sl2c::rotation(a, t)))
}

fn null(n: [f64; 3], w: f64) -> LocalVector {
    LocalVector::contravariant([w, w * n[0], w * n[1], w * n[2]])
}

fn generator() -> impl Strategy<Value = LocalLorentzGenerator> {
    proptest::array::uniform6(-1.0f64..1.0).prop_map(|v| {
        let mut l = Matrix4::zeros();
        let mut it = v.iter();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let x = *it.next().unwrap();
                l[(i, j)] = x;
                l[(j, i)] = -x;
            }
        }
        LocalLorentzGenerator::from_lowered(l, 1e-4)
    })
}

fn max_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn polarization_and_spinor_routes_agree(d in unit(), x in -2.0f64..2.0, k in unit()) {
        let b = Boost::new(d, x).unwrap();
        let p = polarization_route(&b.matrix(), k).unwrap();
        let s = spinor_route(&b.sl2c(), k).unwrap();
        prop_assert!(wrap(p - s).abs() < 1e-9, "{p} vs {s}");
    }

    #[test]
    fn polarization_angle_is_gauge_invariant(k in unit(), phi in -PI..PI, c in -5.0f64..5.0) {
        let eps = linear_polarization(k, phi).unwrap();
        let km = [1.0, k[0], k[1], k[2]];
        let shifted = Polarization4Vector {
            components: std::array::from_fn(|i| eps.components[i] + Complex64::new(c * km[i], 0.0)),
        };
        let id = Matrix4::identity();
        let back = transform_polarization(&id, &shifted, &km).unwrap();
        let angle = extract_polarization_angle(&back, k).unwrap();
        prop_assert!(wrap(angle - phi).abs() < 1e-10);
    }

    #[test]
    fn finite_angle_is_frequency_independent(a in sl2c(), n in unit(), w in 0.01f64..100.0) {
        let p1 = little_group_element(&a, &null(n, 1.0)).unwrap().psi;
        let p2 = little_group_element(&a, &null(n, w)).unwrap().psi;
        prop_assert!(wrap(p1 - p2).abs() < 1e-9);
    }

    #[test]
    fn infinitesimal_angle_is_frequency_independent(g in generator(), n in unit(), w in 0.01f64..100.0) {
        prop_assume!(1.0 + n[2] > 1e-3);
        let p1 = infinitesimal_wigner_angle(&g, &null(n, 1.0)).unwrap();
        let p2 = infinitesimal_wigner_angle(&g, &null(n, w)).unwrap();
        prop_assert!((p1 - p2).abs() <= 1e-12 * p1.abs().max(1.0));
    }

    #[test]
    fn sl2c_elements_are_unimodular(a in sl2c(), b in sl2c(), g in generator()) {
        prop_assert!((a.det() - 1.0).norm() < 1e-10);
        prop_assert!((a.compose(&b).det() - 1.0).norm() < 1e-10);
        let step = g.norm() * g.d_xi;
        prop_assert!((infinitesimal_sl2c_from_lambda(&g).det() - 1.0).norm() <= 10.0 * step * step);
    }

    #[test]
    fn lorentz_map_is_a_homomorphism(a in sl2c(), b in sl2c()) {
        let lhs = a.compose(&b).lorentz_matrix();
        let rhs = a.lorentz_matrix() * b.lorentz_matrix();
        prop_assert!((lhs - rhs).amax() < 1e-9 * lhs.amax().max(1.0));
        let l = a.lorentz_matrix();
        prop_assert!((l.transpose() * eta() * l - eta()).amax() < 1e-9 * l.amax().powi(2));
    }

    #[test]
    fn little_group_phases_add_under_composition(a in sl2c(), b in sl2c(), n in unit()) {
        let k = null(n, 1.0);
        let first = little_group_element(&a, &k).unwrap();
        let second = little_group_element(&b, &first.k_prime).unwrap();
        let both = little_group_element(&b.compose(&a), &k).unwrap();
        prop_assert!(wrap(first.psi + second.psi - both.psi).abs() < 1e-8);
    }

    #[test]
    fn density_invariants_survive_phase_rotation(p in 0.0f64..1.0, t in 0.0f64..1.0, arg in -PI..PI, psi in -PI..PI) {
        let c = Complex64::from_polar(t * (p * (1.0 - p)).sqrt(), arg);
        let m = DMatrix::from_row_slice(2, 2, &[Complex64::new(p, 0.0), c, c.conj(), Complex64::new(1.0 - p, 0.0)]);
        let rho = HelicityDensityMatrix::new(m).unwrap();
        let out = transform_reduced_single(&rho, psi).unwrap();
        prop_assert!(out.validate().is_ok());
        prop_assert!((out.trace() - 1.0).norm() < 1e-12);
        prop_assert!((out.purity() - rho.purity()).abs() < 1e-12);
        let (e0, e1) = (rho.eigenvalues(), out.eigenvalues());
        prop_assert!((e0[0] - e1[0]).abs() < 1e-12 && (e0[1] - e1[1]).abs() < 1e-12);
    }

    #[test]
    fn phase_rotations_compose_additively(phi in -PI..PI, a in -PI..PI, b in -PI..PI) {
        let packet = PhotonWavePacket::gaussian([0.0, 0.0, 1.0], phi, 5.0, 0.5, 16).unwrap();
        let rho = reduced_density_single(&packet);
        let two = transform_reduced_single(&transform_reduced_single(&rho, a).unwrap(), b).unwrap();
        let one = transform_reduced_single(&rho, a + b).unwrap();
        prop_assert!(max_norm(&(&two.entries - &one.entries)) < 1e-12);
        let want = reduced_density_single(&PhotonWavePacket { polarization_angle: phi + a, ..packet });
        let got = transform_reduced_single(&rho, a).unwrap();
        prop_assert!(max_norm(&(&got.entries - &want.entries)) < 1e-12);
    }

    #[test]
    fn generator_is_antisymmetric_for_every_field(r in 1.2f64..50.0, th in 0.3f64..2.8, k in proptest::array::uniform4(-1.0f64..1.0)) {
        let c = cfg();
        let x = SpacetimePoint::new(0.0, r, th, 0.4).unwrap();
        // The angular-momentum observers only exist on the equatorial plane.
        let fffl = FffLField { l_obs: 0.5, r_start: 60.0 };
        let fw = RadialFermiWalkerField::default();
        let fields: [&dyn TetradField; 4] = [&StationaryField, &RadialFffField, &fffl, &fw];
        let equator = SpacetimePoint::equatorial(r, 0.4).unwrap();
        for (i, f) in fields.into_iter().enumerate() {
            let at = if i == 2 { &equator } else { &x };
            let chi = chi_matrix(&c, f, &FourVector::contravariant(k), at).unwrap();
            let g = lambda_from_chi(&chi, 0.0);
            prop_assert!(g.antisymmetry_residual() <= 1e-9 * g.lowered.amax().max(1.0), "{:?}", f.kind());
        }
    }

    #[test]
    fn closed_form_momenta_solve_the_geodesic_equation(r in 1.5f64..40.0, b in 0.0f64..2.5, polar in any::<bool>()) {
        let c = cfg();
        let kind = if polar { PhotonKind::PolarPlaneWithB } else { PhotonKind::EquatorialWithB };
        let sc = PhotonScenario::new(kind, b, 1.0);
        let x = if polar { SpacetimePoint::new(0.0, r, FRAC_PI_2, FRAC_PI_2) } else { SpacetimePoint::equatorial(r, 0.0) }.unwrap();
        let k = FourVector::contravariant(photon_momentum(&c, &sc, &x).unwrap());
        let acc = directional_covariant_derivative(&c, &x, &k, &PhotonField { scenario: sc }).unwrap();
        prop_assert!(acc.max_abs() < 1e-12 * k.max_abs().powi(2).max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // A constant boost generator integrated along the flow of k reproduces the
    // finite flat-spacetime Wigner angle.
    #[test]
    fn constant_generator_integrates_to_flat_angle(d in unit(), k in unit(), xi in 0.05f64..2.0) {
        let mut g = Matrix4::zeros();
        for i in 0..3 {
            g[(0, i + 1)] = d[i];
            g[(i + 1, 0)] = d[i];
        }
        let gen = LocalLorentzGenerator::from_mixed(g, 0.0);
        let k0 = Vector4::new(1.0, k[0], k[1], k[2]);
        let n = 2000;
        let h = xi / n as f64;
        let mut closest = f64::INFINITY;
        let mut integral = 0.0;
        for i in 0..=n {
            let ks = Boost::new(d, i as f64 * h).unwrap().matrix() * k0;
            let kl = LocalVector::contravariant(ks.into());
            closest = closest.min(1.0 + kl.direction()[2]);
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            integral += w * infinitesimal_wigner_angle(&gen, &kl).unwrap();
        }
        integral *= h / 3.0;
        prop_assume!(closest > 0.05 && 1.0 + k[2] > 0.05);
        let flat = wigner_angle_flat(&Boost::new(d, xi).unwrap(), k).unwrap();
        prop_assert!(wrap(integral - flat).abs() < 1e-10, "{integral} vs {flat}");
    }

    // Local momentum components change at the rate given by the mixed generator.
    #[test]
    fn generator_matches_transported_momentum(r in 2.0f64..30.0, b in 0.0f64..2.0, l in 0.0f64..0.8) {
        let c = cfg();
        let sc = PhotonScenario::new(PhotonKind::EquatorialWithB, b, 1.0);
        let x0 = SpacetimePoint::equatorial(r, 0.0).unwrap();
        let k0 = photon_momentum(&c, &sc, &x0).unwrap();
        let h = 1e-4;
        let tr = integrate_geodesic(&c, &x0, &k0, h, 2, GeodesicKind::Null).unwrap();
        let field = FffLField { l_obs: l, r_start: 40.0 };
        let local: Vec<_> = tr.samples.iter().map(|s| {
            field.tetrad(&c, &s.x).unwrap().project_to_local(&FourVector::contravariant(s.k)).unwrap().components
        }).collect();
        let mid = &tr.samples[1];
        let chi = chi_matrix(&c, &field, &FourVector::contravariant(mid.k), &mid.x).unwrap();
        let rate = lambda_from_chi(&chi, 0.0).mixed * Vector4::from(local[1]);
        let scale = rate.amax().max(1e-3);
        for i in 0..4 {
            let fd = (local[2][i] - local[0][i]) / (2.0 * h);
            prop_assert!((fd - rate[i]).abs() < 1e-6 * scale, "component {i}: {fd} vs {}", rate[i]);
        }
    }
}

#[test]
fn frame_transform_stays_lorentz_over_ten_thousand_steps() {
    let c = cfg();
    let sc = PhotonScenario::new(PhotonKind::EquatorialWithB, 3.0, 1.0);
    let x0 = SpacetimePoint::equatorial(20.0, 0.0).unwrap();
    let k0 = photon_momentum(&c, &sc, &x0).unwrap();
    let tr = integrate_geodesic(&c, &x0, &k0, 1e-3, 10_000, GeodesicKind::Null).unwrap();
    assert_eq!(tr.len(), 10_001);
    let res = accumulate_along_trajectory(&c, &tr, &FffLField { l_obs: 0.5, r_start: 20.0 }).unwrap();
    let m = res.frame_matrix();
    let residual = (m.transpose() * eta() * m - eta()).amax();
    assert!(residual < 1e-8, "residual {residual:e}");
}
